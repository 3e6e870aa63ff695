//! Rule-based tangram video scoring: color segmentation recovers per-piece
//! masks, the first frame fixes each piece's reference geometry, and the
//! final frame is checked piece by piece against the target silhouette.

use std::collections::BTreeSet;

use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    classify_shape_with, connected_components, dilate, extract_contour, mask_iou,
    simplify_polygon, ColorRgb, RasterMask, ShapeClass, ShapeTolerances,
};
use crate::tags;
use crate::tangram::{TangramScene, TangramVariant, SIDEBAR_SCALE};
use crate::video_io::FrameSequence;

pub const PIECE_COUNT: usize = crate::tangram::PIECE_COUNT;

/// Pixels darker than this max-channel value count as silhouette.
pub const SILHOUETTE_MAX_CHANNEL: u8 = 40;

#[derive(Debug, Error)]
pub enum EvalTangramError {
    #[error("palette extraction failed: {0}")]
    Palette(String),
    #[error("silhouette extraction failed: {0}")]
    Silhouette(String),
    #[error("frame size {got_w}x{got_h} does not match scene {want_w}x{want_h}")]
    ShapeMismatch {
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },
    #[error("correlation undefined: {0}")]
    CorrelationUndefined(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangramEvalParams {
    /// Max-channel distance for nearest-palette-color segmentation.
    pub delta_col: u8,
    /// Accepted final-to-reference area ratio, inclusive.
    pub area_window: (f64, f64),
    /// Opposite-angle tolerance, in degrees, for shape classification.
    pub angle_window: f64,
    /// Frames sampled for the consistency score, endpoints always included.
    pub k_samples: usize,
}

impl Default for TangramEvalParams {
    fn default() -> Self {
        TangramEvalParams {
            delta_col: 60,
            area_window: (0.6, 1.4),
            angle_window: 15.0,
            k_samples: 16,
        }
    }
}

impl TangramEvalParams {
    fn shape_tolerances(&self) -> ShapeTolerances {
        ShapeTolerances {
            angle_tol_deg: self.angle_window,
            ..ShapeTolerances::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropsSource {
    Sidebar,
    GoldenLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceProps {
    pub piece_id: u32,
    pub color: ColorRgb,
    /// Reference area in board-scale pixels.
    pub a0: f64,
    pub s0: ShapeClass,
    pub source: PropsSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteProps {
    pub pieces: Vec<PieceProps>,
}

#[derive(Debug, Clone)]
pub struct PieceSegment {
    /// Every pixel assigned to this color.
    pub raw: RasterMask,
    /// Largest connected component of `raw`; the piece body.
    pub body: RasterMask,
    pub body_area: usize,
    pub debris_px: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceVerdict {
    pub piece_id: u32,
    pub found: bool,
    pub area_ratio: f64,
    pub shape_ok: bool,
    pub inside_ok: bool,
    pub u: u8,
    pub failure_tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangramEvalResult {
    pub strict_gc: u8,
    pub progress_gc: f64,
    pub boundary_iou: f64,
    pub visual_consistency: f64,
    /// Which reference the consistency score was computed against.
    pub consistency_reference: String,
    pub verdicts: Vec<PieceVerdict>,
    pub failure_tags: Vec<String>,
}

/// Flag source for the consistency score: the matching golden video when one
/// exists, otherwise the assumption that every piece is always intact.
pub enum ConsistencyReference<'a> {
    Static,
    Golden(&'a FrameSequence),
}

impl ConsistencyReference<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            ConsistencyReference::Static => "static",
            ConsistencyReference::Golden(_) => "golden",
        }
    }
}

fn pixel_color(frame: &RgbImage, x: u32, y: u32) -> ColorRgb {
    let p = frame.get_pixel(x, y);
    ColorRgb::new(p[0], p[1], p[2])
}

fn check_dims(frame: &RgbImage, scene: &TangramScene) -> Result<(), EvalTangramError> {
    if frame.width() != scene.canvas_w || frame.height() != scene.canvas_h {
        return Err(EvalTangramError::ShapeMismatch {
            got_w: frame.width(),
            got_h: frame.height(),
            want_w: scene.canvas_w,
            want_h: scene.canvas_h,
        });
    }
    Ok(())
}

/// Rasterization shaves piece tips into short extra edges. Any edge far
/// shorter than the longest one is such an artifact (real piece sides are
/// within a factor ~1.4 of each other), so merge it to its midpoint.
fn collapse_short_edges(poly: &crate::geom::Polygon, ratio: f64) -> crate::geom::Polygon {
    let mut v = poly.vertices.clone();
    loop {
        if v.len() <= 3 {
            break;
        }
        let n = v.len();
        let side = |i: usize, v: &[crate::geom::Point2]| v[i].dist(v[(i + 1) % n]);
        let longest = (0..n).map(|i| side(i, &v)).fold(0.0, f64::max);
        let Some(shortest) = (0..n).min_by(|&a, &b| {
            side(a, &v).partial_cmp(&side(b, &v)).expect("finite lengths")
        }) else {
            break;
        };
        if side(shortest, &v) >= ratio * longest {
            break;
        }
        let mid = v[shortest].lerp(v[(shortest + 1) % n], 0.5);
        v[shortest] = mid;
        v.remove((shortest + 1) % n);
    }
    crate::geom::Polygon { vertices: v }
}

/// Pieces are triangles or quads, so simplify until at most 4 corners
/// remain, drop degenerate tip edges, then classify.
pub fn classify_body(body: &RasterMask, params: &TangramEvalParams) -> ShapeClass {
    let Ok(contour) = extract_contour(body) else {
        return ShapeClass::Unknown;
    };
    let mut last = None;
    for k in 0..4 {
        let eps = 0.01 * f64::powi(2.0, k);
        let Ok(simple) = simplify_polygon(&contour, eps) else {
            break;
        };
        let done = simple.vertices.len() <= 4;
        last = Some(simple);
        if done {
            break;
        }
    }
    last.map(|simple| {
        classify_shape_with(&collapse_short_edges(&simple, 0.35), &params.shape_tolerances())
    })
    .unwrap_or(ShapeClass::Unknown)
}

/// Reference color, area, and shape per piece. FadeIn scenes carry them in
/// the manifest; sidebar variants measure them from the resting pieces on
/// the left half of the first frame, rescaling areas to board scale.
pub fn extract_palette_props(
    first_frame: &RgbImage,
    scene: &TangramScene,
    params: &TangramEvalParams,
) -> Result<PaletteProps, EvalTangramError> {
    check_dims(first_frame, scene)?;
    let colors: Vec<ColorRgb> = scene.pieces.iter().map(|r| r.color).collect();
    for i in 0..colors.len() {
        for j in i + 1..colors.len() {
            if colors[i] == colors[j] {
                return Err(EvalTangramError::Palette(format!(
                    "pieces {i} and {j} share a color"
                )));
            }
        }
    }

    if scene.variant == TangramVariant::FadeIn {
        let pieces = scene
            .pieces
            .iter()
            .map(|rec| {
                if rec.ref_area <= 0.0 {
                    return Err(EvalTangramError::Palette(format!(
                        "piece {} has nonpositive reference area",
                        rec.piece_id
                    )));
                }
                if rec.ref_shape == ShapeClass::Unknown {
                    return Err(EvalTangramError::Palette(format!(
                        "piece {} has unknown reference shape",
                        rec.piece_id
                    )));
                }
                Ok(PieceProps {
                    piece_id: rec.piece_id,
                    color: rec.color,
                    a0: rec.ref_area,
                    s0: rec.ref_shape,
                    source: PropsSource::GoldenLayout,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(PaletteProps { pieces });
    }

    let segments = segment_region(first_frame, &colors, params.delta_col, 0, scene.board_x);
    let mut pieces = Vec::with_capacity(PIECE_COUNT);
    for (rec, seg) in scene.pieces.iter().zip(&segments) {
        if seg.body_area == 0 {
            return Err(EvalTangramError::Palette(format!(
                "piece {} not found in the sidebar",
                rec.piece_id
            )));
        }
        let s0 = classify_body(&seg.body, params);
        if s0 == ShapeClass::Unknown {
            return Err(EvalTangramError::Palette(format!(
                "piece {} sidebar blob has unrecognizable shape",
                rec.piece_id
            )));
        }
        pieces.push(PieceProps {
            piece_id: rec.piece_id,
            color: rec.color,
            a0: seg.body_area as f64 / (SIDEBAR_SCALE * SIDEBAR_SCALE),
            s0,
            source: PropsSource::Sidebar,
        });
    }
    Ok(PaletteProps { pieces })
}

/// Binary mask of near-black pixels in the board region of the first frame.
/// Cross-checked against the manifest silhouette.
pub fn extract_target_silhouette(
    first_frame: &RgbImage,
    scene: &TangramScene,
) -> Result<RasterMask, EvalTangramError> {
    check_dims(first_frame, scene)?;
    let mut mask = RasterMask::new(scene.canvas_w, scene.canvas_h);
    for y in 0..scene.canvas_h {
        for x in scene.board_x..scene.canvas_w {
            let p = first_frame.get_pixel(x, y);
            if p[0].max(p[1]).max(p[2]) <= SILHOUETTE_MAX_CHANNEL {
                mask.set(x, y, true);
            }
        }
    }
    if mask.is_empty() {
        return Err(EvalTangramError::Silhouette(
            "no silhouette pixels in the board region".into(),
        ));
    }
    let expected = scene.silhouette_mask();
    let iou = mask_iou(&mask, &expected).expect("same canvas");
    if iou < 0.98 {
        return Err(EvalTangramError::Silhouette(format!(
            "silhouette IoU vs manifest is {iou:.4}, below 0.98"
        )));
    }
    Ok(mask)
}

fn segment_region(
    frame: &RgbImage,
    colors: &[ColorRgb],
    delta: u8,
    x0: u32,
    x1: u32,
) -> Vec<PieceSegment> {
    let (w, h) = (frame.width(), frame.height());
    let mut raws: Vec<RasterMask> = colors.iter().map(|_| RasterMask::new(w, h)).collect();
    for y in 0..h {
        for x in x0..x1.min(w) {
            let c = pixel_color(frame, x, y);
            let mut best = usize::MAX;
            let mut best_d = u8::MAX;
            let mut unique = false;
            for (i, &pc) in colors.iter().enumerate() {
                let d = c.dist(pc);
                if d < best_d {
                    best = i;
                    best_d = d;
                    unique = true;
                } else if d == best_d {
                    unique = false;
                }
            }
            if unique && best_d <= delta {
                raws[best].set(x, y, true);
            }
        }
    }
    raws.into_iter()
        .map(|raw| {
            let total = raw.area();
            let body = connected_components(&raw)
                .first()
                .map(|c| c.to_mask(w, h))
                .unwrap_or_else(|| RasterMask::new(w, h));
            let body_area = body.area();
            PieceSegment {
                raw,
                body,
                body_area,
                debris_px: total - body_area,
            }
        })
        .collect()
}

/// Assign each pixel to the strictly nearest palette color within
/// `delta_col`, then split every color mask into its largest component (the
/// piece body) and leftover debris.
pub fn segment_pieces(
    frame: &RgbImage,
    props: &PaletteProps,
    params: &TangramEvalParams,
) -> Vec<PieceSegment> {
    let colors: Vec<ColorRgb> = props.pieces.iter().map(|p| p.color).collect();
    segment_region(frame, &colors, params.delta_col, 0, frame.width())
}

/// Judge each piece in the final frame: present, area preserved, shape
/// preserved, and inside the (slightly dilated) target silhouette.
pub fn piece_completion(
    segments: &[PieceSegment],
    props: &PaletteProps,
    silhouette: &RasterMask,
    params: &TangramEvalParams,
) -> Vec<PieceVerdict> {
    let dilated = dilate(silhouette, 2);
    let (lo, hi) = params.area_window;
    props
        .pieces
        .iter()
        .zip(segments)
        .map(|(prop, seg)| {
            if seg.body_area == 0 {
                return PieceVerdict {
                    piece_id: prop.piece_id,
                    found: false,
                    area_ratio: 0.0,
                    shape_ok: false,
                    inside_ok: false,
                    u: 0,
                    failure_tags: vec![tags::CHROMATIC_DISTORTION.to_string()],
                };
            }
            let area_ratio = seg.body_area as f64 / prop.a0;
            let area_ok = area_ratio >= lo && area_ratio <= hi;
            let shape_ok = classify_body(&seg.body, params) == prop.s0;

            let mut inside_px = 0usize;
            let mut cx = 0.0;
            let mut cy = 0.0;
            for (x, y) in seg.body.iter_set() {
                if dilated.get(x, y) {
                    inside_px += 1;
                }
                cx += x as f64;
                cy += y as f64;
            }
            let inside_ok = inside_px as f64 >= 0.98 * seg.body_area as f64;
            cx /= seg.body_area as f64;
            cy /= seg.body_area as f64;

            let mut failure_tags = Vec::new();
            if !area_ok || !shape_ok {
                failure_tags.push(tags::STRUCTURAL_DISTORTION.to_string());
            }
            if !inside_ok {
                let centroid_inside =
                    dilated.get(cx.round().clamp(0.0, u32::MAX as f64) as u32, cy.round() as u32);
                failure_tags.push(if centroid_inside {
                    tags::ANGULAR_DEVIATION.to_string()
                } else {
                    tags::CENTROID_DISPLACEMENT.to_string()
                });
            }
            let u = u8::from(area_ok && shape_ok && inside_ok);
            PieceVerdict {
                piece_id: prop.piece_id,
                found: true,
                area_ratio,
                shape_ok,
                inside_ok,
                u,
                failure_tags,
            }
        })
        .collect()
}

/// Aggregate verdicts. Piece bodies intersecting by more than 1% of the
/// smaller body force both pieces incorrect first.
pub fn strict_and_progress(
    verdicts: &mut [PieceVerdict],
    bodies: &[&RasterMask],
) -> (u8, f64) {
    for i in 0..bodies.len() {
        for j in i + 1..bodies.len() {
            let a = bodies[i].area();
            let b = bodies[j].area();
            if a == 0 || b == 0 {
                continue;
            }
            let inter = bodies[i].intersection_area(bodies[j]).expect("same canvas");
            if inter as f64 > 0.01 * a.min(b) as f64 {
                for k in [i, j] {
                    verdicts[k].u = 0;
                    let tag = tags::STRUCTURAL_DISTORTION.to_string();
                    if !verdicts[k].failure_tags.contains(&tag) {
                        verdicts[k].failure_tags.push(tag);
                    }
                }
            }
        }
    }
    let sum: u32 = verdicts.iter().map(|v| u32::from(v.u)).sum();
    let strict = u8::from(sum == verdicts.len() as u32);
    (strict, sum as f64 / verdicts.len() as f64)
}

/// IoU between everything claimed as piece pixels (debris included, so
/// hallucinated blobs count against the score) and the target silhouette.
pub fn boundary_iou(segments: &[PieceSegment], silhouette: &RasterMask) -> f64 {
    let mut union = RasterMask::new(silhouette.width, silhouette.height);
    for seg in segments {
        union.union_with(&seg.raw).expect("same canvas");
    }
    mask_iou(&union, silhouette).expect("same canvas")
}

/// Evenly spaced frame indexes, first and last always included.
pub fn sample_indexes(frame_count: usize, k_samples: usize) -> Vec<usize> {
    if frame_count == 0 {
        return Vec::new();
    }
    if frame_count == 1 || k_samples < 2 {
        return vec![0];
    }
    let k = k_samples.min(frame_count);
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let idx = ((j as f64) * (frame_count - 1) as f64 / (k - 1) as f64).round() as usize;
        if out.last() != Some(&idx) {
            out.push(idx);
        }
    }
    out
}

/// Per-piece integrity flags at the given frames: the piece's total visible
/// area, with sidebar pixels rescaled to board scale, stays within the area
/// window of its reference area.
pub fn integrity_flags(
    frames: &FrameSequence,
    props: &PaletteProps,
    scene: &TangramScene,
    params: &TangramEvalParams,
    at: &[usize],
) -> Vec<Vec<bool>> {
    let (lo, hi) = params.area_window;
    let factor = SIDEBAR_SCALE * SIDEBAR_SCALE;
    at.iter()
        .map(|&t| {
            let segments = segment_pieces(frames.frame(t), props, params);
            segments
                .iter()
                .zip(&props.pieces)
                .map(|(seg, prop)| {
                    let mut board_px = 0usize;
                    let mut side_px = 0usize;
                    for (x, _) in seg.raw.iter_set() {
                        if x < scene.board_x {
                            side_px += 1;
                        } else {
                            board_px += 1;
                        }
                    }
                    let effective = board_px as f64 + side_px as f64 / factor;
                    let ratio = effective / prop.a0;
                    ratio >= lo && ratio <= hi
                })
                .collect()
        })
        .collect()
}

fn flag_agreement(candidate: &[Vec<bool>], reference: &[Vec<bool>]) -> f64 {
    let mut matches = 0usize;
    let mut total = 0usize;
    for (c, r) in candidate.iter().zip(reference) {
        for (a, b) in c.iter().zip(r) {
            matches += usize::from(a == b);
            total += 1;
        }
    }
    if total == 0 {
        return 1.0;
    }
    matches as f64 / total as f64
}

/// Fraction of sampled (piece, frame) integrity flags agreeing with the
/// reference. Golden references are sampled at the same normalized times as
/// the candidate.
pub fn visual_consistency(
    frames: &FrameSequence,
    props: &PaletteProps,
    scene: &TangramScene,
    params: &TangramEvalParams,
    reference: &ConsistencyReference,
) -> f64 {
    let at = sample_indexes(frames.count(), params.k_samples);
    let candidate = integrity_flags(frames, props, scene, params, &at);
    let reference_flags = match reference {
        ConsistencyReference::Static => at
            .iter()
            .map(|_| vec![true; props.pieces.len()])
            .collect(),
        ConsistencyReference::Golden(golden) => {
            let n_c = frames.count().max(2) - 1;
            let golden_at: Vec<usize> = at
                .iter()
                .map(|&t| {
                    let pos = t as f64 / n_c as f64;
                    (pos * (golden.count() - 1) as f64).round() as usize
                })
                .collect();
            integrity_flags(golden, props, scene, params, &golden_at)
        }
    };
    flag_agreement(&candidate, &reference_flags)
}

/// Full scoring pipeline for one candidate video against its scene.
pub fn evaluate_tangram_video(
    frames: &FrameSequence,
    scene: &TangramScene,
    params: &TangramEvalParams,
    reference: &ConsistencyReference,
) -> Result<TangramEvalResult, EvalTangramError> {
    check_dims(frames.frame(0), scene)?;
    let props = extract_palette_props(frames.frame(0), scene, params)?;
    let silhouette = extract_target_silhouette(frames.frame(0), scene)?;

    let final_frame = frames.frame(frames.count() - 1);
    let segments = segment_pieces(final_frame, &props, params);
    let mut verdicts = piece_completion(&segments, &props, &silhouette, params);
    let bodies: Vec<&RasterMask> = segments.iter().map(|s| &s.body).collect();
    let (strict_gc, progress_gc) = strict_and_progress(&mut verdicts, &bodies);
    let iou = boundary_iou(&segments, &silhouette);
    let consistency = visual_consistency(frames, &props, scene, params, reference);

    let mut all_tags: BTreeSet<String> = BTreeSet::new();
    for v in &verdicts {
        all_tags.extend(v.failure_tags.iter().cloned());
    }

    Ok(TangramEvalResult {
        strict_gc,
        progress_gc,
        boundary_iou: iou,
        visual_consistency: consistency,
        consistency_reference: reference.name().to_string(),
        verdicts,
        failure_tags: all_tags.into_iter().collect(),
    })
}

/// Pearson correlation between the consistency score and strict success
/// across instances.
pub fn consistency_success_correlation(
    pairs: &[(f64, u8)],
) -> Result<f64, EvalTangramError> {
    if pairs.len() < 3 {
        return Err(EvalTangramError::CorrelationUndefined(format!(
            "need at least 3 reports, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pairs {
        let dx = x - mean_x;
        let dy = y as f64 - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(EvalTangramError::CorrelationUndefined(
            "a series is constant".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rasterize;
    use crate::tangram::{
        build_scene, scatter_layout, sparse_layout, square_layout, synthesize_assembly_video,
        PieceKind, CANVAS_WHITE,
    };

    fn golden(variant: TangramVariant, layout_seed: u64, total: usize) -> (TangramScene, FrameSequence) {
        let layout = match variant {
            TangramVariant::FadeIn => square_layout(),
            _ => scatter_layout(layout_seed),
        };
        let scene = build_scene(variant, &layout, layout_seed).unwrap();
        let video = synthesize_assembly_video(&scene, total).unwrap();
        (scene, video)
    }

    fn paint(frame: &mut RgbImage, mask: &RasterMask, color: ColorRgb) {
        for (x, y) in mask.iter_set() {
            frame.put_pixel(x, y, image::Rgb([color.r, color.g, color.b]));
        }
    }

    #[test]
    fn golden_translation_round_trip_scores_perfectly() {
        let (scene, video) = golden(TangramVariant::Translation, 17, 61);
        let params = TangramEvalParams::default();
        let result =
            evaluate_tangram_video(&video, &scene, &params, &ConsistencyReference::Golden(&video))
                .unwrap();
        assert_eq!(result.strict_gc, 1, "verdicts: {:?}", result.verdicts);
        assert_eq!(result.progress_gc, 1.0);
        assert!(result.boundary_iou >= 0.99, "iou {}", result.boundary_iou);
        assert_eq!(result.visual_consistency, 1.0);
        assert!(result.failure_tags.is_empty());
    }

    #[test]
    fn golden_fade_in_and_rotation_score_strict_one() {
        for (variant, total) in [
            (TangramVariant::FadeIn, 81),
            (TangramVariant::Rotation, 201),
        ] {
            let (scene, video) = golden(variant, 23, total);
            let params = TangramEvalParams::default();
            let result = evaluate_tangram_video(
                &video,
                &scene,
                &params,
                &ConsistencyReference::Golden(&video),
            )
            .unwrap();
            assert_eq!(result.strict_gc, 1, "{}: {:?}", variant.name(), result.verdicts);
            assert!(result.boundary_iou >= 0.99, "{}: {}", variant.name(), result.boundary_iou);
            assert_eq!(result.visual_consistency, 1.0, "{}", variant.name());
        }
    }

    #[test]
    fn sidebar_palette_props_recover_expected_shapes_and_areas() {
        let (scene, video) = golden(TangramVariant::Translation, 5, 61);
        let params = TangramEvalParams::default();
        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        assert_eq!(props.pieces.len(), 7);
        let mut classes: Vec<ShapeClass> = props.pieces.iter().map(|p| p.s0).collect();
        classes.sort_by_key(|c| c.name());
        assert_eq!(
            classes.iter().filter(|&&c| c == ShapeClass::Triangle).count(),
            5
        );
        assert!(classes.contains(&ShapeClass::Square));
        assert!(classes.contains(&ShapeClass::Parallelogram));
        for (prop, rec) in props.pieces.iter().zip(&scene.pieces) {
            assert_eq!(prop.source, PropsSource::Sidebar);
            assert_eq!(prop.s0, rec.kind.shape_class(), "piece {}", prop.piece_id);
            let full = rasterize(&scene.target_poly(rec), scene.canvas_w, scene.canvas_h).area();
            let rel = (prop.a0 - full as f64).abs() / full as f64;
            assert!(rel < 0.12, "piece {}: a0 {} vs target {}", prop.piece_id, prop.a0, full);
        }
    }

    #[test]
    fn fade_in_props_come_from_the_manifest() {
        let (scene, video) = golden(TangramVariant::FadeIn, 2, 81);
        let params = TangramEvalParams::default();
        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        for (prop, rec) in props.pieces.iter().zip(&scene.pieces) {
            assert_eq!(prop.source, PropsSource::GoldenLayout);
            assert_eq!(prop.color, rec.color);
            assert_eq!(prop.a0, rec.ref_area);
        }
    }

    #[test]
    fn duplicate_sidebar_colors_fail_palette_extraction() {
        let (mut scene, _) = golden(TangramVariant::Translation, 3, 61);
        let c = scene.pieces[0].color;
        scene.pieces[1].color = c;
        let video = synthesize_assembly_video(&scene, 61).unwrap();
        let err = extract_palette_props(video.frame(0), &scene, &TangramEvalParams::default())
            .unwrap_err();
        assert!(matches!(err, EvalTangramError::Palette(_)));
    }

    #[test]
    fn all_white_first_frame_fails_silhouette_extraction() {
        let (scene, video) = golden(TangramVariant::Translation, 4, 61);
        let blank = RgbImage::from_pixel(
            video.width(),
            video.height(),
            image::Rgb([255, 255, 255]),
        );
        let err = extract_target_silhouette(&blank, &scene).unwrap_err();
        assert!(matches!(err, EvalTangramError::Silhouette(_)));
    }

    #[test]
    fn dark_gray_silhouette_still_extracts_exactly() {
        let (scene, video) = golden(TangramVariant::Translation, 6, 61);
        let mut frame = video.frame(0).clone();
        let expected = extract_target_silhouette(video.frame(0), &scene).unwrap();
        paint(&mut frame, &expected, ColorRgb::new(30, 30, 30));
        let got = extract_target_silhouette(&frame, &scene).unwrap();
        assert_eq!(got.area(), expected.area());
        assert!((mask_iou(&got, &expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hallucinated_blob_lowers_boundary_iou_analytically() {
        let (scene, video) = golden(TangramVariant::FadeIn, 8, 81);
        let params = TangramEvalParams::default();
        let mut last = video.frame(video.count() - 1).clone();
        let sil = scene.silhouette_mask();
        let blob_area = (sil.area() as f64 * 0.05).round() as usize;
        let side = (blob_area as f64).sqrt().round() as u32;
        let mut blob = RasterMask::new(scene.canvas_w, scene.canvas_h);
        for y in 0..side {
            for x in 0..side {
                blob.set(4 + x, 4 + y, true);
            }
        }
        assert_eq!(blob.intersection_area(&sil).unwrap(), 0);
        paint(&mut last, &blob, scene.pieces[0].color);

        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        let segments = segment_pieces(&last, &props, &params);
        let iou = boundary_iou(&segments, &sil);
        let expect = 1.0 / (1.0 + blob.area() as f64 / sil.area() as f64);
        assert!((iou - expect).abs() < 0.01, "iou {iou} vs {expect}");

        let mut verdicts = piece_completion(&segments, &props, &sil, &params);
        let bodies: Vec<&RasterMask> = segments.iter().map(|s| &s.body).collect();
        let (strict, _) = strict_and_progress(&mut verdicts, &bodies);
        assert_eq!(strict, 1, "debris must not break completion: {verdicts:?}");
    }

    #[test]
    fn vanished_piece_tags_chromatic_and_drops_progress() {
        let (scene, video) = golden(TangramVariant::FadeIn, 9, 81);
        let params = TangramEvalParams::default();
        let mut frames: Vec<RgbImage> = (0..video.count()).map(|t| video.frame(t).clone()).collect();
        let rec = scene.piece(3);
        let mask = rasterize(&scene.target_poly(rec), scene.canvas_w, scene.canvas_h);
        let last = frames.len() - 1;
        paint(&mut frames[last], &mask, CANVAS_WHITE);
        let candidate = FrameSequence::new(frames).unwrap();
        let result = evaluate_tangram_video(
            &candidate,
            &scene,
            &params,
            &ConsistencyReference::Golden(&video),
        )
        .unwrap();
        assert_eq!(result.strict_gc, 0);
        assert!((result.progress_gc - 6.0 / 7.0).abs() < 1e-12);
        let v = &result.verdicts[3];
        assert!(!v.found);
        assert_eq!(v.area_ratio, 0.0);
        assert!(v.failure_tags.contains(&tags::CHROMATIC_DISTORTION.to_string()));
        assert!(result.boundary_iou < 0.99);
    }

    #[test]
    fn alpha_faded_piece_reports_area_ratio_below_window() {
        let (scene, video) = golden(TangramVariant::FadeIn, 10, 81);
        let params = TangramEvalParams::default();
        let mut last = video.frame(video.count() - 1).clone();
        let rec = scene.piece(2);
        let mask = rasterize(&scene.target_poly(rec), scene.canvas_w, scene.canvas_h);
        paint(&mut last, &mask, CANVAS_WHITE.lerp(rec.color, 0.4));
        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        let sil = extract_target_silhouette(video.frame(0), &scene).unwrap();
        let segments = segment_pieces(&last, &props, &params);
        let verdicts = piece_completion(&segments, &props, &sil, &params);
        assert!(verdicts[2].area_ratio < 0.6, "{:?}", verdicts[2]);
        assert_eq!(verdicts[2].u, 0);
    }

    #[test]
    fn displaced_piece_gets_centroid_tag() {
        let (scene, video) = golden(TangramVariant::FadeIn, 11, 81);
        let params = TangramEvalParams::default();
        let mut last = video.frame(video.count() - 1).clone();
        let rec = scene.piece(6);
        let mask = rasterize(&scene.target_poly(rec), scene.canvas_w, scene.canvas_h);
        paint(&mut last, &mask, CANVAS_WHITE);
        // Far enough that the centroid leaves even the dilated silhouette.
        let mut moved = RasterMask::new(scene.canvas_w, scene.canvas_h);
        for (x, y) in mask.iter_set() {
            moved.set(x, y - 145, true);
        }
        paint(&mut last, &moved, rec.color);

        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        let sil = extract_target_silhouette(video.frame(0), &scene).unwrap();
        let segments = segment_pieces(&last, &props, &params);
        let verdicts = piece_completion(&segments, &props, &sil, &params);
        let v = &verdicts[6];
        assert_eq!(v.u, 0);
        assert!(!v.inside_ok);
        assert!(
            v.failure_tags.contains(&tags::CENTROID_DISPLACEMENT.to_string()),
            "{v:?}"
        );
    }

    #[test]
    fn overlap_rule_forces_both_pieces_incorrect() {
        let w = 64;
        let mut a = RasterMask::new(w, w);
        let mut b = RasterMask::new(w, w);
        for y in 0..20 {
            for x in 0..20 {
                a.set(x, y, true);
                b.set(x + 15, y, true);
            }
        }
        let others: Vec<RasterMask> = (0..5)
            .map(|i| {
                let mut m = RasterMask::new(w, w);
                m.set(i, 40, true);
                m
            })
            .collect();
        let mut masks: Vec<&RasterMask> = vec![&a, &b];
        masks.extend(others.iter());
        let mut verdicts: Vec<PieceVerdict> = (0..7)
            .map(|i| PieceVerdict {
                piece_id: i,
                found: true,
                area_ratio: 1.0,
                shape_ok: true,
                inside_ok: true,
                u: 1,
                failure_tags: Vec::new(),
            })
            .collect();
        let (strict, progress) = strict_and_progress(&mut verdicts, &masks);
        assert_eq!(strict, 0);
        assert!((progress - 5.0 / 7.0).abs() < 1e-12);
        assert_eq!(verdicts[0].u, 0);
        assert_eq!(verdicts[1].u, 0);
        assert_eq!(verdicts[2].u, 1);
    }

    #[test]
    fn golden_rotation_flags_stay_above_six_sevenths_at_every_sample() {
        let (scene, video) = golden(TangramVariant::Rotation, 14, 201);
        let params = TangramEvalParams::default();
        let props = extract_palette_props(video.frame(0), &scene, &params).unwrap();
        let at = sample_indexes(video.count(), params.k_samples);
        let flags = integrity_flags(&video, &props, &scene, &params, &at);
        for (row, &t) in flags.iter().zip(&at) {
            let intact = row.iter().filter(|&&f| f).count();
            assert!(intact >= 6, "frame {t}: {row:?}");
        }
        let last = flags.last().unwrap();
        assert!(last.iter().all(|&f| f), "final frame flags: {last:?}");
    }

    #[test]
    fn sample_indexes_cover_endpoints_evenly() {
        assert_eq!(sample_indexes(61, 16).first(), Some(&0));
        assert_eq!(sample_indexes(61, 16).last(), Some(&60));
        assert_eq!(sample_indexes(2, 16), vec![0, 1]);
        assert_eq!(sample_indexes(1, 16), vec![0]);
        let idx = sample_indexes(201, 16);
        assert_eq!(idx.len(), 16);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn consistency_counts_flag_disagreements() {
        let cand = vec![vec![true, false, true], vec![true, true, true]];
        let reference = vec![vec![true, true, true], vec![true, true, false]];
        assert!((flag_agreement(&cand, &reference) - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_recovers_exact_extremes_and_rejects_constants() {
        let aligned: Vec<(f64, u8)> = vec![(0.2, 0), (0.8, 1), (0.3, 0), (0.9, 1)];
        assert!((consistency_success_correlation(&aligned).unwrap() - 1.0).abs() > 0.0);
        let exact: Vec<(f64, u8)> = vec![(0.0, 0), (1.0, 1), (0.0, 0), (1.0, 1)];
        assert!((consistency_success_correlation(&exact).unwrap() - 1.0).abs() < 1e-12);
        let anti: Vec<(f64, u8)> = vec![(1.0, 0), (0.0, 1), (1.0, 0), (0.0, 1)];
        assert!((consistency_success_correlation(&anti).unwrap() + 1.0).abs() < 1e-12);
        let constant: Vec<(f64, u8)> = vec![(0.5, 1), (0.5, 1), (0.5, 1)];
        assert!(matches!(
            consistency_success_correlation(&constant),
            Err(EvalTangramError::CorrelationUndefined(_))
        ));
        assert!(consistency_success_correlation(&aligned[..2]).is_err());
    }

    #[test]
    fn sparse_fade_in_round_trip_also_scores_one() {
        let scene = build_scene(TangramVariant::FadeIn, &sparse_layout(), 31).unwrap();
        let video = synthesize_assembly_video(&scene, 81).unwrap();
        let params = TangramEvalParams::default();
        let result = evaluate_tangram_video(
            &video,
            &scene,
            &params,
            &ConsistencyReference::Golden(&video),
        )
        .unwrap();
        assert_eq!(result.strict_gc, 1, "{:?}", result.verdicts);
        assert_eq!(result.visual_consistency, 1.0);
        for kind in [PieceKind::SmallTri1, PieceKind::Parallelogram] {
            let rec = scene.pieces.iter().find(|r| r.kind == kind).unwrap();
            assert_eq!(result.verdicts[rec.piece_id as usize].shape_ok, true);
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let (scene, video) = golden(TangramVariant::Rotation, 19, 201);
        let params = TangramEvalParams::default();
        let a = evaluate_tangram_video(&video, &scene, &params, &ConsistencyReference::Static)
            .unwrap();
        let b = evaluate_tangram_video(&video, &scene, &params, &ConsistencyReference::Static)
            .unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
