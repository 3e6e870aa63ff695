//! Tangram scenes: the seven-piece dissection of a square, posed into a
//! target silhouette and animated piece by piece.

pub mod layout;
pub mod synth;

pub use layout::{
    parse_layout, scatter_layout, solve_layout, sparse_layout, square_layout, LayoutFile,
    LayoutPiece,
};
pub use synth::{
    piece_windows, synthesize_assembly_video, AssemblyRenderer, PieceState,
    DEFAULT_FADE_IN_FRAMES, DEFAULT_ROTATION_FRAMES, MIN_ASSEMBLY_FRAMES,
    TRANSLATION_FRAME_CHOICES,
};

use crate::geom::{
    classify_shape, connected_components, extract_contour, rasterize, scale_polygon,
    simplify_polygon, transform_polygon, ColorRgb, GeomError, Point2, Polygon, RasterMask,
    ShapeClass,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PIECE_COUNT: usize = 7;

/// Big triangles first, then medium, then the quadrilaterals, smalls last.
pub const PLACEMENT_ORDER: [u32; 7] = [0, 1, 2, 5, 6, 3, 4];

/// Board square side in pixels; FadeIn canvases are exactly this square,
/// sidebar variants prepend another square of the same size on the left.
pub const BOARD_SIDE: u32 = 256;
pub const SIDEBAR_SCALE: f64 = 0.45;

pub const CANVAS_WHITE: ColorRgb = ColorRgb::new(255, 255, 255);
pub const SILHOUETTE_BLACK: ColorRgb = ColorRgb::new(0, 0, 0);

#[derive(Debug, Error)]
pub enum TangramError {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("geometry error: {0}")]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangramVariant {
    FadeIn,
    Rotation,
    Translation,
}

impl TangramVariant {
    pub const ALL: [TangramVariant; 3] = [
        TangramVariant::FadeIn,
        TangramVariant::Rotation,
        TangramVariant::Translation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TangramVariant::FadeIn => "fade_in",
            TangramVariant::Rotation => "rotation",
            TangramVariant::Translation => "translation",
        }
    }

    pub fn has_sidebar(self) -> bool {
        !matches!(self, TangramVariant::FadeIn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    BigTri1,
    BigTri2,
    MediumTri,
    SmallTri1,
    SmallTri2,
    Square,
    Parallelogram,
}

impl PieceKind {
    pub const ALL: [PieceKind; 7] = [
        PieceKind::BigTri1,
        PieceKind::BigTri2,
        PieceKind::MediumTri,
        PieceKind::SmallTri1,
        PieceKind::SmallTri2,
        PieceKind::Square,
        PieceKind::Parallelogram,
    ];

    pub fn from_piece_id(id: u32) -> Option<PieceKind> {
        PieceKind::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PieceKind::BigTri1 => "big_tri_1",
            PieceKind::BigTri2 => "big_tri_2",
            PieceKind::MediumTri => "medium_tri",
            PieceKind::SmallTri1 => "small_tri_1",
            PieceKind::SmallTri2 => "small_tri_2",
            PieceKind::Square => "square",
            PieceKind::Parallelogram => "parallelogram",
        }
    }

    /// Vertices in the 8x8 dissection frame (y down). The seven pieces tile
    /// the square [0,8]^2 exactly.
    pub fn unit_vertices(self) -> &'static [(f64, f64)] {
        match self {
            PieceKind::BigTri1 => &[(0.0, 0.0), (8.0, 0.0), (4.0, 4.0)],
            PieceKind::BigTri2 => &[(0.0, 0.0), (4.0, 4.0), (0.0, 8.0)],
            PieceKind::MediumTri => &[(8.0, 8.0), (8.0, 4.0), (4.0, 8.0)],
            PieceKind::SmallTri1 => &[(8.0, 0.0), (8.0, 4.0), (6.0, 2.0)],
            PieceKind::SmallTri2 => &[(4.0, 4.0), (6.0, 6.0), (2.0, 6.0)],
            PieceKind::Square => &[(6.0, 2.0), (8.0, 4.0), (6.0, 6.0), (4.0, 4.0)],
            PieceKind::Parallelogram => &[(0.0, 8.0), (2.0, 6.0), (6.0, 6.0), (4.0, 8.0)],
        }
    }

    pub fn shape_class(self) -> ShapeClass {
        match self {
            PieceKind::Square => ShapeClass::Square,
            PieceKind::Parallelogram => ShapeClass::Parallelogram,
            _ => ShapeClass::Triangle,
        }
    }

    /// Farthest vertex distance from the centroid, in dissection units.
    /// Multiply by the scene scale for the pixel circumradius.
    pub fn circumradius_units(self) -> f64 {
        let poly = canonical_poly(self, 1.0);
        poly.vertices
            .iter()
            .map(|v| v.dist(Point2::new(0.0, 0.0)))
            .fold(0.0, f64::max)
    }
}

/// Canonical piece outline at `scale` pixels per dissection unit, centroid at
/// the origin, vertices ordered with positive signed area.
pub fn canonical_poly(kind: PieceKind, scale: f64) -> Polygon {
    let mut poly = Polygon::from_xy(kind.unit_vertices());
    if poly.signed_area() < 0.0 {
        poly = poly.reversed();
    }
    let c = poly.centroid();
    let vertices = poly
        .vertices
        .iter()
        .map(|&v| Point2::new((v.x - c.x) * scale, (v.y - c.y) * scale))
        .collect();
    Polygon { vertices }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    #[serde(with = "crate::video_io::real_f64")]
    pub rot_deg: f64,
    #[serde(with = "crate::video_io::real_f64")]
    pub x: f64,
    #[serde(with = "crate::video_io::real_f64")]
    pub y: f64,
}

impl Pose {
    pub fn new(rot_deg: f64, x: f64, y: f64) -> Pose {
        Pose { rot_deg, x, y }
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Piece outline at a pose, optionally shrunk about its centroid (sidebar
/// pieces rest at `SIDEBAR_SCALE`). Vertices are snapped to a 1/64 pixel
/// grid: poses recovered from layouts carry per-piece rounding noise, and
/// snapping makes shared seam edges bitwise identical again so touching
/// pieces rasterize without cracks or double fills.
pub fn poly_at(kind: PieceKind, scale: f64, pose: Pose, size_factor: f64) -> Polygon {
    let mut poly = canonical_poly(kind, scale);
    if size_factor != 1.0 {
        poly = scale_polygon(&poly, Point2::new(0.0, 0.0), size_factor);
    }
    let moved = transform_polygon(&poly, pose.rot_deg, Point2::new(0.0, 0.0), pose.translation());
    let snap = |v: f64| (v * 64.0).round() / 64.0;
    Polygon {
        vertices: moved.vertices.iter().map(|p| Point2::new(snap(p.x), snap(p.y))).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub piece_id: u32,
    pub kind: PieceKind,
    pub color: ColorRgb,
    pub target_pose: Pose,
    pub initial_pose: Pose,
    /// Rasterized pixel area at the initial pose (sidebar scale when resting
    /// in the sidebar, full scale for FadeIn).
    #[serde(with = "crate::video_io::real_f64")]
    pub ref_area: f64,
    pub ref_shape: ShapeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangramScene {
    pub variant: TangramVariant,
    pub canvas_w: u32,
    pub canvas_h: u32,
    /// Left edge of the board square; 0 for FadeIn, sidebar width otherwise.
    pub board_x: u32,
    /// Pixels per dissection unit; the assembled square is 8x this.
    #[serde(with = "crate::video_io::real_f64")]
    pub scale: f64,
    pub layout_name: String,
    pub pieces: Vec<PieceRecord>,
    pub placement_order: Vec<u32>,
}

impl TangramScene {
    pub fn piece(&self, piece_id: u32) -> &PieceRecord {
        &self.pieces[piece_id as usize]
    }

    pub fn target_poly(&self, rec: &PieceRecord) -> Polygon {
        poly_at(rec.kind, self.scale, rec.target_pose, 1.0)
    }

    pub fn initial_poly(&self, rec: &PieceRecord) -> Polygon {
        poly_at(rec.kind, self.scale, rec.initial_pose, self.initial_size_factor())
    }

    pub fn initial_size_factor(&self) -> f64 {
        if self.variant.has_sidebar() {
            SIDEBAR_SCALE
        } else {
            1.0
        }
    }

    /// Union of all target-pose rasters; black in frame zero.
    pub fn silhouette_mask(&self) -> RasterMask {
        let mut mask = RasterMask::new(self.canvas_w, self.canvas_h);
        for rec in &self.pieces {
            let piece = rasterize(&self.target_poly(rec), self.canvas_w, self.canvas_h);
            mask.union_with(&piece).expect("same canvas");
        }
        mask
    }

    pub fn validate(&self) -> Result<(), TangramError> {
        if self.pieces.len() != PIECE_COUNT {
            return Err(TangramError::InvalidLayout(format!(
                "expected {} pieces, got {}",
                PIECE_COUNT,
                self.pieces.len()
            )));
        }
        for (i, rec) in self.pieces.iter().enumerate() {
            if rec.piece_id != i as u32 {
                return Err(TangramError::InvalidLayout(format!(
                    "piece at index {i} has id {}",
                    rec.piece_id
                )));
            }
            if PieceKind::from_piece_id(rec.piece_id) != Some(rec.kind) {
                return Err(TangramError::InvalidLayout(format!(
                    "piece {} has kind {}",
                    rec.piece_id,
                    rec.kind.name()
                )));
            }
        }
        let mut order = self.placement_order.clone();
        order.sort_unstable();
        if order != (0..PIECE_COUNT as u32).collect::<Vec<_>>() {
            return Err(TangramError::InvalidLayout(
                "placement order is not a permutation of the piece ids".into(),
            ));
        }
        if !(self.scale > 0.0) {
            return Err(TangramError::InvalidLayout("scale must be positive".into()));
        }
        let want_w = if self.variant.has_sidebar() {
            2 * BOARD_SIDE
        } else {
            BOARD_SIDE
        };
        let want_x = want_w - BOARD_SIDE;
        if self.canvas_w != want_w || self.canvas_h != BOARD_SIDE || self.board_x != want_x {
            return Err(TangramError::InvalidLayout(format!(
                "canvas {}x{} board_x {} does not fit variant {}",
                self.canvas_w,
                self.canvas_h,
                self.board_x,
                self.variant.name()
            )));
        }

        let board_min = self.board_x as f64;
        let board_max = (self.board_x + BOARD_SIDE) as f64;
        let mut targets: Vec<RasterMask> = Vec::with_capacity(PIECE_COUNT);
        for rec in &self.pieces {
            let poly = self.target_poly(rec);
            let (lo, hi) = poly.bounds();
            if lo.x < board_min - 1e-6
                || lo.y < -1e-6
                || hi.x > board_max + 1e-6
                || hi.y > BOARD_SIDE as f64 + 1e-6
            {
                return Err(TangramError::InvalidLayout(format!(
                    "piece {} leaves the board",
                    rec.piece_id
                )));
            }
            targets.push(rasterize(&poly, self.canvas_w, self.canvas_h));
        }
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                let overlap = targets[i].intersection_area(&targets[j]).expect("same canvas");
                if overlap > 0 {
                    return Err(TangramError::InvalidLayout(format!(
                        "pieces {i} and {j} overlap on {overlap} pixels"
                    )));
                }
            }
        }
        if self.variant.has_sidebar() {
            let rests: Vec<RasterMask> = self
                .pieces
                .iter()
                .map(|rec| rasterize(&self.initial_poly(rec), self.canvas_w, self.canvas_h))
                .collect();
            for (i, rest) in rests.iter().enumerate() {
                let (lo, hi) = self.initial_poly(&self.pieces[i]).bounds();
                if lo.x < 0.0 || lo.y < 0.0 || hi.x > self.board_x as f64 || hi.y > BOARD_SIDE as f64 {
                    return Err(TangramError::InvalidLayout(format!(
                        "resting piece {i} leaves the sidebar"
                    )));
                }
                for (j, other) in rests.iter().enumerate().skip(i + 1) {
                    let overlap = rest.intersection_area(other).expect("same canvas");
                    if overlap > 0 {
                        return Err(TangramError::InvalidLayout(format!(
                            "resting pieces {i} and {j} overlap"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// FadeIn keeps one fixed palette so manifests alone describe every color.
/// Indexed by piece id.
pub const FADE_IN_PALETTE: [ColorRgb; 7] = [
    ColorRgb::new(30, 80, 220),
    ColorRgb::new(240, 150, 30),
    ColorRgb::new(40, 180, 70),
    ColorRgb::new(150, 60, 200),
    ColorRgb::new(240, 220, 40),
    ColorRgb::new(128, 128, 128),
    ColorRgb::new(220, 40, 40),
];

/// Seven colors with pairwise max-channel distance over 60 and strong
/// contrast against the white canvas and black silhouette. Six occupy
/// opposite channel bands (guaranteeing wide separation), one sits mid-gray.
pub fn random_palette(rng: &mut ChaCha8Rng) -> [ColorRgb; 7] {
    let mut patterns: Vec<[bool; 3]> = (1u8..7)
        .map(|m| [m & 1 != 0, m & 2 != 0, m & 4 != 0])
        .collect();
    patterns.shuffle(rng);
    let mut colors: Vec<ColorRgb> = Vec::with_capacity(PIECE_COUNT);
    for pattern in &patterns[..6] {
        let mut ch = [0u8; 3];
        for (c, &high) in ch.iter_mut().zip(pattern.iter()) {
            *c = if high {
                rng.gen_range(198..=237)
            } else {
                rng.gen_range(18..=57)
            };
        }
        colors.push(ColorRgb::new(ch[0], ch[1], ch[2]));
    }
    colors.push(ColorRgb::new(
        rng.gen_range(119..=137),
        rng.gen_range(119..=137),
        rng.gen_range(119..=137),
    ));
    colors.shuffle(rng);
    colors.try_into().expect("seven colors")
}

/// Two-column first-fit of the pieces' sidebar circumdisks, visited in
/// placement order. Disks never touch, so resting pieces stay disjoint and a
/// piece can spin in its slot without clipping a neighbor.
fn pack_sidebar(scale: f64) -> Result<[Point2; PIECE_COUNT], TangramError> {
    let col_x = [64.0, 192.0];
    let gap = 4.0;
    let mut cursor = [6.0f64; 2];
    let mut slots = [Point2::new(0.0, 0.0); PIECE_COUNT];
    for &pid in &PLACEMENT_ORDER {
        let kind = PieceKind::from_piece_id(pid).expect("valid id");
        let radius = kind.circumradius_units() * scale * SIDEBAR_SCALE + 1.0;
        let diam = 2.0 * radius;
        let col = (0..2)
            .find(|&c| cursor[c] + diam <= BOARD_SIDE as f64 - 6.0)
            .ok_or_else(|| {
                TangramError::InvalidLayout(format!(
                    "sidebar cannot hold pieces at scale {scale}"
                ))
            })?;
        slots[pid as usize] = Point2::new(col_x[col], cursor[col] + radius);
        cursor[col] += diam + gap;
    }
    Ok(slots)
}

fn classify_initial_raster(poly: &Polygon, w: u32, h: u32) -> (f64, ShapeClass) {
    let mask = rasterize(poly, w, h);
    let comps = connected_components(&mask);
    let Some(biggest) = comps.first() else {
        return (0.0, ShapeClass::Unknown);
    };
    let class = extract_contour(&biggest.to_mask(w, h))
        .ok()
        .and_then(|contour| simplify_polygon(&contour, 0.01).ok())
        .map(|simple| classify_shape(&simple))
        .unwrap_or(ShapeClass::Unknown);
    (mask.area() as f64, class)
}

/// Pose a scene from a solved layout. Target poses come from the layout,
/// initial poses from the variant: FadeIn pieces materialize in place,
/// sidebar variants rest the pieces left of the board.
pub fn build_scene(
    variant: TangramVariant,
    layout: &LayoutFile,
    seed: u64,
) -> Result<TangramScene, TangramError> {
    let poses = solve_layout(layout)?;
    let scale = layout.scale;
    let (canvas_w, board_x) = if variant.has_sidebar() {
        (2 * BOARD_SIDE, BOARD_SIDE)
    } else {
        (BOARD_SIDE, 0)
    };
    let canvas_h = BOARD_SIDE;

    let colors: [ColorRgb; 7] = match variant {
        TangramVariant::FadeIn => FADE_IN_PALETTE,
        _ => random_palette(&mut crate::rng::rng_for(seed, "tangram.palette")),
    };

    let slots = if variant.has_sidebar() {
        Some(pack_sidebar(scale)?)
    } else {
        None
    };
    let mut spin_rng = crate::rng::rng_for(seed, "tangram.spin");

    let mut pieces = Vec::with_capacity(PIECE_COUNT);
    for pid in 0..PIECE_COUNT as u32 {
        let kind = PieceKind::from_piece_id(pid).expect("valid id");
        let mut target = poses[pid as usize];
        target.x += board_x as f64;

        let initial = match (variant, &slots) {
            (TangramVariant::FadeIn, _) => target,
            (TangramVariant::Translation, Some(slots)) => {
                let s = slots[pid as usize];
                Pose::new(target.rot_deg, s.x, s.y)
            }
            (TangramVariant::Rotation, Some(slots)) => {
                let s = slots[pid as usize];
                let k = spin_rng.gen_range(1..24);
                let rot = (target.rot_deg + 15.0 * k as f64).rem_euclid(360.0);
                Pose::new(rot, s.x, s.y)
            }
            _ => unreachable!("sidebar variants always pack slots"),
        };

        let size_factor = if variant.has_sidebar() { SIDEBAR_SCALE } else { 1.0 };
        let init_poly = poly_at(kind, scale, initial, size_factor);
        let (ref_area, _) = classify_initial_raster(&init_poly, canvas_w, canvas_h);

        pieces.push(PieceRecord {
            piece_id: pid,
            kind,
            color: colors[pid as usize],
            target_pose: target,
            initial_pose: initial,
            ref_area,
            ref_shape: kind.shape_class(),
        });
    }

    let scene = TangramScene {
        variant,
        canvas_w,
        canvas_h,
        board_x,
        scale,
        layout_name: layout.name.clone(),
        pieces,
        placement_order: PLACEMENT_ORDER.to_vec(),
    };
    scene.validate()?;
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::mask_iou;

    #[test]
    fn seven_pieces_tile_the_dissection_square_exactly() {
        let scale = 20.0;
        let offset = Point2::new(48.0, 48.0);
        let mut union = RasterMask::new(BOARD_SIDE, BOARD_SIDE);
        let mut total = 0usize;
        let mut masks = Vec::new();
        for kind in PieceKind::ALL {
            let poly = Polygon {
                vertices: kind
                    .unit_vertices()
                    .iter()
                    .map(|&(x, y)| Point2::new(x * scale + offset.x, y * scale + offset.y))
                    .collect(),
            };
            let mask = rasterize(&poly, BOARD_SIDE, BOARD_SIDE);
            total += mask.area();
            union.union_with(&mask).unwrap();
            masks.push(mask);
        }
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                assert_eq!(masks[i].intersection_area(&masks[j]).unwrap(), 0, "{i} vs {j}");
            }
        }
        let square = Polygon::from_xy(&[
            (48.0, 48.0),
            (208.0, 48.0),
            (208.0, 208.0),
            (48.0, 208.0),
        ]);
        let square_mask = rasterize(&square, BOARD_SIDE, BOARD_SIDE);
        assert_eq!(total, square_mask.area());
        assert_eq!(total, 160 * 160);
        assert!((mask_iou(&union, &square_mask).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_areas_sum_to_sixty_four_units() {
        let areas: Vec<f64> = PieceKind::ALL
            .iter()
            .map(|&k| canonical_poly(k, 1.0).area().unwrap())
            .collect();
        let expect = [16.0, 16.0, 8.0, 4.0, 4.0, 8.0, 8.0];
        for (got, want) in areas.iter().zip(expect) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!((areas.iter().sum::<f64>() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn circumradii_match_hand_computed_values() {
        let cases = [
            (PieceKind::BigTri1, 4.216),
            (PieceKind::MediumTri, 2.981),
            (PieceKind::SmallTri1, 2.108),
            (PieceKind::Square, 2.0),
            (PieceKind::Parallelogram, 3.162),
        ];
        for (kind, want) in cases {
            assert!(
                (kind.circumradius_units() - want).abs() < 1e-3,
                "{}: {}",
                kind.name(),
                kind.circumradius_units()
            );
        }
    }

    #[test]
    fn fade_in_palette_keeps_colors_apart() {
        for i in 0..FADE_IN_PALETTE.len() {
            for j in i + 1..FADE_IN_PALETTE.len() {
                assert!(FADE_IN_PALETTE[i].dist(FADE_IN_PALETTE[j]) >= 60, "{i} vs {j}");
            }
            assert!(FADE_IN_PALETTE[i].dist(CANVAS_WHITE) >= 60);
            assert!(FADE_IN_PALETTE[i].dist(SILHOUETTE_BLACK) >= 60);
        }
    }

    #[test]
    fn random_palettes_keep_colors_apart() {
        for seed in 0..20u64 {
            let palette = random_palette(&mut crate::rng::rng_for(seed, "palette.test"));
            for i in 0..palette.len() {
                for j in i + 1..palette.len() {
                    assert!(palette[i].dist(palette[j]) > 60, "seed {seed}: {i} vs {j}");
                }
                assert!(palette[i].dist(CANVAS_WHITE) > 60);
                assert!(palette[i].dist(SILHOUETTE_BLACK) > 60);
            }
            let extremes = palette
                .iter()
                .filter(|c| [c.r, c.g, c.b].iter().any(|&ch| ch <= 62 || ch >= 193))
                .count();
            assert!(extremes >= 6, "seed {seed}");
        }
    }

    #[test]
    fn build_scene_is_deterministic() {
        let layout = square_layout();
        let a = build_scene(TangramVariant::Rotation, &layout, 99).unwrap();
        let b = build_scene(TangramVariant::Rotation, &layout, 99).unwrap();
        assert_eq!(a, b);
        let c = build_scene(TangramVariant::Rotation, &layout, 100).unwrap();
        assert_ne!(a.pieces[0].color, c.pieces[0].color);
    }

    #[test]
    fn fade_in_initial_pose_equals_target() {
        let scene = build_scene(TangramVariant::FadeIn, &square_layout(), 7).unwrap();
        assert_eq!(scene.canvas_w, BOARD_SIDE);
        assert_eq!(scene.board_x, 0);
        for rec in &scene.pieces {
            assert_eq!(rec.initial_pose, rec.target_pose);
            assert_eq!(rec.color, FADE_IN_PALETTE[rec.piece_id as usize]);
        }
    }

    #[test]
    fn rotation_offsets_are_nonzero_multiples_of_fifteen() {
        for seed in 0..10u64 {
            let scene = build_scene(TangramVariant::Rotation, &square_layout(), seed).unwrap();
            for rec in &scene.pieces {
                let diff = (rec.initial_pose.rot_deg - rec.target_pose.rot_deg).rem_euclid(360.0);
                let k = diff / 15.0;
                assert!((k - k.round()).abs() < 1e-9, "offset {diff}");
                assert!(k.round() as i64 % 24 != 0, "offset must not vanish");
            }
        }
    }

    #[test]
    fn translation_keeps_target_rotation_in_sidebar() {
        let scene = build_scene(TangramVariant::Translation, &scatter_layout(3), 3).unwrap();
        for rec in &scene.pieces {
            assert_eq!(rec.initial_pose.rot_deg, rec.target_pose.rot_deg);
            assert!(rec.initial_pose.x < scene.board_x as f64);
        }
    }

    #[test]
    fn sidebar_rest_rasters_are_disjoint_and_left_of_board() {
        let scene = build_scene(TangramVariant::Rotation, &scatter_layout(11), 11).unwrap();
        let masks: Vec<RasterMask> = scene
            .pieces
            .iter()
            .map(|r| rasterize(&scene.initial_poly(r), scene.canvas_w, scene.canvas_h))
            .collect();
        for (i, m) in masks.iter().enumerate() {
            assert!(m.area() > 0);
            for (x, _) in m.iter_set() {
                assert!(x < scene.board_x, "piece {i} at x={x}");
            }
            for (j, other) in masks.iter().enumerate().skip(i + 1) {
                assert_eq!(m.intersection_area(other).unwrap(), 0, "{i} vs {j}");
            }
        }
    }

    #[test]
    fn ref_area_matches_initial_raster_and_silhouette_sums_targets() {
        let scene = build_scene(TangramVariant::Translation, &square_layout(), 5).unwrap();
        for rec in &scene.pieces {
            let mask = rasterize(&scene.initial_poly(rec), scene.canvas_w, scene.canvas_h);
            assert_eq!(rec.ref_area, mask.area() as f64);
        }
        let sil = scene.silhouette_mask();
        let target_total: usize = scene
            .pieces
            .iter()
            .map(|r| rasterize(&scene.target_poly(r), scene.canvas_w, scene.canvas_h).area())
            .sum();
        assert_eq!(sil.area(), target_total);
        assert_eq!(sil.area(), 160 * 160);
    }

    #[test]
    fn overlapping_layout_is_rejected() {
        let mut layout = square_layout();
        let dup = layout.pieces[0].vertices.clone();
        layout.pieces[1].vertices = dup;
        let err = build_scene(TangramVariant::FadeIn, &layout, 1).unwrap_err();
        assert!(matches!(err, TangramError::InvalidLayout(_)));
    }

    #[test]
    fn scene_round_trips_through_json() {
        let scene = build_scene(TangramVariant::Rotation, &scatter_layout(21), 21).unwrap();
        let text = serde_json::to_string(&scene).unwrap();
        let back: TangramScene = serde_json::from_str(&text).unwrap();
        assert_eq!(scene, back);
    }
}
