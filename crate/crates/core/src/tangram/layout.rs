//! Layout files place the seven pieces on the 256x256 board square.
//!
//! A layout stores raw vertex rings in board coordinates (y down, plain JSON
//! numbers). Poses are recovered by rigidly aligning each ring against the
//! canonical piece, so a layout cannot smuggle in a stretched, rescaled, or
//! mirrored piece.

use super::{canonical_poly, poly_at, PieceKind, Pose, TangramError, BOARD_SIDE, PIECE_COUNT};
use crate::geom::{Point2, Polygon};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutPiece {
    pub piece_id: u32,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub schema_version: u32,
    pub name: String,
    /// Pixels per dissection unit.
    pub scale: f64,
    pub pieces: Vec<LayoutPiece>,
}

pub fn parse_layout(text: &str) -> Result<LayoutFile, TangramError> {
    let layout: LayoutFile = serde_json::from_str(text)
        .map_err(|e| TangramError::InvalidLayout(format!("layout JSON: {e}")))?;
    if layout.schema_version != 1 {
        return Err(TangramError::InvalidLayout(format!(
            "unsupported layout schema_version {}",
            layout.schema_version
        )));
    }
    Ok(layout)
}

/// Recover each piece's rigid pose. Returns poses indexed by piece id.
pub fn solve_layout(layout: &LayoutFile) -> Result<[Pose; PIECE_COUNT], TangramError> {
    if layout.schema_version != 1 {
        return Err(TangramError::InvalidLayout(format!(
            "unsupported layout schema_version {}",
            layout.schema_version
        )));
    }
    if !(layout.scale > 0.0) || !layout.scale.is_finite() {
        return Err(TangramError::InvalidLayout("scale must be positive".into()));
    }
    if layout.pieces.len() != PIECE_COUNT {
        return Err(TangramError::InvalidLayout(format!(
            "expected {PIECE_COUNT} pieces, got {}",
            layout.pieces.len()
        )));
    }
    let mut poses = [None; PIECE_COUNT];
    for piece in &layout.pieces {
        let kind = PieceKind::from_piece_id(piece.piece_id).ok_or_else(|| {
            TangramError::InvalidLayout(format!("unknown piece_id {}", piece.piece_id))
        })?;
        let slot = &mut poses[piece.piece_id as usize];
        if slot.is_some() {
            return Err(TangramError::InvalidLayout(format!(
                "piece_id {} appears twice",
                piece.piece_id
            )));
        }
        *slot = Some(solve_pose(kind, layout.scale, &piece.vertices)?);
    }
    Ok(poses.map(|p| p.expect("all seven present")))
}

fn solve_pose(kind: PieceKind, scale: f64, verts: &[[f64; 2]]) -> Result<Pose, TangramError> {
    let canon = canonical_poly(kind, scale);
    let n = canon.vertices.len();
    if verts.len() != n {
        return Err(TangramError::InvalidLayout(format!(
            "piece {} needs {n} vertices, got {}",
            kind.name(),
            verts.len()
        )));
    }
    let mut ring = Polygon {
        vertices: verts.iter().map(|&[x, y]| Point2::new(x, y)).collect(),
    };
    let canon_area = canon.signed_area();
    let ring_area = ring.signed_area();
    if (ring_area.abs() - canon_area).abs() > 0.01 * canon_area {
        return Err(TangramError::InvalidLayout(format!(
            "piece {} has area {:.3}, expected {:.3} (wrong scale or distorted)",
            kind.name(),
            ring_area.abs(),
            canon_area
        )));
    }
    // Vertex listing direction is free; geometry is not.
    if ring_area < 0.0 {
        ring = ring.reversed();
    }
    let t = ring.centroid();
    let shifted: Vec<Point2> = ring.vertices.iter().map(|&v| v - t).collect();
    let tol = 0.01 * scale;

    if let Some(theta) = align_rings(&canon.vertices, &shifted, tol) {
        return Ok(Pose::new(theta, t.x, t.y));
    }

    let mirrored = Polygon {
        vertices: canon.vertices.iter().map(|v| Point2::new(-v.x, v.y)).collect(),
    }
    .reversed();
    if align_rings(&mirrored.vertices, &shifted, tol).is_some() {
        return Err(TangramError::InvalidLayout(format!(
            "piece {} is mirrored; pieces may rotate and translate but not flip",
            kind.name()
        )));
    }
    Err(TangramError::InvalidLayout(format!(
        "piece {} does not match its canonical outline",
        kind.name()
    )))
}

/// Rotation (degrees in [0,360)) taking `canon` onto `shifted` under some
/// cyclic relabeling, if one exists. Both rings are centroid-centered and
/// positively oriented.
fn align_rings(canon: &[Point2], shifted: &[Point2], tol: f64) -> Option<f64> {
    let n = canon.len();
    let origin = Point2::new(0.0, 0.0);
    for shift in 0..n {
        let a = canon[0];
        let b = shifted[shift];
        if a.dist(origin) < 1e-9 || b.dist(origin) < 1e-9 {
            continue;
        }
        let theta = b.y.atan2(b.x) - a.y.atan2(a.x);
        let (s, c) = theta.sin_cos();
        let ok = (0..n).all(|i| {
            let p = canon[i];
            let q = Point2::new(p.x * c - p.y * s, p.x * s + p.y * c);
            q.dist(shifted[(shift + i) % n]) <= tol
        });
        if ok {
            return Some(theta.to_degrees().rem_euclid(360.0));
        }
    }
    None
}

fn piece_vertices(kind: PieceKind, scale: f64, pose: Pose) -> Vec<[f64; 2]> {
    poly_at(kind, scale, pose, 1.0)
        .vertices
        .iter()
        .map(|v| [v.x, v.y])
        .collect()
}

/// The assembled 160px square, centered with a 48px margin.
pub fn square_layout() -> LayoutFile {
    let scale = 20.0;
    let off = 48.0;
    let pieces = PieceKind::ALL
        .iter()
        .enumerate()
        .map(|(id, &kind)| LayoutPiece {
            piece_id: id as u32,
            vertices: kind
                .unit_vertices()
                .iter()
                .map(|&(x, y)| [x * scale + off, y * scale + off])
                .collect(),
        })
        .collect();
    LayoutFile {
        schema_version: 1,
        name: "square".into(),
        scale,
        pieces,
    }
}

/// Pieces strewn across the board: random multiples of 15 degrees, shelf
/// packed by bounding box so rasters stay disjoint. Falls back to unrotated
/// pieces in id order, which always fits.
pub fn scatter_layout(seed: u64) -> LayoutFile {
    let scale = 16.0;
    let mut rng = crate::rng::rng_for(seed, "layout.scatter");
    for _ in 0..50 {
        let rots: Vec<f64> = (0..PIECE_COUNT)
            .map(|_| 15.0 * rng.gen_range(0..24) as f64)
            .collect();
        let mut order: Vec<usize> = (0..PIECE_COUNT).collect();
        order.shuffle(&mut rng);
        if let Some(pieces) = shelf_pack(&rots, &order, scale) {
            return LayoutFile {
                schema_version: 1,
                name: "scatter".into(),
                scale,
                pieces,
            };
        }
    }
    let pieces = shelf_pack(&[0.0; PIECE_COUNT], &(0..PIECE_COUNT).collect::<Vec<_>>(), scale)
        .expect("unrotated pieces fit the board");
    LayoutFile {
        schema_version: 1,
        name: "scatter".into(),
        scale,
        pieces,
    }
}

fn shelf_pack(rots: &[f64], order: &[usize], scale: f64) -> Option<Vec<LayoutPiece>> {
    let margin = 2.0;
    let gap = 2.0;
    let limit = BOARD_SIDE as f64 - margin;
    let mut x = margin;
    let mut y = margin;
    let mut shelf_h = 0.0f64;
    let mut placed: Vec<(usize, Pose)> = Vec::with_capacity(order.len());
    for &pid in order {
        let kind = PieceKind::from_piece_id(pid as u32).expect("valid id");
        let spun = poly_at(kind, scale, Pose::new(rots[pid], 0.0, 0.0), 1.0);
        let (lo, hi) = spun.bounds();
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        if x + w > limit {
            x = margin;
            y += shelf_h + gap;
            shelf_h = 0.0;
        }
        if y + h > limit || x + w > limit {
            return None;
        }
        placed.push((pid, Pose::new(rots[pid], x - lo.x, y - lo.y)));
        x += w + gap;
        shelf_h = shelf_h.max(h);
    }
    placed.sort_by_key(|&(pid, _)| pid);
    Some(
        placed
            .into_iter()
            .map(|(pid, pose)| LayoutPiece {
                piece_id: pid as u32,
                vertices: piece_vertices(PieceKind::from_piece_id(pid as u32).unwrap(), scale, pose),
            })
            .collect(),
    )
}

/// Small unrotated pieces with wide clearances, used where a piece must be
/// free to grow without touching a neighbor or the board edge.
pub fn sparse_layout() -> LayoutFile {
    let scale = 8.0;
    let centers = [
        (64.0, 64.0),
        (192.0, 192.0),
        (192.0, 64.0),
        (128.0, 28.0),
        (128.0, 228.0),
        (128.0, 128.0),
        (64.0, 192.0),
    ];
    let pieces = PieceKind::ALL
        .iter()
        .enumerate()
        .map(|(id, &kind)| LayoutPiece {
            piece_id: id as u32,
            vertices: piece_vertices(kind, scale, Pose::new(0.0, centers[id].0, centers[id].1)),
        })
        .collect();
    LayoutFile {
        schema_version: 1,
        name: "sparse".into(),
        scale,
        pieces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_layout_solves_to_zero_rotations_at_unit_centroids() {
        let layout = square_layout();
        let poses = solve_layout(&layout).unwrap();
        for (id, pose) in poses.iter().enumerate() {
            let rot = pose.rot_deg.rem_euclid(360.0);
            assert!(rot < 1e-6 || rot > 360.0 - 1e-6, "piece {id}: {rot}");
        }
        let big1 = Polygon::from_xy(&[(48.0, 48.0), (208.0, 48.0), (128.0, 128.0)]).centroid();
        assert!((poses[0].x - big1.x).abs() < 1e-9);
        assert!((poses[0].y - big1.y).abs() < 1e-9);
    }

    #[test]
    fn scatter_layouts_solve_for_many_seeds() {
        for seed in 0..12u64 {
            let layout = scatter_layout(seed);
            let poses = solve_layout(&layout).unwrap();
            // Vertex snapping perturbs recovered angles by a few millidegrees.
            for pose in &poses {
                let k = pose.rot_deg / 15.0;
                assert!((k - k.round()).abs() < 0.01, "seed {seed}: rot {}", pose.rot_deg);
            }
        }
    }

    #[test]
    fn sparse_layout_solves_with_fixed_centers() {
        let poses = solve_layout(&sparse_layout()).unwrap();
        assert!((poses[5].x - 128.0).abs() < 1e-9);
        assert!((poses[5].y - 128.0).abs() < 1e-9);
    }

    #[test]
    fn layout_json_round_trips() {
        let layout = scatter_layout(4);
        let text = serde_json::to_string_pretty(&layout).unwrap();
        let back = parse_layout(&text).unwrap();
        assert_eq!(layout, back);
        assert_eq!(solve_layout(&layout).unwrap(), solve_layout(&back).unwrap());
    }

    #[test]
    fn mirrored_parallelogram_is_rejected_with_a_flip_error() {
        let mut layout = square_layout();
        let para = layout
            .pieces
            .iter_mut()
            .find(|p| p.piece_id == 6)
            .unwrap();
        for v in &mut para.vertices {
            v[0] = 256.0 - v[0];
        }
        let err = solve_layout(&layout).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mirrored"), "{msg}");
    }

    #[test]
    fn mirrored_triangle_still_solves_because_it_is_symmetric() {
        let mut layout = square_layout();
        let tri = layout
            .pieces
            .iter_mut()
            .find(|p| p.piece_id == 0)
            .unwrap();
        for v in &mut tri.vertices {
            v[0] = 256.0 - v[0];
        }
        solve_layout(&layout).unwrap();
    }

    #[test]
    fn scaled_piece_is_rejected_as_area_mismatch() {
        let mut layout = square_layout();
        let c = [128.0, 75.0];
        for v in &mut layout.pieces[0].vertices {
            v[0] = c[0] + (v[0] - c[0]) * 1.2;
            v[1] = c[1] + (v[1] - c[1]) * 1.2;
        }
        let msg = solve_layout(&layout).unwrap_err().to_string();
        assert!(msg.contains("area"), "{msg}");
    }

    #[test]
    fn sheared_piece_is_rejected_even_with_matching_area() {
        let mut layout = square_layout();
        // Area-preserving shear along x.
        let c = Polygon {
            vertices: layout.pieces[5]
                .vertices
                .iter()
                .map(|&[x, y]| Point2::new(x, y))
                .collect(),
        }
        .centroid();
        for v in &mut layout.pieces[5].vertices {
            v[0] += 0.4 * (v[1] - c.y);
        }
        let msg = solve_layout(&layout).unwrap_err().to_string();
        assert!(msg.contains("does not match"), "{msg}");
    }

    #[test]
    fn duplicate_and_missing_ids_are_rejected() {
        let mut layout = square_layout();
        layout.pieces[1].piece_id = 0;
        let msg = solve_layout(&layout).unwrap_err().to_string();
        assert!(msg.contains("twice"), "{msg}");

        let mut layout = square_layout();
        layout.pieces.pop();
        assert!(solve_layout(&layout).is_err());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let mut layout = square_layout();
        layout.schema_version = 2;
        let text = serde_json::to_string(&layout).unwrap();
        assert!(parse_layout(&text).is_err());
    }
}
