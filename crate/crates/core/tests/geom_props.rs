//! Property tests for the geometry layer, checked against independently
//! written oracles: a per-pixel point-in-polygon rasterization oracle and a
//! BFS flood-fill component oracle.

use fpb_core::geom::{
    classify_shape, connected_components, extract_contour, mask_iou, rasterize, simplify_polygon,
    transform_polygon, Point2, Polygon, RasterMask, ShapeClass,
};
use proptest::prelude::*;

/// Crossing-number oracle, written separately from the scanline fill. Uses
/// the same half-open edge convention (a.y <= y < b.y counts) so interior
/// pixels agree exactly; random real vertices keep centers off edges.
fn oracle_contains(poly: &[(f64, f64)], px: f64, py: f64) -> bool {
    let n = poly.len();
    let mut crossings = 0;
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        let spans = if y1 <= y2 {
            y1 <= py && py < y2
        } else {
            y2 <= py && py < y1
        };
        if spans {
            let x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1);
            if x_at > px {
                crossings += 1;
            }
        }
    }
    crossings % 2 == 1
}

fn oracle_rasterize(poly: &[(f64, f64)], w: u32, h: u32) -> RasterMask {
    let mut m = RasterMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if oracle_contains(poly, x as f64 + 0.5, y as f64 + 0.5) {
                m.set(x, y, true);
            }
        }
    }
    m
}

/// BFS flood fill, independent of the library's stack-based labeling.
fn oracle_components(mask: &RasterMask) -> Vec<Vec<(u32, u32)>> {
    let mut seen = vec![false; (mask.width * mask.height) as usize];
    let mut out = Vec::new();
    for sy in 0..mask.height {
        for sx in 0..mask.width {
            if !mask.get(sx, sy) || seen[(sy * mask.width + sx) as usize] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = std::collections::VecDeque::new();
            queue.push_back((sx, sy));
            seen[(sy * mask.width + sx) as usize] = true;
            while let Some((x, y)) = queue.pop_front() {
                comp.push((x, y));
                let neighbors = [
                    (x.wrapping_sub(1), y),
                    (x + 1, y),
                    (x, y.wrapping_sub(1)),
                    (x, y + 1),
                ];
                for (nx, ny) in neighbors {
                    if nx < mask.width
                        && ny < mask.height
                        && mask.get(nx, ny)
                        && !seen[(ny * mask.width + nx) as usize]
                    {
                        seen[(ny * mask.width + nx) as usize] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
            comp.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
            out.push(comp);
        }
    }
    out
}

/// Convex polygon from sorted angles on a jittered ellipse, everything in
/// general position (no axis-aligned edges).
fn convex_poly_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    (3usize..=7, 0.0..std::f64::consts::TAU, 60.0..90.0f64, 60.0..90.0f64).prop_map(
        |(k, phase, a, b)| {
            let cx = 100.0;
            let cy = 100.0;
            (0..k)
                .map(|i| {
                    let t = phase + std::f64::consts::TAU * i as f64 / k as f64;
                    (cx + a * t.cos(), cy + b * t.sin())
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rasterize_matches_point_in_polygon_oracle(verts in convex_poly_strategy()) {
        let poly = Polygon::from_xy(&verts);
        let got = rasterize(&poly, 200, 200);
        let want = oracle_rasterize(&verts, 200, 200);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn raster_area_tracks_polygon_area(verts in convex_poly_strategy()) {
        let poly = Polygon::from_xy(&verts);
        let mask = rasterize(&poly, 200, 200);
        let analytic = poly.area().unwrap();
        let raster = mask.area() as f64;
        // Ellipse radii >= 60 keep every caliper width >= 40 px.
        prop_assert!((raster - analytic).abs() <= 0.02 * analytic,
            "raster {} vs analytic {}", raster, analytic);
    }

    #[test]
    fn components_match_flood_fill_oracle(seeds in proptest::collection::vec((0u32..40, 0u32..40, 1u32..6), 1..8)) {
        let mut mask = RasterMask::new(48, 48);
        for (cx, cy, r) in seeds {
            for y in cy.saturating_sub(r)..(cy + r).min(47) {
                for x in cx.saturating_sub(r)..(cx + r).min(47) {
                    mask.set(x, y, true);
                }
            }
        }
        let got = connected_components(&mask);
        let want = oracle_components(&mask);
        prop_assert_eq!(got.len(), want.len());
        let mut got_sets: Vec<Vec<(u32, u32)>> = got.iter().map(|c| c.pixels.clone()).collect();
        got_sets.sort();
        let mut want_sets = want;
        want_sets.sort();
        prop_assert_eq!(got_sets, want_sets);
        // Partition: areas sum to the mask area and are sorted descending.
        let total: usize = got.iter().map(|c| c.area()).sum();
        prop_assert_eq!(total, mask.area());
        for w in got.windows(2) {
            prop_assert!(w[0].area() >= w[1].area());
        }
    }

    #[test]
    fn contour_encloses_exactly_the_component(verts in convex_poly_strategy()) {
        // Thin rasterized slivers can shed stray diagonal pixels, so trace
        // the dominant component rather than the raw mask.
        let poly = Polygon::from_xy(&verts);
        let mask = rasterize(&poly, 200, 200);
        let comp = connected_components(&mask).into_iter().next().unwrap();
        let comp_mask = comp.to_mask(200, 200);
        let contour = extract_contour(&comp_mask).unwrap();
        prop_assert_eq!(contour.area().unwrap(), comp.area() as f64);
    }

    #[test]
    fn simplified_contour_hugs_sharp_polygons(k in 3usize..=6, phase in 0.0..std::f64::consts::TAU, r in 60.0..90.0f64) {
        // Regular polygons have corners deep enough that simplification must
        // stop at them; shallow near-circular rings legitimately lose more.
        let verts: Vec<(f64, f64)> = (0..k)
            .map(|i| {
                let t = phase + std::f64::consts::TAU * i as f64 / k as f64;
                (100.0 + r * t.cos(), 100.0 + r * t.sin())
            })
            .collect();
        let poly = Polygon::from_xy(&verts);
        let mask = rasterize(&poly, 200, 200);
        let comp = connected_components(&mask).into_iter().next().unwrap();
        let contour = extract_contour(&comp.to_mask(200, 200)).unwrap();
        let simple = simplify_polygon(&contour, 0.01).unwrap();
        let a = simple.area().unwrap();
        let b = comp.area() as f64;
        prop_assert!((a - b).abs() <= 0.03 * b, "simplified {} vs mask {}", a, b);
        prop_assert!(simple.vertices.len() >= k && simple.vertices.len() <= k + 2,
            "expected about {} vertices, got {}", k, simple.vertices.len());
    }

    #[test]
    fn iou_is_symmetric_and_bounded(ax in 0.0..40.0f64, ay in 0.0..40.0f64,
                                    aw in 10.0..50.0f64, ah in 10.0..50.0f64,
                                    bx in 0.0..40.0f64, by in 0.0..40.0f64,
                                    bw in 10.0..50.0f64, bh in 10.0..50.0f64) {
        let ra = Polygon::from_xy(&[(ax, ay), (ax + aw, ay), (ax + aw, ay + ah), (ax, ay + ah)]);
        let rb = Polygon::from_xy(&[(bx, by), (bx + bw, by), (bx + bw, by + bh), (bx, by + bh)]);
        let ma = rasterize(&ra, 96, 96);
        let mb = rasterize(&rb, 96, 96);
        let ab = mask_iou(&ma, &mb).unwrap();
        let ba = mask_iou(&mb, &ma).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(mask_iou(&ma, &ma).unwrap(), 1.0);
    }

    #[test]
    fn classification_survives_rigid_transform_and_scale(
        deg in 0.0..360.0f64,
        tx in -20.0..20.0f64,
        ty in -20.0..20.0f64,
        scale in 0.5..3.0f64,
    ) {
        let shapes = [
            (Polygon::from_xy(&[(0.0, 0.0), (8.0, 0.0), (4.0, 4.0)]), ShapeClass::Triangle),
            (Polygon::from_xy(&[(6.0, 2.0), (8.0, 4.0), (6.0, 6.0), (4.0, 4.0)]), ShapeClass::Square),
            (Polygon::from_xy(&[(0.0, 8.0), (2.0, 6.0), (6.0, 6.0), (4.0, 8.0)]), ShapeClass::Parallelogram),
        ];
        for (poly, want) in shapes {
            let scaled = Polygon {
                vertices: poly.vertices.iter().map(|p| Point2::new(p.x * scale, p.y * scale)).collect(),
            };
            let moved = transform_polygon(&scaled, deg, scaled.centroid(), Point2::new(tx, ty));
            prop_assert_eq!(classify_shape(&moved), want);
        }
    }

    #[test]
    fn simplify_twice_equals_simplify_once(verts in convex_poly_strategy()) {
        let poly = Polygon::from_xy(&verts);
        let mask = rasterize(&poly, 200, 200);
        let comp = connected_components(&mask).into_iter().next().unwrap();
        let contour = extract_contour(&comp.to_mask(200, 200)).unwrap();
        let s1 = simplify_polygon(&contour, 0.02).unwrap();
        let s2 = simplify_polygon(&s1, 0.02).unwrap();
        prop_assert_eq!(s1, s2);
    }
}
