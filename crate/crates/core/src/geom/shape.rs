//! Polygon simplification and coarse shape classification.

use super::{GeomError, Point2, Polygon, ShapeClass};

/// Tolerances for `classify_shape_with`. The defaults implement the fixed
/// rules: square needs every internal angle in [85, 95] degrees and a
/// min-area-rectangle aspect in [0.9, 1.1]; parallelogram needs opposite
/// sides within 15% and opposite angles within 15 degrees. The square test
/// runs first, and right-angled quads failing its aspect test stay Unknown.
#[derive(Debug, Clone, Copy)]
pub struct ShapeTolerances {
    pub square_angle_lo: f64,
    pub square_angle_hi: f64,
    pub square_aspect_lo: f64,
    pub square_aspect_hi: f64,
    pub side_ratio_tol: f64,
    pub angle_tol_deg: f64,
}

impl Default for ShapeTolerances {
    fn default() -> Self {
        ShapeTolerances {
            square_angle_lo: 85.0,
            square_angle_hi: 95.0,
            square_aspect_lo: 0.9,
            square_aspect_hi: 1.1,
            side_ratio_tol: 0.15,
            angle_tol_deg: 15.0,
        }
    }
}

fn dedupe_closed(points: &[Point2], eps: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last().map_or(true, |&q| q.dist(p) > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= eps {
        out.pop();
    }
    out
}

fn seg_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Iterative endpoint-fit reduction of an open chain; keeps both endpoints.
fn rdp_chain(points: &[Point2], tol: f64, out: &mut Vec<Point2>) {
    if points.len() < 3 {
        out.extend_from_slice(&points[..points.len().saturating_sub(1)]);
        return;
    }
    let (a, b) = (points[0], points[points.len() - 1]);
    let mut worst = 0.0;
    let mut worst_i = 0;
    for (i, &p) in points.iter().enumerate().skip(1).take(points.len() - 2) {
        let d = seg_dist(p, a, b);
        if d > worst {
            worst = d;
            worst_i = i;
        }
    }
    if worst > tol {
        rdp_chain(&points[..=worst_i], tol, out);
        rdp_chain(&points[worst_i..], tol, out);
    } else {
        out.push(a);
    }
}

fn simplify_once(points: &[Point2], tol: f64) -> Vec<Point2> {
    // Split the ring at two far-apart vertices so corners survive no matter
    // where the ring starts: the point farthest from the vertex mean, then
    // the point farthest from it.
    let n = points.len();
    let mean = {
        let mut m = Point2::new(0.0, 0.0);
        for p in points {
            m = m + *p;
        }
        m * (1.0 / n as f64)
    };
    let a = (0..n)
        .max_by(|&i, &j| {
            points[i]
                .dist(mean)
                .partial_cmp(&points[j].dist(mean))
                .unwrap()
        })
        .unwrap();
    let b = (0..n)
        .max_by(|&i, &j| {
            points[i]
                .dist(points[a])
                .partial_cmp(&points[j].dist(points[a]))
                .unwrap()
        })
        .unwrap();
    let (a, b) = (a.min(b), a.max(b));
    if a == b {
        return points.to_vec();
    }
    let chain1: Vec<Point2> = points[a..=b].to_vec();
    let mut chain2: Vec<Point2> = points[b..].to_vec();
    chain2.extend_from_slice(&points[..=a]);
    let mut out = Vec::new();
    rdp_chain(&chain1, tol, &mut out);
    rdp_chain(&chain2, tol, &mut out);
    out
}

/// Reduces a closed polygon with tolerance `eps_fraction` of its perimeter.
/// If more than 8 vertices survive, the tolerance doubles and the pass
/// reruns, up to 4 retries. Collapsing below 3 vertices is an error.
pub fn simplify_polygon(poly: &Polygon, eps_fraction: f64) -> Result<Polygon, GeomError> {
    let points = dedupe_closed(&poly.vertices, 1e-9);
    if points.len() < 3 {
        return Err(GeomError::Degenerate(
            "polygon collapsed below 3 vertices".into(),
        ));
    }
    let perim = |ring: &[Point2]| -> f64 {
        (0..ring.len())
            .map(|i| ring[i].dist(ring[(i + 1) % ring.len()]))
            .sum()
    };
    let mut best: Option<Vec<Point2>> = None;
    for attempt in 0..=4u32 {
        let eps = eps_fraction * f64::powi(2.0, attempt as i32);
        // Iterate to a fixpoint so a second pass over the output is a no-op.
        let mut cur = points.clone();
        loop {
            let tol = eps * perim(&cur);
            let got = dedupe_closed(&simplify_once(&cur, tol), 1e-9);
            if got.len() < 3 {
                return Err(GeomError::Degenerate(
                    "polygon collapsed below 3 vertices".into(),
                ));
            }
            if got.len() == cur.len() {
                break;
            }
            cur = got;
        }
        let done = cur.len() <= 8;
        best = Some(cur);
        if done {
            break;
        }
    }
    let mut out = best.unwrap();
    // Start the ring at its lexicographically smallest vertex so the result
    // does not depend on where the input ring happened to begin.
    let first = (0..out.len())
        .min_by(|&i, &j| {
            (out[i].y, out[i].x)
                .partial_cmp(&(out[j].y, out[j].x))
                .unwrap()
        })
        .unwrap();
    out.rotate_left(first);
    Polygon::new(out)
}

fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap().then(p.y.partial_cmp(&q.y).unwrap()));
    pts.dedup_by(|a, b| a.dist(*b) < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point2, a: Point2, b: Point2| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // Upper sweep may only pop points it pushed itself, never the lower hull.
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Width and height of the minimum-area enclosing rectangle (rotating
/// calipers over the convex hull). Returns (short, long).
pub fn min_area_rect(poly: &Polygon) -> (f64, f64) {
    let hull = convex_hull(&poly.vertices);
    if hull.len() < 2 {
        return (0.0, 0.0);
    }
    if hull.len() == 2 {
        return (0.0, hull[0].dist(hull[1]));
    }
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let n = hull.len();
    for i in 0..n {
        let e = hull[(i + 1) % n] - hull[i];
        let len = (e.x * e.x + e.y * e.y).sqrt();
        if len < 1e-12 {
            continue;
        }
        let ux = e.x / len;
        let uy = e.y / len;
        let (mut lo_u, mut hi_u) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut lo_v, mut hi_v) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &hull {
            let u = p.x * ux + p.y * uy;
            let v = -p.x * uy + p.y * ux;
            lo_u = lo_u.min(u);
            hi_u = hi_u.max(u);
            lo_v = lo_v.min(v);
            hi_v = hi_v.max(v);
        }
        let w = hi_u - lo_u;
        let h = hi_v - lo_v;
        if w * h < best.0 {
            best = (w * h, w, h);
        }
    }
    (best.1.min(best.2), best.1.max(best.2))
}

fn internal_angles_deg(poly: &Polygon) -> Vec<f64> {
    let v = &poly.vertices;
    let n = v.len();
    (0..n)
        .map(|i| {
            let prev = v[(i + n - 1) % n] - v[i];
            let next = v[(i + 1) % n] - v[i];
            let dot = prev.x * next.x + prev.y * next.y;
            let np = (prev.x * prev.x + prev.y * prev.y).sqrt();
            let nn = (next.x * next.x + next.y * next.y).sqrt();
            if np < 1e-12 || nn < 1e-12 {
                return 0.0;
            }
            (dot / (np * nn)).clamp(-1.0, 1.0).acos().to_degrees()
        })
        .collect()
}

pub fn classify_shape(poly: &Polygon) -> ShapeClass {
    classify_shape_with(poly, &ShapeTolerances::default())
}

pub fn classify_shape_with(poly: &Polygon, tol: &ShapeTolerances) -> ShapeClass {
    let pts = dedupe_closed(&poly.vertices, 1e-9);
    match pts.len() {
        3 => {
            let p = Polygon { vertices: pts };
            if p.area().map_or(0.0, |a| a) < 1e-9 {
                ShapeClass::Unknown
            } else {
                ShapeClass::Triangle
            }
        }
        4 => {
            let p = Polygon { vertices: pts };
            let angles = internal_angles_deg(&p);
            let all_right = angles
                .iter()
                .all(|&a| a >= tol.square_angle_lo && a <= tol.square_angle_hi);
            if all_right {
                let (short, long) = min_area_rect(&p);
                if long < 1e-12 {
                    return ShapeClass::Unknown;
                }
                let aspect = short / long;
                if aspect >= tol.square_aspect_lo && aspect <= tol.square_aspect_hi {
                    return ShapeClass::Square;
                }
                return ShapeClass::Unknown;
            }
            let v = &p.vertices;
            let side = |i: usize| v[i].dist(v[(i + 1) % 4]);
            let sides_ok = |a: f64, b: f64| {
                let m = a.max(b);
                m > 1e-12 && (a - b).abs() / m <= tol.side_ratio_tol
            };
            let opp_sides = sides_ok(side(0), side(2)) && sides_ok(side(1), side(3));
            let opp_angles = (angles[0] - angles[2]).abs() <= tol.angle_tol_deg
                && (angles[1] - angles[3]).abs() <= tol.angle_tol_deg;
            if opp_sides && opp_angles {
                ShapeClass::Parallelogram
            } else {
                ShapeClass::Unknown
            }
        }
        _ => ShapeClass::Unknown,
    }
}
