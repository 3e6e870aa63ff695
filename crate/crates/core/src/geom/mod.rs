//! Planar geometry over pixel grids.
//!
//! Coordinates are in pixels, x right, y down. A pixel (i, j) covers the unit
//! square [i, i+1) x [j, j+1) and is sampled at its center (i+0.5, j+0.5).
//! Rasterization uses a half-open fill rule so polygons tiling a region
//! without interior overlap rasterize crack-free and double-fill-free.

mod raster;
mod shape;

pub use raster::{
    connected_components, dilate, extract_contour, mask_iou, rasterize, Component, RasterMask,
};
pub use shape::{
    classify_shape, classify_shape_with, min_area_rect, simplify_polygon, ShapeTolerances,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("empty component")]
    EmptyComponent,
    #[error("mask shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(u32, u32, u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ColorRgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl ColorRgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        ColorRgb { r, g, b }
    }

    /// Max-channel absolute difference, the distance used everywhere a color
    /// threshold appears.
    pub fn dist(self, other: ColorRgb) -> u8 {
        let d = |a: u8, b: u8| a.max(b) - a.min(b);
        d(self.r, other.r).max(d(self.g, other.g)).max(d(self.b, other.b))
    }

    pub fn lerp(self, other: ColorRgb, t: f64) -> ColorRgb {
        let ch = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round().clamp(0.0, 255.0) as u8;
        ColorRgb::new(ch(self.r, other.r), ch(self.g, other.g), ch(self.b, other.b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeClass {
    Triangle,
    Square,
    Parallelogram,
    Unknown,
}

impl ShapeClass {
    pub fn name(self) -> &'static str {
        match self {
            ShapeClass::Triangle => "triangle",
            ShapeClass::Square => "square",
            ShapeClass::Parallelogram => "parallelogram",
            ShapeClass::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Polygon, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::Degenerate(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        Ok(Polygon { vertices })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Polygon {
        Polygon {
            vertices: coords.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
        }
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            acc += v[i].x * v[j].y - v[j].x * v[i].y;
        }
        acc / 2.0
    }

    pub fn area(&self) -> Result<f64, GeomError> {
        let distinct = {
            let mut seen: Vec<Point2> = Vec::new();
            for &p in &self.vertices {
                if !seen.iter().any(|q| q.dist(p) < 1e-12) {
                    seen.push(p);
                }
            }
            seen.len()
        };
        if distinct < 3 {
            return Err(GeomError::Degenerate(
                "fewer than 3 distinct vertices".into(),
            ));
        }
        Ok(self.signed_area().abs())
    }

    pub fn perimeter(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n).map(|i| v[i].dist(v[(i + 1) % n])).sum()
    }

    /// Area-weighted centroid; falls back to the vertex mean when the area
    /// vanishes.
    pub fn centroid(&self) -> Point2 {
        let v = &self.vertices;
        let n = v.len();
        let a = self.signed_area();
        if a.abs() < 1e-12 {
            let mut mx = 0.0;
            let mut my = 0.0;
            for p in v {
                mx += p.x;
                my += p.y;
            }
            return Point2::new(mx / n as f64, my / n as f64);
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            let cross = v[i].x * v[j].y - v[j].x * v[i].y;
            cx += (v[i].x + v[j].x) * cross;
            cy += (v[i].y + v[j].y) * cross;
        }
        Point2::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Even-odd test consistent with `rasterize`: a point exactly on a left
    /// edge is inside, on a right edge outside.
    pub fn contains(&self, p: Point2) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            if (a.y <= p.y) != (b.y <= p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                let x = a.x + t * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn reversed(&self) -> Polygon {
        let mut v = self.vertices.clone();
        v.reverse();
        Polygon { vertices: v }
    }
}

/// Rigid transform: rotate `deg` counterclockwise (in x-right, y-down pixel
/// coordinates this renders as a clockwise turn) about `about`, then shift by
/// `translate`.
pub fn transform_polygon(poly: &Polygon, deg: f64, about: Point2, translate: Point2) -> Polygon {
    let rad = deg.to_radians();
    let (s, c) = rad.sin_cos();
    let vertices = poly
        .vertices
        .iter()
        .map(|&p| {
            let d = p - about;
            Point2::new(
                about.x + d.x * c - d.y * s + translate.x,
                about.y + d.x * s + d.y * c + translate.y,
            )
        })
        .collect();
    Polygon { vertices }
}

pub fn scale_polygon(poly: &Polygon, about: Point2, factor: f64) -> Polygon {
    let vertices = poly
        .vertices
        .iter()
        .map(|&p| about + (p - about) * factor)
        .collect();
    Polygon { vertices }
}
