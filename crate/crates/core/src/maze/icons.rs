use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::geom::ColorRgb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Star,
    Circle,
    Triangle,
    Diamond,
    Heart,
    Cross,
    Hexagon,
    Ring,
}

pub const SHAPE_ORDER: [ShapeKind; 8] = [
    ShapeKind::Star,
    ShapeKind::Circle,
    ShapeKind::Triangle,
    ShapeKind::Diamond,
    ShapeKind::Heart,
    ShapeKind::Cross,
    ShapeKind::Hexagon,
    ShapeKind::Ring,
];

/// Fill palette for the training icon set. Kept far from corridor white,
/// wall black, and the goal red so background subtraction sees every icon.
const SEEN_FILLS: [ColorRgb; 5] = [
    ColorRgb { r: 45, g: 95, b: 225 },
    ColorRgb { r: 45, g: 175, b: 80 },
    ColorRgb { r: 240, g: 150, b: 40 },
    ColorRgb { r: 150, g: 60, b: 200 },
    ColorRgb { r: 35, g: 190, b: 195 },
];

const UNSEEN_FILLS: [ColorRgb; 2] = [
    ColorRgb { r: 235, g: 210, b: 50 },
    ColorRgb { r: 235, g: 90, b: 170 },
];

pub const SEEN_ICON_COUNT: u32 = 40;
pub const UNSEEN_ICON_COUNT: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IconSplit {
    Seen,
    Unseen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IconSpec {
    pub icon_id: u32,
    pub base_shape: ShapeKind,
    pub fill: ColorRgb,
    pub accent: ColorRgb,
    pub split: IconSplit,
}

impl IconSpec {
    /// Icons 0..39 are the training set (8 shapes x 5 fills); 40..49 are the
    /// held-out set drawn from two fills no training icon uses.
    pub fn for_id(icon_id: u32) -> Option<IconSpec> {
        let (base_shape, fill, split) = if icon_id < SEEN_ICON_COUNT {
            (
                SHAPE_ORDER[(icon_id % 8) as usize],
                SEEN_FILLS[(icon_id / 8) as usize],
                IconSplit::Seen,
            )
        } else if icon_id < SEEN_ICON_COUNT + UNSEEN_ICON_COUNT {
            let i = icon_id - SEEN_ICON_COUNT;
            (
                SHAPE_ORDER[(i % 8) as usize],
                UNSEEN_FILLS[(i / 8) as usize],
                IconSplit::Unseen,
            )
        } else {
            return None;
        };
        let accent = ColorRgb {
            r: fill.r / 2,
            g: fill.g / 2,
            b: fill.b / 2,
        };
        Some(IconSpec {
            icon_id,
            base_shape,
            fill,
            accent,
            split,
        })
    }
}

fn star_vertices() -> &'static [(f64, f64); 10] {
    static V: OnceLock<[(f64, f64); 10]> = OnceLock::new();
    V.get_or_init(|| {
        let mut out = [(0.0, 0.0); 10];
        for (k, slot) in out.iter_mut().enumerate() {
            let ang = (-90.0 + 36.0 * k as f64).to_radians();
            let r = if k % 2 == 0 { 0.95 } else { 0.43 };
            *slot = (r * ang.cos(), r * ang.sin());
        }
        out
    })
}

fn even_odd(ring: &[(f64, f64)], u: f64, v: f64) -> bool {
    let mut inside = false;
    let n = ring.len();
    for i in 0..n {
        let (x1, y1) = ring[i];
        let (x2, y2) = ring[(i + 1) % n];
        if (y1 <= v) != (y2 <= v) {
            let x_at = x1 + (v - y1) * (x2 - x1) / (y2 - y1);
            if x_at > u {
                inside = !inside;
            }
        }
    }
    inside
}

/// Shape membership on the unit box, u right and v DOWN, both in [-1, 1].
pub fn icon_membership(shape: ShapeKind, u: f64, v: f64) -> bool {
    if u.abs() > 1.0 || v.abs() > 1.0 {
        return false;
    }
    let r2 = u * u + v * v;
    match shape {
        ShapeKind::Circle => r2 <= 0.95 * 0.95,
        ShapeKind::Ring => (0.55 * 0.55..=0.95 * 0.95).contains(&r2),
        ShapeKind::Triangle => v <= 0.8 && 1.75 * u.abs() <= 0.9 * (v + 0.95),
        ShapeKind::Diamond => u.abs() + v.abs() <= 0.95,
        ShapeKind::Cross => {
            (u.abs() <= 0.32 && v.abs() <= 0.95) || (v.abs() <= 0.32 && u.abs() <= 0.95)
        }
        ShapeKind::Hexagon => {
            let rad = 0.95;
            u.abs() <= rad * 0.866_025_403_784_438_6
                && v.abs() <= rad - u.abs() / 3.0_f64.sqrt()
        }
        ShapeKind::Star => even_odd(star_vertices(), u, v),
        ShapeKind::Heart => {
            let x = u / 0.72;
            let y = (-v + 0.12) / 0.72;
            let q = x * x + y * y - 1.0;
            q * q * q - x * x * y * y * y <= 0.0
        }
    }
}
