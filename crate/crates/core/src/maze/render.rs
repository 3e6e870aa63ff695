use image::{Rgb, RgbImage};

use crate::geom::{ColorRgb, Point2};

use super::icons::{icon_membership, IconSpec};
use super::MazeSpec;

pub const CANVAS_W: u32 = 480;
pub const CANVAS_H: u32 = 832;
pub const CANVAS_BG: ColorRgb = ColorRgb { r: 240, g: 240, b: 240 };
pub const CORRIDOR: ColorRgb = ColorRgb { r: 255, g: 255, b: 255 };
pub const WALL: ColorRgb = ColorRgb { r: 0, g: 0, b: 0 };
pub const GOAL_RED: ColorRgb = ColorRgb { r: 220, g: 30, b: 30 };

const MARGIN: u32 = 24;

/// Pixel layout of a board on a canvas: integer cell size, centered origin,
/// even wall thickness split half-and-half across each shared edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoardGeom {
    pub rows: u32,
    pub cols: u32,
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub cell_size: u32,
    pub origin_x: u32,
    pub origin_y: u32,
    pub wall_half: u32,
}

impl BoardGeom {
    pub fn new(rows: u32, cols: u32, canvas_w: u32, canvas_h: u32) -> Self {
        let usable_w = canvas_w - 2 * MARGIN;
        let usable_h = canvas_h - 2 * MARGIN;
        let cell_size = (usable_w / cols).min(usable_h / rows);
        assert!(cell_size >= 8, "canvas too small for {rows}x{cols} board");
        let origin_x = (canvas_w - cell_size * cols) / 2;
        let origin_y = (canvas_h - cell_size * rows) / 2;
        let wall_half = ((0.06 * cell_size as f64).round() as u32).max(1);
        BoardGeom {
            rows,
            cols,
            canvas_w,
            canvas_h,
            cell_size,
            origin_x,
            origin_y,
            wall_half,
        }
    }

    pub fn for_spec(spec: &MazeSpec, canvas_w: u32, canvas_h: u32) -> Self {
        Self::new(spec.rows, spec.cols, canvas_w, canvas_h)
    }

    /// Pixel position of a continuous cell coordinate (x = column, y = row);
    /// integer coordinates address cell corners, +0.5 the center.
    pub fn cell_to_px(&self, pos: Point2) -> Point2 {
        Point2::new(
            self.origin_x as f64 + (pos.x + 0.5) * self.cell_size as f64,
            self.origin_y as f64 + (pos.y + 0.5) * self.cell_size as f64,
        )
    }

    /// Inverse of cell_to_px for evaluator use.
    pub fn px_to_cell(&self, px: Point2) -> Point2 {
        Point2::new(
            (px.x - self.origin_x as f64) / self.cell_size as f64 - 0.5,
            (px.y - self.origin_y as f64) / self.cell_size as f64 - 0.5,
        )
    }

    pub fn goal_radius(&self) -> f64 {
        0.3 * self.cell_size as f64
    }

    pub fn sprite_half(&self) -> f64 {
        0.3 * self.cell_size as f64
    }
}

/// Center of `cell` in pixels under the default geometry for `spec`.
pub fn cell_center_px(spec: &MazeSpec, cell: super::Cell, canvas_w: u32, canvas_h: u32) -> Point2 {
    BoardGeom::for_spec(spec, canvas_w, canvas_h)
        .cell_to_px(Point2::new(cell.c as f64, cell.r as f64))
}

fn put_rect(img: &mut RgbImage, x0: i64, y0: i64, x1: i64, y1: i64, color: ColorRgb) {
    let px = Rgb([color.r, color.g, color.b]);
    let (w, h) = (img.width() as i64, img.height() as i64);
    for y in y0.max(0)..y1.min(h) {
        for x in x0.max(0)..x1.min(w) {
            img.put_pixel(x as u32, y as u32, px);
        }
    }
}

fn fill_disc(img: &mut RgbImage, center: Point2, radius: f64, color: ColorRgb) {
    let px = Rgb([color.r, color.g, color.b]);
    let x0 = (center.x - radius - 1.0).floor().max(0.0) as u32;
    let y0 = (center.y - radius - 1.0).floor().max(0.0) as u32;
    let x1 = ((center.x + radius + 1.0).ceil() as u32).min(img.width());
    let y1 = ((center.y + radius + 1.0).ceil() as u32).min(img.height());
    let r2 = radius * radius;
    for y in y0..y1 {
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - center.x;
            let dy = y as f64 + 0.5 - center.y;
            if dx * dx + dy * dy <= r2 {
                img.put_pixel(x, y, px);
            }
        }
    }
}

/// Board, corridors, walls, and goal disc with no agent sprite.
pub fn render_maze_background(spec: &MazeSpec, canvas_w: u32, canvas_h: u32) -> RgbImage {
    let g = BoardGeom::for_spec(spec, canvas_w, canvas_h);
    let mut img = RgbImage::from_pixel(
        canvas_w,
        canvas_h,
        Rgb([CANVAS_BG.r, CANVAS_BG.g, CANVAS_BG.b]),
    );
    let (ox, oy, cs, ht) = (
        g.origin_x as i64,
        g.origin_y as i64,
        g.cell_size as i64,
        g.wall_half as i64,
    );
    put_rect(
        &mut img,
        ox,
        oy,
        ox + cs * spec.cols as i64,
        oy + cs * spec.rows as i64,
        WALL,
    );
    for r in 0..spec.rows as i64 {
        for c in 0..spec.cols as i64 {
            put_rect(
                &mut img,
                ox + c * cs + ht,
                oy + r * cs + ht,
                ox + (c + 1) * cs - ht,
                oy + (r + 1) * cs - ht,
                CORRIDOR,
            );
        }
    }
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let cell = super::Cell::new(r, c);
            if c + 1 < spec.cols && !spec.is_wall(cell, super::Cell::new(r, c + 1)) {
                let x = ox + (c as i64 + 1) * cs;
                put_rect(
                    &mut img,
                    x - ht,
                    oy + r as i64 * cs + ht,
                    x + ht,
                    oy + (r as i64 + 1) * cs - ht,
                    CORRIDOR,
                );
            }
            if r + 1 < spec.rows && !spec.is_wall(cell, super::Cell::new(r + 1, c)) {
                let y = oy + (r as i64 + 1) * cs;
                put_rect(
                    &mut img,
                    ox + c as i64 * cs + ht,
                    y - ht,
                    ox + (c as i64 + 1) * cs - ht,
                    y + ht,
                    CORRIDOR,
                );
            }
        }
    }
    let goal_center = g.cell_to_px(Point2::new(spec.goal.c as f64, spec.goal.r as f64));
    fill_disc(&mut img, goal_center, g.goal_radius(), GOAL_RED);
    img
}

pub(crate) fn draw_sprite_at(img: &mut RgbImage, g: &BoardGeom, icon: &IconSpec, center: Point2) {
    let s = g.sprite_half();
    let x0 = (center.x - s - 1.0).floor().max(0.0) as u32;
    let y0 = (center.y - s - 1.0).floor().max(0.0) as u32;
    let x1 = ((center.x + s + 1.0).ceil() as u32).min(img.width());
    let y1 = ((center.y + s + 1.0).ceil() as u32).min(img.height());
    for y in y0..y1 {
        for x in x0..x1 {
            let u = (x as f64 + 0.5 - center.x) / s;
            let v = (y as f64 + 0.5 - center.y) / s;
            if icon_membership(icon.base_shape, u, v) {
                let c = if icon_membership(icon.base_shape, u / 0.7, v / 0.7) {
                    icon.fill
                } else {
                    icon.accent
                };
                img.put_pixel(x, y, Rgb([c.r, c.g, c.b]));
            }
        }
    }
}

/// Full frame: background plus the agent sprite centered at `agent_pos`
/// (continuous cell coordinates, x = column, y = row).
pub fn render_maze_frame(
    spec: &MazeSpec,
    agent_pos: Point2,
    canvas_w: u32,
    canvas_h: u32,
) -> RgbImage {
    let g = BoardGeom::for_spec(spec, canvas_w, canvas_h);
    let mut img = render_maze_background(spec, canvas_w, canvas_h);
    let icon = IconSpec::for_id(spec.icon_id).expect("icon_id out of range");
    draw_sprite_at(&mut img, &g, &icon, g.cell_to_px(agent_pos));
    img
}
