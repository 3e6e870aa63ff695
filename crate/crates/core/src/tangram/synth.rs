//! Assembly animation: frame 0 shows the silhouette (plus resting sidebar
//! pieces), then each piece animates to its target inside its own window.

use super::{
    poly_at, PieceRecord, Pose, TangramError, TangramScene, TangramVariant, PIECE_COUNT,
    SIDEBAR_SCALE, SILHOUETTE_BLACK,
};
use crate::geom::{rasterize, ColorRgb, Polygon, RasterMask};
use crate::video_io::FrameSequence;
use image::RgbImage;

/// One leading silhouette frame plus at least four frames per piece.
pub const MIN_ASSEMBLY_FRAMES: usize = 1 + 4 * PIECE_COUNT;

pub const DEFAULT_FADE_IN_FRAMES: usize = 81;
pub const DEFAULT_ROTATION_FRAMES: usize = 201;
pub const TRANSLATION_FRAME_CHOICES: [usize; 6] = [61, 65, 69, 73, 77, 81];

/// Split frames 1..total into seven contiguous windows, one per placement
/// slot, longest windows first. Returns (start, len) pairs.
pub fn piece_windows(total: usize) -> Result<Vec<(usize, usize)>, TangramError> {
    if total < MIN_ASSEMBLY_FRAMES {
        return Err(TangramError::Schedule(format!(
            "assembly needs at least {MIN_ASSEMBLY_FRAMES} frames, got {total}"
        )));
    }
    let span = total - 1;
    let base = span / PIECE_COUNT;
    let rem = span % PIECE_COUNT;
    let mut windows = Vec::with_capacity(PIECE_COUNT);
    let mut start = 1;
    for i in 0..PIECE_COUNT {
        let len = base + usize::from(i < rem);
        windows.push((start, len));
        start += len;
    }
    Ok(windows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceState {
    Resting,
    Active { index: usize, len: usize },
    Placed,
}

pub fn piece_state(windows: &[(usize, usize)], order_pos: usize, t: usize) -> PieceState {
    let (start, len) = windows[order_pos];
    if t < start {
        PieceState::Resting
    } else if t >= start + len {
        PieceState::Placed
    } else {
        PieceState::Active { index: t - start, len }
    }
}

fn shortest_delta_deg(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Active piece outline and fill for frame `index` of a `len`-frame window.
/// Progress hits 1 exactly on the window's last frame, so the final state
/// equals the placed rendering. `factor` resizes the piece about its own
/// anchor on top of the variant's size schedule.
fn active_piece(
    scene: &TangramScene,
    rec: &PieceRecord,
    index: usize,
    len: usize,
    factor: f64,
) -> (Polygon, ColorRgb) {
    let p = (index + 1) as f64 / len as f64;
    match scene.variant {
        TangramVariant::FadeIn => (
            poly_at(rec.kind, scene.scale, rec.target_pose, factor),
            SILHOUETTE_BLACK.lerp(rec.color, p),
        ),
        TangramVariant::Translation => {
            let pos = rec
                .initial_pose
                .translation()
                .lerp(rec.target_pose.translation(), p);
            let k = (SIDEBAR_SCALE + (1.0 - SIDEBAR_SCALE) * p) * factor;
            let pose = Pose::new(rec.target_pose.rot_deg, pos.x, pos.y);
            (poly_at(rec.kind, scene.scale, pose, k), rec.color)
        }
        TangramVariant::Rotation => {
            // First half spins in the sidebar slot, second half travels.
            let h1 = len / 2;
            if index < h1 {
                let q = (index + 1) as f64 / h1 as f64;
                let delta = shortest_delta_deg(rec.initial_pose.rot_deg, rec.target_pose.rot_deg);
                let rot = rec.initial_pose.rot_deg + delta * q;
                let pose = Pose::new(rot, rec.initial_pose.x, rec.initial_pose.y);
                (poly_at(rec.kind, scene.scale, pose, SIDEBAR_SCALE * factor), rec.color)
            } else {
                let q = (index + 1 - h1) as f64 / (len - h1) as f64;
                let pos = rec
                    .initial_pose
                    .translation()
                    .lerp(rec.target_pose.translation(), q);
                let k = (SIDEBAR_SCALE + (1.0 - SIDEBAR_SCALE) * q) * factor;
                let pose = Pose::new(rec.target_pose.rot_deg, pos.x, pos.y);
                (poly_at(rec.kind, scene.scale, pose, k), rec.color)
            }
        }
    }
}

fn blit_mask(img: &mut RgbImage, mask: &RasterMask, color: ColorRgb) {
    let px = image::Rgb([color.r, color.g, color.b]);
    for (x, y) in mask.iter_set() {
        img.put_pixel(x, y, px);
    }
}

/// Per-frame compositor with cached static masks. Perturbation builders use
/// it to re-render individual frames, optionally with one piece resized.
pub struct AssemblyRenderer<'a> {
    scene: &'a TangramScene,
    windows: Vec<(usize, usize)>,
    background: RgbImage,
    target_masks: Vec<RasterMask>,
    resting_masks: Vec<Option<RasterMask>>,
}

impl<'a> AssemblyRenderer<'a> {
    pub fn new(scene: &'a TangramScene, total: usize) -> Result<Self, TangramError> {
        scene.validate()?;
        let windows = piece_windows(total)?;
        let (w, h) = (scene.canvas_w, scene.canvas_h);

        let mut background = RgbImage::from_pixel(w, h, image::Rgb([255, 255, 255]));
        blit_mask(&mut background, &scene.silhouette_mask(), SILHOUETTE_BLACK);

        let target_masks: Vec<RasterMask> = scene
            .pieces
            .iter()
            .map(|rec| rasterize(&scene.target_poly(rec), w, h))
            .collect();
        let resting_masks: Vec<Option<RasterMask>> = scene
            .pieces
            .iter()
            .map(|rec| {
                scene
                    .variant
                    .has_sidebar()
                    .then(|| rasterize(&scene.initial_poly(rec), w, h))
            })
            .collect();
        Ok(AssemblyRenderer {
            scene,
            windows,
            background,
            target_masks,
            resting_masks,
        })
    }

    pub fn windows(&self) -> &[(usize, usize)] {
        &self.windows
    }

    pub fn background(&self) -> &RgbImage {
        &self.background
    }

    fn order_pos(&self, piece_id: u32) -> usize {
        self.scene
            .placement_order
            .iter()
            .position(|&p| p == piece_id)
            .expect("placement_order is a permutation of piece ids")
    }

    /// Compositor fill color of a piece at frame `t`; None while the piece
    /// is invisible (FadeIn pieces before their window).
    pub fn piece_color_at(&self, piece_id: u32, t: usize) -> Option<ColorRgb> {
        let rec = self.scene.piece(piece_id);
        match piece_state(&self.windows, self.order_pos(piece_id), t) {
            PieceState::Resting => self.scene.variant.has_sidebar().then_some(rec.color),
            PieceState::Active { index, len } => {
                Some(active_piece(self.scene, rec, index, len, 1.0).1)
            }
            PieceState::Placed => Some(rec.color),
        }
    }

    pub fn render_frame(&self, t: usize) -> RgbImage {
        self.render_frame_resized(t, None)
    }

    /// `resize`: (piece_id, factor) draws that piece at `factor` times its
    /// normal size in every state, bypassing the static-mask caches.
    pub fn render_frame_resized(&self, t: usize, resize: Option<(u32, f64)>) -> RgbImage {
        let scene = self.scene;
        let (w, h) = (scene.canvas_w, scene.canvas_h);
        let factor_for = |pid: u32| match resize {
            Some((id, f)) if id == pid => f,
            _ => 1.0,
        };
        let mut img = self.background.clone();
        // Active first; resting and placed pieces never move, so drawing them
        // after keeps their pixels byte-identical across every frame.
        for (order_pos, &pid) in scene.placement_order.iter().enumerate() {
            if let PieceState::Active { index, len } = piece_state(&self.windows, order_pos, t) {
                let rec = scene.piece(pid);
                let (poly, color) = active_piece(scene, rec, index, len, factor_for(pid));
                blit_mask(&mut img, &rasterize(&poly, w, h), color);
            }
        }
        for (order_pos, &pid) in scene.placement_order.iter().enumerate() {
            if piece_state(&self.windows, order_pos, t) == PieceState::Resting {
                let rec = scene.piece(pid);
                let f = factor_for(pid);
                if f == 1.0 {
                    if let Some(mask) = &self.resting_masks[pid as usize] {
                        blit_mask(&mut img, mask, rec.color);
                    }
                } else if scene.variant.has_sidebar() {
                    let poly = poly_at(
                        rec.kind,
                        scene.scale,
                        rec.initial_pose,
                        scene.initial_size_factor() * f,
                    );
                    blit_mask(&mut img, &rasterize(&poly, w, h), rec.color);
                }
            }
        }
        for (order_pos, &pid) in scene.placement_order.iter().enumerate() {
            if piece_state(&self.windows, order_pos, t) == PieceState::Placed {
                let rec = scene.piece(pid);
                let f = factor_for(pid);
                if f == 1.0 {
                    blit_mask(&mut img, &self.target_masks[pid as usize], rec.color);
                } else {
                    let poly = poly_at(rec.kind, scene.scale, rec.target_pose, f);
                    blit_mask(&mut img, &rasterize(&poly, w, h), rec.color);
                }
            }
        }
        img
    }
}

pub fn synthesize_assembly_video(
    scene: &TangramScene,
    total: usize,
) -> Result<FrameSequence, TangramError> {
    let renderer = AssemblyRenderer::new(scene, total)?;
    let frames = (0..total).map(|t| renderer.render_frame(t)).collect();
    Ok(FrameSequence::new(frames).expect("frames share the canvas size"))
}
