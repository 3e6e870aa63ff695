use image::RgbImage;

use crate::geom::Point2;
use crate::video_io::FrameSequence;

use super::icons::IconSpec;
use super::render::{render_maze_background, BoardGeom};
use super::{ActionSeq, Cell, FrameSchedule, MazeError, MazeSpec};

/// Visited cells including the start; errors if the walk is illegal.
pub fn path_cells(spec: &MazeSpec, actions: &ActionSeq) -> Result<Vec<Cell>, MazeError> {
    spec.replay(actions)
}

/// Continuous cell-coordinate position (x = column, y = row) at arc
/// parameter `s` in [0, cells.len()-1] along the cell-center polyline.
pub fn position_along_path(cells: &[Cell], s: f64) -> Point2 {
    assert!(cells.len() >= 2, "path needs at least two cells");
    let last = cells.len() - 1;
    let s = s.clamp(0.0, last as f64);
    let i = (s.floor() as usize).min(last - 1);
    let frac = s - i as f64;
    let a = Point2::new(cells[i].c as f64, cells[i].r as f64);
    let b = Point2::new(cells[i + 1].c as f64, cells[i + 1].r as f64);
    a.lerp(b, frac)
}

/// Renders the golden solution video: lead hold at the start, constant-speed
/// motion cell-center to cell-center, tail hold at the goal.
pub fn synthesize_solution_video(
    spec: &MazeSpec,
    actions: &ActionSeq,
    schedule: &FrameSchedule,
    canvas_w: u32,
    canvas_h: u32,
) -> Result<FrameSequence, MazeError> {
    let cells = spec.replay(actions)?;
    let resolved = schedule.resolve(actions.len())?;
    let geom = BoardGeom::for_spec(spec, canvas_w, canvas_h);
    let background = render_maze_background(spec, canvas_w, canvas_h);
    let icon = IconSpec::for_id(spec.icon_id)
        .ok_or_else(|| MazeError::InvalidMaze(format!("icon_id {} out of range", spec.icon_id)))?;
    let mut frames: Vec<RgbImage> = Vec::with_capacity(resolved.total_frames as usize);
    for t in 0..resolved.total_frames {
        let s = resolved.arc_param(t, actions.len());
        let pos = position_along_path(&cells, s);
        let mut frame = background.clone();
        super::render::draw_sprite_at(&mut frame, &geom, &icon, geom.cell_to_px(pos));
        frames.push(frame);
    }
    FrameSequence::new(frames).map_err(|e| MazeError::InvalidMaze(e.to_string()))
}
