//! Controlled corruption of golden videos. Each mode plants exactly one
//! violation class so the evaluators' failure tags can be exercised end to
//! end: maze modes re-render the clip from a modified trajectory, tangram
//! modes re-render or post-process individual pieces.

use std::path::{Path, PathBuf};

use clap::Args;
use image::RgbImage;
use rand::Rng;
use rayon::prelude::*;

use fpb_core::geom::{ColorRgb, Point2};
use fpb_core::maze::{
    position_along_path, render_maze_frame, Cell, MazeSpec, ResolvedSchedule, CANVAS_H, CANVAS_W,
};
use fpb_core::rng::rng_for;
use fpb_core::tangram::{AssemblyRenderer, TangramScene, PIECE_COUNT};
use fpb_core::video_io::{
    read_frames, write_frames, FrameSequence, InstanceManifest, TaskBody,
};

use crate::{golden_dir, load_dataset, runtime, usage, AtStep, CliError, RunContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbMode {
    WrongTurn,
    WallCross,
    Teleport,
    Freeze,
    ShapeDistort,
    ColorDrift,
    PieceVanish,
}

impl PerturbMode {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "wrong_turn" => PerturbMode::WrongTurn,
            "wall_cross" => PerturbMode::WallCross,
            "teleport" => PerturbMode::Teleport,
            "freeze" => PerturbMode::Freeze,
            "shape_distort" => PerturbMode::ShapeDistort,
            "color_drift" => PerturbMode::ColorDrift,
            "piece_vanish" => PerturbMode::PieceVanish,
            other => {
                return Err(usage(format!(
                    "unknown mode {other:?}; expected wrong_turn, wall_cross, teleport, \
                     freeze, shape_distort, color_drift, or piece_vanish"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            PerturbMode::WrongTurn => "wrong_turn",
            PerturbMode::WallCross => "wall_cross",
            PerturbMode::Teleport => "teleport",
            PerturbMode::Freeze => "freeze",
            PerturbMode::ShapeDistort => "shape_distort",
            PerturbMode::ColorDrift => "color_drift",
            PerturbMode::PieceVanish => "piece_vanish",
        }
    }

    pub fn is_maze(self) -> bool {
        matches!(
            self,
            PerturbMode::WrongTurn
                | PerturbMode::WallCross
                | PerturbMode::Teleport
                | PerturbMode::Freeze
        )
    }
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Dataset directory produced by generate (golden videos must exist).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output root; perturbed frames land in <out>/<instance_id>/.
    #[arg(long)]
    pub out: PathBuf,
    /// Violation to plant.
    #[arg(long)]
    pub mode: String,
    /// Where the deviation starts: a step/frame index or a fraction of the
    /// path (maze) or clip (tangram).
    #[arg(long, default_value = "0.5")]
    pub at_step: String,
    /// shape_distort: scale factor; color_drift: hue turn in half-circles;
    /// piece_vanish: fraction of the clip the piece is absent.
    #[arg(long)]
    pub magnitude: Option<f64>,
}

fn resolve_magnitude(mode: PerturbMode, flag: Option<f64>) -> Result<f64, CliError> {
    match mode {
        m if m.is_maze() => match flag {
            None => Ok(0.0),
            Some(_) => Err(usage(format!("mode {} takes no --magnitude", m.name()))),
        },
        PerturbMode::ShapeDistort => {
            let f = flag.unwrap_or(1.5);
            if !(0.25..=3.0).contains(&f) || f == 1.0 {
                return Err(usage(format!(
                    "shape_distort magnitude must be in [0.25,3] and not 1, got {f}"
                )));
            }
            Ok(f)
        }
        PerturbMode::ColorDrift => {
            let f = flag.unwrap_or(1.0);
            if !(f > 0.0 && f <= 1.0) {
                return Err(usage(format!(
                    "color_drift magnitude must be in (0,1], got {f}"
                )));
            }
            Ok(f)
        }
        PerturbMode::PieceVanish => {
            let f = flag.unwrap_or(0.5);
            if !(f > 0.0 && f < 1.0) {
                return Err(usage(format!(
                    "piece_vanish magnitude must be in (0,1), got {f}"
                )));
            }
            Ok(f)
        }
        _ => unreachable!(),
    }
}

/// Step indexes fanning out from `k`. With `up_once` the upward excursion
/// stops at k+1 so the planted step never lands more than one step late.
fn fan_out(k: usize, hi: usize, up_once: bool) -> Vec<usize> {
    let start = k.min(hi);
    let mut order = vec![start];
    if up_once {
        if start < hi {
            order.push(start + 1);
        }
        order.extend((0..start).rev());
    } else {
        let (mut lo, mut up) = (start, start);
        while lo > 0 || up < hi {
            if lo > 0 {
                lo -= 1;
                order.push(lo);
            }
            if up < hi {
                up += 1;
                order.push(up);
            }
        }
    }
    order
}

const DIRS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

fn neighbor(spec: &MazeSpec, cell: Cell, d: (i64, i64)) -> Option<Cell> {
    let r = cell.r as i64 + d.0;
    let c = cell.c as i64 + d.1;
    (r >= 0 && c >= 0 && r < spec.rows as i64 && c < spec.cols as i64)
        .then(|| Cell::new(r as u32, c as u32))
}

/// Step index and target for a wrong turn: the first open neighbor of the
/// path cell that is not the golden continuation. The backtrack cell always
/// qualifies, so any k in [1, L-1] works directly.
pub fn plan_wrong_turn(spec: &MazeSpec, cells: &[Cell], k: usize) -> (usize, Cell) {
    let l = cells.len() - 1;
    let k2 = k.clamp(1, l - 1).min(l - 1);
    let alt = DIRS
        .iter()
        .filter_map(|&d| neighbor(spec, cells[k2], d))
        .filter(|&nb| !spec.is_wall(cells[k2], nb))
        .find(|&nb| nb != cells[k2 + 1])
        .expect("backtrack neighbor is always open");
    (k2, alt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallTarget {
    /// Adjacent cell separated by a drawn wall.
    Neighbor(Cell),
    /// Slide through the board's outer border, this many cells in row
    /// direction (negative is up). Used when no inner wall is reachable.
    OffBoard(f64),
}

/// Step index and target for a wall crossing, fanning out from `k`. Inner
/// walls are preferred; the top or bottom border is the fallback because the
/// canvas leaves room for the sprite only on those sides.
pub fn plan_wall_cross(
    spec: &MazeSpec,
    cells: &[Cell],
    k: usize,
) -> Result<(usize, WallTarget), CliError> {
    let l = cells.len() - 1;
    for k2 in fan_out(k.min(l), l, false) {
        let cell = cells[k2];
        for d in DIRS {
            if let Some(nb) = neighbor(spec, cell, d) {
                if spec.is_wall(cell, nb) {
                    return Ok((k2, WallTarget::Neighbor(nb)));
                }
            }
        }
    }
    for k2 in fan_out(k.min(l), l, false) {
        if cells[k2].r == 0 {
            return Ok((k2, WallTarget::OffBoard(-0.6)));
        }
        if cells[k2].r == spec.rows - 1 {
            return Ok((k2, WallTarget::OffBoard(0.6)));
        }
    }
    Err(runtime("path offers no wall to cross"))
}

/// Step index and landing cell for a teleport. The landing is the cell
/// farthest from the departure point, and the departure step shifts (at most
/// one step late) until the jump clears 1.6 cell widths, comfortably past
/// the evaluator's continuity gate.
pub fn plan_teleport(
    spec: &MazeSpec,
    cells: &[Cell],
    k: usize,
) -> Result<(usize, Cell), CliError> {
    let l = cells.len() - 1;
    for k2 in fan_out(k.min(l), l, true) {
        let from = cells[k2];
        let mut best: Option<(f64, Cell)> = None;
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                let cand = Cell::new(r, c);
                let dr = cand.r as f64 - from.r as f64;
                let dc = cand.c as f64 - from.c as f64;
                let d = (dr * dr + dc * dc).sqrt();
                if best.map_or(true, |(bd, _)| d > bd) {
                    best = Some((d, cand));
                }
            }
        }
        let (d, cand) = best.expect("board has cells");
        if d > 1.6 {
            return Ok((k2, cand));
        }
    }
    Err(runtime("board too small to outrun the continuity gate"))
}

fn maze_positions(
    mode: PerturbMode,
    spec: &MazeSpec,
    cells: &[Cell],
    resolved: &ResolvedSchedule,
    k: usize,
) -> Result<Vec<Point2>, CliError> {
    let l = cells.len() - 1;
    let pos_at = |s: f64| position_along_path(cells, s);
    let cell_pt = |c: Cell| Point2::new(c.c as f64, c.r as f64);
    let position: Box<dyn Fn(f64) -> Point2> = match mode {
        PerturbMode::Freeze => {
            let kf = k.min(l - 1) as f64;
            Box::new(move |s| pos_at(s.min(kf)))
        }
        PerturbMode::Teleport => {
            let (k2, park) = plan_teleport(spec, cells, k)?;
            let park = cell_pt(park);
            Box::new(move |s| if s < k2 as f64 { pos_at(s) } else { park })
        }
        PerturbMode::WrongTurn => {
            let (k2, alt) = plan_wrong_turn(spec, cells, k);
            let mut path: Vec<Cell> = cells[..=k2].to_vec();
            path.push(alt);
            let l2 = path.len() - 1;
            Box::new(move |s| {
                position_along_path(&path, s * l2 as f64 / l as f64)
            })
        }
        PerturbMode::WallCross => {
            let (k2, target) = plan_wall_cross(spec, cells, k)?;
            match target {
                WallTarget::Neighbor(nb) => {
                    let mut path: Vec<Cell> = cells[..=k2].to_vec();
                    path.push(nb);
                    let l2 = path.len() - 1;
                    Box::new(move |s| {
                        position_along_path(&path, s * l2 as f64 / l as f64)
                    })
                }
                WallTarget::OffBoard(dy) => {
                    let path: Vec<Cell> = cells[..=k2.max(1)].to_vec();
                    let anchor = cell_pt(cells[k2]);
                    let span = k2 as f64 + dy.abs();
                    Box::new(move |s| {
                        let q = s * span / l as f64;
                        if q <= k2 as f64 {
                            position_along_path(&path, q)
                        } else {
                            Point2::new(anchor.x, anchor.y + dy.signum() * (q - k2 as f64))
                        }
                    })
                }
            }
        }
        _ => unreachable!("maze positions only for maze modes"),
    };
    Ok((0..resolved.total_frames)
        .map(|t| position(resolved.arc_param(t, l)))
        .collect())
}

fn render_maze_positions(spec: &MazeSpec, positions: &[Point2]) -> FrameSequence {
    let frames: Vec<RgbImage> = positions
        .iter()
        .map(|&p| render_maze_frame(spec, p, CANVAS_W, CANVAS_H))
        .collect();
    FrameSequence::new(frames).expect("uniform canvas")
}

/// RGB hue rotation; grays are fixed points.
pub fn hue_shift(c: ColorRgb, degrees: f64) -> ColorRgb {
    let (r, g, b) = (c.r as f64 / 255.0, c.g as f64 / 255.0, c.b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta == 0.0 {
        return c;
    }
    let mut h = if max == r {
        60.0 * ((g - b) / delta)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    h = (h + degrees).rem_euclid(360.0);
    let s = delta / max;
    let v = max;
    let chroma = v * s;
    let x = chroma * (1.0 - ((h / 60.0).rem_euclid(2.0) - 1.0).abs());
    let m = v - chroma;
    let (r1, g1, b1) = match (h / 60.0) as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    let ch = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    ColorRgb::new(ch(r1), ch(g1), ch(b1))
}

/// Piece whose fully drifted color stays clear of the whole palette, so the
/// drift never masquerades as another piece at full strength. Falls back to
/// the piece with the widest clearance.
pub fn drift_target(scene: &TangramScene, magnitude: f64) -> u32 {
    let palette: Vec<ColorRgb> = scene.pieces.iter().map(|p| p.color).collect();
    let clearance = |pid: u32| {
        let end = hue_shift(palette[pid as usize], magnitude * 180.0);
        palette.iter().map(|&q| end.dist(q)).min().unwrap_or(0)
    };
    for &pid in &scene.placement_order {
        if clearance(pid) >= 76 {
            return pid;
        }
    }
    *scene
        .placement_order
        .iter()
        .max_by_key(|&&pid| (clearance(pid), std::cmp::Reverse(pid)))
        .expect("seven pieces")
}

fn is_scene_background(c: ColorRgb) -> bool {
    c == ColorRgb::new(255, 255, 255) || c == ColorRgb::new(0, 0, 0)
}

fn recolor_exact(img: &mut RgbImage, from: ColorRgb, to: ColorRgb) {
    let src = image::Rgb([from.r, from.g, from.b]);
    let dst = image::Rgb([to.r, to.g, to.b]);
    for px in img.pixels_mut() {
        if *px == src {
            *px = dst;
        }
    }
}

fn erase_exact(img: &mut RgbImage, from: ColorRgb, background: &RgbImage) {
    let src = image::Rgb([from.r, from.g, from.b]);
    for y in 0..img.height() {
        for x in 0..img.width() {
            if *img.get_pixel(x, y) == src {
                img.put_pixel(x, y, *background.get_pixel(x, y));
            }
        }
    }
}

fn perturb_tangram(
    ctx: &RunContext,
    instance_id: &str,
    scene: &TangramScene,
    golden: &FrameSequence,
    mode: PerturbMode,
    at: AtStep,
    magnitude: f64,
) -> Result<FrameSequence, CliError> {
    let total = golden.count();
    let renderer =
        AssemblyRenderer::new(scene, total).map_err(|e| runtime(format!("{instance_id}: {e}")))?;
    match mode {
        PerturbMode::ShapeDistort => {
            let piece = rng_for(ctx.seed, &format!("perturb.shape_distort.{instance_id}"))
                .gen_range(0..PIECE_COUNT) as u32;
            let t0 = at.resolve(total - 1);
            let frames = (0..total)
                .map(|t| {
                    if t >= t0 {
                        renderer.render_frame_resized(t, Some((piece, magnitude)))
                    } else {
                        renderer.render_frame(t)
                    }
                })
                .collect();
            Ok(FrameSequence::new(frames).expect("uniform canvas"))
        }
        PerturbMode::ColorDrift => {
            let piece = drift_target(scene, magnitude);
            let t0 = at.resolve(total - 1).min(total - 2);
            let mut frames = golden.frames().to_vec();
            for (t, frame) in frames.iter_mut().enumerate().skip(t0) {
                let Some(expected) = renderer.piece_color_at(piece, t) else {
                    continue;
                };
                if is_scene_background(expected) {
                    continue;
                }
                let progress = (t - t0) as f64 / (total - 1 - t0) as f64;
                let drifted = hue_shift(expected, magnitude * 180.0 * progress);
                recolor_exact(frame, expected, drifted);
            }
            Ok(FrameSequence::new(frames).expect("uniform canvas"))
        }
        PerturbMode::PieceVanish => {
            let piece = *scene.placement_order.last().expect("seven pieces");
            let cutoff = (1 + (magnitude * (total - 1) as f64).round() as usize).min(total);
            let mut frames = golden.frames().to_vec();
            for (t, frame) in frames.iter_mut().enumerate().take(cutoff).skip(1) {
                let Some(expected) = renderer.piece_color_at(piece, t) else {
                    continue;
                };
                if is_scene_background(expected) {
                    continue;
                }
                erase_exact(frame, expected, renderer.background());
            }
            Ok(FrameSequence::new(frames).expect("uniform canvas"))
        }
        _ => unreachable!("tangram modes only"),
    }
}

pub fn perturb_instance(
    ctx: &RunContext,
    inst_dir: &Path,
    m: &InstanceManifest,
    mode: PerturbMode,
    at: AtStep,
    magnitude: f64,
) -> Result<FrameSequence, CliError> {
    let golden = read_frames(&golden_dir(inst_dir)).map_err(|e| {
        runtime(format!(
            "{}: golden frames missing or unreadable ({e}); run synthesize first",
            m.instance_id
        ))
    })?;
    match &m.body {
        TaskBody::Maze {
            spec,
            actions,
            schedule,
        } => {
            if !mode.is_maze() {
                return Err(usage(format!(
                    "mode {} does not apply to maze instance {}",
                    mode.name(),
                    m.instance_id
                )));
            }
            let cells = spec
                .replay(actions)
                .map_err(|e| runtime(format!("{}: {e}", m.instance_id)))?;
            let resolved = schedule
                .resolve(actions.len())
                .map_err(|e| runtime(format!("{}: {e}", m.instance_id)))?;
            let k = at.resolve(actions.len());
            let positions = maze_positions(mode, spec, &cells, &resolved, k)?;
            Ok(render_maze_positions(spec, &positions))
        }
        TaskBody::Tangram { scene, .. } => {
            if mode.is_maze() {
                return Err(usage(format!(
                    "mode {} does not apply to tangram instance {}",
                    mode.name(),
                    m.instance_id
                )));
            }
            perturb_tangram(ctx, &m.instance_id, scene, &golden, mode, at, magnitude)
        }
    }
}

pub fn cmd_perturb(ctx: &RunContext, args: &PerturbArgs) -> Result<(), CliError> {
    let mode = PerturbMode::parse(&args.mode)?;
    let at = AtStep::parse(&args.at_step)?;
    let magnitude = resolve_magnitude(mode, args.magnitude)?;
    let dataset = load_dataset(&args.dataset)?;
    let results: Vec<Result<(), CliError>> = dataset
        .par_iter()
        .map(|(inst_dir, m)| {
            let frames = perturb_instance(ctx, inst_dir, m, mode, at, magnitude)?;
            write_frames(&frames, &args.out.join(&m.instance_id))
                .map_err(|e| runtime(format!("{}: {e}", m.instance_id)))?;
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    println!(
        "perturbed {} instances with {} into {}",
        dataset.len(),
        mode.name(),
        args.out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::dataset::{cmd_generate, GenerateArgs};
    use crate::evaluate::evaluate_instance;
    use crate::synthesize::{cmd_synthesize, SynthesizeArgs};
    use std::fs;

    fn ctx() -> RunContext {
        RunContext {
            seed: 5,
            workers: 2,
            config: RunConfig::default(),
        }
    }

    fn maze_dataset(out: &Path) -> (PathBuf, InstanceManifest) {
        cmd_generate(
            &ctx(),
            &GenerateArgs {
                task: "maze".into(),
                out: out.to_path_buf(),
                tier: "custom".into(),
                count: Some(1),
                sizes: Some("5".into()),
                path_range: Some("6,10".into()),
                split: Some("iid".into()),
                layouts: None,
                variants: String::new(),
            },
        )
        .unwrap();
        cmd_synthesize(
            &ctx(),
            &SynthesizeArgs {
                dataset: out.to_path_buf(),
                force: false,
                total_frames: None,
                kappa: None,
            },
        )
        .unwrap();
        load_dataset(out).unwrap().remove(0)
    }

    fn tangram_dataset(root: &Path, variants: &str) -> Vec<(PathBuf, InstanceManifest)> {
        let layouts = root.join("layouts");
        fs::create_dir_all(&layouts).unwrap();
        fs::write(
            layouts.join("sparse.json"),
            serde_json::to_string(&fpb_core::tangram::sparse_layout()).unwrap(),
        )
        .unwrap();
        let data = root.join("data");
        cmd_generate(
            &ctx(),
            &GenerateArgs {
                task: "tangram".into(),
                out: data.clone(),
                tier: "test".into(),
                count: None,
                sizes: None,
                path_range: None,
                split: None,
                layouts: Some(layouts),
                variants: variants.into(),
            },
        )
        .unwrap();
        cmd_synthesize(
            &ctx(),
            &SynthesizeArgs {
                dataset: data.clone(),
                force: false,
                total_frames: None,
                kappa: None,
            },
        )
        .unwrap();
        load_dataset(&data).unwrap()
    }

    fn perturb_and_score(
        inst_dir: &Path,
        m: &InstanceManifest,
        mode: &str,
        at_step: &str,
        magnitude: Option<f64>,
    ) -> fpb_core::video_io::EvalReport {
        let out = tempfile::tempdir().unwrap();
        let mode = PerturbMode::parse(mode).unwrap();
        let at = AtStep::parse(at_step).unwrap();
        let mag = resolve_magnitude(mode, magnitude).unwrap();
        let frames = perturb_instance(&ctx(), inst_dir, m, mode, at, mag).unwrap();
        let cand = out.path().join(&m.instance_id);
        write_frames(&frames, &cand).unwrap();
        evaluate_instance(&ctx(), inst_dir, m, &cand)
    }

    fn maze_len(m: &InstanceManifest) -> usize {
        let TaskBody::Maze { actions, .. } = &m.body else { panic!() };
        actions.len()
    }

    #[test]
    fn freeze_halves_progress_without_tags() {
        let dir = tempfile::tempdir().unwrap();
        let (inst_dir, m) = maze_dataset(dir.path());
        let r = perturb_and_score(&inst_dir, &m, "freeze", "0.5", None);
        let l = maze_len(&m) as f64;
        let k = (0.5 * l).round().min(l - 1.0);
        assert_eq!(r.metric("em"), Some(0.0));
        assert!((r.metric("pr").unwrap() * l - k).abs() <= 1.0, "{r:?}");
        assert!(r.failure_tags.is_empty(), "{:?}", r.failure_tags);
    }

    #[test]
    fn wrong_turn_is_tagged_wrong_movement() {
        let dir = tempfile::tempdir().unwrap();
        let (inst_dir, m) = maze_dataset(dir.path());
        let r = perturb_and_score(&inst_dir, &m, "wrong_turn", "0.5", None);
        assert_eq!(r.metric("em"), Some(0.0));
        assert!(
            r.failure_tags.iter().any(|t| t == "wrong movement"),
            "{:?}",
            r.failure_tags
        );
    }

    #[test]
    fn wall_cross_is_tagged_boundary_violation() {
        let dir = tempfile::tempdir().unwrap();
        let (inst_dir, m) = maze_dataset(dir.path());
        let r = perturb_and_score(&inst_dir, &m, "wall_cross", "0.5", None);
        let TaskBody::Maze { spec, actions, .. } = &m.body else { panic!() };
        let cells = spec.replay(actions).unwrap();
        let l = actions.len();
        let (k2, _) = plan_wall_cross(spec, &cells, (0.5 * l as f64).round() as usize).unwrap();
        assert_eq!(r.metric("em"), Some(0.0));
        assert!(
            r.failure_tags.iter().any(|t| t == "boundary violation"),
            "{:?}",
            r.failure_tags
        );
        assert!(
            (r.metric("pr").unwrap() * l as f64 - k2 as f64).abs() <= 1.0,
            "pr {} k2 {k2}",
            r.metric("pr").unwrap()
        );
    }

    #[test]
    fn teleport_truncates_with_kinematic_tag() {
        let dir = tempfile::tempdir().unwrap();
        let (inst_dir, m) = maze_dataset(dir.path());
        let r = perturb_and_score(&inst_dir, &m, "teleport", "0.5", None);
        let l = maze_len(&m) as f64;
        assert_eq!(r.metric("em"), Some(0.0));
        assert!(
            r.failure_tags.iter().any(|t| t == "kinematic inconsistency"),
            "{:?}",
            r.failure_tags
        );
        assert!(r.metric("pr").unwrap() <= 0.5 + 1.0 / l + 1e-9);
    }

    #[test]
    fn shape_distort_fails_exactly_one_piece() {
        let dir = tempfile::tempdir().unwrap();
        let data = tangram_dataset(dir.path(), "fade_in");
        let (inst_dir, m) = &data[0];
        let r = perturb_and_score(inst_dir, m, "shape_distort", "0", None);
        assert_eq!(r.metric("strict_gc"), Some(0.0));
        let diag: fpb_core::eval_tangram::TangramEvalResult =
            serde_json::from_value(r.diagnostics.clone()).unwrap();
        let failed: Vec<u32> = diag
            .verdicts
            .iter()
            .filter(|v| v.u == 0)
            .map(|v| v.piece_id)
            .collect();
        assert_eq!(failed.len(), 1, "{:?}", diag.verdicts);
        assert!((r.metric("progress_gc").unwrap() - 6.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn color_drift_reads_as_chromatic_distortion() {
        let dir = tempfile::tempdir().unwrap();
        let data = tangram_dataset(dir.path(), "fade_in");
        let (inst_dir, m) = &data[0];
        let r = perturb_and_score(inst_dir, m, "color_drift", "0", None);
        assert_eq!(r.metric("strict_gc"), Some(0.0));
        assert!(
            r.failure_tags.iter().any(|t| t == "chromatic distortion"),
            "{:?}",
            r.failure_tags
        );
        assert!(r.metric("visual_consistency").unwrap() < 1.0);
    }

    #[test]
    fn piece_vanish_dents_consistency_proportionally() {
        let dir = tempfile::tempdir().unwrap();
        let data = tangram_dataset(dir.path(), "translation");
        let (inst_dir, m) = &data[0];
        let frac = 0.5;
        let r = perturb_and_score(inst_dir, m, "piece_vanish", "0.5", Some(frac));
        let consistency = r.metric("visual_consistency").unwrap();
        assert!(
            consistency <= 1.0 - frac / 7.0 + 0.02,
            "consistency {consistency}"
        );
        assert!(consistency < 1.0);
    }

    #[test]
    fn perturbation_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (inst_dir, m) = maze_dataset(dir.path());
        let at = AtStep::parse("0.5").unwrap();
        let a = perturb_instance(&ctx(), &inst_dir, &m, PerturbMode::Teleport, at, 0.0).unwrap();
        let b = perturb_instance(&ctx(), &inst_dir, &m, PerturbMode::Teleport, at, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn maze_mode_on_tangram_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let data = tangram_dataset(dir.path(), "fade_in");
        let (inst_dir, m) = &data[0];
        let at = AtStep::parse("0.5").unwrap();
        let err =
            perturb_instance(&ctx(), inst_dir, m, PerturbMode::Freeze, at, 0.0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn fan_out_visits_near_indexes_first() {
        assert_eq!(fan_out(3, 6, false), vec![3, 2, 4, 1, 5, 0, 6]);
        assert_eq!(fan_out(3, 6, true), vec![3, 4, 2, 1, 0]);
        assert_eq!(fan_out(0, 2, false), vec![0, 1, 2]);
        assert_eq!(fan_out(9, 4, false), vec![4, 3, 2, 1, 0]);
    }

    #[test]
    fn hue_shift_is_identity_at_zero_and_for_grays() {
        let red = ColorRgb::new(220, 40, 40);
        assert_eq!(hue_shift(red, 0.0), red);
        let gray = ColorRgb::new(128, 128, 128);
        assert_eq!(hue_shift(gray, 137.0), gray);
        let cyan = hue_shift(red, 180.0);
        assert_eq!(cyan, ColorRgb::new(40, 220, 220));
    }
}
