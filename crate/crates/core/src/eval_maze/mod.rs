//! Rule-based maze video scoring: background subtraction isolates the agent,
//! arc-length resampling removes timing, cell discretization gives a symbolic
//! path scored with exact-match and progress-rate metrics.

use std::collections::BTreeSet;

use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{connected_components, Point2, RasterMask};
use crate::maze::{
    render_maze_background, solve_shortest_path, ActionSeq, BoardGeom, Cell, MazeSpec, GOAL_RED,
};
use crate::tags;
use crate::video_io::FrameSequence;

#[derive(Debug, Error)]
pub enum EvalMazeError {
    #[error("tracking failed: {gaps} of {total} frames had no usable detection")]
    TrackingFailure { gaps: usize, total: usize },
    #[error("frame size {got_w}x{got_h} does not match background {want_w}x{want_h}")]
    ShapeMismatch {
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },
    #[error("invalid maze during scoring: {0}")]
    InvalidMaze(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MazeEvalParams {
    /// Max-channel diff threshold for background subtraction.
    pub tau: u8,
    /// Smallest component, in pixels, treated as a detection.
    pub min_area: usize,
    /// Continuity gate between consecutive detections, in cell widths.
    pub continuity_radius: f64,
    /// Resample count per golden path step.
    pub resample_per_step: usize,
}

impl Default for MazeEvalParams {
    fn default() -> Self {
        MazeEvalParams {
            tau: 30,
            min_area: 25,
            continuity_radius: 1.5,
            resample_per_step: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub frame_index: usize,
    pub centroid: (f64, f64),
    pub blob_area: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrajectoryTrace {
    pub samples: Vec<TraceSample>,
    pub gaps: Vec<usize>,
    /// Frame index where tracking stopped because every detection broke the
    /// continuity gate, if that happened.
    pub truncated_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSequence {
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MazeEvalResult {
    pub em: u8,
    pub pr: f64,
    pub failure_tags: Vec<String>,
    pub cells: Vec<Cell>,
    pub golden_cells: Vec<Cell>,
    pub trace_samples: usize,
    pub trace_gaps: usize,
}

/// The static scene the candidate frames are compared against. Re-rendered
/// from the manifest, so it is exact, not estimated.
pub fn build_background(spec: &MazeSpec, canvas_w: u32, canvas_h: u32) -> RgbImage {
    render_maze_background(spec, canvas_w, canvas_h)
}

/// Per-pixel temporal median across frames, for videos that arrive without
/// a manifest. With the agent in motion most of the time, the median sees
/// the static scene at every pixel.
pub fn estimate_background_median(frames: &FrameSequence) -> RgbImage {
    let (w, h) = (frames.width(), frames.height());
    let n = frames.count();
    let mut out = RgbImage::new(w, h);
    let mut values = vec![0u8; n];
    for y in 0..h {
        for x in 0..w {
            let mut px = [0u8; 3];
            for ch in 0..3 {
                for (i, f) in frames.frames().iter().enumerate() {
                    values[i] = f.get_pixel(x, y).0[ch];
                }
                values.sort_unstable();
                px[ch] = values[n / 2];
            }
            out.put_pixel(x, y, image::Rgb(px));
        }
    }
    out
}

fn max_channel_diff(a: &image::Rgb<u8>, b: &image::Rgb<u8>) -> u8 {
    (0..3)
        .map(|i| a.0[i].abs_diff(b.0[i]))
        .max()
        .unwrap()
}

/// Tracks the agent through `frames` by background subtraction with a
/// spatial continuity gate. Goal-disc pixels that still look disc-colored
/// are excluded so a slightly redrawn disc never reads as motion.
pub fn extract_agent_trajectory(
    frames: &FrameSequence,
    background: &RgbImage,
    spec: &MazeSpec,
    params: &MazeEvalParams,
) -> Result<TrajectoryTrace, EvalMazeError> {
    if frames.width() != background.width() || frames.height() != background.height() {
        return Err(EvalMazeError::ShapeMismatch {
            got_w: frames.width(),
            got_h: frames.height(),
            want_w: background.width(),
            want_h: background.height(),
        });
    }
    let (w, h) = (frames.width(), frames.height());
    let geom = BoardGeom::for_spec(spec, w, h);
    let goal_center = geom.cell_to_px(Point2::new(spec.goal.c as f64, spec.goal.r as f64));
    let goal_r = geom.goal_radius() + 1.0;
    let start_center = geom.cell_to_px(Point2::new(spec.start.c as f64, spec.start.r as f64));
    let rho_px = params.continuity_radius * geom.cell_size as f64;

    let mut trace = TrajectoryTrace::default();
    let mut anchor: Option<Point2> = None;
    for (t, frame) in frames.frames().iter().enumerate() {
        let mut mask = RasterMask::new(w, h);
        for y in 0..h {
            for x in 0..w {
                let fp = frame.get_pixel(x, y);
                if max_channel_diff(fp, background.get_pixel(x, y)) < params.tau {
                    continue;
                }
                let dx = x as f64 + 0.5 - goal_center.x;
                let dy = y as f64 + 0.5 - goal_center.y;
                if dx * dx + dy * dy <= goal_r * goal_r {
                    let red = image::Rgb([GOAL_RED.r, GOAL_RED.g, GOAL_RED.b]);
                    if max_channel_diff(fp, &red) < params.tau {
                        continue;
                    }
                }
                mask.set(x, y, true);
            }
        }
        let comps = connected_components(&mask);
        let candidates: Vec<_> = comps.iter().filter(|c| c.area() >= params.min_area).collect();
        if candidates.is_empty() {
            trace.gaps.push(t);
            continue;
        }
        let target = anchor.unwrap_or(start_center);
        let best = candidates
            .iter()
            .min_by(|a, b| {
                a.centroid
                    .dist(target)
                    .partial_cmp(&b.centroid.dist(target))
                    .unwrap()
            })
            .unwrap();
        if anchor.is_some() && best.centroid.dist(target) > rho_px {
            trace.truncated_at = Some(t);
            break;
        }
        anchor = Some(best.centroid);
        trace.samples.push(TraceSample {
            frame_index: t,
            centroid: (best.centroid.x, best.centroid.y),
            blob_area: best.area(),
        });
    }
    let total = frames.count();
    if trace.gaps.len() * 2 > total {
        return Err(EvalMazeError::TrackingFailure {
            gaps: trace.gaps.len(),
            total,
        });
    }
    Ok(trace)
}

/// `m` points equally spaced in cumulative arc length along `points`.
/// A zero-length polyline yields `m` copies of its single location.
pub fn resample_by_arclength(points: &[Point2], m: usize) -> Vec<Point2> {
    assert!(!points.is_empty(), "cannot resample an empty polyline");
    assert!(m >= 2, "resample count must be at least 2");
    let mut cum = Vec::with_capacity(points.len());
    cum.push(0.0);
    for i in 1..points.len() {
        cum.push(cum[i - 1] + points[i - 1].dist(points[i]));
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![points[0]; m];
    }
    let mut out = Vec::with_capacity(m);
    let mut seg = 0usize;
    for j in 0..m {
        let target = total * j as f64 / (m - 1) as f64;
        while seg + 1 < cum.len() - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span == 0.0 { 0.0 } else { (target - cum[seg]) / span };
        out.push(points[seg].lerp(points[seg + 1], frac.clamp(0.0, 1.0)));
    }
    out
}

/// Maps pixel-space polyline points to grid cells. Points closer than 0.15
/// cell widths to a boundary keep the previous point's cell; points off the
/// board clamp to the nearest cell and flag a boundary-violation candidate.
pub fn trace_to_cells(
    polyline: &[Point2],
    spec: &MazeSpec,
    geom: &BoardGeom,
) -> (CellSequence, BTreeSet<String>) {
    const HYSTERESIS: f64 = 0.15;
    let mut tags = BTreeSet::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut last: Option<Cell> = None;
    for p in polyline {
        let cc = geom.px_to_cell(*p);
        // Grid coordinates with cell boundaries at integers.
        let gx = cc.x + 0.5;
        let gy = cc.y + 0.5;
        let off_board =
            gx < 0.0 || gy < 0.0 || gx >= spec.cols as f64 || gy >= spec.rows as f64;
        let cell = if off_board {
            tags.insert(tags::BOUNDARY_VIOLATION.to_string());
            Cell::new(
                (gy.floor().max(0.0) as u32).min(spec.rows - 1),
                (gx.floor().max(0.0) as u32).min(spec.cols - 1),
            )
        } else {
            let near_boundary = (gx - gx.round()).abs() < HYSTERESIS
                || (gy - gy.round()).abs() < HYSTERESIS;
            match (near_boundary, last) {
                (true, Some(prev)) => prev,
                _ => Cell::new(gy.floor() as u32, gx.floor() as u32),
            }
        };
        if last != Some(cell) {
            cells.push(cell);
        }
        last = Some(cell);
    }
    (CellSequence { cells }, tags)
}

/// Longest-correct-prefix scoring. `golden` includes the start cell, so a
/// path of L actions has L+1 golden cells; PR counts matched steps over L.
pub fn score_em_pr(
    candidate: &CellSequence,
    spec: &MazeSpec,
    golden: &[Cell],
) -> (u8, f64, BTreeSet<String>) {
    let mut tags = BTreeSet::new();
    let l = golden.len() - 1;
    let cells = &candidate.cells;
    if cells.is_empty() || cells[0] != golden[0] {
        return (0, 0.0, tags);
    }
    // Walk the candidate, stopping at the first illegal transition; k is the
    // number of golden steps matched before any divergence.
    let mut k = 0usize;
    let mut diverged = false;
    for i in 1..cells.len() {
        let (a, b) = (cells[i - 1], cells[i]);
        let adjacent = (a.r == b.r && a.c.abs_diff(b.c) == 1)
            || (a.c == b.c && a.r.abs_diff(b.r) == 1);
        if !adjacent {
            tags.insert(tags::KINEMATIC_INCONSISTENCY.to_string());
            break;
        }
        if spec.is_wall(a, b) {
            tags.insert(tags::BOUNDARY_VIOLATION.to_string());
            break;
        }
        if !diverged && i < golden.len() && b == golden[i] {
            k = i;
        } else if !diverged {
            diverged = true;
            tags.insert(tags::WRONG_MOVEMENT.to_string());
        }
    }
    let pr = k as f64 / l as f64;
    let em = u8::from(cells.as_slice() == golden);
    if em == 1 {
        debug_assert_eq!(pr, 1.0);
    }
    (em, pr, tags)
}

/// Full pipeline: background, trajectory, resample, discretize, score.
pub fn evaluate_maze_video(
    frames: &FrameSequence,
    spec: &MazeSpec,
    params: &MazeEvalParams,
) -> Result<MazeEvalResult, EvalMazeError> {
    let golden_actions =
        solve_shortest_path(spec).map_err(|e| EvalMazeError::InvalidMaze(e.to_string()))?;
    let golden_cells = spec
        .replay(&golden_actions)
        .map_err(|e| EvalMazeError::InvalidMaze(e.to_string()))?;
    let background = build_background(spec, frames.width(), frames.height());
    let geom = BoardGeom::for_spec(spec, frames.width(), frames.height());
    let mut all_tags: BTreeSet<String> = BTreeSet::new();

    let trace = match extract_agent_trajectory(frames, &background, spec, params) {
        Ok(t) => t,
        Err(EvalMazeError::TrackingFailure { gaps, total }) => {
            all_tags.insert(tags::KINEMATIC_INCONSISTENCY.to_string());
            return Ok(MazeEvalResult {
                em: 0,
                pr: 0.0,
                failure_tags: all_tags.into_iter().collect(),
                cells: Vec::new(),
                golden_cells,
                trace_samples: 0,
                trace_gaps: gaps.min(total),
            });
        }
        Err(e) => return Err(e),
    };
    if trace.truncated_at.is_some() {
        all_tags.insert(tags::KINEMATIC_INCONSISTENCY.to_string());
    }
    if trace.samples.is_empty() {
        return Ok(MazeEvalResult {
            em: 0,
            pr: 0.0,
            failure_tags: all_tags.into_iter().collect(),
            cells: Vec::new(),
            golden_cells,
            trace_samples: 0,
            trace_gaps: trace.gaps.len(),
        });
    }
    let polyline: Vec<Point2> = trace
        .samples
        .iter()
        .map(|s| Point2::new(s.centroid.0, s.centroid.1))
        .collect();
    let m = (params.resample_per_step * golden_actions.len()).max(2);
    let resampled = resample_by_arclength(&polyline, m);
    let (cells, cell_tags) = trace_to_cells(&resampled, spec, &geom);
    all_tags.extend(cell_tags);
    let (em, pr, score_tags) = score_em_pr(&cells, spec, &golden_cells);
    all_tags.extend(score_tags);
    // A truncated or tagged run can never be an exact match.
    let em = if all_tags.is_empty() { em } else { 0 };
    Ok(MazeEvalResult {
        em,
        pr,
        failure_tags: all_tags.into_iter().collect(),
        cells: cells.cells,
        golden_cells,
        trace_samples: trace.samples.len(),
        trace_gaps: trace.gaps.len(),
    })
}

/// Golden actions for `spec`; exposed for harness reporting.
pub fn golden_actions(spec: &MazeSpec) -> Result<ActionSeq, EvalMazeError> {
    solve_shortest_path(spec).map_err(|e| EvalMazeError::InvalidMaze(e.to_string()))
}
