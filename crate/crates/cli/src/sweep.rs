//! Frame-budget sweeps: re-render golden maze videos under modified
//! schedules and re-score them, one cell per (axis value, split). With
//! golden candidates the curves double as an end-to-end re-timing check.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use fpb_core::eval_maze::evaluate_maze_video;
use fpb_core::maze::{synthesize_solution_video, FrameSchedule, CANVAS_H, CANVAS_W};
use fpb_core::video_io::{sig6, InstanceManifest, SplitTag, TaskBody};

use crate::svg::LinePlot;
use crate::{load_dataset, runtime, usage, CliError, RunContext};

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Dataset directory; only maze instances participate.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for sweep.csv and sweep.svg.
    #[arg(long)]
    pub out: PathBuf,
    /// Sweep axis: total_frames or kappa.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated axis values.
    #[arg(long)]
    pub values: String,
    /// Comma-separated split tags; default: every split present.
    #[arg(long)]
    pub splits: Option<String>,
    /// Cap on instances per cell; default: all in the split.
    #[arg(long)]
    pub instances_per_cell: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    TotalFrames,
    Kappa,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "total_frames" => Ok(SweepAxis::TotalFrames),
            "kappa" => Ok(SweepAxis::Kappa),
            other => Err(usage(format!(
                "unknown axis {other:?}; expected total_frames or kappa"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TotalFrames => "total_frames",
            SweepAxis::Kappa => "kappa",
        }
    }
}

/// Holds shared by every swept schedule, mirroring the training default.
const SWEEP_HOLD: u32 = 4;

pub fn parse_values(axis: SweepAxis, s: &str) -> Result<Vec<u32>, CliError> {
    let mut values = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: u32 = part
            .parse()
            .map_err(|_| usage(format!("axis value {part:?} is not a positive integer")))?;
        if v == 0 {
            return Err(usage("axis values must be positive"));
        }
        if axis == SweepAxis::Kappa && v < 3 {
            return Err(usage(format!("kappa values must be at least 3, got {v}")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(usage("--values must name at least one axis value"));
    }
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

struct CellRow {
    value: u32,
    split: SplitTag,
    instances: usize,
    mean_em: Option<f64>,
    mean_pr: Option<f64>,
    mean_motion: Option<f64>,
    note: String,
}

impl CellRow {
    fn invalid(value: u32, split: SplitTag, instances: usize, note: String) -> Self {
        CellRow {
            value,
            split,
            instances,
            mean_em: None,
            mean_pr: None,
            mean_motion: None,
            note: note.replace([',', '\n'], " "),
        }
    }

    fn valid(&self) -> bool {
        self.mean_pr.is_some()
    }
}

fn sweep_cell(
    ctx: &RunContext,
    axis: SweepAxis,
    value: u32,
    split: SplitTag,
    instances: &[&InstanceManifest],
) -> CellRow {
    if instances.is_empty() {
        return CellRow::invalid(value, split, 0, "no instances in split".into());
    }
    let mut em_sum = 0.0;
    let mut pr_sum = 0.0;
    let mut motion_sum = 0.0;
    for m in instances {
        let TaskBody::Maze { spec, actions, .. } = &m.body else {
            unreachable!("cells are built from maze instances");
        };
        let steps = actions.len();
        let schedule = match axis {
            SweepAxis::TotalFrames => FrameSchedule::fixed_total(value, SWEEP_HOLD),
            SweepAxis::Kappa => FrameSchedule::per_step(value, steps, SWEEP_HOLD, SWEEP_HOLD),
        };
        let resolved = match schedule.resolve(steps) {
            Ok(r) => r,
            Err(e) => {
                return CellRow::invalid(
                    value,
                    split,
                    instances.len(),
                    format!("{}: {e}", m.instance_id),
                )
            }
        };
        let expected_total = match axis {
            SweepAxis::TotalFrames => value,
            SweepAxis::Kappa => SWEEP_HOLD + value * steps as u32 + SWEEP_HOLD,
        };
        if resolved.total_frames != expected_total {
            return CellRow::invalid(
                value,
                split,
                instances.len(),
                format!(
                    "{}: schedule arithmetic: {} frames, expected {expected_total}",
                    m.instance_id, resolved.total_frames
                ),
            );
        }
        let frames = match synthesize_solution_video(spec, actions, &schedule, CANVAS_W, CANVAS_H)
        {
            Ok(f) => f,
            Err(e) => {
                return CellRow::invalid(
                    value,
                    split,
                    instances.len(),
                    format!("{}: {e}", m.instance_id),
                )
            }
        };
        match evaluate_maze_video(&frames, spec, &ctx.config.maze) {
            Ok(r) => {
                em_sum += f64::from(r.em);
                pr_sum += r.pr;
                motion_sum += f64::from(resolved.motion_frames);
            }
            Err(e) => {
                return CellRow::invalid(
                    value,
                    split,
                    instances.len(),
                    format!("{}: {e}", m.instance_id),
                )
            }
        }
    }
    let n = instances.len() as f64;
    CellRow {
        value,
        split,
        instances: instances.len(),
        mean_em: Some(em_sum / n),
        mean_pr: Some(pr_sum / n),
        mean_motion: Some(motion_sum / n),
        note: String::new(),
    }
}

fn sweep_csv(axis: SweepAxis, rows: &[CellRow]) -> String {
    let mut out =
        String::from("axis,value,split,instances,mean_em,mean_pr,mean_motion_frames,valid,note\n");
    for row in rows {
        let fmt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            axis.name(),
            row.value,
            row.split.name(),
            row.instances,
            fmt(row.mean_em),
            fmt(row.mean_pr),
            fmt(row.mean_motion),
            row.valid(),
            row.note
        ));
    }
    out
}

pub fn cmd_sweep(ctx: &RunContext, args: &SweepArgs) -> Result<(), CliError> {
    let axis = SweepAxis::parse(&args.axis)?;
    let values = parse_values(axis, &args.values)?;
    let dataset = load_dataset(&args.dataset)?;
    let mazes: Vec<&InstanceManifest> = dataset
        .iter()
        .map(|(_, m)| m)
        .filter(|m| matches!(m.body, TaskBody::Maze { .. }))
        .collect();
    if mazes.is_empty() {
        return Err(runtime("sweep needs at least one maze instance"));
    }

    let splits: Vec<SplitTag> = match &args.splits {
        Some(list) => {
            let mut tags = Vec::new();
            for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let tag = SplitTag::parse(part)
                    .ok_or_else(|| usage(format!("unknown split {part:?}")))?;
                if !tags.contains(&tag) {
                    tags.push(tag);
                }
            }
            if tags.is_empty() {
                return Err(usage("--splits must name at least one split"));
            }
            tags
        }
        None => {
            let present: BTreeSet<SplitTag> = mazes.iter().map(|m| m.split).collect();
            present.into_iter().collect()
        }
    };

    let mut groups: BTreeMap<SplitTag, Vec<&InstanceManifest>> = BTreeMap::new();
    for m in &mazes {
        groups.entry(m.split).or_default().push(m);
    }
    let cap = args.instances_per_cell.unwrap_or(usize::MAX);

    let cells: Vec<(u32, SplitTag)> = values
        .iter()
        .flat_map(|&v| splits.iter().map(move |&s| (v, s)))
        .collect();
    let mut rows: Vec<CellRow> = cells
        .par_iter()
        .map(|&(value, split)| {
            let insts: Vec<&InstanceManifest> = groups
                .get(&split)
                .map(|v| v.iter().copied().take(cap).collect())
                .unwrap_or_default();
            sweep_cell(ctx, axis, value, split, &insts)
        })
        .collect();
    rows.sort_by_key(|r| (r.value, r.split));

    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("sweep.csv"), sweep_csv(axis, &rows))?;

    let mut plot = LinePlot::new(
        format!("golden re-timing sweep over {}", axis.name()),
        axis.name(),
        "mean path ratio",
    );
    for &split in &splits {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.split == split)
            .filter_map(|r| r.mean_pr.map(|pr| (f64::from(r.value), pr)))
            .collect();
        plot.add_series(split.name(), pts);
    }
    fs::write(args.out.join("sweep.svg"), plot.render())?;

    let invalid = rows.iter().filter(|r| !r.valid()).count();
    println!(
        "swept {} cells ({} invalid) into {}",
        rows.len(),
        invalid,
        args.out.display()
    );
    Ok(())
}
