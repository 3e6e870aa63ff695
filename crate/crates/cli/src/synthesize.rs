//! Golden-video rendering for a generated dataset. Idempotent: complete
//! golden directories are skipped unless --force, partially written ones are
//! refused so a crashed run cannot silently pass off truncated clips.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use fpb_core::maze::{synthesize_solution_video, FrameSchedule, CANVAS_H, CANVAS_W};
use fpb_core::tangram::synthesize_assembly_video;
use fpb_core::video_io::{frame_name, write_frames, InstanceManifest, TaskBody};

use crate::{golden_dir, load_dataset, runtime, usage, CliError, RunContext};

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// Dataset directory produced by generate.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Re-render even where golden frames already exist.
    #[arg(long)]
    pub force: bool,
    /// Override every schedule with a fixed frame total.
    #[arg(long)]
    pub total_frames: Option<u32>,
    /// Override maze schedules with per-step pacing (frames per move).
    #[arg(long)]
    pub kappa: Option<u32>,
}

/// What synthesis would produce for this manifest, after CLI overrides.
pub fn effective_plan(
    m: &InstanceManifest,
    total_override: Option<u32>,
    kappa_override: Option<u32>,
) -> Result<(TaskBody, usize), CliError> {
    match &m.body {
        TaskBody::Maze {
            spec,
            actions,
            schedule,
        } => {
            let schedule = match (total_override, kappa_override) {
                (Some(_), Some(_)) => {
                    return Err(usage("--total-frames and --kappa are mutually exclusive"))
                }
                (Some(total), None) => FrameSchedule::fixed_total(total, schedule.lead_hold),
                (None, Some(kappa)) => FrameSchedule::per_step(
                    kappa,
                    actions.len(),
                    schedule.lead_hold,
                    schedule.tail_hold.max(schedule.lead_hold),
                ),
                (None, None) => schedule.clone(),
            };
            let resolved = schedule
                .resolve(actions.len())
                .map_err(|e| runtime(format!("{}: {e}", m.instance_id)))?;
            Ok((
                TaskBody::Maze {
                    spec: spec.clone(),
                    actions: actions.clone(),
                    schedule,
                },
                resolved.total_frames as usize,
            ))
        }
        TaskBody::Tangram {
            scene,
            total_frames,
        } => {
            if kappa_override.is_some() {
                return Err(usage("--kappa only applies to maze schedules"));
            }
            let total = total_override.map(|t| t as usize).unwrap_or(*total_frames);
            Ok((
                TaskBody::Tangram {
                    scene: scene.clone(),
                    total_frames: total,
                },
                total,
            ))
        }
    }
}

/// Complete iff exactly frames 0..expected exist; Partial lists what's wrong.
enum GoldenState {
    Missing,
    Complete,
    Partial(String),
}

fn golden_state(dir: &Path, expected: usize) -> Result<GoldenState, CliError> {
    if !dir.exists() {
        return Ok(GoldenState::Missing);
    }
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().map(str::to_owned))
        .filter(|n| n.starts_with("frame_") && n.ends_with(".png"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Ok(GoldenState::Missing);
    }
    let want: Vec<String> = (0..expected).map(frame_name).collect();
    if names == want {
        return Ok(GoldenState::Complete);
    }
    Ok(GoldenState::Partial(format!(
        "{} frames on disk, expected {expected}",
        names.len()
    )))
}

pub fn render_body(body: &TaskBody, total: usize) -> Result<fpb_core::video_io::FrameSequence, CliError> {
    match body {
        TaskBody::Maze {
            spec,
            actions,
            schedule,
        } => synthesize_solution_video(spec, actions, schedule, CANVAS_W, CANVAS_H)
            .map_err(|e| runtime(e.to_string())),
        TaskBody::Tangram { scene, .. } => {
            synthesize_assembly_video(scene, total).map_err(|e| runtime(e.to_string()))
        }
    }
}

pub fn cmd_synthesize(_ctx: &RunContext, args: &SynthesizeArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.dataset)?;
    let mut plans = Vec::with_capacity(dataset.len());
    let mut partial = Vec::new();
    let mut skipped = 0usize;
    for (dir, m) in &dataset {
        let (body, total) = effective_plan(m, args.total_frames, args.kappa)?;
        let golden = golden_dir(dir);
        match golden_state(&golden, total)? {
            GoldenState::Complete if !args.force => skipped += 1,
            GoldenState::Partial(why) if !args.force => {
                partial.push(format!("{}: {why}", m.instance_id))
            }
            _ => plans.push((m.instance_id.clone(), golden, body, total)),
        }
    }
    if !partial.is_empty() {
        return Err(runtime(format!(
            "refusing to overwrite partially synthesized instances (re-run with --force):\n  {}",
            partial.join("\n  ")
        )));
    }
    let results: Vec<Result<(), CliError>> = plans
        .par_iter()
        .map(|(id, golden, body, total)| {
            let frames = render_body(body, *total)
                .map_err(|e| runtime(format!("{id}: {e}")))?;
            write_frames(&frames, golden).map_err(|e| runtime(format!("{id}: {e}")))?;
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    println!(
        "synthesized {} instances, skipped {skipped} already complete",
        plans.len()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::dataset::{cmd_generate, GenerateArgs};
    use fpb_core::video_io::read_frames;

    fn ctx() -> RunContext {
        RunContext {
            seed: 11,
            workers: 2,
            config: RunConfig::default(),
        }
    }

    fn small_maze_dataset(out: &Path) {
        let args = GenerateArgs {
            task: "maze".into(),
            out: out.to_path_buf(),
            tier: "custom".into(),
            count: Some(2),
            sizes: Some("3,4".into()),
            path_range: Some("2,12".into()),
            split: Some("iid".into()),
            layouts: None,
            variants: String::new(),
        };
        cmd_generate(&ctx(), &args).unwrap();
    }

    fn synth_args(dataset: &Path) -> SynthesizeArgs {
        SynthesizeArgs {
            dataset: dataset.to_path_buf(),
            force: false,
            total_frames: None,
            kappa: None,
        }
    }

    #[test]
    fn synthesize_writes_expected_frame_counts() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        cmd_synthesize(&ctx(), &synth_args(dir.path())).unwrap();
        for (inst_dir, m) in load_dataset(dir.path()).unwrap() {
            let frames = read_frames(&golden_dir(&inst_dir)).unwrap();
            let TaskBody::Maze { actions, schedule, .. } = &m.body else { panic!() };
            let want = schedule.resolve(actions.len()).unwrap().total_frames as usize;
            assert_eq!(frames.count(), want);
        }
    }

    #[test]
    fn second_run_skips_complete_instances() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        cmd_synthesize(&ctx(), &synth_args(dir.path())).unwrap();
        let stamp = |p: &Path| fs::metadata(p).unwrap().modified().unwrap();
        let sample = load_dataset(dir.path()).unwrap()[0].0.clone();
        let frame0 = golden_dir(&sample).join(frame_name(0));
        let before = stamp(&frame0);
        cmd_synthesize(&ctx(), &synth_args(dir.path())).unwrap();
        assert_eq!(stamp(&frame0), before);
    }

    #[test]
    fn partial_golden_dir_is_refused_without_force() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        cmd_synthesize(&ctx(), &synth_args(dir.path())).unwrap();
        let victim = load_dataset(dir.path()).unwrap()[0].0.clone();
        fs::remove_file(golden_dir(&victim).join(frame_name(3))).unwrap();
        let err = cmd_synthesize(&ctx(), &synth_args(dir.path())).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("partially"), "{err}");
        let mut force = synth_args(dir.path());
        force.force = true;
        cmd_synthesize(&ctx(), &force).unwrap();
        read_frames(&golden_dir(&victim)).unwrap();
    }

    #[test]
    fn total_frames_override_changes_clip_length() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        let mut args = synth_args(dir.path());
        args.total_frames = Some(41);
        cmd_synthesize(&ctx(), &args).unwrap();
        for (inst_dir, _) in load_dataset(dir.path()).unwrap() {
            assert_eq!(read_frames(&golden_dir(&inst_dir)).unwrap().count(), 41);
        }
    }

    #[test]
    fn kappa_override_uses_per_step_totals() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        let mut args = synth_args(dir.path());
        args.kappa = Some(5);
        cmd_synthesize(&ctx(), &args).unwrap();
        for (inst_dir, m) in load_dataset(dir.path()).unwrap() {
            let TaskBody::Maze { actions, schedule, .. } = &m.body else { panic!() };
            let want = schedule.lead_hold
                + 5 * actions.len() as u32
                + schedule.tail_hold.max(schedule.lead_hold);
            assert_eq!(
                read_frames(&golden_dir(&inst_dir)).unwrap().count(),
                want as usize
            );
        }
    }

    #[test]
    fn conflicting_overrides_are_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        small_maze_dataset(dir.path());
        let mut args = synth_args(dir.path());
        args.total_frames = Some(81);
        args.kappa = Some(5);
        let err = cmd_synthesize(&ctx(), &args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
