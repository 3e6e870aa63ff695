//! Scoring a directory of candidate videos against a dataset. Missing
//! candidates score zero so split means stay comparable; unreadable ones are
//! recorded as errors and fail the run after every instance is attempted.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use fpb_core::eval_maze::evaluate_maze_video;
use fpb_core::eval_tangram::{evaluate_tangram_video, ConsistencyReference};
use fpb_core::video_io::{
    read_frames, write_aggregate, write_report, EvalReport, FrameSequence, InstanceManifest,
    TaskBody,
};

use crate::{golden_dir, load_dataset, runtime, CliError, RunContext};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset directory produced by generate.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Candidate root holding <instance_id>/frame_%05d.png directories.
    /// Defaults to each instance's own golden render.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// Output directory for per-instance reports and aggregate.csv.
    #[arg(long)]
    pub out: PathBuf,
}

fn candidate_dir(args: &EvaluateArgs, inst_dir: &Path, instance_id: &str) -> PathBuf {
    match &args.candidates {
        Some(root) => root.join(instance_id),
        None => golden_dir(inst_dir),
    }
}

fn has_frames(dir: &Path) -> bool {
    std::fs::read_dir(dir)
        .map(|mut it| {
            it.any(|e| {
                e.ok()
                    .and_then(|e| e.file_name().to_str().map(|n| {
                        n.starts_with("frame_") && n.ends_with(".png")
                    }))
                    .unwrap_or(false)
            })
        })
        .unwrap_or(false)
}

pub fn evaluate_instance(
    ctx: &RunContext,
    inst_dir: &Path,
    m: &InstanceManifest,
    cand_dir: &Path,
) -> EvalReport {
    let task = m.task_name();
    if !has_frames(cand_dir) {
        return EvalReport::missing(&m.instance_id, task, m.split);
    }
    let frames = match read_frames(cand_dir) {
        Ok(f) => f,
        Err(e) => return EvalReport::errored(&m.instance_id, task, m.split, e.to_string()),
    };
    match &m.body {
        TaskBody::Maze { spec, .. } => {
            match evaluate_maze_video(&frames, spec, &ctx.config.maze) {
                Ok(r) => EvalReport::maze(&m.instance_id, m.split, &r),
                Err(e) => EvalReport::errored(&m.instance_id, task, m.split, e.to_string()),
            }
        }
        TaskBody::Tangram { scene, .. } => {
            let golden = golden_dir(inst_dir);
            let golden_frames: Option<FrameSequence> = if golden != cand_dir && has_frames(&golden)
            {
                read_frames(&golden).ok()
            } else {
                None
            };
            let reference = match &golden_frames {
                Some(seq) => ConsistencyReference::Golden(seq),
                None => ConsistencyReference::Static,
            };
            match evaluate_tangram_video(&frames, scene, &ctx.config.tangram, &reference) {
                Ok(r) => EvalReport::tangram(&m.instance_id, m.split, &r),
                Err(e) => EvalReport::errored(&m.instance_id, task, m.split, e.to_string()),
            }
        }
    }
}

pub fn cmd_evaluate(ctx: &RunContext, args: &EvaluateArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.dataset)?;
    let mut reports: Vec<EvalReport> = Vec::new();
    dataset
        .par_iter()
        .map(|(inst_dir, m)| {
            let cand = candidate_dir(args, inst_dir, &m.instance_id);
            evaluate_instance(ctx, inst_dir, m, &cand)
        })
        .collect_into_vec(&mut reports);
    reports.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    for r in &reports {
        write_report(r, &args.out.join(&r.instance_id).join("report.json"))?;
    }
    write_aggregate(&reports, &args.out.join("aggregate.csv"))?;
    let missing = reports
        .iter()
        .filter(|r| r.failure_tags.iter().any(|t| t == "missing"))
        .count();
    let errored: Vec<&str> = reports
        .iter()
        .filter(|r| r.error.is_some())
        .map(|r| r.instance_id.as_str())
        .collect();
    println!(
        "evaluated {} instances ({missing} missing, {} errored) into {}",
        reports.len(),
        errored.len(),
        args.out.display()
    );
    if !errored.is_empty() {
        return Err(runtime(format!(
            "{} instances could not be scored: {}",
            errored.len(),
            errored.join(", ")
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::dataset::{cmd_generate, GenerateArgs};
    use crate::synthesize::{cmd_synthesize, SynthesizeArgs};
    use std::fs;

    fn ctx() -> RunContext {
        RunContext {
            seed: 21,
            workers: 2,
            config: RunConfig::default(),
        }
    }

    fn maze_dataset(out: &Path, count: usize) {
        cmd_generate(
            &ctx(),
            &GenerateArgs {
                task: "maze".into(),
                out: out.to_path_buf(),
                tier: "custom".into(),
                count: Some(count),
                sizes: Some("3".into()),
                path_range: Some("2,12".into()),
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
    }

    #[test]
    fn golden_videos_score_perfectly() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let out = dir.path().join("out");
        maze_dataset(&data, 2);
        cmd_evaluate(
            &ctx(),
            &EvaluateArgs {
                dataset: data.clone(),
                candidates: None,
                out: out.clone(),
            },
        )
        .unwrap();
        let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
        for (_, m) in load_dataset(&data).unwrap() {
            let report =
                fpb_core::video_io::read_report(&out.join(&m.instance_id).join("report.json"))
                    .unwrap();
            assert_eq!(report.metric("em"), Some(1.0), "{}", m.instance_id);
            assert_eq!(report.metric("pr"), Some(1.0));
            assert!(agg.contains(&m.instance_id));
        }
        assert!(agg.lines().last().unwrap().starts_with("mean,maze,iid,1,1"));
    }

    #[test]
    fn missing_candidate_scores_zero_but_run_succeeds() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let out = dir.path().join("out");
        maze_dataset(&data, 2);
        let cands = dir.path().join("cands");
        let instances = load_dataset(&data).unwrap();
        // Copy only the first instance's golden frames.
        let (first_dir, first) = &instances[0];
        let src = golden_dir(first_dir);
        let dst = cands.join(&first.instance_id);
        fs::create_dir_all(&dst).unwrap();
        for e in fs::read_dir(&src).unwrap() {
            let e = e.unwrap();
            fs::copy(e.path(), dst.join(e.file_name())).unwrap();
        }
        cmd_evaluate(
            &ctx(),
            &EvaluateArgs {
                dataset: data.clone(),
                candidates: Some(cands),
                out: out.clone(),
            },
        )
        .unwrap();
        let (_, second) = &instances[1];
        let report =
            fpb_core::video_io::read_report(&out.join(&second.instance_id).join("report.json"))
                .unwrap();
        assert_eq!(report.metric("em"), Some(0.0));
        assert_eq!(report.failure_tags, vec!["missing".to_string()]);
        assert!(report.error.is_none());
    }

    #[test]
    fn unreadable_candidate_errors_and_fails_run() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        let out = dir.path().join("out");
        maze_dataset(&data, 1);
        let (inst_dir, m) = load_dataset(&data).unwrap().remove(0);
        let cands = dir.path().join("cands");
        let dst = cands.join(&m.instance_id);
        fs::create_dir_all(&dst).unwrap();
        fs::write(dst.join("frame_00000.png"), b"not a png").unwrap();
        let _ = inst_dir;
        let err = cmd_evaluate(
            &ctx(),
            &EvaluateArgs {
                dataset: data.clone(),
                candidates: Some(cands),
                out: out.clone(),
            },
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let report = fpb_core::video_io::read_report(&out.join(&m.instance_id).join("report.json"))
            .unwrap();
        assert!(report.error.is_some());
        assert_eq!(report.metric("em"), Some(0.0));
        assert!(out.join("aggregate.csv").is_file());
    }
}
