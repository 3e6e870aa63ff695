//! Dataset generation: maze tier tables and tangram layout-directory
//! conversion. Every instance gets its own directory with a manifest and the
//! initial conditioning frame.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rand::Rng;
use rayon::prelude::*;

use fpb_core::geom::Point2;
use fpb_core::maze::{
    render_maze_frame, sample_maze, FrameSchedule, IconSplit, CANVAS_H, CANVAS_W,
    SEEN_ICON_COUNT, UNSEEN_ICON_COUNT,
};
use fpb_core::rng::rng_for;
use fpb_core::tangram::{
    build_scene, parse_layout, AssemblyRenderer, LayoutFile, TangramVariant,
    DEFAULT_FADE_IN_FRAMES, DEFAULT_ROTATION_FRAMES, TRANSLATION_FRAME_CHOICES,
};
use fpb_core::video_io::{write_manifest, write_png, InstanceManifest, SplitTag};

use crate::{runtime, usage, CliError, RunContext};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Task family: maze or tangram.
    #[arg(long)]
    pub task: String,
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Maze tier preset: test, train, unseen-icon, or custom.
    #[arg(long, default_value = "test")]
    pub tier: String,
    /// Instances per tier config (defaults: 250 test, 1000 train).
    #[arg(long)]
    pub count: Option<usize>,
    /// Custom tier: comma-separated square board sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Custom tier: lo,hi solution-length window.
    #[arg(long)]
    pub path_range: Option<String>,
    /// Split tag (custom maze tiers and tangram; default iid).
    #[arg(long)]
    pub split: Option<String>,
    /// Tangram: directory of layout JSON files.
    #[arg(long)]
    pub layouts: Option<PathBuf>,
    /// Tangram: comma-separated variants to emit per layout.
    #[arg(long, default_value = "fade_in,rotation,translation")]
    pub variants: String,
}

#[derive(Debug, Clone)]
struct MazeTier {
    label: String,
    split: SplitTag,
    size: u32,
    path: (usize, usize),
    count: usize,
    /// Keys the layout stream; tiers sharing a group, size, and path window
    /// reproduce the same boards (the unseen-icon set mirrors the test set).
    group: &'static str,
    pool: IconSplit,
}

fn tier_label(split: SplitTag, size: u32, group: &str) -> String {
    let head = if group == "train" { "train" } else { split.name() };
    format!("{head}_{size}x{size}")
}

fn maze_tiers(args: &GenerateArgs) -> Result<Vec<MazeTier>, CliError> {
    let mut tiers = Vec::new();
    let mut push = |split: SplitTag, size: u32, path: (usize, usize), count, group, pool| {
        tiers.push(MazeTier {
            label: tier_label(split, size, group),
            split,
            size,
            path,
            count,
            group,
            pool,
        });
    };
    match args.tier.as_str() {
        "test" => {
            let n = args.count.unwrap_or(250);
            for size in 3..=6 {
                push(SplitTag::Iid, size, (2, 12), n, "test", IconSplit::Seen);
            }
            for size in 7..=8 {
                push(SplitTag::SpatialOod, size, (2, 12), n, "test", IconSplit::Seen);
            }
            for size in 5..=6 {
                push(SplitTag::TemporalOod, size, (13, 18), n, "test", IconSplit::Seen);
            }
            for size in 7..=8 {
                push(SplitTag::BothOod, size, (13, 18), n, "test", IconSplit::Seen);
            }
        }
        "train" => {
            let n = args.count.unwrap_or(1000);
            for size in 3..=6 {
                push(SplitTag::Iid, size, (2, 12), n, "train", IconSplit::Seen);
            }
        }
        "unseen-icon" => {
            // Same group and windows as the test iid tiers, so the boards are
            // identical and only the icons differ.
            let n = args.count.unwrap_or(250);
            for size in 3..=6 {
                push(SplitTag::UnseenIcon, size, (2, 12), n, "test", IconSplit::Unseen);
            }
        }
        "custom" => {
            let sizes = args
                .sizes
                .as_deref()
                .ok_or_else(|| usage("custom tier needs --sizes"))?;
            let range = args
                .path_range
                .as_deref()
                .ok_or_else(|| usage("custom tier needs --path-range lo,hi"))?;
            let (lo, hi) = range
                .split_once(',')
                .ok_or_else(|| usage(format!("--path-range expects lo,hi, got {range:?}")))?;
            let path: (usize, usize) = (
                lo.trim().parse().map_err(|_| usage("bad --path-range lo"))?,
                hi.trim().parse().map_err(|_| usage("bad --path-range hi"))?,
            );
            let split = match args.split.as_deref() {
                None => SplitTag::Iid,
                Some(s) => SplitTag::parse(s)
                    .ok_or_else(|| usage(format!("unknown split {s:?}")))?,
            };
            let pool = if split == SplitTag::UnseenIcon {
                IconSplit::Unseen
            } else {
                IconSplit::Seen
            };
            let n = args.count.unwrap_or(250);
            for s in sizes.split(',') {
                let size: u32 = s
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("bad size {s:?} in --sizes")))?;
                push(split, size, path, n, "custom", pool);
            }
        }
        other => {
            return Err(usage(format!(
                "unknown tier {other:?}; expected test, train, unseen-icon, or custom"
            )))
        }
    }
    Ok(tiers)
}

fn generate_maze_instance(
    ctx: &RunContext,
    tier: &MazeTier,
    idx: usize,
    out: &Path,
) -> Result<String, CliError> {
    let stream = format!(
        "maze.{}.{}x{}.{}-{}.{idx}",
        tier.group, tier.size, tier.size, tier.path.0, tier.path.1
    );
    let instance_seed: u64 = rng_for(ctx.seed, &stream).gen();
    let icon_id = match tier.pool {
        IconSplit::Seen => rng_for(ctx.seed, &format!("{stream}.icon.seen"))
            .gen_range(0..SEEN_ICON_COUNT),
        IconSplit::Unseen => {
            SEEN_ICON_COUNT
                + rng_for(ctx.seed, &format!("{stream}.icon.unseen"))
                    .gen_range(0..UNSEEN_ICON_COUNT)
        }
    };
    let sampled = sample_maze(tier.size, tier.size, tier.path, icon_id, instance_seed)
        .map_err(|e| runtime(format!("tier {} is infeasible: {e}", tier.label)))?;
    let instance_id = format!("maze_{}_{idx:05}", tier.label);
    let manifest = InstanceManifest::maze(
        &instance_id,
        tier.split,
        sampled.spec.clone(),
        sampled.actions,
        FrameSchedule::default_maze(),
    );
    manifest
        .validate()
        .map_err(|e| runtime(format!("{instance_id}: generated an invalid manifest: {e}")))?;
    let dir = out.join(&instance_id);
    write_manifest(&manifest, &dir.join("manifest.json"))?;
    let start = Point2::new(sampled.spec.start.c as f64, sampled.spec.start.r as f64);
    let init = render_maze_frame(&sampled.spec, start, CANVAS_W, CANVAS_H);
    write_png(&init, &dir.join("init.png"))?;
    Ok(instance_id)
}

pub fn parse_variant(s: &str) -> Result<TangramVariant, CliError> {
    match s {
        "fade_in" => Ok(TangramVariant::FadeIn),
        "rotation" => Ok(TangramVariant::Rotation),
        "translation" => Ok(TangramVariant::Translation),
        other => Err(usage(format!(
            "unknown variant {other:?}; expected fade_in, rotation, or translation"
        ))),
    }
}

pub fn default_total_frames(variant: TangramVariant, seed: u64, stream: &str) -> usize {
    match variant {
        TangramVariant::FadeIn => DEFAULT_FADE_IN_FRAMES,
        TangramVariant::Rotation => DEFAULT_ROTATION_FRAMES,
        TangramVariant::Translation => {
            let i = rng_for(seed, stream).gen_range(0..TRANSLATION_FRAME_CHOICES.len());
            TRANSLATION_FRAME_CHOICES[i]
        }
    }
}

fn layout_files(dir: &Path) -> Result<Vec<(String, LayoutFile)>, CliError> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| runtime(format!("layouts dir {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(runtime(format!("no .json layouts under {}", dir.display())));
    }
    let mut layouts = Vec::with_capacity(names.len());
    for path in names {
        let stem: String = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("layout")
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
            .collect();
        let text = fs::read_to_string(&path)?;
        let layout = parse_layout(&text)
            .map_err(|e| runtime(format!("layout {}: {e}", path.display())))?;
        layouts.push((stem, layout));
    }
    Ok(layouts)
}

fn generate_tangram_instance(
    ctx: &RunContext,
    stem: &str,
    layout: &LayoutFile,
    variant: TangramVariant,
    split: SplitTag,
    out: &Path,
) -> Result<String, CliError> {
    let vname = match variant {
        TangramVariant::FadeIn => "fade_in",
        TangramVariant::Rotation => "rotation",
        TangramVariant::Translation => "translation",
    };
    let stream = format!("tangram.{vname}.{stem}");
    let instance_seed: u64 = rng_for(ctx.seed, &stream).gen();
    let total = default_total_frames(variant, ctx.seed, &format!("{stream}.frames"));
    let scene = build_scene(variant, layout, instance_seed)
        .map_err(|e| runtime(format!("layout {stem} ({vname}): {e}")))?;
    let instance_id = format!("tangram_{}_{vname}_{stem}", split.name());
    let manifest = InstanceManifest::tangram(&instance_id, instance_seed, split, scene, total);
    manifest
        .validate()
        .map_err(|e| runtime(format!("{instance_id}: generated an invalid manifest: {e}")))?;
    let dir = out.join(&instance_id);
    write_manifest(&manifest, &dir.join("manifest.json"))?;
    let fpb_core::video_io::TaskBody::Tangram { scene, .. } = &manifest.body else {
        unreachable!()
    };
    let renderer = AssemblyRenderer::new(scene, total)
        .map_err(|e| runtime(format!("{instance_id}: {e}")))?;
    write_png(&renderer.render_frame(0), &dir.join("init.png"))?;
    Ok(instance_id)
}

pub fn cmd_generate(ctx: &RunContext, args: &GenerateArgs) -> Result<(), CliError> {
    match args.task.as_str() {
        "maze" => {
            let tiers = maze_tiers(args)?;
            let jobs: Vec<(usize, usize)> = tiers
                .iter()
                .enumerate()
                .flat_map(|(ti, t)| (0..t.count).map(move |i| (ti, i)))
                .collect();
            let mut results: Vec<Result<String, CliError>> = Vec::new();
            jobs.par_iter()
                .map(|&(ti, i)| generate_maze_instance(ctx, &tiers[ti], i, &args.out))
                .collect_into_vec(&mut results);
            let mut total = 0usize;
            for r in results {
                r?;
                total += 1;
            }
            for t in &tiers {
                println!("tier {}: {} instances", t.label, t.count);
            }
            println!("generated {total} maze instances under {}", args.out.display());
            Ok(())
        }
        "tangram" => {
            let layouts_dir = args
                .layouts
                .as_deref()
                .ok_or_else(|| usage("tangram generation needs --layouts <dir>"))?;
            let split = match args.split.as_deref() {
                None => SplitTag::Iid,
                Some(s) => match SplitTag::parse(s) {
                    Some(t @ (SplitTag::Iid | SplitTag::UnseenSilhouette)) => t,
                    _ => return Err(usage(format!("{s:?} is not a tangram split"))),
                },
            };
            let variants: Vec<TangramVariant> = args
                .variants
                .split(',')
                .map(|v| parse_variant(v.trim()))
                .collect::<Result<_, _>>()?;
            if variants.is_empty() {
                return Err(usage("--variants must name at least one variant"));
            }
            let layouts = layout_files(layouts_dir)?;
            let jobs: Vec<(usize, TangramVariant)> = layouts
                .iter()
                .enumerate()
                .flat_map(|(i, _)| variants.iter().map(move |&v| (i, v)))
                .collect();
            let mut results: Vec<Result<String, CliError>> = Vec::new();
            jobs.par_iter()
                .map(|&(i, v)| {
                    let (stem, layout) = &layouts[i];
                    generate_tangram_instance(ctx, stem, layout, v, split, &args.out)
                })
                .collect_into_vec(&mut results);
            let mut total = 0usize;
            for r in results {
                r?;
                total += 1;
            }
            println!(
                "generated {total} tangram instances ({} layouts x {} variants) under {}",
                layouts.len(),
                variants.len(),
                args.out.display()
            );
            Ok(())
        }
        other => Err(usage(format!("unknown task {other:?}; expected maze or tangram"))),
    }
}
