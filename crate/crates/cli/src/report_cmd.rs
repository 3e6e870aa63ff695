//! Report merging: collect per-instance report.json files into aggregate
//! tables, a failure-tag histogram, the consistency-success correlation, and
//! a per-split score plot.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use fpb_core::eval_tangram::consistency_success_correlation;
use fpb_core::video_io::{aggregate_csv, read_report, sig6, EvalReport};

use crate::svg::LinePlot;
use crate::{runtime, usage, CliError, RunContext};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of per-instance report directories (evaluate's --out).
    #[arg(long)]
    pub reports: PathBuf,
    /// Output directory for the merged files.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated outputs to write: csv, json, svg.
    #[arg(long, default_value = "csv,json,svg")]
    pub format: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Format {
    Csv,
    Json,
    Svg,
}

fn parse_formats(s: &str) -> Result<BTreeSet<Format>, CliError> {
    let mut formats = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        formats.insert(match part {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => {
                return Err(usage(format!(
                    "unknown format {other:?}; expected csv, json, or svg"
                )))
            }
        });
    }
    if formats.is_empty() {
        return Err(usage("--format must name at least one of csv, json, svg"));
    }
    Ok(formats)
}

/// Every */report.json directly under `dir`, sorted like the aggregate CSV.
pub fn load_reports(dir: &Path) -> Result<Vec<EvalReport>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| runtime(format!("reports dir {}: {e}", dir.display())))?;
    let mut reports = Vec::new();
    for entry in entries {
        let path = entry?.path().join("report.json");
        if path.is_file() {
            let report = read_report(&path)
                .map_err(|e| runtime(format!("report {}: {e}", path.display())))?;
            reports.push(report);
        }
    }
    if reports.is_empty() {
        return Err(runtime(format!(
            "no report.json files under {}",
            dir.display()
        )));
    }
    reports.sort_by(|a, b| {
        (a.task.as_str(), a.split, a.instance_id.as_str())
            .cmp(&(b.task.as_str(), b.split, b.instance_id.as_str()))
    });
    Ok(reports)
}

/// Failed instances (those carrying at least one failure tag) counted once
/// each, keyed by their first tag. Values sum to the failed-instance count.
pub fn first_tag_histogram(reports: &[EvalReport]) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for r in reports {
        if let Some(first) = r.failure_tags.first() {
            *hist.entry(first.clone()).or_insert(0) += 1;
        }
    }
    hist
}

/// Per-(task, split) metric means, formatted to six significant digits with
/// the same parse-then-round rule as the aggregate CSV mean rows.
pub fn group_means(reports: &[EvalReport]) -> BTreeMap<String, BTreeMap<String, String>> {
    let mut groups: BTreeMap<String, Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        groups
            .entry(format!("{}/{}", r.task, r.split.name()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            let names: BTreeSet<&str> =
                rs.iter().flat_map(|r| r.metrics.keys()).map(String::as_str).collect();
            let means = names
                .into_iter()
                .map(|name| {
                    let values: Vec<f64> = rs
                        .iter()
                        .filter_map(|r| r.metric(name))
                        .map(|v| sig6(v).parse::<f64>().unwrap())
                        .collect();
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    (name.to_string(), sig6(mean))
                })
                .collect();
            (key, means)
        })
        .collect()
}

/// (visual_consistency, strict_gc) pairs from scored tangram reports.
pub fn consistency_pairs(reports: &[EvalReport]) -> Vec<(f64, u8)> {
    reports
        .iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| {
            let vc = r.metric("visual_consistency")?;
            let strict = r.metric("strict_gc")?;
            Some((vc, strict as u8))
        })
        .collect()
}

fn histogram_csv(hist: &BTreeMap<String, usize>) -> String {
    let mut out = String::from("tag,count\n");
    for (tag, count) in hist {
        out.push_str(&format!("{tag},{count}\n"));
    }
    out
}

fn primary_metric(r: &EvalReport) -> Option<f64> {
    if r.task == "maze" {
        r.metric("pr")
    } else {
        r.metric("progress_gc")
    }
}

fn report_svg(reports: &[EvalReport]) -> String {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in reports {
        let key = format!("{}/{}", r.task, r.split.name());
        let points = series.entry(key).or_default();
        if let Some(v) = primary_metric(r) {
            points.push((points.len() as f64 + 1.0, v));
        }
    }
    let mut plot = LinePlot::new(
        "per-instance scores by split",
        "instance rank within split",
        "path ratio / progress",
    );
    for (name, points) in series {
        plot.add_series(name, points);
    }
    plot.render()
}

pub fn cmd_report(_ctx: &RunContext, args: &ReportArgs) -> Result<(), CliError> {
    let formats = parse_formats(&args.format)?;
    let reports = load_reports(&args.reports)?;
    fs::create_dir_all(&args.out)?;

    let hist = first_tag_histogram(&reports);
    let failed: usize = hist.values().sum();
    let pairs = consistency_pairs(&reports);
    let correlation = if pairs.is_empty() {
        Err("no scored tangram reports".to_string())
    } else {
        consistency_success_correlation(&pairs).map_err(|e| e.to_string())
    };

    if formats.contains(&Format::Csv) {
        fs::write(args.out.join("aggregate.csv"), aggregate_csv(&reports))?;
        fs::write(args.out.join("tag_histogram.csv"), histogram_csv(&hist))?;
    }
    if formats.contains(&Format::Json) {
        let doc = serde_json::json!({
            "schema_version": 1,
            "instances": reports.len(),
            "failed_instances": failed,
            "group_means": group_means(&reports),
            "tag_histogram": hist,
            "consistency_success_correlation": correlation.as_ref().ok().map(|&r| sig6(r)),
            "correlation_note": correlation.as_ref().err(),
        });
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| runtime(format!("aggregate json: {e}")))?;
        text.push('\n');
        fs::write(args.out.join("aggregate.json"), text)?;
    }
    if formats.contains(&Format::Svg) {
        fs::write(args.out.join("report.svg"), report_svg(&reports))?;
    }

    println!(
        "merged {} reports ({failed} failed) into {}",
        reports.len(),
        args.out.display()
    );
    match &correlation {
        Ok(r) => println!("consistency-success correlation: {}", sig6(*r)),
        Err(why) => println!("consistency-success correlation undefined: {why}"),
    }
    Ok(())
}
