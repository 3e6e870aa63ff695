//! Per-instance evaluation reports and the aggregate CSV that merges them.
//! A report stores full-precision metrics; the aggregate rounds every value
//! to six significant digits, and mean rows are computed from the rounded
//! row values so a reader can recompute them exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::manifest::{SplitTag, SCHEMA_VERSION};
use super::{Real, VideoIoError};
use crate::eval_maze::MazeEvalResult;
use crate::eval_tangram::TangramEvalResult;

pub const MAZE_METRICS: [&str; 2] = ["em", "pr"];
pub const TANGRAM_METRICS: [&str; 4] =
    ["strict_gc", "progress_gc", "boundary_iou", "visual_consistency"];

/// Canonical column order for the aggregate CSV; only columns belonging to a
/// task present in the report set are emitted.
const METRIC_ORDER: [&str; 6] = [
    "em",
    "pr",
    "strict_gc",
    "progress_gc",
    "boundary_iou",
    "visual_consistency",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub instance_id: String,
    pub task: String,
    pub split: SplitTag,
    pub metrics: BTreeMap<String, Real>,
    pub failure_tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub diagnostics: Value,
}

fn metric_map(pairs: &[(&str, f64)]) -> BTreeMap<String, Real> {
    pairs.iter().map(|&(k, v)| (k.to_string(), Real(v))).collect()
}

impl EvalReport {
    pub fn maze(
        instance_id: impl Into<String>,
        split: SplitTag,
        result: &MazeEvalResult,
    ) -> Self {
        EvalReport {
            schema_version: SCHEMA_VERSION,
            instance_id: instance_id.into(),
            task: "maze".into(),
            split,
            metrics: metric_map(&[("em", f64::from(result.em)), ("pr", result.pr)]),
            failure_tags: result.failure_tags.clone(),
            error: None,
            diagnostics: serde_json::to_value(result).unwrap_or(Value::Null),
        }
    }

    pub fn tangram(
        instance_id: impl Into<String>,
        split: SplitTag,
        result: &TangramEvalResult,
    ) -> Self {
        EvalReport {
            schema_version: SCHEMA_VERSION,
            instance_id: instance_id.into(),
            task: "tangram".into(),
            split,
            metrics: metric_map(&[
                ("strict_gc", f64::from(result.strict_gc)),
                ("progress_gc", result.progress_gc),
                ("boundary_iou", result.boundary_iou),
                ("visual_consistency", result.visual_consistency),
            ]),
            failure_tags: result.failure_tags.clone(),
            error: None,
            diagnostics: serde_json::to_value(result).unwrap_or(Value::Null),
        }
    }

    fn zeroed(instance_id: String, task: &str, split: SplitTag) -> Self {
        let names: &[&str] = match task {
            "maze" => &MAZE_METRICS,
            _ => &TANGRAM_METRICS,
        };
        EvalReport {
            schema_version: SCHEMA_VERSION,
            instance_id,
            task: task.into(),
            split,
            metrics: names.iter().map(|&n| (n.to_string(), Real(0.0))).collect(),
            failure_tags: Vec::new(),
            error: None,
            diagnostics: Value::Null,
        }
    }

    /// Failure row for an instance with no candidate directory. Metrics are
    /// zero so the instance still counts toward split means.
    pub fn missing(instance_id: impl Into<String>, task: &str, split: SplitTag) -> Self {
        let mut r = Self::zeroed(instance_id.into(), task, split);
        r.failure_tags.push("missing".into());
        r
    }

    /// Failure row for a candidate that could not be read or scored.
    pub fn errored(
        instance_id: impl Into<String>,
        task: &str,
        split: SplitTag,
        message: impl Into<String>,
    ) -> Self {
        let mut r = Self::zeroed(instance_id.into(), task, split);
        r.error = Some(message.into());
        r
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|r| r.0)
    }

    pub fn to_json(&self) -> Result<String, VideoIoError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    fn validate(&self) -> Result<(), VideoIoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(VideoIoError::VersionError(self.schema_version));
        }
        let strict = self.metric("strict_gc");
        let progress = self.metric("progress_gc");
        if let (Some(s), Some(p)) = (strict, progress) {
            if (s == 1.0) != (p == 1.0) {
                return Err(VideoIoError::InvalidManifest(format!(
                    "report {}: strict_gc {s} inconsistent with progress_gc {p}",
                    self.instance_id
                )));
            }
        }
        if let (Some(em), Some(pr)) = (self.metric("em"), self.metric("pr")) {
            if em == 1.0 && pr != 1.0 {
                return Err(VideoIoError::InvalidManifest(format!(
                    "report {}: em = 1 requires pr = 1, got {pr}",
                    self.instance_id
                )));
            }
        }
        Ok(())
    }
}

pub fn write_report(report: &EvalReport, path: &Path) -> Result<(), VideoIoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, report.to_json()?)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<EvalReport, VideoIoError> {
    let report: EvalReport = serde_json::from_str(&fs::read_to_string(path)?)?;
    report.validate()?;
    Ok(report)
}

/// Six-significant-digit decimal formatting, trailing zeros trimmed. All
/// aggregate outputs go through this so CSV and JSON agree byte-for-byte.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_columns(reports: &[EvalReport]) -> Vec<&'static str> {
    let has_maze = reports.iter().any(|r| r.task == "maze");
    let has_tangram = reports.iter().any(|r| r.task != "maze");
    METRIC_ORDER
        .iter()
        .copied()
        .filter(|name| {
            let is_maze_col = MAZE_METRICS.contains(name);
            (is_maze_col && has_maze) || (!is_maze_col && has_tangram)
        })
        .collect()
}

/// One row per instance plus one mean row per (task, split) group. Rows are
/// sorted, metric cells are rounded to six significant digits, and means are
/// taken over the rounded cell values in row order.
pub fn aggregate_csv(reports: &[EvalReport]) -> String {
    let columns = csv_columns(reports);
    let mut sorted: Vec<&EvalReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        (a.task.as_str(), a.split, a.instance_id.as_str())
            .cmp(&(b.task.as_str(), b.split, b.instance_id.as_str()))
    });

    let mut out = String::new();
    out.push_str("instance_id,task,split");
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",failure_tags,error\n");

    type GroupKey = (String, SplitTag);
    let mut groups: BTreeMap<GroupKey, Vec<Vec<Option<f64>>>> = BTreeMap::new();
    for r in &sorted {
        let mut cells: Vec<Option<f64>> = Vec::with_capacity(columns.len());
        out.push_str(&r.instance_id);
        out.push(',');
        out.push_str(&r.task);
        out.push(',');
        out.push_str(r.split.name());
        for c in &columns {
            out.push(',');
            match r.metric(c) {
                Some(v) => {
                    let formatted = sig6(v);
                    out.push_str(&formatted);
                    cells.push(Some(formatted.parse::<f64>().unwrap()));
                }
                None => cells.push(None),
            }
        }
        out.push(',');
        out.push_str(&r.failure_tags.join(";"));
        out.push(',');
        if let Some(e) = &r.error {
            out.push_str(&e.replace([',', '\n'], " "));
        }
        out.push('\n');
        groups
            .entry((r.task.clone(), r.split))
            .or_default()
            .push(cells);
    }

    for ((task, split), rows) in &groups {
        out.push_str("mean,");
        out.push_str(task);
        out.push(',');
        out.push_str(split.name());
        for (i, _) in columns.iter().enumerate() {
            out.push(',');
            let values: Vec<f64> = rows.iter().filter_map(|cells| cells[i]).collect();
            if !values.is_empty() {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                out.push_str(&sig6(mean));
            }
        }
        out.push_str(",,\n");
    }
    out
}

pub fn write_aggregate(reports: &[EvalReport], path: &Path) -> Result<(), VideoIoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, aggregate_csv(reports))?;
    Ok(())
}
