//! Flat key=value config file overriding evaluator defaults. Unknown keys
//! are rejected so typos fail loudly instead of silently using defaults.

use std::fs;
use std::path::Path;

use fpb_core::eval_maze::MazeEvalParams;
use fpb_core::eval_tangram::TangramEvalParams;

use crate::{usage, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub maze: MazeEvalParams,
    pub tangram: TangramEvalParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            maze: MazeEvalParams::default(),
            tangram: TangramEvalParams::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        let Some(path) = path else { return Ok(cfg) };
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value, got {line:?}", lineno + 1)))?;
            cfg.apply(key.trim(), value.trim())
                .map_err(|msg| usage(format!("config line {}: {msg}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("{key}: cannot parse {value:?}"))
        }
        match key {
            "eval.maze.tau" => self.maze.tau = num(key, value)?,
            "eval.maze.min_area" => self.maze.min_area = num(key, value)?,
            "eval.maze.continuity_radius" => self.maze.continuity_radius = num(key, value)?,
            "eval.maze.resample_per_step" => self.maze.resample_per_step = num(key, value)?,
            "eval.tangram.delta_col" => self.tangram.delta_col = num(key, value)?,
            "eval.tangram.area_window" => {
                let (lo, hi) = value
                    .split_once(',')
                    .ok_or_else(|| format!("{key}: expected lo,hi, got {value:?}"))?;
                let lo: f64 = num(key, lo.trim())?;
                let hi: f64 = num(key, hi.trim())?;
                if !(lo > 0.0 && lo < hi) {
                    return Err(format!("{key}: window [{lo},{hi}] is not increasing"));
                }
                self.tangram.area_window = (lo, hi);
            }
            "eval.tangram.angle_window" => self.tangram.angle_window = num(key, value)?,
            "eval.tangram.k_samples" => self.tangram.k_samples = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn missing_config_uses_defaults() {
        let cfg = RunConfig::load(None).unwrap();
        assert_eq!(cfg.maze.tau, 30);
        assert_eq!(cfg.tangram.delta_col, 60);
        assert_eq!(cfg.tangram.area_window, (0.6, 1.4));
    }

    #[test]
    fn overrides_apply_and_comments_are_skipped() {
        let f = write_config(
            "# tighter tracker\n\
             eval.maze.tau = 45\n\
             eval.maze.continuity_radius=2.0\n\
             \n\
             eval.tangram.area_window=0.5, 1.6\n\
             eval.tangram.k_samples=8\n",
        );
        let cfg = RunConfig::load(Some(f.path())).unwrap();
        assert_eq!(cfg.maze.tau, 45);
        assert_eq!(cfg.maze.continuity_radius, 2.0);
        assert_eq!(cfg.tangram.area_window, (0.5, 1.6));
        assert_eq!(cfg.tangram.k_samples, 8);
        assert_eq!(cfg.maze.min_area, 25);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let f = write_config("eval.maze.tua=30\n");
        let err = RunConfig::load(Some(f.path())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn malformed_lines_name_their_line_number() {
        let f = write_config("eval.maze.tau=30\nnot a pair\n");
        let err = RunConfig::load(Some(f.path())).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn decreasing_area_window_is_rejected() {
        let f = write_config("eval.tangram.area_window=1.4,0.6\n");
        assert!(RunConfig::load(Some(f.path())).is_err());
    }
}
