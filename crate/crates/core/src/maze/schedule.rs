use serde::{Deserialize, Serialize};

use super::MazeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// `total_frames` is fixed; frames per step and the tail hold are
    /// derived from the path length.
    FixedTotal,
    /// `kappa` frames per step; total must equal lead + kappa*steps + tail.
    PerStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSchedule {
    pub mode: ScheduleMode,
    pub total_frames: u32,
    pub kappa: u32,
    pub lead_hold: u32,
    pub tail_hold: u32,
}

impl FrameSchedule {
    /// Training default: 81 frames total with a short lead hold; the tail
    /// hold absorbs whatever the motion window does not divide into.
    pub fn default_maze() -> Self {
        FrameSchedule {
            mode: ScheduleMode::FixedTotal,
            total_frames: 81,
            kappa: 0,
            lead_hold: 4,
            tail_hold: 0,
        }
    }

    pub fn fixed_total(total_frames: u32, lead_hold: u32) -> Self {
        FrameSchedule {
            mode: ScheduleMode::FixedTotal,
            total_frames,
            kappa: 0,
            lead_hold,
            tail_hold: 0,
        }
    }

    pub fn per_step(kappa: u32, steps: usize, lead_hold: u32, tail_hold: u32) -> Self {
        FrameSchedule {
            mode: ScheduleMode::PerStep,
            total_frames: lead_hold + kappa * steps as u32 + tail_hold,
            kappa,
            lead_hold,
            tail_hold,
        }
    }

    /// Concrete frame counts for a path of `steps` actions.
    pub fn resolve(&self, steps: usize) -> Result<ResolvedSchedule, MazeError> {
        if steps == 0 {
            return Err(MazeError::ScheduleError("path has no steps".into()));
        }
        let steps = steps as u32;
        let (kappa, lead, tail) = match self.mode {
            ScheduleMode::FixedTotal => {
                let avail = self
                    .total_frames
                    .checked_sub(self.lead_hold)
                    .ok_or_else(|| {
                        MazeError::ScheduleError(format!(
                            "lead hold {} exceeds total {}",
                            self.lead_hold, self.total_frames
                        ))
                    })?;
                let kappa = avail / steps;
                if kappa == 0 {
                    return Err(MazeError::ScheduleError(format!(
                        "{} frames cannot cover {steps} steps",
                        self.total_frames
                    )));
                }
                (kappa, self.lead_hold, avail - kappa * steps)
            }
            ScheduleMode::PerStep => {
                let need = self.lead_hold + self.kappa * steps + self.tail_hold;
                if need != self.total_frames {
                    return Err(MazeError::ScheduleError(format!(
                        "total {} != lead {} + {}x{steps} + tail {}",
                        self.total_frames, self.lead_hold, self.kappa, self.tail_hold
                    )));
                }
                if self.kappa == 0 {
                    return Err(MazeError::ScheduleError("kappa must be at least 1".into()));
                }
                (self.kappa, self.lead_hold, self.tail_hold)
            }
        };
        let motion = kappa * steps;
        if motion < 2 {
            return Err(MazeError::ScheduleError(
                "motion window needs at least 2 frames".into(),
            ));
        }
        Ok(ResolvedSchedule {
            total_frames: lead + motion + tail,
            kappa,
            lead_hold: lead,
            tail_hold: tail,
            motion_frames: motion,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedSchedule {
    pub total_frames: u32,
    pub kappa: u32,
    pub lead_hold: u32,
    pub tail_hold: u32,
    pub motion_frames: u32,
}

impl ResolvedSchedule {
    /// Arc-length parameter in [0, steps] for frame `t`; holds clamp to the
    /// endpoints and the motion window touches both exactly.
    pub fn arc_param(&self, t: u32, steps: usize) -> f64 {
        if t < self.lead_hold {
            return 0.0;
        }
        let m = self.motion_frames;
        if t >= self.lead_hold + m {
            return steps as f64;
        }
        let i = (t - self.lead_hold) as f64;
        steps as f64 * i / (m - 1) as f64
    }
}
