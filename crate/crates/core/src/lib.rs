//! Core library for synthesizing and scoring visual-planning videos.
//!
//! Two task families are covered: grid-maze navigation and tangram assembly.
//! Generators build task instances, renderers produce golden frame sequences
//! under configurable frame budgets, and rule-based evaluators score candidate
//! frame sequences pixel-by-pixel. Everything is deterministic given a seed:
//! same inputs, same bytes.

pub mod eval_maze;
pub mod eval_tangram;
pub mod geom;
pub mod maze;
pub mod rng;
pub mod tags;
pub mod tangram;
pub mod video_io;
