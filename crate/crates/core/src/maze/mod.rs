//! Maze instance generation, shortest-path solving, and rendering of the
//! golden solution videos.

mod icons;
mod render;
mod schedule;
mod synth;

pub use icons::{icon_membership, IconSpec, IconSplit, ShapeKind, SEEN_ICON_COUNT, UNSEEN_ICON_COUNT};
pub use render::{
    cell_center_px, render_maze_background, render_maze_frame, BoardGeom, CANVAS_BG, CANVAS_H,
    CANVAS_W, CORRIDOR, GOAL_RED, WALL,
};
pub use schedule::{FrameSchedule, ResolvedSchedule, ScheduleMode};
pub use synth::{path_cells, position_along_path, synthesize_solution_video};

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::rng_for;

#[derive(Debug, Error, PartialEq)]
pub enum MazeError {
    #[error("invalid maze: {0}")]
    InvalidMaze(String),
    #[error("no (maze, start, goal) with path length in [{lo},{hi}] after {attempts} attempts")]
    InfeasibleRange { lo: usize, hi: usize, attempts: u32 },
    #[error("schedule error: {0}")]
    ScheduleError(String),
}

/// Grid cell, row-major. Row 0 is the top of the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub r: u32,
    pub c: u32,
}

impl Cell {
    pub fn new(r: u32, c: u32) -> Self {
        Cell { r, c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

pub const ALL_ACTIONS: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

impl Action {
    /// (dr, dc) of the move.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Left => (0, -1),
            Action::Right => (0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActionSeq {
    pub actions: Vec<Action>,
}

impl ActionSeq {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Walls-only maze layout: the piece of a MazeSpec that generation produces
/// before start, goal, and icon are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeLayout {
    pub rows: u32,
    pub cols: u32,
    pub walls: BTreeSet<(Cell, Cell)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeSpec {
    pub rows: u32,
    pub cols: u32,
    /// Internal wall edges as normalized (smaller, larger) adjacent cell
    /// pairs. Border walls are implicit.
    pub walls: BTreeSet<(Cell, Cell)>,
    pub start: Cell,
    pub goal: Cell,
    pub icon_id: u32,
    pub seed: u64,
}

fn norm_edge(a: Cell, b: Cell) -> (Cell, Cell) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl MazeSpec {
    pub fn cell_count(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    pub fn in_bounds(&self, r: i64, c: i64) -> bool {
        r >= 0 && c >= 0 && (r as u32) < self.rows && (c as u32) < self.cols
    }

    pub fn is_wall(&self, a: Cell, b: Cell) -> bool {
        self.walls.contains(&norm_edge(a, b))
    }

    /// Destination of `action` from `from`, or None when blocked by the
    /// border or a wall.
    pub fn can_move(&self, from: Cell, action: Action) -> Option<Cell> {
        let (dr, dc) = action.delta();
        let (nr, nc) = (from.r as i64 + dr, from.c as i64 + dc);
        if !self.in_bounds(nr, nc) {
            return None;
        }
        let to = Cell::new(nr as u32, nc as u32);
        if self.is_wall(from, to) {
            None
        } else {
            Some(to)
        }
    }

    pub fn open_neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        ALL_ACTIONS.iter().filter_map(move |&a| self.can_move(cell, a))
    }

    /// Checks the full structural contract: size bounds, wall adjacency,
    /// spanning-tree connectivity, distinct start and goal in bounds.
    pub fn validate(&self) -> Result<(), MazeError> {
        if !(3..=12).contains(&self.rows) || !(3..=12).contains(&self.cols) {
            return Err(MazeError::InvalidMaze(format!(
                "size {}x{} outside [3,12]",
                self.rows, self.cols
            )));
        }
        for &(a, b) in &self.walls {
            let adjacent = (a.r == b.r && a.c + 1 == b.c) || (a.c == b.c && a.r + 1 == b.r);
            if !adjacent || b.r >= self.rows || b.c >= self.cols {
                return Err(MazeError::InvalidMaze(format!(
                    "wall ({},{})-({},{}) is not an internal adjacent pair",
                    a.r, a.c, b.r, b.c
                )));
            }
        }
        let internal_edges =
            (self.rows * (self.cols - 1) + self.cols * (self.rows - 1)) as usize;
        let passages = internal_edges - self.walls.len();
        if passages != self.cell_count() - 1 {
            return Err(MazeError::InvalidMaze(format!(
                "{passages} passages for {} cells, spanning tree needs {}",
                self.cell_count(),
                self.cell_count() - 1
            )));
        }
        let mut seen = vec![false; self.cell_count()];
        let mut queue = VecDeque::from([Cell::new(0, 0)]);
        seen[0] = true;
        let mut reached = 1usize;
        while let Some(cur) = queue.pop_front() {
            for next in self.open_neighbors(cur) {
                let idx = (next.r * self.cols + next.c) as usize;
                if !seen[idx] {
                    seen[idx] = true;
                    reached += 1;
                    queue.push_back(next);
                }
            }
        }
        if reached != self.cell_count() {
            return Err(MazeError::InvalidMaze(format!(
                "only {reached} of {} cells reachable",
                self.cell_count()
            )));
        }
        if self.start == self.goal {
            return Err(MazeError::InvalidMaze("start equals goal".into()));
        }
        for cell in [self.start, self.goal] {
            if cell.r >= self.rows || cell.c >= self.cols {
                return Err(MazeError::InvalidMaze(format!(
                    "cell ({},{}) out of bounds",
                    cell.r, cell.c
                )));
            }
        }
        Ok(())
    }

    /// Replays `seq` from start, failing on any border or wall crossing and
    /// when the walk does not end at the goal.
    pub fn replay(&self, seq: &ActionSeq) -> Result<Vec<Cell>, MazeError> {
        let mut cells = vec![self.start];
        let mut cur = self.start;
        for (i, &a) in seq.actions.iter().enumerate() {
            cur = self.can_move(cur, a).ok_or_else(|| {
                MazeError::InvalidMaze(format!("action {i} ({a:?}) blocked at ({},{})", cur.r, cur.c))
            })?;
            cells.push(cur);
        }
        if cur != self.goal {
            return Err(MazeError::InvalidMaze(format!(
                "walk ends at ({},{}), goal is ({},{})",
                cur.r, cur.c, self.goal.r, self.goal.c
            )));
        }
        Ok(cells)
    }
}

/// Randomized-DFS spanning tree over the grid. Deterministic given the seed.
pub fn generate_maze(rows: u32, cols: u32, seed: u64) -> MazeLayout {
    assert!(rows >= 2 && cols >= 2, "maze needs at least 2x2 cells");
    let mut rng = rng_for(seed, "maze-layout");
    generate_maze_with(rows, cols, &mut rng)
}

pub(crate) fn generate_maze_with(rows: u32, cols: u32, rng: &mut ChaCha8Rng) -> MazeLayout {
    let n = (rows * cols) as usize;
    let mut visited = vec![false; n];
    let mut passages: BTreeSet<(Cell, Cell)> = BTreeSet::new();
    let start = Cell::new(rng.gen_range(0..rows), rng.gen_range(0..cols));
    let mut stack = vec![start];
    visited[(start.r * cols + start.c) as usize] = true;
    while let Some(&cur) = stack.last() {
        let mut options: Vec<Cell> = ALL_ACTIONS
            .iter()
            .filter_map(|a| {
                let (dr, dc) = a.delta();
                let (nr, nc) = (cur.r as i64 + dr, cur.c as i64 + dc);
                if nr >= 0 && nc >= 0 && (nr as u32) < rows && (nc as u32) < cols {
                    let cell = Cell::new(nr as u32, nc as u32);
                    if !visited[(cell.r * cols + cell.c) as usize] {
                        return Some(cell);
                    }
                }
                None
            })
            .collect();
        if options.is_empty() {
            stack.pop();
            continue;
        }
        options.shuffle(rng);
        let next = options[0];
        visited[(next.r * cols + next.c) as usize] = true;
        passages.insert(norm_edge(cur, next));
        stack.push(next);
    }
    let mut walls = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            let cell = Cell::new(r, c);
            if c + 1 < cols {
                let e = norm_edge(cell, Cell::new(r, c + 1));
                if !passages.contains(&e) {
                    walls.insert(e);
                }
            }
            if r + 1 < rows {
                let e = norm_edge(cell, Cell::new(r + 1, c));
                if !passages.contains(&e) {
                    walls.insert(e);
                }
            }
        }
    }
    MazeLayout { rows, cols, walls }
}

/// BFS distances from `from` over open passages.
fn bfs_distances(spec: &MazeSpec, from: Cell) -> Vec<Option<u32>> {
    let mut dist: Vec<Option<u32>> = vec![None; spec.cell_count()];
    dist[(from.r * spec.cols + from.c) as usize] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[(cur.r * spec.cols + cur.c) as usize].unwrap();
        for next in spec.open_neighbors(cur) {
            let idx = (next.r * spec.cols + next.c) as usize;
            if dist[idx].is_none() {
                dist[idx] = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Minimal action sequence start to goal. Unique on a spanning tree.
pub fn solve_shortest_path(spec: &MazeSpec) -> Result<ActionSeq, MazeError> {
    let dist = bfs_distances(spec, spec.goal);
    let mut cur = spec.start;
    let mut d = dist[(cur.r * spec.cols + cur.c) as usize]
        .ok_or_else(|| MazeError::InvalidMaze("goal unreachable from start".into()))?;
    let mut actions = Vec::with_capacity(d as usize);
    while cur != spec.goal {
        let mut stepped = false;
        for a in ALL_ACTIONS {
            if let Some(next) = spec.can_move(cur, a) {
                if dist[(next.r * spec.cols + next.c) as usize] == Some(d - 1) {
                    actions.push(a);
                    cur = next;
                    d -= 1;
                    stepped = true;
                    break;
                }
            }
        }
        if !stepped {
            return Err(MazeError::InvalidMaze("no descending neighbor during reconstruction".into()));
        }
    }
    Ok(ActionSeq { actions })
}

/// A maze instance with its unique solution, before manifest assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMaze {
    pub spec: MazeSpec,
    pub actions: ActionSeq,
}

/// Rejection-samples (layout, start, goal) until the solution length lands
/// in `[lo, hi]`. The layout is redrawn every attempt, so ranges that only
/// some trees support (deep paths on small grids) still terminate.
pub fn sample_maze(
    rows: u32,
    cols: u32,
    path_len_range: (usize, usize),
    icon_id: u32,
    seed: u64,
) -> Result<SampledMaze, MazeError> {
    let (lo, hi) = path_len_range;
    assert!(lo >= 1 && lo <= hi, "bad path length range [{lo},{hi}]");
    let mut rng = rng_for(seed, "maze-sample");
    const MAX_ATTEMPTS: u32 = 10_000;
    for _ in 0..MAX_ATTEMPTS {
        let layout = generate_maze_with(rows, cols, &mut rng);
        let start = Cell::new(rng.gen_range(0..rows), rng.gen_range(0..cols));
        let spec = MazeSpec {
            rows,
            cols,
            walls: layout.walls,
            start,
            goal: start,
            icon_id,
            seed,
        };
        let dist = bfs_distances(&spec, start);
        let mut goals: Vec<Cell> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if let Some(d) = dist[(r * cols + c) as usize] {
                    if (lo..=hi).contains(&(d as usize)) {
                        goals.push(Cell::new(r, c));
                    }
                }
            }
        }
        if goals.is_empty() {
            continue;
        }
        let goal = goals[rng.gen_range(0..goals.len())];
        let spec = MazeSpec { goal, ..spec };
        let actions = solve_shortest_path(&spec)?;
        debug_assert!((lo..=hi).contains(&actions.len()));
        return Ok(SampledMaze { spec, actions });
    }
    Err(MazeError::InfeasibleRange {
        lo,
        hi,
        attempts: MAX_ATTEMPTS,
    })
}
