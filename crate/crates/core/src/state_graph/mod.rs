//! Complete digraphs over the discrete limb-state space of a robot.
//!
//! Vertices are robot states, edges are motion primitives. Internally every
//! vertex and edge is a 0-based index; the interchange formats and all
//! display output shift to the 1-based `v1..vn` / `e1..em` convention.
//!
//! Vertex `v` encodes the limb states big-endian in base `n_s`, so for two
//! binary limbs `{00} = v1, {01} = v2, {10} = v3, {11} = v4`. Edges are
//! ordered lexicographically by `(source, target)`.

mod eulerian;
mod prune;

use std::fmt;

pub use eulerian::{eulerian_verify, hierholzer_from_order, plan_trials, stochastic_hierholzer, EulerianPlan};
pub use prune::{prune_failed_limbs, LimbFailure, PrunedDigraph};

use crate::error::{Error, Result};

/// Largest digraph [`StateDigraph::build`] will construct without an
/// explicit cap.
pub const DEFAULT_VERTEX_CAP: usize = 256;

/// One assignment of a discrete state to every limb.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RobotState {
    limb_states: Vec<usize>,
}

impl RobotState {
    pub fn new(limb_states: Vec<usize>) -> Self {
        Self { limb_states }
    }

    /// Decodes the 0-based vertex index into limb states (limb 1 most
    /// significant).
    pub fn from_vertex(vertex: usize, n_limbs: usize, states_per_limb: usize) -> Self {
        let mut limb_states = vec![0; n_limbs];
        let mut rest = vertex;
        for slot in limb_states.iter_mut().rev() {
            *slot = rest % states_per_limb;
            rest /= states_per_limb;
        }
        Self { limb_states }
    }

    /// 0-based vertex index; `None` if a limb state is out of range.
    pub fn vertex(&self, states_per_limb: usize) -> Option<usize> {
        self.limb_states.iter().try_fold(0usize, |acc, &s| {
            (s < states_per_limb).then(|| acc * states_per_limb + s)
        })
    }

    pub fn limb_states(&self) -> &[usize] {
        &self.limb_states
    }
}

impl fmt::Display for RobotState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for s in &self.limb_states {
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

/// Dense `n x m` matrix with entries in {-1, 0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl IncidenceMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[row * self.cols + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: i8) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Matrix-vector product with a 0/1 indicator vector.
    pub fn apply(&self, z: &[bool]) -> Vec<i64> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(z)
                    .filter(|(_, &on)| on)
                    .map(|(&b, _)| b as i64)
                    .sum()
            })
            .collect()
    }
}

/// The robot's complete loopless digraph together with its signed
/// incidence matrix `B` and the initial / terminal matrices `B^i`, `B^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDigraph {
    n_limbs: usize,
    states_per_limb: usize,
    n: usize,
    edges: Vec<Edge>,
    incidence: IncidenceMatrix,
    initial: IncidenceMatrix,
    terminal: IncidenceMatrix,
}

impl StateDigraph {
    /// Builds the complete digraph for `n_limbs` limbs with
    /// `states_per_limb` discrete states each, refusing graphs larger than
    /// [`DEFAULT_VERTEX_CAP`].
    pub fn build(n_limbs: usize, states_per_limb: usize) -> Result<Self> {
        Self::build_with_cap(n_limbs, states_per_limb, DEFAULT_VERTEX_CAP)
    }

    pub fn build_with_cap(n_limbs: usize, states_per_limb: usize, cap: usize) -> Result<Self> {
        if n_limbs < 1 {
            return Err(Error::domain("at least one limb is required"));
        }
        if states_per_limb < 2 {
            return Err(Error::domain("each limb needs at least two states"));
        }
        let n = u32::try_from(n_limbs)
            .ok()
            .and_then(|e| states_per_limb.checked_pow(e))
            .ok_or(Error::Size { n: usize::MAX, cap })?;
        if n > cap {
            return Err(Error::Size { n, cap });
        }
        Ok(Self::complete(n_limbs, states_per_limb))
    }

    /// Unchecked constructor; `n_limbs == 0` yields the single-vertex graph.
    pub(crate) fn complete(n_limbs: usize, states_per_limb: usize) -> Self {
        let n = states_per_limb.pow(n_limbs as u32);
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1));
        for source in 0..n {
            for target in 0..n {
                if source != target {
                    edges.push(Edge { source, target });
                }
            }
        }
        let m = edges.len();
        let mut incidence = IncidenceMatrix::zeros(n, m);
        let mut initial = IncidenceMatrix::zeros(n, m);
        let mut terminal = IncidenceMatrix::zeros(n, m);
        for (j, e) in edges.iter().enumerate() {
            initial.set(e.source, j, 1);
            terminal.set(e.target, j, 1);
            incidence.set(e.source, j, 1);
            incidence.set(e.target, j, -1);
        }
        Self {
            n_limbs,
            states_per_limb,
            n,
            edges,
            incidence,
            initial,
            terminal,
        }
    }

    pub fn n_limbs(&self) -> usize {
        self.n_limbs
    }

    pub fn states_per_limb(&self) -> usize {
        self.states_per_limb
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count, always `n (n - 1)`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    /// Signed incidence matrix `B`.
    pub fn incidence(&self) -> &IncidenceMatrix {
        &self.incidence
    }

    /// Initial matrix `B^i`.
    pub fn initial(&self) -> &IncidenceMatrix {
        &self.initial
    }

    /// Terminal matrix `B^t`.
    pub fn terminal(&self) -> &IncidenceMatrix {
        &self.terminal
    }

    /// Index of the edge `source -> target`, if it exists.
    pub fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        if source >= self.n || target >= self.n || source == target {
            return None;
        }
        let offset = if target < source { target } else { target - 1 };
        Some(source * (self.n - 1) + offset)
    }

    /// Edges leaving `vertex`, contiguous in canonical order.
    pub fn out_edges(&self, vertex: usize) -> std::ops::Range<usize> {
        let k = self.n - 1;
        vertex * k..(vertex + 1) * k
    }

    pub fn robot_state(&self, vertex: usize) -> RobotState {
        RobotState::from_vertex(vertex, self.n_limbs, self.states_per_limb)
    }

    /// Checks `B = B^i - B^t` entrywise and that every column of `B` sums
    /// to zero with exactly one `+1` and one `-1`.
    pub fn incidence_check(&self) -> bool {
        let (n, m) = (self.n, self.m());
        let dims = |b: &IncidenceMatrix| b.rows == n && b.cols == m;
        if !dims(&self.incidence) || !dims(&self.initial) || !dims(&self.terminal) {
            return false;
        }
        for j in 0..m {
            let (mut plus, mut minus, mut sum) = (0, 0, 0i64);
            for i in 0..n {
                let b = self.incidence.get(i, j);
                if b != self.initial.get(i, j) - self.terminal.get(i, j) {
                    return false;
                }
                match b {
                    1 => plus += 1,
                    -1 => minus += 1,
                    0 => {}
                    _ => return false,
                }
                sum += b as i64;
            }
            if plus != 1 || minus != 1 || sum != 0 {
                return false;
            }
        }
        true
    }
}
