//! Gait synthesis as a binary integer linear program.
//!
//! For each sweep value of the direction weights `alpha` the synthesizer
//! minimizes a linear edge cost over the cycle space (`B z = 0`,
//! `B^i z <= 1`) plus a goal tolerance and a minimum length. Solutions that
//! are unions of disjoint cycles are removed with no-good cuts until a
//! single simple cycle remains.

mod bnb;
mod lhs;
mod simplex;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bnb::{BnbSolution, BnbStats};
pub use lhs::{lhs_sample, map_to_range, map_to_signed};

use crate::cycles::{diagnose_cycle, order_cycle, GaitVector};
use crate::error::{Error, Result};
use crate::learning::WeightedDigraph;
use crate::se2::cycle_transform;
use crate::state_graph::StateDigraph;
use simplex::RowKind;

pub const DEFAULT_NODE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Translation,
    Rotation,
}

impl Goal {
    /// Dimension of `alpha`.
    pub fn alpha_dims(self) -> usize {
        match self {
            Goal::Translation => 2,
            Goal::Rotation => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub goal: Goal,
    /// Fixed direction weights; when absent, `samples` values are drawn by
    /// Latin hypercube over `alpha_range`.
    pub alpha: Option<Vec<f64>>,
    pub beta: f64,
    pub gamma: f64,
    /// mm, rotation goal
    pub eps_t: f64,
    /// rad, translation goal
    pub eps_theta: f64,
    /// `N`
    pub samples: usize,
    /// `L`, solves per sample including the first
    pub max_cuts: usize,
    pub alpha_range: (f64, f64),
    pub min_length: usize,
    pub node_budget: usize,
}

impl SynthesisConfig {
    pub fn new(goal: Goal) -> Self {
        Self {
            goal,
            alpha: None,
            beta: 1.0,
            gamma: 0.1,
            eps_t: 2.0,
            eps_theta: 0.05,
            samples: 100,
            max_cuts: 50,
            alpha_range: (-1.0, 1.0),
            min_length: 2,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::domain(msg.to_string()));
        if self.samples < 1 {
            return bad("N must be at least 1");
        }
        if self.max_cuts < 1 {
            return bad("L must be at least 1");
        }
        if !(self.eps_t >= 0.0 && self.eps_theta >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        if !(self.beta >= 0.0 && self.gamma >= 0.0) {
            return bad("beta and gamma must be nonnegative");
        }
        if self.min_length < 2 {
            return bad("minimum cycle length is 2");
        }
        if !(self.alpha_range.0 <= self.alpha_range.1) {
            return bad("alpha_range must be ordered");
        }
        if let Some(a) = &self.alpha {
            if a.len() != self.goal.alpha_dims() {
                return Err(Error::domain(format!(
                    "alpha has {} components, the {:?} goal needs {}",
                    a.len(),
                    self.goal,
                    self.goal.alpha_dims()
                )));
            }
        }
        Ok(())
    }
}

/// `c = alpha^T P + beta S_p + gamma 1` (translation) or
/// `c = alpha Theta + beta S_theta + gamma 1` (rotation).
pub fn build_cost(goal: Goal, weights: &WeightedDigraph, alpha: &[f64], beta: f64, gamma: f64) -> Result<Vec<f64>> {
    if alpha.len() != goal.alpha_dims() {
        return Err(Error::domain(format!(
            "alpha has {} components, expected {}",
            alpha.len(),
            goal.alpha_dims()
        )));
    }
    let m = weights.graph().m();
    Ok((0..m)
        .map(|e| match goal {
            Goal::Translation => {
                let p = weights.p()[e];
                alpha[0] * p.x + alpha[1] * p.y + beta * weights.s_p()[e] + gamma
            }
            Goal::Rotation => alpha[0] * weights.theta()[e] + beta * weights.s_theta()[e] + gamma,
        })
        .collect())
}

/// Binary program `min c^T z` with dense constraint rows and accumulated
/// no-good cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct BilpProblem {
    pub c: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
    /// Edge supports excluded by `sum_{e in S} z_e <= |S| - 1`.
    pub cuts: Vec<Vec<usize>>,
}

impl BilpProblem {
    pub fn new(c: Vec<f64>) -> Self {
        Self {
            c,
            eq: Vec::new(),
            le: Vec::new(),
            cuts: Vec::new(),
        }
    }

    /// `B z = 0`, `B^i z <= 1`.
    pub fn cycle_space(graph: &StateDigraph, c: Vec<f64>) -> Self {
        let mut p = Self::new(c);
        for v in 0..graph.n() {
            p.eq.push((graph.incidence().row(v).iter().map(|&b| b as f64).collect(), 0.0));
        }
        for v in 0..graph.n() {
            p.le.push((graph.initial().row(v).iter().map(|&b| b as f64).collect(), 1.0));
        }
        p
    }

    /// `1^T z >= k`
    pub fn add_min_length(&mut self, k: usize) {
        self.le.push((vec![-1.0; self.c.len()], -(k as f64)));
    }

    pub fn add_cut(&mut self, z: &[bool]) {
        self.cuts.push((0..z.len()).filter(|&e| z[e]).collect());
    }

    fn rows(&self) -> Vec<(Vec<f64>, RowKind, f64)> {
        let m = self.c.len();
        let mut rows: Vec<_> = self
            .eq
            .iter()
            .map(|(a, b)| (a.clone(), RowKind::Eq, *b))
            .chain(self.le.iter().map(|(a, b)| (a.clone(), RowKind::Le, *b)))
            .collect();
        for support in &self.cuts {
            let mut a = vec![0.0; m];
            for &e in support {
                a[e] = 1.0;
            }
            rows.push((a, RowKind::Le, support.len() as f64 - 1.0));
        }
        rows
    }

    /// Whether a binary vector satisfies every row, cuts included.
    pub fn is_feasible(&self, z: &[bool]) -> bool {
        let dot = |a: &[f64]| a.iter().zip(z).filter(|(_, &on)| on).map(|(v, _)| v).sum::<f64>();
        self.eq.iter().all(|(a, b)| (dot(a) - b).abs() <= 1e-9)
            && self.le.iter().all(|(a, b)| dot(a) <= b + 1e-9)
            && self.cuts.iter().all(|s| s.iter().filter(|&&e| z[e]).count() < s.len())
    }

    pub fn objective(&self, z: &[bool]) -> f64 {
        self.c.iter().zip(z).filter(|(_, &on)| on).map(|(c, _)| c).sum()
    }
}

/// Exact binary optimum, or `z = None` when infeasible.
pub fn solve_bilp(problem: &BilpProblem, node_budget: usize) -> Result<BnbSolution> {
    bnb::branch_and_bound(&problem.c, &problem.rows(), node_budget)
}

/// Goal-constrained program for one `alpha`, before any cuts.
pub fn goal_problem(weights: &WeightedDigraph, config: &SynthesisConfig, alpha: &[f64]) -> Result<BilpProblem> {
    let c = build_cost(config.goal, weights, alpha, config.beta, config.gamma)?;
    let mut p = BilpProblem::cycle_space(weights.graph(), c);
    match config.goal {
        Goal::Translation => {
            let theta = weights.theta().to_vec();
            p.le.push((theta.clone(), config.eps_theta));
            p.le.push((theta.iter().map(|t| -t).collect(), config.eps_theta));
        }
        Goal::Rotation => {
            for axis in 0..2 {
                let row: Vec<f64> = weights.p().iter().map(|p| p[axis]).collect();
                p.le.push((row.clone(), config.eps_t));
                p.le.push((row.iter().map(|v| -v).collect(), config.eps_t));
            }
        }
    }
    p.add_min_length(config.min_length);
    Ok(p)
}

/// Predicted one-cycle motion under mean weights, canonical start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
    /// `S_p^T z`
    pub sp: f64,
    /// `S_theta^T z`
    pub stheta: f64,
}

pub fn predict(gait: &GaitVector, weights: &WeightedDigraph) -> Prediction {
    let g = cycle_transform(&weights.mean_transforms(&gait.edges), 0).expect("cycles are nonempty");
    Prediction {
        dx: g.p.x,
        dy: g.p.y,
        dtheta: g.theta,
        sp: gait.edges.iter().map(|&e| weights.s_p()[e]).sum(),
        stheta: gait.edges.iter().map(|&e| weights.s_theta()[e]).sum(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedGait {
    pub gait: GaitVector,
    pub predicted: Prediction,
    pub objective: f64,
    pub alpha: Vec<f64>,
    pub config: SynthesisConfig,
    pub cuts: usize,
    /// Number of sweep samples that produced this gait.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Found,
    Infeasible,
    CutLimit,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub alpha: Vec<f64>,
    pub status: SampleStatus,
    pub objective: Option<f64>,
    pub cuts: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisReport {
    /// Deduplicated, ascending objective.
    pub gaits: Vec<SynthesizedGait>,
    /// One entry per sweep sample, in sweep order.
    pub samples: Vec<SampleReport>,
}

/// Runs the cut loop for one `alpha`.
pub fn synthesize_alpha(
    weights: &WeightedDigraph,
    config: &SynthesisConfig,
    alpha: &[f64],
) -> Result<(SampleReport, Option<SynthesizedGait>)> {
    let mut problem = goal_problem(weights, config, alpha)?;
    let graph = weights.graph();
    let mut nodes = 0;
    let report = |status, objective, cuts, nodes| SampleReport {
        alpha: alpha.to_vec(),
        status,
        objective,
        cuts,
        nodes,
    };
    for _ in 0..config.max_cuts {
        let sol = match solve_bilp(&problem, config.node_budget) {
            Ok(sol) => sol,
            Err(Error::Resource { .. }) => {
                return Ok((report(SampleStatus::BudgetExhausted, None, problem.cuts.len(), nodes), None));
            }
            Err(e) => return Err(e),
        };
        nodes += sol.stats.nodes;
        let Some(z) = sol.z else {
            return Ok((report(SampleStatus::Infeasible, None, problem.cuts.len(), nodes), None));
        };
        if diagnose_cycle(&z, graph).is_ok() {
            let gait = order_cycle(&z, graph)?;
            let objective = problem.objective(&z);
            let cuts = problem.cuts.len();
            let synthesized = SynthesizedGait {
                predicted: predict(&gait, weights),
                gait,
                objective,
                alpha: alpha.to_vec(),
                config: config.clone(),
                cuts,
                multiplicity: 1,
            };
            return Ok((report(SampleStatus::Found, Some(objective), cuts, nodes), Some(synthesized)));
        }
        problem.add_cut(&z);
    }
    Ok((report(SampleStatus::CutLimit, None, problem.cuts.len(), nodes), None))
}

/// The `alpha` values a configuration sweeps over.
pub fn sweep_alphas<R: Rng + ?Sized>(config: &SynthesisConfig, rng: &mut R) -> Vec<Vec<f64>> {
    match &config.alpha {
        Some(a) => vec![a.clone()],
        None => lhs_sample(config.samples, config.goal.alpha_dims(), rng)
            .into_iter()
            .map(|row| row.into_iter().map(|h| map_to_range(h, config.alpha_range)).collect())
            .collect(),
    }
}

/// Full sweep. Samples are solved in parallel; the result does not depend
/// on scheduling.
pub fn synthesize<R: Rng + ?Sized>(weights: &WeightedDigraph, config: &SynthesisConfig, rng: &mut R) -> Result<SynthesisReport> {
    config.validate()?;
    let alphas = sweep_alphas(config, rng);
    let results = alphas
        .par_iter()
        .map(|alpha| synthesize_alpha(weights, config, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::with_capacity(results.len());
    let mut found = Vec::new();
    for (report, gait) in results {
        samples.push(report);
        found.extend(gait);
    }
    found.sort_by(|a, b| a.objective.total_cmp(&b.objective).then_with(|| a.gait.bitstring().cmp(&b.gait.bitstring())));
    let mut gaits: Vec<SynthesizedGait> = Vec::new();
    for g in found {
        match gaits.iter_mut().find(|k| k.gait.z == g.gait.z) {
            Some(k) => k.multiplicity += 1,
            None => gaits.push(g),
        }
    }
    Ok(SynthesisReport { gaits, samples })
}
