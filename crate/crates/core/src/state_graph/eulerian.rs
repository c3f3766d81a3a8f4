use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StateDigraph;
use crate::error::{Error, Result};

/// Eulerian circuit of the complete digraph on `n` vertices with the vertex
/// order randomized by `rng`.
///
/// The returned walk is closed: its last entry repeats the first, so it has
/// `n (n - 1) + 1` entries.
pub fn stochastic_hierholzer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::domain(format!(
            "an Eulerian circuit needs at least 2 vertices, got {n}"
        )));
    }
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    Ok(hierholzer_from_order(&states))
}

/// The deterministic core of [`stochastic_hierholzer`] for a given vertex
/// order: for `i = n-1 .. 1` emit the pairs `(order[j], order[i])`,
/// `j = 0 .. i-1`, then close at `order[0]`.
pub fn hierholzer_from_order(order: &[usize]) -> Vec<usize> {
    let n = order.len();
    let mut walk = Vec::with_capacity(n * n.saturating_sub(1) + 1);
    for i in (1..n).rev() {
        for &from in &order[..i] {
            walk.push(from);
            walk.push(order[i]);
        }
    }
    if let Some(&first) = order.first() {
        walk.push(first);
    }
    walk
}

/// True iff `walk` is closed and traverses every edge of `graph` exactly
/// once.
pub fn eulerian_verify(walk: &[usize], graph: &StateDigraph) -> bool {
    if walk.len() != graph.m() + 1 || walk.first() != walk.last() {
        return false;
    }
    let mut seen = vec![false; graph.m()];
    for pair in walk.windows(2) {
        match graph.edge_index(pair[0], pair[1]) {
            Some(e) if !seen[e] => seen[e] = true,
            _ => return false,
        }
    }
    seen.iter().all(|&s| s)
}

/// Experiment schedule: one shuffled Eulerian circuit per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianPlan {
    pub seed: u64,
    pub tau_ms: f64,
    pub n: usize,
    pub trials: Vec<Vec<usize>>,
}

impl EulerianPlan {
    /// Edges executed per trial.
    pub fn edges_per_trial(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Total actuation time, `trials * m * tau`.
    pub fn t_total_ms(&self) -> f64 {
        self.trials.len() as f64 * self.edges_per_trial() as f64 * self.tau_ms
    }

    /// Edge indices in execution order for one trial.
    pub fn trial_edges(&self, trial: usize, graph: &StateDigraph) -> Vec<usize> {
        self.trials[trial]
            .windows(2)
            .map(|p| graph.edge_index(p[0], p[1]).expect("plan walks only use graph edges"))
            .collect()
    }
}

/// Draws `trials` independent Eulerian schedules from a ChaCha8 stream
/// seeded with `seed`.
pub fn plan_trials(graph: &StateDigraph, trials: usize, tau_ms: f64, seed: u64) -> Result<EulerianPlan> {
    if trials < 1 {
        return Err(Error::domain("at least one trial is required"));
    }
    if !(tau_ms > 0.0 && tau_ms.is_finite()) {
        return Err(Error::domain(format!("tau must be positive, got {tau_ms} ms")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedules = (0..trials)
        .map(|_| stochastic_hierholzer(graph.n(), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(EulerianPlan {
        seed,
        tau_ms,
        n: graph.n(),
        trials: schedules,
    })
}
