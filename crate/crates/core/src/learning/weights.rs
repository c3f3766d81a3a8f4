use nalgebra::{Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::se2::Se2Transform;
use crate::state_graph::{PrunedDigraph, StateDigraph};

/// Gaussian model of one motion primitive in its initial-vertex frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeight {
    /// `(dx mm, dy mm, dtheta rad)`
    pub mu: Vector3<f64>,
    pub sigma: Matrix3<f64>,
    pub count: usize,
}

impl EdgeWeight {
    pub fn zero() -> Self {
        Self {
            mu: Vector3::zeros(),
            sigma: Matrix3::zeros(),
            count: 1,
        }
    }

    pub fn mean_transform(&self) -> Se2Transform {
        Se2Transform::new(self.mu.x, self.mu.y, self.mu.z)
    }

    /// `tr(Sigma_pp)`
    pub fn translation_variance(&self) -> f64 {
        self.sigma[(0, 0)] + self.sigma[(1, 1)]
    }

    /// `Sigma_thetatheta`
    pub fn rotation_variance(&self) -> f64 {
        self.sigma[(2, 2)]
    }

    /// Smallest eigenvalue of the symmetrized covariance.
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (self.sigma + self.sigma.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }

    /// Draws one displacement. Slightly negative eigenvalues from round-off
    /// are clipped to zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector3<f64> {
        let sym = (self.sigma + self.sigma.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let z = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let scaled = Vector3::from_fn(|i, _| eig.eigenvalues[i].max(0.0).sqrt() * z[i]);
        self.mu + eig.eigenvectors * scaled
    }
}

/// State digraph with one [`EdgeWeight`] per edge and the stacked views used
/// by the synthesizer.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    graph: StateDigraph,
    weights: Vec<EdgeWeight>,
    p: Vec<Vector2<f64>>,
    theta: Vec<f64>,
    s_p: Vec<f64>,
    s_theta: Vec<f64>,
}

impl WeightedDigraph {
    /// Checks one weight per edge and PSD covariances (eigenvalues
    /// `>= -1e-9` after symmetrization).
    pub fn new(graph: StateDigraph, weights: Vec<EdgeWeight>) -> Result<Self> {
        if weights.len() != graph.m() {
            return Err(Error::domain(format!(
                "{} weights supplied for a digraph with {} edges",
                weights.len(),
                graph.m()
            )));
        }
        for (edge, w) in weights.iter().enumerate() {
            if w.count == 0 {
                return Err(Error::MissingEdges(vec![edge]));
            }
            let min_eigenvalue = w.min_eigenvalue();
            if min_eigenvalue < -1e-9 || !min_eigenvalue.is_finite() {
                return Err(Error::Model { edge, min_eigenvalue });
            }
        }
        Ok(Self {
            p: weights.iter().map(|w| Vector2::new(w.mu.x, w.mu.y)).collect(),
            theta: weights.iter().map(|w| w.mu.z).collect(),
            s_p: weights.iter().map(EdgeWeight::translation_variance).collect(),
            s_theta: weights.iter().map(EdgeWeight::rotation_variance).collect(),
            graph,
            weights,
        })
    }

    pub fn graph(&self) -> &StateDigraph {
        &self.graph
    }

    pub fn weights(&self) -> &[EdgeWeight] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> &EdgeWeight {
        &self.weights[edge]
    }

    /// Mean translations, the columns of `P`.
    pub fn p(&self) -> &[Vector2<f64>] {
        &self.p
    }

    /// Mean rotations, `Theta`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn s_p(&self) -> &[f64] {
        &self.s_p
    }

    pub fn s_theta(&self) -> &[f64] {
        &self.s_theta
    }

    pub fn mean_transforms(&self, edges: &[usize]) -> Vec<Se2Transform> {
        edges.iter().map(|&e| self.weights[e].mean_transform()).collect()
    }

    /// Edges estimated from a single observation (zero covariance by
    /// construction).
    pub fn single_observation_edges(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&e| self.weights[e].count == 1).collect()
    }

    /// Carries weights over to a pruned digraph; surviving primitives keep
    /// their learned statistics.
    pub fn restrict(&self, pruned: &PrunedDigraph) -> Result<WeightedDigraph> {
        if pruned.edge_map.len() != self.graph.m() {
            return Err(Error::domain("pruned digraph does not come from this digraph"));
        }
        let weights = pruned.surviving_edges.iter().map(|&old| self.weights[old].clone()).collect();
        WeightedDigraph::new(pruned.graph.clone(), weights)
    }
}

/// Per-edge sample mean and unbiased covariance (denominator
/// `max(count - 1, 1)`).
pub fn estimate_weights(observations: &[Vec<Vector3<f64>>], graph: &StateDigraph) -> Result<WeightedDigraph> {
    if observations.len() != graph.m() {
        return Err(Error::domain(format!(
            "observations for {} edges supplied, digraph has {}",
            observations.len(),
            graph.m()
        )));
    }
    let missing: Vec<usize> = (0..graph.m()).filter(|&e| observations[e].is_empty()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingEdges(missing));
    }
    let weights = observations
        .iter()
        .map(|obs| {
            let count = obs.len();
            let mu = obs.iter().sum::<Vector3<f64>>() / count as f64;
            let scatter = obs
                .iter()
                .map(|x| (x - mu) * (x - mu).transpose())
                .sum::<Matrix3<f64>>();
            EdgeWeight {
                mu,
                sigma: scatter / count.saturating_sub(1).max(1) as f64,
                count,
            }
        })
        .collect();
    WeightedDigraph::new(graph.clone(), weights)
}

/// Parameters of [`synthetic_weights`]. Mean components are drawn uniformly
/// from the ranges; `sigma = D A A^T D` with `A` uniform in `[-1, 1]` and
/// `D = diag(noise_p, noise_p, noise_theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub dx: (f64, f64),
    pub dy: (f64, f64),
    pub dtheta: (f64, f64),
    pub noise_p: f64,
    pub noise_theta: f64,
    pub count: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            dx: (-10.0, 10.0),
            dy: (-10.0, 10.0),
            dtheta: (-0.2, 0.2),
            noise_p: 1.0,
            noise_theta: 0.02,
            count: 5,
        }
    }
}

impl SyntheticSpec {
    pub fn zero() -> Self {
        Self {
            dx: (0.0, 0.0),
            dy: (0.0, 0.0),
            dtheta: (0.0, 0.0),
            noise_p: 0.0,
            noise_theta: 0.0,
            count: 5,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Deterministic random weights for tests and demos.
pub fn synthetic_weights(graph: &StateDigraph, seed: u64, spec: &SyntheticSpec) -> WeightedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Matrix3::from_diagonal(&Vector3::new(spec.noise_p, spec.noise_p, spec.noise_theta));
    let weights = (0..graph.m())
        .map(|_| {
            let mu = Vector3::new(
                uniform(&mut rng, spec.dx),
                uniform(&mut rng, spec.dy),
                uniform(&mut rng, spec.dtheta),
            );
            let a = Matrix3::from_fn(|_, _| uniform(&mut rng, (-1.0, 1.0)));
            let sigma = d * a * a.transpose() * d;
            EdgeWeight {
                mu,
                sigma: (sigma + sigma.transpose()) * 0.5,
                count: spec.count.max(1),
            }
        })
        .collect();
    WeightedDigraph::new(graph.clone(), weights).expect("A A^T is positive semidefinite")
}
