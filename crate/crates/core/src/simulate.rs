//! Open-loop rollouts of gaits on the learned model and per-cycle speed
//! statistics.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::WeightedDigraph;
use crate::se2::Se2Transform;

/// Body length of the three-limb robot, mm.
pub const BODY_LENGTH_THREE_LIMB_MM: f64 = 220.0;
/// Body length of the four-limb robot, mm.
pub const BODY_LENGTH_FOUR_LIMB_MM: f64 = 350.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RolloutMode {
    Mean,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    /// 1-based cycle in progress; 0 for the initial pose.
    pub cycle: usize,
    /// Primitives completed within the cycle.
    pub primitive: usize,
    pub t_s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl TrajectorySample {
    pub fn pose(&self) -> Se2Transform {
        Se2Transform::new(self.x, self.y, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub tau_ms: f64,
    pub edges_per_cycle: usize,
}

impl Trajectory {
    /// Pose at the start of the rollout and after each completed cycle.
    pub fn cycle_poses(&self) -> Vec<Se2Transform> {
        self.samples
            .iter()
            .step_by(self.edges_per_cycle.max(1))
            .map(TrajectorySample::pose)
            .collect()
    }
}

/// Symmetric square root factor with eigenvalues in `[-1e-9, 0)` clipped.
fn factor(sigma: &Matrix3<f64>, edge: usize) -> Result<Matrix3<f64>> {
    let sym = (sigma + sigma.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < -1e-9 || !min_eigenvalue.is_finite() {
        return Err(Error::Model { edge, min_eigenvalue });
    }
    let root = Matrix3::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    Ok(eig.eigenvectors * root)
}

/// Executes the ordered `edges` of a cycle `cycles` times from the
/// identity pose.
pub fn rollout<R: Rng + ?Sized>(
    edges: &[usize],
    weights: &WeightedDigraph,
    cycles: usize,
    mode: RolloutMode,
    rng: &mut R,
    tau_ms: f64,
) -> Result<Trajectory> {
    if cycles < 1 {
        return Err(Error::domain("at least one cycle is required"));
    }
    if edges.is_empty() {
        return Err(Error::domain("a gait needs at least one edge"));
    }
    if let Some(&e) = edges.iter().find(|&&e| e >= weights.graph().m()) {
        return Err(Error::domain(format!("edge e{} is not in the digraph", e + 1)));
    }
    let factors = match mode {
        RolloutMode::Mean => Vec::new(),
        RolloutMode::Sampled => edges
            .iter()
            .map(|&e| factor(&weights.weight(e).sigma, e))
            .collect::<Result<Vec<_>>>()?,
    };
    let tau = tau_ms / 1000.0;
    let mut pose = Se2Transform::identity();
    let mut samples = Vec::with_capacity(cycles * edges.len() + 1);
    samples.push(TrajectorySample {
        cycle: 0,
        primitive: 0,
        t_s: 0.0,
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    });
    for c in 0..cycles {
        for (k, &e) in edges.iter().enumerate() {
            let mu = weights.weight(e).mu;
            let d = match mode {
                RolloutMode::Mean => mu,
                RolloutMode::Sampled => {
                    let z = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                    mu + factors[k] * z
                }
            };
            pose = pose.compose(&Se2Transform::new(d.x, d.y, d.z));
            samples.push(TrajectorySample {
                cycle: c + 1,
                primitive: k + 1,
                t_s: samples.len() as f64 * tau,
                x: pose.p.x,
                y: pose.p.y,
                theta: pose.theta,
            });
        }
    }
    Ok(Trajectory {
        samples,
        tau_ms,
        edges_per_cycle: edges.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationRecord {
    pub gait_id: String,
    pub cycles: usize,
    /// mm/s
    pub mean_v: f64,
    pub std_v: Option<f64>,
    /// rad/s
    pub mean_w: f64,
    pub std_w: Option<f64>,
    pub body_lengths_per_s: Option<f64>,
}

fn mean_std(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = (xs.len() >= 2).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, std)
}

/// Translational and rotational speed per completed cycle, averaged over
/// cycles. Standard deviations need at least two cycles.
pub fn characterize(gait_id: &str, trajectory: &Trajectory, body_length_mm: Option<f64>) -> Result<CharacterizationRecord> {
    let poses = trajectory.cycle_poses();
    let completed = (trajectory.samples.len().saturating_sub(1)) / trajectory.edges_per_cycle.max(1);
    if completed < 1 || trajectory.edges_per_cycle == 0 {
        return Err(Error::domain("trajectory has no completed cycle"));
    }
    let period = trajectory.edges_per_cycle as f64 * trajectory.tau_ms / 1000.0;
    let (v, w): (Vec<f64>, Vec<f64>) = poses[..=completed]
        .windows(2)
        .map(|p| ((p[1].p - p[0].p).norm() / period, (p[1].theta - p[0].theta).abs() / period))
        .unzip();
    let (mean_v, std_v) = mean_std(&v);
    let (mean_w, std_w) = mean_std(&w);
    Ok(CharacterizationRecord {
        gait_id: gait_id.to_string(),
        cycles: completed,
        mean_v,
        std_v,
        mean_w,
        std_w,
        body_lengths_per_s: body_length_mm.map(|bl| mean_v / bl),
    })
}

/// Percent change of the best synthesized speed over the best intuitive
/// one.
pub fn improvement(best_synthesized: f64, best_intuitive: f64) -> Result<f64> {
    if !(best_intuitive > 0.0 && best_intuitive.is_finite()) {
        return Err(Error::UndefinedBaseline(best_intuitive));
    }
    Ok(100.0 * (best_synthesized - best_intuitive) / best_intuitive)
}
