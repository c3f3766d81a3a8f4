//! Exhaustive nonlinear scoring of simple cycles, cycle-level uncertainty,
//! and Pareto fronts for small digraphs.

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::Rng;
use rayon::prelude::*;

use crate::cycles::{enumerate_simple_cycles, EnumerationLimits, GaitVector};
use crate::error::Result;
use crate::learning::{EdgeWeight, WeightedDigraph};
use crate::se2::{cycle_transform, rotation, rotation_derivative, Se2Transform};

/// First-order covariance of `g_1 g_2 ... g_l` for independent Gaussian
/// edges, linearized at the means.
pub fn propagate_cycle_covariance(edges: &[&EdgeWeight]) -> Matrix3<f64> {
    let l = edges.len();
    // heading before each edge
    let mut phi = Vec::with_capacity(l);
    let mut acc = 0.0;
    for e in edges {
        phi.push(acc);
        acc += e.mu.z;
    }
    // tail[k] = sum_{i > k} R'(phi_i) p_i
    let mut tail = vec![Vector2::zeros(); l];
    for k in (0..l.saturating_sub(1)).rev() {
        let p = Vector2::new(edges[k + 1].mu.x, edges[k + 1].mu.y);
        tail[k] = tail[k + 1] + rotation_derivative(phi[k + 1]) * p;
    }
    let mut sigma = Matrix3::zeros();
    for k in 0..l {
        let r = rotation(phi[k]);
        let mut j = Matrix3::zeros();
        j.fixed_view_mut::<2, 2>(0, 0).copy_from(&r);
        j.fixed_view_mut::<2, 1>(0, 2).copy_from(&tail[k]);
        j[(2, 2)] = 1.0;
        sigma += j * edges[k].sigma * j.transpose();
    }
    (sigma + sigma.transpose()) * 0.5
}

/// Sample mean and covariance of the composed cycle motion under
/// independent draws of every edge.
pub fn monte_carlo_cycle_covariance<R: Rng + ?Sized>(
    edges: &[&EdgeWeight],
    samples: usize,
    rng: &mut R,
) -> (Vector3<f64>, Matrix3<f64>) {
    let draws: Vec<Vector3<f64>> = (0..samples)
        .map(|_| {
            let g = edges.iter().fold(Se2Transform::identity(), |acc, e| {
                let d = e.sample(rng);
                acc.compose(&Se2Transform::new(d.x, d.y, d.z))
            });
            Vector3::new(g.p.x, g.p.y, g.theta)
        })
        .collect();
    let mean = draws.iter().sum::<Vector3<f64>>() / samples as f64;
    let cov = draws.iter().map(|d| (d - mean) * (d - mean).transpose()).sum::<Matrix3<f64>>()
        / samples.saturating_sub(1).max(1) as f64;
    (mean, cov)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleCostRecord {
    pub gait: GaitVector,
    pub j_t_nl: f64,
    pub j_theta_nl: f64,
    pub p_norm: f64,
    pub theta_abs: f64,
    pub s_p: f64,
    pub s_theta: f64,
    pub length: usize,
}

/// Length-normalized translation and rotation scores of one cycle; `p(z)`
/// is composed from the canonical start.
pub fn nonlinear_costs(gait: &GaitVector, weights: &WeightedDigraph, lambda_t: f64, lambda_theta: f64) -> CycleCostRecord {
    let edges: Vec<&EdgeWeight> = gait.edges.iter().map(|&e| weights.weight(e)).collect();
    let g = cycle_transform(&weights.mean_transforms(&gait.edges), 0).expect("cycles are nonempty");
    let sigma = propagate_cycle_covariance(&edges);
    let length = gait.len();
    let p_norm = g.p.norm();
    let theta_abs = g.theta.abs();
    let s_p = sigma[(0, 0)] + sigma[(1, 1)];
    let s_theta = sigma[(2, 2)];
    CycleCostRecord {
        gait: gait.clone(),
        j_t_nl: (p_norm + lambda_t * s_p) / length as f64,
        j_theta_nl: (theta_abs + lambda_theta * s_theta) / length as f64,
        p_norm,
        theta_abs,
        s_p,
        s_theta,
        length,
    }
}

/// Scores every simple cycle; refused above the enumeration cap.
pub fn exhaustive_evaluate(
    weights: &WeightedDigraph,
    lambda_t: f64,
    lambda_theta: f64,
    limits: EnumerationLimits,
) -> Result<Vec<CycleCostRecord>> {
    let cycles: Vec<GaitVector> = enumerate_simple_cycles(weights.graph(), limits)?.collect();
    Ok(cycles
        .par_iter()
        .map(|c| nonlinear_costs(c, weights, lambda_t, lambda_theta))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParetoMode {
    /// high `J_t,nl`, low `J_theta,nl`
    TranslationDominant,
    /// high `J_theta,nl`, low `J_t,nl`
    RotationDominant,
}

/// Indices (ascending) of the non-dominated records. Records equal on both
/// axes do not dominate each other.
pub fn pareto_front(records: &[CycleCostRecord], mode: ParetoMode) -> Vec<usize> {
    let key = |r: &CycleCostRecord| match mode {
        ParetoMode::TranslationDominant => (r.j_t_nl, r.j_theta_nl),
        ParetoMode::RotationDominant => (r.j_theta_nl, r.j_t_nl),
    };
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ua, la) = key(&records[a]);
        let (ub, lb) = key(&records[b]);
        ub.total_cmp(&ua).then(la.total_cmp(&lb))
    });
    let mut front = Vec::new();
    // lowest minimized score so far, and the best maximized score reaching it
    let mut best: Option<(f64, f64)> = None;
    for i in order {
        let (up, low) = key(&records[i]);
        let dominated = match best {
            Some((min_low, up_at_min)) => min_low < low || (min_low == low && up_at_min > up),
            None => false,
        };
        if !dominated {
            front.push(i);
        }
        if best.is_none_or(|(min_low, _)| low < min_low) {
            best = Some((low, up));
        }
    }
    front.sort_unstable();
    front
}
