use nalgebra::{Vector2, Vector3};

use super::PoseSample;
use super::pose::wrap_angle;
use crate::error::{Error, Result};
use crate::se2::{rotation, Se2Transform};
use crate::state_graph::{EulerianPlan, StateDigraph};

/// One measured execution of a motion primitive, `(dx, dy, dtheta)` in the
/// body frame at the start of the primitive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeObservation {
    pub edge: usize,
    pub delta: Vector3<f64>,
}

/// Pose at time `t`: linear in position, shortest arc in angle. Clamps to
/// the first sample before the trace starts.
fn pose_at(poses: &[PoseSample], t: f64) -> (Vector2<f64>, f64) {
    let idx = poses.partition_point(|s| s.t <= t);
    if idx == 0 {
        let s = &poses[0];
        return (Vector2::new(s.x, s.y), s.theta);
    }
    let a = &poses[idx - 1];
    if idx == poses.len() || a.t == t {
        return (Vector2::new(a.x, a.y), a.theta);
    }
    let b = &poses[idx];
    let f = (t - a.t) / (b.t - a.t);
    let pa = Vector2::new(a.x, a.y);
    let pb = Vector2::new(b.x, b.y);
    (pa + (pb - pa) * f, a.theta + wrap_angle(b.theta - a.theta) * f)
}

/// Cuts a pose trace into one window of `tau_ms` per scheduled edge
/// (edge `k` spans `[k tau, (k+1) tau)` from `t = 0`) and differences the
/// window endpoints in the body frame at window start.
pub fn segment_trace(poses: &[PoseSample], edges: &[usize], tau_ms: f64) -> Result<Vec<EdgeObservation>> {
    if !(tau_ms > 0.0) {
        return Err(Error::domain(format!("tau must be positive, got {tau_ms} ms")));
    }
    if let Some(w) = poses.windows(2).find(|w| !(w[1].t > w[0].t)) {
        return Err(Error::domain(format!(
            "trace time is not strictly increasing at frame {}",
            w[1].frame
        )));
    }
    let tau = tau_ms / 1000.0;
    let needed = edges.len() as f64 * tau;
    let trace_end = poses.last().map_or(f64::NEG_INFINITY, |s| s.t);
    // sub-microsecond slack for boundaries that land on the final frame
    if trace_end < needed - 1e-9 {
        let missing = edges
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k + 1) as f64 * tau > trace_end + 1e-9)
            .map(|(_, &e)| e)
            .collect();
        return Err(Error::Truncation {
            trace_end_s: trace_end,
            needed_s: needed,
            missing,
        });
    }
    Ok(edges
        .iter()
        .enumerate()
        .map(|(k, &edge)| {
            let (p0, th0) = pose_at(poses, k as f64 * tau);
            let (p1, th1) = pose_at(poses, (k + 1) as f64 * tau);
            let dp = rotation(-th0) * (p1 - p0);
            EdgeObservation {
                edge,
                delta: Vector3::new(dp.x, dp.y, th1 - th0),
            }
        })
        .collect())
}

/// Groups observations from every trial of a plan by edge.
pub fn collect_observations(
    plan: &EulerianPlan,
    graph: &StateDigraph,
    traces: &[Vec<PoseSample>],
) -> Result<Vec<Vec<Vector3<f64>>>> {
    if traces.len() != plan.trials.len() {
        return Err(Error::domain(format!(
            "{} traces supplied for a {}-trial plan",
            traces.len(),
            plan.trials.len()
        )));
    }
    let mut by_edge = vec![Vec::new(); graph.m()];
    for (trial, trace) in traces.iter().enumerate() {
        for obs in segment_trace(trace, &plan.trial_edges(trial, graph), plan.tau_ms)? {
            by_edge[obs.edge].push(obs.delta);
        }
    }
    Ok(by_edge)
}

/// Synthetic pose trace for executing `motions` back to back from `start`,
/// `tau_ms` each, sampled `samples_per_primitive` times per primitive with
/// window boundaries landing exactly on samples.
///
/// Inside a window the pose moves linearly from one boundary pose to the
/// next, so [`segment_trace`] inverts this exactly.
pub fn render_trace(
    motions: &[Se2Transform],
    tau_ms: f64,
    samples_per_primitive: usize,
    start: Se2Transform,
) -> Vec<PoseSample> {
    let steps = samples_per_primitive.max(1);
    let tau = tau_ms / 1000.0;
    let mut boundary = vec![start];
    for g in motions {
        let last = *boundary.last().unwrap();
        boundary.push(last.compose(g));
    }
    let mut samples = Vec::with_capacity(motions.len() * steps + 1);
    for (k, pair) in boundary.windows(2).enumerate() {
        for s in 0..steps {
            let f = s as f64 / steps as f64;
            let p = pair[0].p + (pair[1].p - pair[0].p) * f;
            samples.push(PoseSample {
                frame: samples.len(),
                t: if s == 0 { k as f64 * tau } else { (k as f64 + f) * tau },
                x: p.x,
                y: p.y,
                theta: pair[0].theta + (pair[1].theta - pair[0].theta) * f,
            });
        }
    }
    let end = *boundary.last().unwrap();
    samples.push(PoseSample {
        frame: samples.len(),
        t: motions.len() as f64 * tau,
        x: end.p.x,
        y: end.p.y,
        theta: end.theta,
    });
    samples
}
