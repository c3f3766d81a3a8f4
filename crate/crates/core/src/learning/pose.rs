use nalgebra::Vector2;

use super::{MarkerFrame, PoseSample};
use crate::error::{Error, Result};
use crate::se2::Se2Transform;

/// Least-squares planar rigid transform taking `reference` onto `current`
/// (point `k` corresponds to point `k`), minimizing
/// `sum |R q_k + t - q'_k|^2`.
pub fn estimate_pose(reference: &[Vector2<f64>], current: &[Vector2<f64>]) -> Result<Se2Transform> {
    if reference.len() != current.len() {
        return Err(Error::Degenerate(format!(
            "{} reference points but {} current points",
            reference.len(),
            current.len()
        )));
    }
    if reference.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{} point(s) cannot fix a planar rotation",
            reference.len()
        )));
    }
    let c_ref = centroid(reference);
    let c_cur = centroid(current);
    let (mut dot, mut cross, mut spread) = (0.0, 0.0, 0.0);
    for (q, q2) in reference.iter().zip(current) {
        let a = q - c_ref;
        let b = q2 - c_cur;
        dot += a.dot(&b);
        cross += a.x * b.y - a.y * b.x;
        spread += a.norm_squared();
    }
    let scale = spread.max(current.iter().map(|q| (q - c_cur).norm_squared()).sum());
    if spread <= 1e-18 || dot.hypot(cross) <= 1e-12 * scale {
        return Err(Error::Degenerate("marker points are coincident".into()));
    }
    let theta = cross.atan2(dot);
    let r = crate::se2::rotation(theta);
    Ok(Se2Transform {
        theta,
        p: c_cur - r * c_ref,
    })
}

pub(crate) fn centroid(points: &[Vector2<f64>]) -> Vector2<f64> {
    points.iter().sum::<Vector2<f64>>() / points.len() as f64
}

/// Fills occluded markers of the current frame from the previous frame's
/// (complete) marker set.
///
/// Visible markers are matched to previous markers by nearest neighbour,
/// the frame-to-frame motion is estimated from the matched pairs, and each
/// unmatched previous marker is pushed through that motion. The result is
/// ordered like `previous`.
pub fn reconstruct_occluded(
    previous: &[Vector2<f64>],
    current: &[Option<Vector2<f64>>],
    frame: usize,
) -> Result<(Vec<Vector2<f64>>, Se2Transform)> {
    let visible: Vec<Vector2<f64>> = current.iter().flatten().copied().collect();
    if visible.len() < 2 {
        return Err(Error::UnrecoverableFrame {
            frame,
            visible: visible.len(),
        });
    }
    let assignment = nearest_neighbour_assignment(previous, &visible);
    let (from, to): (Vec<_>, Vec<_>) = assignment
        .iter()
        .enumerate()
        .filter_map(|(i, slot)| slot.map(|k| (previous[i], visible[k])))
        .unzip();
    let motion = estimate_pose(&from, &to)?;
    let markers = previous
        .iter()
        .zip(&assignment)
        .map(|(prev, slot)| match slot {
            Some(k) => visible[*k],
            None => motion.apply(prev),
        })
        .collect();
    Ok((markers, motion))
}

/// Greedy closest-pair matching; `result[i]` is the visible point assigned
/// to previous marker `i`.
fn nearest_neighbour_assignment(previous: &[Vector2<f64>], visible: &[Vector2<f64>]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = previous
        .iter()
        .enumerate()
        .flat_map(|(i, p)| visible.iter().enumerate().map(move |(k, v)| ((p - v).norm_squared(), i, k)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut result = vec![None; previous.len()];
    let mut taken = vec![false; visible.len()];
    for (_, i, k) in pairs {
        if result[i].is_none() && !taken[k] {
            result[i] = Some(k);
            taken[k] = true;
        }
    }
    result
}

/// Poses recovered from a marker trace, plus the frames that had to be
/// dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerTrack {
    pub poses: Vec<PoseSample>,
    pub dropped_frames: Vec<usize>,
}

/// Converts a marker trace into a pose trace. The first frame is the
/// reference and must show every marker; position is the marker centroid in
/// global coordinates and orientation is unwrapped relative to the first
/// frame.
pub fn track_markers(frames: &[MarkerFrame]) -> Result<MarkerTrack> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Degenerate("empty marker trace".into()))?;
    let reference: Vec<Vector2<f64>> = first
        .markers
        .iter()
        .map(|m| m.ok_or_else(|| Error::Degenerate("reference frame has occluded markers".into())))
        .collect::<Result<_>>()?;

    let mut previous = reference.clone();
    let mut poses = Vec::with_capacity(frames.len());
    let mut dropped_frames = Vec::new();
    let mut last_theta: Option<f64> = None;
    for frame in frames {
        if frame.markers.len() != reference.len() {
            return Err(Error::Degenerate(format!(
                "frame {} has {} markers, expected {}",
                frame.frame,
                frame.markers.len(),
                reference.len()
            )));
        }
        let full = match reconstruct_occluded(&previous, &frame.markers, frame.frame) {
            Ok((full, _)) => full,
            Err(Error::UnrecoverableFrame { .. }) => {
                dropped_frames.push(frame.frame);
                continue;
            }
            Err(e) => return Err(e),
        };
        let pose = estimate_pose(&reference, &full)?;
        let theta = match last_theta {
            Some(prev) => prev + wrap_angle(pose.theta - prev),
            None => pose.theta,
        };
        last_theta = Some(theta);
        let c = centroid(&full);
        poses.push(PoseSample {
            frame: frame.frame,
            t: frame.t,
            x: c.x,
            y: c.y,
            theta,
        });
        previous = full;
    }
    Ok(MarkerTrack { poses, dropped_frames })
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Removes `2 pi` jumps from a sequence of wrapped angles.
pub fn unwrap_angles(angles: &mut [f64]) {
    for i in 1..angles.len() {
        angles[i] = angles[i - 1] + wrap_angle(angles[i] - angles[i - 1]);
    }
}
