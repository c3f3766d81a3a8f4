//! From recorded experiments to a weighted digraph: marker-based pose
//! estimation, schedule-driven trace segmentation and per-edge Gaussian
//! statistics.

mod pose;
mod segment;
mod weights;

pub use pose::{estimate_pose, reconstruct_occluded, track_markers, unwrap_angles, wrap_angle, MarkerTrack};
pub use segment::{collect_observations, render_trace, segment_trace, EdgeObservation};
pub use weights::{estimate_weights, synthetic_weights, EdgeWeight, SyntheticSpec, WeightedDigraph};

use nalgebra::Vector2;

/// Robot pose in the global frame at one video frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub frame: usize,
    /// seconds
    pub t: f64,
    /// mm
    pub x: f64,
    /// mm
    pub y: f64,
    /// radians, unwrapped
    pub theta: f64,
}

/// Fiducial marker centroids for one video frame; `None` marks occlusion.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerFrame {
    pub frame: usize,
    pub t: f64,
    pub markers: Vec<Option<Vector2<f64>>>,
}
