//! Planar rigid-body kinematics of gait cycles.
//!
//! A motion primitive moves the body frame by `(p, theta)` expressed in the
//! frame it started from. Chaining primitives is left-to-right composition,
//! `g_1 g_2 ... g_l`, so the translation of a cycle is reported in the frame
//! of its first edge's initial vertex.
//!
//! Angles are never wrapped: the rotation of a composition is the plain sum
//! of the parts.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se2Transform {
    /// Rotation in radians (unwrapped).
    pub theta: f64,
    /// Translation in mm.
    pub p: Vector2<f64>,
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Derivative of [`rotation`] with respect to the angle.
pub fn rotation_derivative(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(-s, -c, c, -s)
}

impl Se2Transform {
    pub fn identity() -> Self {
        Self {
            theta: 0.0,
            p: Vector2::zeros(),
        }
    }

    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            theta,
            p: Vector2::new(x, y),
        }
    }

    /// `R(theta)`, checked orthonormal with unit determinant.
    pub fn rotation(&self) -> Matrix2<f64> {
        let r = rotation(self.theta);
        debug_assert!((r.determinant() - 1.0).abs() < 1e-12);
        debug_assert!((r.transpose() * r - Matrix2::identity()).norm() < 1e-12);
        r
    }

    /// `self * other`: first move by `self`, then by `other` expressed in the
    /// frame `self` ends in.
    pub fn compose(&self, other: &Se2Transform) -> Se2Transform {
        Se2Transform {
            theta: self.theta + other.theta,
            p: self.p + rotation(self.theta) * other.p,
        }
    }

    pub fn inverse(&self) -> Se2Transform {
        Se2Transform {
            theta: -self.theta,
            p: -(rotation(-self.theta) * self.p),
        }
    }

    /// Maps a point from this frame into the parent frame.
    pub fn apply(&self, point: &Vector2<f64>) -> Vector2<f64> {
        rotation(self.theta) * point + self.p
    }

    /// Composes `self` with itself `k` times.
    pub fn power(&self, k: usize) -> Se2Transform {
        (0..k).fold(Se2Transform::identity(), |acc, _| acc.compose(self))
    }
}

impl Default for Se2Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl std::ops::Mul for Se2Transform {
    type Output = Se2Transform;

    fn mul(self, rhs: Se2Transform) -> Se2Transform {
        self.compose(&rhs)
    }
}

/// Composition of `len` consecutive edges of a cyclic sequence starting at
/// `start`, wrapping past the end.
pub fn path_transform(edges: &[Se2Transform], start: usize, len: usize) -> Se2Transform {
    let l = edges.len();
    (0..len).fold(Se2Transform::identity(), |acc, k| acc.compose(&edges[(start + k) % l]))
}

/// Transform of a whole cycle when execution begins at edge `start`:
/// `(g_i ... g_l)(g_1 ... g_{i-1})`.
pub fn cycle_transform(edges: &[Se2Transform], start: usize) -> Result<Se2Transform> {
    if edges.is_empty() {
        return Err(Error::domain("a cycle needs at least one edge"));
    }
    if start >= edges.len() {
        return Err(Error::domain(format!(
            "start edge {start} is out of range for a {}-edge cycle",
            edges.len()
        )));
    }
    let mut g = path_transform(edges, start, edges.len());
    // same summation order for every start, so the rotation is bit-identical
    g.theta = edges.iter().map(|e| e.theta).sum();
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitClass {
    Translation,
    Rotation,
    Neither,
}

/// Two-class gait taxonomy: zero net rotation makes a translation gait,
/// zero per-edge translation makes a rotation gait. A cycle passing both
/// tests is degenerate and reported as translation.
pub fn classify_gait(edges: &[Se2Transform], eps_t: f64, eps_theta: f64) -> GaitClass {
    let theta: f64 = edges.iter().map(|g| g.theta).sum();
    if theta.abs() <= eps_theta {
        GaitClass::Translation
    } else if edges.iter().all(|g| g.p.norm() <= eps_t) {
        GaitClass::Rotation
    } else {
        GaitClass::Neither
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTransformReport {
    /// Resultant translation for each start edge, in that edge's initial
    /// frame.
    pub deltas: Vec<Vector2<f64>>,
    pub theta_total: f64,
    pub classification: GaitClass,
    /// All `|delta_i|` agree within the tolerance.
    pub invariant: bool,
}

impl CycleTransformReport {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.deltas.iter().map(|d| d.norm()).collect()
    }
}

pub fn invariance_report(
    edges: &[Se2Transform],
    eps: f64,
    eps_t: f64,
    eps_theta: f64,
) -> Result<CycleTransformReport> {
    let transforms = (0..edges.len())
        .map(|i| cycle_transform(edges, i))
        .collect::<Result<Vec<_>>>()?;
    if transforms.is_empty() {
        return Err(Error::domain("a cycle needs at least one edge"));
    }
    let theta_total = edges.iter().map(|g| g.theta).sum();
    let deltas: Vec<Vector2<f64>> = transforms.iter().map(|g| g.p).collect();
    let (lo, hi) = deltas
        .iter()
        .map(|d| d.norm())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    Ok(CycleTransformReport {
        deltas,
        theta_total,
        classification: classify_gait(edges, eps_t, eps_theta),
        invariant: hi - lo <= eps,
    })
}
