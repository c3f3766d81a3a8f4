//! Probabilistic model-free gait synthesis for multi-limb soft robots.
//!
//! A robot with `n_l` limbs of `n_s` discrete states is a complete digraph
//! of `n_s^n_l` states whose edges carry learned SE(2) motion statistics.
//! Gaits are simple cycles of that digraph, found by binary integer
//! programming with no-good cuts and checked against exhaustive
//! enumeration on small graphs.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod cycles;
pub mod error;
pub mod io;
pub mod learning;
pub mod oracle;
pub mod se2;
pub mod simulate;
pub mod state_graph;
pub mod synthesis;

pub use cycles::{enumerate_simple_cycles, is_simple_cycle, order_cycle, GaitVector};
pub use error::{Error, Result};
pub use learning::{estimate_weights, EdgeWeight, WeightedDigraph};
pub use se2::Se2Transform;
pub use state_graph::{plan_trials, EulerianPlan, StateDigraph};
pub use synthesis::{synthesize, Goal, SynthesisConfig, SynthesisReport};
