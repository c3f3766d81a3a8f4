//! Python bindings. Vertices and edges are 0-based here, as in the Rust
//! API; only files and CLI output are 1-based.

use num_bigint::BigUint;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pmfc::cycles::{count_simple_cycles_formula, count_simple_cycles_loopless, EnumerationLimits};
use pmfc::learning::SyntheticSpec;
use pmfc::oracle::{exhaustive_evaluate, pareto_front, ParetoMode};
use pmfc::simulate::{characterize as characterize_rs, rollout as rollout_rs, RolloutMode};
use pmfc::state_graph::prune_failed_limbs;
use pmfc::state_graph::LimbFailure;

fn err(e: pmfc::Error) -> PyErr {
    if e.is_usage() {
        PyOSError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(name = "Se2Transform", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PySe2(pmfc::Se2Transform);

#[pymethods]
impl PySe2 {
    #[new]
    #[pyo3(signature = (x=0.0, y=0.0, theta=0.0))]
    fn new(x: f64, y: f64, theta: f64) -> Self {
        Self(pmfc::Se2Transform::new(x, y, theta))
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.p.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.p.y
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    fn compose(&self, other: &PySe2) -> Self {
        Self(self.0.compose(&other.0))
    }

    fn __mul__(&self, other: &PySe2) -> Self {
        self.compose(other)
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn apply(&self, point: (f64, f64)) -> (f64, f64) {
        let q = self.0.apply(&nalgebra::Vector2::new(point.0, point.1));
        (q.x, q.y)
    }

    fn as_tuple(&self) -> (f64, f64, f64) {
        (self.0.p.x, self.0.p.y, self.0.theta)
    }

    fn __repr__(&self) -> String {
        format!("Se2Transform(x={}, y={}, theta={})", self.0.p.x, self.0.p.y, self.0.theta)
    }
}

#[pyclass(name = "StateDigraph", frozen, from_py_object)]
#[derive(Clone)]
struct PyStateDigraph(pmfc::StateDigraph);

#[pymethods]
impl PyStateDigraph {
    #[new]
    #[pyo3(signature = (n_limbs, states_per_limb=2))]
    fn new(n_limbs: usize, states_per_limb: usize) -> PyResult<Self> {
        pmfc::StateDigraph::build(n_limbs, states_per_limb).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n_limbs(&self) -> usize {
        self.0.n_limbs()
    }

    #[getter]
    fn states_per_limb(&self) -> usize {
        self.0.states_per_limb()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().iter().map(|e| (e.source, e.target)).collect()
    }

    fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        self.0.edge_index(source, target)
    }

    fn robot_state(&self, vertex: usize) -> PyResult<Vec<usize>> {
        if vertex >= self.0.n() {
            return Err(PyValueError::new_err(format!("vertex {vertex} out of range")));
        }
        Ok(self.0.robot_state(vertex).limb_states().to_vec())
    }

    /// Incidence matrix `A = A+ - A-` as nested lists.
    fn incidence(&self) -> Vec<Vec<i8>> {
        let a = self.0.incidence();
        (0..a.rows()).map(|r| a.row(r).to_vec()).collect()
    }

    /// Eulerian trial schedule; each trial is a closed vertex walk.
    #[pyo3(signature = (trials=5, tau_ms=550.0, seed=0))]
    fn plan(&self, trials: usize, tau_ms: f64, seed: u64) -> PyResult<(Vec<Vec<usize>>, f64)> {
        let plan = pmfc::plan_trials(&self.0, trials, tau_ms, seed).map_err(err)?;
        let total = plan.t_total_ms();
        Ok((plan.trials, total))
    }

    /// Simple cycles as closed vertex sequences.
    #[pyo3(signature = (max_len=None, cap=10))]
    fn simple_cycles(&self, max_len: Option<usize>, cap: usize) -> PyResult<Vec<Vec<usize>>> {
        let cycles = pmfc::enumerate_simple_cycles(&self.0, EnumerationLimits { max_len, cap }).map_err(err)?;
        Ok(cycles.map(|c| c.vertices).collect())
    }

    fn is_simple_cycle(&self, z: Vec<bool>) -> bool {
        z.len() == self.0.m() && pmfc::is_simple_cycle(&z, &self.0)
    }

    /// Orders a binary edge vector into a closed vertex sequence.
    fn order_cycle(&self, z: Vec<bool>) -> PyResult<Vec<usize>> {
        if z.len() != self.0.m() {
            return Err(PyValueError::new_err(format!("expected {} entries, got {}", self.0.m(), z.len())));
        }
        pmfc::order_cycle(&z, &self.0).map(|g| g.vertices).map_err(err)
    }

    /// `(graph, surviving_vertices)` after pinning `(limb, state)` pairs.
    fn prune(&self, failures: Vec<(usize, usize)>) -> PyResult<(PyStateDigraph, Vec<usize>)> {
        let failures: Vec<LimbFailure> = failures.into_iter().map(|(limb, state)| LimbFailure { limb, state }).collect();
        let pruned = prune_failed_limbs(&self.0, &failures).map_err(err)?;
        Ok((PyStateDigraph(pruned.graph), pruned.surviving_vertices))
    }

    fn __repr__(&self) -> String {
        format!("StateDigraph(n_limbs={}, states_per_limb={}, n={}, m={})", self.0.n_limbs(), self.0.states_per_limb(), self.0.n(), self.0.m())
    }
}

#[pyclass(name = "WeightedDigraph", frozen, from_py_object)]
#[derive(Clone)]
struct PyWeights(pmfc::WeightedDigraph);

#[pymethods]
impl PyWeights {
    /// Random weights for experiments and tests.
    #[staticmethod]
    #[pyo3(signature = (graph, seed=0))]
    fn synthetic(graph: &PyStateDigraph, seed: u64) -> Self {
        Self(pmfc::learning::synthetic_weights(&graph.0, seed, &SyntheticSpec::default()))
    }

    /// Fits weights from per-edge observations `[[(dx, dy, dtheta), ...], ...]`.
    #[staticmethod]
    fn estimate(graph: &PyStateDigraph, observations: Vec<Vec<(f64, f64, f64)>>) -> PyResult<Self> {
        let obs: Vec<Vec<nalgebra::Vector3<f64>>> = observations
            .into_iter()
            .map(|edge| edge.into_iter().map(|(x, y, t)| nalgebra::Vector3::new(x, y, t)).collect())
            .collect();
        pmfc::estimate_weights(&obs, &graph.0).map(Self).map_err(err)
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        pmfc::io::read_weights(&path).map(Self).map_err(err)
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        pmfc::io::write_weights(&path, &self.0).map_err(err)
    }

    #[getter]
    fn graph(&self) -> PyStateDigraph {
        PyStateDigraph(self.0.graph().clone())
    }

    fn mu(&self, edge: usize) -> PyResult<(f64, f64, f64)> {
        let w = self.weight(edge)?;
        Ok((w.mu.x, w.mu.y, w.mu.z))
    }

    fn sigma(&self, edge: usize) -> PyResult<Vec<Vec<f64>>> {
        let w = self.weight(edge)?;
        Ok((0..3).map(|r| (0..3).map(|c| w.sigma[(r, c)]).collect()).collect())
    }

    fn count(&self, edge: usize) -> PyResult<usize> {
        Ok(self.weight(edge)?.count)
    }

    /// Mean motion of one pass around a closed vertex sequence.
    fn cycle_transform(&self, vertices: Vec<usize>) -> PyResult<PySe2> {
        let gait = pmfc::GaitVector::from_vertices(self.0.graph(), &vertices).map_err(err)?;
        pmfc::se2::cycle_transform(&self.0.mean_transforms(&gait.edges), 0).map(PySe2).map_err(err)
    }

    /// Scores every simple cycle; rows are dicts sorted like the enumeration.
    #[pyo3(signature = (lambda_t=1.0, lambda_theta=1.0, max_len=None, cap=10))]
    fn costs<'py>(
        &self,
        py: Python<'py>,
        lambda_t: f64,
        lambda_theta: f64,
        max_len: Option<usize>,
        cap: usize,
    ) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
        let records = exhaustive_evaluate(&self.0, lambda_t, lambda_theta, EnumerationLimits { max_len, cap }).map_err(err)?;
        let front_t = pareto_front(&records, ParetoMode::TranslationDominant);
        let front_theta = pareto_front(&records, ParetoMode::RotationDominant);
        records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("vertices", &r.gait.vertices)?;
                d.set_item("length", r.length)?;
                d.set_item("j_t_nl", r.j_t_nl)?;
                d.set_item("j_theta_nl", r.j_theta_nl)?;
                d.set_item("p_norm", r.p_norm)?;
                d.set_item("theta_abs", r.theta_abs)?;
                d.set_item("s_p", r.s_p)?;
                d.set_item("s_theta", r.s_theta)?;
                d.set_item("pareto_t", front_t.contains(&i))?;
                d.set_item("pareto_theta", front_theta.contains(&i))?;
                Ok(d)
            })
            .collect()
    }

    /// Gait synthesis sweep; returns one dict per distinct gait, best first.
    #[pyo3(signature = (goal, samples=100, max_cuts=50, beta=1.0, gamma=0.1, eps_t=None, eps_theta=None, alpha=None, seed=0))]
    #[allow(clippy::too_many_arguments)]
    fn synthesize<'py>(
        &self,
        py: Python<'py>,
        goal: &str,
        samples: usize,
        max_cuts: usize,
        beta: f64,
        gamma: f64,
        eps_t: Option<f64>,
        eps_theta: Option<f64>,
        alpha: Option<Vec<f64>>,
        seed: u64,
    ) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
        let goal = match goal {
            "translation" => pmfc::Goal::Translation,
            "rotation" => pmfc::Goal::Rotation,
            other => return Err(PyValueError::new_err(format!("unknown goal {other:?}"))),
        };
        let mut config = pmfc::SynthesisConfig::new(goal);
        config.samples = samples;
        config.max_cuts = max_cuts;
        config.beta = beta;
        config.gamma = gamma;
        config.alpha = alpha;
        if let Some(e) = eps_t {
            config.eps_t = e;
        }
        if let Some(e) = eps_theta {
            config.eps_theta = e;
        }
        let report = py
            .detach(|| pmfc::synthesize(&self.0, &config, &mut ChaCha8Rng::seed_from_u64(seed)))
            .map_err(err)?;
        report
            .gaits
            .iter()
            .map(|g| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("vertices", &g.gait.vertices)?;
                d.set_item("z", &g.gait.z)?;
                d.set_item("predicted", (g.predicted.dx, g.predicted.dy, g.predicted.dtheta))?;
                d.set_item("objective", g.objective)?;
                d.set_item("alpha", &g.alpha)?;
                d.set_item("cuts", g.cuts)?;
                d.set_item("multiplicity", g.multiplicity)?;
                Ok(d)
            })
            .collect()
    }

    /// Poses `(t_s, x, y, theta)` after every primitive of `cycles` passes.
    #[pyo3(signature = (vertices, cycles=10, sampled=false, tau_ms=550.0, seed=0))]
    fn rollout(&self, vertices: Vec<usize>, cycles: usize, sampled: bool, tau_ms: f64, seed: u64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        Ok(self.trajectory(&vertices, cycles, sampled, tau_ms, seed)?
            .samples
            .iter()
            .map(|s| (s.t_s, s.x, s.y, s.theta))
            .collect())
    }

    /// `(mean_v mm/s, std_v, mean_w rad/s, std_w, body_lengths_per_s)`.
    #[pyo3(signature = (vertices, cycles=10, sampled=false, tau_ms=550.0, seed=0, body_length_mm=None))]
    #[allow(clippy::type_complexity)]
    fn characterize(
        &self,
        vertices: Vec<usize>,
        cycles: usize,
        sampled: bool,
        tau_ms: f64,
        seed: u64,
        body_length_mm: Option<f64>,
    ) -> PyResult<(f64, Option<f64>, f64, Option<f64>, Option<f64>)> {
        let traj = self.trajectory(&vertices, cycles, sampled, tau_ms, seed)?;
        let r = characterize_rs("gait", &traj, body_length_mm).map_err(err)?;
        Ok((r.mean_v, r.std_v, r.mean_w, r.std_w, r.body_lengths_per_s))
    }

    fn __repr__(&self) -> String {
        format!("WeightedDigraph(n={}, m={})", self.0.graph().n(), self.0.graph().m())
    }
}

impl PyWeights {
    fn weight(&self, edge: usize) -> PyResult<&pmfc::EdgeWeight> {
        self.0
            .weights()
            .get(edge)
            .ok_or_else(|| PyValueError::new_err(format!("edge {edge} out of range")))
    }

    fn trajectory(&self, vertices: &[usize], cycles: usize, sampled: bool, tau_ms: f64, seed: u64) -> PyResult<pmfc::simulate::Trajectory> {
        let gait = pmfc::GaitVector::from_vertices(self.0.graph(), vertices).map_err(err)?;
        let mode = if sampled { RolloutMode::Sampled } else { RolloutMode::Mean };
        rollout_rs(&gait.edges, &self.0, cycles, mode, &mut ChaCha8Rng::seed_from_u64(seed), tau_ms).map_err(err)
    }
}

/// Rigid motion between matched marker sets (least squares).
#[pyfunction]
fn estimate_pose(reference: Vec<(f64, f64)>, current: Vec<(f64, f64)>) -> PyResult<PySe2> {
    let v = |pts: Vec<(f64, f64)>| pts.into_iter().map(|(x, y)| nalgebra::Vector2::new(x, y)).collect::<Vec<_>>();
    pmfc::learning::estimate_pose(&v(reference), &v(current)).map(PySe2).map_err(err)
}

/// Composes per-edge motions around a cycle starting at edge `start`.
#[pyfunction]
#[pyo3(signature = (edges, start=0))]
fn cycle_transform(edges: Vec<PySe2>, start: usize) -> PyResult<PySe2> {
    let edges: Vec<_> = edges.into_iter().map(|e| e.0).collect();
    pmfc::se2::cycle_transform(&edges, start).map(PySe2).map_err(err)
}

/// Simple cycles of length at least 2 in the complete digraph on `n` vertices.
#[pyfunction]
fn count_simple_cycles(n: u64) -> BigUint {
    count_simple_cycles_loopless(n)
}

/// The closed form that also counts `n` self-loops; used for size estimates.
#[pyfunction]
fn count_simple_cycles_estimate(n: u64) -> BigUint {
    count_simple_cycles_formula(n)
}

/// Percent speed change over a baseline.
#[pyfunction]
fn improvement(best_synthesized: f64, best_intuitive: f64) -> PyResult<f64> {
    pmfc::simulate::improvement(best_synthesized, best_intuitive).map_err(err)
}

#[pymodule]
fn pypmfc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySe2>()?;
    m.add_class::<PyStateDigraph>()?;
    m.add_class::<PyWeights>()?;
    m.add_function(wrap_pyfunction!(estimate_pose, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_transform, m)?)?;
    m.add_function(wrap_pyfunction!(count_simple_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(count_simple_cycles_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(improvement, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
