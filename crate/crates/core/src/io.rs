//! File interchange. Every vertex and edge in a file is 1-based; lengths
//! are mm, angles radians, durations ms unless a column name says `_s`.
//!
//! JSON documents are written pretty-printed with shortest round-trip
//! floats, so a written file reads back to identical values and identical
//! inputs always produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cycles::GaitVector;
use crate::error::{Error, Result};
use crate::learning::{EdgeWeight, MarkerFrame, PoseSample, WeightedDigraph};
use crate::oracle::CycleCostRecord;
use crate::simulate::{CharacterizationRecord, Trajectory, TrajectorySample};
use crate::state_graph::{eulerian_verify, EulerianPlan, StateDigraph};
use crate::synthesis::{Goal, Prediction, SampleReport, SynthesisConfig, SynthesisReport, DEFAULT_NODE_BUDGET};

fn schema(path: &Path, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => io_error(path, source),
            _ => unreachable!(),
        }
    } else {
        schema(path, e.to_string())
    }
}

/// Serialized document bytes: pretty JSON plus a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("documents serialize");
    out.push(b'\n');
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, json_bytes(value)).map_err(|e| io_error(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| schema(path, e.to_string()))
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    fs::write(path, csv_bytes(rows)).map_err(|e| io_error(path, e))
}

fn read_csv<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let found = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(schema(path, format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

/// Units block carried by JSON documents that hold physical quantities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub length: String,
    pub angle: String,
    pub time: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            length: "mm".into(),
            angle: "rad".into(),
            time: "ms".into(),
        }
    }
}

fn check_units(path: &Path, units: &Units) -> Result<()> {
    if *units != Units::default() {
        return Err(schema(path, format!("units must be mm/rad/ms, found {}/{}/{}", units.length, units.angle, units.time)));
    }
    Ok(())
}

fn one_based(path: &Path, what: &str, index: usize, bound: usize) -> Result<usize> {
    if index == 0 || index > bound {
        return Err(schema(path, format!("{what} {index} is outside 1..={bound}")));
    }
    Ok(index - 1)
}

// ---------------------------------------------------------------- graph

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub n_limbs: usize,
    pub states_per_limb: usize,
    pub n: usize,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphDoc {
    pub fn from_graph(graph: &StateDigraph) -> Self {
        Self {
            n_limbs: graph.n_limbs(),
            states_per_limb: graph.states_per_limb(),
            n: graph.n(),
            m: graph.m(),
            edges: graph.edges().iter().map(|e| [e.source + 1, e.target + 1]).collect(),
        }
    }

    /// Rebuilds the digraph and checks every stored field against it.
    pub fn to_graph(&self, path: &Path) -> Result<StateDigraph> {
        let graph = StateDigraph::build(self.n_limbs, self.states_per_limb)?;
        if GraphDoc::from_graph(&graph) != *self {
            return Err(schema(
                path,
                format!(
                    "graph document is not the complete digraph over {} limb(s) with {} state(s) each",
                    self.n_limbs, self.states_per_limb
                ),
            ));
        }
        Ok(graph)
    }
}

pub fn write_graph(path: &Path, graph: &StateDigraph) -> Result<()> {
    write_json(path, &GraphDoc::from_graph(graph))
}

pub fn read_graph(path: &Path) -> Result<StateDigraph> {
    read_json::<GraphDoc>(path)?.to_graph(path)
}

// ---------------------------------------------------------------- plan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDoc {
    pub seed: u64,
    pub tau_ms: f64,
    pub trials: Vec<Vec<usize>>,
    pub t_total_ms: f64,
}

impl PlanDoc {
    pub fn from_plan(plan: &EulerianPlan) -> Self {
        Self {
            seed: plan.seed,
            tau_ms: plan.tau_ms,
            trials: plan.trials.iter().map(|t| t.iter().map(|v| v + 1).collect()).collect(),
            t_total_ms: plan.t_total_ms(),
        }
    }

    /// Converts back and checks that every trial is an Eulerian circuit of
    /// `graph`.
    pub fn to_plan(&self, path: &Path, graph: &StateDigraph) -> Result<EulerianPlan> {
        let trials = self
            .trials
            .iter()
            .map(|t| t.iter().map(|&v| one_based(path, "vertex", v, graph.n())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = trials.iter().position(|t| !eulerian_verify(t, graph)) {
            return Err(schema(path, format!("trial {} is not an Eulerian circuit of the digraph", k + 1)));
        }
        let plan = EulerianPlan {
            seed: self.seed,
            tau_ms: self.tau_ms,
            n: graph.n(),
            trials,
        };
        if plan.t_total_ms() != self.t_total_ms {
            return Err(schema(path, format!("t_total_ms {} disagrees with trials * m * tau = {}", self.t_total_ms, plan.t_total_ms())));
        }
        Ok(plan)
    }
}

pub fn write_plan(path: &Path, plan: &EulerianPlan) -> Result<()> {
    write_json(path, &PlanDoc::from_plan(plan))
}

pub fn read_plan(path: &Path, graph: &StateDigraph) -> Result<EulerianPlan> {
    read_json::<PlanDoc>(path)?.to_plan(path, graph)
}

// ---------------------------------------------------------------- weights

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeWeightDoc {
    pub src: usize,
    pub dst: usize,
    pub mu: [f64; 3],
    pub sigma: [[f64; 3]; 3],
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDoc {
    pub units: Units,
    pub n_limbs: usize,
    pub states_per_limb: usize,
    /// Edges estimated from one trial only; their covariance is zero.
    pub single_observation_edges: Vec<usize>,
    pub edges: Vec<EdgeWeightDoc>,
}

impl WeightsDoc {
    pub fn from_weights(weights: &WeightedDigraph) -> Self {
        let graph = weights.graph();
        let edges = graph
            .edges()
            .iter()
            .zip(weights.weights())
            .map(|(e, w)| EdgeWeightDoc {
                src: e.source + 1,
                dst: e.target + 1,
                mu: [w.mu.x, w.mu.y, w.mu.z],
                sigma: std::array::from_fn(|r| std::array::from_fn(|c| w.sigma[(r, c)])),
                count: w.count,
            })
            .collect();
        Self {
            units: Units::default(),
            n_limbs: graph.n_limbs(),
            states_per_limb: graph.states_per_limb(),
            single_observation_edges: weights.single_observation_edges().iter().map(|e| e + 1).collect(),
            edges,
        }
    }

    pub fn to_weights(&self, path: &Path) -> Result<WeightedDigraph> {
        check_units(path, &self.units)?;
        let graph = StateDigraph::build(self.n_limbs, self.states_per_limb)?;
        if self.edges.len() != graph.m() {
            return Err(schema(path, format!("expected {} edges, found {}", graph.m(), self.edges.len())));
        }
        let mut weights = Vec::with_capacity(graph.m());
        for (i, (doc, e)) in self.edges.iter().zip(graph.edges()).enumerate() {
            if (doc.src, doc.dst) != (e.source + 1, e.target + 1) {
                return Err(schema(
                    path,
                    format!("edge e{} must be v{} -> v{}, found v{} -> v{}", i + 1, e.source + 1, e.target + 1, doc.src, doc.dst),
                ));
            }
            weights.push(EdgeWeight {
                mu: Vector3::from(doc.mu),
                sigma: Matrix3::from_fn(|r, c| doc.sigma[r][c]),
                count: doc.count,
            });
        }
        let weighted = WeightedDigraph::new(graph, weights)?;
        let single: Vec<usize> = weighted.single_observation_edges().iter().map(|e| e + 1).collect();
        if single != self.single_observation_edges {
            return Err(schema(path, "single_observation_edges disagrees with the per-edge counts"));
        }
        Ok(weighted)
    }
}

pub fn write_weights(path: &Path, weights: &WeightedDigraph) -> Result<()> {
    write_json(path, &WeightsDoc::from_weights(weights))
}

pub fn read_weights(path: &Path) -> Result<WeightedDigraph> {
    read_json::<WeightsDoc>(path)?.to_weights(path)
}

// ---------------------------------------------------------------- synthesis

fn default_min_length() -> usize {
    2
}

fn default_node_budget() -> usize {
    DEFAULT_NODE_BUDGET
}

/// Synthesis configuration file. Omitted tolerances take the library
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfigDoc {
    pub goal: Goal,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub beta: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_theta: Option<f64>,
    pub seed: u64,
    pub alpha_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default = "default_min_length")]
    pub min_length: usize,
    #[serde(default = "default_node_budget")]
    pub node_budget: usize,
}

impl SynthesisConfigDoc {
    pub fn from_config(config: &SynthesisConfig, seed: u64) -> Self {
        Self {
            goal: config.goal,
            n: config.samples,
            l: config.max_cuts,
            beta: config.beta,
            gamma: config.gamma,
            eps_t: Some(config.eps_t),
            eps_theta: Some(config.eps_theta),
            seed,
            alpha_range: [config.alpha_range.0, config.alpha_range.1],
            alpha: config.alpha.clone(),
            min_length: config.min_length,
            node_budget: config.node_budget,
        }
    }

    pub fn to_config(&self) -> (SynthesisConfig, u64) {
        let mut c = SynthesisConfig::new(self.goal);
        c.samples = self.n;
        c.max_cuts = self.l;
        c.beta = self.beta;
        c.gamma = self.gamma;
        if let Some(e) = self.eps_t {
            c.eps_t = e;
        }
        if let Some(e) = self.eps_theta {
            c.eps_theta = e;
        }
        c.alpha_range = (self.alpha_range[0], self.alpha_range[1]);
        c.alpha = self.alpha.clone();
        c.min_length = self.min_length;
        c.node_budget = self.node_budget;
        (c, self.seed)
    }
}

pub fn read_synthesis_config(path: &Path) -> Result<(SynthesisConfig, u64)> {
    let (config, seed) = read_json::<SynthesisConfigDoc>(path)?.to_config();
    config.validate().map_err(|e| schema(path, e.to_string()))?;
    Ok((config, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitDoc {
    pub z: String,
    pub vertices: Vec<usize>,
    pub predicted: Prediction,
    pub objective: f64,
    pub alpha: Vec<f64>,
    pub cuts: usize,
    pub multiplicity: usize,
}

impl GaitDoc {
    /// Reconstructs the cycle and checks the stored bitstring against it.
    pub fn to_gait(&self, path: &Path, graph: &StateDigraph) -> Result<GaitVector> {
        let vertices = self
            .vertices
            .iter()
            .map(|&v| one_based(path, "vertex", v, graph.n()))
            .collect::<Result<Vec<_>>>()?;
        let gait = GaitVector::from_vertices(graph, &vertices).map_err(|e| schema(path, e.to_string()))?;
        if gait.bitstring() != self.z {
            return Err(schema(path, format!("z {} does not match vertices {}", self.z, gait.vertex_labels())));
        }
        Ok(gait)
    }
}

/// Output of a synthesis run: gaits by ascending objective, then the
/// per-sample sweep log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitsDoc {
    pub units: Units,
    pub config: SynthesisConfigDoc,
    pub gaits: Vec<GaitDoc>,
    pub samples: Vec<SampleReport>,
}

impl GaitsDoc {
    pub fn from_report(report: &SynthesisReport, config: &SynthesisConfig, seed: u64) -> Self {
        Self {
            units: Units::default(),
            config: SynthesisConfigDoc::from_config(config, seed),
            gaits: report
                .gaits
                .iter()
                .map(|g| GaitDoc {
                    z: g.gait.bitstring(),
                    vertices: g.gait.vertices.iter().map(|v| v + 1).collect(),
                    predicted: g.predicted,
                    objective: g.objective,
                    alpha: g.alpha.clone(),
                    cuts: g.cuts,
                    multiplicity: g.multiplicity,
                })
                .collect(),
            samples: report.samples.clone(),
        }
    }
}

pub fn read_gaits(path: &Path) -> Result<GaitsDoc> {
    let doc: GaitsDoc = read_json(path)?;
    check_units(path, &doc.units)?;
    Ok(doc)
}

// ---------------------------------------------------------------- traces

#[derive(Debug, Serialize, Deserialize)]
struct PoseRow {
    frame: usize,
    t: f64,
    x: f64,
    y: f64,
    theta: f64,
}

const POSE_HEADER: [&str; 5] = ["frame", "t", "x", "y", "theta"];

/// Pose-mode trace: `frame,t,x,y,theta` with `t` in seconds.
pub fn write_pose_trace(path: &Path, poses: &[PoseSample]) -> Result<()> {
    write_csv(
        path,
        poses.iter().map(|p| PoseRow {
            frame: p.frame,
            t: p.t,
            x: p.x,
            y: p.y,
            theta: p.theta,
        }),
    )
}

pub fn read_pose_trace(path: &Path) -> Result<Vec<PoseSample>> {
    let rows: Vec<PoseRow> = read_csv(path, &POSE_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| PoseSample {
            frame: r.frame,
            t: r.t,
            x: r.x,
            y: r.y,
            theta: r.theta,
        })
        .collect())
}

/// Marker-mode trace: `frame,t,m1x,m1y,m2x,m2y,...`; an empty pair is an
/// occluded marker.
pub fn write_marker_trace(path: &Path, frames: &[MarkerFrame]) -> Result<()> {
    let k = frames.first().map_or(0, |f| f.markers.len());
    if frames.iter().any(|f| f.markers.len() != k) {
        return Err(schema(path, "every frame needs the same number of markers"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["frame".to_string(), "t".to_string()];
    for i in 1..=k {
        header.push(format!("m{i}x"));
        header.push(format!("m{i}y"));
    }
    w.write_record(&header).expect("in-memory writer");
    for f in frames {
        let mut record = vec![f.frame.to_string(), f.t.to_string()];
        for m in &f.markers {
            match m {
                Some(p) => {
                    record.push(p.x.to_string());
                    record.push(p.y.to_string());
                }
                None => record.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&record).expect("in-memory writer");
    }
    fs::write(path, w.into_inner().expect("in-memory writer")).map_err(|e| io_error(path, e))
}

pub fn read_marker_trace(path: &Path) -> Result<Vec<MarkerFrame>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let k = header.len().saturating_sub(2) / 2;
    let valid = header.len() >= 4
        && header.len() % 2 == 0
        && &header[0] == "frame"
        && &header[1] == "t"
        && (1..=k).all(|i| header[2 * i] == format!("m{i}x") && header[2 * i + 1] == format!("m{i}y"));
    if !valid {
        return Err(schema(path, "expected header `frame,t,m1x,m1y,...`"));
    }
    let mut frames = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let bad = |what: &str| schema(path, format!("row {}: {what}", line + 1));
        let float = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
        let frame = record[0].trim().parse::<usize>().map_err(|_| bad("frame is not an integer"))?;
        let t = float(&record[1])?;
        let mut markers = Vec::with_capacity(k);
        for i in 0..k {
            let (x, y) = (record[2 + 2 * i].trim(), record[3 + 2 * i].trim());
            markers.push(match (x.is_empty(), y.is_empty()) {
                (true, true) => None,
                (false, false) => Some(Vector2::new(float(x)?, float(y)?)),
                _ => return Err(bad(&format!("marker m{} has only one coordinate", i + 1))),
            });
        }
        frames.push(MarkerFrame { frame, t, markers });
    }
    Ok(frames)
}

// ---------------------------------------------------------------- cycles

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub id: usize,
    pub length: usize,
    pub vertex_sequence: String,
    pub z: String,
}

const CYCLE_HEADER: [&str; 4] = ["id", "length", "vertex_sequence", "z"];

fn parse_vertex_sequence(path: &Path, seq: &str, graph: &StateDigraph) -> Result<GaitVector> {
    let vertices = seq
        .split(';')
        .map(|v| {
            v.trim()
                .strip_prefix('v')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| schema(path, format!("bad vertex label `{v}`")))
                .and_then(|i| one_based(path, "vertex", i, graph.n()))
        })
        .collect::<Result<Vec<_>>>()?;
    GaitVector::from_vertices(graph, &vertices).map_err(|e| schema(path, e.to_string()))
}

pub fn write_cycles(path: &Path, cycles: &[GaitVector]) -> Result<()> {
    write_csv(
        path,
        cycles.iter().enumerate().map(|(i, c)| CycleRow {
            id: i + 1,
            length: c.len(),
            vertex_sequence: c.vertex_labels(),
            z: c.bitstring(),
        }),
    )
}

pub fn read_cycles(path: &Path, graph: &StateDigraph) -> Result<Vec<GaitVector>> {
    let rows: Vec<CycleRow> = read_csv(path, &CYCLE_HEADER)?;
    rows.iter()
        .map(|r| {
            let gait = parse_vertex_sequence(path, &r.vertex_sequence, graph)?;
            if gait.bitstring() != r.z || gait.len() != r.length {
                return Err(schema(path, format!("cycle {}: length or z disagrees with {}", r.id, r.vertex_sequence)));
            }
            Ok(gait)
        })
        .collect()
}

// ---------------------------------------------------------------- costs

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub id: usize,
    pub length: usize,
    #[serde(rename = "J_t_nl")]
    pub j_t_nl: f64,
    #[serde(rename = "J_theta_nl")]
    pub j_theta_nl: f64,
    pub p_norm: f64,
    pub theta_abs: f64,
    pub s_p: f64,
    pub s_theta: f64,
    pub pareto_t: u8,
    pub pareto_theta: u8,
}

const COST_HEADER: [&str; 10] = [
    "id",
    "length",
    "J_t_nl",
    "J_theta_nl",
    "p_norm",
    "theta_abs",
    "s_p",
    "s_theta",
    "pareto_t",
    "pareto_theta",
];

/// Rows for `records` with the two Pareto memberships flagged. Ids are the
/// 1-based positions in `records`, matching the cycle CSV of the same
/// enumeration.
pub fn cost_rows(records: &[CycleCostRecord], pareto_t: &[usize], pareto_theta: &[usize]) -> Vec<CostRow> {
    let mut flags_t = vec![0u8; records.len()];
    let mut flags_theta = vec![0u8; records.len()];
    pareto_t.iter().for_each(|&i| flags_t[i] = 1);
    pareto_theta.iter().for_each(|&i| flags_theta[i] = 1);
    records
        .iter()
        .enumerate()
        .map(|(i, r)| CostRow {
            id: i + 1,
            length: r.length,
            j_t_nl: r.j_t_nl,
            j_theta_nl: r.j_theta_nl,
            p_norm: r.p_norm,
            theta_abs: r.theta_abs,
            s_p: r.s_p,
            s_theta: r.s_theta,
            pareto_t: flags_t[i],
            pareto_theta: flags_theta[i],
        })
        .collect()
}

pub fn write_costs(path: &Path, rows: &[CostRow]) -> Result<()> {
    write_csv(path, rows)
}

pub fn read_costs(path: &Path) -> Result<Vec<CostRow>> {
    read_csv(path, &COST_HEADER)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryRow {
    cycle: usize,
    primitive: usize,
    t_s: f64,
    x_mm: f64,
    y_mm: f64,
    theta_rad: f64,
}

const TRAJECTORY_HEADER: [&str; 6] = ["cycle", "primitive", "t_s", "x_mm", "y_mm", "theta_rad"];

pub fn write_trajectory(path: &Path, trajectory: &Trajectory) -> Result<()> {
    write_csv(
        path,
        trajectory.samples.iter().map(|s| TrajectoryRow {
            cycle: s.cycle,
            primitive: s.primitive,
            t_s: s.t_s,
            x_mm: s.x,
            y_mm: s.y,
            theta_rad: s.theta,
        }),
    )
}

/// Reads a trajectory; the primitive period and cycle length are recovered
/// from the first primitive's timestamp and the largest primitive index.
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let rows: Vec<TrajectoryRow> = read_csv(path, &TRAJECTORY_HEADER)?;
    if rows.len() < 2 {
        return Err(schema(path, "a trajectory needs the initial pose and at least one primitive"));
    }
    let edges_per_cycle = rows.iter().map(|r| r.primitive).max().unwrap_or(0);
    let consistent = rows[0].cycle == 0
        && rows[0].primitive == 0
        && rows[1..].iter().enumerate().all(|(k, r)| {
            edges_per_cycle > 0 && r.cycle == k / edges_per_cycle + 1 && r.primitive == k % edges_per_cycle + 1
        });
    if !consistent {
        return Err(schema(path, "cycle/primitive columns are not a sequence of complete rollouts"));
    }
    let tau_ms = rows[1].t_s * 1000.0;
    Ok(Trajectory {
        samples: rows
            .into_iter()
            .map(|r| TrajectorySample {
                cycle: r.cycle,
                primitive: r.primitive,
                t_s: r.t_s,
                x: r.x_mm,
                y: r.y_mm,
                theta: r.theta_rad,
            })
            .collect(),
        tau_ms,
        edges_per_cycle,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct CharacterizationRow {
    gait_id: String,
    mean_v_mm_s: f64,
    std_v: Option<f64>,
    mean_w_rad_s: f64,
    std_w: Option<f64>,
    bl_per_s: Option<f64>,
    cycles: usize,
}

const CHARACTERIZATION_HEADER: [&str; 7] = ["gait_id", "mean_v_mm_s", "std_v", "mean_w_rad_s", "std_w", "bl_per_s", "cycles"];

/// Characterization table; undefined statistics are empty cells.
pub fn write_characterization(path: &Path, records: &[CharacterizationRecord]) -> Result<()> {
    write_csv(
        path,
        records.iter().map(|r| CharacterizationRow {
            gait_id: r.gait_id.clone(),
            mean_v_mm_s: r.mean_v,
            std_v: r.std_v,
            mean_w_rad_s: r.mean_w,
            std_w: r.std_w,
            bl_per_s: r.body_lengths_per_s,
            cycles: r.cycles,
        }),
    )
}

pub fn read_characterization(path: &Path) -> Result<Vec<CharacterizationRecord>> {
    let rows: Vec<CharacterizationRow> = read_csv(path, &CHARACTERIZATION_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| CharacterizationRecord {
            gait_id: r.gait_id,
            cycles: r.cycles,
            mean_v: r.mean_v_mm_s,
            std_v: r.std_v,
            mean_w: r.mean_w_rad_s,
            std_w: r.std_w,
            body_lengths_per_s: r.bl_per_s,
        })
        .collect())
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
