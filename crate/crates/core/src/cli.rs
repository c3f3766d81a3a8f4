//! The `pmfc` command line. Each subcommand reads its inputs, calls one
//! library operation, writes one data file and a `<out>.manifest.json`
//! beside it.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cycles::{count_simple_cycles_formula, enumerate_simple_cycles, scientific, EnumerationLimits, GaitVector, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::io;
use crate::learning::{collect_observations, estimate_weights, track_markers};
use crate::oracle::{exhaustive_evaluate, pareto_front, ParetoMode};
use crate::simulate::{characterize, improvement, rollout, RolloutMode, BODY_LENGTH_FOUR_LIMB_MM, BODY_LENGTH_THREE_LIMB_MM};
use crate::state_graph::{plan_trials, prune_failed_limbs, LimbFailure, StateDigraph, DEFAULT_VERTEX_CAP};
use crate::synthesis::{synthesize, Goal, SynthesisConfig};

const SCHEMAS: &str = "\
File schemas (vertices and edges 1-based; mm, rad, ms):
  graph JSON     {n_limbs, states_per_limb, n, m, edges:[[src,dst],...]}
  plan JSON      {seed, tau_ms, trials:[[v,...],...], t_total_ms}
  pose CSV       frame,t,x,y,theta            (t in s)
  marker CSV     frame,t,m1x,m1y,m2x,m2y,...  (empty cells = occluded)
  weights JSON   {units, n_limbs, states_per_limb, single_observation_edges,
                  edges:[{src,dst,mu:[dx,dy,dtheta],sigma:[[..]x3],count}]}
  config JSON    {goal, N, L, beta, gamma, eps_t?, eps_theta?, seed, alpha_range:[lo,hi], alpha?}
  gaits JSON     {units, config, gaits:[{z, vertices, predicted:{dx,dy,dtheta,sp,stheta},
                  objective, alpha, cuts, multiplicity}], samples:[...]}
  cycle CSV      id,length,vertex_sequence,z
  costs CSV      id,length,J_t_nl,J_theta_nl,p_norm,theta_abs,s_p,s_theta,pareto_t,pareto_theta
  trajectory CSV cycle,primitive,t_s,x_mm,y_mm,theta_rad
  character. CSV gait_id,mean_v_mm_s,std_v,mean_w_rad_s,std_w,bl_per_s,cycles

Every output FILE gets FILE.manifest.json (tool version, command, input
sha256 digests, seed, timestamps). Exit status: 0 ok, 1 domain error,
2 usage or file error.";

#[derive(Debug, Parser)]
#[command(name = "pmfc", version, about = "Gait synthesis on learned state digraphs", after_long_help = SCHEMAS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the complete state digraph -> graph JSON
    Graph(GraphArgs),
    /// Draw an Eulerian experiment schedule -> plan JSON
    Plan(PlanArgs),
    /// Learn edge weights from one trace per trial -> weights JSON
    Ingest(IngestArgs),
    /// Synthesize gaits by BILP with cutting planes -> gaits JSON
    Synthesize(SynthesizeArgs),
    /// List every simple cycle -> cycle CSV
    Enumerate(EnumerateArgs),
    /// Score every simple cycle and flag both Pareto fronts -> costs CSV
    Pareto(ParetoArgs),
    /// Roll out a gait on the learned model -> trajectory CSV
    Simulate(SimulateArgs),
    /// Per-cycle speed statistics of trajectories -> characterization CSV
    Characterize(CharacterizeArgs),
    /// Restrict a graph or weights file to stuck limbs -> same kind of file
    Prune(PruneArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub limbs: usize,
    #[arg(long)]
    pub states: usize,
    /// Largest vertex count accepted
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    pub cap: usize,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 550.0)]
    pub tau_ms: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TraceMode {
    Pose,
    Marker,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    /// One trace per trial, in trial order
    #[arg(long = "trace", required = true, num_args = 1..)]
    pub traces: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = TraceMode::Pose)]
    pub mode: TraceMode,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub weights: PathBuf,
    /// Config JSON; flags given on the command line override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub goal: Option<GoalArg>,
    /// LHS samples N
    #[arg(long)]
    pub n: Option<usize>,
    /// Solves per sample L
    #[arg(long)]
    pub max_cuts: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// mm
    #[arg(long)]
    pub eps_t: Option<f64>,
    /// rad, or degrees with --deg
    #[arg(long)]
    pub eps_theta: Option<f64>,
    /// Read --eps-theta in degrees
    #[arg(long)]
    pub deg: bool,
    /// Fixed direction weights instead of a sweep, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    #[arg(long)]
    pub node_budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GoalArg {
    Translation,
    Rotation,
}

impl From<GoalArg> for Goal {
    fn from(g: GoalArg) -> Self {
        match g {
            GoalArg::Translation => Goal::Translation,
            GoalArg::Rotation => Goal::Rotation,
        }
    }
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_theta: f64,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Mean,
    Sampled,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub weights: PathBuf,
    /// Gaits JSON from `synthesize`
    #[arg(long, conflicts_with = "vertices", required_unless_present = "vertices")]
    pub gaits: Option<PathBuf>,
    /// 1-based position in the gaits file
    #[arg(long, default_value_t = 1)]
    pub gait: usize,
    /// Explicit cycle as 1-based vertices, comma separated
    #[arg(long, value_delimiter = ',')]
    pub vertices: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub cycles: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Mean)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 550.0)]
    pub tau_ms: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RobotArg {
    /// 220 mm
    ThreeLimb,
    /// 350 mm
    FourLimb,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    #[arg(long = "trajectory", required = true, num_args = 1..)]
    pub trajectories: Vec<PathBuf>,
    /// One id per trajectory; defaults to the file stems
    #[arg(long = "gait-id", num_args = 1..)]
    pub gait_ids: Vec<String>,
    #[arg(long, conflicts_with = "robot")]
    pub body_length_mm: Option<f64>,
    #[arg(long, value_enum)]
    pub robot: Option<RobotArg>,
    /// Report improvement of every other gait over this one
    #[arg(long)]
    pub baseline: Option<String>,
    /// Print rotational speeds in deg/s (the file stays in rad/s)
    #[arg(long)]
    pub deg: bool,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// LIMB:STATE, limb 1-based, state value 0-based; repeatable
    #[arg(long = "fail", required = true, value_parser = parse_failure)]
    pub failures: Vec<LimbFailure>,
    #[arg(short, long)]
    pub out: PathBuf,
}

fn parse_failure(s: &str) -> std::result::Result<LimbFailure, String> {
    let (limb, state) = s.split_once(':').ok_or("expected LIMB:STATE")?;
    let limb: usize = limb.trim().parse().map_err(|_| format!("bad limb `{limb}`"))?;
    let state: usize = state.trim().parse().map_err(|_| format!("bad state `{state}`"))?;
    if limb == 0 {
        return Err("limbs are numbered from 1".into());
    }
    Ok(LimbFailure { limb: limb - 1, state })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Sidecar record of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub seed: Option<u64>,
    pub summary: Value,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

fn digest(path: &Path) -> Result<FileDigest> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

struct Run {
    inputs: Vec<PathBuf>,
    seed: Option<u64>,
    summary: Value,
    report: Vec<String>,
}

impl Run {
    fn input<'a>(&mut self, path: &'a Path) -> &'a Path {
        self.inputs.push(path.to_path_buf());
        path
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = std::iter::once("pmfc".to_string())
        .chain(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect();
    match execute(cli.command, command) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

/// Runs one subcommand, returning the lines it reports on standard output.
pub fn execute(command: Command, argv: Vec<String>) -> Result<Vec<String>> {
    let started = now_ms();
    let mut run = Run {
        inputs: Vec::new(),
        seed: None,
        summary: Value::Null,
        report: Vec::new(),
    };
    let out = match &command {
        Command::Graph(a) => cmd_graph(&mut run, a)?,
        Command::Plan(a) => cmd_plan(&mut run, a)?,
        Command::Ingest(a) => cmd_ingest(&mut run, a)?,
        Command::Synthesize(a) => cmd_synthesize(&mut run, a)?,
        Command::Enumerate(a) => cmd_enumerate(&mut run, a)?,
        Command::Pareto(a) => cmd_pareto(&mut run, a)?,
        Command::Simulate(a) => cmd_simulate(&mut run, a)?,
        Command::Characterize(a) => cmd_characterize(&mut run, a)?,
        Command::Prune(a) => cmd_prune(&mut run, a)?,
    };
    let manifest = RunManifest {
        tool: "pmfc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: argv,
        inputs: run.inputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
        outputs: vec![digest(&out)?],
        seed: run.seed,
        summary: run.summary,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
    };
    let manifest_path = io::manifest_path(&out);
    io::write_json(&manifest_path, &manifest)?;
    run.report.push(format!("wrote {} ({})", out.display(), manifest_path.display()));
    Ok(run.report)
}

fn cmd_graph(run: &mut Run, a: &GraphArgs) -> Result<PathBuf> {
    let graph = StateDigraph::build_with_cap(a.limbs, a.states, a.cap)?;
    io::write_graph(&a.out, &graph)?;
    run.summary = json!({"n": graph.n(), "m": graph.m()});
    run.report.push(format!("n = {}, m = {}", graph.n(), graph.m()));
    Ok(a.out.clone())
}

fn cmd_plan(run: &mut Run, a: &PlanArgs) -> Result<PathBuf> {
    let graph = io::read_graph(run.input(&a.graph))?;
    let plan = plan_trials(&graph, a.trials, a.tau_ms, a.seed)?;
    io::write_plan(&a.out, &plan)?;
    run.seed = Some(a.seed);
    run.summary = json!({
        "trials": plan.trials.len(),
        "edges_per_trial": plan.edges_per_trial(),
        "t_total_ms": plan.t_total_ms(),
    });
    run.report.push(format!(
        "{} trial(s) x {} edges x {} ms = {} ms ({:.2} min)",
        plan.trials.len(),
        plan.edges_per_trial(),
        plan.tau_ms,
        plan.t_total_ms(),
        plan.t_total_ms() / 60_000.0
    ));
    Ok(a.out.clone())
}

fn cmd_ingest(run: &mut Run, a: &IngestArgs) -> Result<PathBuf> {
    let graph = io::read_graph(run.input(&a.graph))?;
    let plan = io::read_plan(run.input(&a.plan), &graph)?;
    let mut traces = Vec::with_capacity(a.traces.len());
    let mut dropped = Vec::new();
    for path in &a.traces {
        let path = run.input(path);
        let poses = match a.mode {
            TraceMode::Pose => io::read_pose_trace(path)?,
            TraceMode::Marker => {
                let track = track_markers(&io::read_marker_trace(path)?)?;
                if !track.dropped_frames.is_empty() {
                    dropped.push(json!({"trace": path.display().to_string(), "frames": track.dropped_frames}));
                }
                track.poses
            }
        };
        traces.push(poses);
    }
    let observations = collect_observations(&plan, &graph, &traces)?;
    let weights = estimate_weights(&observations, &graph)?;
    io::write_weights(&a.out, &weights)?;
    let single = weights.single_observation_edges();
    run.summary = json!({
        "edges": graph.m(),
        "single_observation_edges": single.iter().map(|e| e + 1).collect::<Vec<_>>(),
        "dropped_frames": dropped,
    });
    run.report.push(format!("learned {} edge weights from {} trace(s)", graph.m(), traces.len()));
    if !single.is_empty() {
        run.report.push(format!("{} edge(s) observed once; their covariance is zero", single.len()));
    }
    Ok(a.out.clone())
}

fn cmd_synthesize(run: &mut Run, a: &SynthesizeArgs) -> Result<PathBuf> {
    let weights = io::read_weights(run.input(&a.weights))?;
    let (mut config, mut seed) = match &a.config {
        Some(path) => io::read_synthesis_config(run.input(path))?,
        None => {
            let goal = a.goal.ok_or_else(|| Error::Schema {
                path: a.weights.clone(),
                message: "--goal is required without --config".into(),
            })?;
            (SynthesisConfig::new(goal.into()), 0)
        }
    };
    if let Some(g) = a.goal {
        config.goal = g.into();
    }
    if let Some(n) = a.n {
        config.samples = n;
    }
    if let Some(l) = a.max_cuts {
        config.max_cuts = l;
    }
    if let Some(b) = a.beta {
        config.beta = b;
    }
    if let Some(g) = a.gamma {
        config.gamma = g;
    }
    if let Some(e) = a.eps_t {
        config.eps_t = e;
    }
    if let Some(e) = a.eps_theta {
        config.eps_theta = if a.deg { e.to_radians() } else { e };
    }
    if let Some(alpha) = &a.alpha {
        config.alpha = Some(alpha.clone());
    }
    if let Some(b) = a.node_budget {
        config.node_budget = b;
    }
    if let Some(s) = a.seed {
        seed = s;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = synthesize(&weights, &config, &mut rng)?;
    let doc = io::GaitsDoc::from_report(&report, &config, seed);
    io::write_json(&a.out, &doc)?;
    run.seed = Some(seed);
    let mut status = std::collections::BTreeMap::new();
    for s in &report.samples {
        *status.entry(serde_json::to_value(s.status).expect("status serializes").as_str().unwrap_or("").to_string()).or_insert(0usize) += 1;
    }
    run.summary = json!({"gaits": report.gaits.len(), "samples": report.samples.len(), "status": status});
    run.report.push(format!("{} distinct gait(s) from {} sample(s)", report.gaits.len(), report.samples.len()));
    for (i, g) in report.gaits.iter().take(5).enumerate() {
        run.report.push(format!(
            "  #{} {} objective {:.6} dx {:.3} mm dy {:.3} mm dtheta {:.4} rad",
            i + 1,
            g.gait,
            g.objective,
            g.predicted.dx,
            g.predicted.dy,
            g.predicted.dtheta
        ));
    }
    Ok(a.out.clone())
}

fn cmd_enumerate(run: &mut Run, a: &EnumerateArgs) -> Result<PathBuf> {
    let graph = io::read_graph(run.input(&a.graph))?;
    let limits = EnumerationLimits { max_len: a.max_len, cap: a.cap };
    let cycles: Vec<GaitVector> = enumerate_simple_cycles(&graph, limits)?.collect();
    io::write_cycles(&a.out, &cycles)?;
    let formula = scientific(&count_simple_cycles_formula(graph.n() as u64));
    run.summary = json!({"cycles": cycles.len(), "max_len": a.max_len, "n_z_formula": formula});
    run.report.push(format!("{} simple cycle(s)", cycles.len()));
    Ok(a.out.clone())
}

fn cmd_pareto(run: &mut Run, a: &ParetoArgs) -> Result<PathBuf> {
    let weights = io::read_weights(run.input(&a.weights))?;
    let limits = EnumerationLimits { max_len: a.max_len, cap: a.cap };
    let records = exhaustive_evaluate(&weights, a.lambda_t, a.lambda_theta, limits)?;
    let front_t = pareto_front(&records, ParetoMode::TranslationDominant);
    let front_theta = pareto_front(&records, ParetoMode::RotationDominant);
    io::write_costs(&a.out, &io::cost_rows(&records, &front_t, &front_theta))?;
    run.summary = json!({
        "cycles": records.len(),
        "lambda_t": a.lambda_t,
        "lambda_theta": a.lambda_theta,
        "pareto_t": front_t.len(),
        "pareto_theta": front_theta.len(),
    });
    run.report.push(format!(
        "{} cycle(s) scored; Pareto fronts: {} translation, {} rotation",
        records.len(),
        front_t.len(),
        front_theta.len()
    ));
    Ok(a.out.clone())
}

fn cmd_simulate(run: &mut Run, a: &SimulateArgs) -> Result<PathBuf> {
    let weights = io::read_weights(run.input(&a.weights))?;
    let graph = weights.graph();
    let gait = match (&a.gaits, &a.vertices) {
        (Some(path), _) => {
            let doc = io::read_gaits(run.input(path))?;
            let entry = a.gait.checked_sub(1).and_then(|i| doc.gaits.get(i)).ok_or_else(|| Error::Schema {
                path: path.clone(),
                message: format!("no gait #{} (file holds {})", a.gait, doc.gaits.len()),
            })?;
            entry.to_gait(path, graph)?
        }
        (None, Some(vs)) => {
            if vs.iter().any(|&v| v == 0 || v > graph.n()) {
                return Err(Error::Domain(format!("vertices must lie in 1..={}", graph.n())));
            }
            let vs: Vec<usize> = vs.iter().map(|v| v - 1).collect();
            GaitVector::from_vertices(graph, &vs)?
        }
        (None, None) => unreachable!("clap requires --gaits or --vertices"),
    };
    let mode = match a.mode {
        ModeArg::Mean => RolloutMode::Mean,
        ModeArg::Sampled => RolloutMode::Sampled,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let trajectory = rollout(&gait.edges, &weights, a.cycles, mode, &mut rng, a.tau_ms)?;
    io::write_trajectory(&a.out, &trajectory)?;
    if matches!(mode, RolloutMode::Sampled) {
        run.seed = Some(a.seed);
    }
    let end = trajectory.samples.last().expect("rollouts are nonempty");
    run.summary = json!({"gait": gait.to_string(), "cycles": a.cycles, "samples": trajectory.samples.len()});
    run.report.push(format!(
        "{} x {} cycle(s): final pose ({:.3} mm, {:.3} mm, {:.4} rad) at {:.2} s",
        gait, a.cycles, end.x, end.y, end.theta, end.t_s
    ));
    Ok(a.out.clone())
}

fn cmd_characterize(run: &mut Run, a: &CharacterizeArgs) -> Result<PathBuf> {
    if !a.gait_ids.is_empty() && a.gait_ids.len() != a.trajectories.len() {
        return Err(Error::Domain(format!(
            "{} gait id(s) for {} trajectories",
            a.gait_ids.len(),
            a.trajectories.len()
        )));
    }
    let body_length = a.body_length_mm.or(a.robot.map(|r| match r {
        RobotArg::ThreeLimb => BODY_LENGTH_THREE_LIMB_MM,
        RobotArg::FourLimb => BODY_LENGTH_FOUR_LIMB_MM,
    }));
    let mut records = Vec::with_capacity(a.trajectories.len());
    for (i, path) in a.trajectories.iter().enumerate() {
        let trajectory = io::read_trajectory(run.input(path))?;
        let id = match a.gait_ids.get(i) {
            Some(id) => id.clone(),
            None => path.file_stem().map_or_else(|| format!("gait{}", i + 1), |s| s.to_string_lossy().into_owned()),
        };
        records.push(characterize(&id, &trajectory, body_length)?);
    }
    io::write_characterization(&a.out, &records)?;
    let (w_unit, w_scale) = if a.deg { ("deg/s", 1f64.to_degrees()) } else { ("rad/s", 1.0) };
    for r in &records {
        let mut line = format!("{}: v = {:.4} mm/s, w = {:.4} {w_unit}", r.gait_id, r.mean_v, r.mean_w * w_scale);
        if let Some(bl) = r.body_lengths_per_s {
            line.push_str(&format!(", {bl:.4} BL/s"));
        }
        run.report.push(line);
    }
    let mut improvements = Vec::new();
    if let Some(base_id) = &a.baseline {
        let base = records.iter().find(|r| &r.gait_id == base_id).ok_or_else(|| Error::Domain(format!("no trajectory has gait id `{base_id}`")))?;
        for r in records.iter().filter(|r| &r.gait_id != base_id) {
            let pct = improvement(r.mean_v, base.mean_v)?;
            run.report.push(format!("{} vs {}: {:+.1} % translational speed", r.gait_id, base_id, pct));
            improvements.push(json!({"gait_id": r.gait_id, "baseline": base_id, "improvement_pct": pct}));
        }
    }
    run.summary = json!({"records": records.len(), "body_length_mm": body_length, "improvements": improvements});
    Ok(a.out.clone())
}

fn cmd_prune(run: &mut Run, a: &PruneArgs) -> Result<PathBuf> {
    let (graph, weights) = match (&a.weights, &a.graph) {
        (Some(path), _) => {
            let w = io::read_weights(run.input(path))?;
            (w.graph().clone(), Some(w))
        }
        (None, Some(path)) => (io::read_graph(run.input(path))?, None),
        (None, None) => unreachable!("clap requires --weights or --graph"),
    };
    let pruned = prune_failed_limbs(&graph, &a.failures)?;
    match &weights {
        Some(w) => io::write_weights(&a.out, &w.restrict(&pruned)?)?,
        None => io::write_graph(&a.out, &pruned.graph)?,
    }
    run.summary = json!({
        "n": pruned.graph.n(),
        "m": pruned.graph.m(),
        "working_limbs": pruned.working_limbs.iter().map(|l| l + 1).collect::<Vec<_>>(),
        "surviving_vertices": pruned.surviving_vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
    });
    run.report.push(format!(
        "{} state(s), {} edge(s) remain over limbs {:?}",
        pruned.graph.n(),
        pruned.graph.m(),
        pruned.working_limbs.iter().map(|l| l + 1).collect::<Vec<_>>()
    ));
    Ok(a.out.clone())
}
