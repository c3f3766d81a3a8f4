#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use std::collections::HashSet;
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pmfc::cycles::{
    count_simple_cycles_formula, diagnose_cycle, enumerate_simple_cycles, is_simple_cycle, order_cycle, CycleDiagnosis,
    EnumerationLimits,
};
use pmfc::io;
use pmfc::learning::{estimate_pose, render_trace, segment_trace, synthetic_weights, EdgeWeight, SyntheticSpec, WeightedDigraph};
use pmfc::oracle::propagate_cycle_covariance;
use pmfc::se2::{cycle_transform, Se2Transform};
use pmfc::simulate::{characterize, improvement, Trajectory, TrajectorySample, BODY_LENGTH_THREE_LIMB_MM};
use pmfc::state_graph::{eulerian_verify, prune_failed_limbs, stochastic_hierholzer, LimbFailure, StateDigraph};
use pmfc::synthesis::{solve_bilp, synthesize, BilpProblem, Goal, SampleStatus, SynthesisConfig};

const GRAPH_TIME_S: f64 = 1.0;
const NZ_N16: f64 = 3.81e12;
const NZ_REL_TOL: f64 = 0.005;
const ENUMERATION_TIME_S: f64 = 30.0;
const HIERHOLZER_RUNS: usize = 100;
const HIERHOLZER_N16_TIME_S: f64 = 1.0;
const PROPOSITION_TOL: f64 = 1e-9;
const PROPOSITION_CYCLES: usize = 1000;
const BILP_GAP_TOL: f64 = 1e-9;
const BILP_SEEDS: u64 = 25;
const BILP_SAMPLES: usize = 4;
const BILP_SOFT_TIME_S: f64 = 120.0;
const MAX_CUTS: usize = 50;
const MC_SAMPLES: usize = 200_000;
const MC_CYCLES: usize = 20;
const MC_SP_REL_TOL: f64 = 0.05;
const MC_STHETA_SE: f64 = 3.0;
const POSE_TRIALS: usize = 500;
const POSE_TOL: f64 = 1e-9;
const SEGMENT_TOL: f64 = 1e-9;
const IMPROVEMENT_TOL: f64 = 0.1 + 1e-9;
const BL_TOL: f64 = 1e-12;
const BL_ROUNDING_TOL: f64 = 0.0005 + 1e-12;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn ok<T, E: Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ------------------------------------------------------------ oracles

/// Planar pose `(x, y, theta)` composed by hand.
#[derive(Clone, Copy, Debug)]
struct Pose {
    x: f64,
    y: f64,
    t: f64,
}

impl Pose {
    const ID: Pose = Pose { x: 0.0, y: 0.0, t: 0.0 };

    fn then(self, b: Pose) -> Pose {
        let (s, c) = self.t.sin_cos();
        Pose {
            x: self.x + c * b.x - s * b.y,
            y: self.y + s * b.x + c * b.y,
            t: self.t + b.t,
        }
    }

    fn rotate(t: f64, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = t.sin_cos();
        (c * x - s * y, s * x + c * y)
    }
}

fn product(poses: &[Pose]) -> Pose {
    poses.iter().fold(Pose::ID, |acc, &g| acc.then(g))
}

fn wrap(t: f64) -> f64 {
    let w = t.rem_euclid(std::f64::consts::TAU);
    if w > std::f64::consts::PI {
        w - std::f64::consts::TAU
    } else {
        w
    }
}

/// Every simple cycle of the complete digraph on `n` vertices as a vertex
/// sequence starting at its smallest vertex.
fn dfs_cycles(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if path.len() >= 2 {
            out.push(path.clone());
        }
        for v in path[0] + 1..n {
            if !used[v] {
                used[v] = true;
                path.push(v);
                extend(n, path, used, out);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        extend(n, &mut vec![s], &mut used, &mut out);
    }
    out
}

/// `sum_{k=2..n} C(n,k) (k-1)!`
fn loopless_closed_form(n: u64) -> u64 {
    let mut total = 0;
    for k in 2..=n {
        let c: u64 = (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1));
        let f: u64 = (1..k).product();
        total += c * f;
    }
    total
}

/// Edge index of `a -> b` in the lexicographic order of a complete digraph.
fn edge_of(n: usize, a: usize, b: usize) -> usize {
    a * (n - 1) + if b < a { b } else { b - 1 }
}

fn cycle_edges(n: usize, vs: &[usize]) -> Vec<usize> {
    (0..vs.len()).map(|i| edge_of(n, vs[i], vs[(i + 1) % vs.len()])).collect()
}

fn is_euler_circuit(walk: &[usize], n: usize) -> bool {
    let m = n * (n - 1);
    if walk.len() != m + 1 || walk.first() != walk.last() || walk.iter().any(|&v| v >= n) {
        return false;
    }
    let mut seen = HashSet::new();
    walk.windows(2).all(|p| p[0] != p[1] && seen.insert((p[0], p[1])))
}

// ------------------------------------------------------------ criteria

fn c1_graph_counts() -> Check {
    let start = Instant::now();
    for (nl, ns, n, m) in [(2, 2, 4, 12), (3, 2, 8, 56), (4, 2, 16, 240)] {
        let g = ok(StateDigraph::build(nl, ns))?;
        ensure!(g.n() == n && g.m() == m, "({nl},{ns}) gave ({}, {}), expected ({n}, {m})", g.n(), g.m());
        ensure!(g.incidence_check(), "({nl},{ns}) incidence B != B^i - B^t");
    }
    let s = start.elapsed().as_secs_f64();
    ensure!(s < GRAPH_TIME_S, "took {s:.3} s");
    Ok(format!("(2,2)->(4,12) (3,2)->(8,56) (4,2)->(16,240) in {s:.3} s"))
}

fn c2_cycle_counts() -> Check {
    let start = Instant::now();
    let nz4 = count_simple_cycles_formula(4).to_string();
    ensure!(nz4 == "24", "n_z(4) = {nz4}");
    let nz16: f64 = count_simple_cycles_formula(16).to_string().parse().unwrap();
    let rel = (nz16 - NZ_N16).abs() / NZ_N16;
    ensure!(rel <= NZ_REL_TOL, "n_z(16) = {nz16:e}, {:.3}% from 3.81e12", rel * 100.0);
    let mut counts = Vec::new();
    for n in 2..=7usize {
        let g = ok(StateDigraph::build(1, n))?;
        let listed: Vec<_> = ok(enumerate_simple_cycles(&g, EnumerationLimits::default()))?.collect();
        let distinct: HashSet<_> = listed.iter().map(|c| c.z.clone()).collect();
        ensure!(distinct.len() == listed.len(), "n={n}: duplicate cycles");
        ensure!(listed.iter().all(|c| is_simple_cycle(&c.z, &g)), "n={n}: non-simple cycle emitted");
        let brute: HashSet<Vec<bool>> = dfs_cycles(n)
            .iter()
            .map(|vs| {
                let mut z = vec![false; g.m()];
                cycle_edges(n, vs).into_iter().for_each(|e| z[e] = true);
                z
            })
            .collect();
        ensure!(brute == distinct, "n={n}: enumeration differs from the permutation oracle");
        let closed = loopless_closed_form(n as u64) as usize;
        ensure!(listed.len() == closed, "n={n}: {} cycles, closed form {closed}", listed.len());
        let formula: usize = count_simple_cycles_formula(n as u64).to_string().parse().unwrap();
        ensure!(formula - n == listed.len(), "n={n}: formula {formula} - n != {}", listed.len());
        counts.push(listed.len());
    }
    let s = start.elapsed().as_secs_f64();
    ensure!(s < ENUMERATION_TIME_S, "took {s:.1} s");
    Ok(format!("n_z(4)=24, n_z(16)={nz16:.3e} ({:.3}%), counts n=2..7 {counts:?}, {s:.2} s", rel * 100.0))
}

fn c3_eulerian() -> Check {
    let g = ok(StateDigraph::build(2, 2))?;
    let reference = [1, 5, 9, 10, 3, 11, 6, 12, 7, 2, 8, 4];
    let mut walk = vec![g.edge(reference[0] - 1).source];
    for (k, &e) in reference.iter().enumerate() {
        let edge = g.edge(e - 1);
        ensure!(edge.source == walk[k], "reference edge e{e} does not continue the walk");
        walk.push(edge.target);
    }
    ensure!(walk[0] == 0, "reference circuit does not start at v1");
    ensure!(is_euler_circuit(&walk, 4) && eulerian_verify(&walk, &g), "reference circuit is not Eulerian");
    let mut slowest16 = 0.0f64;
    for (ns, nl) in [(3, 1), (2, 2), (2, 3), (2, 4)] {
        let g = ok(StateDigraph::build(nl, ns))?;
        let n = g.n();
        for seed in 0..HIERHOLZER_RUNS as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = Instant::now();
            let walk = ok(stochastic_hierholzer(n, &mut rng))?;
            let s = start.elapsed().as_secs_f64();
            if n == 16 {
                slowest16 = slowest16.max(s);
            }
            ensure!(is_euler_circuit(&walk, n), "n={n} seed {seed}: not an Eulerian circuit");
            ensure!(eulerian_verify(&walk, &g), "n={n} seed {seed}: library verifier disagrees");
        }
    }
    ensure!(slowest16 < HIERHOLZER_N16_TIME_S, "slowest n=16 run {slowest16:.3} s");
    Ok(format!("reference circuit ok; 4 x {HIERHOLZER_RUNS} seeded runs verify; slowest n=16 run {:.2e} s", slowest16))
}

fn c4_reference_gaits() -> Check {
    let g = ok(StateDigraph::build(2, 2))?;
    let crawl: Vec<bool> = [1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0].iter().map(|&b| b == 1).collect();
    ensure!(is_simple_cycle(&crawl, &g), "z_crawl rejected");
    let ordered = ok(order_cycle(&crawl, &g))?;
    ensure!(ordered.to_string() == "v1v2v3v1", "z_crawl ordered as {ordered}");
    // inching is v1 v2 v4 v2 v1, which departs v2 twice
    let mut inch = vec![false; g.m()];
    for p in [0, 1, 3, 1, 0].windows(2) {
        inch[g.edge_index(p[0], p[1]).unwrap()] = true;
    }
    ensure!(!is_simple_cycle(&inch, &g), "z_inch accepted");
    let diagnosis = diagnose_cycle(&inch, &g);
    ensure!(
        matches!(diagnosis, Err(CycleDiagnosis::RepeatedDeparture { vertex: 1, .. })),
        "z_inch diagnosis {diagnosis:?}"
    );
    let reference: Vec<bool> = [1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1].iter().map(|&b| b == 1).collect();
    let literal = ok(order_cycle(&reference, &g))?;
    Ok(format!(
        "crawl -> {ordered}; inch walk -> {}; (the literal z_inch reads as the cycle {literal})",
        diagnosis.unwrap_err()
    ))
}

fn random_poses(rng: &mut ChaCha8Rng, l: usize) -> Vec<Pose> {
    (0..l)
        .map(|_| Pose {
            x: rng.random_range(-50.0..50.0),
            y: rng.random_range(-50.0..50.0),
            t: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        })
        .collect()
}

fn library_cycle(poses: &[Pose], start: usize) -> Result<Se2Transform, String> {
    let g: Vec<Se2Transform> = poses.iter().map(|p| Se2Transform::new(p.x, p.y, p.t)).collect();
    ok(cycle_transform(&g, start))
}

fn c5_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst1 = 0.0f64;
    let mut pairs = 0;
    for _ in 0..PROPOSITION_CYCLES {
        let l = rng.random_range(2..=8);
        let g = random_poses(&mut rng, l);
        let total = product(&g);
        let gi: Vec<Se2Transform> = (0..l).map(|i| library_cycle(&g, i)).collect::<Result<_, _>>()?;
        for i in 0..l {
            let rotated: Vec<Pose> = g[i..].iter().chain(&g[..i]).copied().collect();
            let own = product(&rotated);
            worst1 = worst1
                .max(wrap(gi[i].theta - total.t).abs())
                .max((gi[i].p.x - own.x).abs())
                .max((gi[i].p.y - own.y).abs());
            for j in i + 1..l {
                let path = product(&g[i..j]);
                let (rx, ry) = Pose::rotate(path.t, gi[j].p.x, gi[j].p.y);
                let (qx, qy) = Pose::rotate(total.t, path.x, path.y);
                let px = rx + path.x - qx;
                let py = ry + path.y - qy;
                worst1 = worst1.max((gi[i].p.x - px).abs()).max((gi[i].p.y - py).abs());
                pairs += 1;
            }
        }
    }
    ensure!(worst1 <= PROPOSITION_TOL, "Proposition 1 residual {worst1:e}");
    let mut worst2 = 0.0f64;
    for _ in 0..PROPOSITION_CYCLES {
        let l = rng.random_range(2..=8);
        let mut g = random_poses(&mut rng, l);
        let rest: f64 = g[..l - 1].iter().map(|p| p.t).sum();
        g[l - 1].t = -rest;
        let mags: Vec<f64> = (0..l).map(|i| library_cycle(&g, i).map(|t| t.p.norm())).collect::<Result<_, _>>()?;
        let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = mags.iter().cloned().fold(0.0, f64::max);
        worst2 = worst2.max(hi - lo);
    }
    ensure!(worst2 <= PROPOSITION_TOL, "Proposition 2 magnitude spread {worst2:e}");
    Ok(format!(
        "{PROPOSITION_CYCLES} cycles, {pairs} start pairs: max residual {worst1:.1e}; zero-rotation magnitude spread {worst2:.1e}"
    ))
}

/// Minimum linear cost over constrained simple cycles, by exhaustive DFS.
fn bilp_oracle(weights: &WeightedDigraph, config: &SynthesisConfig, alpha: &[f64], cycles: &[Vec<usize>]) -> Option<f64> {
    let n = weights.graph().n();
    let cost = |e: usize| {
        let w = weights.weight(e);
        match config.goal {
            Goal::Translation => {
                alpha[0] * w.mu.x + alpha[1] * w.mu.y + config.beta * (w.sigma[(0, 0)] + w.sigma[(1, 1)]) + config.gamma
            }
            Goal::Rotation => alpha[0] * w.mu.z + config.beta * w.sigma[(2, 2)] + config.gamma,
        }
    };
    cycles
        .iter()
        .filter(|vs| vs.len() >= config.min_length)
        .filter_map(|vs| {
            let edges = cycle_edges(n, vs);
            let sum = |f: &dyn Fn(&EdgeWeight) -> f64| edges.iter().map(|&e| f(weights.weight(e))).sum::<f64>();
            let feasible = match config.goal {
                Goal::Translation => sum(&|w| w.mu.z).abs() <= config.eps_theta + 1e-9,
                Goal::Rotation => {
                    sum(&|w| w.mu.x).abs() <= config.eps_t + 1e-9 && sum(&|w| w.mu.y).abs() <= config.eps_t + 1e-9
                }
            };
            feasible.then(|| edges.iter().map(|&e| cost(e)).sum::<f64>())
        })
        .min_by(f64::total_cmp)
}

fn c6_bilp_exactness() -> Check {
    let start = Instant::now();
    let mut compared = 0;
    let mut found = 0;
    let mut worst = 0.0f64;
    for (nl, n) in [(2, 4), (3, 8)] {
        let graph = ok(StateDigraph::build(nl, 2))?;
        let cycles = dfs_cycles(n);
        for goal in [Goal::Translation, Goal::Rotation] {
            let mut found_here = 0;
            for seed in 0..BILP_SEEDS {
                let weights = synthetic_weights(&graph, 1000 + seed, &SyntheticSpec::default());
                let mut config = SynthesisConfig::new(goal);
                config.samples = BILP_SAMPLES;
                config.max_cuts = MAX_CUTS;
                config.eps_t = 5.0;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let report = ok(synthesize(&weights, &config, &mut rng))?;
                for sample in &report.samples {
                    let truth = bilp_oracle(&weights, &config, &sample.alpha, &cycles);
                    match (sample.status, sample.objective, truth) {
                        (SampleStatus::Found, Some(obj), Some(t)) => {
                            worst = worst.max((obj - t).abs());
                            found_here += 1;
                        }
                        (SampleStatus::Infeasible, None, None) => {}
                        (status, obj, t) => {
                            return Err(format!("n={n} {goal:?} seed {seed}: synthesizer {status:?} {obj:?}, oracle {t:?}"));
                        }
                    }
                    compared += 1;
                }
                if let (Some(best), Some(first)) = (
                    report.samples.iter().filter_map(|s| s.objective).min_by(f64::total_cmp),
                    report.gaits.first(),
                ) {
                    ensure!(first.objective == best, "gaits are not sorted by objective");
                }
            }
            ensure!(found_here > 0, "n={n} {goal:?}: no feasible sample at all, fixture is vacuous");
            found += found_here;
        }
    }
    ensure!(worst <= BILP_GAP_TOL, "max gap {worst:e}");
    let s = start.elapsed().as_secs_f64();
    let soft = if s < BILP_SOFT_TIME_S { "within" } else { "OVER" };
    Ok(format!("{compared} alpha samples ({found} feasible) match the exhaustive oracle, max gap {worst:.1e}; {s:.1} s ({soft} the 2 min target)"))
}

/// Cheap disjoint cycles planted in a digraph whose other edges cost
/// `background`.
fn adversarial(nl: usize, planted: &[&[usize]], background: (f64, f64), seed: u64) -> (StateDigraph, Vec<f64>) {
    let g = StateDigraph::build(nl, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<f64> = (0..g.m()).map(|_| rng.random_range(background.0..background.1)).collect();
    for cycle in planted {
        for e in cycle_edges(g.n(), cycle) {
            c[e] = -1.0 - rng.random::<f64>();
        }
    }
    (g, c)
}

/// Cut loop until the first simple cycle, checking every cut against its
/// trigger. Returns the cut count, or `None` past `limit` cuts.
fn cut_loop(g: &StateDigraph, c: Vec<f64>, limit: usize) -> Result<Option<(usize, f64, BilpProblem)>, String> {
    let mut problem = BilpProblem::cycle_space(g, c);
    problem.add_min_length(2);
    for cuts in 0..=limit {
        let sol = ok(solve_bilp(&problem, 200_000))?;
        let z = sol.z.ok_or_else(|| format!("infeasible after {cuts} cuts"))?;
        if is_simple_cycle(&z, g) {
            let obj = problem.objective(&z);
            return Ok(Some((cuts, obj, problem)));
        }
        ensure!(problem.is_feasible(&z), "trigger infeasible before its cut");
        problem.add_cut(&z);
        ensure!(!problem.is_feasible(&z), "cut does not exclude its trigger");
    }
    Ok(None)
}

fn c7_cutting_planes() -> Check {
    const EXPENSIVE: (f64, f64) = (2.0, 3.0);
    let fixtures: Vec<(usize, Vec<&[usize]>)> = vec![
        (2, vec![&[0, 1], &[2, 3]]),
        (3, vec![&[0, 1], &[2, 3], &[4, 5]]),
        (3, vec![&[0, 1], &[2, 3], &[4, 5], &[6, 7]]),
        (3, vec![&[0, 1, 2], &[3, 4, 5], &[6, 7]]),
        (4, vec![&[0, 1], &[2, 3], &[4, 5]]),
        (4, vec![&[0, 1], &[5, 9], &[12, 3], &[14, 7]]),
    ];
    let mut summary = Vec::new();
    for (k, (nl, planted)) in fixtures.iter().enumerate() {
        let (g, c) = adversarial(*nl, planted, EXPENSIVE, 70 + k as u64);
        let (cuts, obj, problem) = cut_loop(&g, c, MAX_CUTS - 1)
            .map_err(|e| format!("fixture {k}: {e}"))?
            .ok_or_else(|| format!("fixture {k}: not a simple cycle within L = {MAX_CUTS} solves"))?;
        ensure!(cuts > 0, "fixture {k}: the first solution was already simple, fixture is not adversarial");
        if planted.iter().all(|p| p.len() == 2) {
            let unions = (1 << planted.len()) - planted.len() - 1;
            ensure!(cuts == unions, "fixture {k}: {cuts} cuts, expected one per union of planted cycles ({unions})");
        }
        if g.n() <= 8 {
            let truth = dfs_cycles(g.n())
                .iter()
                .map(|vs| cycle_edges(g.n(), vs).iter().map(|&e| problem.c[e]).sum::<f64>())
                .min_by(f64::total_cmp)
                .unwrap();
            ensure!((obj - truth).abs() <= BILP_GAP_TOL, "fixture {k}: objective {obj} vs oracle {truth}");
        } else {
            let best_planted = planted
                .iter()
                .map(|vs| cycle_edges(g.n(), vs).iter().map(|&e| problem.c[e]).sum::<f64>())
                .min_by(f64::total_cmp)
                .unwrap();
            ensure!(obj <= best_planted + BILP_GAP_TOL, "fixture {k}: objective {obj} worse than a planted cycle");
        }
        summary.push(format!("n={}:{cuts}", g.n()));
    }
    // Outside the pass condition: unions that splice planted cycles through
    // cheap connectors, where no-good cuts need more than L solves.
    let mut stress = Vec::new();
    for (nl, planted, background) in [
        (3, vec![&[0usize, 1][..], &[2, 3], &[4, 5], &[6, 7]], (0.5, 1.5)),
        (4, vec![&[0, 1, 2, 3][..], &[4, 5, 6], &[7, 8], &[9, 10]], EXPENSIVE),
        (4, vec![&[0, 1][..], &[2, 3], &[4, 5], &[6, 7, 8], &[9, 10, 11]], EXPENSIVE),
    ] {
        let (g, c) = adversarial(nl, &planted, background, 72);
        let label = match cut_loop(&g, c, 400)? {
            Some((cuts, _, _)) => format!("{cuts}"),
            None => ">400".into(),
        };
        stress.push(format!("n={} {} planted: {label}", g.n(), planted.len()));
    }
    Ok(format!(
        "cuts to first simple cycle [{}], each cut excludes its trigger; stress fixtures beyond L: [{}]",
        summary.join(" "),
        stress.join(", ")
    ))
}

fn factor(sigma: &Matrix3<f64>) -> Matrix3<f64> {
    let eig = ((sigma + sigma.transpose()) * 0.5).symmetric_eigen();
    eig.eigenvectors * Matrix3::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
}

fn c8_covariance() -> Check {
    let graph = ok(StateDigraph::build(3, 2))?;
    let weights = synthetic_weights(&graph, 8, &SyntheticSpec::default());
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst_sp = 0.0f64;
    let mut worst_se = 0.0f64;
    for _ in 0..MC_CYCLES {
        let mut vs: Vec<usize> = (0..graph.n()).collect();
        for i in 0..4 {
            let j = rng.random_range(i..vs.len());
            vs.swap(i, j);
        }
        let edges = cycle_edges(graph.n(), &vs[..4]);
        let ws: Vec<&EdgeWeight> = edges.iter().map(|&e| weights.weight(e)).collect();
        let fo = propagate_cycle_covariance(&ws);
        let fo_sp = fo[(0, 0)] + fo[(1, 1)];
        let fo_st = fo[(2, 2)];
        let factors: Vec<Matrix3<f64>> = ws.iter().map(|w| factor(&w.sigma)).collect();
        let (mut s, mut ss) = (Vector3::zeros(), Vector3::zeros());
        for _ in 0..MC_SAMPLES {
            let mut pose = Pose::ID;
            for (w, l) in ws.iter().zip(&factors) {
                let z = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                let d = w.mu + l * z;
                pose = pose.then(Pose { x: d.x, y: d.y, t: d.z });
            }
            let v = Vector3::new(pose.x, pose.y, pose.t);
            s += v;
            ss += v.component_mul(&v);
        }
        let nf = MC_SAMPLES as f64;
        let var = (ss - s.component_mul(&s) / nf) / (nf - 1.0);
        let mc_sp = var.x + var.y;
        worst_sp = worst_sp.max((fo_sp - mc_sp).abs() / mc_sp);
        let se = var.z * (2.0 / (nf - 1.0)).sqrt();
        worst_se = worst_se.max((fo_st - var.z).abs() / se);
    }
    ensure!(worst_sp <= MC_SP_REL_TOL, "s_p off by {:.2}%", worst_sp * 100.0);
    ensure!(worst_se <= MC_STHETA_SE, "s_theta off by {worst_se:.2} standard errors");
    Ok(format!(
        "{MC_CYCLES} cycles x {MC_SAMPLES} draws: s_p within {:.2}%, s_theta within {worst_se:.2} SE",
        worst_sp * 100.0
    ))
}

fn c9_pose_and_segmentation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_pose = 0.0f64;
    for _ in 0..POSE_TRIALS {
        let k = rng.random_range(3..=6);
        let reference: Vec<Vector2<f64>> =
            (0..k).map(|_| Vector2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0))).collect();
        let truth = Pose {
            x: rng.random_range(-500.0..500.0),
            y: rng.random_range(-500.0..500.0),
            t: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        };
        let current: Vec<Vector2<f64>> = reference
            .iter()
            .map(|q| {
                let (x, y) = Pose::rotate(truth.t, q.x, q.y);
                Vector2::new(x + truth.x, y + truth.y)
            })
            .collect();
        let g = ok(estimate_pose(&reference, &current))?;
        worst_pose = worst_pose
            .max(wrap(g.theta - truth.t).abs())
            .max((g.p.x - truth.x).abs())
            .max((g.p.y - truth.y).abs());
    }
    ensure!(worst_pose <= POSE_TOL, "pose error {worst_pose:e}");
    let mut worst_seg = 0.0f64;
    for _ in 0..100 {
        let len = rng.random_range(3..=20);
        let motions: Vec<Se2Transform> = random_poses(&mut rng, len).iter().map(|p| Se2Transform::new(p.x, p.y, p.t)).collect();
        let tau = rng.random_range(300.0..700.0);
        let steps = rng.random_range(1..=10);
        let start = Se2Transform::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0), rng.random_range(-3.0..3.0));
        let trace = render_trace(&motions, tau, steps, start);
        let edges: Vec<usize> = (0..len).collect();
        let obs = ok(segment_trace(&trace, &edges, tau))?;
        ensure!(obs.len() == len, "segmented {} of {len} primitives", obs.len());
        for (o, g) in obs.iter().zip(&motions) {
            worst_seg = worst_seg
                .max((o.delta.x - g.p.x).abs())
                .max((o.delta.y - g.p.y).abs())
                .max((o.delta.z - g.theta).abs());
        }
    }
    ensure!(worst_seg <= SEGMENT_TOL, "segmentation error {worst_seg:e}");
    Ok(format!("{POSE_TRIALS} transforms recovered to {worst_pose:.1e}; segmentation round-trip {worst_seg:.1e}"))
}

fn c10_loss_of_limb() -> Check {
    let graph = ok(StateDigraph::build(4, 2))?;
    let weights = synthetic_weights(&graph, 10, &SyntheticSpec::default());
    ensure!(weights.weights().iter().all(|w| w.min_eigenvalue() > 0.0), "fixture weights are degenerate");
    let pruned = ok(prune_failed_limbs(&graph, &[LimbFailure { limb: 0, state: 0 }]))?;
    ensure!(pruned.graph.n() == 8 && pruned.graph.m() == 56, "pruned to ({}, {})", pruned.graph.n(), pruned.graph.m());
    let restricted = ok(weights.restrict(&pruned))?;
    let mut found = Vec::new();
    for goal in [Goal::Translation, Goal::Rotation] {
        let mut config = SynthesisConfig::new(goal);
        config.samples = 20;
        config.max_cuts = MAX_CUTS;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let report = ok(synthesize(&restricted, &config, &mut rng))?;
        ensure!(!report.gaits.is_empty(), "no {goal:?} gait after pruning");
        found.push(format!("{} {goal:?} (best {})", report.gaits.len(), report.gaits[0].gait));
    }
    Ok(format!("16 -> 8 states / 56 edges; re-synthesized {}", found.join(", ")))
}

fn c11_improvement_arithmetic() -> Check {
    let a = ok(improvement(6.64, 3.68))?;
    let b = ok(improvement(1.61, 2.30))?;
    ensure!((a - 80.4).abs() <= IMPROVEMENT_TOL, "improvement(6.64, 3.68) = {a}");
    ensure!((b + 30.1).abs() <= IMPROVEMENT_TOL, "improvement(1.61, 2.30) = {b}");
    ensure!(improvement(1.0, 0.0).is_err(), "zero baseline accepted");
    let tau_ms = 1000.0;
    let samples = (0..=4)
        .map(|k| TrajectorySample {
            cycle: k,
            primitive: if k == 0 { 0 } else { 1 },
            t_s: k as f64,
            x: 7.15 * k as f64,
            y: 0.0,
            theta: 0.0,
        })
        .collect();
    let trajectory = Trajectory { samples, tau_ms, edges_per_cycle: 1 };
    let record = ok(characterize("t", &trajectory, Some(BODY_LENGTH_THREE_LIMB_MM)))?;
    let bl = record.body_lengths_per_s.unwrap();
    ensure!((record.mean_v - 7.15).abs() <= BL_TOL, "mean speed {}", record.mean_v);
    ensure!((bl - 0.0325).abs() <= BL_TOL, "7.15 mm/s at 220 mm = {bl} BL/s");
    ensure!((bl - 0.033).abs() <= BL_ROUNDING_TOL, "{bl} BL/s does not print as 0.033");
    Ok(format!("{a:.2}% and {b:.2}% (reference 80.4, -30.1); 7.15 mm/s / 220 mm = {bl:.4} BL/s"))
}

fn pmfc(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pmfc")).args(args).current_dir(dir).output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "pmfc {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    Ok(())
}

fn write_traces(dir: &Path) -> Result<Vec<String>, String> {
    let graph = ok(io::read_graph(&dir.join("g.json")))?;
    let plan = ok(io::read_plan(&dir.join("plan.json"), &graph))?;
    let truth = synthetic_weights(&graph, 12, &SyntheticSpec::default());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut names = Vec::new();
    for trial in 0..plan.trials.len() {
        let motions: Vec<Se2Transform> = plan
            .trial_edges(trial, &graph)
            .iter()
            .map(|&e| {
                let d = truth.weight(e).sample(&mut rng);
                Se2Transform::new(d.x, d.y, d.z)
            })
            .collect();
        let name = format!("trial{}.csv", trial + 1);
        ok(io::write_pose_trace(&dir.join(&name), &render_trace(&motions, plan.tau_ms, 5, Se2Transform::identity())))?;
        names.push(name);
    }
    Ok(names)
}

fn pipeline(dir: &Path) -> Result<Vec<&'static str>, String> {
    pmfc(dir, &["graph", "--limbs", "2", "--states", "2", "-o", "g.json"])?;
    pmfc(dir, &["plan", "--graph", "g.json", "--trials", "5", "--tau-ms", "550", "--seed", "7", "-o", "plan.json"])?;
    let traces = write_traces(dir)?;
    let mut ingest = vec!["ingest", "--graph", "g.json", "--plan", "plan.json", "-o", "w.json", "--trace"];
    ingest.extend(traces.iter().map(String::as_str));
    pmfc(dir, &ingest)?;
    pmfc(dir, &["synthesize", "--weights", "w.json", "--goal", "translation", "--n", "20", "--max-cuts", "50", "--seed", "3", "-o", "gt.json"])?;
    pmfc(dir, &["synthesize", "--weights", "w.json", "--goal", "rotation", "--n", "20", "--max-cuts", "50", "--eps-t", "5", "--seed", "3", "-o", "gr.json"])?;
    pmfc(dir, &["enumerate", "--graph", "g.json", "-o", "cycles.csv"])?;
    pmfc(dir, &["pareto", "--weights", "w.json", "-o", "costs.csv"])?;
    pmfc(dir, &["simulate", "--weights", "w.json", "--vertices", "1,2,4,3", "--cycles", "6", "--mode", "sampled", "--seed", "9", "-o", "traj.csv"])?;
    pmfc(dir, &["characterize", "--trajectory", "traj.csv", "--robot", "three-limb", "-o", "char.csv"])?;
    pmfc(dir, &["prune", "--weights", "w.json", "--fail", "1:0", "-o", "pw.json"])?;
    Ok(vec![
        "g.json", "plan.json", "w.json", "gt.json", "gr.json", "cycles.csv", "costs.csv", "traj.csv", "char.csv", "pw.json",
    ])
}

fn manifest_without_time(path: &Path) -> Result<serde_json::Value, String> {
    let text = ok(std::fs::read_to_string(path))?;
    let mut v: serde_json::Value = ok(serde_json::from_str(&text))?;
    let obj = v.as_object_mut().ok_or("manifest is not an object")?;
    ensure!(obj.remove("started_unix_ms").is_some() && obj.remove("finished_unix_ms").is_some(), "manifest has no timestamps");
    Ok(v)
}

fn c12_determinism() -> Check {
    let a = ok(tempfile::tempdir())?;
    let b = ok(tempfile::tempdir())?;
    let outputs = pipeline(a.path())?;
    pipeline(b.path())?;
    for name in &outputs {
        let da = ok(std::fs::read(a.path().join(name)))?;
        let db = ok(std::fs::read(b.path().join(name)))?;
        ensure!(!da.is_empty() && da == db, "{name} differs between runs");
        let manifest = io::manifest_path(Path::new(name));
        ensure!(
            manifest_without_time(&a.path().join(&manifest))? == manifest_without_time(&b.path().join(&manifest))?,
            "{} differs beyond its timestamps",
            manifest.display()
        );
    }
    Ok(format!("{} stage outputs byte-identical across two runs; manifests differ only in timestamps", outputs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("graph counts", c1_graph_counts),
        ("simple-cycle counts", c2_cycle_counts),
        ("Eulerian schedules", c3_eulerian),
        ("reference gait vectors", c4_reference_gaits),
        ("transformation invariance", c5_invariance),
        ("BILP exactness", c6_bilp_exactness),
        ("cutting-plane soundness", c7_cutting_planes),
        ("covariance propagation", c8_covariance),
        ("pose estimation and segmentation", c9_pose_and_segmentation),
        ("loss-of-limb re-synthesis", c10_loss_of_limb),
        ("speed improvement arithmetic", c11_improvement_arithmetic),
        ("CLI determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
