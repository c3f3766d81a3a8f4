use super::simplex::{DualSimplex, LpStatus, RowKind, FEAS_TOL};
use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-6;
const PRUNE_TOL: f64 = 1e-9;

/// Search statistics of one branch-and-bound run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BnbStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    /// `(node, objective)` each time the incumbent improves.
    pub incumbent_history: Vec<(usize, f64)>,
    /// Lower bound proven at termination; equals the incumbent objective
    /// when the search completes with a solution.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbSolution {
    pub z: Option<Vec<bool>>,
    pub objective: Option<f64>,
    pub stats: BnbStats,
}

/// Exact minimization of `c^T z` over binary `z` with depth-first
/// branch-and-bound: most fractional variable (lowest index on ties),
/// 0-branch first, LP bounds from the dual simplex warm-started at the
/// parent's basis.
pub(crate) fn branch_and_bound(
    cost: &[f64],
    rows: &[(Vec<f64>, RowKind, f64)],
    node_budget: usize,
) -> Result<BnbSolution> {
    let mut stats = BnbStats::default();
    let mut incumbent: Option<(Vec<bool>, f64)> = None;
    let mut stack: Vec<(DualSimplex, f64)> = vec![(DualSimplex::new(cost, rows), f64::NEG_INFINITY)];

    while let Some((mut lp, parent_bound)) = stack.pop() {
        if let Some((_, inc)) = &incumbent {
            if parent_bound >= inc - PRUNE_TOL {
                continue;
            }
        }
        if stats.nodes >= node_budget {
            let open = stack.iter().map(|(_, b)| *b).fold(parent_bound, f64::min);
            return Err(Error::Resource {
                budget: node_budget,
                incumbent: incumbent.map(|(_, v)| v),
                bound: open,
            });
        }
        stats.nodes += 1;
        let before = lp.iterations;
        let status = lp.solve();
        stats.lp_iterations += lp.iterations - before;
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::IterationLimit => {
                return Err(Error::Resource {
                    budget: node_budget,
                    incumbent: incumbent.map(|(_, v)| v),
                    bound: parent_bound,
                })
            }
        }
        let obj = lp.objective();
        if let Some((_, inc)) = &incumbent {
            if obj >= inc - PRUNE_TOL {
                continue;
            }
        }
        let values = lp.values();
        let branch = values
            .iter()
            .enumerate()
            .map(|(j, &v)| (j, (v - v.round()).abs()))
            .filter(|&(_, frac)| frac > INT_TOL)
            .fold(None::<(usize, f64)>, |best, (j, frac)| match best {
                Some((_, bf)) if bf >= frac - 1e-12 => best,
                _ => Some((j, frac)),
            });
        match branch {
            None => {
                let z: Vec<bool> = values.iter().map(|&v| v > 0.5).collect();
                let exact = cost.iter().zip(&z).filter(|(_, &b)| b).map(|(c, _)| c).sum::<f64>();
                if satisfies(&z, rows) && incumbent.as_ref().is_none_or(|(_, inc)| exact < *inc) {
                    stats.incumbent_history.push((stats.nodes, exact));
                    incumbent = Some((z, exact));
                }
            }
            Some((j, _)) => {
                let mut one = lp.clone();
                one.set_bounds(j, 1.0, 1.0);
                lp.set_bounds(j, 0.0, 0.0);
                stack.push((one, obj));
                stack.push((lp, obj));
            }
        }
    }

    stats.bound = incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
    Ok(match incumbent {
        Some((z, v)) => BnbSolution {
            z: Some(z),
            objective: Some(v),
            stats,
        },
        None => BnbSolution {
            z: None,
            objective: None,
            stats,
        },
    })
}

fn satisfies(z: &[bool], rows: &[(Vec<f64>, RowKind, f64)]) -> bool {
    rows.iter().all(|(a, kind, b)| {
        let lhs: f64 = a.iter().zip(z).filter(|(_, &on)| on).map(|(v, _)| v).sum();
        let tol = FEAS_TOL * (1.0 + b.abs());
        match kind {
            RowKind::Le => lhs <= b + tol,
            RowKind::Eq => (lhs - b).abs() <= tol,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(cost: &[f64], rows: &[(Vec<f64>, RowKind, f64)]) -> Option<f64> {
        (0u32..1 << cost.len())
            .map(|mask| (0..cost.len()).map(|j| mask >> j & 1 == 1).collect::<Vec<_>>())
            .filter(|z| satisfies(z, rows))
            .map(|z| cost.iter().zip(&z).filter(|(_, &b)| b).map(|(c, _)| c).sum::<f64>())
            .fold(None, |best: Option<f64>, v| Some(best.map_or(v, |b| b.min(v))))
    }

    #[test]
    fn knapsack_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let n = 10;
            let cost: Vec<f64> = (0..n).map(|_| -rng.random_range(1.0..10.0)).collect();
            let rows: Vec<_> = (0..3)
                .map(|_| {
                    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
                    (a, RowKind::Le, rng.random_range(5.0..15.0))
                })
                .collect();
            let sol = branch_and_bound(&cost, &rows, 100_000).unwrap();
            let best = brute_force(&cost, &rows).unwrap();
            assert!((sol.objective.unwrap() - best).abs() < 1e-9);
            let hist: Vec<f64> = sol.stats.incumbent_history.iter().map(|h| h.1).collect();
            assert!(hist.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(sol.stats.bound, sol.objective.unwrap());
        }
    }

    #[test]
    fn budget_exhaustion_reports_incumbent() {
        let n = 14;
        let cost: Vec<f64> = (0..n).map(|j| -1.0 - (j as f64) * 0.01).collect();
        let rows = vec![(vec![2.0; n], RowKind::Le, 7.0)];
        match branch_and_bound(&cost, &rows, 1) {
            Err(Error::Resource { budget: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
