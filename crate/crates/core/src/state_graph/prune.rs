use super::{RobotState, StateDigraph};
use crate::error::{Error, Result};

/// A limb whose actuator is stuck in one state. `limb` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimbFailure {
    pub limb: usize,
    pub state: usize,
}

/// Result of restricting a digraph to the states reachable with some limbs
/// stuck. The surviving subgraph is again complete and is numbered exactly
/// like a fresh digraph over the still-working limbs.
#[derive(Debug, Clone)]
pub struct PrunedDigraph {
    pub graph: StateDigraph,
    pub failures: Vec<LimbFailure>,
    /// Original indices of the limbs that still work, in order.
    pub working_limbs: Vec<usize>,
    /// old vertex -> new vertex
    pub vertex_map: Vec<Option<usize>>,
    /// old edge -> new edge
    pub edge_map: Vec<Option<usize>>,
    /// new vertex -> old vertex
    pub surviving_vertices: Vec<usize>,
    /// new edge -> old edge
    pub surviving_edges: Vec<usize>,
}

impl PrunedDigraph {
    /// Full limb-state assignment (in the original limb order) of a vertex
    /// of the pruned graph.
    pub fn original_state(&self, new_vertex: usize, original: &StateDigraph) -> RobotState {
        original.robot_state(self.surviving_vertices[new_vertex])
    }
}

pub fn prune_failed_limbs(graph: &StateDigraph, failures: &[LimbFailure]) -> Result<PrunedDigraph> {
    let mut failed = vec![None; graph.n_limbs()];
    for f in failures {
        if f.limb >= graph.n_limbs() {
            return Err(Error::domain(format!(
                "limb {} does not exist on a {}-limb robot",
                f.limb + 1,
                graph.n_limbs()
            )));
        }
        if f.state >= graph.states_per_limb() {
            return Err(Error::domain(format!(
                "state {} is invalid for a limb with {} states",
                f.state,
                graph.states_per_limb()
            )));
        }
        if failed[f.limb].replace(f.state).is_some() {
            return Err(Error::domain(format!("limb {} listed twice", f.limb + 1)));
        }
    }

    let surviving_vertices: Vec<usize> = (0..graph.n())
        .filter(|&v| {
            let state = graph.robot_state(v);
            state
                .limb_states()
                .iter()
                .zip(&failed)
                .all(|(s, stuck)| stuck.is_none_or(|x| x == *s))
        })
        .collect();
    let mut vertex_map = vec![None; graph.n()];
    for (new, &old) in surviving_vertices.iter().enumerate() {
        vertex_map[old] = Some(new);
    }

    let working_limbs: Vec<usize> = (0..graph.n_limbs()).filter(|&l| failed[l].is_none()).collect();
    let pruned = StateDigraph::complete(working_limbs.len(), graph.states_per_limb());
    debug_assert_eq!(pruned.n(), surviving_vertices.len());

    let mut edge_map = vec![None; graph.m()];
    let surviving_edges: Vec<usize> = pruned
        .edges()
        .iter()
        .map(|e| {
            graph
                .edge_index(surviving_vertices[e.source], surviving_vertices[e.target])
                .expect("surviving vertices of a complete digraph stay adjacent")
        })
        .collect();
    for (new, &old) in surviving_edges.iter().enumerate() {
        edge_map[old] = Some(new);
    }

    let mut failures = failures.to_vec();
    failures.sort_by_key(|f| f.limb);
    Ok(PrunedDigraph {
        graph: pruned,
        failures,
        working_limbs,
        vertex_map,
        edge_map,
        surviving_vertices,
        surviving_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent filter: enumerate every vertex, keep those whose stuck
    /// limbs hold their stuck state.
    fn brute_force_survivors(g: &StateDigraph, failures: &[LimbFailure]) -> Vec<usize> {
        (0..g.n())
            .filter(|&v| {
                let digits: Vec<usize> = (0..g.n_limbs())
                    .map(|l| (v / g.states_per_limb().pow((g.n_limbs() - 1 - l) as u32)) % g.states_per_limb())
                    .collect();
                failures.iter().all(|f| digits[f.limb] == f.state)
            })
            .collect()
    }

    #[test]
    fn fourth_limb_stuck_uncurled() {
        let g = StateDigraph::build(4, 2).unwrap();
        let failures = [LimbFailure { limb: 3, state: 0 }];
        let p = prune_failed_limbs(&g, &failures).unwrap();
        assert_eq!((p.graph.n(), p.graph.m()), (8, 56));
        assert_eq!(p.surviving_vertices, brute_force_survivors(&g, &failures));
        assert_eq!(p.graph, StateDigraph::build(3, 2).unwrap());
        for (new, &old) in p.surviving_edges.iter().enumerate() {
            let (ne, oe) = (p.graph.edge(new), g.edge(old));
            assert_eq!(p.surviving_vertices[ne.source], oe.source);
            assert_eq!(p.surviving_vertices[ne.target], oe.target);
            assert_eq!(p.edge_map[old], Some(new));
        }
    }

    #[test]
    fn no_failures_is_identity() {
        let g = StateDigraph::build(3, 2).unwrap();
        let p = prune_failed_limbs(&g, &[]).unwrap();
        assert_eq!(p.graph, g);
        assert_eq!(p.surviving_vertices, (0..8).collect::<Vec<_>>());
        assert_eq!(p.surviving_edges, (0..56).collect::<Vec<_>>());
    }

    #[test]
    fn two_of_three_limbs_stuck() {
        let g = StateDigraph::build(3, 2).unwrap();
        let failures = [LimbFailure { limb: 0, state: 1 }, LimbFailure { limb: 1, state: 0 }];
        let p = prune_failed_limbs(&g, &failures).unwrap();
        assert_eq!((p.graph.n(), p.graph.m()), (2, 2));
        assert_eq!(p.surviving_vertices, brute_force_survivors(&g, &failures));
        assert_eq!(p.original_state(1, &g).to_string(), "{101}");
    }

    #[test]
    fn every_limb_stuck_leaves_one_state() {
        let g = StateDigraph::build(2, 2).unwrap();
        let failures = [LimbFailure { limb: 0, state: 1 }, LimbFailure { limb: 1, state: 1 }];
        let p = prune_failed_limbs(&g, &failures).unwrap();
        assert_eq!((p.graph.n(), p.graph.m()), (1, 0));
        assert_eq!(p.surviving_vertices, [3]);
    }

    #[test]
    fn pruning_matches_smaller_robot() {
        let g = StateDigraph::build(4, 2).unwrap();
        for k in 0..=3usize {
            let failures: Vec<_> = (0..k).map(|l| LimbFailure { limb: l, state: l % 2 }).collect();
            let p = prune_failed_limbs(&g, &failures).unwrap();
            assert_eq!(p.graph, StateDigraph::build(4 - k, 2).unwrap());
        }
    }

    #[test]
    fn invalid_failures() {
        let g = StateDigraph::build(2, 2).unwrap();
        assert!(prune_failed_limbs(&g, &[LimbFailure { limb: 2, state: 0 }]).is_err());
        assert!(prune_failed_limbs(&g, &[LimbFailure { limb: 0, state: 2 }]).is_err());
        let dup = [LimbFailure { limb: 0, state: 0 }, LimbFailure { limb: 0, state: 1 }];
        assert!(prune_failed_limbs(&g, &dup).is_err());
    }
}
