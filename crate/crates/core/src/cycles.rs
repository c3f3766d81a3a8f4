//! Simple cycles of a state digraph as binary edge indicators.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::state_graph::StateDigraph;

/// Default largest digraph [`enumerate_simple_cycles`] will exhaust without
/// a length bound.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// A simple cycle: the indicator `z` plus its execution order from the
/// smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaitVector {
    pub z: Vec<bool>,
    pub edges: Vec<usize>,
    /// Closed: the last vertex repeats the first.
    pub vertices: Vec<usize>,
}

impl GaitVector {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Builds a cycle from a closed or open vertex sequence, e.g. `[0, 1, 2]`
    /// or `[0, 1, 2, 0]`.
    pub fn from_vertices(graph: &StateDigraph, vertices: &[usize]) -> Result<GaitVector> {
        let mut seq = vertices.to_vec();
        if seq.len() > 1 && seq.first() == seq.last() {
            seq.pop();
        }
        let mut z = vec![false; graph.m()];
        for (i, &v) in seq.iter().enumerate() {
            let w = seq[(i + 1) % seq.len()];
            let e = graph
                .edge_index(v, w)
                .ok_or_else(|| Error::domain(format!("v{} -> v{} is not an edge", v + 1, w + 1)))?;
            z[e] = true;
        }
        order_cycle(&z, graph)
    }

    /// `v1;v2;v3;v1`
    pub fn vertex_labels(&self) -> String {
        self.vertices
            .iter()
            .map(|v| format!("v{}", v + 1))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `z` as a string of `0`/`1` in edge order.
    pub fn bitstring(&self) -> String {
        self.z.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for GaitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            write!(f, "v{}", v + 1)?;
        }
        Ok(())
    }
}

/// Why an indicator vector is not a single simple cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleDiagnosis {
    WrongLength { expected: usize, got: usize },
    Empty,
    /// `(B z)_v != 0`
    Unbalanced { vertex: usize, net: i64 },
    /// `(B^i z)_v > 1`
    RepeatedDeparture { vertex: usize, departures: i64 },
    /// A union of vertex-disjoint cycles; vertex sets per component.
    Disconnected { components: Vec<Vec<usize>> },
}

impl fmt::Display for CycleDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleDiagnosis::WrongLength { expected, got } => {
                write!(f, "indicator has {got} entries, digraph has {expected} edges")
            }
            CycleDiagnosis::Empty => f.write_str("no edges selected"),
            CycleDiagnosis::Unbalanced { vertex, net } => {
                write!(f, "v{} has out-degree minus in-degree {net}", vertex + 1)
            }
            CycleDiagnosis::RepeatedDeparture { vertex, departures } => {
                write!(f, "v{} is departed {departures} times", vertex + 1)
            }
            CycleDiagnosis::Disconnected { components } => {
                write!(f, "{} disjoint cycles:", components.len())?;
                for c in components {
                    let labels: Vec<String> = c.iter().map(|v| format!("v{}", v + 1)).collect();
                    write!(f, " {{{}}}", labels.join(","))?;
                }
                Ok(())
            }
        }
    }
}

/// Balance, single departure, and connectivity of the selected edges.
pub fn diagnose_cycle(z: &[bool], graph: &StateDigraph) -> std::result::Result<(), CycleDiagnosis> {
    if z.len() != graph.m() {
        return Err(CycleDiagnosis::WrongLength {
            expected: graph.m(),
            got: z.len(),
        });
    }
    if !z.iter().any(|&b| b) {
        return Err(CycleDiagnosis::Empty);
    }
    for (vertex, &net) in graph.incidence().apply(z).iter().enumerate() {
        if net != 0 {
            return Err(CycleDiagnosis::Unbalanced { vertex, net });
        }
    }
    for (vertex, &departures) in graph.initial().apply(z).iter().enumerate() {
        if departures > 1 {
            return Err(CycleDiagnosis::RepeatedDeparture { vertex, departures });
        }
    }
    let components = components(z, graph);
    if components.len() > 1 {
        return Err(CycleDiagnosis::Disconnected { components });
    }
    Ok(())
}

pub fn is_simple_cycle(z: &[bool], graph: &StateDigraph) -> bool {
    diagnose_cycle(z, graph).is_ok()
}

/// Successor of each vertex under the selected edges.
fn successors(z: &[bool], graph: &StateDigraph) -> Vec<Option<usize>> {
    let mut next = vec![None; graph.n()];
    for (e, _) in z.iter().enumerate().filter(|(_, &b)| b) {
        let edge = graph.edge(e);
        next[edge.source] = Some(edge.target);
    }
    next
}

/// Vertex sets of the cycles in a balanced, single-departure selection,
/// each listed in traversal order from its smallest vertex.
fn components(z: &[bool], graph: &StateDigraph) -> Vec<Vec<usize>> {
    let next = successors(z, graph);
    let mut seen = vec![false; graph.n()];
    let mut out = Vec::new();
    for start in 0..graph.n() {
        if seen[start] || next[start].is_none() {
            continue;
        }
        let mut comp = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            comp.push(v);
            match next[v] {
                Some(w) => v = w,
                None => break,
            }
        }
        out.push(comp);
    }
    out
}

/// Orders a simple cycle from its smallest vertex.
pub fn order_cycle(z: &[bool], graph: &StateDigraph) -> Result<GaitVector> {
    diagnose_cycle(z, graph).map_err(Error::Constraint)?;
    let next = successors(z, graph);
    let start = next.iter().position(Option::is_some).expect("non-empty cycle");
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut v = start;
    loop {
        let w = next[v].expect("balanced selection");
        edges.push(graph.edge_index(v, w).expect("selected edge"));
        vertices.push(w);
        if w == start {
            break;
        }
        v = w;
    }
    Ok(GaitVector {
        z: z.to_vec(),
        edges,
        vertices,
    })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// `sum_{i=1}^{n} C(n, n-i+1) (n-i)!`, evaluated exactly. Its `i = n` term
/// counts `n` length-1 cycles that a loopless digraph does not have, so it
/// exceeds [`count_simple_cycles_loopless`] by exactly `n`.
pub fn count_simple_cycles_formula(n: u64) -> BigUint {
    (1..=n).map(|i| binomial(n, n - i + 1) * factorial(n - i)).sum()
}

/// Simple cycles of length `>= 2` in the complete loopless digraph on `n`
/// vertices: `sum_{k=2}^{n} C(n, k) (k-1)!`.
pub fn count_simple_cycles_loopless(n: u64) -> BigUint {
    (2..=n).map(|k| binomial(n, k) * factorial(k - 1)).sum()
}

/// Three significant digits in scientific notation, e.g. `3.81e12`.
pub fn scientific(x: &BigUint) -> String {
    let digits = x.to_string();
    if digits.len() <= 4 {
        return digits;
    }
    let mantissa: f64 = format!("{}.{}", &digits[..1], &digits[1..digits.len().min(6)]).parse().unwrap();
    let mut s = format!("{mantissa:.2}e{}", digits.len() - 1);
    if mantissa >= 9.995 {
        s = format!("1.00e{}", digits.len());
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_len: Option<usize>,
    pub cap: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_len: None,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Lazily enumerates every simple cycle of length at least 2 once, with
/// Johnson's blocking scheme, canonical start at the smallest vertex.
///
/// Refuses digraphs above `limits.cap` vertices unless a length bound is
/// given.
pub fn enumerate_simple_cycles(graph: &StateDigraph, limits: EnumerationLimits) -> Result<SimpleCycles<'_>> {
    if graph.n() > limits.cap && limits.max_len.is_none() {
        return Err(Error::EnumerationRefused {
            n: graph.n(),
            cap: limits.cap,
            estimate: scientific(&count_simple_cycles_formula(graph.n() as u64)),
        });
    }
    let adj = (0..graph.n())
        .map(|v| graph.out_edges(v).map(|e| graph.edge(e).target).collect())
        .collect();
    Ok(SimpleCycles {
        graph,
        adj,
        max_len: limits.max_len.unwrap_or(usize::MAX),
        start: 0,
        fresh: true,
        blocked: vec![false; graph.n()],
        b_lists: vec![Vec::new(); graph.n()],
        frames: Vec::new(),
        path: Vec::new(),
    })
}

struct Frame {
    v: usize,
    next: usize,
    found: bool,
}

pub struct SimpleCycles<'g> {
    graph: &'g StateDigraph,
    adj: Vec<Vec<usize>>,
    max_len: usize,
    start: usize,
    fresh: bool,
    blocked: Vec<bool>,
    b_lists: Vec<Vec<usize>>,
    frames: Vec<Frame>,
    path: Vec<usize>,
}

impl SimpleCycles<'_> {
    fn unblock(&mut self, u: usize) {
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if self.blocked[x] {
                self.blocked[x] = false;
                stack.append(&mut self.b_lists[x]);
            }
        }
    }

    fn push(&mut self, v: usize) {
        self.blocked[v] = true;
        self.path.push(v);
        self.frames.push(Frame {
            v,
            next: 0,
            found: false,
        });
    }

    fn emit(&self) -> GaitVector {
        let mut z = vec![false; self.graph.m()];
        let mut edges = Vec::with_capacity(self.path.len());
        for (i, &v) in self.path.iter().enumerate() {
            let w = self.path[(i + 1) % self.path.len()];
            let e = self.graph.edge_index(v, w).expect("complete digraph");
            z[e] = true;
            edges.push(e);
        }
        let mut vertices = self.path.clone();
        vertices.push(self.path[0]);
        GaitVector { z, edges, vertices }
    }
}

impl Iterator for SimpleCycles<'_> {
    type Item = GaitVector;

    fn next(&mut self) -> Option<GaitVector> {
        loop {
            if self.frames.is_empty() {
                if self.fresh {
                    self.fresh = false;
                } else {
                    self.start += 1;
                }
                if self.start + 1 >= self.adj.len() {
                    return None;
                }
                for v in self.start..self.adj.len() {
                    self.blocked[v] = false;
                    self.b_lists[v].clear();
                }
                self.push(self.start);
            }
            let s = self.start;
            let depth = self.path.len();
            let top = self.frames.last_mut().unwrap();
            let v = top.v;
            if top.next < self.adj[v].len() {
                let w = self.adj[v][top.next];
                top.next += 1;
                if w < s {
                    continue;
                }
                if w == s {
                    top.found = true;
                    return Some(self.emit());
                }
                if !self.blocked[w] {
                    if depth < self.max_len {
                        self.push(w);
                    } else {
                        // a length cut may hide cycles, so never block on it
                        top.found = true;
                    }
                }
                continue;
            }
            let found = top.found;
            self.frames.pop();
            self.path.pop();
            if found {
                self.unblock(v);
                if let Some(parent) = self.frames.last_mut() {
                    parent.found = true;
                }
            } else {
                for i in 0..self.adj[v].len() {
                    let w = self.adj[v][i];
                    if w >= s && !self.b_lists[w].contains(&v) {
                        self.b_lists[w].push(v);
                    }
                }
            }
        }
    }
}
