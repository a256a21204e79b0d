//! Finite graphs with quasi-cocycles: Gromov products, δ estimates, Busemann
//! estimates, directed-path quasi-geodesics, the convergence criterion and the
//! level graph.

mod criterion;
mod delta;
mod level;

pub use criterion::{
    convergence_criterion, directed_path_qg_constants, verify_directed_paths, CriterionReport, CriterionViolation,
    PathViolation,
};
pub use delta::{busemann_estimate, four_point_delta, gromov_product, thin_triangle_delta, ThinMode};
pub use level::{build_level_graph, check_level_graph, min_level_scale, LevelCheck, LevelGraph, LevelParams, MinLevel};

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const UNREACHED: u32 = u32::MAX;

/// Undirected simple graph with an optional orientation on some edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
    labels: Vec<String>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], out: vec![Vec::new(); n], labels: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        Graph { adj: vec![Vec::new(); n], out: vec![Vec::new(); n], labels }
    }

    pub fn add_vertex(&mut self, label: String) -> usize {
        self.adj.push(Vec::new());
        self.out.push(Vec::new());
        self.labels.push(label);
        self.adj.len() - 1
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Undirected edge; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        if !self.adj[u].contains(&v) {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    /// Directed edge `u → v`, also recorded as an undirected edge.
    pub fn add_arrow(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.add_edge(u, v);
        if !self.out[u].contains(&v) {
            self.out[u].push(v);
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn has_arrow(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(&v)
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (0..self.len()).flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect();
        e.sort_unstable();
        e
    }

    /// Directed edges, sorted.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = (0..self.len()).flat_map(|u| self.out[u].iter().map(move |&v| (u, v))).collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut d = vec![UNREACHED; self.len()];
        d[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &v in &self.adj[u] {
                if d[v] == UNREACHED {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
            }
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.bfs(0).iter().all(|&d| d != UNREACHED)
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.len().max(1)
    }

    /// Exact distance table; errors on a disconnected graph.
    pub fn all_pairs(&self) -> Result<DistTable> {
        use rayon::prelude::*;
        let n = self.len();
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| self.bfs(s)).collect();
        let mut d = Vec::with_capacity(n * n);
        for (s, row) in rows.into_iter().enumerate() {
            if let Some(t) = row.iter().position(|&x| x == UNREACHED) {
                return Err(Error::Disconnected(s, t));
            }
            d.extend(row);
        }
        Ok(DistTable { n, d })
    }

    /// Vertices within `radius` of `x0`, in BFS order.
    pub fn ball(&self, x0: usize, radius: u32) -> Vec<usize> {
        let d = self.bfs(x0);
        let mut vs: Vec<usize> = (0..self.len()).filter(|&v| d[v] <= radius).collect();
        vs.sort_by_key(|&v| (d[v], v));
        vs
    }

    pub fn diameter(&self) -> Result<u32> {
        Ok(self.all_pairs()?.d.iter().copied().max().unwrap_or(0))
    }

    pub fn to_dot(&self, name: &str, lambda: Option<&[i64]>) -> String {
        let mut s = String::new();
        let directed = self.out.iter().any(|o| !o.is_empty());
        let _ = writeln!(s, "{} \"{}\" {{", if directed { "digraph" } else { "graph" }, name);
        for v in 0..self.len() {
            match lambda {
                Some(l) => {
                    let _ = writeln!(s, "  {v} [label=\"{}\\nλ={}\"];", escape(&self.labels[v]), l[v]);
                }
                None => {
                    let _ = writeln!(s, "  {v} [label=\"{}\"];", escape(&self.labels[v]));
                }
            }
        }
        for (u, v) in self.edges() {
            let (a, b, arrow) = if self.has_arrow(u, v) {
                (u, v, true)
            } else if self.has_arrow(v, u) {
                (v, u, true)
            } else {
                (u, v, false)
            };
            let op = if directed { "->" } else { "--" };
            let extra = if directed && !arrow { " [dir=none]" } else { "" };
            let _ = writeln!(s, "  {a} {op} {b}{extra};");
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Dense table of BFS distances.
#[derive(Clone, Debug)]
pub struct DistTable {
    n: usize,
    d: Vec<u32>,
}

impl DistTable {
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Graph with an integer potential `λ`; `ν(u, v) = λ(u) − λ(v)`.
///
/// Directed edges point in the direction of decreasing `λ`. Undirected links
/// take part in distances only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleGraph {
    pub graph: Graph,
    pub lambda: Vec<i64>,
    /// Bound on `|ν|` over edges.
    pub delta: Rational64,
    /// Quasi-additivity defect.
    pub eta: Rational64,
    /// Vertices whose outgoing arrows were cut off by truncation.
    pub truncated: Vec<bool>,
}

impl CocycleGraph {
    pub fn new(graph: Graph, lambda: Vec<i64>, delta: Rational64, eta: Rational64) -> Result<Self> {
        if lambda.len() != graph.len() {
            return invalid("potential must have one value per vertex");
        }
        let n = graph.len();
        let cg = CocycleGraph { graph, lambda, delta, eta, truncated: vec![false; n] };
        cg.validate()?;
        Ok(cg)
    }

    pub fn nu(&self, u: usize, v: usize) -> i64 {
        self.lambda[u] - self.lambda[v]
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Checks `|ν| ≤ Δ` on edges and `ν > 2η` on directed edges.
    pub fn validate(&self) -> Result<()> {
        for (u, v) in self.graph.edges() {
            if Rational64::from_integer(self.nu(u, v).abs()) > self.delta {
                return invalid(format!("edge ({u}, {v}) has |ν| = {} above Δ = {}", self.nu(u, v).abs(), self.delta));
            }
        }
        for (u, v) in self.graph.arrows() {
            if Rational64::from_integer(self.nu(u, v)) <= self.eta * 2 {
                return invalid(format!("arrow ({u}, {v}) has ν = {} not above 2η = {}", self.nu(u, v), self.eta * 2));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.graph.to_dot(name, Some(&self.lambda))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.graph;
        let lambda: BTreeMap<String, i64> = (0..g.len()).map(|v| (v.to_string(), self.lambda[v])).collect();
        let links: Vec<(usize, usize)> =
            g.edges().into_iter().filter(|&(u, v)| !g.has_arrow(u, v) && !g.has_arrow(v, u)).collect();
        serde_json::to_value(GraphJson {
            vertices: g.labels.clone(),
            edges: g.arrows(),
            links,
            lambda,
            delta: Some(self.delta.to_string()),
            eta: Some(self.eta.to_string()),
        })
        .expect("serializable")
    }

    /// Parses the JSON graph format; `delta` defaults to the largest `|ν|`
    /// over edges and `eta` to `1/3`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let gj: GraphJson = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let n = gj.vertices.len();
        let mut g = Graph::with_labels(gj.vertices.clone());
        for &(u, w) in gj.edges.iter().chain(&gj.links) {
            if u >= n || w >= n {
                return invalid(format!("edge ({u}, {w}) out of range"));
            }
        }
        for &(u, w) in &gj.edges {
            g.add_arrow(u, w);
        }
        for &(u, w) in &gj.links {
            g.add_edge(u, w);
        }
        let mut lambda = vec![0; n];
        for (k, val) in gj.lambda {
            let i = match k.parse::<usize>() {
                Ok(i) if i < n => i,
                _ => gj.vertices.iter().position(|s| *s == k).ok_or_else(|| Error::Invalid(format!("unknown vertex {k}")))?,
            };
            lambda[i] = val;
        }
        let delta = match gj.delta {
            Some(s) => parse_ratio(&s)?,
            None => Rational64::from_integer(g.edges().iter().map(|&(u, w)| (lambda[u] - lambda[w]).abs()).max().unwrap_or(0)),
        };
        let eta = match gj.eta {
            Some(s) => parse_ratio(&s)?,
            None => Rational64::new(1, 3),
        };
        CocycleGraph::new(g, lambda, delta, eta)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    links: Vec<(usize, usize)>,
    #[serde(default)]
    lambda: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<String>,
}

pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let bad = || Error::Invalid(format!("not a rational: {s}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Small graph families used by tests, benches and the CLI.
pub mod families {
    use super::*;

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = path(n);
        if n > 2 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn grid(w: usize, h: usize) -> Graph {
        let mut g = Graph::with_labels((0..w * h).map(|i| format!("({},{})", i % w, i / w)).collect());
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w {
                    g.add_edge(v, v + 1);
                }
                if y + 1 < h {
                    g.add_edge(v, v + w);
                }
            }
        }
        g
    }

    /// Tree from a parent array (`parent[0]` ignored), arrows child → parent.
    pub fn tree_from_parents(parent: &[usize]) -> Graph {
        let mut g = Graph::new(parent.len());
        for (v, &p) in parent.iter().enumerate().skip(1) {
            g.add_arrow(v, p);
        }
        g
    }

    /// Rooted tree as a cocycle graph with `λ = depth`, arrows toward the root.
    pub fn rooted_tree(parent: &[usize]) -> CocycleGraph {
        let g = tree_from_parents(parent);
        let mut depth = vec![0i64; parent.len()];
        for v in 1..parent.len() {
            depth[v] = depth[parent[v]] + 1;
        }
        CocycleGraph::new(g, depth, Rational64::from_integer(1), Rational64::new(1, 3)).expect("tree potential is valid")
    }

    /// Complete binary tree of the given depth.
    pub fn binary_tree_parents(depth: u32) -> Vec<usize> {
        let n = (1usize << (depth + 1)) - 1;
        (0..n).map(|v| if v == 0 { 0 } else { (v - 1) / 2 }).collect()
    }

    /// Directed line `0 → 1 → …` as a cocycle graph with `λ(i) = n − 1 − i`.
    pub fn directed_line(n: usize) -> CocycleGraph {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_arrow(i - 1, i);
        }
        let lambda = (0..n as i64).map(|i| n as i64 - 1 - i).collect();
        CocycleGraph::new(g, lambda, Rational64::from_integer(1), Rational64::new(1, 3)).expect("line potential is valid")
    }
}
