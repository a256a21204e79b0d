use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypgraph::{CocycleGraph, Graph};
use crate::selfsim::{all_words, GroupElement, WreathRecursion};
use crate::words::Letter;

/// Level-`n` approximation of the limit space: `v ~ w` when a nucleus element
/// maps `v` to `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingGraph {
    pub level: usize,
    pub words: Vec<String>,
    /// `(i, j)`, `i < j`, with the nucleus elements realizing the identification.
    pub edges: BTreeMap<(usize, usize), Vec<String>>,
    pub nucleus_size: usize,
}

impl GluingGraph {
    pub fn graph(&self) -> Graph {
        let mut g = Graph::with_labels(self.words.clone());
        for &(u, v) in self.edges.keys() {
            g.add_edge(u, v);
        }
        g
    }

    pub fn identifications(&self) -> usize {
        self.edges.len()
    }

    /// Pairs as words, for comparison across levels.
    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        self.edges.keys().map(|&(u, v)| (self.words[u].clone(), self.words[v].clone())).collect()
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for (i, w) in self.words.iter().enumerate() {
            s.push_str(&format!("  {i} [label=\"{w}\"];\n"));
        }
        for ((u, v), labels) in &self.edges {
            s.push_str(&format!("  {u} -- {v} [label=\"{}\"];\n", labels.join(",")));
        }
        s.push_str("}\n");
        s
    }
}

/// Pairs `v ≠ w` in `X^n` with `g(v) = w` for some `g` in the nucleus. The
/// nucleus is section-closed and every element has nucleus predecessors, so
/// each identification extends to an asymptotic pair of left-infinite words.
pub fn limit_space_gluing(rec: &WreathRecursion, nucleus: &[GroupElement], n: usize) -> GluingGraph {
    let words = all_words(rec.degree(), n);
    let index: HashMap<&Vec<Letter>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for g in nucleus {
        let name = rec.display(g);
        for (i, w) in words.iter().enumerate() {
            let j = index[&rec.act(g, w)];
            if i != j {
                let key = (i.min(j), i.max(j));
                let e = edges.entry(key).or_default();
                if !e.contains(&name) {
                    e.push(name.clone());
                }
            }
        }
    }
    GluingGraph { level: n, words: words.iter().map(|w| rec.format_word(w)).collect(), edges, nucleus_size: nucleus.len() }
}

/// Canonical description of a graph that is a single cycle: `Some(k)` for a
/// connected 2-regular graph on `k ≥ 3` vertices, or for two vertices joined
/// by an edge (the 2-cycle of a multigraph).
pub fn cycle_length(g: &Graph) -> Option<usize> {
    let n = g.len();
    if n == 2 {
        return (g.has_edge(0, 1)).then_some(2);
    }
    (n >= 3 && g.is_connected() && (0..n).all(|v| g.neighbors(v).len() == 2)).then_some(n)
}

/// `Γ(G)` on `X^{≤ max_len}`: arrows `xv → v` and links between `v` and `s(v)`; `λ` is
/// the word length.
pub fn gamma_graph(rec: &WreathRecursion, max_len: usize) -> Result<CocycleGraph> {
    let mut words: Vec<Vec<Letter>> = Vec::new();
    for n in 0..=max_len {
        words.extend(all_words(rec.degree(), n));
    }
    let index: HashMap<Vec<Letter>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut g = Graph::with_labels(words.iter().map(|w| if w.is_empty() { "ε".to_string() } else { rec.format_word(w) }).collect());
    for (i, w) in words.iter().enumerate() {
        if w.len() < max_len {
            for x in 0..rec.degree() as Letter {
                let mut xv = vec![x];
                xv.extend(w);
                g.add_arrow(index[&xv], i);
            }
        }
        for s in rec.generators() {
            let j = index[&rec.act(&s, w)];
            if j != i {
                g.add_edge(i, j);
            }
        }
    }
    let lambda = words.iter().map(|w| w.len() as i64).collect();
    CocycleGraph::new(g, lambda, Rational64::from_integer(1), Rational64::new(1, 3)).map_err(|e| Error::Invalid(e.to_string()))
}
