use std::collections::VecDeque;

use serde::Serialize;

use super::{GermGroupoid, StepKind};
use crate::error::{invalid, Result};
use crate::hypgraph::Graph;
use crate::selfsim::Verdict;
use crate::smale::SftSystem;
use crate::words::{EvPeriodicWord, Letter};

/// Groupoid generated by the one-sided shift `σ` of an SFT; the contracting
/// generators are the germs of the inverse branches `y ↦ a·y`.
#[derive(Clone, Debug)]
pub struct ExpandingShift {
    pub sft: SftSystem,
    pub base: EvPeriodicWord,
}

/// `(y, n, x)`: the germ at `x` of `σ^{−n₁}∘σ^{n₂}` with `n = n₂ − n₁`,
/// mapping `x` to `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExpGerm {
    pub y: EvPeriodicWord,
    pub n: i64,
    pub x: EvPeriodicWord,
}

impl ExpandingShift {
    pub fn new(sft: SftSystem, base: EvPeriodicWord) -> Result<Self> {
        if base.is_finite() || !sft.admissible_ev(&base) {
            return invalid("base point must be an admissible infinite sequence");
        }
        Ok(ExpandingShift { sft, base })
    }

    /// Full 2-shift at `0^∞`.
    pub fn doubling() -> Self {
        ExpandingShift::new(SftSystem::full_shift(2), EvPeriodicWord::periodic(vec![0])).expect("valid preset")
    }

    /// Germ from the pair `(n₁, n₂)` with `σ^{n₂}(x) = σ^{n₁}(y)`.
    pub fn germ_from_pair(&self, y: &EvPeriodicWord, n1: usize, n2: usize, x: &EvPeriodicWord) -> Option<ExpGerm> {
        (x.tail(n2) == y.tail(n1)).then(|| ExpGerm { y: y.clone(), n: n2 as i64 - n1 as i64, x: x.clone() })
    }
}

impl GermGroupoid for ExpandingShift {
    type Germ = ExpGerm;

    fn name(&self) -> String {
        "expanding-shift".into()
    }

    fn unit(&self) -> ExpGerm {
        ExpGerm { y: self.base.clone(), n: 0, x: self.base.clone() }
    }

    fn degree(&self, g: &ExpGerm) -> i64 {
        -g.n
    }

    fn steps(&self, g: &ExpGerm) -> Result<Vec<(ExpGerm, StepKind, String)>> {
        let mut out = Vec::new();
        for a in 0..self.sft.alphabet().len() as Letter {
            if self.sft.can_prepend(a, &g.y) {
                let y = g.y.prepend(&[a]);
                out.push((ExpGerm { y, n: g.n - 1, x: g.x.clone() }, StepKind::Up, format!("pre_{}", self.sft.alphabet()[a as usize])));
            }
        }
        out.push((ExpGerm { y: g.y.tail(1), n: g.n + 1, x: g.x.clone() }, StepKind::Down, "shift".into()));
        Ok(out)
    }

    fn compose(&self, g: &ExpGerm, h: &ExpGerm) -> Result<Option<ExpGerm>> {
        Ok((g.x == h.y).then(|| ExpGerm { y: g.y.clone(), n: g.n + h.n, x: h.x.clone() }))
    }

    fn inverse(&self, g: &ExpGerm) -> Result<ExpGerm> {
        Ok(ExpGerm { y: g.x.clone(), n: -g.n, x: g.y.clone() })
    }

    fn label(&self, g: &ExpGerm) -> String {
        let a = self.sft.alphabet();
        format!("({}, {}, {})", g.y.format(a), g.n, g.x.format(a))
    }

    fn key(&self, g: &ExpGerm) -> Result<String> {
        Ok(self.label(g))
    }

    fn germ_equal(&self, g: &ExpGerm, h: &ExpGerm, _budget: usize) -> Result<Verdict> {
        if g == h {
            return Ok(Verdict::Yes);
        }
        // a point where the two germs' targets or degrees differ
        let w = if g.y != h.y { g.y.prefix(g.y.pre().len() + g.y.period().len() + h.y.pre().len() + h.y.period().len()) } else { Vec::new() };
        Ok(Verdict::No(w))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PreimageTree {
    #[serde(skip)]
    pub graph: Graph,
    pub words: Vec<String>,
    pub depth: Vec<usize>,
    /// Vertices at each depth.
    pub level_sizes: Vec<usize>,
}

/// `⊔_{n ≤ depth} σ^{−n}(t)`: each `a·v` is joined to `v`.
pub fn tree_of_preimages(sft: &SftSystem, t: &EvPeriodicWord, depth: usize) -> Result<PreimageTree> {
    if !sft.admissible_ev(t) {
        return invalid("root is not admissible");
    }
    let mut graph = Graph::new(0);
    let mut words = Vec::new();
    let mut depths = Vec::new();
    let mut pts: Vec<EvPeriodicWord> = Vec::new();
    let root = graph.add_vertex(t.format(sft.alphabet()));
    words.push(t.format(sft.alphabet()));
    depths.push(0);
    pts.push(t.clone());
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        if depths[v] == depth {
            continue;
        }
        for a in 0..sft.alphabet().len() as Letter {
            if sft.can_prepend(a, &pts[v]) {
                let p = pts[v].prepend(&[a]);
                // label by the prefix added so far
                let pre = format!("{}{}", sft.alphabet()[a as usize], if depths[v] == 0 { String::new() } else { words[v].clone() });
                let u = graph.add_vertex(pre.clone());
                graph.add_edge(u, v);
                words.push(pre);
                depths.push(depths[v] + 1);
                pts.push(p);
                q.push_back(u);
            }
        }
    }
    let mut level_sizes = vec![0; depth + 1];
    for &d in &depths {
        level_sizes[d] += 1;
    }
    // root keeps the point itself as its label
    words[0] = t.format(sft.alphabet());
    Ok(PreimageTree { graph, words, depth: depths, level_sizes })
}
