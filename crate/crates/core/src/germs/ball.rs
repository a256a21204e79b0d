use std::collections::{BTreeSet, HashMap, VecDeque};

use num_rational::Rational64;
use serde::Serialize;

use super::{GermGroupoid, StepKind};
use crate::error::{invalid, Error, Result};
use crate::hypgraph::{CocycleGraph, Graph};
use crate::selfsim::Verdict;

/// Ball of radius `r` around the unit in the Cayley graph of germs at the base
/// point, with `λ = ν` the degree.
#[derive(Clone, Debug)]
pub struct CayleyBall<T> {
    pub germs: Vec<T>,
    pub dist: Vec<u32>,
    pub radius: u32,
    pub cocycle: CocycleGraph,
    /// Generator steps `(from, to, label)` between vertices of the ball.
    pub steps: Vec<(usize, usize, String)>,
    /// Some generator step leaves the ball.
    pub truncated: bool,
}

impl<T> CayleyBall<T> {
    pub fn len(&self) -> usize {
        self.germs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.germs.is_empty()
    }

    /// Follows a sequence of step labels from `start`; `None` if a step is
    /// missing from the ball.
    pub fn follow(&self, start: usize, labels: &[String]) -> Option<Vec<usize>> {
        let mut path = vec![start];
        let mut cur = start;
        for l in labels {
            cur = self.steps.iter().find(|(u, _, s)| *u == cur && s == l).map(|&(_, v, _)| v)?;
            path.push(cur);
        }
        Some(path)
    }
}

struct Index<'a, G: GermGroupoid> {
    g: &'a G,
    buckets: HashMap<String, Vec<usize>>,
    budget: usize,
}

impl<G: GermGroupoid> Index<'_, G> {
    fn find(&self, germs: &[G::Germ], h: &G::Germ, key: &str) -> Result<Option<usize>> {
        let Some(cands) = self.buckets.get(key) else { return Ok(None) };
        for &c in cands {
            if germs[c] == *h || self.g.keys_canonical() {
                return Ok(Some(c));
            }
            match self.g.germ_equal(&germs[c], h, self.budget)? {
                Verdict::Yes => return Ok(Some(c)),
                Verdict::No(_) => {}
                Verdict::Unknown => return Err(Error::Budget(format!("cannot decide equality of {} and {}", self.g.label(&germs[c]), self.g.label(h)))),
            }
        }
        Ok(None)
    }
}

/// Breadth-first ball; `budget` bounds each germ equality test.
pub fn cayley_ball<G: GermGroupoid>(g: &G, radius: u32, budget: usize) -> Result<CayleyBall<G::Germ>> {
    let unit = g.unit();
    let mut idx = Index { g, buckets: HashMap::new(), budget };
    idx.buckets.insert(g.key(&unit)?, vec![0]);
    let mut graph = Graph::with_labels(vec![g.label(&unit)]);
    let mut germs = vec![unit];
    let mut dist = vec![0u32];
    let mut steps = Vec::new();
    let mut cut = vec![false];
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        let gi = germs[i].clone();
        for (h, kind, label) in g.steps(&gi)? {
            let key = g.key(&h)?;
            let j = match idx.find(&germs, &h, &key)? {
                Some(j) => j,
                None if dist[i] < radius => {
                    let j = graph.add_vertex(g.label(&h));
                    idx.buckets.entry(key).or_default().push(j);
                    germs.push(h);
                    dist.push(dist[i] + 1);
                    cut.push(false);
                    q.push_back(j);
                    j
                }
                None => {
                    cut[i] = true;
                    continue;
                }
            };
            match kind {
                StepKind::Up => graph.add_arrow(j, i),
                StepKind::Down => graph.add_arrow(i, j),
                StepKind::Level => graph.add_edge(i, j),
            }
            steps.push((i, j, label));
        }
    }
    let lambda = germs.iter().map(|h| g.degree(h)).collect();
    let mut cocycle = CocycleGraph::new(graph, lambda, Rational64::from_integer(1), Rational64::new(1, 3))?;
    let truncated = cut.iter().any(|&c| c);
    cocycle.truncated = cut;
    Ok(CayleyBall { germs, dist, radius, cocycle, steps, truncated })
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleCheck {
    pub vertices: usize,
    /// Composable pairs checked for `ν(gh) = ν(g) + ν(h)`.
    pub products: usize,
    /// Pairs checked for `ν(gh⁻¹) = ν(g) − ν(h)`.
    pub quotients: usize,
    /// First failures as `(g, h, expected, found)`.
    pub violations: Vec<(String, String, i64, i64)>,
}

impl CocycleCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact additivity of the degree on all pairs of germs of the ball.
pub fn degree_cocycle_check<G: GermGroupoid>(g: &G, ball: &CayleyBall<G::Germ>) -> Result<CocycleCheck> {
    use rayon::prelude::*;
    let n = ball.germs.len();
    let inv: Vec<G::Germ> = ball.germs.iter().map(|x| g.inverse(x)).collect::<Result<_>>()?;
    let rows: Vec<Result<(usize, usize, Vec<(String, String, i64, i64)>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut prods, mut quots, mut bad) = (0, 0, Vec::new());
            let gi = &ball.germs[i];
            let di = g.degree(gi);
            for j in 0..n {
                let gj = &ball.germs[j];
                let dj = g.degree(gj);
                if let Some(p) = g.compose(gi, gj)? {
                    prods += 1;
                    if g.degree(&p) != di + dj {
                        bad.push((g.label(gi), g.label(gj), di + dj, g.degree(&p)));
                    }
                }
                if let Some(p) = g.compose(gi, &inv[j])? {
                    quots += 1;
                    if g.degree(&p) != di - dj {
                        bad.push((g.label(gi), format!("inv {}", g.label(gj)), di - dj, g.degree(&p)));
                    }
                }
            }
            Ok((prods, quots, bad))
        })
        .collect();
    let mut out = CocycleCheck { vertices: n, products: 0, quotients: 0, violations: Vec::new() };
    for r in rows {
        let (p, q, b) = r?;
        out.products += p;
        out.quotients += q;
        out.violations.extend(b);
    }
    out.violations.truncate(20);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryScale {
    /// `n = max λ(g) − λ(start)` over common descendants `g` of the ray ends.
    pub n: Option<i64>,
    pub witness: Option<usize>,
    pub ends: (usize, usize),
    /// A ray end had steps leaving the ball, so the common part may be larger.
    pub truncated: bool,
}

fn descendants(cg: &CocycleGraph, v: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([v]);
    let mut q = VecDeque::from([v]);
    while let Some(u) = q.pop_front() {
        for &w in cg.graph.out_neighbors(u) {
            if seen.insert(w) {
                q.push_back(w);
            }
        }
    }
    seen
}

/// Boundary scale of two rays with a common start. Each ray must ascend;
/// the scale is the highest level at which the two rays still share a point
/// below both ends.
pub fn boundary_scale(cg: &CocycleGraph, ray1: &[usize], ray2: &[usize]) -> Result<BoundaryScale> {
    let (Some(&s1), Some(&s2)) = (ray1.first(), ray2.first()) else { return invalid("rays must be nonempty") };
    if s1 != s2 {
        return invalid("rays must start at the same vertex");
    }
    for ray in [ray1, ray2] {
        for w in ray.windows(2) {
            if w[1] >= cg.len() || !cg.graph.has_arrow(w[1], w[0]) {
                return invalid(format!("ray step {} -> {} is not ascending", w[0], w[1]));
            }
        }
    }
    let (e1, e2) = (*ray1.last().unwrap(), *ray2.last().unwrap());
    let d1 = descendants(cg, e1);
    let d2 = descendants(cg, e2);
    let best = d1.intersection(&d2).max_by_key(|&&v| (cg.lambda[v], std::cmp::Reverse(v))).copied();
    let truncated = ray1.iter().chain(ray2).any(|&v| cg.truncated.get(v).copied().unwrap_or(false));
    Ok(BoundaryScale { n: best.map(|v| cg.lambda[v] - cg.lambda[s1]), witness: best, ends: (e1, e2), truncated })
}
