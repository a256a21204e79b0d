use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use num_rational::Rational64;
use serde::Serialize;

use super::{GermGroupoid, StepKind};
use crate::error::{invalid, Error, Result};
use crate::hypgraph::{CocycleGraph, Graph};
use crate::quadratic::{Quad, QuadRing};
use crate::selfsim::Verdict;

/// Germ at `s` of `y ↦ c^k (y − s) + t`, with `c` the expansion factor of
/// the groupoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineGerm<T> {
    pub k: i64,
    pub t: T,
    pub s: T,
}

fn compose_affine<T: Clone + PartialEq>(g: &AffineGerm<T>, h: &AffineGerm<T>) -> Option<AffineGerm<T>> {
    (g.s == h.t).then(|| AffineGerm { k: g.k + h.k, t: g.t.clone(), s: h.s.clone() })
}

fn inverse_affine<T: Clone>(g: &AffineGerm<T>) -> AffineGerm<T> {
    AffineGerm { k: -g.k, t: g.s.clone(), s: g.t.clone() }
}

/// Germs of `a: x ↦ x + 1` and `s: x ↦ 2x` on the dyadic integers, at integer
/// points; the contracting generators are `s`, `as` and `a⁻¹s`.
#[derive(Clone, Debug)]
pub struct DyadicAffine {
    pub base: i64,
}

impl DyadicAffine {
    pub fn new(base: i64) -> Self {
        DyadicAffine { base }
    }
}

const DYADIC_GENS: [(i64, &str); 3] = [(0, "s"), (1, "as"), (-1, "a^-1s")];

impl GermGroupoid for DyadicAffine {
    type Germ = AffineGerm<i64>;

    fn name(&self) -> String {
        "dyadic-affine".into()
    }

    fn unit(&self) -> Self::Germ {
        AffineGerm { k: 0, t: self.base, s: self.base }
    }

    fn degree(&self, g: &Self::Germ) -> i64 {
        g.k
    }

    fn steps(&self, g: &Self::Germ) -> Result<Vec<(Self::Germ, StepKind, String)>> {
        let mut out = Vec::new();
        for (e, name) in DYADIC_GENS {
            let t = g.t.checked_mul(2).and_then(|x| x.checked_add(e)).ok_or_else(|| Error::Budget("dyadic coordinate overflow".into()))?;
            out.push((AffineGerm { k: g.k + 1, t, s: g.s }, StepKind::Up, name.to_string()));
        }
        for (e, name) in DYADIC_GENS {
            if (g.t - e).rem_euclid(2) == 0 {
                out.push((AffineGerm { k: g.k - 1, t: (g.t - e) / 2, s: g.s }, StepKind::Down, format!("({name})^-1")));
            }
        }
        Ok(out)
    }

    fn compose(&self, g: &Self::Germ, h: &Self::Germ) -> Result<Option<Self::Germ>> {
        Ok(compose_affine(g, h))
    }

    fn inverse(&self, g: &Self::Germ) -> Result<Self::Germ> {
        Ok(inverse_affine(g))
    }

    fn label(&self, g: &Self::Germ) -> String {
        format!("2^{}(x-{})+{}", g.k, g.s, g.t)
    }

    fn key(&self, g: &Self::Germ) -> Result<String> {
        Ok(format!("{},{},{}", g.k, g.t, g.s))
    }

    fn germ_equal(&self, g: &Self::Germ, h: &Self::Germ, _budget: usize) -> Result<Verdict> {
        Ok(if g == h { Verdict::Yes } else { Verdict::No(Vec::new()) })
    }
}

/// Germs of translations by a finite set `R` and of `x ↦ u·x` on the real
/// line, with points in `ℤ[ω]`.
#[derive(Clone, Debug)]
pub struct QuadraticAffine {
    pub ring: QuadRing,
    pub unit_elem: Quad,
    pub unit_inv: Quad,
    pub translations: Vec<Quad>,
    pub scaling: bool,
    pub base: Quad,
    pub symbol: String,
}

impl QuadraticAffine {
    /// `x ↦ x + 1`, `x ↦ x + φ`, `x ↦ φ²x` at `0`.
    pub fn golden() -> Self {
        let ring = QuadRing::golden();
        let phi = ring.omega();
        let phi_inv = ring.omega_inverse().expect("unit");
        QuadraticAffine {
            ring,
            unit_elem: ring.mul(phi, phi),
            unit_inv: ring.mul(phi_inv, phi_inv),
            translations: vec![Quad::ONE, phi],
            scaling: true,
            base: Quad::ZERO,
            symbol: "phi".into(),
        }
    }

    /// `θ² + bθ + 1 = 0`: translations by `1` and `θ`, scaling by `θ²`.
    pub fn from_trace(b: i128) -> Result<Self> {
        let ring = QuadRing::from_trace(b)?;
        let th = ring.omega();
        let th_inv = ring.omega_inverse().expect("unit");
        Ok(QuadraticAffine {
            ring,
            unit_elem: ring.mul(th, th),
            unit_inv: ring.mul(th_inv, th_inv),
            translations: vec![Quad::ONE, th],
            scaling: true,
            base: Quad::ZERO,
            symbol: "theta".into(),
        })
    }

    pub fn with_translations(mut self, r: Vec<Quad>, scaling: bool) -> Self {
        self.translations = r;
        self.scaling = scaling;
        self
    }

    pub fn format(&self, x: Quad) -> String {
        self.ring.format(x, &self.symbol)
    }

    /// Parses `a+b<symbol>`, `a`, `b<symbol>` or `-<symbol>`.
    pub fn parse(&self, s: &str) -> Result<Quad> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("cannot parse ring element {s}"));
        let mut total = Quad::ZERO;
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let sign_len = usize::from(rest.starts_with('+') || rest.starts_with('-'));
            let end = rest[sign_len..].find(['+', '-']).map(|i| i + sign_len).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            let q = match body.strip_suffix(self.symbol.as_str()) {
                Some(c) => {
                    let c = c.trim_end_matches('*');
                    Quad { a: 0, b: if c.is_empty() { 1 } else { c.parse().map_err(|_| bad())? } }
                }
                None => Quad::int(body.parse().map_err(|_| bad())?),
            };
            total = self.ring.add(total, if neg { self.ring.neg(q) } else { q });
        }
        Ok(total)
    }

    fn steps_within(&self, g: &AffineGerm<Quad>, keep: &dyn Fn(Quad) -> bool) -> Vec<(AffineGerm<Quad>, StepKind, String)> {
        let mut out = Vec::new();
        for &r in &self.translations {
            for (sign, x) in [("+", r), ("-", self.ring.neg(r))] {
                let t = self.ring.add(g.t, x);
                if keep(t) {
                    out.push((AffineGerm { k: g.k, t, s: g.s }, StepKind::Level, format!("{sign}{}", self.format(r))));
                }
            }
        }
        if self.scaling {
            let up = self.ring.mul(g.t, self.unit_elem);
            if keep(up) {
                out.push((AffineGerm { k: g.k + 1, t: up, s: g.s }, StepKind::Up, "scale".into()));
            }
            let down = self.ring.mul(g.t, self.unit_inv);
            if keep(down) {
                out.push((AffineGerm { k: g.k - 1, t: down, s: g.s }, StepKind::Down, "scale^-1".into()));
            }
        }
        out
    }
}

impl GermGroupoid for QuadraticAffine {
    type Germ = AffineGerm<Quad>;

    fn name(&self) -> String {
        "quadratic-affine".into()
    }

    fn unit(&self) -> Self::Germ {
        AffineGerm { k: 0, t: self.base, s: self.base }
    }

    fn degree(&self, g: &Self::Germ) -> i64 {
        g.k
    }

    fn steps(&self, g: &Self::Germ) -> Result<Vec<(Self::Germ, StepKind, String)>> {
        Ok(self.steps_within(g, &|_| true))
    }

    fn compose(&self, g: &Self::Germ, h: &Self::Germ) -> Result<Option<Self::Germ>> {
        Ok(compose_affine(g, h))
    }

    fn inverse(&self, g: &Self::Germ) -> Result<Self::Germ> {
        Ok(inverse_affine(g))
    }

    fn label(&self, g: &Self::Germ) -> String {
        format!("u^{}(x-({}))+({})", g.k, self.format(g.s), self.format(g.t))
    }

    fn key(&self, g: &Self::Germ) -> Result<String> {
        Ok(format!("{},{},{},{},{}", g.k, g.t.a, g.t.b, g.s.a, g.s.b))
    }

    fn germ_equal(&self, g: &Self::Germ, h: &Self::Germ, _budget: usize) -> Result<Verdict> {
        Ok(if g == h { Verdict::Yes } else { Verdict::No(Vec::new()) })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationGraph {
    pub points: Vec<String>,
    pub degrees: Vec<i64>,
    pub approx: Vec<f64>,
    pub diameter: u32,
    pub word_bound: u32,
    pub interval: (String, String),
    /// Vertices whose neighbours beyond the word bound were not explored.
    pub truncated: usize,
    #[serde(skip)]
    pub cocycle: CocycleGraph,
}

/// Orbital graph of the translation (and optional scaling) action on the
/// points of `[lo, hi]` reachable from the base point by at most `word_bound`
/// generators, never leaving the interval. With scaling the vertices are
/// germs `(k, point)`.
pub fn rotation_orbital_graph(spec: &QuadraticAffine, lo: Rational64, hi: Rational64, word_bound: u32) -> Result<RotationGraph> {
    if lo > hi {
        return invalid("empty interval");
    }
    let ring = spec.ring;
    let inside = |x: Quad| {
        ring.cmp_rational(x, *lo.numer() as i128, *lo.denom() as i128) != Ordering::Less && ring.cmp_rational(x, *hi.numer() as i128, *hi.denom() as i128) != Ordering::Greater
    };
    if !inside(spec.base) {
        return invalid("base point outside the interval");
    }
    let start = spec.unit();
    let label = |g: &AffineGerm<Quad>| if spec.scaling { format!("{}:{}", g.k, spec.format(g.t)) } else { spec.format(g.t) };
    let mut graph = Graph::with_labels(vec![label(&start)]);
    let mut germs = vec![start.clone()];
    let mut index: HashMap<AffineGerm<Quad>, usize> = HashMap::from([(start, 0)]);
    let mut depth = vec![0u32];
    let mut truncated = vec![false];
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        let g = germs[i].clone();
        for (h, kind, _) in spec.steps_within(&g, &inside) {
            let j = match index.get(&h) {
                Some(&j) => j,
                None if depth[i] < word_bound => {
                    let j = graph.add_vertex(label(&h));
                    index.insert(h.clone(), j);
                    germs.push(h);
                    depth.push(depth[i] + 1);
                    truncated.push(false);
                    q.push_back(j);
                    j
                }
                None => {
                    truncated[i] = true;
                    continue;
                }
            };
            match kind {
                StepKind::Up => graph.add_arrow(j, i),
                StepKind::Down => graph.add_arrow(i, j),
                StepKind::Level => graph.add_edge(i, j),
            }
        }
    }
    let labels = graph.labels().to_vec();
    let diameter = graph.diameter()?;
    let degrees: Vec<i64> = germs.iter().map(|g| g.k).collect();
    let mut cocycle = CocycleGraph::new(graph, degrees.clone(), Rational64::from_integer(1), Rational64::new(1, 3))?;
    cocycle.truncated = truncated.clone();
    Ok(RotationGraph {
        points: labels,
        approx: germs.iter().map(|g| ring.approx(g.t)).collect(),
        degrees,
        diameter,
        word_bound,
        interval: (lo.to_string(), hi.to_string()),
        truncated: truncated.iter().filter(|&&t| t).count(),
        cocycle,
    })
}
