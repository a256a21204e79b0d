//! Integer log-scales on finite sets.
//!
//! A log-scale is a symmetric table `ℓ(x, y)` of integers with `+∞` exactly on
//! the diagonal, satisfying `ℓ(x, z) ≥ min(ℓ(x, y), ℓ(y, z)) − δ`. Everything
//! here is exact: metrics are dyadic rationals and logarithms are decided with
//! rational enclosures of `e^k`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogScale {
    points: Vec<String>,
    vals: Vec<Option<i64>>,
}

#[derive(Serialize, Deserialize)]
struct TableJson<V> {
    points: Vec<String>,
    values: Vec<(usize, usize, Option<V>)>,
}

impl LogScale {
    /// Builds a scale from a function on ordered pairs `i < j`.
    pub fn from_fn(points: Vec<String>, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let n = points.len();
        let mut vals = vec![None; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                vals[i * n + j] = Some(v);
                vals[j * n + i] = Some(v);
            }
        }
        LogScale { points, vals }
    }

    /// Points labelled `0..n`.
    pub fn indexed(n: usize, f: impl FnMut(usize, usize) -> i64) -> Self {
        Self::from_fn((0..n).map(|i| i.to_string()).collect(), f)
    }

    pub fn from_entries(points: Vec<String>, entries: &[(usize, usize, Option<i64>)]) -> Result<Self> {
        let n = points.len();
        let mut vals: Vec<Option<Option<i64>>> = vec![None; n * n];
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return invalid(format!("entry ({i}, {j}) out of range"));
            }
            if (i == j) != v.is_none() {
                return invalid(format!("entry ({i}, {j}): infinity must occur exactly on the diagonal"));
            }
            for (a, b) in [(i, j), (j, i)] {
                match vals[a * n + b] {
                    Some(old) if old != v => return invalid(format!("entry ({i}, {j}) is not symmetric")),
                    _ => vals[a * n + b] = Some(v),
                }
            }
        }
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                match vals[i * n + j] {
                    Some(v) => out.push(v),
                    None if i == j => out.push(None),
                    None => return invalid(format!("missing entry ({i}, {j})")),
                }
            }
        }
        Ok(LogScale { points, vals: out })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    /// `None` encodes `+∞`.
    pub fn get(&self, i: usize, j: usize) -> Option<i64> {
        self.vals[i * self.len() + j]
    }

    /// Off-diagonal value; panics on the diagonal.
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.get(i, j).expect("diagonal entry is infinite")
    }

    pub fn min_value(&self) -> Option<i64> {
        self.vals.iter().flatten().copied().min()
    }

    pub fn max_value(&self) -> Option<i64> {
        self.vals.iter().flatten().copied().max()
    }

    /// Restriction to a subset of points, in the given order.
    pub fn restrict(&self, idx: &[usize]) -> LogScale {
        let pts = idx.iter().map(|&i| self.points[i].clone()).collect();
        LogScale::from_fn(pts, |a, b| self.at(idx[a], idx[b]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let mut values = Vec::new();
        for i in 0..n {
            for j in i..n {
                values.push((i, j, self.get(i, j)));
            }
        }
        serde_json::to_value(TableJson { points: self.points.clone(), values }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let t: TableJson<i64> =
            serde_json::from_value(v.clone()).map_err(|e| crate::Error::Invalid(e.to_string()))?;
        LogScale::from_entries(t.points, &t.values)
    }
}

/// Minimal `δ ≥ 0` with `ℓ(x, z) ≥ min(ℓ(x, y), ℓ(y, z)) − δ` on all triples.
pub fn delta_of(ls: &LogScale) -> i64 {
    let n = ls.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = 0;
            for y in 0..n {
                if y == x {
                    continue;
                }
                let xy = ls.at(x, y);
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    let d = xy.min(ls.at(y, z)) - ls.at(x, z);
                    best = best.max(d);
                }
            }
            best
        })
        .max()
        .unwrap_or(0)
}

/// Symmetric table of non-negative rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTable {
    points: Vec<String>,
    dist: Vec<BigRational>,
}

impl MetricTable {
    pub fn from_fn(points: Vec<String>, mut f: impl FnMut(usize, usize) -> BigRational) -> Result<Self> {
        let n = points.len();
        let mut dist = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                if !d.is_positive() {
                    return invalid(format!("distance ({i}, {j}) must be positive"));
                }
                dist[i * n + j] = d.clone();
                dist[j * n + i] = d;
            }
        }
        Ok(MetricTable { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i * self.len() + j]
    }

    /// First triple `(x, y, z)` with `d(x, z) > d(x, y) + d(y, z)`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.get(x, z) > &(self.get(x, y) + self.get(y, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let mut values = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                values.push((i, j, Some(self.get(i, j).to_string())));
            }
        }
        serde_json::to_value(TableJson { points: self.points.clone(), values }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let t: TableJson<String> =
            serde_json::from_value(v.clone()).map_err(|e| crate::Error::Invalid(e.to_string()))?;
        let n = t.points.len();
        let mut tab = vec![None; n * n];
        for (i, j, d) in t.values {
            if i >= n || j >= n || i == j {
                return invalid(format!("bad metric entry ({i}, {j})"));
            }
            let d = d.ok_or_else(|| crate::Error::Invalid("null distance".into()))?;
            let q = parse_rational(&d)?;
            tab[i * n + j] = Some(q.clone());
            tab[j * n + i] = Some(q);
        }
        let missing = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && tab[i * n + j].is_none());
        if let Some((i, j)) = missing {
            return invalid(format!("missing distance ({i}, {j})"));
        }
        MetricTable::from_fn(t.points, |i, j| tab[i * n + j].clone().expect("checked"))
    }
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || crate::Error::Invalid(format!("not a rational: {s}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn pow2(k: i64) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    if k >= 0 {
        num_traits::pow(two, k as usize)
    } else {
        num_traits::pow(two, k.unsigned_abs() as usize).recip()
    }
}

/// Metric associated with `ls` via the chain (Frink) construction on the
/// neighbourhoods `E_{2δn}`. Requires `delta ≥ max(1, delta_of(ls))`.
pub fn metric_from_logscale(ls: &LogScale, delta: i64) -> Result<MetricTable> {
    if delta < 1 {
        return precondition("delta must be at least 1");
    }
    let actual = delta_of(ls);
    if delta < actual {
        return precondition(format!("delta {delta} is below delta_of = {actual}"));
    }
    let n = ls.len();
    let step = 2 * delta;
    let mut d: Vec<BigRational> = (0..n * n)
        .map(|ix| {
            let (i, j) = (ix / n, ix % n);
            match ls.get(i, j) {
                None => BigRational::zero(),
                Some(l) => pow2(-l.div_euclid(step)),
            }
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i * n + k] + &d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    MetricTable::from_fn(ls.points.clone(), |i, j| d[i * n + j].clone())
}

/// Checks `¼·α^ℓ ≤ d ≤ 2·α^ℓ` with `α = 2^{−1/(2δ)}` exactly, by raising both
/// sides to the power `2δ`.
pub fn frink_bounds_hold(ls: &LogScale, m: &MetricTable, delta: i64) -> bool {
    let e = (2 * delta) as usize;
    let n = ls.len();
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            let target = pow2(-ls.at(i, j));
            let d = m.get(i, j);
            num_traits::pow(d / &two, e) <= target && num_traits::pow(d * &four, e) >= target
        })
    })
}

/// Enclosure `[lo, hi]` of `e^m` for `m ≥ 1` from the Taylor series with
/// `terms` terms (`terms ≥ 2m + 2` so the tail is at most twice the next term).
fn exp_enclosure(m: u64, terms: usize) -> (BigRational, BigRational) {
    let terms = terms.max(2 * m as usize + 2);
    let mq = BigRational::from_integer(BigInt::from(m));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for j in 1..=terms {
        term = term * &mq / BigRational::from_integer(BigInt::from(j));
        sum += &term;
    }
    let next = term * &mq / BigRational::from_integer(BigInt::from(terms + 1));
    let hi = &sum + next * BigRational::from_integer(BigInt::from(2));
    (sum, hi)
}

/// Compares `d` with `e^k`.
fn cmp_exp(d: &BigRational, k: i64) -> Ordering {
    if k == 0 {
        return d.cmp(&BigRational::one());
    }
    // d vs e^k  <=>  x vs e^m with x = d (k > 0) or x = 1/d, reversed (k < 0)
    let (x, m, flip) = if k > 0 { (d.clone(), k as u64, false) } else { (d.recip(), k.unsigned_abs(), true) };
    let mut terms = 16usize;
    loop {
        let (lo, hi) = exp_enclosure(m, terms);
        let ord = if x < lo {
            Some(Ordering::Less)
        } else if x > hi {
            Some(Ordering::Greater)
        } else {
            None
        };
        if let Some(o) = ord {
            return if flip { o.reverse() } else { o };
        }
        terms *= 2;
    }
}

/// `⌊ln d⌋` for a positive rational, decided exactly.
pub fn floor_ln(d: &BigRational) -> i64 {
    assert!(d.is_positive(), "floor_ln needs a positive argument");
    let bits = |b: &BigInt| b.bits() as i64;
    let guess = match (d.numer().to_f64(), d.denom().to_f64()) {
        (Some(p), Some(q)) if p.is_finite() && q.is_finite() && q > 0.0 && p / q > 0.0 => (p / q).ln().floor() as i64,
        _ => ((bits(d.numer()) - bits(d.denom())) as f64 * std::f64::consts::LN_2).floor() as i64,
    };
    let mut k = guess;
    while cmp_exp(d, k) == Ordering::Less {
        k -= 1;
    }
    while cmp_exp(d, k + 1) != Ordering::Less {
        k += 1;
    }
    k
}

/// `ℓ(x, y) = −⌊ln d(x, y)⌋`.
pub fn logscale_from_metric(m: &MetricTable) -> LogScale {
    LogScale::from_fn(m.points.clone(), |i, j| -floor_ln(m.get(i, j)))
}

/// Scale on `A × B` given by the minimum of the two coordinates' values.
pub fn product_logscale(ls1: &LogScale, ls2: &LogScale) -> LogScale {
    let (n1, n2) = (ls1.len(), ls2.len());
    let mut points = Vec::with_capacity(n1 * n2);
    for a in ls1.points() {
        for b in ls2.points() {
            points.push(format!("({a},{b})"));
        }
    }
    LogScale::from_fn(points, |p, q| {
        let (a1, b1, a2, b2) = (p / n2, p % n2, q / n2, q % n2);
        match (ls1.get(a1, a2), ls2.get(b1, b2)) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!("distinct product points"),
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pasted {
    pub scale: LogScale,
    /// Clamp level.
    pub n: i64,
    /// Largest discrepancy between two charts on their overlap.
    pub overlap_delta: i64,
    /// Largest `δ` among the local scales.
    pub local_delta: i64,
    /// Bound on `|ℓ − ℓ_i|` on chart `i`: `Δ + n − min ℓ_i`.
    pub lipschitz_bound: i64,
}

/// Pastes positive local scales on a finite cover into a global scale.
///
/// The neighbourhood is `E = {(x, y) : ℓ_i(x, y) ≥ n for some chart i ∋ x, y}`
/// plus the diagonal, with `n` the least level at which every `E`-neighbourhood
/// of a point lies inside one chart. On `E` the value is `max(ℓ_i, n)` for the
/// lowest-index chart containing the pair; off `E` it is `n`.
pub fn paste_logscales(points: &[String], cover: &[Vec<usize>], locals: &[LogScale], overlap_bound: i64) -> Result<Pasted> {
    let np = points.len();
    if cover.len() != locals.len() || cover.is_empty() {
        return invalid("cover and locals must be non-empty and of equal length");
    }
    // pos[i][x] = index of x inside chart i
    let mut pos = vec![vec![None; np]; cover.len()];
    for (i, (chart, ls)) in cover.iter().zip(locals).enumerate() {
        if chart.len() != ls.len() {
            return invalid(format!("chart {i} has {} points but its scale has {}", chart.len(), ls.len()));
        }
        for (k, &x) in chart.iter().enumerate() {
            if x >= np {
                return invalid(format!("chart {i} references unknown point {x}"));
            }
            if pos[i][x].replace(k).is_some() {
                return invalid(format!("chart {i} repeats point {x}"));
            }
        }
        if let Some(m) = ls.min_value() {
            if m < 1 {
                return precondition(format!("local scale {i} is not positive"));
            }
        }
    }
    if let Some(x) = (0..np).find(|&x| pos.iter().all(|p| p[x].is_none())) {
        return precondition(format!("point {x} is not covered"));
    }
    let local = |i: usize, x: usize, y: usize| -> Option<i64> {
        match (pos[i][x], pos[i][y]) {
            (Some(a), Some(b)) if a != b => Some(locals[i].at(a, b)),
            _ => None,
        }
    };

    let mut overlap_delta = 0;
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            for x in 0..np {
                for y in x + 1..np {
                    if let (Some(a), Some(b)) = (local(i, x, y), local(j, x, y)) {
                        overlap_delta = overlap_delta.max((a - b).abs());
                    }
                }
            }
        }
    }
    if overlap_delta > overlap_bound {
        return precondition(format!("charts disagree by {overlap_delta} on an overlap, above the bound {overlap_bound}"));
    }
    let local_delta = locals.iter().map(delta_of).max().unwrap_or(0);

    let in_e = |n: i64, x: usize, y: usize| (0..cover.len()).any(|i| local(i, x, y).is_some_and(|v| v >= n));
    let lebesgue = |n: i64| {
        (0..np).all(|x| {
            let nb: Vec<usize> = (0..np).filter(|&y| y == x || in_e(n, x, y)).collect();
            (0..cover.len()).any(|i| nb.iter().all(|&y| pos[i][y].is_some()))
        })
    };
    let lo = locals.iter().filter_map(LogScale::min_value).min().unwrap_or(1);
    let hi = locals.iter().filter_map(LogScale::max_value).max().unwrap_or(1) + 1;
    let n = (lo..=hi).find(|&n| lebesgue(n)).expect("the diagonal neighbourhood always satisfies the Lebesgue condition");

    let scale = LogScale::from_fn(points.to_vec(), |x, y| {
        if in_e(n, x, y) {
            let first = (0..cover.len()).find_map(|i| local(i, x, y)).expect("pair in E lies in a chart");
            first.max(n)
        } else {
            n
        }
    });
    Ok(Pasted { scale, n, overlap_delta, local_delta, lipschitz_bound: overlap_delta + n - lo })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    /// `max |ℓ1 − ℓ2|` off the diagonal.
    pub max_difference: i64,
    /// `max_difference`, unless the difference grows with the scale.
    pub lipschitz_k: Option<i64>,
    /// Least `k`, then least `c ≥ 1`, with `c⁻¹ℓ1 − k ≤ ℓ2 ≤ cℓ1 + k`.
    pub holder: Option<(BigRational, i64)>,
}

/// Lipschitz and Hölder equivalence constants between two scales on one set.
///
/// The difference is called scale-growing when its maximum over pairs with
/// `|ℓ1| = s` is strictly increasing in `s` across at least two levels; a
/// finite table cannot certify Lipschitz equivalence in that case.
pub fn equivalence_bounds(ls1: &LogScale, ls2: &LogScale) -> Result<Equivalence> {
    let n = ls1.len();
    if ls2.len() != n {
        return invalid("scales live on different point sets");
    }
    let pairs: Vec<(i64, i64)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (ls1.at(i, j), ls2.at(i, j))).collect();
    let max_difference = pairs.iter().map(|(a, b)| (a - b).abs()).max().unwrap_or(0);

    let mut by_level: std::collections::BTreeMap<i64, i64> = Default::default();
    for &(a, b) in &pairs {
        let e = by_level.entry(a.abs()).or_insert(0);
        *e = (*e).max((a - b).abs());
    }
    let levels: Vec<i64> = by_level.values().copied().collect();
    let growing = levels.len() >= 2 && levels.windows(2).all(|w| w[0] < w[1]);
    let lipschitz_k = if growing { None } else { Some(max_difference) };

    let holder = (0..=max_difference).find_map(|k| holder_c(&pairs, k).map(|c| (c, k)));
    Ok(Equivalence { max_difference, lipschitz_k, holder })
}

/// Least `c ≥ 1` with `b ≤ c·a + k` and `a ≤ c·(b + k)` on all pairs.
fn holder_c(pairs: &[(i64, i64)], k: i64) -> Option<BigRational> {
    let q = |p: i64, r: i64| BigRational::new(BigInt::from(p), BigInt::from(r));
    let mut lo = BigRational::one();
    let mut hi: Option<BigRational> = None;
    let cap = |c: BigRational, hi: &mut Option<BigRational>| {
        if hi.as_ref().is_none_or(|h| c < *h) {
            *hi = Some(c);
        }
    };
    for &(a, b) in pairs {
        // c·a ≥ b − k
        match a.cmp(&0) {
            Ordering::Greater => lo = lo.max(q(b - k, a)),
            Ordering::Equal if b - k > 0 => return None,
            Ordering::Equal => {}
            Ordering::Less => cap(q(b - k, a), &mut hi),
        }
        // c·(b + k) ≥ a
        let m = b + k;
        match m.cmp(&0) {
            Ordering::Greater => lo = lo.max(q(a, m)),
            Ordering::Equal if a > 0 => return None,
            Ordering::Equal => {}
            Ordering::Less => cap(q(a, m), &mut hi),
        }
    }
    match hi {
        Some(h) if h < lo => None,
        _ => Some(lo),
    }
}

/// Scale from doubled Gromov products `2·(x, y)_{x0}` of a connected graph.
pub fn logscale_from_gromov(g: &crate::hypgraph::Graph, x0: usize) -> Result<LogScale> {
    let d = g.all_pairs()?;
    let n = g.len();
    Ok(LogScale::indexed(n, |x, y| {
        (d.get(x0, x) + d.get(x0, y) - d.get(x, y)) as i64
    }))
}
