use std::collections::VecDeque;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use super::{CocycleGraph, Graph, UNREACHED};
use crate::error::{precondition, Result};

/// Constants of the level graph. `k` is the merge index for start distance
/// `2ρ1`, supplied by the caller (for instance from the convergence criterion).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelParams {
    #[serde(serialize_with = "ser_ratio")]
    pub delta1: Rational64,
    pub delta2: i64,
    pub r: u32,
    pub rho1: u32,
    pub k: u32,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelGraph {
    pub params: LevelParams,
    pub level: Vec<i64>,
    /// Pairs `(u, v)`, `u < v`, of equal level.
    pub horizontal: Vec<(usize, usize)>,
    /// Pairs `(upper, lower)` with `level(lower) = level(upper) − 1`.
    pub vertical: Vec<(usize, usize)>,
}

impl LevelGraph {
    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.level.len());
        for &(u, v) in self.horizontal.iter().chain(&self.vertical) {
            g.add_edge(u, v);
        }
        g
    }
}

/// Builds `Γ1`: horizontal edges join vertices of one level band linked by at
/// most `r` hops of `Γ`-length at most `ρ1` inside the band; vertical edges
/// follow directed paths from a vertex to the next lower band.
pub fn build_level_graph(cg: &CocycleGraph, params: LevelParams) -> Result<LevelGraph> {
    let LevelParams { delta1, delta2, r, rho1, k } = params;
    if delta1 < cg.delta + cg.eta {
        return precondition(format!("Δ1 = {delta1} must be at least Δ + η = {}", cg.delta + cg.eta));
    }
    if Rational64::from_integer(delta2) <= delta1 * Rational64::from_integer(k as i64 + 1) {
        return precondition(format!("Δ2 = {delta2} must exceed (k + 1)·Δ1 = {}", delta1 * Rational64::from_integer(k as i64 + 1)));
    }
    if r == 0 || r % 4 != 0 {
        return precondition("r must be a positive multiple of 4");
    }
    if rho1 == 0 || Rational64::from_integer((r as i64) * rho1 as i64) * cg.eta < Rational64::from_integer(4 * delta2) {
        return precondition("r must be at least 4·Δ2/(ρ1·η)");
    }
    let g = &cg.graph;
    if let Some((u, v)) = g.edges().into_iter().find(|&(u, v)| !g.has_arrow(u, v) && !g.has_arrow(v, u)) {
        return precondition(format!("edge ({u}, {v}) is not directed; the level graph needs a directed graph"));
    }
    let n = g.len();
    let level: Vec<i64> = cg.lambda.iter().map(|l| l.div_euclid(delta2)).collect();

    // short hops inside each band
    let hops: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut out = Vec::new();
            let mut seen = vec![false; n];
            let mut q = VecDeque::from([(u, 0u32)]);
            seen[u] = true;
            while let Some((x, d)) = q.pop_front() {
                if x != u && level[x] == level[u] {
                    out.push(x);
                }
                if d == rho1 {
                    continue;
                }
                for &y in g.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        q.push_back((y, d + 1));
                    }
                }
            }
            out
        })
        .collect();
    let horizontal: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut depth = vec![UNREACHED; n];
            depth[u] = 0;
            let mut q = VecDeque::from([u]);
            let mut out = Vec::new();
            while let Some(x) = q.pop_front() {
                if x > u {
                    out.push((u, x));
                }
                if depth[x] == r {
                    continue;
                }
                for &y in &hops[x] {
                    if depth[y] == UNREACHED {
                        depth[y] = depth[x] + 1;
                        q.push_back(y);
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    let vertical: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let l = level[u];
            let mut seen = vec![false; n];
            let mut stack = vec![u];
            seen[u] = true;
            let mut out = Vec::new();
            while let Some(x) = stack.pop() {
                if level[x] == l - 1 {
                    out.push((u, x));
                }
                if level[x] < l - 1 {
                    continue;
                }
                for &y in g.out_neighbors(x) {
                    if !seen[y] && level[y] >= l - 1 {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    Ok(LevelGraph { params, level, horizontal: horizontal.concat(), vertical: vertical.concat() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub levels_consistent: bool,
    pub gamma_edges_in_gamma1: bool,
    /// `|u − v|_1 ≤ |u − v| ≤ rρ1·|u − v|_1` on all pairs.
    pub distortion_ok: bool,
    pub max_distortion: String,
    /// No geodesic of `Γ1` takes a descending edge after an ascending one.
    pub downup_ok: bool,
    pub max_consecutive_horizontal: u32,
    pub max_total_horizontal: u32,
    pub pairs_checked: usize,
}

impl LevelCheck {
    pub fn all_ok(&self) -> bool {
        self.levels_consistent && self.gamma_edges_in_gamma1 && self.distortion_ok && self.downup_ok && self.max_consecutive_horizontal <= 6
    }
}

/// Checks the level-graph properties exhaustively. A path is a geodesic from `a`
/// exactly when `|a − x_i|_1 = i` along it, so every geodesic from `a` is a path
/// in the breadth-first layering from `a`; states along such paths are tracked
/// as bitmasks over (ascending seen, current horizontal run, total horizontal).
pub fn check_level_graph(cg: &CocycleGraph, lg: &LevelGraph) -> Result<LevelCheck> {
    let g = &cg.graph;
    let g1 = lg.graph();
    let n = g.len();
    let levels_consistent = lg.horizontal.iter().all(|&(u, v)| lg.level[u] == lg.level[v])
        && lg.vertical.iter().all(|&(u, v)| lg.level[v] == lg.level[u] - 1);
    let gamma_edges_in_gamma1 = g.edges().iter().all(|&(u, v)| g1.has_edge(u, v));
    let d = g.all_pairs()?;
    let d1 = g1.all_pairs()?;
    let bound = lg.params.r * lg.params.rho1;
    let mut distortion_ok = true;
    let mut max_ratio = Rational64::from_integer(1);
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (d.get(u, v), d1.get(u, v));
            if b > a || a > bound * b {
                distortion_ok = false;
            }
            max_ratio = max_ratio.max(Rational64::new(a as i64, b as i64));
        }
    }

    let vertical: std::collections::HashSet<(usize, usize)> = lg.vertical.iter().copied().collect();
    // edge kind when traversed x → y: 0 horizontal, 1 descending, 2 ascending
    let kind = |x: usize, y: usize| -> u8 {
        if vertical.contains(&(x, y)) {
            1
        } else if vertical.contains(&(y, x)) {
            2
        } else {
            0
        }
    };
    const RUN: usize = 8;
    const TOT: usize = 8;
    let bit = |asc: usize, run: usize, tot: usize| 1u128 << ((asc * RUN + run) * TOT + tot);
    let results: Vec<(bool, u32, u32)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let dist = d1.row(a);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| dist[v]);
            let mut states = vec![0u128; n];
            states[a] = bit(0, 0, 0);
            let mut ok = true;
            let (mut max_run, mut max_tot) = (0u32, 0u32);
            for &x in &order {
                let sx = states[x];
                if sx == 0 {
                    continue;
                }
                for &y in g1.neighbors(x) {
                    if dist[y] != dist[x] + 1 {
                        continue;
                    }
                    let kd = kind(x, y);
                    let mut sy = 0u128;
                    for asc in 0..2 {
                        for run in 0..RUN {
                            for tot in 0..TOT {
                                if sx & bit(asc, run, tot) == 0 {
                                    continue;
                                }
                                match kd {
                                    0 => {
                                        let (r2, t2) = ((run + 1).min(RUN - 1), (tot + 1).min(TOT - 1));
                                        max_run = max_run.max(r2 as u32);
                                        max_tot = max_tot.max(t2 as u32);
                                        sy |= bit(asc, r2, t2);
                                    }
                                    1 => {
                                        if asc == 1 {
                                            ok = false;
                                        }
                                        sy |= bit(asc, 0, tot);
                                    }
                                    _ => sy |= bit(1, 0, tot),
                                }
                            }
                        }
                    }
                    states[y] |= sy;
                }
            }
            (ok, max_run, max_tot)
        })
        .collect();
    Ok(LevelCheck {
        levels_consistent,
        gamma_edges_in_gamma1,
        distortion_ok,
        max_distortion: max_ratio.to_string(),
        downup_ok: results.iter().all(|r| r.0),
        max_consecutive_horizontal: results.iter().map(|r| r.1).max().unwrap_or(0),
        max_total_horizontal: results.iter().map(|r| r.2).max().unwrap_or(0),
        pairs_checked: n * n.saturating_sub(1) / 2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MinLevel {
    /// Least value of `min λ` over all geodesics from `u` to `v`.
    pub min: i64,
    /// Largest value of `min λ` over all geodesics.
    pub max: i64,
    pub spread: i64,
}

/// Minimum of `λ` along geodesics from `u` to `v`, over all geodesics.
pub fn min_level_scale(cg: &CocycleGraph, u: usize, v: usize) -> Result<MinLevel> {
    let g = &cg.graph;
    let du = g.bfs(u);
    let dv = g.bfs(v);
    if du[v] == UNREACHED {
        return Err(crate::Error::Disconnected(u, v));
    }
    let total = du[v];
    let mut on: Vec<usize> = (0..g.len()).filter(|&x| du[x] != UNREACHED && dv[x] != UNREACHED && du[x] + dv[x] == total).collect();
    on.sort_by_key(|&x| du[x]);
    let mut lo = vec![i64::MAX; g.len()];
    let mut hi = vec![i64::MIN; g.len()];
    lo[u] = cg.lambda[u];
    hi[u] = cg.lambda[u];
    for &x in &on {
        if x == u {
            continue;
        }
        for &p in g.neighbors(x) {
            if du[p] + 1 == du[x] && dv[p] == dv[x] + 1 && lo[p] != i64::MAX {
                lo[x] = lo[x].min(lo[p].min(cg.lambda[x]));
                hi[x] = hi[x].max(hi[p].min(cg.lambda[x]));
            }
        }
    }
    Ok(MinLevel { min: lo[v], max: hi[v], spread: hi[v] - lo[v] })
}
