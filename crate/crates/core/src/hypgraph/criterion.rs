use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use super::{CocycleGraph, UNREACHED};
use crate::error::{precondition, Result};

/// `(Λ, Δ') = ((Δ + η)/η, 1)`: every directed path is a `(Λ, Δ')`-quasi-geodesic.
pub fn directed_path_qg_constants(delta: Rational64, eta: Rational64) -> Result<(Rational64, Rational64)> {
    if eta <= Rational64::from_integer(0) {
        return precondition("η must be positive");
    }
    Ok(((delta + eta) / eta, Rational64::from_integer(1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathViolation {
    pub path: Vec<usize>,
    pub distance: u32,
}

/// Checks `|i − j| ≤ Λ·|t_i − t_j|` on every directed path of length at most
/// `horizon`. Paths are handled through the sets reachable at each depth, so
/// the scan is polynomial; a violating path is rebuilt from parent links.
pub fn verify_directed_paths(cg: &CocycleGraph, horizon: usize) -> Result<Option<PathViolation>> {
    let (lam, _) = directed_path_qg_constants(cg.delta, cg.eta)?;
    let g = &cg.graph;
    let n = g.len();
    let found = (0..n).into_par_iter().find_map_first(|s| {
        let ds = g.bfs(s);
        let mut parent: Vec<Vec<(usize, usize)>> = vec![vec![(s, s)]];
        let mut frontier = vec![s];
        for j in 1..=horizon {
            let mut next: Vec<(usize, usize)> = Vec::new();
            for &u in &frontier {
                for &v in g.out_neighbors(u) {
                    next.push((v, u));
                }
            }
            next.sort_unstable();
            next.dedup_by_key(|p| p.0);
            if next.is_empty() {
                break;
            }
            for &(v, _) in &next {
                let ok = ds[v] != UNREACHED && Rational64::from_integer(j as i64) <= lam * Rational64::from_integer(ds[v] as i64);
                if !ok {
                    parent.push(next.clone());
                    let mut path = vec![v];
                    let mut cur = v;
                    for layer in parent.iter().rev().take(j) {
                        let &(_, p) = layer.iter().find(|e| e.0 == cur).expect("parent recorded");
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(PathViolation { path, distance: ds[v] });
                }
            }
            frontier = next.iter().map(|e| e.0).collect();
            parent.push(next);
        }
        None
    });
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionViolation {
    pub u0: usize,
    pub v0: usize,
    /// Largest qualifying distance with both indices in each third of the horizon.
    pub window_max: [Option<u32>; 3],
    pub disconnected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub rho0: Option<u32>,
    pub k_m: Option<usize>,
    pub m: u32,
    pub horizon: usize,
    pub delta1: String,
    /// `ρ(k)`: largest `|u_i − v_j|` over qualifying pairs with `i, j > k`.
    pub rho_by_k: Vec<Option<u32>>,
    pub start_pairs: usize,
    pub truncated_starts: usize,
    pub violations: Vec<CriterionViolation>,
}

/// Finite certificate for the contraction criterion on a ball.
///
/// For every pair of start vertices with `|u0 − v0| ≤ m` and all directed paths
/// of length at most `horizon` from them, index pairs with
/// `|λ(u_i) − λ(v_j)| ≤ Δ1` qualify. `ρ(k)` is the largest distance over
/// qualifying pairs with `i, j > k`; `ρ0 = ρ(⌊horizon/2⌋)` and `k_m` is the
/// least `k` with `ρ(k) = ρ0`. A start pair is reported as a violation when
/// qualifying distances grow strictly across the three thirds of the horizon
/// or when a qualifying pair is disconnected.
pub fn convergence_criterion(cg: &CocycleGraph, delta1: Rational64, m: u32, horizon: usize) -> Result<CriterionReport> {
    if delta1 < cg.delta + cg.eta {
        return precondition(format!("Δ1 = {delta1} must be at least Δ + η = {}", cg.delta + cg.eta));
    }
    if !(3..=63).contains(&horizon) {
        return precondition("horizon must lie in 3..=63");
    }
    let g = &cg.graph;
    let n = g.len();
    // depth masks of vertices reachable from each start
    let reach: Vec<Vec<(usize, u64)>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut masks: std::collections::BTreeMap<usize, u64> = Default::default();
            let mut frontier = vec![s];
            masks.insert(s, 1);
            for j in 1..=horizon {
                let mut next: Vec<usize> = frontier.iter().flat_map(|&u| g.out_neighbors(u).iter().copied()).collect();
                next.sort_unstable();
                next.dedup();
                for &v in &next {
                    *masks.entry(v).or_insert(0) |= 1 << j;
                }
                frontier = next;
            }
            masks.into_iter().collect()
        })
        .collect();
    let truncated_starts = cg.truncated.iter().filter(|&&t| t).count();
    let dist: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| g.bfs(s)).collect();
    let d1 = delta1;
    let third = horizon / 3;
    let windows: [u64; 3] = [range_mask(1, third), range_mask(third + 1, 2 * third), range_mask(2 * third + 1, horizon)];
    let maxdepth = |mk: u64| 63 - mk.leading_zeros() as usize;

    struct PairOut {
        best_at: Vec<Option<u32>>,
        violation: Option<CriterionViolation>,
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u..n).map(move |v| (u, v))).filter(|&(u, v)| dist[u][v] <= m).collect();
    let outs: Vec<PairOut> = pairs
        .par_iter()
        .map(|&(u0, v0)| {
            let mut best_at = vec![None; horizon + 1];
            let mut win = [None; 3];
            let mut disconnected = false;
            for &(u, mu) in &reach[u0] {
                for &(v, mv) in &reach[v0] {
                    if Rational64::from_integer((cg.lambda[u] - cg.lambda[v]).abs()) > d1 {
                        continue;
                    }
                    let d = dist[u][v];
                    if d == UNREACHED {
                        disconnected = true;
                        continue;
                    }
                    let k = maxdepth(mu).min(maxdepth(mv));
                    bump(&mut best_at[k], d);
                    for (w, &wm) in windows.iter().enumerate() {
                        if mu & wm != 0 && mv & wm != 0 {
                            bump(&mut win[w], d);
                        }
                    }
                }
            }
            let growing = matches!(win, [Some(a), Some(b), Some(c)] if a < b && b < c);
            let violation = (growing || disconnected).then_some(CriterionViolation { u0, v0, window_max: win, disconnected });
            PairOut { best_at, violation }
        })
        .collect();

    // ρ(k) = max over contributions whose depths both exceed k
    let mut best_at = vec![None; horizon + 1];
    for o in &outs {
        for (k, b) in o.best_at.iter().enumerate() {
            if let Some(d) = *b {
                bump(&mut best_at[k], d);
            }
        }
    }
    let mut rho_by_k = vec![None; horizon + 1];
    let mut acc = None;
    for k in (0..=horizon).rev() {
        if k < horizon {
            if let Some(d) = best_at[k + 1] {
                bump(&mut acc, d);
            }
        }
        rho_by_k[k] = acc;
    }
    let rho0 = rho_by_k[horizon / 2];
    let k_m = rho0.map(|r| (0..=horizon).find(|&k| rho_by_k[k] == Some(r)).expect("attained at horizon/2"));
    Ok(CriterionReport {
        rho0,
        k_m,
        m,
        horizon,
        delta1: delta1.to_string(),
        rho_by_k,
        start_pairs: pairs.len(),
        truncated_starts,
        violations: outs.into_iter().filter_map(|o| o.violation).collect(),
    })
}

fn bump(slot: &mut Option<u32>, d: u32) {
    if slot.is_none_or(|x| d > x) {
        *slot = Some(d);
    }
}

fn range_mask(lo: usize, hi: usize) -> u64 {
    (lo..=hi).fold(0, |m, j| m | (1u64 << j))
}
