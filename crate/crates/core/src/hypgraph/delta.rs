use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Graph, UNREACHED};
use crate::error::{invalid, precondition, Error, Result};

/// `(x, y)_{x0} = ½(|x0 − x| + |x0 − y| − |x − y|)`.
pub fn gromov_product(g: &Graph, x0: usize, x: usize, y: usize) -> Result<Rational64> {
    let d0 = g.bfs(x0);
    let dx = g.bfs(x);
    for v in [x, y] {
        if d0[v] == UNREACHED {
            return Err(Error::Disconnected(x0, v));
        }
    }
    if dx[y] == UNREACHED {
        return Err(Error::Disconnected(x, y));
    }
    Ok(Rational64::new(d0[x] as i64 + d0[y] as i64 - dx[y] as i64, 2))
}

/// Distances from every vertex of `ball` to every vertex of `ball`, measured in `g`.
fn ball_distances(g: &Graph, ball: &[usize]) -> Vec<u32> {
    let b = ball.len();
    let rows: Vec<Vec<u32>> = ball
        .par_iter()
        .map(|&s| {
            let d = g.bfs(s);
            ball.iter().map(|&v| d[v]).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(b * b);
    for r in rows {
        out.extend(r);
    }
    out
}

struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }
}

/// Least `δ` with `(x, z)_{x0} ≥ min((x, y)_{x0}, (y, z)_{x0}) − δ` over all
/// triples in the ball of the given radius around `x0`.
///
/// Products are kept doubled. For each threshold `t` a bitset row records the
/// `y` with `2(x, y) ≥ t`; a pair `(x, z)` needs `δ ≥ (t − 2(x, z))/2` exactly
/// when rows `x` and `z` intersect at level `t`.
pub fn four_point_delta(g: &Graph, x0: usize, radius: u32) -> Result<Rational64> {
    let ball = g.ball(x0, radius);
    let b = ball.len();
    let d = ball_distances(g, &ball);
    let base = 0; // ball[0] == x0
    let p2 = |i: usize, j: usize| (d[base * b + i] + d[base * b + j] - d[i * b + j]) as usize;
    let top = 2 * radius as usize;
    let words = b.div_ceil(64);
    let levels: Vec<Bits> = (0..=top + 1)
        .into_par_iter()
        .map(|t| {
            let mut data = vec![0u64; b * words];
            for i in 0..b {
                for j in 0..b {
                    if p2(i, j) >= t {
                        data[i * words + j / 64] |= 1 << (j % 64);
                    }
                }
            }
            Bits { words, data }
        })
        .collect();
    let meets = |t: usize, i: usize, j: usize| {
        t <= top && levels[t].row(i).iter().zip(levels[t].row(j)).any(|(a, c)| a & c != 0)
    };
    let best = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut best = 0usize;
            for j in i + 1..b {
                let pij = p2(i, j);
                while meets(pij + best + 1, i, j) {
                    best += 1;
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok(Rational64::new(best as i64, 2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThinMode {
    /// Every triple of ball vertices, degenerate ones included; balls of at
    /// most 300 vertices.
    Exhaustive,
    /// `samples` triples drawn with a seeded generator.
    Sampled { samples: usize, seed: u64 },
}

pub const EXHAUSTIVE_THIN_LIMIT: usize = 300;

/// Largest thinness of geodesic triangles with vertices in the ball, maximised
/// over every choice of geodesic sides. Points on sides are vertices, so the
/// value is an integer.
pub fn thin_triangle_delta(g: &Graph, x0: usize, radius: u32, mode: ThinMode) -> Result<Rational64> {
    let ball = g.ball(x0, radius);
    if let ThinMode::Exhaustive = mode {
        if ball.len() > EXHAUSTIVE_THIN_LIMIT {
            return precondition(format!("exhaustive mode needs a ball of at most {EXHAUSTIVE_THIN_LIMIT} vertices, got {}", ball.len()));
        }
    }
    let dist = g.all_pairs_within(&ball)?;
    let triples: Vec<(usize, usize, usize)> = match mode {
        ThinMode::Exhaustive => {
            let mut t = Vec::new();
            for (i, &a) in ball.iter().enumerate() {
                for (j, &b) in ball.iter().enumerate().skip(i) {
                    for &c in &ball[j..] {
                        t.push((a, b, c));
                    }
                }
            }
            t
        }
        ThinMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let v: Vec<usize> = ball.choose_multiple(&mut rng, 3.min(ball.len())).copied().collect();
                    (v[0], v[v.len().min(2) - 1], v[v.len() - 1])
                })
                .collect()
        }
    };
    let best = triples.par_iter().map(|&(a, b, c)| triangle_thinness(g, &dist, a, b, c)).max().unwrap_or(0);
    Ok(Rational64::from_integer(best as i64))
}

impl Graph {
    /// Full distance rows for the given sources.
    fn all_pairs_within(&self, sources: &[usize]) -> Result<SourceDist> {
        let n = self.len();
        let mut row_of = vec![usize::MAX; n];
        for (k, &s) in sources.iter().enumerate() {
            row_of[s] = k;
        }
        let rows: Vec<Vec<u32>> = sources.par_iter().map(|&s| self.bfs(s)).collect();
        for (k, r) in rows.iter().enumerate() {
            if let Some(&s) = sources.iter().find(|&&s| r[s] == UNREACHED) {
                return Err(Error::Disconnected(sources[k], s));
            }
        }
        // points on geodesics may leave the ball; compute those rows lazily
        Ok(SourceDist { rows, row_of, graph: self.clone() })
    }
}

struct SourceDist {
    rows: Vec<Vec<u32>>,
    row_of: Vec<usize>,
    graph: Graph,
}

impl SourceDist {
    fn row(&self, s: usize) -> std::borrow::Cow<'_, [u32]> {
        match self.row_of[s] {
            usize::MAX => std::borrow::Cow::Owned(self.graph.bfs(s)),
            k => std::borrow::Cow::Borrowed(&self.rows[k]),
        }
    }
}

/// Vertices on some geodesic from `u` to `v`, grouped by distance from `u`.
fn interval(du: &[u32], dv: &[u32], target: u32) -> Vec<Vec<usize>> {
    let mut layers = vec![Vec::new(); target as usize + 1];
    for p in 0..du.len() {
        if du[p] != UNREACHED && dv[p] != UNREACHED && du[p] + dv[p] == target {
            layers[du[p] as usize].push(p);
        }
    }
    layers
}

/// Max over geodesics `γ` from `u` to `v` of `d(p, γ)`, by a bottleneck pass
/// over the geodesic layers; `du` are distances from `u`.
fn farthest_geodesic(g: &Graph, layers: &[Vec<usize>], du: &[u32], dp: &[u32]) -> u32 {
    let mut best: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
    for &q in &layers[0] {
        best.insert(q, dp[q]);
    }
    for (k, layer) in layers.iter().enumerate().skip(1) {
        for &q in layer {
            let prev = g.neighbors(q).iter().filter(|&&r| du[r] as usize == k - 1).filter_map(|r| best.get(r)).max().copied();
            if let Some(m) = prev {
                best.insert(q, m.min(dp[q]));
            }
        }
    }
    layers.last().and_then(|l| l.first()).and_then(|q| best.get(q).copied()).unwrap_or(0)
}

fn triangle_thinness(g: &Graph, dist: &SourceDist, a: usize, b: usize, c: usize) -> u32 {
    let (ra, rb, rc) = (dist.row(a), dist.row(b), dist.row(c));
    let ab = (interval(&ra, &rb, ra[b]), &ra);
    let bc = (interval(&rb, &rc, rb[c]), &rb);
    let ca = (interval(&rc, &ra, rc[a]), &rc);
    let sides = [(&ab, &bc, &ca), (&bc, &ca, &ab), (&ca, &ab, &bc)];
    let mut worst = 0;
    for (side, o1, o2) in sides {
        for layer in &side.0 {
            for &p in layer {
                let dp = dist.row(p);
                let f1 = farthest_geodesic(g, &o1.0, o1.1, &dp);
                if f1 <= worst {
                    continue;
                }
                let f2 = farthest_geodesic(g, &o2.0, o2.1, &dp);
                worst = worst.max(f1.min(f2));
            }
        }
    }
    worst
}

/// Values of `|x − x_n| − |y − x_n|` over the last third of the ray, as `(min, max)`.
pub fn busemann_estimate(g: &Graph, ray: &[usize], x: usize, y: usize, min_len: usize) -> Result<(i64, i64)> {
    if ray.len() < min_len.max(1) {
        return precondition(format!("ray has {} vertices, horizon requires {}", ray.len(), min_len.max(1)));
    }
    for w in ray.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return invalid(format!("ray vertices {} and {} are not adjacent", w[0], w[1]));
        }
    }
    let dx = g.bfs(x);
    let dy = g.bfs(y);
    let start = ray.len() - (ray.len() / 3).max(1);
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &v in &ray[start..] {
        if dx[v] == UNREACHED || dy[v] == UNREACHED {
            return Err(Error::Disconnected(x, v));
        }
        let b = dx[v] as i64 - dy[v] as i64;
        lo = lo.min(b);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}
