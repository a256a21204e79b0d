use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Error, Result};
use crate::quadratic::QSqrt;

/// Stationary ordered Bratteli diagram. A path is `e_0 e_1 …` with
/// `range(e_i) = source(e_{i+1})`; each range fiber is totally ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdicSystem {
    vertices: Vec<String>,
    labels: Vec<String>,
    source: Vec<usize>,
    range: Vec<usize>,
    /// `fiber[v]`: edges with range `v`, in increasing order.
    fiber: Vec<Vec<usize>>,
    /// Position of each edge inside its fiber.
    rank: Vec<usize>,
    /// Tile symbol of each vertex.
    tiles: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    label: String,
    source: String,
    range: String,
}

#[derive(Serialize, Deserialize)]
struct AdicJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
    order: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tiles: Option<BTreeMap<String, String>>,
}

impl AdicSystem {
    /// `edges[i] = (label, source, range)`; `order[v]` lists the labels of the
    /// edges with range `v` from least to greatest.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, usize, usize)>, order: Vec<Vec<String>>, tiles: Option<Vec<String>>) -> Result<Self> {
        let nv = vertices.len();
        if nv == 0 || order.len() != nv {
            return invalid("one edge order per vertex is required");
        }
        let labels: Vec<String> = edges.iter().map(|e| e.0.clone()).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return invalid(format!("duplicate edge label {l}"));
            }
        }
        if edges.iter().any(|e| e.1 >= nv || e.2 >= nv) {
            return invalid("edge endpoint out of range");
        }
        let mut fiber = vec![Vec::new(); nv];
        let mut rank = vec![usize::MAX; edges.len()];
        for (v, ord) in order.iter().enumerate() {
            for l in ord {
                let e = labels.iter().position(|x| x == l).ok_or_else(|| Error::Invalid(format!("unknown edge {l} in order")))?;
                if edges[e].2 != v {
                    return invalid(format!("edge {l} ordered in the fiber of {} but has a different range", vertices[v]));
                }
                if rank[e] != usize::MAX {
                    return invalid(format!("edge {l} ordered twice"));
                }
                rank[e] = fiber[v].len();
                fiber[v].push(e);
            }
        }
        if let Some(e) = rank.iter().position(|&r| r == usize::MAX) {
            return invalid(format!("edge {} is missing from the order of its range", labels[e]));
        }
        if let Some(v) = fiber.iter().position(Vec::is_empty) {
            return invalid(format!("vertex {} has no incoming edges", vertices[v]));
        }
        let tiles = tiles.unwrap_or_else(|| vertices.clone());
        if tiles.len() != nv {
            return invalid("one tile symbol per vertex is required");
        }
        Ok(AdicSystem {
            vertices,
            labels,
            source: edges.iter().map(|e| e.1).collect(),
            range: edges.iter().map(|e| e.2).collect(),
            fiber,
            rank,
            tiles,
        })
    }

    /// The diagram of the matrix `[[2, 1], [1, 1]]` with edges `1, 2: A→A`,
    /// `3: B→A`, `4: A→B`, `5: B→B` ordered `1 < 2 < 3` and `4 < 5`.
    pub fn golden_example() -> Self {
        let e = |l: &str, s: usize, r: usize| (l.to_string(), s, r);
        let ord = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        AdicSystem::new(
            vec!["A".into(), "B".into()],
            vec![e("1", 0, 0), e("2", 0, 0), e("3", 1, 0), e("4", 0, 1), e("5", 1, 1)],
            vec![ord(&["1", "2", "3"]), ord(&["4", "5"])],
            None,
        )
        .expect("valid preset")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: AdicJson = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let vid = |name: &str| j.vertices.iter().position(|x| x == name).ok_or_else(|| Error::Invalid(format!("unknown vertex {name}")));
        let edges = j.edges.iter().map(|e| Ok((e.label.clone(), vid(&e.source)?, vid(&e.range)?))).collect::<Result<Vec<_>>>()?;
        let order = j.vertices.iter().map(|v| j.order.get(v).cloned().unwrap_or_default()).collect();
        let tiles = match &j.tiles {
            Some(t) => Some(j.vertices.iter().map(|v| t.get(v).cloned().ok_or_else(|| Error::Invalid(format!("no tile for vertex {v}")))).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        AdicSystem::new(j.vertices.clone(), edges, order, tiles)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = AdicJson {
            vertices: self.vertices.clone(),
            edges: (0..self.labels.len())
                .map(|e| EdgeJson { label: self.labels[e].clone(), source: self.vertices[self.source[e]].clone(), range: self.vertices[self.range[e]].clone() })
                .collect(),
            order: (0..self.vertices.len()).map(|v| (self.vertices[v].clone(), self.fiber[v].iter().map(|&e| self.labels[e].clone()).collect())).collect(),
            tiles: Some(self.vertices.iter().cloned().zip(self.tiles.iter().cloned()).collect()),
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn parse_path(&self, s: &str) -> Result<Vec<usize>> {
        let single = self.labels.iter().all(|l| l.chars().count() == 1);
        let toks: Vec<String> = if single {
            s.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_string()).collect()
        } else {
            s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(str::to_string).collect()
        };
        let p = toks
            .iter()
            .map(|t| self.labels.iter().position(|l| l == t).ok_or_else(|| Error::Invalid(format!("unknown edge {t}"))))
            .collect::<Result<Vec<_>>>()?;
        if !self.admissible(&p) {
            return invalid(format!("{s} is not a path"));
        }
        Ok(p)
    }

    pub fn format_path(&self, p: &[usize]) -> String {
        let parts: Vec<&str> = p.iter().map(|&e| self.labels[e].as_str()).collect();
        if self.labels.iter().all(|l| l.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    pub fn admissible(&self, p: &[usize]) -> bool {
        p.windows(2).all(|w| self.range[w[0]] == self.source[w[1]])
    }

    pub fn is_max(&self, e: usize) -> bool {
        self.rank[e] + 1 == self.fiber[self.range[e]].len()
    }

    pub fn is_min(&self, e: usize) -> bool {
        self.rank[e] == 0
    }

    /// All paths of length `n`, in label order.
    pub fn paths(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &out {
                for e in 0..self.labels.len() {
                    if p.last().is_none_or(|&l| self.range[l] == self.source[e]) {
                        let mut q = p.clone();
                        q.push(e);
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Successor in the adic order: the first non-maximal edge moves to the
    /// next edge of its fiber and earlier edges become minimal.
    pub fn vershik_map(&self, p: &[usize]) -> Result<Vec<usize>> {
        if !self.admissible(p) {
            return invalid("prefix is not a path");
        }
        let n = p.iter().position(|&e| !self.is_max(e)).ok_or_else(|| Error::Precondition("every edge of the prefix is maximal".into()))?;
        let mut out = p.to_vec();
        let e = p[n];
        out[n] = self.fiber[self.range[e]][self.rank[e] + 1];
        for i in (0..n).rev() {
            out[i] = self.fiber[self.source[out[i + 1]]][0];
        }
        Ok(out)
    }

    /// `σ(v)`: sources of the edges in the fiber of `v`, in order.
    pub fn substitution(&self) -> Vec<Vec<usize>> {
        self.fiber.iter().map(|f| f.iter().map(|&e| self.source[e]).collect()).collect()
    }

    /// `M[v][w]`: occurrences of `w` in `σ(v)`.
    pub fn substitution_matrix(&self) -> Vec<Vec<u64>> {
        let nv = self.vertices.len();
        self.substitution()
            .iter()
            .map(|img| {
                let mut row = vec![0; nv];
                for &w in img {
                    row[w] += 1;
                }
                row
            })
            .collect()
    }

    pub fn tile_symbol(&self, v: usize) -> &str {
        &self.tiles[v]
    }

    /// `σ^k(seed)` over vertex indices.
    pub fn substitution_expand(&self, seed: &[usize], iterations: usize) -> Vec<usize> {
        let sub = self.substitution();
        let mut w = seed.to_vec();
        for _ in 0..iterations {
            w = w.iter().flat_map(|&v| sub[v].iter().copied()).collect();
        }
        w
    }

    pub fn tile_word(&self, w: &[usize]) -> String {
        w.iter().map(|&v| self.tiles[v].as_str()).collect()
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertices.iter().position(|v| v == name).or_else(|| self.tiles.iter().position(|v| v == name)).ok_or_else(|| Error::Invalid(format!("unknown vertex {name}")))
    }

    /// Tile types met along the orbit `p, τ(p), …` (`steps` points). A tile
    /// is the block of consecutive paths sharing everything but the first edge;
    /// a new tile starts when the first edge is minimal.
    pub fn leaf_itinerary(&self, p: &[usize], steps: usize) -> Result<Vec<usize>> {
        if p.is_empty() {
            return invalid("empty prefix");
        }
        let mut cur = p.to_vec();
        let mut out = Vec::new();
        for i in 0..steps {
            if i == 0 || self.is_min(cur[0]) {
                out.push(self.range[cur[0]]);
            }
            if i + 1 < steps {
                cur = self.vershik_map(&cur).map_err(|_| Error::Budget(format!("orbit leaves the prefixes of length {} after {} steps", p.len(), i + 1)))?;
            }
        }
        Ok(out)
    }

    /// Prefix of length `n` of an all-minimal path, built backwards from a
    /// deep level so that its start follows the eventual minimal chain.
    pub fn minimal_path(&self, n: usize) -> Vec<usize> {
        let total = n + self.vertices.len();
        let mut p = vec![0; total];
        let mut v = 0;
        for i in (0..total).rev() {
            p[i] = self.fiber[v][0];
            v = self.source[p[i]];
        }
        p.truncate(n);
        p
    }
}

/// Primitivity by the Wielandt bound: some power up to `(n−1)² + 1` is positive.
pub fn is_primitive(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    let b: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = b.clone();
    for _ in 0..(n - 1) * (n - 1) + 1 {
        if p.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        p = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && b[k][j])).collect()).collect();
    }
    p.iter().all(|r| r.iter().all(|&x| x))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TileLengths {
    /// Perron eigenvalue and eigenvector with first entry 1.
    Exact { eigenvalue: QSqrt, lengths: Vec<QSqrt> },
    /// Collatz–Wielandt enclosure `lo ≤ λ ≤ hi` and an approximate eigenvector.
    Interval { lo: String, hi: String, lengths: Vec<String> },
}

/// Perron data of a primitive matrix `M` with `M·L = λ·L`.
pub fn tile_lengths(m: &[Vec<u64>]) -> Result<TileLengths> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return invalid("matrix must be square");
    }
    if !is_primitive(m) {
        return precondition("matrix is not primitive");
    }
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    match n {
        1 => Ok(TileLengths::Exact { eigenvalue: QSqrt::rational(r(m[0][0] as i64)), lengths: vec![QSqrt::rational(r(1))] }),
        2 => {
            let (a, b, c, d) = (m[0][0] as i64, m[0][1] as i64, m[1][0] as i64, m[1][1] as i64);
            let tr = a + d;
            let disc = tr * tr - 4 * (a * d - b * c);
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            let lambda = QSqrt::new(r(tr) * &half, half.clone(), disc)?;
            // (M − λ)L = 0 with L = (1, x): a + b·x = λ
            let x = lambda.sub(&QSqrt::rational(r(a))).div(&QSqrt::rational(r(b))).expect("b > 0 for primitive matrices");
            Ok(TileLengths::Exact { eigenvalue: lambda, lengths: vec![QSqrt::rational(r(1)), x] })
        }
        _ => {
            let (lo, hi, v) = collatz_wielandt(m, 200);
            Ok(TileLengths::Interval { lo: lo.to_string(), hi: hi.to_string(), lengths: v.iter().map(|x| x.to_string()).collect() })
        }
    }
}

/// Power iteration on rationals rounded to a fixed dyadic grid; any positive
/// vector gives a valid enclosure `min (Mx)_i/x_i ≤ λ ≤ max (Mx)_i/x_i`.
pub fn collatz_wielandt(m: &[Vec<u64>], iterations: usize) -> (BigRational, BigRational, Vec<BigRational>) {
    let n = m.len();
    let grid = BigInt::from(1u64 << 40);
    let mut x: Vec<BigRational> = vec![BigRational::one(); n];
    let bounds = |x: &[BigRational]| {
        let mx: Vec<BigRational> = (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from(m[i][j])) * &x[j]).fold(BigRational::zero(), |a, b| a + b)).collect();
        let ratios: Vec<BigRational> = (0..n).map(|i| &mx[i] / &x[i]).collect();
        let lo = ratios.iter().min().cloned().expect("nonempty");
        let hi = ratios.iter().max().cloned().expect("nonempty");
        (lo, hi, mx)
    };
    for _ in 0..iterations {
        let (lo, hi, mx) = bounds(&x);
        if lo == hi {
            break;
        }
        let first = mx[0].clone();
        x = mx.iter().map(|v| {
            let y = v / &first;
            let num = (y * BigRational::from_integer(grid.clone())).round().to_integer();
            BigRational::new(num.max(BigInt::one()), grid.clone())
        }).collect();
        if x.iter().any(|v| !v.is_positive()) {
            break;
        }
    }
    let (lo, hi, _) = bounds(&x);
    let first = x[0].clone();
    (lo, hi, x.iter().map(|v| v / &first).collect())
}
