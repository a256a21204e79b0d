use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Error, Result};
use crate::words::{format_letters, parse_letters, EvPeriodicWord, Letter};

/// Shift of finite type given by prohibited words over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSystem {
    alphabet: Vec<String>,
    prohibited: Vec<Vec<Letter>>,
    matrix: Option<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
struct SftJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prohibited: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<u8>>>,
}

impl SftSystem {
    pub fn from_prohibited(alphabet: Vec<String>, prohibited: Vec<Vec<Letter>>) -> Result<Self> {
        if alphabet.is_empty() || alphabet.len() > Letter::MAX as usize {
            return invalid("alphabet size out of range");
        }
        if prohibited.iter().any(|w| w.is_empty() || w.iter().any(|&x| x as usize >= alphabet.len())) {
            return invalid("prohibited words must be nonempty words over the alphabet");
        }
        let set: BTreeSet<Vec<Letter>> = prohibited.into_iter().collect();
        Ok(SftSystem { alphabet, prohibited: set.into_iter().collect(), matrix: None })
    }

    /// Parses prohibited words; without an alphabet, the letters occurring in
    /// the words are used in sorted order.
    pub fn from_prohibited_strs(alphabet: Option<Vec<String>>, words: &[String]) -> Result<Self> {
        let alphabet = match alphabet {
            Some(a) => a,
            None => {
                let letters: BTreeSet<String> = words.iter().flat_map(|w| w.chars().map(|c| c.to_string())).collect();
                letters.into_iter().collect()
            }
        };
        let prohibited = words.iter().map(|w| parse_letters(&alphabet, w)).collect::<Result<Vec<_>>>()?;
        Self::from_prohibited(alphabet, prohibited)
    }

    /// `A[i][j] = 0` prohibits the word `ij`; letters are named `0, 1, …`
    /// unless an alphabet is supplied.
    pub fn from_matrix(alphabet: Option<Vec<String>>, a: Vec<Vec<u8>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n || r.iter().any(|&x| x > 1)) {
            return invalid("transition matrix must be square with 0/1 entries");
        }
        let alphabet = alphabet.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if alphabet.len() != n {
            return invalid("alphabet size must match the matrix");
        }
        let mut prohibited = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x == 0 {
                    prohibited.push(vec![i as Letter, j as Letter]);
                }
            }
        }
        let mut s = Self::from_prohibited(alphabet, prohibited)?;
        s.matrix = Some(a);
        Ok(s)
    }

    pub fn full_shift(k: usize) -> Self {
        Self::from_prohibited((0..k).map(|i| i.to_string()).collect(), Vec::new()).expect("valid")
    }

    /// Prohibited `11` over `{0, 1}`.
    pub fn golden_mean() -> Self {
        Self::from_prohibited(vec!["0".into(), "1".into()], vec![vec![1, 1]]).expect("valid")
    }

    /// Reduced words in a free group of rank two: `A`, `B` denote inverses.
    pub fn free_group() -> Self {
        let alpha: Vec<String> = ["a", "A", "b", "B"].iter().map(|s| s.to_string()).collect();
        Self::from_prohibited(alpha, vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 2]]).expect("valid")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: SftJson = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        match (j.matrix, j.prohibited) {
            (Some(m), None) => Self::from_matrix(j.alphabet, m),
            (None, Some(p)) => Self::from_prohibited_strs(j.alphabet, &p),
            _ => invalid("give exactly one of \"prohibited\" or \"matrix\""),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = match &self.matrix {
            Some(m) => SftJson { alphabet: Some(self.alphabet.clone()), prohibited: None, matrix: Some(m.clone()) },
            None => SftJson { alphabet: Some(self.alphabet.clone()), prohibited: Some(self.prohibited_strs()), matrix: None },
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn prohibited(&self) -> &[Vec<Letter>] {
        &self.prohibited
    }

    pub fn prohibited_strs(&self) -> Vec<String> {
        self.prohibited.iter().map(|w| format_letters(&self.alphabet, w)).collect()
    }

    pub fn matrix(&self) -> Option<&Vec<Vec<u8>>> {
        self.matrix.as_ref()
    }

    /// Longest prohibited word, at least 2.
    pub fn memory(&self) -> usize {
        self.prohibited.iter().map(Vec::len).max().unwrap_or(0).max(2)
    }

    /// No prohibited factor.
    pub fn admissible(&self, w: &[Letter]) -> bool {
        self.prohibited.iter().all(|p| !w.windows(p.len()).any(|f| f == p.as_slice()))
    }

    /// No prohibited word starts at position 0.
    fn admissible_at_start(&self, w: &[Letter]) -> bool {
        self.prohibited.iter().all(|p| !w.starts_with(p))
    }

    /// Admissibility of a one-sided eventually periodic sequence.
    pub fn admissible_ev(&self, w: &EvPeriodicWord) -> bool {
        let n = match w.len() {
            Some(n) => n,
            None => w.pre().len() + w.period().len() + self.memory(),
        };
        self.admissible(&w.prefix(n))
    }

    /// `a·y` is admissible given that `y` is.
    pub fn can_prepend(&self, a: Letter, y: &EvPeriodicWord) -> bool {
        let mut w = vec![a];
        w.extend(y.prefix(self.memory()));
        self.admissible_at_start(&w)
    }

    /// Prohibited words reversed; the matrix, if any, transposed.
    pub fn dual(&self) -> SftSystem {
        let prohibited: BTreeSet<Vec<Letter>> = self.prohibited.iter().map(|w| w.iter().rev().copied().collect()).collect();
        let matrix = self.matrix.as_ref().map(|m| (0..m.len()).map(|i| (0..m.len()).map(|j| m[j][i]).collect()).collect());
        SftSystem { alphabet: self.alphabet.clone(), prohibited: prohibited.into_iter().collect(), matrix }
    }

    pub fn is_reversal_invariant(&self) -> bool {
        self.dual().prohibited == self.prohibited
    }

    /// Admissible words of length `n`.
    pub fn language(&self, n: usize) -> Vec<Vec<Letter>> {
        let k = self.alphabet.len() as Letter;
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &out {
                for x in 0..k {
                    let mut v = w.clone();
                    v.push(x);
                    let m = self.memory().min(v.len());
                    if self.admissible(&v[v.len() - m..]) {
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Higher-block graph on admissible words of length `memory − 1`,
    /// restricted to states lying on bi-infinite paths.
    fn essential_graph(&self) -> BlockGraph {
        let m = self.memory();
        let states = self.language(m - 1);
        let index: std::collections::HashMap<Vec<Letter>, usize> = states.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut succ = vec![Vec::new(); states.len()];
        let mut pred = vec![Vec::new(); states.len()];
        for (i, s) in states.iter().enumerate() {
            for x in 0..self.alphabet.len() as Letter {
                let mut w = s.clone();
                w.push(x);
                if self.admissible(&w) {
                    let j = index[&w[1..]];
                    succ[i].push((j, x));
                    pred[j].push((i, s[0]));
                }
            }
        }
        let mut alive = vec![true; states.len()];
        loop {
            let mut changed = false;
            for i in 0..states.len() {
                if alive[i] && (!succ[i].iter().any(|&(j, _)| alive[j]) || !pred[i].iter().any(|&(j, _)| alive[j])) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        BlockGraph { states, succ, pred, alive }
    }

    /// Words of length `n` occurring in bi-infinite admissible sequences,
    /// read forward.
    pub fn central_language(&self, n: usize) -> BTreeSet<Vec<Letter>> {
        let g = self.essential_graph();
        let mut out = BTreeSet::new();
        for (i, s) in g.states.iter().enumerate() {
            if !g.alive[i] {
                continue;
            }
            let mut walk = vec![(i, s.clone())];
            while walk.first().is_some_and(|(_, w)| w.len() < n) {
                let mut next = Vec::new();
                for (j, w) in walk {
                    for &(k, x) in &g.succ[j] {
                        if g.alive[k] {
                            let mut v = w.clone();
                            v.push(x);
                            next.push((k, v));
                        }
                    }
                }
                walk = next;
            }
            out.extend(walk.into_iter().map(|(_, w)| w[..n].to_vec()));
        }
        out
    }

    /// Past words `x_0 x_{−1} … x_{−n+1}` of bi-infinite sequences, produced
    /// by walking the block graph backwards.
    pub fn past_language(&self, n: usize) -> BTreeSet<Vec<Letter>> {
        let g = self.essential_graph();
        let mut out = BTreeSet::new();
        for (i, s) in g.states.iter().enumerate() {
            if !g.alive[i] {
                continue;
            }
            // state word read backwards: last letter is x_0
            let mut walk = vec![(i, s.iter().rev().copied().collect::<Vec<_>>())];
            while walk.first().is_some_and(|(_, w)| w.len() < n) {
                let mut next = Vec::new();
                for (j, w) in walk {
                    for &(k, x) in &g.pred[j] {
                        if g.alive[k] {
                            let mut v = w.clone();
                            v.push(x);
                            next.push((k, v));
                        }
                    }
                }
                walk = next;
            }
            out.extend(walk.into_iter().map(|(_, w)| w[..n].to_vec()));
        }
        out
    }

    pub fn parse_biseq(&self, s: &str) -> Result<BiSeq> {
        BiSeq::parse(self, s)
    }
}

struct BlockGraph {
    states: Vec<Vec<Letter>>,
    succ: Vec<Vec<(usize, Letter)>>,
    pred: Vec<Vec<(usize, Letter)>>,
    alive: Vec<bool>,
}

/// Two-sided sequence: `left[i] = x_{−i}`, `right[i] = x_i`, both infinite,
/// with `left[0] = right[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BiSeq {
    pub left: EvPeriodicWord,
    pub right: EvPeriodicWord,
}

impl BiSeq {
    pub fn new(s: &SftSystem, left: EvPeriodicWord, right: EvPeriodicWord) -> Result<Self> {
        if left.is_finite() || right.is_finite() {
            return invalid("both halves of a two-sided sequence must be infinite");
        }
        if left.letter(0) != right.letter(0) {
            return invalid("left and right halves disagree at coordinate 0");
        }
        let b = BiSeq { left, right };
        if !b.admissible(s) {
            return invalid(format!("sequence {} contains a prohibited word", b.format(s.alphabet())));
        }
        Ok(b)
    }

    pub fn at(&self, k: i64) -> Letter {
        if k >= 0 {
            self.right.letter(k as usize).expect("infinite")
        } else {
            self.left.letter((-k) as usize).expect("infinite")
        }
    }

    /// Coordinates `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Letter> {
        (lo..=hi).map(|k| self.at(k)).collect()
    }

    /// Every factor lies in a window covering both preperiods, one period on
    /// each side and the memory.
    pub fn admissible(&self, s: &SftSystem) -> bool {
        let m = s.memory() as i64;
        let l = (self.left.pre().len() + self.left.period().len()) as i64 + m;
        let r = (self.right.pre().len() + self.right.period().len()) as i64 + m;
        s.admissible(&self.window(-l, r))
    }

    /// `σ(x)_n = x_{n+1}`.
    pub fn shift(&self) -> BiSeq {
        BiSeq { left: self.left.prepend(&[self.at(1)]), right: self.right.tail(1) }
    }

    pub fn unshift(&self) -> BiSeq {
        BiSeq { left: self.left.tail(1), right: self.right.prepend(&[self.at(-1)]) }
    }

    /// `past.future` with the coordinate-0 letter first in `future`; each side
    /// is `pre(period)`, and the past is written in reading order
    /// (`… x_{−2} x_{−1}`), e.g. `(0)1.(01)`.
    pub fn parse(s: &SftSystem, text: &str) -> Result<Self> {
        let (past, future) = text.split_once('.').ok_or_else(|| Error::Invalid(format!("missing '.' in {text}")))?;
        let right = EvPeriodicWord::parse(s.alphabet(), future)?;
        // the past is written left to right as period^∞ · pre
        let (per, pre) = match past.find(')') {
            Some(i) => {
                let p = past[..=i].trim().strip_prefix('(').ok_or_else(|| Error::Invalid(format!("past {past} must start with a period")))?;
                (parse_letters(s.alphabet(), p.trim_end_matches(')'))?, parse_letters(s.alphabet(), &past[i + 1..])?)
            }
            None => return invalid(format!("past {past} must be eventually periodic")),
        };
        if per.is_empty() {
            return invalid("period must be nonempty");
        }
        let x0 = right.letter(0).ok_or_else(|| Error::Invalid("empty future".into()))?;
        let mut lpre = vec![x0];
        lpre.extend(pre.iter().rev());
        let lper: Vec<Letter> = per.iter().rev().copied().collect();
        Self::new(s, EvPeriodicWord::new(lpre, lper), right)
    }

    pub fn format(&self, alphabet: &[String]) -> String {
        let past = self.left.tail(1);
        let pre: Vec<Letter> = past.pre().iter().rev().copied().collect();
        let per: Vec<Letter> = past.period().iter().rev().copied().collect();
        format!("({}){}.{}", format_letters(alphabet, &per), format_letters(alphabet, &pre), self.right.format(alphabet))
    }
}

/// Agreement window needed for `[x, y]` to be admissible: coordinates
/// `0..=memory−2`.
pub fn chart_window(s: &SftSystem) -> i64 {
    s.memory() as i64 - 2
}

pub fn same_chart(s: &SftSystem, x: &BiSeq, y: &BiSeq) -> bool {
    (0..=chart_window(s)).all(|k| x.at(k) == y.at(k))
}

/// `[x, y]`: the future of `x` and the past of `y`.
pub fn splice(s: &SftSystem, x: &BiSeq, y: &BiSeq) -> Result<BiSeq> {
    if !same_chart(s, x, y) {
        return precondition(format!("sequences disagree on coordinates 0..={}", chart_window(s)));
    }
    Ok(BiSeq { left: y.left.clone(), right: x.right.clone() })
}

/// Stable plaque membership: `y` shares the future of `x`.
pub fn in_stable_plaque(x: &BiSeq, y: &BiSeq) -> bool {
    x.right == y.right
}

pub fn in_unstable_plaque(x: &BiSeq, y: &BiSeq) -> bool {
    x.left == y.left
}

/// Largest `n ≤ horizon` with `x_k = y_k` for all `|k| < n`.
pub fn fried_logscale(x: &BiSeq, y: &BiSeq, horizon: usize) -> usize {
    let first = |a: &EvPeriodicWord, b: &EvPeriodicWord| (0..horizon).find(|&k| a.letter(k) != b.letter(k)).unwrap_or(horizon);
    first(&x.right, &y.right).min(first(&x.left, &y.left))
}

/// Eventually periodic admissible sequences with short preperiods and periods.
pub fn sample_biseqs(s: &SftSystem, max_pre: usize, max_period: usize) -> Vec<BiSeq> {
    let mut halves: BTreeSet<EvPeriodicWord> = BTreeSet::new();
    for p in 1..=max_period {
        for per in s.language(p) {
            let mut cyc = per.clone();
            cyc.extend(&per);
            cyc.extend(&per);
            if !s.admissible(&cyc) {
                continue;
            }
            for q in 0..=max_pre {
                for pre in s.language(q) {
                    let w = EvPeriodicWord::new(pre, per.clone());
                    if s.admissible_ev(&w) {
                        halves.insert(w);
                    }
                }
            }
        }
    }
    let halves: Vec<EvPeriodicWord> = halves.into_iter().collect();
    let mut out = HashSet::new();
    for r in &halves {
        for l in &halves {
            if l.letter(0) == r.letter(0) {
                let b = BiSeq { left: l.clone(), right: r.clone() };
                if b.admissible(s) {
                    out.insert(b);
                }
            }
        }
    }
    let mut v: Vec<BiSeq> = out.into_iter().collect();
    v.sort();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityLevel {
    pub length: usize,
    pub past_words: usize,
    pub dual_words: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub horizon: usize,
    pub prohibited: Vec<String>,
    pub dual_prohibited: Vec<String>,
    pub levels: Vec<DualityLevel>,
    pub passed: bool,
    /// `(side, word)` for the first word found in only one language.
    pub mismatch: Option<(String, String)>,
}

/// Compares the past projection of the two-sided shift, read from
/// coordinate 0 backwards, with the language of the dual shift, for every
/// length up to `horizon`.
pub fn duality_witness(s: &SftSystem, horizon: usize) -> DualityReport {
    let dual = s.dual();
    let mut levels = Vec::new();
    let mut mismatch = None;
    for n in 1..=horizon {
        let past = s.past_language(n);
        let forward = dual.central_language(n);
        let equal = past == forward;
        if !equal && mismatch.is_none() {
            mismatch = past
                .difference(&forward)
                .next()
                .map(|w| ("past-only".to_string(), format_letters(s.alphabet(), w)))
                .or_else(|| forward.difference(&past).next().map(|w| ("dual-only".to_string(), format_letters(s.alphabet(), w))));
        }
        levels.push(DualityLevel { length: n, past_words: past.len(), dual_words: forward.len(), equal });
    }
    DualityReport {
        horizon,
        prohibited: s.prohibited_strs(),
        dual_prohibited: dual.prohibited_strs(),
        passed: levels.iter().all(|l| l.equal),
        levels,
        mismatch,
    }
}
