//! Self-similar groups given by wreath recursions `g(xw) = y·(g|_x)(w)`.
//!
//! Elements are freely reduced words over the generators and their inverses.
//! The word `[g, h]` is the product `g·h`, acting as `(g·h)(w) = g(h(w))`.
//! Equality of elements is semantic and decided by bisimulation with a budget.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypgraph::{escape, Graph};
use crate::words::{EvPeriodicWord, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub idx: u16,
    pub inv: bool,
}

impl Gen {
    pub fn inverse(self) -> Gen {
        Gen { idx: self.idx, inv: !self.inv }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement {
    word: Vec<Gen>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Vec::new() }
    }

    pub fn from_gens(gens: impl IntoIterator<Item = Gen>) -> Self {
        let mut e = GroupElement::identity();
        for g in gens {
            e.push(g);
        }
        e
    }

    pub fn generator(idx: usize) -> Self {
        GroupElement { word: vec![Gen { idx: idx as u16, inv: false }] }
    }

    fn push(&mut self, g: Gen) {
        if self.word.last() == Some(&g.inverse()) {
            self.word.pop();
        } else {
            self.word.push(g);
        }
    }

    pub fn word(&self) -> &[Gen] {
        &self.word
    }

    pub fn is_identity_word(&self) -> bool {
        self.word.is_empty()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `self · other`.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let mut e = self.clone();
        for &g in &other.word {
            e.push(g);
        }
        e
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { word: self.word.iter().rev().map(|g| g.inverse()).collect() }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(GroupElement::identity(), |acc, _| acc.mul(&base))
    }
}

/// Outcome of a budgeted decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "verdict", content = "witness")]
pub enum Verdict {
    Yes,
    /// A finite word moved by the element.
    No(Vec<Letter>),
    Unknown,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathRecursion {
    alphabet: Vec<String>,
    names: Vec<String>,
    perm: Vec<Vec<Letter>>,
    inv_perm: Vec<Vec<Letter>>,
    sections: Vec<Vec<GroupElement>>,
}

#[derive(Serialize, Deserialize)]
struct AutomatonJson {
    alphabet: Vec<String>,
    generators: BTreeMap<String, BTreeMap<String, (String, Vec<String>)>>,
}

impl WreathRecursion {
    /// `rules[g][x] = (y, section word)`; section words list `(generator, inverse)`.
    pub fn new(alphabet: Vec<String>, names: Vec<String>, rules: Vec<Vec<(Letter, Vec<(usize, bool)>)>>) -> Result<Self> {
        let k = alphabet.len();
        if k == 0 || k > Letter::MAX as usize {
            return invalid("alphabet size out of range");
        }
        if names.len() != rules.len() {
            return invalid("one rule table per generator is required");
        }
        let mut perm = Vec::new();
        let mut inv_perm = Vec::new();
        let mut sections = Vec::new();
        for (g, table) in rules.iter().enumerate() {
            if table.len() != k {
                return invalid(format!("generator {} needs one rule per letter", names[g]));
            }
            let p: Vec<Letter> = table.iter().map(|r| r.0).collect();
            let mut ip = vec![Letter::MAX; k];
            for (x, &y) in p.iter().enumerate() {
                if y as usize >= k || ip[y as usize] != Letter::MAX {
                    return invalid(format!("generator {} does not permute the alphabet", names[g]));
                }
                ip[y as usize] = x as Letter;
            }
            let mut secs = Vec::new();
            for (_, w) in table {
                if let Some(&(h, _)) = w.iter().find(|(h, _)| *h >= names.len()) {
                    return invalid(format!("section references unknown generator {h}"));
                }
                secs.push(GroupElement::from_gens(w.iter().map(|&(h, inv)| Gen { idx: h as u16, inv })));
            }
            perm.push(p);
            inv_perm.push(ip);
            sections.push(secs);
        }
        Ok(WreathRecursion { alphabet, names, perm, inv_perm, sections })
    }

    /// `τ(0w) = 1w`, `τ(1w) = 0τ(w)`.
    pub fn adding_machine() -> Self {
        WreathRecursion::new(bits(), vec!["t".into()], vec![vec![(1, vec![]), (0, vec![(0, false)])]]).expect("valid preset")
    }

    /// `a(0w) = 1w`, `a(1w) = 0b(w)`, `b(0w) = 0w`, `b(1w) = 1a(w)`.
    pub fn basilica() -> Self {
        WreathRecursion::new(
            bits(),
            vec!["a".into(), "b".into()],
            vec![vec![(1, vec![]), (0, vec![(1, false)])], vec![(0, vec![]), (1, vec![(0, false)])]],
        )
        .expect("valid preset")
    }

    /// One generator acting as the identity.
    pub fn trivial() -> Self {
        WreathRecursion::new(bits(), vec!["e".into()], vec![vec![(0, vec![(0, false)]), (1, vec![(0, false)])]]).expect("valid preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "adding-machine" => Some(Self::adding_machine()),
            "basilica" => Some(Self::basilica()),
            "trivial" => Some(Self::trivial()),
            _ => None,
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let a: AutomatonJson = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let names: Vec<String> = a.generators.keys().cloned().collect();
        let letter = |s: &str| a.alphabet.iter().position(|x| x == s).map(|i| i as Letter).ok_or_else(|| Error::Invalid(format!("unknown letter {s}")));
        let mut rules = Vec::new();
        for name in &names {
            let table = &a.generators[name];
            let mut row = Vec::new();
            for x in &a.alphabet {
                let (y, w) = table.get(x).ok_or_else(|| Error::Invalid(format!("generator {name} has no rule for letter {x}")))?;
                let mut sec = Vec::new();
                for tok in w {
                    let (base, inv) = match tok.strip_suffix("^-1") {
                        Some(b) => (b, true),
                        None => (tok.as_str(), false),
                    };
                    let h = names.iter().position(|n| n == base).ok_or_else(|| Error::Invalid(format!("unknown generator {base}")))?;
                    sec.push((h, inv));
                }
                row.push((letter(y)?, sec));
            }
            rules.push(row);
        }
        WreathRecursion::new(a.alphabet.clone(), names, rules)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut generators = BTreeMap::new();
        for (g, name) in self.names.iter().enumerate() {
            let mut table = BTreeMap::new();
            for (x, lx) in self.alphabet.iter().enumerate() {
                let y = self.alphabet[self.perm[g][x] as usize].clone();
                let w = self.sections[g][x].word.iter().map(|h| self.gen_name(*h)).collect();
                table.insert(lx.clone(), (y, w));
            }
            generators.insert(name.clone(), table);
        }
        serde_json::to_value(AutomatonJson { alphabet: self.alphabet.clone(), generators }).expect("serializable")
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.alphabet.len()
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator(&self, name: &str) -> Option<GroupElement> {
        self.names.iter().position(|n| n == name).map(GroupElement::generator)
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.names.len()).map(GroupElement::generator).collect()
    }

    fn gen_name(&self, g: Gen) -> String {
        let n = &self.names[g.idx as usize];
        if g.inv {
            format!("{n}^-1")
        } else {
            n.clone()
        }
    }

    /// Product notation such as `a*b^-1`; `1` for the empty word.
    pub fn display(&self, e: &GroupElement) -> String {
        if e.word.is_empty() {
            return "1".into();
        }
        e.word.iter().map(|&g| self.gen_name(g)).collect::<Vec<_>>().join("*")
    }

    /// Parses `a*b^-1` (or `1`).
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(GroupElement::identity());
        }
        let mut e = GroupElement::identity();
        for tok in s.split('*') {
            let tok = tok.trim();
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let idx = self.names.iter().position(|n| n == base).ok_or_else(|| Error::Invalid(format!("unknown generator {base}")))?;
            e.push(Gen { idx: idx as u16, inv });
        }
        Ok(e)
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>> {
        crate::words::parse_letters(&self.alphabet, s)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        crate::words::format_letters(&self.alphabet, w)
    }

    fn gen_letter(&self, g: Gen, x: Letter) -> (Letter, GroupElement) {
        let i = g.idx as usize;
        if g.inv {
            let pre = self.inv_perm[i][x as usize];
            (pre, self.sections[i][pre as usize].inverse())
        } else {
            (self.perm[i][x as usize], self.sections[i][x as usize].clone())
        }
    }

    /// `(g(x), g|_x)`.
    pub fn act_letter(&self, g: &GroupElement, x: Letter) -> (Letter, GroupElement) {
        let mut c = x;
        let mut parts: Vec<GroupElement> = Vec::with_capacity(g.word.len());
        for &h in g.word.iter().rev() {
            let (y, s) = self.gen_letter(h, c);
            parts.push(s);
            c = y;
        }
        let mut sec = GroupElement::identity();
        for p in parts.iter().rev() {
            sec = sec.mul(p);
        }
        (c, sec)
    }

    /// Image of a finite word together with the section at its end.
    pub fn act_with_section(&self, g: &GroupElement, w: &[Letter]) -> (Vec<Letter>, GroupElement) {
        let mut out = Vec::with_capacity(w.len());
        let mut cur = g.clone();
        for &x in w {
            let (y, s) = self.act_letter(&cur, x);
            out.push(y);
            cur = s;
        }
        (out, cur)
    }

    pub fn act(&self, g: &GroupElement, w: &[Letter]) -> Vec<Letter> {
        self.act_with_section(g, w).0
    }

    /// `g|_v`.
    pub fn section(&self, g: &GroupElement, v: &[Letter]) -> GroupElement {
        self.act_with_section(g, v).1
    }

    /// Action on an eventually periodic word. The states at the start of each
    /// period pass are compared semantically; when one repeats, the image is
    /// eventually periodic. Otherwise the output is the computed prefix,
    /// flagged as truncated.
    pub fn act_periodic(&self, g: &GroupElement, w: &EvPeriodicWord, max_passes: usize, budget: usize) -> (EvPeriodicWord, bool) {
        let (pre_out, mut state) = self.act_with_section(g, w.pre());
        if w.period().is_empty() {
            return (EvPeriodicWord::finite(pre_out), false);
        }
        let mut states = vec![state.clone()];
        let mut blocks: Vec<Vec<Letter>> = Vec::new();
        for _ in 0..max_passes {
            let (blk, next) = self.act_with_section(&state, w.period());
            blocks.push(blk);
            let hit = states.iter().position(|s| *s == next).or_else(|| states.iter().position(|s| self.equal(s, &next, budget).is_yes()));
            if let Some(j) = hit {
                let mut pre = pre_out.clone();
                for b in &blocks[..j] {
                    pre.extend_from_slice(b);
                }
                let period: Vec<Letter> = blocks[j..].concat();
                return (EvPeriodicWord::new(pre, period), false);
            }
            states.push(next.clone());
            state = next;
        }
        let mut pre = pre_out;
        for b in &blocks {
            pre.extend_from_slice(b);
        }
        (EvPeriodicWord::finite(pre), true)
    }

    /// Decides whether `g` acts trivially, exploring the section closure of `g`.
    pub fn is_trivial(&self, g: &GroupElement, budget: usize) -> Verdict {
        let mut seen: HashMap<GroupElement, (Option<usize>, Letter)> = HashMap::new();
        let mut order: Vec<GroupElement> = vec![g.clone()];
        seen.insert(g.clone(), (None, 0));
        let mut q = VecDeque::from([0usize]);
        while let Some(i) = q.pop_front() {
            let s = order[i].clone();
            if s.is_identity_word() {
                continue;
            }
            for x in 0..self.degree() as Letter {
                let (y, t) = self.act_letter(&s, x);
                if y != x {
                    let mut path = vec![x];
                    let mut cur = i;
                    while let (Some(p), l) = seen[&order[cur]] {
                        path.push(l);
                        cur = p;
                    }
                    path.reverse();
                    return Verdict::No(path);
                }
                if !seen.contains_key(&t) {
                    if order.len() >= budget {
                        return Verdict::Unknown;
                    }
                    seen.insert(t.clone(), (Some(i), x));
                    order.push(t);
                    q.push_back(order.len() - 1);
                }
            }
        }
        Verdict::Yes
    }

    /// Semantic equality `g = h`.
    pub fn equal(&self, g: &GroupElement, h: &GroupElement, budget: usize) -> Verdict {
        if g == h {
            return Verdict::Yes;
        }
        self.is_trivial(&g.inverse().mul(h), budget)
    }

    /// Nucleus by iterating section closures of products to a fixed point.
    ///
    /// Starting from the generators, their inverses and the identity, each round
    /// forms products of the current set with itself and the generators, closes
    /// under sections with semantic deduplication, and keeps the elements that
    /// lie on or below a cycle of the section graph. The round whose result
    /// equals its input gives the nucleus.
    pub fn nucleus(&self, budget: usize) -> NucleusResult {
        let mut base: Vec<GroupElement> = vec![GroupElement::identity()];
        for g in self.generators() {
            base.push(g.inverse());
            base.push(g);
        }
        let mut current: Vec<GroupElement> = match self.recurrent_closure(&base, budget) {
            Some(c) => c,
            None => return NucleusResult::NotContracting { explored: budget },
        };
        for _round in 0..64 {
            let mut seeds = current.clone();
            for a in &current {
                for b in current.iter().chain(&base) {
                    seeds.push(a.mul(b));
                }
            }
            let next = match self.recurrent_closure(&seeds, budget) {
                Some(c) => c,
                None => return NucleusResult::NotContracting { explored: budget },
            };
            if next.len() == current.len() && next.iter().all(|e| current.iter().any(|c| self.equal(e, c, budget).is_yes())) {
                return NucleusResult::Nucleus(current);
            }
            current = next;
        }
        NucleusResult::NotContracting { explored: budget }
    }

    /// Section closure of `seeds` up to semantic equality, restricted to the
    /// part reachable from cycles of the section graph.
    fn recurrent_closure(&self, seeds: &[GroupElement], budget: usize) -> Option<Vec<GroupElement>> {
        let mut reps: Vec<GroupElement> = Vec::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut lookup: HashMap<GroupElement, usize> = HashMap::new();
        let mut find_or_add = |e: GroupElement, reps: &mut Vec<GroupElement>, edges: &mut Vec<Vec<usize>>| -> Option<usize> {
            if let Some(&i) = lookup.get(&e) {
                return Some(i);
            }
            for (i, r) in reps.iter().enumerate() {
                match self.equal(&e, r, budget) {
                    Verdict::Yes => {
                        lookup.insert(e, i);
                        return Some(i);
                    }
                    Verdict::Unknown => return None,
                    Verdict::No(_) => {}
                }
            }
            if reps.len() >= budget {
                return None;
            }
            // keep the shortest representative
            reps.push(e.clone());
            edges.push(Vec::new());
            lookup.insert(e, reps.len() - 1);
            Some(reps.len() - 1)
        };
        let mut q = VecDeque::new();
        let mut queued = HashSet::new();
        let mut sorted: Vec<GroupElement> = seeds.to_vec();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        for s in sorted {
            let i = find_or_add(s, &mut reps, &mut edges)?;
            if queued.insert(i) {
                q.push_back(i);
            }
        }
        while let Some(i) = q.pop_front() {
            let e = reps[i].clone();
            for x in 0..self.degree() as Letter {
                let (_, s) = self.act_letter(&e, x);
                let j = find_or_add(s, &mut reps, &mut edges)?;
                edges[i].push(j);
                if queued.insert(j) {
                    q.push_back(j);
                }
            }
        }
        let n = reps.len();
        // nodes on cycles: those reachable from themselves
        let reach_from = |s: usize| -> Vec<bool> {
            let mut seen = vec![false; n];
            let mut st: Vec<usize> = edges[s].clone();
            while let Some(v) = st.pop() {
                if !seen[v] {
                    seen[v] = true;
                    st.extend(edges[v].iter().copied());
                }
            }
            seen
        };
        let mut keep = vec![false; n];
        for s in 0..n {
            let r = reach_from(s);
            if r[s] {
                keep[s] = true;
                for (v, &b) in r.iter().enumerate() {
                    if b {
                        keep[v] = true;
                    }
                }
            }
        }
        Some((0..n).filter(|&i| keep[i]).map(|i| reps[i].clone()).collect())
    }

    /// Labelled Schreier graph on `X^n`.
    pub fn schreier_graph(&self, n: usize) -> SchreierGraph {
        let words = all_words(self.degree(), n);
        let index: HashMap<Vec<Letter>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut edges = Vec::new();
        for (g, name) in self.names.iter().enumerate() {
            let e = GroupElement::generator(g);
            for (i, w) in words.iter().enumerate() {
                let j = index[&self.act(&e, w)];
                edges.push((i, j, name.clone()));
            }
        }
        SchreierGraph { labels: words.iter().map(|w| self.format_word(w)).collect(), words, edges }
    }

    /// Orbit of `w` under the given elements and their inverses.
    pub fn orbit(&self, elems: &[GroupElement], w: &[Letter]) -> Vec<Vec<Letter>> {
        let mut all: Vec<GroupElement> = elems.to_vec();
        all.extend(elems.iter().map(GroupElement::inverse));
        let mut seen: HashSet<Vec<Letter>> = HashSet::from([w.to_vec()]);
        let mut q = VecDeque::from([w.to_vec()]);
        while let Some(v) = q.pop_front() {
            for e in &all {
                let u = self.act(e, &v);
                if seen.insert(u.clone()) {
                    q.push_back(u);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// Search for non-identity nucleus elements whose germ at a periodic point
    /// is non-trivial while the element acts trivially on cylinders arbitrarily
    /// close to it. Finding none is not a proof of Hausdorffness.
    pub fn hausdorff_heuristic(&self, nucleus: &[GroupElement], max_period: usize, depth: usize, budget: usize) -> HausdorffReport {
        let mut suspicious = Vec::new();
        let mut periods = Vec::new();
        for p in 1..=max_period {
            periods.extend(all_words(self.degree(), p));
        }
        for g in nucleus {
            if self.is_trivial(g, budget).is_yes() {
                continue;
            }
            for p in &periods {
                let point = EvPeriodicWord::new(vec![], p.clone());
                let (img, trunc) = self.act_periodic(g, &point, 32, budget);
                if trunc || img != point.canonical() {
                    continue;
                }
                // germ non-trivial: no prefix of the point has a trivial section
                let prefix: Vec<Letter> = point.prefix(depth);
                let germ_trivial = (0..=depth).any(|k| self.is_trivial(&self.section(g, &prefix[..k]), budget).is_yes());
                if germ_trivial {
                    continue;
                }
                // yet trivial on some cylinder inside every tested neighbourhood
                let accumulates = (1..=depth).all(|k| {
                    (1..=depth.min(4)).any(|m| {
                        all_words(self.degree(), m).into_iter().any(|u| {
                            let mut v = prefix[..k].to_vec();
                            v.extend(u);
                            let (img, sec) = self.act_with_section(g, &v);
                            img == v && self.is_trivial(&sec, budget).is_yes()
                        })
                    })
                });
                if accumulates {
                    suspicious.push((self.display(g), self.format_word(p)));
                }
            }
        }
        HausdorffReport { suspicious, complete: false }
    }
}

fn bits() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

/// All words of length `n`, lexicographic.
pub fn all_words(k: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k);
        for w in &out {
            for x in 0..k as Letter {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NucleusResult {
    Nucleus(Vec<GroupElement>),
    NotContracting { explored: usize },
}

impl NucleusResult {
    pub fn elements(&self) -> Option<&[GroupElement]> {
        match self {
            NucleusResult::Nucleus(v) => Some(v),
            NucleusResult::NotContracting { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HausdorffReport {
    /// `(element, period)` pairs that look like non-Hausdorff germs.
    pub suspicious: Vec<(String, String)>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierGraph {
    pub words: Vec<Vec<Letter>>,
    pub labels: Vec<String>,
    /// `(v, s(v), s)`, loops included.
    pub edges: Vec<(usize, usize, String)>,
}

impl SchreierGraph {
    pub fn graph(&self) -> Graph {
        let mut g = Graph::with_labels(self.labels.clone());
        for &(u, v, _) in &self.edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        self.graph().is_connected()
    }

    /// Undirected DOT; each generator edge appears once per pair `{v, s(v)}`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph \"{}\" {{", escape(name));
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label=\"{}\"];", escape(l));
        }
        let mut seen = HashSet::new();
        for (u, v, lab) in &self.edges {
            let key = ((*u).min(*v), (*u).max(*v), lab.clone());
            if seen.insert(key) {
                let _ = writeln!(s, "  {u} -- {v} [label=\"{}\"];", escape(lab));
            }
        }
        s.push_str("}\n");
        s
    }
}
