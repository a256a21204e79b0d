use serde::Serialize;

use super::{GermGroupoid, StepKind};
use crate::error::{invalid, Error, Result};
use crate::selfsim::{GroupElement, Verdict, WreathRecursion};
use crate::words::{EvPeriodicWord, Letter};

/// Groupoid generated by a self-similar group and the contractions
/// `T_x: w ↦ xw` on `X^ω`.
#[derive(Clone, Debug)]
pub struct SelfSimilarShift {
    pub rec: WreathRecursion,
    pub base: EvPeriodicWord,
    /// Period passes allowed when acting on eventually periodic words.
    pub passes: usize,
    pub budget: usize,
}

/// Germ at `source` of `v·w ↦ u·g(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SsGerm {
    pub u: Vec<Letter>,
    #[serde(skip)]
    pub g: GroupElement,
    pub v: Vec<Letter>,
    pub source: EvPeriodicWord,
}

impl SelfSimilarShift {
    pub fn new(rec: WreathRecursion, base: EvPeriodicWord) -> Result<Self> {
        if base.is_finite() {
            return invalid("base point must be infinite");
        }
        if base.pre().iter().chain(base.period()).any(|&x| x as usize >= rec.degree()) {
            return invalid("base point uses letters outside the alphabet");
        }
        Ok(SelfSimilarShift { rec, base, passes: 64, budget: 4096 })
    }

    /// Basilica group with `T_0`, `T_1` at `0^∞`.
    pub fn basilica() -> Self {
        SelfSimilarShift::new(WreathRecursion::basilica(), EvPeriodicWord::periodic(vec![0])).expect("valid preset")
    }

    pub fn target(&self, h: &SsGerm) -> Result<EvPeriodicWord> {
        let tail = h.source.tail(h.v.len());
        let (img, truncated) = self.rec.act_periodic(&h.g, &tail, self.passes, self.budget);
        if truncated {
            return Err(Error::Budget(format!("image of {} under {} is not resolved", tail.format(self.rec.alphabet()), self.rec.display(&h.g))));
        }
        Ok(img.prepend(&h.u))
    }

    /// The same germ written with `|v|` increased by one.
    fn extend(&self, h: &SsGerm) -> SsGerm {
        let a = h.source.letter(h.v.len()).expect("infinite source");
        let (y, s) = self.rec.act_letter(&h.g, a);
        let mut u = h.u.clone();
        u.push(y);
        let mut v = h.v.clone();
        v.push(a);
        SsGerm { u, g: s, v, source: h.source.clone() }
    }

    fn extend_to(&self, h: &SsGerm, len_v: usize) -> SsGerm {
        let mut h = h.clone();
        while h.v.len() < len_v {
            h = self.extend(&h);
        }
        h
    }
}

impl GermGroupoid for SelfSimilarShift {
    type Germ = SsGerm;

    fn name(&self) -> String {
        "self-similar-shift".into()
    }

    fn unit(&self) -> SsGerm {
        SsGerm { u: Vec::new(), g: GroupElement::identity(), v: Vec::new(), source: self.base.clone() }
    }

    fn degree(&self, h: &SsGerm) -> i64 {
        h.u.len() as i64 - h.v.len() as i64
    }

    fn steps(&self, h: &SsGerm) -> Result<Vec<(SsGerm, StepKind, String)>> {
        let mut out = Vec::new();
        for (i, s) in self.rec.generators().into_iter().enumerate() {
            let name = &self.rec.names()[i];
            for (e, label) in [(s.clone(), name.clone()), (s.inverse(), format!("{name}^-1"))] {
                let (u, sec) = self.rec.act_with_section(&e, &h.u);
                out.push((SsGerm { u, g: sec.mul(&h.g), v: h.v.clone(), source: h.source.clone() }, StepKind::Level, label));
            }
        }
        for x in 0..self.rec.degree() as Letter {
            let mut u = vec![x];
            u.extend_from_slice(&h.u);
            out.push((SsGerm { u, g: h.g.clone(), v: h.v.clone(), source: h.source.clone() }, StepKind::Up, format!("T_{}", self.rec.alphabet()[x as usize])));
        }
        let e = if h.u.is_empty() { self.extend(h) } else { h.clone() };
        let x = e.u[0];
        out.push((SsGerm { u: e.u[1..].to_vec(), ..e }, StepKind::Down, format!("T_{}^-1", self.rec.alphabet()[x as usize])));
        Ok(out)
    }

    fn compose(&self, g: &SsGerm, h: &SsGerm) -> Result<Option<SsGerm>> {
        if self.target(h)? != g.source {
            return Ok(None);
        }
        let n = g.v.len().max(h.u.len());
        let g = self.extend_to(g, n);
        let mut h = h.clone();
        while h.u.len() < n {
            h = self.extend(&h);
        }
        debug_assert_eq!(g.v, h.u);
        Ok(Some(SsGerm { u: g.u, g: g.g.mul(&h.g), v: h.v, source: h.source }))
    }

    fn inverse(&self, h: &SsGerm) -> Result<SsGerm> {
        Ok(SsGerm { u: h.v.clone(), g: h.g.inverse(), v: h.u.clone(), source: self.target(h)? })
    }

    fn label(&self, h: &SsGerm) -> String {
        let r = &self.rec;
        format!("({}, {}, {})", r.format_word(&h.u), r.display(&h.g), r.format_word(&h.v))
    }

    fn key(&self, h: &SsGerm) -> Result<String> {
        Ok(format!("{}|{}|{}", self.target(h)?.format(self.rec.alphabet()), self.degree(h), h.source.format(self.rec.alphabet())))
    }

    fn keys_canonical(&self) -> bool {
        false
    }

    /// Germs with the same source, target and degree agree iff the germ of
    /// `g₁⁻¹g₂` at the common tail is trivial, i.e. some section along the
    /// tail acts trivially.
    fn germ_equal(&self, g1: &SsGerm, g2: &SsGerm, budget: usize) -> Result<Verdict> {
        if g1 == g2 {
            return Ok(Verdict::Yes);
        }
        if g1.source != g2.source || self.degree(g1) != self.degree(g2) {
            return Ok(Verdict::No(Vec::new()));
        }
        let n = g1.v.len().max(g2.v.len());
        let (e1, e2) = (self.extend_to(g1, n), self.extend_to(g2, n));
        if e1.u != e2.u {
            return Ok(Verdict::No(Vec::new()));
        }
        let tail = g1.source.tail(n);
        if self.target(&e1)? != self.target(&e2)? {
            return Ok(Verdict::No(Vec::new()));
        }
        let rec = &self.rec;
        let mut state = e1.g.inverse().mul(&e2.g);
        let mut marks: Vec<GroupElement> = Vec::new();
        let (pre, per) = (tail.pre().len(), tail.period().len());
        for i in 0..budget {
            let moved = match rec.is_trivial(&state, budget) {
                Verdict::Yes => return Ok(Verdict::Yes),
                Verdict::No(w) => w,
                Verdict::Unknown => return Ok(Verdict::Unknown),
            };
            if i >= pre && (i - pre) % per == 0 {
                if marks.iter().any(|m| rec.equal(m, &state, budget).is_yes()) {
                    return Ok(Verdict::No(e1.v.iter().copied().chain(tail.prefix(i)).chain(moved).collect()));
                }
                marks.push(state.clone());
            }
            let a = tail.letter(i).expect("infinite tail");
            let (b, next) = rec.act_letter(&state, a);
            if b != a {
                return Ok(Verdict::No(e1.v.iter().copied().chain(tail.prefix(i + 1)).collect()));
            }
            state = next;
        }
        Ok(Verdict::Unknown)
    }
}
