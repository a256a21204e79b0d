//! Finite and eventually periodic words over a finite alphabet.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Letter = u8;

/// `pre · period^∞`, or the finite word `pre` when `period` is empty.
///
/// Stored in canonical form: the period is primitive and the preperiod is as
/// short as possible, so structural equality is equality of words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvPeriodicWord {
    pre: Vec<Letter>,
    period: Vec<Letter>,
}

impl EvPeriodicWord {
    pub fn new(pre: Vec<Letter>, period: Vec<Letter>) -> Self {
        let mut w = EvPeriodicWord { pre, period };
        w.normalize();
        w
    }

    pub fn finite(w: Vec<Letter>) -> Self {
        EvPeriodicWord { pre: w, period: Vec::new() }
    }

    pub fn periodic(period: Vec<Letter>) -> Self {
        Self::new(Vec::new(), period)
    }

    fn normalize(&mut self) {
        let p = self.period.len();
        if p == 0 {
            return;
        }
        if let Some(q) = (1..=p).find(|&q| p.is_multiple_of(q) && (q..p).all(|i| self.period[i] == self.period[i - q])) {
            self.period.truncate(q);
        }
        while let (Some(&a), Some(&b)) = (self.pre.last(), self.period.last()) {
            if a != b {
                break;
            }
            self.pre.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn canonical(&self) -> Self {
        self.clone()
    }

    pub fn pre(&self) -> &[Letter] {
        &self.pre
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Length of a finite word; `None` for infinite ones.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.pre.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn letter(&self, i: usize) -> Option<Letter> {
        if i < self.pre.len() {
            Some(self.pre[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.pre.len()) % self.period.len()])
        }
    }

    /// First `n` letters (fewer for short finite words).
    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        (0..n).map_while(|i| self.letter(i)).collect()
    }

    /// The word with its first `k` letters removed.
    pub fn tail(&self, k: usize) -> Self {
        if k <= self.pre.len() {
            return Self::new(self.pre[k..].to_vec(), self.period.clone());
        }
        if self.period.is_empty() {
            return Self::finite(Vec::new());
        }
        let mut p = self.period.clone();
        let shift = (k - self.pre.len()) % p.len();
        p.rotate_left(shift);
        Self::new(Vec::new(), p)
    }

    pub fn prepend(&self, x: &[Letter]) -> Self {
        let mut pre = x.to_vec();
        pre.extend_from_slice(&self.pre);
        Self::new(pre, self.period.clone())
    }

    /// Parses `pre(period)` or a finite word.
    pub fn parse(alphabet: &[String], s: &str) -> Result<Self> {
        let s = s.trim();
        match s.find('(') {
            None => Ok(Self::finite(parse_letters(alphabet, s)?)),
            Some(i) => {
                let rest = s[i + 1..].strip_suffix(')').ok_or_else(|| Error::Invalid(format!("unbalanced period in {s}")))?;
                let period = parse_letters(alphabet, rest)?;
                if period.is_empty() {
                    return invalid("period must be nonempty");
                }
                Ok(Self::new(parse_letters(alphabet, &s[..i])?, period))
            }
        }
    }

    pub fn format(&self, alphabet: &[String]) -> String {
        let mut s = format_letters(alphabet, &self.pre);
        if !self.period.is_empty() {
            s.push('(');
            s.push_str(&format_letters(alphabet, &self.period));
            s.push(')');
        }
        s
    }
}

fn single_chars(alphabet: &[String]) -> bool {
    alphabet.iter().all(|a| a.chars().count() == 1)
}

/// Letters are single characters when the alphabet allows, otherwise
/// separated by whitespace or commas.
pub fn parse_letters(alphabet: &[String], s: &str) -> Result<Vec<Letter>> {
    let find = |t: &str| alphabet.iter().position(|a| a == t).map(|i| i as Letter).ok_or_else(|| Error::Invalid(format!("unknown letter {t:?}")));
    if single_chars(alphabet) {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| find(&c.to_string())).collect()
    } else {
        s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(find).collect()
    }
}

pub fn format_letters(alphabet: &[String], w: &[Letter]) -> String {
    let parts: Vec<&str> = w.iter().map(|&x| alphabet[x as usize].as_str()).collect();
    if single_chars(alphabet) {
        parts.concat()
    } else {
        parts.join(" ")
    }
}
