//! Exact arithmetic in `ℤ[ω]` with `ω² = pω + q` and in `ℚ(√d)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};

/// Sign of `x + y√d` for `d > 0` not a square.
fn sign_sqrt<T>(x: &T, y: &T, d: &T) -> Ordering
where
    T: Signed + Clone + PartialOrd,
{
    let zero = T::zero();
    let (sx, sy) = (x.partial_cmp(&zero).unwrap(), y.partial_cmp(&zero).unwrap());
    match (sx, sy) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (sx, _) => {
            let xx = x.clone() * x.clone();
            let yy = y.clone() * y.clone() * d.clone();
            let c = xx.partial_cmp(&yy).unwrap();
            if sx == Ordering::Greater {
                c
            } else {
                c.reverse()
            }
        }
    }
}

/// `ℤ[ω]` where `ω` is the larger root of `x² − px − q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadRing {
    pub p: i128,
    pub q: i128,
}

/// `a + bω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Quad {
    pub a: i128,
    pub b: i128,
}

impl Quad {
    pub const ZERO: Quad = Quad { a: 0, b: 0 };
    pub const ONE: Quad = Quad { a: 1, b: 0 };

    pub fn int(a: i128) -> Self {
        Quad { a, b: 0 }
    }
}

impl QuadRing {
    /// `φ² = φ + 1`.
    pub fn golden() -> Self {
        QuadRing { p: 1, q: 1 }
    }

    /// `θ² + bθ + 1 = 0`, real irrational for `|b| > 2`.
    pub fn from_trace(b: i128) -> Result<Self> {
        if b.abs() <= 2 {
            return invalid(format!("need |b| > 2 for an irrational unit, got {b}"));
        }
        Ok(QuadRing { p: -b, q: -1 })
    }

    pub fn discriminant(&self) -> i128 {
        self.p * self.p + 4 * self.q
    }

    pub fn omega(&self) -> Quad {
        Quad { a: 0, b: 1 }
    }

    pub fn add(&self, x: Quad, y: Quad) -> Quad {
        Quad { a: x.a + y.a, b: x.b + y.b }
    }

    pub fn sub(&self, x: Quad, y: Quad) -> Quad {
        Quad { a: x.a - y.a, b: x.b - y.b }
    }

    pub fn neg(&self, x: Quad) -> Quad {
        Quad { a: -x.a, b: -x.b }
    }

    pub fn mul(&self, x: Quad, y: Quad) -> Quad {
        let bb = x.b * y.b;
        Quad { a: x.a * y.a + bb * self.q, b: x.a * y.b + x.b * y.a + bb * self.p }
    }

    pub fn scale(&self, k: i128, x: Quad) -> Quad {
        Quad { a: k * x.a, b: k * x.b }
    }

    /// Inverse of `ω`: from `ω(ω − p) = q` with `q = ±1`.
    pub fn omega_inverse(&self) -> Option<Quad> {
        match self.q {
            1 => Some(Quad { a: -self.p, b: 1 }),
            -1 => Some(Quad { a: self.p, b: -1 }),
            _ => None,
        }
    }

    pub fn pow(&self, x: Quad, x_inv: Quad, k: i64) -> Quad {
        let base = if k < 0 { x_inv } else { x };
        (0..k.unsigned_abs()).fold(Quad::ONE, |acc, _| self.mul(acc, base))
    }

    /// Exact sign of `a + bω`.
    pub fn sign(&self, x: Quad) -> Ordering {
        // 2(a + bω) = (2a + bp) + b√D
        let d = BigInt::from(self.discriminant());
        sign_sqrt(&BigInt::from(2 * x.a + x.b * self.p), &BigInt::from(x.b), &d)
    }

    pub fn cmp(&self, x: Quad, y: Quad) -> Ordering {
        self.sign(self.sub(x, y))
    }

    /// Compares `x` with the rational `num/den`, `den > 0`.
    pub fn cmp_rational(&self, x: Quad, num: i128, den: i128) -> Ordering {
        self.sign(Quad { a: den * x.a - num, b: den * x.b })
    }

    pub fn approx(&self, x: Quad) -> f64 {
        let w = (self.p as f64 + (self.discriminant() as f64).sqrt()) / 2.0;
        x.a as f64 + x.b as f64 * w
    }

    pub fn format(&self, x: Quad, sym: &str) -> String {
        match (x.a, x.b) {
            (a, 0) => a.to_string(),
            (0, 1) => sym.to_string(),
            (0, -1) => format!("-{sym}"),
            (0, b) => format!("{b}{sym}"),
            (a, 1) => format!("{a}+{sym}"),
            (a, -1) => format!("{a}-{sym}"),
            (a, b) if b > 0 => format!("{a}+{b}{sym}"),
            (a, b) => format!("{a}{b}{sym}"),
        }
    }
}

/// `a + b√d` with rational `a`, `b` and squarefree `d > 1` (or `d = 1`, meaning `b = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

fn squarefree_split(d: i64) -> (i64, i64) {
    // d = s² · r with r squarefree
    let mut r = d;
    let mut s = 1;
    let mut f = 2;
    while f * f <= r {
        while r % (f * f) == 0 {
            r /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s, r)
}

impl QSqrt {
    pub fn rational(a: BigRational) -> Self {
        QSqrt { a, b: BigRational::zero(), d: 1 }
    }

    /// `a + b√d`, normalized so that `d` is squarefree.
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Result<Self> {
        if d < 1 {
            return invalid("only real quadratic fields are supported");
        }
        let (s, r) = squarefree_split(d);
        let b = b * BigRational::from_integer(BigInt::from(s));
        if r == 1 {
            return Ok(QSqrt { a: a + b, b: BigRational::zero(), d: 1 });
        }
        Ok(QSqrt { a, b, d: r })
    }

    pub fn ints(a: i64, b: i64, den: i64, d: i64) -> Result<Self> {
        let r = |x: i64| BigRational::new(BigInt::from(x), BigInt::from(den));
        Self::new(r(a), r(b), d)
    }

    fn field(&self, o: &QSqrt) -> i64 {
        if self.b.is_zero() {
            o.d
        } else {
            self.d
        }
    }

    fn check(&self, o: &QSqrt) {
        assert!(self.b.is_zero() || o.b.is_zero() || self.d == o.d, "mixed quadratic fields");
    }

    pub fn add(&self, o: &QSqrt) -> QSqrt {
        self.check(o);
        QSqrt { a: &self.a + &o.a, b: &self.b + &o.b, d: self.field(o) }.tidy()
    }

    pub fn sub(&self, o: &QSqrt) -> QSqrt {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QSqrt {
        QSqrt { a: -&self.a, b: -&self.b, d: self.d }
    }

    pub fn mul(&self, o: &QSqrt) -> QSqrt {
        self.check(o);
        let d = self.field(o);
        let dd = BigRational::from_integer(BigInt::from(d));
        QSqrt { a: &self.a * &o.a + &self.b * &o.b * dd, b: &self.a * &o.b + &self.b * &o.a, d }.tidy()
    }

    pub fn conj(&self) -> QSqrt {
        QSqrt { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn inv(&self) -> Option<QSqrt> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QSqrt { a: c.a / &n, b: c.b / &n, d: self.d }.tidy())
    }

    pub fn div(&self, o: &QSqrt) -> Option<QSqrt> {
        o.inv().map(|i| self.mul(&i))
    }

    fn tidy(self) -> QSqrt {
        if self.b.is_zero() {
            QSqrt { d: 1, ..self }
        } else {
            self
        }
    }

    pub fn sign(&self) -> Ordering {
        sign_sqrt(&self.a, &self.b, &BigRational::from_integer(BigInt::from(self.d)))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn approx(&self) -> f64 {
        let f = |r: &BigRational| r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap();
        f(&self.a) + f(&self.b) * (self.d as f64).sqrt()
    }
}

impl fmt::Display for QSqrt {
    /// `(A+B*sqrt(d))/D` with integers over a common denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let den = num_integer::Integer::lcm(self.a.denom(), self.b.denom());
        let an = self.a.numer() * (&den / self.a.denom());
        let bn = self.b.numer() * (&den / self.b.denom());
        let root = format!("sqrt({})", self.d);
        let bpart = if bn.is_one() {
            root
        } else if (-&bn).is_one() {
            format!("-{root}")
        } else {
            format!("{bn}*{root}")
        };
        let body = if an.is_zero() {
            bpart
        } else if bn.is_positive() {
            format!("{an}+{bpart}")
        } else {
            format!("{an}{bpart}")
        };
        if den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}

impl Serialize for QSqrt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
