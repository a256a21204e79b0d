//! Groupoids of germs at finite scale: normal forms, Cayley balls carrying the
//! degree cocycle, trees of preimages, boundary scales and rotation graphs.
//!
//! In a Cayley ball the arrows descend: the germ `g` points to `s⁻¹·g` for
//! every contracting generator `s`, so `λ = ν` drops by one along each arrow.

mod affine;
mod ball;
mod selfsim_shift;
mod shift;

use std::fmt::Debug;
use std::hash::Hash;

pub use affine::{rotation_orbital_graph, AffineGerm, DyadicAffine, QuadraticAffine, RotationGraph};
pub use ball::{boundary_scale, cayley_ball, degree_cocycle_check, BoundaryScale, CayleyBall, CocycleCheck};
pub use selfsim_shift::{SelfSimilarShift, SsGerm};
pub use shift::{tree_of_preimages, ExpGerm, ExpandingShift, PreimageTree};

use crate::error::Result;
use crate::selfsim::Verdict;

/// How a generator step changes the degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum StepKind {
    /// `s·g` for a contracting generator `s`: degree + 1.
    Up,
    /// `s⁻¹·g`: degree − 1.
    Down,
    /// Degree-preserving generator.
    Level,
}

pub trait GermGroupoid: Sync {
    type Germ: Clone + Debug + Eq + Hash + Send + Sync;

    fn name(&self) -> String;
    /// Unit germ at the base point.
    fn unit(&self) -> Self::Germ;
    fn degree(&self, g: &Self::Germ) -> i64;
    /// Products of generator germs (and inverses) at the target of `g` with `g`.
    fn steps(&self, g: &Self::Germ) -> Result<Vec<(Self::Germ, StepKind, String)>>;
    /// `g·h` when the source of `g` is the target of `h`.
    fn compose(&self, g: &Self::Germ, h: &Self::Germ) -> Result<Option<Self::Germ>>;
    fn inverse(&self, g: &Self::Germ) -> Result<Self::Germ>;
    fn label(&self, g: &Self::Germ) -> String;
    /// Hash key; germs with different keys differ. When `keys_canonical` holds,
    /// equal keys mean equal germs.
    fn key(&self, g: &Self::Germ) -> Result<String>;
    fn keys_canonical(&self) -> bool {
        true
    }
    fn germ_equal(&self, g: &Self::Germ, h: &Self::Germ, budget: usize) -> Result<Verdict>;
}

/// The preset groupoids by name.
pub enum GroupoidSpec {
    Expanding(ExpandingShift),
    Dyadic(DyadicAffine),
    Quadratic(QuadraticAffine),
    SelfSimilar(SelfSimilarShift),
}

pub const PRESETS: [&str; 4] = ["doubling", "dyadic-affine", "golden-rotation", "basilica-shift"];

impl GroupoidSpec {
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "doubling" => Some(GroupoidSpec::Expanding(ExpandingShift::doubling())),
            "dyadic-affine" => Some(GroupoidSpec::Dyadic(DyadicAffine::new(0))),
            "golden-rotation" => Some(GroupoidSpec::Quadratic(QuadraticAffine::golden())),
            "basilica-shift" => Some(GroupoidSpec::SelfSimilar(SelfSimilarShift::basilica())),
            _ => None,
        }
    }
}

/// Runs `$body` with `$g` bound to the concrete groupoid of a `GroupoidSpec`.
#[macro_export]
macro_rules! with_groupoid {
    ($spec:expr, $g:ident => $body:expr) => {
        match $spec {
            $crate::germs::GroupoidSpec::Expanding($g) => $body,
            $crate::germs::GroupoidSpec::Dyadic($g) => $body,
            $crate::germs::GroupoidSpec::Quadratic($g) => $body,
            $crate::germs::GroupoidSpec::SelfSimilar($g) => $body,
        }
    };
}
