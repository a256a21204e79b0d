//! Fixtures shared by the kernel benchmarks.

use hypgrpd_core::germs::{cayley_ball, DyadicAffine, ExpandingShift};
use hypgrpd_core::{CocycleGraph, LogScale};

pub fn doubling_ball(radius: u32) -> CocycleGraph {
    cayley_ball(&ExpandingShift::doubling(), radius, 100).expect("doubling ball").cocycle
}

pub fn dyadic_ball(radius: u32) -> CocycleGraph {
    cayley_ball(&DyadicAffine::new(0), radius, 100).expect("dyadic ball").cocycle
}

/// Common-prefix scale on the binary words of length `bits`, shifted by one.
pub fn prefix_logscale(bits: u32) -> LogScale {
    let n = 1usize << bits;
    let points = (0..n).map(|i| format!("{i:0w$b}", w = bits as usize)).collect();
    LogScale::from_fn(points, |i, j| 1 + ((i ^ j).leading_zeros() - (usize::BITS - bits)) as i64)
}
