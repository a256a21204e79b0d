//! Symbolic Smale spaces: shifts of finite type with their splice map and
//! duality, limit spaces of contracting groups, and stationary adic systems.
//!
//! The stable plaque of `x` is `{y : y_n = x_n for n ≥ 0}`: the shift
//! `σ(x)_n = x_{n+1}` contracts agreement in the future.

pub mod adic;
pub mod limit;
pub mod sft;

pub use adic::{collatz_wielandt, is_primitive, tile_lengths, AdicSystem, TileLengths};
pub use limit::{cycle_length, gamma_graph, limit_space_gluing, GluingGraph};
pub use sft::{duality_witness, fried_logscale, same_chart, splice, BiSeq, DualityReport, SftSystem};
