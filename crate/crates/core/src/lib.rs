//! Finite-scale computations for hyperbolic groupoids: log-scales, graphs with
//! quasi-cocycles, self-similar groups, Cayley graphs of groupoids of germs and
//! symbolic Smale spaces.

pub mod error;
pub mod germs;
pub mod hypgraph;
pub mod logscale;
pub mod quadratic;
pub mod selfsim;
pub mod smale;
pub mod words;

pub use error::{Error, Result};
pub use hypgraph::{CocycleGraph, Graph};
pub use logscale::{LogScale, MetricTable};
pub use selfsim::{GroupElement, WreathRecursion};
pub use words::{EvPeriodicWord, Letter};
