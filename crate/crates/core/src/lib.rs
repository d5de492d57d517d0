//! Exact enumerative tools for moduli spaces of genus-zero rubber stable maps
//! to a chain of projective lines, relative to `0` and `∞`.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated power series over exact rationals, partial
//!   exponential Bell polynomials and Faà di Bruno composition.
//! * [`recursion`]: the `ν_k` generating functions, the Euler characteristic
//!   table of the maximally ramified spaces and the differential-equation
//!   residual.
//! * [`trees`]: stable marked trees, ribbon rooted trees and their statistics.
//! * [`strata`]: x-directings, admissible ordered partitions and classes in
//!   the Grothendieck ring (valued in `Z[L]`).
//! * [`chambers`]: the resonance arrangement, chamber signatures and
//!   wall-crossing differences.
//! * [`oracle`]: slow independent enumerations used to cross-check the above.
//!
//! Everything is exact; there is no floating point anywhere in the crate.

pub mod chambers;
pub mod error;
pub mod oracle;
pub mod recursion;
pub mod series;
pub mod strata;
pub mod trees;

pub use error::{Error, Result};
pub use series::{Rational, TruncatedSeries};
pub use strata::{GClass, RamificationDatum};
pub use trees::MarkedTree;
