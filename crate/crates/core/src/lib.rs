//! Gelfand-Zeitlin integrable systems on so(n) and gl(n).

pub mod algebra;
pub mod error;
pub mod fibres;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod nilfibre;
pub mod pfaffian;
pub mod regularity;
pub mod sampling;
pub mod strata;
pub mod suite;

pub use algebra::{Algebra, AlgebraContext, Family, Root};
pub use error::{GzError, Result};
pub use linalg::{CMat, CVec, C64};
