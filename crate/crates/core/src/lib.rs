//! Primitivity of binary NZ-matrix sets through the lens of a two-player
//! synchronization game: exact game values over growing product sets,
//! exponents and their approximations, and the associated automata with
//! their reset thresholds.

pub mod approx;
pub mod automata;
pub mod boolmat;
pub mod error;
pub mod families;
pub mod lp;
pub mod rng;
pub mod semigroup;
pub mod spf;

pub use boolmat::{apply_row, bool_product, BinaryMatrix, BinaryVector, MatrixSet};
pub use error::{Error, Result};
pub use lp::{rat, rat_int, LpSolution, PolicyVector, Rational};
pub use semigroup::{HtMatrix, ProductLayer};
pub use spf::{SpfMode, SpfSeries};
