//! Finite-field geometry laboratory for dot-product sets on paraboloids.
//!
//! The crate reduces `x · y = x · z` on the paraboloid `P_d ⊂ F_p^d` to
//! isosceles triangles in `F_p^(d-1)`, counts both sides exactly, evaluates the
//! character sums that bound those counts, and builds the extremal sets that
//! keep `∏(E)` small.
//!
//! Modules:
//! - [`field`]: prime-field arithmetic, Legendre symbols, square roots, the additive character.
//! - [`varieties`]: point sets, paraboloids and spheres, the text point-set format.
//! - [`counting`]: `∏(E)`, `D(E)`, `D*(E)`, `M(E)`, the apex map and triangle counts.
//! - [`fourier`]: transforms of indicator functions, `Ŝ₀`, extension ratios, apex spectra.
//! - [`constructions`]: multiplicative subgroups, isotropic frames and small-product sets.
//! - [`oracle`]: definition-literal recomputation of every count and transform.
//! - [`bounds`]: the closed-form right-hand sides the counts are checked against.

pub mod bounds;
pub mod constructions;
pub mod counting;
pub mod error;
pub mod field;
pub mod fourier;
pub mod oracle;
pub mod varieties;

pub use error::{Error, Result};
pub use field::{FieldSpec, FieldVector, Phase, Scalar};
pub use varieties::PointSet;
