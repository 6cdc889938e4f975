//! Truncated Baker–Campbell–Hausdorff algebra, word synthesis, and
//! δ-discretized set arithmetic in small Lie groups.

pub mod constructions;
pub mod delta_sets;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod free_lie;
pub mod group_backends;
pub mod linearize;
pub mod scalar;
pub mod word_synth;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Exact rational coefficients used by the symbolic modules.
pub type Rational = num_rational::BigRational;
/// Free Lie algebra with exact rational coefficients.
pub type LieAlgebra = free_lie::FreeLieAlgebra<Rational>;
/// Element of [`LieAlgebra`].
pub type LieElement = free_lie::FreeLieElement<Rational>;
/// Group element with `f64` coordinates.
pub type Element = group_backends::GroupElement<f64>;
/// Linear map with exact rational entries.
pub type ExactLinearMap = linearize::LinearMap<Rational>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;
