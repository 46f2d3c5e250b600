//! Decision procedures and witness checkers for the free Boolean algebra on
//! binary-tree nodes modulo proper-prefix meets, its eventually periodic set
//! models, and finitely additive measures on them.
//!
//! Exact arithmetic is the default; measure code is generic over [`scalar::Scalar`].

pub mod tree;
pub mod term;
pub mod ep;
pub mod pair;
pub mod scalar;
pub mod separation;
pub mod measures;
pub mod report;
pub mod campaign;
pub mod cli;

/// Exact scalar used by campaigns and the CLI.
pub type Rational = num_rational::BigRational;
/// Finitely additive measure with exact weights.
pub type Measure = measures::FasMeasure<Rational>;
/// Measure family with exact weights.
pub type Family = measures::MeasureFamily<Rational>;

pub use ep::EpSet;
pub use report::Report;
pub use term::Dnf;
pub use tree::TreeNode;
