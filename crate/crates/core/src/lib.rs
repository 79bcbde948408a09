//! Exact solution spaces of `{g,h}`-derivations and Jordan
//! `{g,h}`-derivations on the matrix algebras `T_n` and `M_n`.
//!
//! A triple of linear maps `(f, g, h)` on a unital algebra `A` is a
//! `{g,h}`-derivation when
//!
//! ```text
//! f(xy) = g(x)y + x h(y) = h(x)y + x g(y)      for all x, y
//! ```
//!
//! and a Jordan `{g,h}`-derivation when
//!
//! ```text
//! f(x∘y) = g(x)∘y + x∘h(y)                     for all x, y,  x∘y = xy + yx.
//! ```
//!
//! Both conditions are linear in `(f, g, h)`, so the set of solutions is a
//! subspace of triple-space. [`solver`] assembles the constraints over basis
//! pairs and computes exact null spaces; [`oracle`] holds independent
//! element-level checkers and a dense eliminator used to validate them.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod linmap;
pub mod oracle;
pub mod scalar;
pub mod solver;

pub use algebra::{build_mn, build_tn, jordan_product, multiply, Algebra, AlgebraSpec, Element};
pub use error::{Error, Result};
pub use linmap::{inner_derivation, jordan_mult_operator, DerivationTriple, LinearMap};
pub use scalar::{Scalar, ScalarDomain};
pub use solver::{assemble, compare, null_space, ConstraintSystem, Mode, Relation, SolutionSpace};
