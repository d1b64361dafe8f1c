//! Mean-value refinements of the Cauchy–Bunyakovskii inequality.
//!
//! Every abstract mean `M` with complement `M*(x,y) = xy / M(x,y)` yields a
//! sandwich
//!
//! ```text
//! (Σ x_k y_k)² ≤ Σ M(x_k,y_k)² · Σ M*(x_k,y_k)² ≤ Σ x_k² · Σ y_k²
//! ```
//!
//! and the same chain for integrals and Jackson q-integrals. This crate
//! evaluates the mean catalog, the chains, the iterative tightening
//! procedure built on them, and the two-sided special-function bounds that
//! fall out (gamma, complete elliptic K, Jacobi theta₃).
//!
//! The crate is `no_std` with `alloc`; floating-point elementary functions
//! come from `libm`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chain;
pub mod complexify;
pub mod discrete;
pub mod error;
pub mod expr;
pub mod integral;
pub mod iterate;
pub mod mean_theory;
pub mod means;
pub mod quadrature;
pub mod sampling;
pub mod special;

mod math;

pub use chain::RefinementChain;
pub use error::{Error, Result};
pub use expr::ExprAst;
pub use integral::Integrand;
pub use iterate::BoundTrace;
pub use means::{eval_mean, MeanKind, PowerOrder, RadoOrder};
pub use quadrature::QuadratureSpec;
