//! Parametrized multiple zeta series (PMZS) toolkit.
//!
//! The crate evaluates the series
//!
//! ```text
//! ζ(k₁,…,k_r; α) = Σ_{0 ≤ m₁ < ⋯ < m_r} (α)_{m₁}/m₁! · m_r!/(α)_{m_r} · Π (m_i + α)^{−k_i}
//! ```
//!
//! together with its Γ-weighted sibling ζ̃, computes dual indices, and runs the
//! connector transport that rewrites a one-sided connected sum `Z(k; ∅)` into
//! `Z(∅; k′)` one move at a time, checking every step numerically.
//!
//! Modules:
//! - [`index`]: admissibility, run decomposition, duality, weak compositions
//! - [`special`]: complex log-gamma, polygamma, Pochhammer ratios, connectors
//! - [`series`]: truncated power series in the formal variable `x`
//! - [`zeta`]: nested-sum evaluators, Ohno sums and the Ohno generating function
//! - [`connector`]: connected sums, connector relations and transport traces

pub mod connector;
mod error;
pub mod index;
pub mod literal;
mod model;
pub mod series;
pub mod special;
pub mod summation;
pub mod zeta;

pub use error::{Error, Result};
pub use index::{Composition, Index, Run, RunForm};
pub use num_complex::Complex64;
pub use series::TruncatedSeries;
pub use zeta::{EvalConfig, SeriesWithTail, ValueWithTail};
