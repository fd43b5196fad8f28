//! Spectral shift functions of finite self-adjoint pairs.
//!
//! The spectral shift function `ξ` of a pair `(H0, H1 = H0 + V)` is computed
//! three independent ways:
//!
//! - **counting**: `ξ = N_{H0} − N_{H1}` as an exact integer step function,
//! - **averaging**: `ξ(φ) = ∫₀¹ Tr(V φ(H0 + rV)) dr` by adaptive quadrature in `r`,
//! - **krein**: `π⁻¹ arg det((H1 − z)(H0 − z)⁻¹)` at `z = λ + iε`, `ε → 0`.
//!
//! The [`decomposition`] module models absolutely continuous / singular parts
//! on block-labeled operators, and [`flow`] counts signed eigenvalue
//! crossings along the linear path `H0 + rV`.
//!
//! ```
//! use specshift::{engines, HermitianOperator};
//!
//! let h0 = HermitianOperator::from_real_diagonal(&[0.0]);
//! let h1 = HermitianOperator::from_real_diagonal(&[1.0]);
//! let xi = engines::ssf_counting(&h0, &h1).unwrap();
//! assert_eq!(xi.evaluate(0.5), 1);
//! assert_eq!(xi.evaluate(1.0), 0);
//! ```

// `!(a < b)` rejects NaN along with out-of-order input.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod engines;
mod error;
pub mod flow;
pub mod operator;
pub mod quadrature;
pub mod random;
pub mod step;
pub mod testfn;

pub use decomposition::{Label, LabeledOperator, LabeledPath};
pub use engines::{EngineChoice, KreinSchedule};
pub use error::{Error, Result};
pub use flow::{CrossingEvent, EigenPath};
pub use operator::{EigenSystem, HermitianOperator, PerturbationPath};
pub use step::StepFunction;
pub use testfn::{Family, TestFunction};

pub use nalgebra::Complex;
pub use nalgebra::DMatrix;

/// Complex scalar used for operator entries.
pub type C64 = Complex<f64>;
