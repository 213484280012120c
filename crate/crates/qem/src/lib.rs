//! Construction and pointwise verification of quasi-Einstein metrics
//! conformal to Euclidean space.
//!
//! A metric `gbar = phi^{-2} delta` on (a subset of) `R^n` together with a
//! potential `f = -m log u` is *quasi-Einstein* when
//!
//! ```text
//! Ric + Hess f - (1/m) df (x) df = lambda * gbar
//! ```
//!
//! This crate works with the translation-invariant ansatz: `phi` and `u`
//! depend only on `xi = alpha . x` for a unit vector `alpha`. It provides
//!
//! * [`closed_form`] — the explicit families (`m = 2 - n`, the homothetic
//!   line, and the `m = 1` power law);
//! * [`quadrature`] — the implicit-integral families for `m >= 1`, built by
//!   adaptive quadrature and monotone inversion;
//! * [`riccati`] — the reduction chain (third-order equation, `w` and `v`
//!   substitutions, closed-form Riccati solutions) with a numeric oracle;
//! * [`tensor`] — pointwise assembly of all curvature tensors and the
//!   residuals of every identity a solution has to satisfy;
//! * [`fd`] — an independent finite-difference reconstruction of the same
//!   tensors, used to validate the analytic route;
//! * [`report`] — grid drivers aggregating residuals into a
//!   [`ResidualReport`].
//!
//! The walkthrough in `book/` builds from these pieces chapter by chapter;
//! its code blocks compile and run as doc-tests of [`guide`].

pub mod closed_form;
pub mod error;
pub mod fd;
pub mod guide;
pub mod linalg;
pub mod numeric;
pub mod params;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod riccati;
pub mod tensor;

pub use error::{Error, ErrorKind, Result};
pub use linalg::{Christoffel, SymMat};
pub use params::ModelParams;
pub use profile::{Profile1D, ProfileSample};
pub use report::{ResidualReport, DEFAULT_MARGIN};
