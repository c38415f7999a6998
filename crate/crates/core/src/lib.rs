//! Fractional truncated Laplacians on radial and general profiles.
//!
//! The crate is organised bottom-up: [`quad`] integrates the hypersingular
//! kernels, [`profiles`] describes radial profiles, [`operators`] evaluates
//! the directional, extremal, plane and local operators, [`exponents`]
//! computes the scalar constants and critical exponents, and [`verify`]
//! runs executable scenario suites.

// NaN must fail parameter checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod exponents;
pub mod operators;
pub mod profiles;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use quad::{FractionalOrder, NormalizationConstants, QuadratureConfig, QuadratureResult};
