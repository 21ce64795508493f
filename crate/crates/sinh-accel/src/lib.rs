//! Sinh-accelerated Fourier inversion.
//!
//! A conformal change of variables ξ = iω₁ + b·sinh(iω + y) bends a flat
//! inversion line into a contour on which the integrand decays
//! double-exponentially, so the simplified trapezoid rule needs a few dozen
//! terms where the flat transform needs millions. The crate wires that idea
//! into probability densities and cumulative distributions of SINH-regular
//! Lévy processes (KoBoL/CGMY, NTS), European option prices in Lévy, Heston,
//! CIR and CIR-subordinated models, quantile evaluation through conformal
//! principal components, and inverse-transform Monte-Carlo simulation.
//!
//! See the `examples/` directory for one runnable walkthrough per capability;
//! the `sinh-accel` binary exposes the same operations as subcommands.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference constants are kept at full printed precision
#![allow(clippy::excessive_precision)]

pub mod baselines;
pub mod cir;
pub mod cli;
pub mod contour;
pub mod error;
pub mod heston;
pub mod levy;
pub mod math;
pub mod mc;
pub mod models;
pub mod quantile;
pub mod subordinated;

pub use contour::{ContourParams, HardyEstimate, SinhRegularType, Tuning};
pub use error::{Result, SinhError};
pub use models::{CharExponent, KoBoLParams, LevyModel, NtsParams};
