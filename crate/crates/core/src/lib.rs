//! Rate-distortion-classification (RDC) laboratory.
//!
//! A reconstruction `X̂` of a source `X` is charged three ways: the rate
//! `I(X; X̂)` (nats), the mean squared error `E(X − X̂)²`, and the
//! classification loss `H(S | X̂)` of an associated label `S`. This crate
//! computes the tradeoffs between the three:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`gaussian_model`] | closed-form functionals of jointly Gaussian `(X, S, X̂)` |
//! | [`gaussian_tradeoff`] | `R(D, C)`, `D(C, R)` (printed and oracle), grid oracle, boundary curve |
//! | [`universal`] | one encoder at a rate budget, many linear decoders, rate penalty |
//! | [`discrete`] | finite alphabets: MMSE reduction, Wasserstein-2, outer bound, extreme points |
//! | [`bounds`] | distortion gap / ratio bounds between extreme points |
//! | [`montecarlo`] | seeded sampling and plug-in estimates of the Gaussian closed forms |
//! | [`cli`] | curve records, CSV/JSON emission and the `rdc` subcommands |
//!
//! Every logarithm is natural; every rate and entropy is in nats.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod discrete;
pub mod error;
pub mod gaussian_model;
pub mod gaussian_tradeoff;
pub mod montecarlo;
pub mod universal;

pub use error::{Error, Result};
pub use gaussian_model::{GaussianPairSource, GaussianReconstruction, TradeoffPoint};
pub use gaussian_tradeoff::{Binding, ConstraintSet, FeasibilityVerdict, Status};
pub use universal::{GaussianRepresentation, LinearDecoder};
