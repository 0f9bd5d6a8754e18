//! Reconstruction of the boundary temperature history `h(t) = u(0, t)` of a
//! unit rod from the temperature recorded at an interior point `x0`.
//!
//! The direct problem is solved by a sine series ([`forward`]), discretized
//! into a dense causal matrix ([`operator`]) and inverted by second-order
//! Tikhonov regularization with the discrepancy principle ([`tikhonov`]).
//! [`bound`] evaluates the a-priori logarithmic error estimate and
//! [`experiment`] runs synthetic studies against it.

pub mod bound;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod forward;
pub mod grid;
pub mod operator;
pub mod tikhonov;

pub use error::{Error, Result};
