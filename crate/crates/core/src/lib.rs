//! Numerical laboratory for quasinilpotent operators.
//!
//! The central quantity is the exponent
//!
//! ```text
//! k_x = limsup_{λ→0} ln‖(λ−T)^{-1}x‖ / ln‖(λ−T)^{-1}‖
//! ```
//!
//! estimated from finite truncations along radial paths. The crate also
//! builds operators with a prescribed set of exponents and carries closed
//! forms for the Volterra operator that serve as ground truth for its
//! discretization.

pub mod cli;
pub mod error;
pub mod exponent;
pub mod numerics;
pub mod operators;
pub mod resolvent;
pub mod synthesis;
pub mod volterra;

pub use error::{Error, Result};
