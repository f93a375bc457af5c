//! Arithmetic substrate: extended-precision scalars and log-scaled magnitudes.
//!
//! Norms of resolvents near the origin reach `e^(1/|λ|)`, so every norm leaves
//! this module as a [`LogMagnitude`]. Raw [`Real`]/[`Complex`] values are only
//! used inside kernels whose magnitudes are kept bounded by renormalization.

mod complex;
mod logmag;
mod real;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use complex::Complex;
pub use logmag::{logmag_add, logmag_scale, LogMagnitude, GUARD_BITS};
pub use real::Real;

/// Working precision and iteration controls shared by every numeric routine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrecisionContext {
    pub mantissa_bits: usize,
    pub power_iteration_tol: f64,
    pub max_power_iterations: usize,
    pub seed: u64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: 128,
            power_iteration_tol: 1e-10,
            max_power_iterations: 10_000,
            seed: 0,
        }
    }
}

impl PrecisionContext {
    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 53 {
            return Err(Error::InvalidArgument(format!(
                "mantissa_bits must be at least 53, got {}",
                self.mantissa_bits
            )));
        }
        if !(self.power_iteration_tol > 0.0 && self.power_iteration_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "power_iteration_tol must lie in (0, 1), got {}",
                self.power_iteration_tol
            )));
        }
        if self.max_power_iterations == 0 {
            return Err(Error::InvalidArgument(
                "max_power_iterations must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn bits(&self) -> usize {
        self.mantissa_bits
    }

    pub fn real(&self, x: f64) -> Real {
        Real::from_f64(x, self.mantissa_bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::from_f64(re, im, self.mantissa_bits)
    }
}
