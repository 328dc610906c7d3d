//! Floating-point cross-checks in units ħ = μ = q = c = 1.

mod radial;
mod secular;
mod trajectory;
mod tridiag;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use radial::{fock_darwin, radial_spectrum, RadialGrid, RadialSpectrum};
pub use secular::{secular_frequency, SecularOptions, SecularResult};
pub use trajectory::{integrate_trajectory, Trajectory, TrajectoryState};
pub use tridiag::{sturm_count, tridiagonal_lowest};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integration unstable: relative energy drift {0:e} exceeds 1e-3")]
    Instability(f64),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
}

/// Flux fraction `α = qΦ₀/2πcħ` and trap frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericScenario {
    pub alpha: f64,
    pub omega_c: f64,
    pub omega_p: f64,
}

impl Default for NumericScenario {
    fn default() -> Self {
        NumericScenario {
            alpha: 0.25,
            omega_c: 1.0,
            omega_p: 0.5,
        }
    }
}

impl NumericScenario {
    pub fn validate(&self) -> Result<(), NumericError> {
        if !(self.alpha.is_finite() && self.omega_c.is_finite() && self.omega_p.is_finite()) {
            return Err(NumericError::InvalidScenario("non-finite parameter".into()));
        }
        if self.omega_c < 0.0 || self.omega_p < 0.0 {
            return Err(NumericError::InvalidScenario(
                "frequencies must be nonnegative".into(),
            ));
        }
        if self.omega_c == 0.0 && self.omega_p == 0.0 {
            return Err(NumericError::InvalidScenario(
                "no confinement: omega_c = omega_p = 0".into(),
            ));
        }
        Ok(())
    }

    /// `Ω̄ = sqrt(ω_P² + ω_c²/4)`.
    pub fn omega_bar(&self) -> f64 {
        (self.omega_p * self.omega_p + 0.25 * self.omega_c * self.omega_c).sqrt()
    }

    /// Oscillator length `1/sqrt(Ω̄)`.
    pub fn length(&self) -> f64 {
        1.0 / self.omega_bar().sqrt()
    }
}
