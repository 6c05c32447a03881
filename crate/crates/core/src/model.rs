use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::superops::SuperopParams;

/// Frequencies and rates of the dispersive model, in angular-frequency units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Field frequency ν.
    pub nu: f64,
    /// Atomic frequency ω; enters only the lab-frame transformation.
    pub omega: f64,
    /// Dispersive constant χ.
    pub chi: f64,
    /// Field decay rate γ.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(nu: f64, omega: f64, chi: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("nu", nu), ("omega", omega), ("chi", chi), ("gamma", gamma)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("not finite: {v}") });
            }
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("decay rate must be non-negative, got {gamma}"),
            });
        }
        Ok(Self { nu, omega, chi, gamma })
    }

    /// `β = γ + iχ`.
    pub fn beta(&self) -> C64 {
        C64::new(self.gamma, self.chi)
    }

    pub fn superop(&self) -> SuperopParams {
        SuperopParams { chi: self.chi, gamma: self.gamma }
    }
}
