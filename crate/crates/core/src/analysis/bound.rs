//! Time-step lower bound from balancing `dt^s |H_s|` against `1/dt`.

use crate::error::{Error, Result};

/// `dt = |H_s|^(-1/(s+1))`, the step at which `dt^s |H_s| = 1/dt` (with hbar = 1).
pub fn min_timestep_bound(hs_norm: f64, s: u32) -> Result<f64> {
    if !(hs_norm > 0.0) || !hs_norm.is_finite() {
        return Err(Error::invalid(format!("Hs_norm must be positive, got {hs_norm}")));
    }
    if s == 0 {
        return Err(Error::invalid("order s must be >= 1"));
    }
    Ok(hs_norm.powf(-1.0 / (s as f64 + 1.0)))
}
