//! Empirical convergence order from a `dt` ladder.

use std::io::{self, Write};

use serde::Serialize;

use super::drift::fmt_f64;
use super::fit::linear_fit;
use crate::error::{Error, Result};
use crate::models::SplitHamiltonian;
use crate::operator::{c, energy_expectation, StateVector};
use crate::schemes::{Integrator, Propagator};

/// Errors below this are roundoff and excluded from fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Ladder points dropped for sitting below the roundoff floor.
    pub excluded: usize,
}

impl OrderEstimate {
    /// Log-log least squares over the points with `error >= floor`.
    pub fn fit(dts: &[f64], errors: &[f64], floor: f64) -> Result<Self> {
        if dts.len() != errors.len() {
            return Err(Error::DimensionMismatch {
                context: "OrderEstimate::fit",
                left: dts.len(),
                right: errors.len(),
            });
        }
        let (kept_dts, kept_errors): (Vec<f64>, Vec<f64>) = dts
            .iter()
            .zip(errors)
            .filter(|(_, &e)| e >= floor && e.is_finite())
            .map(|(&d, &e)| (d, e))
            .unzip();
        if kept_dts.len() < 3 {
            return Err(Error::InsufficientData {
                usable: kept_dts.len(),
                required: 3,
            });
        }
        let lx: Vec<f64> = kept_dts.iter().map(|d| d.ln()).collect();
        let ly: Vec<f64> = kept_errors.iter().map(|e| e.ln()).collect();
        let fit = linear_fit(&lx, &ly)?;
        Ok(Self {
            excluded: dts.len() - kept_dts.len(),
            dts: kept_dts,
            errors: kept_errors,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub scheme: String,
    pub horizon: f64,
    pub dts: Vec<f64>,
    /// `|psi_scheme(T) - psi_exact(T)|` per ladder point.
    pub state_errors: Vec<f64>,
    /// `|<H>(T) - <H>(0)|` per ladder point.
    pub energy_errors: Vec<f64>,
    pub state: OrderEstimate,
    /// `None` when fewer than three energy errors clear the roundoff floor.
    pub energy: Option<OrderEstimate>,
}

impl OrderReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "dt,state_error,energy_error")?;
        for i in 0..self.dts.len() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(self.dts[i]),
                fmt_f64(self.state_errors[i]),
                fmt_f64(self.energy_errors[i])
            )?;
        }
        Ok(())
    }
}

/// Measures global error at horizon `T` for each `dt` of a strictly decreasing
/// ladder (at least four points, each dividing `T`).
pub fn observed_order(
    integrator: &Integrator,
    split: &SplitHamiltonian,
    psi0: &StateVector,
    dts: &[f64],
    horizon: f64,
) -> Result<OrderReport> {
    if dts.len() < 4 {
        return Err(Error::InsufficientData {
            usable: dts.len(),
            required: 4,
        });
    }
    if dts.iter().any(|&d| !(d > 0.0) || !d.is_finite()) || dts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("dt ladder must be positive and strictly decreasing"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if psi0.dim() != split.dim() {
        return Err(Error::DimensionMismatch {
            context: "observed_order",
            left: split.dim(),
            right: psi0.dim(),
        });
    }
    let h = split.total();
    let spectral = h.spectral()?;
    let v = &spectral.vectors;
    let coeffs = v.adjoint() * psi0.amplitudes();
    let rotated = coeffs.zip_map(&spectral.values, |a, l| a * c(0.0, -horizon * l).exp());
    let exact = StateVector::from_raw(v * rotated);
    let e0 = energy_expectation(h, psi0)?;

    let mut state_errors = Vec::with_capacity(dts.len());
    let mut energy_errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let steps = (horizon / dt).round();
        if steps < 1.0 || (steps * dt - horizon).abs() > 1e-9 * horizon {
            return Err(Error::invalid(format!(
                "dt {dt} does not divide the horizon {horizon}"
            )));
        }
        let prop = Propagator::new(integrator, split, dt)?;
        let mut a = psi0.amplitudes().clone();
        for _ in 0..steps as usize {
            a = prop.step(&a);
        }
        let psi = StateVector::from_raw(a);
        state_errors.push((psi.amplitudes() - exact.amplitudes()).norm());
        energy_errors.push((energy_expectation(h, &psi)? - e0).abs());
    }
    let state = OrderEstimate::fit(dts, &state_errors, ROUNDOFF_FLOOR)?;
    let energy = OrderEstimate::fit(dts, &energy_errors, ROUNDOFF_FLOOR).ok();
    Ok(OrderReport {
        scheme: integrator.name(),
        horizon,
        dts: dts.to_vec(),
        state_errors,
        energy_errors,
        state,
        energy,
    })
}
