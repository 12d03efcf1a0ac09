//! Energy-drift experiments: evolve a state under a scheme and under the exact
//! propagator side by side and record `<H>`, norm and fidelity.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::SplitHamiltonian;
use crate::operator::{energy_expectation, StateVector};
use crate::schemes::{Integrator, Propagator};

/// Number formatting for CSV output: 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub scheme: String,
    pub model: String,
    pub dt: f64,
    pub classical: bool,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Empty for classical runs.
    pub norm: Vec<f64>,
    /// `|<psi_exact|psi>|^2 / (|psi_exact|^2 |psi|^2)`; empty for classical runs.
    pub fidelity: Vec<f64>,
    /// Step at which a non-unitary run overflowed and recording stopped.
    pub halted_at: Option<usize>,
}

impl DriftReport {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial_energy(&self) -> f64 {
        self.energy[0]
    }

    /// `max_t |E(t) - E(0)|`.
    pub fn max_energy_deviation(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }

    /// `|E(t) - E(0)| / |E(0)|` per sample.
    pub fn relative_energy_error(&self) -> Vec<f64> {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs() / e0.abs()).collect()
    }

    /// `max_t | |psi(t)| - 1 |`.
    pub fn max_norm_deviation(&self) -> f64 {
        self.norm.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Equal column lengths, increasing times and fidelity at most one.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.times.len();
        let cols_ok = self.energy.len() == n
            && (self.classical || (self.norm.len() == n && self.fidelity.len() == n));
        if !cols_ok {
            return Err(Error::invalid("drift report columns differ in length"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("drift report times are not strictly increasing"));
        }
        if self.fidelity.iter().any(|&f| f > 1.0 + 1e-12) {
            return Err(Error::invalid("fidelity exceeds one"));
        }
        Ok(())
    }

    pub fn csv_header(&self) -> &'static str {
        if self.classical {
            "time,energy,relative_energy_error,classical"
        } else {
            "time,energy,norm,fidelity"
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        if self.classical {
            for (i, rel) in self.relative_energy_error().iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},true",
                    fmt_f64(self.times[i]),
                    fmt_f64(self.energy[i]),
                    fmt_f64(*rel)
                )?;
            }
        } else {
            for i in 0..self.len() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_f64(self.times[i]),
                    fmt_f64(self.energy[i]),
                    fmt_f64(self.norm[i]),
                    fmt_f64(self.fidelity[i])
                )?;
            }
        }
        Ok(())
    }
}

fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    let overlap = a.inner(b).norm_sqr();
    let denom = a.norm().powi(2) * b.norm().powi(2);
    overlap / denom
}

/// Runs `integrator` and the exact propagator from `psi0` for `steps` steps,
/// sampling every `sample_every` steps (and at the final step).
///
/// Unitary runs fail on a non-finite state; non-unitary runs stop recording
/// and set [`DriftReport::halted_at`].
pub fn drift_experiment(
    integrator: &Integrator,
    split: &SplitHamiltonian,
    dt: f64,
    psi0: &StateVector,
    steps: usize,
    sample_every: usize,
    model_id: &str,
) -> Result<DriftReport> {
    if psi0.dim() != split.dim() {
        return Err(Error::DimensionMismatch {
            context: "drift_experiment",
            left: split.dim(),
            right: psi0.dim(),
        });
    }
    if steps == 0 || sample_every == 0 {
        return Err(Error::invalid("steps and sample_every must be >= 1"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let h = split.total();
    let scheme = Propagator::new(integrator, split, dt)?;
    // an exact run is its own reference
    let exact = match integrator {
        Integrator::Exact => None,
        _ => Some(Propagator::new(&Integrator::Exact, split, dt)?),
    };

    let mut report = DriftReport {
        scheme: scheme.name().to_string(),
        model: model_id.to_string(),
        dt,
        classical: false,
        times: vec![0.0],
        energy: vec![energy_expectation(h, psi0)?],
        norm: vec![psi0.norm()],
        fidelity: vec![1.0],
        halted_at: None,
    };
    let mut v = psi0.amplitudes().clone();
    let mut ve = psi0.amplitudes().clone();
    for k in 1..=steps {
        v = scheme.step(&v);
        ve = match &exact {
            Some(p) => p.step(&ve),
            None => v.clone(),
        };
        if k % sample_every != 0 && k != steps {
            continue;
        }
        let psi = StateVector::from_raw(v.clone());
        let norm = psi.norm();
        if !psi.is_finite() || !norm.is_finite() {
            if integrator.is_unitary() {
                return Err(Error::NonFinite { step: k });
            }
            report.halted_at = Some(k);
            break;
        }
        let psi_exact = StateVector::from_raw(ve.clone());
        report.times.push(k as f64 * dt);
        report.energy.push(energy_expectation(h, &psi)?);
        report.norm.push(norm);
        report.fidelity.push(fidelity(&psi_exact, &psi));
    }
    Ok(report)
}
