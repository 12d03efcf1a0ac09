//! Classical quartic Hamiltonian `H = (p1^2 + p2^2 + q1^2 q2^2) / 2` under the
//! kick-drift-kick leapfrog.

use serde::{Deserialize, Serialize};

use crate::analysis::drift::DriftReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalState {
    pub q: [f64; 2],
    pub p: [f64; 2],
    #[serde(default)]
    pub t: f64,
}

impl ClassicalState {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        Self {
            q: [q1, q2],
            p: [p1, p2],
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|x| x.is_finite()) && self.t.is_finite()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q[0], self.q[1], self.p[0], self.p[1]]
    }
}

pub fn classical_energy(s: &ClassicalState) -> f64 {
    let [q1, q2] = s.q;
    let [p1, p2] = s.p;
    0.5 * (p1 * p1 + p2 * p2 + q1 * q1 * q2 * q2)
}

fn grad_v(q: [f64; 2]) -> [f64; 2] {
    [q[0] * q[1] * q[1], q[0] * q[0] * q[1]]
}

pub fn leapfrog_step(s: &ClassicalState, dt: f64) -> ClassicalState {
    let half = 0.5 * dt;
    let g = grad_v(s.q);
    let p = [s.p[0] - half * g[0], s.p[1] - half * g[1]];
    let q = [s.q[0] + dt * p[0], s.q[1] + dt * p[1]];
    let g = grad_v(q);
    ClassicalState {
        q,
        p: [p[0] - half * g[0], p[1] - half * g[1]],
        t: s.t + dt,
    }
}

/// Leapfrog trajectory from `ic`, sampling the energy every `sample_every`
/// steps and at the last step.
pub fn classical_drift_experiment(
    ic: &ClassicalState,
    dt: f64,
    steps: usize,
    sample_every: usize,
) -> Result<DriftReport> {
    if steps == 0 || sample_every == 0 {
        return Err(Error::invalid("steps and sample_every must be >= 1"));
    }
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be finite and nonzero, got {dt}")));
    }
    if !ic.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let mut report = DriftReport {
        scheme: "leapfrog".into(),
        model: "quartic-classical".into(),
        dt,
        classical: true,
        times: vec![ic.t],
        energy: vec![classical_energy(ic)],
        norm: Vec::new(),
        fidelity: Vec::new(),
        halted_at: None,
    };
    let mut s = *ic;
    for k in 1..=steps {
        s = leapfrog_step(&s, dt);
        if !s.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        if k % sample_every == 0 || k == steps {
            report.times.push(ic.t + k as f64 * dt);
            report.energy.push(classical_energy(&s));
        }
    }
    Ok(report)
}
