//! Shadow Hamiltonians of composition schemes.
//!
//! A unitary scheme's one-step map equals `exp(-i dt H~(dt))` for an effective
//! Hamiltonian `H~ = H + sum_n dt^n H_n`. Two independent routes compute it:
//!
//! * [`shadow_hamiltonian`] composes the stage generators with the truncated
//!   BCH formula on power series in `dt`, which separates the `H_n` exactly.
//! * [`shadow_from_log_ladder`] takes the matrix logarithm of the step at
//!   several `dt` values and fits a matrix polynomial in `dt`.

use nalgebra::DMatrix;

use super::bch::{bch_generic, DtSeries, MAX_BCH_ORDER};
use crate::error::{Error, Result};
use crate::models::SplitHamiltonian;
use crate::operator::{logm_normal, r, CMatrix, HermitianOperator, BRANCH_MARGIN, I};
use crate::schemes::{composition_step, CompositionScheme, StepOperator};

/// Hermiticity tolerance for extracted correction terms.
pub const CORRECTION_HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Correction {
    pub order: u32,
    pub term: HermitianOperator,
}

#[derive(Debug, Clone)]
pub struct ShadowHamiltonian {
    pub base: HermitianOperator,
    pub corrections: Vec<Correction>,
    pub truncation: usize,
    pub dt: f64,
}

impl ShadowHamiltonian {
    pub fn correction(&self, order: u32) -> Option<&HermitianOperator> {
        self.corrections
            .iter()
            .find(|c| c.order == order)
            .map(|c| &c.term)
    }

    /// Lowest correction order whose Frobenius norm exceeds `tol * max(1, |H|_F)`.
    pub fn leading_order(&self, tol: f64) -> Option<u32> {
        let scale = tol * self.base.frobenius_norm().max(1.0);
        self.corrections
            .iter()
            .find(|c| c.term.frobenius_norm() > scale)
            .map(|c| c.order)
    }

    /// `H + sum_n dt^n H_n` at the stored `dt`.
    pub fn evaluate(&self) -> CMatrix {
        let mut m = self.base.matrix().clone();
        for c in &self.corrections {
            m += c.term.matrix() * r(self.dt.powi(c.order as i32));
        }
        m
    }

    /// `-i dt H~`, directly comparable with `log(step)`.
    pub fn generator(&self) -> CMatrix {
        self.evaluate() * (-I * self.dt)
    }
}

/// Power series `Z(dt)` with `prod_k exp(-i dt c_k A_k) = exp(Z(dt))`, exact
/// through degree `truncation`.
pub fn bch_generator(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    truncation: usize,
) -> Result<DtSeries> {
    if truncation == 0 || truncation > MAX_BCH_ORDER {
        return Err(Error::UnsupportedOrder {
            order: truncation,
            max: MAX_BCH_ORDER,
        });
    }
    if split.num_parts() != scheme.num_parts() {
        return Err(Error::invalid(format!(
            "scheme {} expects {} parts, split has {}",
            scheme.name(),
            scheme.num_parts(),
            split.num_parts()
        )));
    }
    let stage = |k: usize| {
        let s = scheme.stages()[k];
        DtSeries::linear(split.part(s.part).matrix() * (-I * s.coeff), truncation)
    };
    let mut z = stage(0);
    for k in 1..scheme.stages().len() {
        z = bch_generic(&z, &stage(k), truncation)?;
    }
    Ok(z)
}

/// Correction terms `H_1..H_{truncation-1}` from the BCH route.
pub fn bch_corrections(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    truncation: usize,
) -> Result<Vec<Correction>> {
    let z = bch_generator(scheme, split, truncation)?;
    let dim = split.dim();
    (1..truncation)
        .map(|n| {
            let m = z
                .coeff(n + 1)
                .map(|c| c * I)
                .unwrap_or_else(|| CMatrix::zeros(dim, dim));
            Ok(Correction {
                order: n as u32,
                term: HermitianOperator::with_tolerance(m, CORRECTION_HERMITICITY_TOL)?,
            })
        })
        .collect()
}

fn check_branch(split: &SplitHamiltonian, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let phase = dt * split.total().spectral()?.spectral_radius();
    if phase >= std::f64::consts::PI - BRANCH_MARGIN {
        return Err(Error::BranchCut {
            phase,
            margin: BRANCH_MARGIN,
        });
    }
    Ok(())
}

/// Truncated shadow Hamiltonian through BCH order `truncation` (1..=4), i.e.
/// with corrections `H_1..H_{truncation-1}`.
///
/// Requires `dt * rho(H) < pi` so that the result is comparable with the
/// principal logarithm of the step.
pub fn shadow_hamiltonian(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    dt: f64,
    truncation: usize,
) -> Result<ShadowHamiltonian> {
    check_branch(split, dt)?;
    let corrections = bch_corrections(scheme, split, truncation)?;
    Ok(ShadowHamiltonian {
        base: split.total().clone(),
        corrections,
        truncation,
        dt,
    })
}

/// `i log(U) / dt`, the exact effective Hamiltonian of a unitary step.
pub fn log_shadow(step: &StepOperator) -> Result<CMatrix> {
    if !step.unitary {
        return Err(Error::invalid(format!(
            "{} is not unitary; it has no Hermitian generator",
            step.scheme_name
        )));
    }
    if step.dt == 0.0 {
        return Err(Error::invalid("dt must be nonzero"));
    }
    Ok(logm_normal(&step.matrix)? * (I / step.dt))
}

/// Polynomial fit `H~(dt) = G_0 + sum_{n>=1} dt^n G_n` of the log shadow over
/// `dts`.
#[derive(Debug, Clone)]
pub struct LadderFit {
    pub dts: Vec<f64>,
    pub base: CMatrix,
    pub corrections: Vec<CMatrix>,
}

/// Largest condition number accepted for the Vandermonde solve.
pub const MAX_VANDERMONDE_CONDITION: f64 = 1e12;

/// Fits the log shadow on the ladder `dt_max * 2^-k`, `k = 0..points`.
pub fn shadow_from_log_ladder(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    dt_max: f64,
    points: usize,
) -> Result<LadderFit> {
    if points < 2 {
        return Err(Error::InsufficientData {
            usable: points,
            required: 2,
        });
    }
    check_branch(split, dt_max)?;
    let dts: Vec<f64> = (0..points).map(|k| dt_max * 0.5f64.powi(k as i32)).collect();
    let samples = dts
        .iter()
        .map(|&dt| log_shadow(&composition_step(scheme, split, dt)?))
        .collect::<Result<Vec<_>>>()?;

    // scaled variable s = dt / dt_max keeps the Vandermonde matrix well scaled
    let v = DMatrix::<f64>::from_fn(points, points, |k, n| (dts[k] / dt_max).powi(n as i32));
    let sv = v.clone().svd(false, false).singular_values;
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_VANDERMONDE_CONDITION) {
        return Err(Error::IllConditioned(format!(
            "Vandermonde condition number {cond:.3e}"
        )));
    }
    let inv = v
        .try_inverse()
        .ok_or_else(|| Error::IllConditioned("singular Vandermonde matrix".into()))?;
    let dim = split.dim();
    let mut coeffs = Vec::with_capacity(points);
    for n in 0..points {
        let mut g = CMatrix::zeros(dim, dim);
        for (k, sample) in samples.iter().enumerate() {
            g += sample * r(inv[(n, k)]);
        }
        coeffs.push(g / r(dt_max.powi(n as i32)));
    }
    let base = coeffs.remove(0);
    Ok(LadderFit {
        dts,
        base,
        corrections: coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fit::linear_fit;
    use crate::models::{build_grid_hamiltonian, toy_model, GridModel, ToyModel};
    use crate::operator::commutator;
    use crate::schemes::{higher_order_scheme, strang_scheme, trotter_scheme};

    fn pauli_xz() -> SplitHamiltonian {
        toy_model(&ToyModel::PauliXz).unwrap()
    }

    #[test]
    fn single_stage_has_no_corrections() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 4, dim: 5 }).unwrap();
        let unsplit = SplitHamiltonian::unsplit(split.total().clone());
        let s = shadow_hamiltonian(&CompositionScheme::single_stage(), &unsplit, 0.1, 4).unwrap();
        assert_eq!(s.corrections.len(), 3);
        for c in &s.corrections {
            assert!(c.term.frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn leading_term_recovers_hamiltonian() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 5, dim: 4 }).unwrap();
        let scheme = higher_order_scheme(&strang_scheme(), 4).unwrap();
        let z = bch_generator(&scheme, &split, 4).unwrap();
        let h = z.coeff(1).unwrap() * I;
        assert!((h - split.total().matrix()).norm() < 1e-12);
    }

    #[test]
    fn trotter_first_correction_is_half_commutator() {
        let split = pauli_xz();
        let s = shadow_hamiltonian(&trotter_scheme(2).unwrap(), &split, 0.1, 2).unwrap();
        // Z_2 = 1/2 [-iA, -iB] = -1/2 [A, B]  =>  H_1 = i Z_2 = -i/2 [A, B]
        let ab = commutator(split.part(0).matrix(), split.part(1).matrix()).unwrap();
        let expected = ab * (-I * 0.5);
        assert!((s.correction(1).unwrap().matrix() - expected).norm() < 1e-14);
        assert_eq!(s.leading_order(1e-10), Some(1));
    }

    fn generator_error_slope(split: &SplitHamiltonian, truncation: usize) -> f64 {
        let scheme = trotter_scheme(2).unwrap();
        let dts = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let s = shadow_hamiltonian(&scheme, split, dt, truncation).unwrap();
                let step = composition_step(&scheme, split, dt).unwrap();
                let log = logm_normal(&step.matrix).unwrap();
                (s.generator() - log).norm()
            })
            .collect();
        let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        linear_fit(&lx, &ly).unwrap().slope
    }

    #[test]
    fn truncated_generator_error_scales_past_truncation() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 8, dim: 4 }).unwrap();
        for truncation in 1..=4 {
            let slope = generator_error_slope(&split, truncation);
            assert!(
                (slope - (truncation as f64 + 1.0)).abs() < 0.3,
                "truncation {truncation}: slope {slope}"
            );
        }
    }

    #[test]
    fn pauli_generator_error_scales_at_least_past_truncation() {
        // the dt^4 Trotter term vanishes for two orthogonal Pauli matrices
        let split = pauli_xz();
        for truncation in 1..=4 {
            let slope = generator_error_slope(&split, truncation);
            let expected = if truncation == 3 { 5.0 } else { truncation as f64 + 1.0 };
            assert!((slope - expected).abs() < 0.3, "truncation {truncation}: slope {slope}");
        }
    }

    #[test]
    fn strang_has_no_first_order_correction() {
        let split = pauli_xz();
        let s = shadow_hamiltonian(&strang_scheme(), &split, 0.1, 4).unwrap();
        assert!(s.correction(1).unwrap().frobenius_norm() < 1e-10);
        assert!(s.correction(2).unwrap().frobenius_norm() > 0.1);
        // symmetric schemes only have even corrections
        assert!(s.correction(3).unwrap().frobenius_norm() < 1e-10);
        assert_eq!(s.leading_order(1e-10), Some(2));
    }

    #[test]
    fn corrections_are_hermitian() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 6, dim: 5 }).unwrap();
        let s = shadow_hamiltonian(&trotter_scheme(2).unwrap(), &split, 0.05, 4).unwrap();
        for c in &s.corrections {
            let m = c.term.matrix();
            assert!((m - m.adjoint()).norm() < 1e-12 * m.norm().max(1.0));
        }
    }

    #[test]
    fn bch_and_log_ladder_routes_agree() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 8, dim: 4 }).unwrap();
        for scheme in [trotter_scheme(2).unwrap(), strang_scheme()] {
            let bch = shadow_hamiltonian(&scheme, &split, 0.01, 4).unwrap();
            let ladder = shadow_from_log_ladder(&scheme, &split, 0.04, 5).unwrap();
            assert!((&ladder.base - split.total().matrix()).norm() < 1e-8);
            for n in 1..=2u32 {
                let a = bch.correction(n).unwrap().matrix();
                let b = &ladder.corrections[n as usize - 1];
                let scale = a.norm().max(1.0);
                assert!((a - b).norm() / scale < 1e-3, "{} H_{n}", scheme.name());
            }
        }
    }

    #[test]
    fn branch_cut_is_checked() {
        let split = pauli_xz();
        let err = shadow_hamiltonian(&strang_scheme(), &split, 3.0, 2).unwrap_err();
        assert!(matches!(err, Error::BranchCut { .. }));
        assert!(shadow_hamiltonian(&strang_scheme(), &split, 0.1, 5).is_err());
    }

    #[test]
    fn quartic_corrections_do_not_commute_with_h() {
        let split = build_grid_hamiltonian(&GridModel::quartic(8, 6.0)).unwrap();
        let s = shadow_hamiltonian(&strang_scheme(), &split, 1e-3, 3).unwrap();
        let h2 = s.correction(2).unwrap();
        let k = commutator(split.total().matrix(), h2.matrix()).unwrap();
        assert!(k.norm() > 1e-6 * split.total().frobenius_norm() * h2.frobenius_norm());
    }
}
