//! Finite-dimensional test of quantum non-integrability: does every operator
//! commuting with `H` reduce to a function of `H`?
//!
//! `Phi = F(H)` exactly when `Phi`, written in an eigenbasis of `H`, is a
//! scalar on every eigenspace and vanishes between eigenspaces.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::{check_dims, commutator, HermitianOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegeneracyTolerances {
    /// Eigenvalues closer than `degeneracy_rel * rho(H)` share an eigenspace.
    pub degeneracy_rel: f64,
    /// Gaps in `(degeneracy_rel, ambiguity_rel] * rho(H)` flag the clustering as ambiguous.
    pub ambiguity_rel: f64,
}

impl Default for DegeneracyTolerances {
    fn default() -> Self {
        Self {
            degeneracy_rel: 1e-8,
            ambiguity_rel: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutantResult {
    pub commutes: bool,
    pub is_function_of_h: bool,
    /// Some eigenvalue gap fell inside the ambiguity band.
    pub ambiguous: bool,
    /// `|[Phi, H]|_F / (|Phi|_F |H|_F)`.
    pub commutator_rel: f64,
    /// Off-eigenspace weight of `Phi`, relative to `|Phi|_F`.
    pub off_block_rel: f64,
    /// Non-scalar weight inside eigenspaces, relative to `|Phi|_F`.
    pub in_block_rel: f64,
    pub eigenspaces: usize,
}

pub fn commutant_test(phi: &HermitianOperator, h: &HermitianOperator, tol: f64) -> Result<CommutantResult> {
    commutant_test_with(phi, h, tol, &DegeneracyTolerances::default())
}

pub fn commutant_test_with(
    phi: &HermitianOperator,
    h: &HermitianOperator,
    tol: f64,
    tols: &DegeneracyTolerances,
) -> Result<CommutantResult> {
    check_dims("commutant_test", phi.dim(), h.dim())?;
    let phi_norm = phi.frobenius_norm();
    let h_norm = h.frobenius_norm();
    let k = commutator(phi.matrix(), h.matrix())?.norm();
    let denom = phi_norm * h_norm;
    let commutator_rel = if denom > 0.0 { k / denom } else { 0.0 };

    let spectral = h.spectral()?.sorted();
    let n = h.dim();
    let scale = spectral.spectral_radius().max(f64::MIN_POSITIVE);
    let mut group = vec![0usize; n];
    let mut ambiguous = false;
    for i in 1..n {
        let gap = spectral.values[i] - spectral.values[i - 1];
        if gap <= tols.degeneracy_rel * scale {
            group[i] = group[i - 1];
        } else {
            group[i] = group[i - 1] + 1;
            if gap <= tols.ambiguity_rel * scale {
                ambiguous = true;
            }
        }
    }
    let eigenspaces = group.last().map_or(0, |g| g + 1);

    let v = &spectral.vectors;
    let rotated = v.adjoint() * phi.matrix() * v;
    let mut off_sq = 0.0;
    let mut in_sq = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && group[end] == group[start] {
            end += 1;
        }
        let size = (end - start) as f64;
        let mean = (start..end).map(|i| rotated[(i, i)]).sum::<num_complex::Complex64>() / size;
        for i in start..end {
            for j in start..end {
                let target = if i == j { mean } else { num_complex::Complex64::ZERO };
                in_sq += (rotated[(i, j)] - target).norm_sqr();
            }
        }
        start = end;
    }
    for i in 0..n {
        for j in 0..n {
            if group[i] != group[j] {
                off_sq += rotated[(i, j)].norm_sqr();
            }
        }
    }
    let (off_block_rel, in_block_rel) = if phi_norm > 0.0 {
        (off_sq.sqrt() / phi_norm, in_sq.sqrt() / phi_norm)
    } else {
        (0.0, 0.0)
    };
    Ok(CommutantResult {
        commutes: commutator_rel <= tol,
        is_function_of_h: off_block_rel <= tol && in_block_rel <= tol,
        ambiguous,
        commutator_rel,
        off_block_rel,
        in_block_rel,
        eigenspaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::test_util::*;
    use crate::operator::{pauli, HermitianOperator};

    #[test]
    fn square_of_nondegenerate_h() {
        let mut g = rng(41);
        let h = random_hermitian(&mut g, 5);
        let phi = HermitianOperator::new(h.matrix() * h.matrix()).unwrap();
        let res = commutant_test(&phi, &h, 1e-8).unwrap();
        assert!(res.commutes && res.is_function_of_h);
        assert_eq!(res.eigenspaces, 5);
    }

    #[test]
    fn pauli_noncommuting() {
        let h = HermitianOperator::new(pauli::z()).unwrap();
        let phi = HermitianOperator::new(pauli::x()).unwrap();
        let res = commutant_test(&phi, &h, 1e-8).unwrap();
        assert!(!res.commutes && !res.is_function_of_h);
    }

    #[test]
    fn identity_hamiltonian_counterexample() {
        let h = HermitianOperator::identity(2);
        let phi = HermitianOperator::new(pauli::x()).unwrap();
        let res = commutant_test(&phi, &h, 1e-8).unwrap();
        assert!(res.commutes);
        assert!(!res.is_function_of_h);
        assert_eq!(res.eigenspaces, 1);
    }

    #[test]
    fn ambiguity_flag() {
        let h = HermitianOperator::from_real_diagonal(&[1.0, 1.0 + 5e-8, 2.0]).unwrap();
        let phi = HermitianOperator::identity(3);
        let res = commutant_test(&phi, &h, 1e-8).unwrap();
        assert!(res.ambiguous);
        assert!(res.is_function_of_h);
        let h = HermitianOperator::from_real_diagonal(&[1.0, 1.5, 2.0]).unwrap();
        assert!(!commutant_test(&phi, &h, 1e-8).unwrap().ambiguous);
    }

    #[test]
    fn zero_phi_is_trivially_a_function() {
        let h = HermitianOperator::new(pauli::z()).unwrap();
        let res = commutant_test(&HermitianOperator::zeros(2), &h, 1e-8).unwrap();
        assert!(res.commutes && res.is_function_of_h);
    }

    #[test]
    fn dimension_mismatch() {
        let h = HermitianOperator::identity(3);
        assert!(commutant_test(&HermitianOperator::identity(2), &h, 1e-8).is_err());
    }
}
