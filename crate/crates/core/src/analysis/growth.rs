//! Growth of shadow-Hamiltonian corrections with order, `|H_n| ~ A B^n`.

use serde::Serialize;

use super::bch::MAX_BCH_ORDER;
use super::fit::linear_fit;
use super::shadow::bch_corrections;
use crate::error::{Error, Result};
use crate::models::SplitHamiltonian;
use crate::schemes::CompositionScheme;

/// Corrections with `|H_n|_F <= VANISHING_REL * max(1, |H|_F)` count as zero.
pub const VANISHING_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GrowthFit {
    Fitted {
        a: f64,
        b: f64,
        r_squared: f64,
        /// `(n, |H_n|_F)` for every extracted order.
        norms: Vec<(u32, f64)>,
    },
    NotApplicable {
        reason: String,
        norms: Vec<(u32, f64)>,
    },
}

impl GrowthFit {
    pub fn is_applicable(&self) -> bool {
        matches!(self, GrowthFit::Fitted { .. })
    }

    pub fn norms(&self) -> &[(u32, f64)] {
        match self {
            GrowthFit::Fitted { norms, .. } | GrowthFit::NotApplicable { norms, .. } => norms,
        }
    }
}

/// Fits `log |H_n|_F` against `n` over the corrections of BCH order up to
/// `max_order`, i.e. `n = 1..max_order-1`.
pub fn correction_growth_fit(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    max_order: usize,
) -> Result<GrowthFit> {
    if max_order == 0 || max_order > MAX_BCH_ORDER {
        return Err(Error::UnsupportedOrder {
            order: max_order,
            max: MAX_BCH_ORDER,
        });
    }
    let corrections = bch_corrections(scheme, split, max_order)?;
    let norms: Vec<(u32, f64)> = corrections
        .iter()
        .map(|c| (c.order, c.term.frobenius_norm()))
        .collect();
    let floor = VANISHING_REL * split.total().frobenius_norm().max(1.0);
    let (x, y): (Vec<f64>, Vec<f64>) = norms
        .iter()
        .filter(|(_, v)| *v > floor)
        .map(|&(n, v)| (n as f64, v.ln()))
        .unzip();
    if x.len() < 3 {
        let reason = if x.is_empty() {
            "all corrections vanish".to_string()
        } else {
            format!("{} of the 3 required correction orders are nonzero", x.len())
        };
        return Ok(GrowthFit::NotApplicable { reason, norms });
    }
    let fit = linear_fit(&x, &y)?;
    Ok(GrowthFit::Fitted {
        a: fit.intercept.exp(),
        b: fit.slope.exp(),
        r_squared: fit.r_squared,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_grid_hamiltonian, toy_model, GridModel, ToyModel};
    use crate::schemes::{strang_scheme, trotter_scheme};

    #[test]
    fn commuting_split_not_applicable() {
        let split = toy_model(&ToyModel::Diagonal {
            parts: vec![vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 4.0]],
        })
        .unwrap();
        let fit = correction_growth_fit(&trotter_scheme(2).unwrap(), &split, 4).unwrap();
        assert!(!fit.is_applicable());
        assert!(fit.norms().iter().all(|&(_, v)| v < 1e-12));
    }

    #[test]
    fn pauli_trotter_third_correction_vanishes() {
        let split = toy_model(&ToyModel::PauliXz).unwrap();
        let fit = correction_growth_fit(&trotter_scheme(2).unwrap(), &split, 4).unwrap();
        assert!(!fit.is_applicable());
        let norms = fit.norms();
        assert!((norms[0].1 - 2f64.sqrt()).abs() < 1e-14);
        assert!((norms[1].1 - 2.0 / 3.0).abs() < 1e-14);
        assert!(norms[2].1 < 1e-14);
    }

    #[test]
    fn random_trotter_fit() {
        let split = toy_model(&ToyModel::RandomHermitian { seed: 3, dim: 5 }).unwrap();
        match correction_growth_fit(&trotter_scheme(2).unwrap(), &split, 4).unwrap() {
            GrowthFit::Fitted { b, r_squared, norms, .. } => {
                assert_eq!(norms.len(), 3);
                assert!(b > 0.0 && b.is_finite());
                assert!((0.0..=1.0).contains(&r_squared));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strang_has_too_few_orders() {
        let split = toy_model(&ToyModel::PauliXz).unwrap();
        let fit = correction_growth_fit(&strang_scheme(), &split, 4).unwrap();
        assert!(!fit.is_applicable());
    }

    #[test]
    fn quartic_trotter_grows() {
        let split = build_grid_hamiltonian(&GridModel::quartic(8, 6.0)).unwrap();
        match correction_growth_fit(&trotter_scheme(2).unwrap(), &split, 4).unwrap() {
            GrowthFit::Fitted { b, .. } => assert!(b > 1.0, "B = {b}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_order() {
        let split = toy_model(&ToyModel::PauliXz).unwrap();
        assert!(correction_growth_fit(&strang_scheme(), &split, 5).is_err());
        assert!(correction_growth_fit(&strang_scheme(), &split, 0).is_err());
    }
}
