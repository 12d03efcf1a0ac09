//! Truncated Baker-Campbell-Hausdorff expansion.
//!
//! `log(e^X e^Y) = X + Y + 1/2 [X,Y] + 1/12 ([X,[X,Y]] + [Y,[Y,X]])
//!                 + 1/24 [X,[Y,[Y,X]]] + ...`
//!
//! The expansion is generic over anything with a Lie bracket so that the same
//! code runs on plain matrices and on matrix-valued power series in `dt`.

use crate::error::{Error, Result};
use crate::operator::{commutator, r, CMatrix};

pub const MAX_BCH_ORDER: usize = 4;

pub trait LieElement: Sized {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn bracket(&self, other: &Self) -> Result<Self>;
}

impl LieElement for CMatrix {
    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn scale(&self, s: f64) -> Self {
        self * r(s)
    }

    fn bracket(&self, other: &Self) -> Result<Self> {
        commutator(self, other)
    }
}

/// Terms of the expansion through total degree `order` in `(X, Y)`.
pub fn bch_generic<T: LieElement>(x: &T, y: &T, order: usize) -> Result<T> {
    if order == 0 || order > MAX_BCH_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_BCH_ORDER,
        });
    }
    let mut z = x.add(y);
    if order == 1 {
        return Ok(z);
    }
    let xy = x.bracket(y)?;
    z = z.add(&xy.scale(0.5));
    if order == 2 {
        return Ok(z);
    }
    let yx = xy.scale(-1.0);
    let x_xy = x.bracket(&xy)?;
    let y_yx = y.bracket(&yx)?;
    z = z.add(&x_xy.add(&y_yx).scale(1.0 / 12.0));
    if order == 3 {
        return Ok(z);
    }
    let x_y_yx = x.bracket(&y_yx)?;
    Ok(z.add(&x_y_yx.scale(1.0 / 24.0)))
}

/// `Z` with `e^X e^Y = e^Z`, truncated after total degree `order` (1..=4).
pub fn bch_truncated(x: &CMatrix, y: &CMatrix, order: usize) -> Result<CMatrix> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            context: "bch_truncated",
            left: x.nrows(),
            right: y.nrows(),
        });
    }
    bch_generic(x, y, order)
}

/// Matrix-valued polynomial `sum_k c_k dt^k`, truncated at a fixed degree.
///
/// Products of series drop every term above the truncation degree, so a BCH
/// composition of degree-one stage generators is exact through that degree.
#[derive(Debug, Clone)]
pub struct DtSeries {
    coeffs: Vec<Option<CMatrix>>,
}

impl DtSeries {
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![None; degree + 1],
        }
    }

    /// `m * dt`.
    pub fn linear(m: CMatrix, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coeffs[1] = Some(m);
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&CMatrix> {
        self.coeffs.get(k).and_then(|c| c.as_ref())
    }
}

fn add_opt(a: &Option<CMatrix>, b: &Option<CMatrix>) -> Option<CMatrix> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a + b),
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    }
}

impl LieElement for DtSeries {
    fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| add_opt(a, b))
                .collect(),
        }
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.as_ref().map(|m| m * r(s)))
                .collect(),
        }
    }

    fn bracket(&self, other: &Self) -> Result<Self> {
        let degree = self.degree();
        let mut out = Self::zero(degree);
        for (i, a) in self.coeffs.iter().enumerate() {
            let Some(a) = a else { continue };
            for (j, b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                let Some(b) = b else { continue };
                let k = commutator(a, b)?;
                out.coeffs[i + j] = add_opt(&out.coeffs[i + j], &Some(k));
            }
        }
        Ok(out)
    }
}
