//! Operators diagonal in the discrete Fourier basis of a periodic grid,
//! applied by FFT instead of a dense matrix.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, CVector};

/// Eigenvalues of an operator `F^H diag(values) F`, with `F` the unitary
/// multi-axis DFT on a row-major grid of the given shape. `values` is indexed
/// by flattened FFT frequency indices in the same row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    shape: Vec<usize>,
    values: DVector<f64>,
}

impl FourierSymbol {
    pub fn new(shape: Vec<usize>, values: DVector<f64>) -> Result<Self> {
        let dim: usize = shape.iter().product();
        if shape.is_empty() || dim == 0 {
            return Err(Error::invalid("fourier symbol needs a nonempty shape"));
        }
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "FourierSymbol::new",
                left: dim,
                right: values.len(),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Multiplier for `exp(z * M)`.
    pub fn exp_multiplier(&self, z: Complex64) -> FourierMultiplier {
        FourierMultiplier::new(self.shape.clone(), self.values.map(|v| (z * v).exp()))
    }

    /// Dense matrix of the operator, for checks on small grids.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mult = FourierMultiplier::new(self.shape.clone(), self.values.map(|v| c(v, 0.0)));
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = CVector::zeros(n);
            e[j] = c(1.0, 0.0);
            m.set_column(j, &mult.apply(&e));
        }
        m
    }
}

/// `v -> F^H diag(multiplier) F v` with cached FFT plans.
#[derive(Clone)]
pub struct FourierMultiplier {
    shape: Vec<usize>,
    multiplier: CVector,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FourierMultiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierMultiplier")
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

impl FourierMultiplier {
    pub fn new(shape: Vec<usize>, multiplier: CVector) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            shape,
            multiplier,
            forward,
            inverse,
        }
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let mut stride = buf.len();
        let mut line = Vec::new();
        for (axis, &n) in self.shape.iter().enumerate() {
            stride /= n;
            let block = n * stride;
            line.resize(n, Complex64::ZERO);
            for base in (0..buf.len()).step_by(block) {
                for offset in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + offset + k * stride];
                    }
                    plans[axis].process(&mut line);
                    for (k, val) in line.iter().enumerate() {
                        buf[base + offset + k * stride] = *val;
                    }
                }
            }
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let mut buf: Vec<Complex64> = v.iter().copied().collect();
        self.transform(&mut buf, &self.forward);
        let scale = 1.0 / buf.len() as f64;
        for (b, m) in buf.iter_mut().zip(self.multiplier.iter()) {
            *b *= m * scale;
        }
        self.transform(&mut buf, &self.inverse);
        CVector::from_vec(buf)
    }
}
