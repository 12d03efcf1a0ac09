//! Dense complex operators: Hermitian generators, unitary propagators and
//! state vectors, together with the spectral matrix exponential and the
//! principal logarithm of a unitary.
//!
//! Units follow the `hbar = 1` convention, so the propagator of a
//! Hamiltonian `H` over a step `dt` is `expm(H, -i dt)`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::fourier::FourierSymbol;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative Hermiticity tolerance applied at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Per-dimension unitarity tolerance, `|U^H U - I|_F <= dim * UNITARITY_TOL`.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Distance from `+/-pi` at which the principal logarithm refuses to pick a branch.
pub const BRANCH_MARGIN: f64 = 1e-6;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 0; // 0 = no iteration limit in nalgebra

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigendecomposition `M = V diag(values) V^H` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Spectral {
    /// Reassembles `V diag(f(values)) V^H`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[j]);
        }
        scaled * self.vectors.adjoint()
    }

    /// Eigenvalues sorted ascending together with the matching column permutation.
    pub fn sorted(&self) -> Spectral {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&k| self.values[k]));
        let vectors = CMatrix::from_columns(
            &order
                .iter()
                .map(|&k| self.vectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        Spectral { values, vectors }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A Hermitian operator on a finite-dimensional Hilbert space.
///
/// The eigendecomposition is computed lazily on first use and shared between
/// clones.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
    diagonal: Option<DVector<f64>>,
    fourier: Option<Arc<FourierSymbol>>,
    spectral: OnceLock<Arc<Spectral>>,
}

impl HermitianOperator {
    /// Validates and symmetrizes `m`; fails when
    /// `|M - M^H|_F > 1e-12 * max(1, |M|_F)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITICITY_TOL)
    }

    pub fn with_tolerance(m: CMatrix, rel_tol: f64) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::invalid("operator dimension must be at least 1"));
        }
        let adj = m.adjoint();
        let defect = (&m - &adj).norm();
        let tolerance = rel_tol * m.norm().max(1.0);
        if !(defect <= tolerance) {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        let sym = (m + adj) * r(0.5);
        Ok(Self::from_symmetric(sym))
    }

    fn from_symmetric(matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        let is_diag = (0..n).all(|j| (0..n).all(|i| i == j || matrix[(i, j)] == Complex64::ZERO));
        let diagonal = is_diag.then(|| DVector::from_fn(n, |i, _| matrix[(i, i)].re));
        Self {
            matrix,
            diagonal,
            fourier: None,
            spectral: OnceLock::new(),
        }
    }

    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("operator dimension must be at least 1"));
        }
        let d = DVector::from_column_slice(values);
        let matrix = CMatrix::from_diagonal(&d.map(r));
        Ok(Self::from_symmetric(matrix))
    }

    /// Builds `V diag(values) V^H` from a known orthonormal eigenbasis and seeds
    /// the spectral cache with it.
    pub fn from_spectral(values: DVector<f64>, vectors: CMatrix) -> Result<Self> {
        if vectors.nrows() != vectors.ncols() || vectors.ncols() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "from_spectral",
                left: vectors.ncols(),
                right: values.len(),
            });
        }
        let spectral = Spectral { values, vectors };
        let m = spectral.map(r);
        let op = Self::new(m)?;
        let _ = op.spectral.set(Arc::new(spectral));
        Ok(op)
    }

    /// Validates `m` and attaches an eigenbasis the caller knows analytically.
    pub fn with_known_spectral(m: CMatrix, spectral: Spectral) -> Result<Self> {
        if spectral.vectors.nrows() != m.nrows() || spectral.values.len() != m.nrows() {
            return Err(Error::DimensionMismatch {
                context: "with_known_spectral",
                left: m.nrows(),
                right: spectral.values.len(),
            });
        }
        let op = Self::new(m)?;
        let _ = op.spectral.set(Arc::new(spectral));
        Ok(op)
    }

    /// Attaches a Fourier-basis eigenvalue table, which lets propagators apply
    /// functions of this operator by FFT. The caller guarantees it matches.
    pub fn with_fourier_symbol(mut self, symbol: FourierSymbol) -> Result<Self> {
        check_dims("with_fourier_symbol", self.dim(), symbol.dim())?;
        self.fourier = Some(Arc::new(symbol));
        Ok(self)
    }

    pub fn fourier_symbol(&self) -> Option<&FourierSymbol> {
        self.fourier.as_deref()
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_symmetric(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_symmetric(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Real diagonal, when the operator is exactly diagonal in the computational basis.
    pub fn diagonal(&self) -> Option<&DVector<f64>> {
        self.diagonal.as_ref()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn spectral(&self) -> Result<&Spectral> {
        if let Some(s) = self.spectral.get() {
            return Ok(s);
        }
        let s = match &self.diagonal {
            Some(d) => Spectral {
                values: d.clone(),
                vectors: CMatrix::identity(self.dim(), self.dim()),
            },
            None => {
                let eig = self
                    .matrix
                    .clone()
                    .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
                    .ok_or(Error::EigenNonConvergence {
                        dim: self.dim(),
                        frobenius_norm: self.frobenius_norm(),
                    })?;
                Spectral {
                    values: eig.eigenvalues,
                    vectors: eig.eigenvectors,
                }
            }
        };
        Ok(self.spectral.get_or_init(|| Arc::new(s)))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_dims("add", self.dim(), other.dim())?;
        Ok(Self::from_symmetric(&self.matrix + &other.matrix))
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        Self::from_symmetric(&self.matrix * r(s))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match &self.diagonal {
            Some(d) => v.zip_map(d, |a, b| a * b),
            None => &self.matrix * v,
        }
    }
}

/// A unitary matrix, `|U^H U - I|_F <= dim * 1e-12`.
#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = unitarity_defect(&m)?;
        let tolerance = m.nrows() as f64 * UNITARITY_TOL;
        if !(defect <= tolerance) {
            return Err(Error::NotUnitary { defect, tolerance });
        }
        Ok(Self { matrix: m })
    }

    /// Wraps a matrix that is unitary by construction (spectral exponential of a
    /// Hermitian generator, products of such).
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new_unchecked(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self::new_unchecked(self.matrix.adjoint())
    }

    pub fn compose(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        check_dims("compose", self.dim(), other.dim())?;
        Ok(Self::new_unchecked(&self.matrix * &other.matrix))
    }
}

/// `|U^H U - I|_F`.
pub fn unitarity_defect(m: &CMatrix) -> Result<f64> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let mut g = m.adjoint() * m;
    for i in 0..rows {
        g[(i, i)] -= Complex64::ONE;
    }
    Ok(g.norm())
}

/// A state vector `|psi>`.
///
/// States produced by unitary evolution keep unit norm to roundoff; states
/// produced by non-unitary steppers do not, and report it via [`norm`](Self::norm).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Normalizes `v` to unit length.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() {
            return Err(Error::invalid("state dimension must be at least 1"));
        }
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid(format!("cannot normalize state with norm {n}")));
        }
        Ok(Self {
            amplitudes: v / r(n),
        })
    }

    /// Wraps `v` as-is, without normalizing.
    pub fn from_raw(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

pub(crate) fn check_dims(context: &'static str, left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch {
            context,
            left,
            right,
        });
    }
    Ok(())
}

/// `exp(x M)` for Hermitian `M` and any complex scalar `x`, by spectral
/// decomposition. For purely imaginary `x` the result is unitary.
pub fn expm(m: &HermitianOperator, x: Complex64) -> Result<CMatrix> {
    if let Some(d) = m.diagonal() {
        return Ok(CMatrix::from_diagonal(&d.map(|l| (x * l).exp())));
    }
    Ok(m.spectral()?.map(|l| (x * l).exp()))
}

/// `exp(-i dt H)`.
pub fn expm_unitary(h: &HermitianOperator, dt: f64) -> Result<UnitaryOperator> {
    expm(h, c(0.0, -dt)).map(UnitaryOperator::new_unchecked)
}

/// Principal logarithm of a unitary matrix.
///
/// Uses the complex Schur form, which is diagonal for normal matrices. Refuses
/// when any eigenphase lies within [`BRANCH_MARGIN`] of `+/-pi`.
pub fn logm_unitary(u: &UnitaryOperator) -> Result<CMatrix> {
    logm_normal(u.matrix())
}

pub(crate) fn logm_normal(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    let schur = m
        .clone()
        .try_schur(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence {
            dim: n,
            frobenius_norm: m.norm(),
        })?;
    let (q, t) = schur.unpack();
    let mut logs = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let phase = lambda.arg();
        if std::f64::consts::PI - phase.abs() < BRANCH_MARGIN {
            return Err(Error::BranchCut {
                phase,
                margin: BRANCH_MARGIN,
            });
        }
        logs.push(c(lambda.norm().ln(), phase));
    }
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= logs[j];
    }
    Ok(scaled * q.adjoint())
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            context: "commutator",
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// `i[A, B]`, which is Hermitian when `A` and `B` are.
pub fn i_commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let k = commutator(a.matrix(), b.matrix())? * I;
    HermitianOperator::new(k)
}

/// `Re <psi|H|psi>`.
pub fn energy_expectation(h: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    check_dims("energy_expectation", h.dim(), psi.dim())?;
    let hpsi = h.apply(psi.amplitudes());
    let e = psi.amplitudes().dotc(&hpsi);
    let norm_sq = psi.norm().powi(2);
    let bound = 1e-12 * h.frobenius_norm() * norm_sq;
    if e.im.abs() > bound {
        return Err(Error::ExpectationNotReal {
            imaginary: e.im,
            bound,
        });
    }
    Ok(e.re)
}

pub mod pauli {
    use super::{c, r, CMatrix};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-1.0)])
    }
}
