//! Concrete Hamiltonians and their splittings.
//!
//! Grid models live on a periodic box `[-L, L)^d` with `N` points per axis.
//! The kinetic part is the spectral (Fourier) Laplacian, the potential part is
//! diagonal, so both parts have exactly known eigenbases. State index for a
//! 2D grid is `i1 * N + i2`, with `i1` running along `q1`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierSymbol;
use crate::operator::{c, commutator, pauli, r, CMatrix, CVector, HermitianOperator, Spectral, StateVector};

/// Default cap on the Hilbert dimension of grid models.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Boundary probability above which wavepacket constructors warn.
pub const BOUNDARY_DENSITY_WARN: f64 = 1e-8;

/// `1/2 q1^2 q2^2`.
pub fn quartic_potential(q1: f64, q2: f64) -> f64 {
    0.5 * q1 * q1 * q2 * q2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free,
    /// `1/2 omega^2 |q|^2`.
    Harmonic {
        #[serde(default = "one")]
        omega: f64,
    },
    /// `1/2 g q1^2 q2^2`, two dimensions only.
    Quartic {
        #[serde(default = "one")]
        coupling: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Potential {
    fn eval(&self, q: &[f64]) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * omega * omega * q.iter().map(|x| x * x).sum::<f64>(),
            Potential::Quartic { coupling } => coupling * quartic_potential(q[0], q[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridModel {
    pub dimension: usize,
    pub points: usize,
    pub half_width: f64,
    pub potential: Potential,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

impl GridModel {
    pub fn new(dimension: usize, points: usize, half_width: f64, potential: Potential) -> Self {
        Self {
            dimension,
            points,
            half_width,
            potential,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    /// The two-dimensional `1/2 (p1^2 + p2^2 + q1^2 q2^2)` model.
    pub fn quartic(points: usize, half_width: f64) -> Self {
        Self::new(2, points, half_width, Potential::Quartic { coupling: 1.0 })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn hilbert_dim(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    /// Grid coordinates along one axis, `x_a = -L + a h`.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|a| -self.half_width + a as f64 * h).collect()
    }

    /// Momentum values `pi m / L` for `m` in `[-N/2, N/2)`.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.points as i64;
        (-n / 2..n / 2).map(|m| PI * m as f64 / self.half_width).collect()
    }

    /// Coordinates of every basis point, in state-index order.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let axis = self.axis();
        match self.dimension {
            1 => axis.iter().map(|&x| vec![x]).collect(),
            _ => axis
                .iter()
                .flat_map(|&x1| axis.iter().map(move |&x2| vec![x1, x2]))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::invalid(format!(
                "grid dimension must be 1 or 2, got {}",
                self.dimension
            )));
        }
        if self.points < 2 || !self.points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "points per axis must be a power of two >= 2, got {}",
                self.points
            )));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::invalid(format!(
                "half_width must be positive, got {}",
                self.half_width
            )));
        }
        if self.hilbert_dim() > self.max_dim {
            return Err(Error::invalid(format!(
                "Hilbert dimension {} exceeds max_dim {}",
                self.hilbert_dim(),
                self.max_dim
            )));
        }
        if let Potential::Quartic { .. } = self.potential {
            if self.dimension != 2 {
                return Err(Error::invalid("the quartic potential needs a 2D grid"));
            }
        }
        Ok(())
    }
}

/// Ordered Hermitian parts `A_1..A_l` with `sum A_j = H`.
#[derive(Debug, Clone)]
pub struct SplitHamiltonian {
    parts: Vec<HermitianOperator>,
    total: HermitianOperator,
}

/// Relative tolerance on `|sum A_j - H|_F`.
pub const SPLIT_SUM_TOL: f64 = 1e-10;

impl SplitHamiltonian {
    pub fn new(parts: Vec<HermitianOperator>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("a split needs at least one part"))?;
        let mut total = first.clone();
        for p in &parts[1..] {
            total = total.add(p)?;
        }
        // drop any cached spectrum inherited from the first part
        let total = HermitianOperator::new(total.into_matrix())?;
        Ok(Self { parts, total })
    }

    pub fn with_total(parts: Vec<HermitianOperator>, total: HermitianOperator) -> Result<Self> {
        let split = Self::new(parts)?;
        let defect = (split.total.matrix() - total.matrix()).norm();
        let tol = SPLIT_SUM_TOL * total.frobenius_norm().max(1.0);
        if !(defect <= tol) {
            return Err(Error::invalid(format!(
                "parts sum to H only within {defect:.3e} (tolerance {tol:.3e})"
            )));
        }
        Ok(Self {
            parts: split.parts,
            total,
        })
    }

    /// A single-part split of `h`.
    pub fn unsplit(h: HermitianOperator) -> Self {
        Self {
            parts: vec![h.clone()],
            total: h,
        }
    }

    pub fn parts(&self) -> &[HermitianOperator] {
        &self.parts
    }

    pub fn part(&self, j: usize) -> &HermitianOperator {
        &self.parts[j]
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn total(&self) -> &HermitianOperator {
        &self.total
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    /// `|sum A_j - H|_F`.
    pub fn sum_defect(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.dim(), self.dim());
        for p in &self.parts {
            sum += p.matrix();
        }
        (sum - self.total.matrix()).norm()
    }

    /// `max_{j<k} |[A_j, A_k]|_F`.
    pub fn max_commutator_norm(&self) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..self.parts.len() {
            for k in j + 1..self.parts.len() {
                let n = commutator(self.parts[j].matrix(), self.parts[k].matrix())
                    .map(|x| x.norm())
                    .unwrap_or(f64::INFINITY);
                m = m.max(n);
            }
        }
        m
    }
}

/// One-axis Fourier eigenbasis `e^{i k_m x_a} / sqrt(N)`.
fn fourier_basis(model: &GridModel) -> CMatrix {
    let xs = model.axis();
    let ks = model.momenta();
    let norm = 1.0 / (model.points as f64).sqrt();
    CMatrix::from_fn(model.points, model.points, |a, m| c(0.0, ks[m] * xs[a]).exp() * norm)
}

fn kinetic_1d(model: &GridModel) -> CMatrix {
    let xs = model.axis();
    let ks = model.momenta();
    let n = model.points;
    CMatrix::from_fn(n, n, |a, b| {
        let dx = xs[a] - xs[b];
        let mut s = num_complex::Complex64::ZERO;
        for &k in &ks {
            s += c(0.0, k * dx).exp() * (0.5 * k * k);
        }
        s / r(n as f64)
    })
}

/// Spectral kinetic operator `sum_i p_i^2 / 2` with its exact eigenbasis attached.
pub fn kinetic_operator(model: &GridModel) -> Result<HermitianOperator> {
    model.validate()?;
    let n = model.points;
    let k1 = kinetic_1d(model);
    let f = fourier_basis(model);
    let e1: Vec<f64> = model.momenta().iter().map(|k| 0.5 * k * k).collect();
    let (matrix, spectral) = match model.dimension {
        1 => (
            k1,
            Spectral {
                values: DVector::from_vec(e1),
                vectors: f,
            },
        ),
        _ => {
            let id = CMatrix::identity(n, n);
            let m = k1.kronecker(&id) + id.kronecker(&k1);
            let values = DVector::from_iterator(
                n * n,
                e1.iter().flat_map(|&a| e1.iter().map(move |&b| a + b)),
            );
            (
                m,
                Spectral {
                    values,
                    vectors: f.kronecker(&f),
                },
            )
        }
    };
    let axis_symbol: Vec<f64> = (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let k = PI * m / model.half_width;
            0.5 * k * k
        })
        .collect();
    let symbol = match model.dimension {
        1 => FourierSymbol::new(vec![n], DVector::from_vec(axis_symbol))?,
        _ => FourierSymbol::new(
            vec![n, n],
            DVector::from_iterator(
                n * n,
                axis_symbol.iter().flat_map(|&a| axis_symbol.iter().map(move |&b| a + b)),
            ),
        )?,
    };
    HermitianOperator::with_known_spectral(matrix, spectral)?.with_fourier_symbol(symbol)
}

pub fn potential_operator(model: &GridModel) -> Result<HermitianOperator> {
    model.validate()?;
    let diag: Vec<f64> = model
        .coordinates()
        .iter()
        .map(|q| model.potential.eval(q))
        .collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// Two-part split `(kinetic, potential)` of a grid Hamiltonian.
pub fn build_grid_hamiltonian(model: &GridModel) -> Result<SplitHamiltonian> {
    model.validate()?;
    let kinetic = kinetic_operator(model)?;
    let potential = potential_operator(model)?;
    SplitHamiltonian::new(vec![kinetic, potential])
}

/// Probability mass on the outermost grid layer.
pub fn boundary_density(model: &GridModel, psi: &StateVector) -> f64 {
    let n = model.points;
    let a = psi.amplitudes();
    let edge = |i: usize| i == 0 || i == n - 1;
    match model.dimension {
        1 => (0..n).filter(|&i| edge(i)).map(|i| a[i].norm_sqr()).sum(),
        _ => (0..n * n)
            .filter(|&s| edge(s / n) || edge(s % n))
            .map(|s| a[s].norm_sqr())
            .sum(),
    }
}

/// Gaussian packet in the configuration of a [`GridModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianPacket {
    pub center: Vec<f64>,
    /// Position standard deviation of `|psi|^2` along each axis.
    pub width: f64,
    #[serde(default)]
    pub momentum: Vec<f64>,
}

/// Normalized Gaussian wavepacket sampled on the grid.
///
/// Warns (via `log`) when more than [`BOUNDARY_DENSITY_WARN`] of the probability
/// sits on the boundary layer, since the periodic box then truncates the state.
pub fn gaussian_packet(model: &GridModel, packet: &GaussianPacket) -> Result<StateVector> {
    model.validate()?;
    let d = model.dimension;
    if packet.center.len() != d {
        return Err(Error::invalid(format!(
            "packet center has {} components, grid dimension is {d}",
            packet.center.len()
        )));
    }
    if !packet.momentum.is_empty() && packet.momentum.len() != d {
        return Err(Error::invalid(format!(
            "packet momentum has {} components, grid dimension is {d}",
            packet.momentum.len()
        )));
    }
    if !(packet.width > 0.0) || !packet.width.is_finite() {
        return Err(Error::invalid(format!("packet width must be positive, got {}", packet.width)));
    }
    let momentum = if packet.momentum.is_empty() {
        vec![0.0; d]
    } else {
        packet.momentum.clone()
    };
    let s2 = packet.width * packet.width;
    let amps = model.coordinates().into_iter().map(|q| {
        let mut arg = 0.0;
        let mut phase = 0.0;
        for i in 0..d {
            let dx = q[i] - packet.center[i];
            arg -= dx * dx / (4.0 * s2);
            phase += momentum[i] * q[i];
        }
        c(arg, phase).exp()
    });
    let psi = StateVector::normalized(CVector::from_iterator(model.hilbert_dim(), amps))?;
    let edge = boundary_density(model, &psi);
    if edge > BOUNDARY_DENSITY_WARN {
        log::warn!(
            "wavepacket boundary density {edge:.3e} exceeds {BOUNDARY_DENSITY_WARN:.0e}; \
             the periodic box truncates the state"
        );
    }
    Ok(psi)
}

/// Small algebraic models used as oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ToyModel {
    /// Parts `(sigma_x, sigma_z)`.
    PauliXz,
    /// Two seeded random Hermitian parts.
    RandomHermitian { seed: u64, dim: usize },
    /// Commuting diagonal parts.
    Diagonal { parts: Vec<Vec<f64>> },
}

pub fn toy_model(model: &ToyModel) -> Result<SplitHamiltonian> {
    match model {
        ToyModel::PauliXz => SplitHamiltonian::new(vec![
            HermitianOperator::new(pauli::x())?,
            HermitianOperator::new(pauli::z())?,
        ]),
        ToyModel::RandomHermitian { seed, dim } => {
            if *dim == 0 {
                return Err(Error::invalid("random_hermitian needs dim >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let a = random_hermitian(&mut rng, *dim)?;
            let b = random_hermitian(&mut rng, *dim)?;
            SplitHamiltonian::new(vec![a, b])
        }
        ToyModel::Diagonal { parts } => {
            let ops = parts
                .iter()
                .map(|d| HermitianOperator::from_real_diagonal(d))
                .collect::<Result<Vec<_>>>()?;
            SplitHamiltonian::new(ops)
        }
    }
}

/// Hermitian matrix with entries drawn uniformly from the unit square, then symmetrized.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Result<HermitianOperator> {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    HermitianOperator::new((&m + m.adjoint()) * r(0.5))
}

/// Random normalized state with uniformly drawn amplitude components.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> Result<StateVector> {
    let v = CVector::from_fn(dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    StateVector::normalized(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::energy_expectation;

    fn sorted_eigs(h: &HermitianOperator) -> Vec<f64> {
        // fresh decomposition, ignoring any attached eigenbasis
        let fresh = HermitianOperator::new(h.matrix().clone()).unwrap();
        let mut v: Vec<f64> = fresh.spectral().unwrap().values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn kinetic_fourier_symbol_matches_matrix() {
        for model in [GridModel::quartic(4, 3.0), GridModel::new(1, 8, 2.0, Potential::Free)] {
            let t = kinetic_operator(&model).unwrap();
            let dense = t.fourier_symbol().unwrap().to_matrix();
            assert!((dense - t.matrix()).norm() < 1e-12 * t.frobenius_norm());
        }
    }

    #[test]
    fn quartic_potential_values() {
        assert_eq!(quartic_potential(0.0, 3.7), 0.0);
        assert!((quartic_potential(1000.0, 0.002) - 2.0).abs() < 1e-12);
        assert_eq!(quartic_potential(1.0, 1.0), 0.5);
    }

    #[test]
    fn free_particle_ground_state_is_constant() {
        let model = GridModel::new(1, 16, 4.0, Potential::Free);
        let split = build_grid_hamiltonian(&model).unwrap();
        assert!((split.total().matrix() - split.part(0).matrix()).norm() < 1e-15);
        let eigs = sorted_eigs(split.total());
        assert!(eigs[0].abs() < 1e-12);
        let constant = StateVector::normalized(CVector::from_element(16, r(1.0))).unwrap();
        let hpsi = split.total().apply(constant.amplitudes());
        assert!(hpsi.norm() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator_spectrum() {
        let model = GridModel::new(1, 64, 8.0, Potential::Harmonic { omega: 1.0 });
        let split = build_grid_hamiltonian(&model).unwrap();
        let eigs = sorted_eigs(split.total());
        for (k, expected) in [0.5, 1.5, 2.5].iter().enumerate() {
            assert!((eigs[k] - expected).abs() < 1e-6, "level {k}: {}", eigs[k]);
        }
    }

    #[test]
    fn kinetic_matches_fourier_diagonal() {
        for model in [
            GridModel::new(1, 8, 3.0, Potential::Free),
            GridModel::new(1, 32, 6.0, Potential::Free),
            GridModel::new(2, 8, 6.0, Potential::Free),
        ] {
            let k = kinetic_operator(&model).unwrap();
            let s = k.spectral().unwrap();
            // orthonormal basis
            let gram = s.vectors.adjoint() * &s.vectors;
            let id = CMatrix::identity(gram.nrows(), gram.nrows());
            assert!((gram - id).norm() < 1e-12);
            // reassembly reproduces the direct sum construction
            let rebuilt = s.map(r);
            assert!((rebuilt - k.matrix()).norm() < 1e-12 * k.frobenius_norm().max(1.0));
            assert!(s.values.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn quartic_parts_do_not_commute() {
        let split = build_grid_hamiltonian(&GridModel::quartic(16, 6.0)).unwrap();
        let k = commutator(split.part(0).matrix(), split.part(1).matrix()).unwrap();
        assert!(k.norm() > 0.1);
        assert!(split.sum_defect() <= SPLIT_SUM_TOL * split.total().frobenius_norm());
    }

    #[test]
    fn grid_validation_errors() {
        assert!(GridModel::new(1, 12, 1.0, Potential::Free).validate().is_err());
        assert!(GridModel::new(1, 16, 0.0, Potential::Free).validate().is_err());
        assert!(GridModel::new(3, 4, 1.0, Potential::Free).validate().is_err());
        assert!(GridModel::new(1, 16, 1.0, Potential::Quartic { coupling: 1.0 })
            .validate()
            .is_err());
        assert!(GridModel::quartic(128, 6.0).validate().is_err());
        let mut big = GridModel::quartic(64, 6.0);
        assert!(big.validate().is_ok());
        big.max_dim = 1024;
        assert!(build_grid_hamiltonian(&big).is_err());
    }

    #[test]
    fn pauli_xz_commutator() {
        let split = toy_model(&ToyModel::PauliXz).unwrap();
        let k = commutator(split.part(0).matrix(), split.part(1).matrix()).unwrap();
        let expected = pauli::y() * c(0.0, -2.0);
        assert!((k - expected).norm() < 1e-15);
    }

    #[test]
    fn diagonal_parts_commute() {
        let split = toy_model(&ToyModel::Diagonal {
            parts: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        })
        .unwrap();
        assert_eq!(split.max_commutator_norm(), 0.0);
        assert_eq!(split.total().diagonal().unwrap().as_slice(), &[4.0, 6.0]);
    }

    #[test]
    fn random_hermitian_is_reproducible() {
        let spec = ToyModel::RandomHermitian { seed: 7, dim: 4 };
        let a = toy_model(&spec).unwrap();
        let b = toy_model(&spec).unwrap();
        for j in 0..2 {
            let (x, y) = (a.part(j).matrix(), b.part(j).matrix());
            assert!(x.iter().zip(y.iter()).all(|(p, q)| p.re.to_bits() == q.re.to_bits()
                && p.im.to_bits() == q.im.to_bits()));
        }
        let other = toy_model(&ToyModel::RandomHermitian { seed: 8, dim: 4 }).unwrap();
        assert!((other.part(0).matrix() - a.part(0).matrix()).norm() > 0.1);
    }

    #[test]
    fn split_sum_invariant_for_constructors() {
        let splits = [
            toy_model(&ToyModel::PauliXz).unwrap(),
            toy_model(&ToyModel::RandomHermitian { seed: 3, dim: 5 }).unwrap(),
            build_grid_hamiltonian(&GridModel::new(1, 16, 5.0, Potential::Harmonic { omega: 2.0 }))
                .unwrap(),
        ];
        for s in &splits {
            assert!(s.sum_defect() <= SPLIT_SUM_TOL * s.total().frobenius_norm().max(1.0));
        }
        let bad = SplitHamiltonian::with_total(
            vec![HermitianOperator::identity(2)],
            HermitianOperator::zeros(2),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn gaussian_packet_is_normalized_and_centered() {
        let model = GridModel::quartic(16, 6.0);
        let psi = gaussian_packet(
            &model,
            &GaussianPacket {
                center: vec![1.0, -0.5],
                width: 0.7,
                momentum: vec![],
            },
        )
        .unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        let mean_q1: f64 = model
            .coordinates()
            .iter()
            .zip(psi.amplitudes().iter())
            .map(|(q, a)| q[0] * a.norm_sqr())
            .sum();
        assert!((mean_q1 - 1.0).abs() < 1e-6);
        assert!(boundary_density(&model, &psi) < BOUNDARY_DENSITY_WARN);
        let split = build_grid_hamiltonian(&model).unwrap();
        assert!(energy_expectation(split.total(), &psi).unwrap() > 0.0);
    }

    #[test]
    fn gaussian_packet_rejects_bad_shapes() {
        let model = GridModel::quartic(8, 6.0);
        let p = |center: Vec<f64>, width| GaussianPacket {
            center,
            width,
            momentum: vec![],
        };
        assert!(gaussian_packet(&model, &p(vec![0.0], 1.0)).is_err());
        assert!(gaussian_packet(&model, &p(vec![0.0, 0.0], -1.0)).is_err());
    }
}
