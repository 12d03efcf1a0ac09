//! Time-discretization schemes.
//!
//! A [`CompositionScheme`] is an ordered product of stage exponentials
//! `exp(-i dt c_k A_{j_k})`, written left to right as in the operator product.
//! When applied to a state the rightmost stage acts first.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierMultiplier;
use crate::models::SplitHamiltonian;
use crate::operator::{
    c, expm, expm_unitary, CMatrix, CVector, HermitianOperator, StateVector, UnitaryOperator,
};

/// Tolerance on the per-part coefficient sums of a scheme.
pub const CONSISTENCY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub part: usize,
    pub coeff: f64,
}

impl Stage {
    pub fn new(part: usize, coeff: f64) -> Self {
        Self { part, coeff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u32),
    Exact,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(s) => Some(s),
            Order::Exact => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(s) => write!(f, "order {s}"),
            Order::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionScheme {
    name: String,
    stages: Vec<Stage>,
    order: Order,
    unitary: bool,
    num_parts: usize,
}

impl CompositionScheme {
    /// Validates that every part index `0..=max` appears and that its
    /// coefficients sum to one.
    pub fn new(name: impl Into<String>, stages: Vec<Stage>, order: Order, unitary: bool) -> Result<Self> {
        let name = name.into();
        let num_parts = stages
            .iter()
            .map(|s| s.part + 1)
            .max()
            .ok_or_else(|| Error::invalid(format!("scheme {name} has no stages")))?;
        if stages.iter().any(|s| !s.coeff.is_finite()) {
            return Err(Error::invalid(format!("scheme {name} has a non-finite coefficient")));
        }
        let scheme = Self {
            name,
            stages,
            order,
            unitary,
            num_parts,
        };
        for (j, sum) in scheme.coefficient_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::invalid(format!(
                    "scheme {}: coefficients of part {j} sum to {sum}, not 1",
                    scheme.name
                )));
            }
        }
        Ok(scheme)
    }

    /// `exp(x H)` as one stage on an unsplit Hamiltonian.
    pub fn single_stage() -> Self {
        Self::new("exact-single-stage", vec![Stage::new(0, 1.0)], Order::Exact, true)
            .expect("single stage is consistent")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn num_parts(&self) -> usize {
        self.num_parts
    }

    pub fn coefficient_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.num_parts];
        for s in &self.stages {
            sums[s.part] += s.coeff;
        }
        sums
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.stages.len();
        (0..n).all(|i| {
            let (a, b) = (self.stages[i], self.stages[n - 1 - i]);
            a.part == b.part && (a.coeff - b.coeff).abs() <= CONSISTENCY_TOL
        })
    }

    fn check_split(&self, split: &SplitHamiltonian) -> Result<()> {
        if split.num_parts() != self.num_parts {
            return Err(Error::invalid(format!(
                "scheme {} expects {} parts, split has {}",
                self.name,
                self.num_parts,
                split.num_parts()
            )));
        }
        Ok(())
    }
}

/// First-order product `exp(x A_1) ... exp(x A_l)`.
pub fn trotter_scheme(num_parts: usize) -> Result<CompositionScheme> {
    if num_parts < 2 {
        return Err(Error::invalid(format!("trotter needs at least 2 parts, got {num_parts}")));
    }
    CompositionScheme::new(
        "trotter",
        (0..num_parts).map(|j| Stage::new(j, 1.0)).collect(),
        Order::Finite(1),
        true,
    )
}

/// Symmetric second-order product `exp(x A/2) exp(x B) exp(x A/2)`.
pub fn strang_scheme() -> CompositionScheme {
    CompositionScheme::new(
        "strang",
        vec![Stage::new(0, 0.5), Stage::new(1, 1.0), Stage::new(0, 0.5)],
        Order::Finite(2),
        true,
    )
    .expect("strang is consistent")
}

/// Triple-jump weights `(w1, w0)` lifting a symmetric order-`base_order` scheme
/// to order `base_order + 2`.
pub fn triple_jump_weights(base_order: u32) -> (f64, f64) {
    let w1 = 1.0 / (2.0 - 2f64.powf(1.0 / (base_order as f64 + 1.0)));
    (w1, 1.0 - 2.0 * w1)
}

/// `S_{2k+2}(dt) = S_{2k}(w1 dt) S_{2k}(w0 dt) S_{2k}(w1 dt)`, applied
/// recursively until `target_order` is reached. Adjacent stages on the same part
/// are merged.
pub fn higher_order_scheme(base: &CompositionScheme, target_order: u32) -> Result<CompositionScheme> {
    let Order::Finite(mut order) = base.order() else {
        return Err(Error::invalid("base scheme is already exact"));
    };
    if order % 2 != 0 || !base.is_palindromic() {
        return Err(Error::invalid(format!(
            "triple-jump needs a palindromic even-order base; {} is {}",
            base.name(),
            base.order()
        )));
    }
    if !target_order.is_multiple_of(2) || target_order <= order {
        return Err(Error::invalid(format!(
            "target order must be even and above {order}, got {target_order}"
        )));
    }
    let mut stages = base.stages().to_vec();
    while order < target_order {
        let (w1, w0) = triple_jump_weights(order);
        let mut next = Vec::with_capacity(3 * stages.len());
        for w in [w1, w0, w1] {
            for s in &stages {
                push_merged(&mut next, Stage::new(s.part, s.coeff * w));
            }
        }
        stages = next;
        order += 2;
    }
    CompositionScheme::new(
        format!("triple-jump-{target_order}"),
        stages,
        Order::Finite(target_order),
        base.is_unitary(),
    )
}

fn push_merged(stages: &mut Vec<Stage>, s: Stage) {
    match stages.last_mut() {
        Some(last) if last.part == s.part => last.coeff += s.coeff,
        _ => stages.push(s),
    }
}

/// A one-step map together with the scheme that produced it.
#[derive(Debug, Clone)]
pub struct StepOperator {
    pub matrix: CMatrix,
    pub scheme_name: String,
    pub dt: f64,
    pub unitary: bool,
}

impl StepOperator {
    pub fn as_unitary(&self) -> Option<UnitaryOperator> {
        self.unitary
            .then(|| UnitaryOperator::new_unchecked(self.matrix.clone()))
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::from_raw(&self.matrix * psi.amplitudes())
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be finite, got {dt}")));
    }
    Ok(())
}

/// `exp(-i dt H)`.
pub fn exact_propagator(h: &HermitianOperator, dt: f64) -> Result<StepOperator> {
    check_dt(dt)?;
    Ok(StepOperator {
        matrix: expm_unitary(h, dt)?.into_matrix(),
        scheme_name: "exact".into(),
        dt,
        unitary: true,
    })
}

/// Product of the stage exponentials of `scheme` as a single matrix.
pub fn composition_step(
    scheme: &CompositionScheme,
    split: &SplitHamiltonian,
    dt: f64,
) -> Result<StepOperator> {
    check_dt(dt)?;
    scheme.check_split(split)?;
    let dim = split.dim();
    let mut m = CMatrix::identity(dim, dim);
    for s in scheme.stages() {
        let e = expm(split.part(s.part), c(0.0, -dt * s.coeff))?;
        m = match split.part(s.part).diagonal() {
            Some(_) => {
                for (j, mut col) in m.column_iter_mut().enumerate() {
                    col *= e[(j, j)];
                }
                m
            }
            None => m * e,
        };
    }
    Ok(StepOperator {
        matrix: m,
        scheme_name: scheme.name().to_string(),
        dt,
        unitary: scheme.is_unitary(),
    })
}

fn euler_factor(h: &HermitianOperator, dt: f64, n: usize) -> CMatrix {
    let dim = h.dim();
    let mut f = h.matrix() * c(0.0, -dt / n as f64);
    for i in 0..dim {
        f[(i, i)] += Complex64::ONE;
    }
    f
}

/// `[1 - i dt (sum A_j) / n]^n`, the non-unitary path-integral product.
pub fn euler_path_integral_step(split: &SplitHamiltonian, dt: f64, n: usize) -> Result<StepOperator> {
    check_dt(dt)?;
    if n == 0 {
        return Err(Error::invalid("euler path integral needs n >= 1"));
    }
    let dim = split.dim();
    let mut base = euler_factor(split.total(), dt, n);
    let mut acc = CMatrix::identity(dim, dim);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    Ok(StepOperator {
        matrix: acc,
        scheme_name: format!("euler-path-integral-{n}"),
        dt,
        unitary: false,
    })
}

/// Anything that can advance a state by one time step.
#[derive(Debug, Clone, PartialEq)]
pub enum Integrator {
    Exact,
    Composition(CompositionScheme),
    EulerPathIntegral { substeps: usize },
}

impl Integrator {
    pub fn name(&self) -> String {
        match self {
            Integrator::Exact => "exact".into(),
            Integrator::Composition(s) => s.name().to_string(),
            Integrator::EulerPathIntegral { substeps } => format!("euler-path-integral-{substeps}"),
        }
    }

    pub fn order(&self) -> Order {
        match self {
            Integrator::Exact => Order::Exact,
            Integrator::Composition(s) => s.order(),
            Integrator::EulerPathIntegral { .. } => Order::Finite(1),
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self {
            Integrator::Exact => true,
            Integrator::Composition(s) => s.is_unitary(),
            Integrator::EulerPathIntegral { .. } => false,
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Diagonal(CVector),
    Fourier(FourierMultiplier),
    Dense(CMatrix),
}

impl Factor {
    fn apply(&self, v: &CVector) -> CVector {
        match self {
            Factor::Diagonal(d) => v.component_mul(d),
            Factor::Fourier(f) => f.apply(v),
            Factor::Dense(m) => m * v,
        }
    }
}

/// Precomputed one-step map, reused across many steps.
#[derive(Debug, Clone)]
pub struct Propagator {
    name: String,
    dt: f64,
    unitary: bool,
    /// Factors in application order (rightmost operator first).
    factors: Vec<Factor>,
    repeats: usize,
}

impl Propagator {
    pub fn new(integrator: &Integrator, split: &SplitHamiltonian, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let (factors, repeats) = match integrator {
            Integrator::Exact => {
                let u = expm_unitary(split.total(), dt)?.into_matrix();
                (vec![dense_or_diagonal(u, split.total().diagonal().is_some())], 1)
            }
            Integrator::Composition(scheme) => {
                scheme.check_split(split)?;
                let mut cache: HashMap<(usize, u64), Factor> = HashMap::new();
                let mut factors = Vec::with_capacity(scheme.stages().len());
                for s in scheme.stages().iter().rev() {
                    let key = (s.part, s.coeff.to_bits());
                    if let Entry::Vacant(slot) = cache.entry(key) {
                        let part = split.part(s.part);
                        let z = c(0.0, -dt * s.coeff);
                        slot.insert(match part.fourier_symbol() {
                            Some(sym) if part.diagonal().is_none() => Factor::Fourier(sym.exp_multiplier(z)),
                            _ => dense_or_diagonal(expm(part, z)?, part.diagonal().is_some()),
                        });
                    }
                    factors.push(cache[&key].clone());
                }
                (factors, 1)
            }
            Integrator::EulerPathIntegral { substeps } => {
                if *substeps == 0 {
                    return Err(Error::invalid("euler path integral needs n >= 1"));
                }
                (vec![Factor::Dense(euler_factor(split.total(), dt, *substeps))], *substeps)
            }
        };
        Ok(Self {
            name: integrator.name(),
            dt,
            unitary: integrator.is_unitary(),
            factors,
            repeats,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn step(&self, v: &CVector) -> CVector {
        let mut out = v.clone();
        for _ in 0..self.repeats {
            for f in &self.factors {
                out = f.apply(&out);
            }
        }
        out
    }
}

fn dense_or_diagonal(m: CMatrix, diagonal: bool) -> Factor {
    if diagonal {
        Factor::Diagonal(m.diagonal())
    } else {
        Factor::Dense(m)
    }
}

/// Sampled states, always including the initial state and the final step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<usize>,
    pub states: Vec<StateVector>,
}

/// Evolves `psi` for `steps` steps, sampling every `sample_every` steps.
pub fn apply_scheme(
    integrator: &Integrator,
    split: &SplitHamiltonian,
    dt: f64,
    psi: &StateVector,
    steps: usize,
    sample_every: usize,
) -> Result<Trajectory> {
    if psi.dim() != split.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply_scheme",
            left: split.dim(),
            right: psi.dim(),
        });
    }
    if steps == 0 || sample_every == 0 {
        return Err(Error::invalid("steps and sample_every must be >= 1"));
    }
    let prop = Propagator::new(integrator, split, dt)?;
    let mut traj = Trajectory {
        steps: vec![0],
        states: vec![psi.clone()],
    };
    let mut v = psi.amplitudes().clone();
    for k in 1..=steps {
        v = prop.step(&v);
        if k % sample_every == 0 || k == steps {
            let s = StateVector::from_raw(v.clone());
            if !s.is_finite() {
                return Err(Error::NonFinite { step: k });
            }
            traj.steps.push(k);
            traj.states.push(s);
        }
    }
    Ok(traj)
}

/// Scheme selection as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeSpec {
    Exact,
    Trotter,
    Strang,
    TripleJump { order: u32 },
    EulerPathIntegral {
        #[serde(default = "one_substep")]
        substeps: usize,
    },
}

fn one_substep() -> usize {
    1
}

impl SchemeSpec {
    pub fn build(&self, num_parts: usize) -> Result<Integrator> {
        Ok(match self {
            SchemeSpec::Exact => Integrator::Exact,
            SchemeSpec::Trotter => Integrator::Composition(trotter_scheme(num_parts)?),
            SchemeSpec::Strang => Integrator::Composition(strang_scheme()),
            SchemeSpec::TripleJump { order } => {
                Integrator::Composition(higher_order_scheme(&strang_scheme(), *order)?)
            }
            SchemeSpec::EulerPathIntegral { substeps } => {
                if *substeps == 0 {
                    return Err(Error::invalid("euler-path-integral substeps must be >= 1"));
                }
                Integrator::EulerPathIntegral {
                    substeps: *substeps,
                }
            }
        })
    }
}

/// One entry of the scheme catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub order: &'static str,
    pub unitary: bool,
    pub form: &'static str,
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.unitary { "" } else { ", NON-UNITARY" };
        write!(f, "{} ({}{})  {}", self.name, self.order, tag, self.form)
    }
}

/// Registered scheme constructors, one entry per [`SchemeSpec`] variant.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "exact",
            order: "exact",
            unitary: true,
            form: "exp(x H) by spectral decomposition",
        },
        CatalogEntry {
            name: "trotter",
            order: "order 1",
            unitary: true,
            form: "exp(x A_1) exp(x A_2) ... exp(x A_l)",
        },
        CatalogEntry {
            name: "strang",
            order: "order 2",
            unitary: true,
            form: "exp(x A/2) exp(x B) exp(x A/2)",
        },
        CatalogEntry {
            name: "triple-jump",
            order: "order 4, 6, ...",
            unitary: true,
            form: "S(w1 x) S(w0 x) S(w1 x), w1 = 1/(2 - 2^(1/(2k+1))), recursive from strang",
        },
        CatalogEntry {
            name: "euler-path-integral",
            order: "order 1",
            unitary: false,
            form: "[1 + x H / n]^n",
        },
    ]
}
