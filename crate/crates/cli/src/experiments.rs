//! Runs one configured experiment and renders its CSV and summary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use shadowdrift::analysis::{
    bch_corrections, bch_truncated, commutant_test_with, correction_growth_fit, drift_experiment,
    linear_fit, log_shadow, min_timestep_bound, observed_order, shadow_hamiltonian,
};
use shadowdrift::classical::{classical_drift_experiment, classical_energy};
use shadowdrift::models::{build_grid_hamiltonian, boundary_density, gaussian_packet, random_hermitian, random_state, toy_model};
use shadowdrift::operator::{c, commutator, expm, logm_unitary, HermitianOperator, UnitaryOperator};
use shadowdrift::schemes::composition_step;
use shadowdrift::{CMatrix, Integrator, SplitHamiltonian, StateVector};

use crate::config::{ExperimentConfig, ExperimentKind, InitialState, ModelSpec, PhiSpec};
use crate::CliError;

/// CSV body and JSON summary of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub summary: Value,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn model_id(spec: &ModelSpec) -> String {
    match spec {
        ModelSpec::Grid(g) => format!("grid-{}d-n{}", g.dimension, g.points),
        ModelSpec::Toy(t) => serde_json::to_value(t)
            .ok()
            .and_then(|v| v.get("name").and_then(Value::as_str).map(str::to_string))
            .unwrap_or_else(|| "toy".into()),
    }
}

fn build_split(spec: &ModelSpec) -> Result<SplitHamiltonian, CliError> {
    Ok(match spec {
        ModelSpec::Grid(g) => build_grid_hamiltonian(g)?,
        ModelSpec::Toy(t) => toy_model(t)?,
    })
}

fn build_state(cfg: &ExperimentConfig, split: &SplitHamiltonian) -> Result<StateVector, CliError> {
    let state = match cfg.initial_state()? {
        InitialState::Gaussian(packet) => match cfg.model()? {
            ModelSpec::Grid(g) => {
                let psi = gaussian_packet(g, packet)?;
                log::info!("initial boundary density {:e}", boundary_density(g, &psi));
                psi
            }
            ModelSpec::Toy(_) => {
                return Err(CliError::Config {
                    field: "initial_state".into(),
                    message: "gaussian packets need a grid model".into(),
                })
            }
        },
        InitialState::Basis { index } => StateVector::basis(split.dim(), *index).map_err(|e| CliError::Config {
            field: "initial_state.index".into(),
            message: e.to_string(),
        })?,
        InitialState::Random => random_state(&mut ChaCha8Rng::seed_from_u64(cfg.seed), split.dim())?,
    };
    Ok(state)
}

fn integrator(cfg: &ExperimentConfig, split: &SplitHamiltonian) -> Result<Integrator, CliError> {
    Ok(cfg.scheme()?.build(split.num_parts())?)
}

fn composition(cfg: &ExperimentConfig, split: &SplitHamiltonian) -> Result<shadowdrift::CompositionScheme, CliError> {
    match integrator(cfg, split)? {
        Integrator::Composition(s) => Ok(s),
        Integrator::Exact => Ok(shadowdrift::CompositionScheme::single_stage()),
        Integrator::EulerPathIntegral { .. } => Err(CliError::Config {
            field: "scheme".into(),
            message: format!("{} needs a unitary composition scheme", cfg.experiment.as_str()),
        }),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.experiment {
        ExperimentKind::Drift => drift(cfg),
        ExperimentKind::Order => order(cfg),
        ExperimentKind::Shadow => shadow(cfg),
        ExperimentKind::Commutant => commutant(cfg),
        ExperimentKind::Classical => classical(cfg),
        ExperimentKind::BchCheck => bch_check(cfg),
        ExperimentKind::Bound => bound(cfg),
    }
}

fn drift(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.model()?;
    let split = build_split(spec)?;
    let integ = integrator(cfg, &split)?;
    let psi = build_state(cfg, &split)?;
    let report = drift_experiment(&integ, &split, cfg.dt()?, &psi, cfg.steps()?, cfg.sample_every, &model_id(spec))?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let h_norm = split.total().frobenius_norm();
    let dev = report.max_energy_deviation();
    Ok(Outcome {
        csv: String::from_utf8(csv).expect("csv is ascii"),
        summary: json!({
            "scheme": report.scheme,
            "model": report.model,
            "samples": report.len(),
            "initial_energy": report.initial_energy(),
            "hamiltonian_frobenius_norm": h_norm,
            "max_energy_deviation": dev,
            "max_energy_deviation_rel": dev / h_norm,
            "max_norm_deviation": report.max_norm_deviation(),
            "min_fidelity": report.min_fidelity(),
            "halted_at": report.halted_at,
            "unitary": integ.is_unitary(),
        }),
    })
}

fn order(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let split = build_split(cfg.model()?)?;
    let integ = integrator(cfg, &split)?;
    let psi = build_state(cfg, &split)?;
    let dts = cfg.dts.as_ref().ok_or_else(|| CliError::Config {
        field: "dts".into(),
        message: "required by the order experiment".into(),
    })?;
    let horizon = cfg.horizon.unwrap_or(1.0);
    let report = observed_order(&integ, &split, &psi, dts, horizon)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(Outcome {
        csv: String::from_utf8(csv).expect("csv is ascii"),
        summary: json!({
            "scheme": report.scheme,
            "nominal_order": integ.order().to_string(),
            "horizon": horizon,
            "state": report.state,
            "energy": report.energy,
        }),
    })
}

fn shadow(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let split = build_split(cfg.model()?)?;
    let scheme = composition(cfg, &split)?;
    let dt = cfg.dt()?;
    let truncation = cfg.truncation.unwrap_or(4);
    let sh = shadow_hamiltonian(&scheme, &split, dt, truncation)?;
    let h = split.total();
    let mut csv = String::from("order,correction_norm,commutator_norm\n");
    let mut rows = Vec::new();
    for c in &sh.corrections {
        let k = commutator(h.matrix(), c.term.matrix())?.norm();
        let n = c.term.frobenius_norm();
        csv.push_str(&format!("{},{},{}\n", c.order, fmt(n), fmt(k)));
        rows.push(json!({"order": c.order, "norm": n, "commutator_norm": k}));
    }
    let step = composition_step(&scheme, &split, dt)?;
    let exact_generator = log_shadow(&step)?;
    let residual = (sh.evaluate() - exact_generator).norm();
    Ok(Outcome {
        csv,
        summary: json!({
            "scheme": scheme.name(),
            "nominal_order": scheme.order().to_string(),
            "dt": dt,
            "truncation": truncation,
            "leading_order": sh.leading_order(1e-10),
            "corrections": rows,
            "log_shadow_residual": residual,
        }),
    })
}

fn commutant(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let split = build_split(cfg.model()?)?;
    let h = split.total();
    let phi = match cfg.phi.as_ref().unwrap_or(&PhiSpec::Power { exponent: 2 }) {
        PhiSpec::Power { exponent } => {
            let mut m = CMatrix::identity(h.dim(), h.dim());
            for _ in 0..*exponent {
                m = &m * h.matrix();
            }
            HermitianOperator::with_tolerance(m, 1e-10)?
        }
        PhiSpec::Part { index } => split
            .parts()
            .get(*index)
            .cloned()
            .ok_or_else(|| CliError::Config {
                field: "phi.index".into(),
                message: format!("split has {} parts", split.num_parts()),
            })?,
    };
    let res = commutant_test_with(&phi, h, cfg.tolerances.commutant, &cfg.tolerances.degeneracy)?;
    let csv = format!(
        "commutes,is_function_of_h,ambiguous,commutator_rel,off_block_rel,in_block_rel,eigenspaces\n{},{},{},{},{},{},{}\n",
        res.commutes,
        res.is_function_of_h,
        res.ambiguous,
        fmt(res.commutator_rel),
        fmt(res.off_block_rel),
        fmt(res.in_block_rel),
        res.eigenspaces
    );
    Ok(Outcome {
        csv,
        summary: serde_json::to_value(&res).expect("serializable"),
    })
}

fn classical(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ic = cfg.classical_ic.as_ref().ok_or_else(|| CliError::Config {
        field: "classical_ic".into(),
        message: "required by the classical experiment".into(),
    })?;
    let report = classical_drift_experiment(ic, cfg.dt()?, cfg.steps()?, cfg.sample_every)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let rel = report.relative_energy_error();
    Ok(Outcome {
        csv: String::from_utf8(csv).expect("csv is ascii"),
        summary: json!({
            "scheme": report.scheme,
            "initial_energy": classical_energy(ic),
            "max_relative_energy_error": rel.iter().copied().fold(0.0, f64::max),
            "samples": report.len(),
        }),
    })
}

fn bch_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let spec = cfg.bch.clone().unwrap_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("instance,order,eps,residual\n");
    let mut fits = Vec::new();
    for inst in 0..spec.instances {
        let a = random_hermitian(&mut rng, spec.dim)?;
        let b = random_hermitian(&mut rng, spec.dim)?;
        for k in 1..=4usize {
            let mut residuals = Vec::with_capacity(spec.eps.len());
            for &eps in &spec.eps {
                let z = c(0.0, -eps);
                let (x, y) = (a.matrix() * z, b.matrix() * z);
                let prod = expm(&a, z)? * expm(&b, z)?;
                let log = logm_unitary(&UnitaryOperator::new(prod)?)?;
                let res = (bch_truncated(&x, &y, k)? - log).norm();
                csv.push_str(&format!("{inst},{k},{},{}\n", fmt(eps), fmt(res)));
                residuals.push(res);
            }
            let lx: Vec<f64> = spec.eps.iter().map(|e| e.ln()).collect();
            let ly: Vec<f64> = residuals.iter().map(|e| e.ln()).collect();
            let fit = linear_fit(&lx, &ly)?;
            fits.push(json!({
                "instance": inst,
                "order": k,
                "slope": fit.slope,
                "expected": k + 1,
                "pass": (fit.slope - (k as f64 + 1.0)).abs() <= 0.3,
            }));
        }
    }
    Ok(Outcome {
        csv,
        summary: json!({"dim": spec.dim, "fits": fits}),
    })
}

fn bound(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (hs_norm, s) = match cfg.hs_norm {
        Some(n) => (n, cfg.order.unwrap_or(1)),
        None => {
            let split = build_split(cfg.model()?)?;
            let scheme = composition(cfg, &split)?;
            let s = match cfg.order {
                Some(s) => s,
                None => scheme.order().finite().ok_or_else(|| CliError::Config {
                    field: "order".into(),
                    message: "the exact scheme has no finite order".into(),
                })?,
            };
            if s as usize >= 4 {
                return Err(CliError::Config {
                    field: "order".into(),
                    message: format!("corrections are available through order 3, got {s}"),
                });
            }
            let corr = bch_corrections(&scheme, &split, s as usize + 1)?;
            let n = corr.last().map(|c| c.term.frobenius_norm()).unwrap_or(0.0);
            (n, s)
        }
    };
    let dt = min_timestep_bound(hs_norm, s)?;
    let growth = match (&cfg.model, &cfg.scheme) {
        (Some(m), Some(_)) if cfg.hs_norm.is_none() => {
            let split = build_split(m)?;
            let scheme = composition(cfg, &split)?;
            Some(serde_json::to_value(correction_growth_fit(&scheme, &split, 4)?).expect("serializable"))
        }
        _ => None,
    };
    Ok(Outcome {
        csv: format!("hs_norm,order,dt_min\n{},{},{}\n", fmt(hs_norm), s, fmt(dt)),
        summary: json!({"hs_norm": hs_norm, "order": s, "dt_min": dt, "growth_fit": growth}),
    })
}
