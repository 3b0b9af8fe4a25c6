//! Classical outer loops: SPSA, a deterministic p=1 grid for QAOA, and the
//! end-to-end QAOA / VQE drivers.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{enumerate_spectrum, DiagonalSpectrum, DEFAULT_QUBIT_CAP};
use crate::qubo::{Bitstring, QuboProgram, Rational};
use crate::rng::{self, derive_seed};
use crate::sim::{expectation, plus_state, qaoa_state, top_amplitudes, twolocal_state, AnsatzLayout, QaoaParams};

/// Most probable bitstrings inspected for the sampled objective.
pub const SAMPLED_BITSTRINGS: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    pub max_iter: usize,
    pub a: f64,
    pub c: f64,
    /// Stability constant added to the iteration count in the step-size schedule.
    pub stability: f64,
    pub alpha_exp: f64,
    pub gamma_exp: f64,
    pub seed: u64,
    /// Parameter snapshots are stored in the trace every this many iterations.
    pub snapshot_every: usize,
}

impl SpsaConfig {
    /// Standard gains with the stability constant at 10% of `max_iter`.
    pub fn new(max_iter: usize, seed: u64) -> Self {
        SpsaConfig {
            max_iter,
            a: 0.2,
            c: 0.1,
            stability: 0.1 * max_iter as f64,
            alpha_exp: 0.602,
            gamma_exp: 0.101,
            seed,
            snapshot_every: 50,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.c > 0.0) {
            return Err(Error::InvalidArgument(format!("SPSA gains must be positive (a={}, c={})", self.a, self.c)));
        }
        if self.stability < 0.0 {
            return Err(Error::InvalidArgument("SPSA stability constant must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn step_size(&self, k: usize) -> f64 {
        self.a / (k as f64 + 1.0 + self.stability).powf(self.alpha_exp)
    }

    pub fn perturbation_size(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma_exp)
    }
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig::new(600, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parameters: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub points: Vec<TracePoint>,
}

impl OptimizationTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `iteration,objective` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.iteration, p.objective));
        }
        out
    }
}

fn checked(value: f64, theta: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective { value, theta: theta.to_vec() })
    }
}

/// Simultaneous-perturbation stochastic approximation.
///
/// Each iteration draws a Rademacher vector `Δ`, estimates the gradient from
/// `f(θ + c_k Δ)` and `f(θ - c_k Δ)`, steps by `a_k`, then evaluates the new
/// iterate for the trace. Returns the best iterate seen (including `θ0`).
pub fn spsa_minimize<F>(mut f: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<(Vec<f64>, OptimizationTrace)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let mut rng = rng::from_seed(cfg.seed);
    let dim = theta0.len();
    let mut theta = theta0.to_vec();
    let mut best = (checked(f(&theta)?, &theta)?, theta.clone());
    let snapshot = |k: usize, th: &[f64]| {
        (cfg.snapshot_every > 0 && k.is_multiple_of(cfg.snapshot_every) || k == cfg.max_iter).then(|| th.to_vec())
    };
    let mut trace = OptimizationTrace {
        points: vec![TracePoint { iteration: 0, objective: best.0, parameters: snapshot(0, &theta) }],
    };

    let mut plus = vec![0.0; dim];
    let mut minus = vec![0.0; dim];
    for k in 0..cfg.max_iter {
        let ck = cfg.perturbation_size(k);
        let ak = cfg.step_size(k);
        let delta: Vec<f64> = (0..dim).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        for i in 0..dim {
            plus[i] = theta[i] + ck * delta[i];
            minus[i] = theta[i] - ck * delta[i];
        }
        let y_plus = checked(f(&plus)?, &plus)?;
        let y_minus = checked(f(&minus)?, &minus)?;
        let slope = (y_plus - y_minus) / (2.0 * ck);
        for i in 0..dim {
            // Δ_i = ±1, so 1/Δ_i = Δ_i.
            theta[i] -= ak * slope * delta[i];
        }
        let value = checked(f(&theta)?, &theta)?;
        if value < best.0 {
            best = (value, theta.clone());
        }
        trace.points.push(TracePoint { iteration: k + 1, objective: value, parameters: snapshot(k + 1, &theta) });
    }
    Ok((best.1, trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub beta: f64,
    pub expectation: f64,
}

/// Exhaustive p=1 scan over `α = 2πi/R`, `β = πj/R` for `i, j < R`.
/// Ties resolve to the first cell in row-major (α-major) order.
pub fn grid_search_qaoa(spec: &DiagonalSpectrum, resolution: usize) -> Result<GridPoint> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be at least 1".into()));
    }
    let q = spec.num_qubits();
    let r = resolution as f64;
    let rows: Vec<Result<GridPoint>> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let alpha = 2.0 * PI * i as f64 / r;
            let mut phased = plus_state(q, usize::MAX)?;
            phased.apply_phase(spec, alpha)?;
            let mut best: Option<GridPoint> = None;
            for j in 0..resolution {
                let beta = PI * j as f64 / r;
                let mut s = phased.clone();
                s.apply_mixer(beta);
                let e = expectation(&s, spec)?;
                if best.is_none_or(|b| e < b.expectation) {
                    best = Some(GridPoint { alpha, beta, expectation: e });
                }
            }
            Ok(best.expect("resolution ≥ 1"))
        })
        .collect();
    let mut best: Option<GridPoint> = None;
    for row in rows {
        let row = row?;
        if best.is_none_or(|b| row.expectation < b.expectation) {
            best = Some(row);
        }
    }
    Ok(best.expect("resolution ≥ 1"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum QaoaMethod {
    Grid { resolution: usize },
    Spsa(SpsaConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub qubit_cap: usize,
    /// Independent seeded runs; the best is reported. Ignored by the grid.
    pub restarts: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { qubit_cap: DEFAULT_QUBIT_CAP, restarts: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalResult {
    pub best_parameters: Vec<f64>,
    /// `⟨H⟩` of the best state on the objective scale (offset included).
    pub best_expectation: f64,
    /// Minimum exact objective over the most probable bitstrings of the best state.
    pub best_sampled_objective: f64,
    #[serde(serialize_with = "crate::exact::serialize_rational")]
    pub best_sampled_objective_exact: Rational,
    pub best_sampled_bitstring: Bitstring,
    /// Objective of the single most probable bitstring.
    pub most_probable_objective: f64,
    pub offset: f64,
    pub trace: OptimizationTrace,
    pub qubit_count: usize,
    pub restart: usize,
    pub wall_time_secs: f64,
}

impl VariationalResult {
    /// `best_expectation - offset`: the expectation without the program's constant term.
    pub fn hamiltonian_energy(&self) -> f64 {
        self.best_expectation - self.offset
    }

    pub fn reached_zero(&self) -> bool {
        self.best_sampled_objective_exact == Rational::from_integer(0)
    }

    fn better_than(&self, other: &VariationalResult) -> bool {
        (self.best_sampled_objective_exact, self.best_expectation)
            < (other.best_sampled_objective_exact, other.best_expectation)
    }
}

fn sampled_objective(p: &QuboProgram, state: &crate::sim::StateVector) -> Result<(Rational, Bitstring, f64)> {
    let top = top_amplitudes(state, SAMPLED_BITSTRINGS);
    let mut best: Option<(Rational, Bitstring)> = None;
    for (x, _) in &top {
        let e = p.evaluate(x)?;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, x.clone()));
        }
    }
    let most_probable = to_f64(p.evaluate(&top[0].0)?);
    let (e, x) = best.expect("state has at least one amplitude");
    Ok((e, x, most_probable))
}

pub(crate) fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Builds the spectrum of `p` and optimizes the QAOA angles.
pub fn run_qaoa(p: &QuboProgram, layers: usize, method: &QaoaMethod, opts: &RunOptions) -> Result<VariationalResult> {
    let spec = enumerate_spectrum(p, opts.qubit_cap)?;
    run_qaoa_on(p, &spec, layers, method, opts)
}

/// As [`run_qaoa`] with a precomputed spectrum of `p`.
pub fn run_qaoa_on(
    p: &QuboProgram,
    spec: &DiagonalSpectrum,
    layers: usize,
    method: &QaoaMethod,
    opts: &RunOptions,
) -> Result<VariationalResult> {
    if layers == 0 {
        return Err(Error::InvalidArgument("QAOA needs at least one layer".into()));
    }
    let start = Instant::now();
    match method {
        QaoaMethod::Grid { resolution } => {
            if layers != 1 {
                return Err(Error::InvalidArgument(format!("grid search covers L = 1 only, got L = {layers}")));
            }
            let g = grid_search_qaoa(spec, *resolution)?;
            let params = QaoaParams::single(g.alpha, g.beta);
            let trace = OptimizationTrace {
                points: vec![TracePoint { iteration: 0, objective: g.expectation, parameters: Some(params.to_flat()) }],
            };
            finish(p, spec, params.to_flat(), g.expectation, trace, 0, start, |th| {
                qaoa_state(spec, &QaoaParams::from_flat(th)?)
            })
        }
        QaoaMethod::Spsa(cfg) => {
            let mut best: Option<VariationalResult> = None;
            for r in 0..opts.restarts.max(1) {
                let run_cfg = SpsaConfig { seed: restart_seed(cfg.seed, r), ..cfg.clone() };
                let mut init = rng::from_seed(derive_seed(run_cfg.seed, 0x51A7));
                let theta0: Vec<f64> = (0..2 * layers).map(|_| init.gen_range(-PI..=PI)).collect();
                let objective = |th: &[f64]| expectation(&qaoa_state(spec, &QaoaParams::from_flat(th)?)?, spec);
                let (theta, trace) = spsa_minimize(objective, &theta0, &run_cfg)?;
                let value = objective(&theta)?;
                let res =
                    finish(p, spec, theta, value, trace, r, start, |th| qaoa_state(spec, &QaoaParams::from_flat(th)?))?;
                if best.as_ref().is_none_or(|b| res.better_than(b)) {
                    best = Some(res);
                }
            }
            Ok(best.expect("at least one restart"))
        }
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    if restart == 0 {
        seed
    } else {
        derive_seed(seed, restart as u64)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish<S>(
    p: &QuboProgram,
    spec: &DiagonalSpectrum,
    theta: Vec<f64>,
    value: f64,
    trace: OptimizationTrace,
    restart: usize,
    start: Instant,
    prepare: S,
) -> Result<VariationalResult>
where
    S: Fn(&[f64]) -> Result<crate::sim::StateVector>,
{
    let state = prepare(&theta)?;
    let (exact, bits, most_probable) = sampled_objective(p, &state)?;
    Ok(VariationalResult {
        best_parameters: theta,
        best_expectation: value,
        best_sampled_objective: to_f64(exact),
        best_sampled_objective_exact: exact,
        best_sampled_bitstring: bits,
        most_probable_objective: most_probable,
        offset: spec.offset(),
        trace,
        qubit_count: spec.num_qubits(),
        restart,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// VQE with the RY + CZ ansatz, SPSA, and a seeded uniform start in `[-π, π]`.
pub fn run_vqe(
    p: &QuboProgram,
    layout: &AnsatzLayout,
    cfg: &SpsaConfig,
    opts: &RunOptions,
) -> Result<VariationalResult> {
    let spec = enumerate_spectrum(p, opts.qubit_cap)?;
    let mut best: Option<VariationalResult> = None;
    for r in 0..opts.restarts.max(1) {
        let run_cfg = SpsaConfig { seed: restart_seed(cfg.seed, r), ..cfg.clone() };
        let mut init = rng::from_seed(derive_seed(run_cfg.seed, 0x0E5E));
        let theta0: Vec<f64> = (0..layout.param_count()).map(|_| init.gen_range(-PI..=PI)).collect();
        let mut res = run_vqe_from(p, &spec, layout, &run_cfg, &theta0)?;
        res.restart = r;
        if best.as_ref().is_none_or(|b| res.better_than(b)) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// One VQE run from an explicit starting point against a precomputed spectrum.
pub fn run_vqe_from(
    p: &QuboProgram,
    spec: &DiagonalSpectrum,
    layout: &AnsatzLayout,
    cfg: &SpsaConfig,
    theta0: &[f64],
) -> Result<VariationalResult> {
    if layout.num_qubits != spec.num_qubits() {
        return Err(Error::DimensionMismatch { state: layout.num_qubits, operator: spec.num_qubits() });
    }
    let start = Instant::now();
    let objective = |th: &[f64]| expectation(&twolocal_state(layout, th)?, spec);
    let (theta, trace) = spsa_minimize(objective, theta0, cfg)?;
    let value = objective(&theta)?;
    finish(p, spec, theta, value, trace, 0, start, |th| twolocal_state(layout, th))
}
