//! Seeded pipelines for the energy-clustering, edge-removal and VQE-trace
//! experiments, plus summary statistics.
//!
//! Every pipeline is a pure function of its config. Pairs and runs fan out in
//! parallel and are collected back in `(pair_id, seed)` order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{enumerate_spectrum, solve_exact, DEFAULT_QUBIT_CAP};
use crate::graph::{complete_graph, edge_removal_sequence, generate_pair, permute_graph, PairLabel, Permutation};
use crate::optim::{run_qaoa_on, run_vqe_from, QaoaMethod, RunOptions, SpsaConfig, VariationalResult};
use crate::qubo::{build, Formulation, QuboProgram, Weights};
use crate::rng::{self, derive_seed};
use crate::sim::{expectation, qaoa_state, AnsatzLayout, QaoaParams};

/// How each QAOA instance is optimized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaSettings {
    pub layers: usize,
    pub method: QaoaMethod,
    pub options: RunOptions,
}

impl Default for QaoaSettings {
    fn default() -> Self {
        QaoaSettings {
            layers: 1,
            method: QaoaMethod::Grid { resolution: 64 },
            options: RunOptions { qubit_cap: DEFAULT_QUBIT_CAP, restarts: 1 },
        }
    }
}

fn join_params(theta: &[f64]) -> String {
    theta.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub n: usize,
    /// Pair `k` uses `edge_counts[k % len]` edges.
    pub edge_counts: Vec<usize>,
    pub num_pairs: usize,
    pub formulation: Formulation,
    pub seed: u64,
    /// Alternate isomorphic and non-isomorphic pairs instead of isomorphic only.
    pub include_non_isomorphic: bool,
    pub qaoa: QaoaSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub pair_id: usize,
    pub n: usize,
    pub m: usize,
    pub intended_label: PairLabel,
    pub formulation: Formulation,
    /// Optimized expectation minus the program offset.
    pub qaoa_energy: f64,
    /// Optimized expectation on the objective scale.
    pub qaoa_expectation: f64,
    /// Best exact objective among the most probable bitstrings.
    pub objective_value: f64,
    pub exact_min_energy: f64,
    /// `|⟨H⟩(g1, g2) - ⟨H⟩(g1, p(g2))|` at the optimized angles for a random relabeling `p`.
    pub relabel_energy_gap: f64,
    /// Solved isomorphic instance: exact minimum 0 and sampled objective 0.
    pub admitted: bool,
    pub parameters: String,
    pub seed: u64,
}

fn qaoa_instance(
    p: &QuboProgram,
    settings: &QaoaSettings,
) -> Result<(crate::exact::DiagonalSpectrum, VariationalResult)> {
    let spec = enumerate_spectrum(p, settings.options.qubit_cap)?;
    let res = run_qaoa_on(p, &spec, settings.layers, &settings.method, &settings.options)?;
    Ok((spec, res))
}

pub fn experiment_clustering(cfg: &ClusteringConfig) -> Result<Vec<ClusterRecord>> {
    if cfg.num_pairs > 0 && cfg.edge_counts.is_empty() {
        return Err(Error::InvalidArgument("clustering needs at least one edge count".into()));
    }
    (0..cfg.num_pairs).into_par_iter().map(|pair_id| clustering_record(cfg, pair_id)).collect()
}

fn clustering_record(cfg: &ClusteringConfig, pair_id: usize) -> Result<ClusterRecord> {
    let m = cfg.edge_counts[pair_id % cfg.edge_counts.len()];
    let want_iso = !cfg.include_non_isomorphic || pair_id.is_multiple_of(2);
    let seed = derive_seed(cfg.seed, pair_id as u64);
    let pair = generate_pair(cfg.n, m, want_iso, seed)?;
    let p = build(cfg.formulation, &pair.g1, &pair.g2, Weights::default())?;
    let (_, res) = qaoa_instance(&p, &cfg.qaoa)?;
    let exact = solve_exact(&p, cfg.qaoa.options.qubit_cap)?;

    let relabel = Permutation::random(cfg.n, &mut rng::from_seed(derive_seed(seed, 1)));
    let twin = build(cfg.formulation, &pair.g1, &permute_graph(&pair.g2, &relabel)?, Weights::default())?;
    let twin_spec = enumerate_spectrum(&twin, cfg.qaoa.options.qubit_cap)?;
    let params = QaoaParams::from_flat(&res.best_parameters)?;
    let twin_energy = expectation(&qaoa_state(&twin_spec, &params)?, &twin_spec)?;

    Ok(ClusterRecord {
        pair_id,
        n: cfg.n,
        m,
        intended_label: pair.intended_label,
        formulation: cfg.formulation,
        qaoa_energy: res.hamiltonian_energy(),
        qaoa_expectation: res.best_expectation,
        objective_value: res.best_sampled_objective,
        exact_min_energy: exact.min_energy,
        relabel_energy_gap: (res.best_expectation - twin_energy).abs(),
        admitted: exact.min_energy == 0.0 && res.reached_zero(),
        parameters: join_params(&res.best_parameters),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRemovalConfig {
    pub start_n: usize,
    pub seed: u64,
    pub formulation: Formulation,
    /// Independent removal orders; order `r > 0` uses a derived seed.
    pub restarts: usize,
    pub qaoa: QaoaSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRemovalRecord {
    pub restart: usize,
    pub step: usize,
    pub edges_remaining: usize,
    pub n_total: usize,
    pub nonisolated_vertices: usize,
    pub qaoa_energy: f64,
    pub qaoa_expectation: f64,
    pub objective_value: f64,
    pub exact_min_energy: f64,
    pub parameters: String,
    pub seed: u64,
}

/// Pairs every graph of a seeded removal sequence from `K_n` with an identical copy and runs QAOA.
pub fn experiment_edge_removal(cfg: &EdgeRemovalConfig) -> Result<Vec<EdgeRemovalRecord>> {
    let q = cfg.start_n * cfg.start_n;
    crate::exact::check_qubit_cap(q, cfg.qaoa.options.qubit_cap, 16)?;
    let mut jobs = Vec::new();
    for restart in 0..cfg.restarts.max(1) {
        let seed = if restart == 0 { cfg.seed } else { derive_seed(cfg.seed, restart as u64) };
        for (step, g) in edge_removal_sequence(&complete_graph(cfg.start_n), seed).into_iter().enumerate() {
            jobs.push((restart, seed, step, g));
        }
    }
    jobs.into_par_iter()
        .map(|(restart, seed, step, g)| {
            let p = build(cfg.formulation, &g, &g, Weights::default())?;
            let (_, res) = qaoa_instance(&p, &cfg.qaoa)?;
            let exact = solve_exact(&p, cfg.qaoa.options.qubit_cap)?;
            Ok(EdgeRemovalRecord {
                restart,
                step,
                edges_remaining: g.num_edges(),
                n_total: g.num_vertices(),
                nonisolated_vertices: g.nonisolated_vertex_count(),
                qaoa_energy: res.hamiltonian_energy(),
                qaoa_expectation: res.best_expectation,
                objective_value: res.best_sampled_objective,
                exact_min_energy: exact.min_energy,
                parameters: join_params(&res.best_parameters),
                seed,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeTraceConfig {
    pub n: usize,
    pub edge_counts: Vec<usize>,
    pub num_pairs: usize,
    pub seeds_per_pair: usize,
    pub reps: usize,
    pub formulation: Formulation,
    pub seed: u64,
    pub spsa: SpsaConfig,
    pub qubit_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeTraceRecord {
    pub run_id: usize,
    pub pair_id: usize,
    pub seed: u64,
    pub trace: crate::optim::OptimizationTrace,
    pub final_objective: f64,
    pub best_expectation: f64,
    pub exact_min_energy: f64,
}

/// Spread of the objective across runs at one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub iteration: usize,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

pub fn experiment_vqe_traces(cfg: &VqeTraceConfig) -> Result<(Vec<VqeTraceRecord>, Vec<DispersionRow>)> {
    if cfg.num_pairs > 0 && cfg.edge_counts.is_empty() {
        return Err(Error::InvalidArgument("VQE traces need at least one edge count".into()));
    }
    let q = cfg.n * cfg.n;
    crate::exact::check_qubit_cap(q, cfg.qubit_cap, 16)?;
    let layout = AnsatzLayout::linear(q, cfg.reps);

    let pairs = (0..cfg.num_pairs)
        .map(|pair_id| {
            let m = cfg.edge_counts[pair_id % cfg.edge_counts.len()];
            let pair = generate_pair(cfg.n, m, true, derive_seed(cfg.seed, pair_id as u64))?;
            let p = build(cfg.formulation, &pair.g1, &pair.g2, Weights::default())?;
            let spec = enumerate_spectrum(&p, cfg.qubit_cap)?;
            let exact = solve_exact(&p, cfg.qubit_cap)?;
            Ok((p, spec, exact.min_energy))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<(usize, usize)> =
        (0..cfg.num_pairs).flat_map(|pair| (0..cfg.seeds_per_pair).map(move |s| (pair, s))).collect();
    let records = runs
        .into_par_iter()
        .enumerate()
        .map(|(run_id, (pair_id, s))| {
            let (p, spec, exact_min) = &pairs[pair_id];
            let seed = derive_seed(derive_seed(cfg.seed, pair_id as u64), 1000 + s as u64);
            let run_cfg = SpsaConfig { seed, ..cfg.spsa.clone() };
            let mut init = rng::from_seed(derive_seed(seed, 0x0E5E));
            let theta0: Vec<f64> = (0..layout.param_count())
                .map(|_| rand::Rng::gen_range(&mut init, -std::f64::consts::PI..=std::f64::consts::PI))
                .collect();
            let res = run_vqe_from(p, spec, &layout, &run_cfg, &theta0)?;
            Ok(VqeTraceRecord {
                run_id,
                pair_id,
                seed,
                final_objective: res.best_sampled_objective,
                best_expectation: res.best_expectation,
                exact_min_energy: *exact_min,
                trace: res.trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dispersion = dispersion(&records);
    Ok((records, dispersion))
}

/// Mean and population standard deviation of the objective across runs, per iteration.
pub fn dispersion(records: &[VqeTraceRecord]) -> Vec<DispersionRow> {
    let mut by_iter: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        for p in &r.trace.points {
            by_iter.entry(p.iteration).or_default().push(p.objective);
        }
    }
    by_iter
        .into_iter()
        .map(|(iteration, xs)| {
            let s = SummaryStats::from_values(&xs).expect("nonempty");
            DispersionRow { iteration, count: s.count, mean: s.mean, std: s.std }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub q3: f64,
    pub max: f64,
}

impl SummaryStats {
    /// Quartiles by linear interpolation between order statistics. `None` for no values.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let count = v.len();
        let mean = v.iter().sum::<f64>() / count as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
        let quantile = |p: f64| {
            let h = p * (count - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(SummaryStats {
            count,
            mean,
            median: quantile(0.5),
            std: var.sqrt(),
            min: v[0],
            q1: quantile(0.25),
            q3: quantile(0.75),
            max: v[count - 1],
        })
    }
}

/// Groups values by key and summarizes each group, in key order.
pub fn summarize<K: Ord>(items: impl IntoIterator<Item = (K, f64)>) -> BTreeMap<K, SummaryStats> {
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (k, x) in items {
        groups.entry(k).or_default().push(x);
    }
    groups.into_iter().filter_map(|(k, xs)| SummaryStats::from_values(&xs).map(|s| (k, s))).collect()
}

/// `|qaoa_energy|` of admitted records, grouped by `(n, m)`.
pub fn summarize_clusters(records: &[ClusterRecord]) -> BTreeMap<(usize, usize), SummaryStats> {
    summarize(records.iter().filter(|r| r.admitted).map(|r| ((r.n, r.m), r.qaoa_energy.abs())))
}
