use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use isoqubo::exact::{solve_exact, DEFAULT_QUBIT_CAP, EXTENDED_QUBIT_CAP};
use isoqubo::experiments::{
    experiment_clustering, experiment_edge_removal, experiment_vqe_traces, summarize, summarize_clusters,
    ClusterRecord, ClusteringConfig, EdgeRemovalConfig, EdgeRemovalRecord, QaoaSettings, SummaryStats, VqeTraceConfig,
};
use isoqubo::graph::{generate_pair, Graph, PairLabel};
use isoqubo::io::{self, Method, RunConfig, TraceRow, SCHEMA_VERSION};
use isoqubo::optim::{run_qaoa, run_vqe, QaoaMethod, RunOptions, SpsaConfig};
use isoqubo::plot;
use isoqubo::qubo::{build, Formulation, QuboProgram, Rational, Weights};
use isoqubo::rng::derive_seed;
use isoqubo::sim::AnsatzLayout;
use isoqubo::{Error, Result};

const QUBIT_CAP_ENV: &str = "ISOQUBO_QUBIT_CAP";
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "isoqubo", version, about = "Graph isomorphism via QUBO: exact enumeration, simulated QAOA and VQE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded connected graph pairs as edge-list files plus a manifest.
    Gen(GenArgs),
    /// Decide isomorphism of two edge-list graphs.
    Solve(SolveArgs),
    /// Write the QUBO program for a graph pair in text form.
    Qubo(QuboArgs),
    /// Run an experiment pipeline and write record CSVs plus a JSON report.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Print summary statistics for a record CSV.
    Summarize(SummarizeArgs),
    /// Render a record CSV as an SVG plot.
    ExportPlot(ExportPlotArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, conflicts_with = "non_iso")]
    iso: bool,
    #[arg(long)]
    non_iso: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct CapArgs {
    /// Maximum qubit count; defaults to $ISOQUBO_QUBIT_CAP, else 16 (25 with --extended).
    #[arg(long)]
    qubit_cap: Option<usize>,
    /// Allow up to 25 qubits.
    #[arg(long)]
    extended: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long, default_value = "calude")]
    formulation: Formulation,
    /// exact, qaoa or vqe.
    #[arg(long, default_value = "exact")]
    method: Method,
    /// QAOA layers; one layer uses the grid search unless --spsa is given.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Optimize QAOA angles with SPSA instead of the grid.
    #[arg(long)]
    spsa: bool,
    #[arg(long, default_value_t = 600)]
    max_iter: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Grid points per angle for the single-layer QAOA search.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    /// TwoLocal repetitions for VQE.
    #[arg(long, default_value_t = AnsatzLayout::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Penalty weight A, integer or p/q.
    #[arg(long, default_value = "1")]
    weight_a: Rational,
    /// Penalty weight B, integer or p/q.
    #[arg(long, default_value = "1")]
    weight_b: Rational,
    #[command(flatten)]
    cap: CapArgs,
    /// Result JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuboArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long, default_value = "calude")]
    formulation: Formulation,
    #[arg(long, default_value = "1")]
    weight_a: Rational,
    #[arg(long, default_value = "1")]
    weight_b: Rational,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct QaoaArgs {
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long)]
    spsa: bool,
    #[arg(long, default_value_t = 600)]
    max_iter: usize,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// QAOA energies of seeded pairs grouped by (n, m).
    Clustering {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        edge_counts: Vec<usize>,
        #[arg(long, default_value_t = 12)]
        num_pairs: usize,
        /// Alternate isomorphic and non-isomorphic pairs.
        #[arg(long)]
        non_iso: bool,
        #[arg(long, default_value = "calude")]
        formulation: Formulation,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[command(flatten)]
        qaoa: QaoaArgs,
        #[command(flatten)]
        cap: CapArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// QAOA along the edge-removal sequence of a complete graph.
    EdgeRemoval {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value = "calude")]
        formulation: Formulation,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent removal orders.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[command(flatten)]
        qaoa: QaoaArgs,
        #[command(flatten)]
        cap: CapArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// SPSA convergence traces of VQE on seeded isomorphic pairs.
    VqeTraces {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        edge_counts: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        num_pairs: usize,
        #[arg(long, default_value_t = 3)]
        seeds_per_pair: usize,
        #[arg(long, default_value_t = AnsatzLayout::DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value = "calude")]
        formulation: Formulation,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 600)]
        max_iter: usize,
        #[command(flatten)]
        cap: CapArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RecordKind {
    Clustering,
    EdgeRemoval,
    VqeTraces,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Record schema; detected from the header when absent.
    #[arg(long, value_enum)]
    kind: Option<RecordKind>,
    /// Optional JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportPlotArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: Option<RecordKind>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Qubo(a) => cmd_qubo(a),
        Command::Experiment(e) => cmd_experiment(e),
        Command::Summarize(a) => cmd_summarize(a),
        Command::ExportPlot(a) => cmd_export_plot(a),
    }
}

/// Flag, then environment, then default. Caps above 16 need `--extended`.
fn resolve_cap(cap: &CapArgs) -> Result<usize> {
    let limit = if cap.extended { EXTENDED_QUBIT_CAP } else { DEFAULT_QUBIT_CAP };
    let value = match cap.qubit_cap {
        Some(c) => c,
        None => match std::env::var(QUBIT_CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{QUBIT_CAP_ENV}=`{v}` is not a qubit count")))?,
            Err(_) => limit,
        },
    };
    if value > limit {
        let hint = if cap.extended { "" } else { "; pass --extended for up to 25" };
        return Err(Error::InvalidArgument(format!("qubit cap {value} exceeds {limit}{hint}")));
    }
    Ok(value)
}

fn qaoa_method(q: &QaoaArgs, seed: u64) -> QaoaMethod {
    if q.layers == 1 && !q.spsa {
        QaoaMethod::Grid { resolution: q.resolution }
    } else {
        QaoaMethod::Spsa(SpsaConfig::new(q.max_iter, seed))
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse_edge_list(&fs::read_to_string(path)?)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let want_iso = !a.non_iso;
    let mut cfg = RunConfig::new("gen", a.seed);
    cfg.n = Some(a.n);
    cfg.m = Some(a.m);
    cfg.output = Some(path_string(&a.out));
    cfg.optimizer =
        json!({ "count": a.count, "label": if want_iso { PairLabel::Isomorphic } else { PairLabel::NonIsomorphic } });

    let pairs = (0..a.count)
        .map(|k| generate_pair(a.n, a.m, want_iso, derive_seed(a.seed, k as u64)))
        .collect::<Result<Vec<_>>>()?;
    ensure_dir(&a.out)?;
    let mut entries = Vec::new();
    for (k, pair) in pairs.iter().enumerate() {
        let f1 = format!("pair_{k:03}_g1.txt");
        let f2 = format!("pair_{k:03}_g2.txt");
        fs::write(a.out.join(&f1), pair.g1.to_edge_list())?;
        fs::write(a.out.join(&f2), pair.g2.to_edge_list())?;
        entries.push(json!({
            "pair_id": k,
            "seed": pair.seed,
            "label": pair.intended_label,
            "g1": f1,
            "g2": f2,
            "witness": pair.witness,
        }));
        println!("pair {k}: {} {f1} {f2}", pair.intended_label);
    }
    let manifest = json!({ "schema_version": SCHEMA_VERSION, "run_config": cfg, "pairs": entries });
    io::write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(0)
}

fn cmd_qubo(a: QuboArgs) -> Result<u8> {
    let (g1, g2) = (read_graph(&a.g1)?, read_graph(&a.g2)?);
    let p = build(a.formulation, &g1, &g2, Weights::new(a.weight_a, a.weight_b)?)?;
    match a.out {
        Some(path) => fs::write(path, p.to_text())?,
        None => print!("{}", p.to_text()),
    }
    Ok(0)
}

#[derive(Serialize)]
struct SolveReport<'a> {
    schema_version: u32,
    run_config: &'a RunConfig,
    verdict: &'static str,
    num_vars: usize,
    #[serde(serialize_with = "ser_rational")]
    offset: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<isoqubo::exact::SolveResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variational: Option<isoqubo::optim::VariationalResult>,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let cap = resolve_cap(&a.cap)?;
    let (g1, g2) = (read_graph(&a.g1)?, read_graph(&a.g2)?);
    let p: QuboProgram = build(a.formulation, &g1, &g2, Weights::new(a.weight_a, a.weight_b)?)?;

    let mut cfg = RunConfig::new("solve", a.seed);
    cfg.inputs = vec![path_string(&a.g1), path_string(&a.g2)];
    cfg.output = a.out.as_deref().map(path_string);
    cfg.formulation = Some(a.formulation);
    cfg.method = Some(a.method);
    cfg.n = Some(g1.num_vertices());
    cfg.m = Some(g1.num_edges());
    cfg.restarts = a.restarts;
    cfg.qubit_cap = cap;
    cfg.extended_scale = a.cap.extended;
    let qa = QaoaArgs { layers: a.layers, spsa: a.spsa, max_iter: a.max_iter, resolution: a.resolution };
    let weights = [a.weight_a.to_string(), a.weight_b.to_string()];
    cfg.optimizer = match a.method {
        Method::Exact => json!({ "weights": weights }),
        Method::Qaoa => json!({ "layers": a.layers, "method": qaoa_method(&qa, a.seed), "weights": weights }),
        Method::Vqe => json!({ "reps": a.reps, "spsa": SpsaConfig::new(a.max_iter, a.seed), "weights": weights }),
    };
    let opts = RunOptions { qubit_cap: cap, restarts: a.restarts };

    let mut report = SolveReport {
        schema_version: SCHEMA_VERSION,
        run_config: &cfg,
        verdict: "",
        num_vars: p.num_vars(),
        offset: p.offset(),
        exact: None,
        variational: None,
    };
    let code = match a.method {
        Method::Exact => {
            let r = solve_exact(&p, cap)?;
            let iso = r.min_energy_exact == Rational::from_integer(0);
            report.verdict = if iso { "ISOMORPHIC" } else { "NON-ISOMORPHIC" };
            println!("{} min_energy={} ground_states={}", report.verdict, r.min_energy_exact, r.degeneracy);
            if let Some(f) = r.decoded.iter().find(|d| d.edge_invariant == Some(true)) {
                println!("mapping {}", serde_json::to_string(&f.mapping)?);
            }
            report.exact = Some(r);
            if iso {
                0
            } else {
                1
            }
        }
        Method::Qaoa | Method::Vqe => {
            let r = if a.method == Method::Qaoa {
                run_qaoa(&p, a.layers, &qaoa_method(&qa, a.seed), &opts)?
            } else {
                let layout = AnsatzLayout::linear(p.num_vars(), a.reps);
                run_vqe(&p, &layout, &SpsaConfig::new(a.max_iter, a.seed), &opts)?
            };
            let found = r.reached_zero();
            report.verdict = if found { "CANDIDATE" } else { "UNDECIDED" };
            println!(
                "{} best_sampled_objective={} best_expectation={:.6} bitstring={}",
                report.verdict, r.best_sampled_objective_exact, r.best_expectation, r.best_sampled_bitstring
            );
            report.variational = Some(r);
            if found {
                0
            } else {
                2
            }
        }
    };
    if let Some(out) = &a.out {
        io::write_json(out, &report)?;
    }
    Ok(code)
}

fn cmd_experiment(e: ExperimentCommand) -> Result<u8> {
    match e {
        ExperimentCommand::Clustering {
            n,
            edge_counts,
            num_pairs,
            non_iso,
            formulation,
            seed,
            restarts,
            qaoa,
            cap,
            out,
        } => {
            let qubit_cap = resolve_cap(&cap)?;
            let ecfg = ClusteringConfig {
                n,
                edge_counts,
                num_pairs,
                formulation,
                seed,
                include_non_isomorphic: non_iso,
                qaoa: QaoaSettings {
                    layers: qaoa.layers,
                    method: qaoa_method(&qaoa, seed),
                    options: RunOptions { qubit_cap, restarts },
                },
            };
            let cfg = experiment_config(
                "experiment clustering",
                seed,
                n,
                formulation,
                restarts,
                &cap,
                qubit_cap,
                &out,
                &ecfg,
            );
            let records = experiment_clustering(&ecfg)?;
            ensure_dir(&out)?;
            let csv = out.join("clustering.csv");
            io::write_csv(&csv, Some(&cfg.to_value()), &records)?;
            let summary = cluster_summary(&records);
            print_summary(&summary);
            let admitted = records.iter().filter(|r| r.admitted).count();
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "run_config": cfg,
                "records": path_string(&csv),
                "num_records": records.len(),
                "admitted": admitted,
                "summary": summary,
            });
            io::write_json(&out.join("report.json"), &report)?;
            println!("{} records ({admitted} admitted) -> {}", records.len(), csv.display());
        }
        ExperimentCommand::EdgeRemoval { n, formulation, seed, restarts, qaoa, cap, out } => {
            let qubit_cap = resolve_cap(&cap)?;
            let ecfg = EdgeRemovalConfig {
                start_n: n,
                seed,
                formulation,
                restarts,
                qaoa: QaoaSettings {
                    layers: qaoa.layers,
                    method: qaoa_method(&qaoa, seed),
                    options: RunOptions { qubit_cap, restarts: 1 },
                },
            };
            let cfg = experiment_config(
                "experiment edge-removal",
                seed,
                n,
                formulation,
                restarts,
                &cap,
                qubit_cap,
                &out,
                &ecfg,
            );
            let records = experiment_edge_removal(&ecfg)?;
            ensure_dir(&out)?;
            let csv = out.join("edge_removal.csv");
            io::write_csv(&csv, Some(&cfg.to_value()), &records)?;
            for r in &records {
                println!(
                    "restart {} step {} edges {} energy {:.6} objective {}",
                    r.restart, r.step, r.edges_remaining, r.qaoa_energy, r.objective_value
                );
            }
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "run_config": cfg,
                "records": path_string(&csv),
                "num_records": records.len(),
                "all_zero_objective": records.iter().all(|r| r.objective_value == 0.0),
                "summary": edge_removal_summary(&records),
            });
            io::write_json(&out.join("report.json"), &report)?;
        }
        ExperimentCommand::VqeTraces {
            n,
            edge_counts,
            num_pairs,
            seeds_per_pair,
            reps,
            formulation,
            seed,
            max_iter,
            cap,
            out,
        } => {
            let qubit_cap = resolve_cap(&cap)?;
            let ecfg = VqeTraceConfig {
                n,
                edge_counts,
                num_pairs,
                seeds_per_pair,
                reps,
                formulation,
                seed,
                spsa: SpsaConfig::new(max_iter, seed),
                qubit_cap,
            };
            let cfg = experiment_config("experiment vqe-traces", seed, n, formulation, 1, &cap, qubit_cap, &out, &ecfg);
            let (records, dispersion) = experiment_vqe_traces(&ecfg)?;
            ensure_dir(&out)?;
            let prov = cfg.to_value();
            let traces = out.join("vqe_traces.csv");
            io::write_csv(&traces, Some(&prov), &io::trace_rows(&records))?;
            let finals = out.join("vqe_final.csv");
            io::write_csv(&finals, Some(&prov), &io::final_rows(&records))?;
            let disp = out.join("vqe_dispersion.csv");
            io::write_csv(&disp, Some(&prov), &dispersion)?;
            for r in &records {
                println!(
                    "run {} pair {} seed {} final_objective {} best_expectation {:.6}",
                    r.run_id, r.pair_id, r.seed, r.final_objective, r.best_expectation
                );
            }
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "run_config": cfg,
                "traces": path_string(&traces),
                "finals": path_string(&finals),
                "dispersion": path_string(&disp),
                "num_runs": records.len(),
                "reached_zero": records.iter().filter(|r| r.final_objective == 0.0).count(),
                "final_dispersion": dispersion.last(),
            });
            io::write_json(&out.join("report.json"), &report)?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn experiment_config<T: Serialize>(
    command: &str,
    seed: u64,
    n: usize,
    formulation: Formulation,
    restarts: usize,
    cap: &CapArgs,
    qubit_cap: usize,
    out: &Path,
    settings: &T,
) -> RunConfig {
    let mut cfg = RunConfig::new(command, seed);
    cfg.n = Some(n);
    cfg.formulation = Some(formulation);
    cfg.restarts = restarts;
    cfg.qubit_cap = qubit_cap;
    cfg.extended_scale = cap.extended;
    cfg.output = Some(path_string(out));
    cfg.optimizer = serde_json::to_value(settings).expect("plain data serializes");
    cfg
}

fn cluster_summary(records: &[ClusterRecord]) -> BTreeMap<String, SummaryStats> {
    summarize_clusters(records).into_iter().map(|((n, m), s)| (format!("n={n},m={m}"), s)).collect()
}

fn edge_removal_summary(records: &[EdgeRemovalRecord]) -> BTreeMap<String, SummaryStats> {
    summarize(records.iter().map(|r| (r.edges_remaining, r.qaoa_energy)))
        .into_iter()
        .map(|(m, s)| (format!("edges={m}"), s))
        .collect()
}

fn trace_summary(rows: &[TraceRow]) -> BTreeMap<String, SummaryStats> {
    let last: BTreeMap<usize, f64> = io::traces_from_rows(rows)
        .into_iter()
        .filter_map(|(id, t)| t.points.last().map(|p| (id, p.objective)))
        .collect();
    summarize(last.into_values().map(|v| ("final_objective".to_string(), v)))
}

fn print_summary(summary: &BTreeMap<String, SummaryStats>) {
    println!(
        "{:<16} {:>5} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "group", "count", "mean", "median", "std", "min", "max"
    );
    for (k, s) in summary {
        println!(
            "{:<16} {:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            k, s.count, s.mean, s.median, s.std, s.min, s.max
        );
    }
}

fn detect_kind(text: &str) -> Option<RecordKind> {
    let header = text.lines().find(|l| !l.starts_with('#') && !l.trim().is_empty())?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.contains(&"relabel_energy_gap") {
        Some(RecordKind::Clustering)
    } else if cols.contains(&"edges_remaining") {
        Some(RecordKind::EdgeRemoval)
    } else if cols.contains(&"run_id") && cols.contains(&"iteration") {
        Some(RecordKind::VqeTraces)
    } else {
        None
    }
}

fn resolve_kind(text: &str, given: Option<RecordKind>) -> Result<RecordKind> {
    match given.or_else(|| detect_kind(text)) {
        Some(k) => Ok(k),
        None if text.lines().all(|l| l.starts_with('#') || l.trim().is_empty()) => {
            Err(Error::InvalidArgument("empty record file; pass --kind".into()))
        }
        None => Err(Error::Schema { row: 1, message: "header matches no known record schema".into() }),
    }
}

fn cmd_summarize(a: SummarizeArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.input)?;
    let kind = resolve_kind(&text, a.kind)?;
    let summary = match kind {
        RecordKind::Clustering => cluster_summary(&io::parse_csv(&text)?),
        RecordKind::EdgeRemoval => edge_removal_summary(&io::parse_csv(&text)?),
        RecordKind::VqeTraces => trace_summary(&io::parse_csv(&text)?),
    };
    print_summary(&summary);
    if let Some(out) = &a.out {
        let mut cfg = RunConfig::new("summarize", 0);
        cfg.inputs = vec![path_string(&a.input)];
        cfg.output = Some(path_string(out));
        cfg.optimizer = json!({ "kind": kind });
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "run_config": cfg,
            "source_run_config": io::csv_provenance(&text),
            "summary": summary,
        });
        io::write_json(out, &report)?;
    }
    Ok(0)
}

fn cmd_export_plot(a: ExportPlotArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.input)?;
    let kind = match a.kind {
        Some(k) => k,
        None => resolve_kind(&text, None)?,
    };
    let mut cfg = RunConfig::new("export-plot", 0);
    cfg.inputs = vec![path_string(&a.input)];
    cfg.output = Some(path_string(&a.out));
    cfg.optimizer = json!({ "kind": kind });
    let metadata =
        serde_json::to_string(&json!({ "run_config": cfg, "source_run_config": io::csv_provenance(&text) }))?;

    let svg = match kind {
        RecordKind::Clustering => {
            let records: Vec<ClusterRecord> = io::parse_csv(&text)?;
            let groups: Vec<(String, SummaryStats)> = cluster_summary(&records).into_iter().collect();
            plot::box_plot(&groups, "QAOA energy by graph size", "(n, m)", "|energy|", Some(&metadata))
        }
        RecordKind::EdgeRemoval => {
            let records: Vec<EdgeRemovalRecord> = io::parse_csv(&text)?;
            let mut series: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
            for r in &records {
                series.entry(r.restart).or_default().push((r.edges_remaining as f64, r.qaoa_energy));
            }
            let series: Vec<(String, Vec<(f64, f64)>)> =
                series.into_iter().map(|(k, pts)| (format!("order {k}"), pts)).collect();
            plot::line_plot(&series, "QAOA energy during edge removal", "edges remaining", "energy", Some(&metadata))
        }
        RecordKind::VqeTraces => {
            let rows: Vec<TraceRow> = io::parse_csv(&text)?;
            let series: Vec<(String, Vec<(f64, f64)>)> = io::traces_from_rows(&rows)
                .into_iter()
                .map(|(id, t)| {
                    (format!("run {id}"), t.points.iter().map(|p| (p.iteration as f64, p.objective)).collect())
                })
                .collect();
            plot::line_plot(&series, "VQE objective per iteration", "iteration", "objective", Some(&metadata))
        }
    };
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    fs::write(&a.out, svg)?;
    println!("wrote {}", a.out.display());
    Ok(0)
}
