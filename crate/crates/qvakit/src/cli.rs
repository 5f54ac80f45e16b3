//! Batch experiment driver behind the `qvakit` binary.
//!
//! Every subcommand reads an optional JSON configuration (unknown keys are
//! rejected), applies command-line overrides, and writes CSV tables that
//! start with a comment header recording the toolkit version, the SHA-256 of
//! the resolved configuration, and the seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{QvaError, Result};
use crate::graphs::{FingerprintParams, GraphSpec, MoveKind, SparseGraph, DENSE_LIMIT};
use crate::metrics::{
    amplification, convergence_potential, msv_graph, msv_hamming, variance_sweep, DenseModel,
    HammingModel, MsvMode, MsvResult, SubshellModel, VarianceOptions,
};
use crate::optimize::{optimize_ansatz, optimize_hybrid, subshell_optimal_times, NmOptions, QvaRun};
use crate::problems::{
    bits_for, builtin_instances, ingest_prices, InstanceFile, PmsInstance, PortfolioInstance,
};
use crate::qva::{
    constrained_permutation_graph, measurement_report, write_state_csv, Algorithm, Ansatz,
};

/// Default seed when neither the configuration nor `--seed` supplies one.
pub const DEFAULT_SEED: u64 = 2024;

// ============================================================================
// Arguments
// ============================================================================

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "qvakit", version, about = "Quantum variational algorithm analysis toolkit")]
pub struct Cli {
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (tables go to standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertices, degree, diameter, subshell count and convergence potential
    /// of mixer graphs.
    GraphReport,
    /// Target probability and phase discrepancy under perturbed
    /// phase-optimal costs.
    SweepVariance,
    /// Optimise an ansatz on a problem instance.
    RunQva {
        /// Algorithm name (e.g. qmoa, qaoa, qwoa, qwoa_cs).
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Instance: builtin name, `synthetic:n:A:seed`, or a JSON path.
        #[arg(long)]
        instance: Option<String>,
        /// Single layer count (replaces the configured list).
        #[arg(long)]
        p: Option<usize>,
        /// Number of repeats.
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Per-shell cost variance and mean shell variance.
    Msv {
        /// Algorithm whose mixer graph defines the shells.
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Instance: builtin name, `synthetic:n:A:seed`, or a JSON path.
        #[arg(long)]
        instance: Option<String>,
        /// Sample this many reference solutions instead of all.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Convergence potential and amplification of Hamming graphs.
    HammingScaling,
    /// Build a portfolio instance from a price CSV.
    IngestPrices {
        /// Price CSV: a date column then one adjusted-close column per asset.
        #[arg(long)]
        prices: PathBuf,
        /// Risk/return balance.
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        /// Net-position constraint.
        #[arg(long = "net", allow_hyphen_values = true)]
        net: i64,
    },
}

// ============================================================================
// Configurations
// ============================================================================

/// `graph-report` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphReportConfig {
    /// Graphs to analyse.
    pub graphs: Vec<GraphSpec>,
    /// Reference vertex.
    pub reference: usize,
    /// Subshell fingerprint settings.
    pub fingerprint: FingerprintParams,
}

impl Default for GraphReportConfig {
    fn default() -> Self {
        Self {
            graphs: benchmark_graphs(),
            reference: 0,
            fingerprint: FingerprintParams::default(),
        }
    }
}

/// The six mixer graphs of the benchmark comparison: two Hamming graphs,
/// the 168-vertex constrained permutation graph, the parity (Johnson
/// `J(9,4)`) and permutation (halved 8-cube) move graphs, and `K_128`.
pub fn benchmark_graphs() -> Vec<GraphSpec> {
    vec![
        GraphSpec::Hamming { n: 7, m: 2 },
        GraphSpec::Hamming { n: 3, m: 5 },
        GraphSpec::ConstrainedPermutation {
            counts: vec![1, 5, 2],
        },
        GraphSpec::MoveClosure {
            n_qubits: 9,
            seed: 0b1111,
            moves: GraphSpec::all_pairs(9),
            kind: MoveKind::Swap,
        },
        GraphSpec::MoveClosure {
            n_qubits: 8,
            seed: 0,
            moves: GraphSpec::all_pairs(8),
            kind: MoveKind::PairFlip,
        },
        GraphSpec::Complete { n: 128 },
    ]
}

/// `sweep-variance` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepVarianceConfig {
    /// Graph to analyse.
    pub graph: GraphSpec,
    /// Reference vertex.
    pub reference: usize,
    /// Variance grid.
    pub sigma2: Vec<f64>,
    /// Monte-Carlo seeds per grid point (`seed`, `seed + 1`, ...).
    pub seeds: usize,
    /// Base seed.
    pub seed: u64,
    /// Optimiser settings.
    pub optimizer: VarianceOptions,
    /// Subshell fingerprint settings.
    pub fingerprint: FingerprintParams,
}

impl Default for SweepVarianceConfig {
    fn default() -> Self {
        Self {
            graph: GraphSpec::Complete { n: 128 },
            reference: 0,
            sigma2: vec![0.0, 0.01, 0.05, 0.1],
            seeds: 20,
            seed: DEFAULT_SEED,
            optimizer: VarianceOptions::default(),
            fingerprint: FingerprintParams::default(),
        }
    }
}

/// `run-qva` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunQvaConfig {
    /// Ansatz.
    pub algorithm: Algorithm,
    /// Instance: builtin name, `synthetic:n:A:seed`, or a JSON path.
    pub instance: String,
    /// Layer counts to run.
    pub p: Vec<usize>,
    /// Seeded repeats per layer count.
    pub repeats: usize,
    /// Base seed.
    pub seed: u64,
    /// Use padded binary-sized registers for QMOA.
    pub padded: bool,
    /// Fix walk times to the subshell-optimal schedule and optimise only
    /// the phase angles.
    pub hybrid: bool,
    /// Explicit fixed walk times for the hybrid scheme (computed from the
    /// mixer's Hamming graph when absent).
    pub hybrid_times: Option<Vec<f64>>,
    /// Optimiser settings.
    pub optimizer: NmOptions,
    /// Number of states in the measurement report.
    pub report_top: usize,
    /// Divide portfolio costs by their mean magnitude (scheduling costs are
    /// always scaled by their mean).
    pub scale_portfolio_costs: bool,
}

impl Default for RunQvaConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Qmoa,
            instance: "schedule_b".into(),
            p: vec![5],
            repeats: 5,
            seed: DEFAULT_SEED,
            padded: false,
            hybrid: false,
            hybrid_times: None,
            optimizer: NmOptions::default(),
            report_top: 10,
            scale_portfolio_costs: false,
        }
    }
}

/// `msv` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MsvConfig {
    /// Algorithm whose mixer graph defines the shells.
    pub algorithm: Algorithm,
    /// Instance: builtin name, `synthetic:n:A:seed`, or a JSON path.
    pub instance: String,
    /// Exact or sampled evaluation.
    pub mode: MsvMode,
}

impl Default for MsvConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Qmoa,
            instance: "schedule_a".into(),
            mode: MsvMode::Exact,
        }
    }
}

/// `hamming-scaling` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HammingScalingConfig {
    /// Register counts.
    pub n: Vec<usize>,
    /// Register dimensions.
    pub m: Vec<usize>,
}

impl Default for HammingScalingConfig {
    fn default() -> Self {
        Self {
            n: (1..=6).collect(),
            m: (2..=8).collect(),
        }
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| QvaError::Config(format!("{}: {e}", p.display())))
        }
        None => Ok(T::default()),
    }
}

/// Resolve an instance reference: `schedule_a`, `schedule_b`,
/// `synthetic:n:A:seed` (portfolio, `eta = 0.5`), or a JSON file path.
pub fn load_instance(spec: &str) -> Result<InstanceFile> {
    if let Some((_, inst)) = builtin_instances().into_iter().find(|(name, _)| *name == spec) {
        return Ok(InstanceFile::Pms(inst));
    }
    if let Some(rest) = spec.strip_prefix("synthetic:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || QvaError::Config(format!("malformed synthetic instance '{spec}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: usize = parts[0].parse().map_err(|_| bad())?;
        let a: i64 = parts[1].parse().map_err(|_| bad())?;
        let seed: u64 = parts[2].parse().map_err(|_| bad())?;
        let inst = PortfolioInstance::synthetic(n, a, 0.5, seed);
        inst.validate()?;
        return Ok(InstanceFile::Portfolio(inst));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| QvaError::Config(format!("cannot read instance '{spec}': {e}")))?;
    InstanceFile::from_json(&text)
}

/// Build the ansatz for an algorithm/instance pair.
pub fn build_ansatz(instance: &InstanceFile, algorithm: Algorithm, p: usize, padded: bool) -> Result<Ansatz> {
    match instance {
        InstanceFile::Pms(inst) => Ansatz::pms(inst, algorithm, p, padded),
        InstanceFile::Portfolio(inst) => Ansatz::portfolio(inst, algorithm, p),
    }
}

// ============================================================================
// Output
// ============================================================================

/// Hex SHA-256 of the JSON serialisation of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)?;
    Ok(Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

struct Output {
    dir: Option<PathBuf>,
    header: String,
}

impl Output {
    fn new<T: Serialize>(dir: Option<&Path>, command: &str, config: &T, seed: Option<u64>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        let mut header = format!(
            "# qvakit {}\n# command: {command}\n# config-sha256: {}\n",
            env!("CARGO_PKG_VERSION"),
            config_hash(config)?
        );
        if let Some(s) = seed {
            header.push_str(&format!("# seed: {s}\n"));
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
            header,
        })
    }

    /// Write a table with the comment header.
    fn table(&self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut buf = self.header.clone().into_bytes();
        {
            let mut wr = csv::Writer::from_writer(&mut buf);
            wr.write_record(columns)?;
            for r in rows {
                wr.write_record(r)?;
            }
            wr.flush()?;
        }
        self.raw(name, &buf)
    }

    fn raw(&self, name: &str, bytes: &[u8]) -> Result<()> {
        match &self.dir {
            Some(d) => fs::write(d.join(name), bytes)?,
            None => {
                let mut out = std::io::stdout().lock();
                if !name.ends_with(".json") {
                    writeln!(out, "# file: {name}")?;
                }
                out.write_all(bytes)?;
            }
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

// ============================================================================
// Commands
// ============================================================================

/// Map an error to the process exit code: 2 for configuration and input
/// errors, 3 for numerical failures.
pub fn exit_code(err: &QvaError) -> i32 {
    match err {
        QvaError::Numerical(_) | QvaError::TooLarge { .. } => 3,
        _ => 2,
    }
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(QvaError::Config("--workers must be at least 1".into()));
        }
        // Only the first initialisation in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let cfg = cli.config.as_deref();
    let out = cli.out.as_deref();
    match cli.command {
        Command::GraphReport => cmd_graph_report(load_config(cfg)?, out),
        Command::SweepVariance => {
            let mut c: SweepVarianceConfig = load_config(cfg)?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            cmd_sweep_variance(c, out)
        }
        Command::RunQva {
            algorithm,
            instance,
            p,
            repeats,
        } => {
            let mut c: RunQvaConfig = load_config(cfg)?;
            if let Some(a) = algorithm {
                c.algorithm = a;
            }
            if let Some(i) = instance {
                c.instance = i;
            }
            if let Some(p) = p {
                c.p = vec![p];
            }
            if let Some(r) = repeats {
                c.repeats = r;
            }
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            cmd_run_qva(c, out)
        }
        Command::Msv {
            algorithm,
            instance,
            sample,
        } => {
            let mut c: MsvConfig = load_config(cfg)?;
            if let Some(a) = algorithm {
                c.algorithm = a;
            }
            if let Some(i) = instance {
                c.instance = i;
            }
            if let Some(k) = sample {
                let seed = match c.mode {
                    MsvMode::Sampled { seed, .. } => seed,
                    MsvMode::Exact => DEFAULT_SEED,
                };
                c.mode = MsvMode::Sampled { k, seed };
            }
            if let (Some(s), MsvMode::Sampled { k, .. }) = (cli.seed, c.mode) {
                c.mode = MsvMode::Sampled { k, seed: s };
            }
            cmd_msv(c, out)
        }
        Command::HammingScaling => cmd_hamming_scaling(load_config(cfg)?, out),
        Command::IngestPrices { prices, eta, net } => cmd_ingest_prices(&prices, eta, net, out),
    }
}

/// Graph characteristics table.
pub fn cmd_graph_report(c: GraphReportConfig, out: Option<&Path>) -> Result<()> {
    let o = Output::new(out, "graph-report", &c, None)?;
    let mut rows = Vec::new();
    for spec in &c.graphs {
        let r = graph_report_row(spec, c.reference, &c.fingerprint)?;
        rows.push(vec![
            spec.label(),
            r.vertices.to_string(),
            r.degree.to_string(),
            r.diameter.to_string(),
            r.subshells.to_string(),
            fmt(r.t_star),
            fmt(r.prob_star),
        ]);
    }
    o.table(
        "graph_report.csv",
        &["graph", "vertices", "degree", "diameter", "subshells", "t_star", "prob_star"],
        &rows,
    )
}

/// One row of the graph characteristics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReportRow {
    /// `|V|`.
    pub vertices: usize,
    /// Degree (maximum degree for irregular graphs).
    pub degree: usize,
    /// Diameter.
    pub diameter: usize,
    /// Number of subshells around the reference.
    pub subshells: usize,
    /// Optimal walk time.
    pub t_star: f64,
    /// Convergence potential.
    pub prob_star: f64,
}

/// Compute one graph's characteristics. Hamming graphs beyond the dense
/// limit use the closed-form coefficients.
pub fn graph_report_row(spec: &GraphSpec, reference: usize, fp: &FingerprintParams) -> Result<GraphReportRow> {
    spec.validate()?;
    if let GraphSpec::Hamming { n, m } = *spec {
        if spec.num_vertices()? > DENSE_LIMIT {
            let model = HammingModel::new(n, m)?;
            let cp = convergence_potential(&model);
            return Ok(GraphReportRow {
                vertices: spec.num_vertices()?,
                degree: spec.degree().unwrap_or(0),
                diameter: spec.diameter().unwrap_or(0),
                subshells: model.subshells().len(),
                t_star: cp.t_star,
                prob_star: cp.prob,
            });
        }
    }
    let g = spec.build()?;
    let model = DenseModel::new(&g, reference, fp)?;
    let cp = convergence_potential(&model);
    Ok(GraphReportRow {
        vertices: g.num_vertices(),
        degree: g.max_degree(),
        diameter: g.diameter_bfs()?,
        subshells: model.partition().subshell_count(),
        t_star: cp.t_star,
        prob_star: cp.prob,
    })
}

/// Variance-adjusted convergence sweep.
pub fn cmd_sweep_variance(c: SweepVarianceConfig, out: Option<&Path>) -> Result<()> {
    c.graph.validate()?;
    let o = Output::new(out, "sweep-variance", &c, Some(c.seed))?;
    let g = c.graph.build()?;
    let model = DenseModel::new(&g, c.reference, &c.fingerprint)?;
    let seeds: Vec<u64> = (0..c.seeds as u64).map(|i| c.seed.wrapping_add(i)).collect();
    let results = variance_sweep(&model, &c.sigma2, &seeds, &c.optimizer)?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                fmt(r.sigma2),
                r.seed.to_string(),
                fmt(r.prob),
                fmt(r.phi),
                fmt(r.t),
                fmt(r.gamma),
            ]
        })
        .collect();
    o.table("sweep_variance.csv", &["sigma2", "seed", "prob", "phi", "t", "gamma"], &rows)
}

/// Fixed walk times for the hybrid scheme: one per subshell of the mixer's
/// Hamming graph.
pub fn hybrid_times_for(instance: &InstanceFile, algorithm: Algorithm, padded: bool) -> Result<Vec<f64>> {
    let InstanceFile::Pms(inst) = instance else {
        return Err(QvaError::Config("hybrid times are derived only for scheduling instances".into()));
    };
    let model = match algorithm {
        Algorithm::Qmoa if !padded => HammingModel::new(inst.n, inst.m)?,
        Algorithm::Qaoa => HammingModel::new(inst.n * bits_for(inst.m), 2)?,
        _ => {
            return Err(QvaError::Config(format!(
                "no closed-form subshell coefficients for {algorithm}; give hybrid_times"
            )))
        }
    };
    Ok(subshell_optimal_times(&model))
}

/// Optimise an ansatz over a list of depths.
pub fn cmd_run_qva(c: RunQvaConfig, out: Option<&Path>) -> Result<()> {
    if c.p.is_empty() || c.repeats == 0 {
        return Err(QvaError::Config("need at least one p and one repeat".into()));
    }
    let o = Output::new(out, "run-qva", &c, Some(c.seed))?;
    let instance = load_instance(&c.instance)?;
    let times = if c.hybrid {
        Some(match &c.hybrid_times {
            Some(t) => t.clone(),
            None => hybrid_times_for(&instance, c.algorithm, c.padded)?,
        })
    } else {
        None
    };
    let mut ansatz = build_ansatz(&instance, c.algorithm, c.p[0], c.padded)?;
    if c.scale_portfolio_costs && matches!(instance, InstanceFile::Portfolio(_)) {
        ansatz.scale_costs_by_mean()?;
    }
    let mut rows = Vec::new();
    let mut trace_rows = Vec::new();
    let mut last: Option<QvaRun> = None;
    for &p in &c.p {
        ansatz.set_layers(p)?;
        let run = match &times {
            Some(t) => optimize_hybrid(&ansatz, t, c.repeats, c.seed, &c.optimizer)?,
            None => optimize_ansatz(&ansatz, c.repeats, c.seed, &c.optimizer)?,
        };
        for r in &run.repeats {
            rows.push(vec![
                p.to_string(),
                r.repeat.to_string(),
                fmt(r.expectation),
                fmt(r.ratio),
                fmt(r.optimum_probability),
                r.iterations.to_string(),
                r.evaluations.to_string(),
                r.converged.to_string(),
                r.params.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" "),
            ]);
            for (it, f) in &r.trace {
                trace_rows.push(vec![p.to_string(), r.repeat.to_string(), it.to_string(), fmt(*f)]);
            }
        }
        last = Some(run);
    }
    o.table(
        "run_qva.csv",
        &[
            "p",
            "repeat",
            "expectation",
            "approximation_ratio",
            "optimum_probability",
            "iterations",
            "evaluations",
            "converged",
            "params",
        ],
        &rows,
    )?;
    o.table("trace.csv", &["p", "repeat", "iteration", "objective"], &trace_rows)?;

    let run = last.expect("at least one p");
    let state = ansatz.evolve(&run.incumbent().params)?;
    let report = measurement_report(&state, ansatz.costs(), c.report_top.max(1))?;
    let report_rows: Vec<Vec<String>> = report
        .iter()
        .enumerate()
        .map(|(rank, e)| {
            vec![
                rank.to_string(),
                e.index.to_string(),
                ansatz.encoding().label(e.index),
                fmt(e.probability),
                fmt(e.cost),
                fmt(e.phase),
            ]
        })
        .collect();
    o.table(
        "report.csv",
        &["rank", "index", "solution", "probability", "cost", "phase"],
        &report_rows,
    )?;
    let mut buf = o.header.clone().into_bytes();
    write_state_csv(&mut buf, &state, ansatz.costs())?;
    o.raw("state.csv", &buf)
}

/// Costs and shell metric of an algorithm's mixer graph, then the MSV.
pub fn msv_for(instance: &InstanceFile, algorithm: Algorithm, mode: &MsvMode) -> Result<MsvResult> {
    match (instance, algorithm) {
        (InstanceFile::Pms(inst), Algorithm::Qmoa | Algorithm::Qaoa) => {
            let (costs, n, m) = pms_msv_costs(inst, algorithm);
            msv_hamming(&costs, n, m, mode)
        }
        (InstanceFile::Portfolio(inst), Algorithm::Qwoa | Algorithm::QwoaCs | Algorithm::QwoaCsDisjoint) => {
            let partition = inst.partition()?;
            let costs = inst.valid_costs(&partition)?;
            let graph = match algorithm {
                Algorithm::Qwoa => GraphSpec::Complete { n: costs.len() }.build()?,
                _ => {
                    // Transposition edges within parts plus all edges between
                    // parts (the QWOA-CS mixer's two walks combined).
                    let cp = constrained_permutation_graph(&partition)?;
                    let labels = partition.part_labels()?;
                    SparseGraph::from_fn(costs.len(), |v, out| {
                        out.extend(cp.neighbors(v));
                        if algorithm == Algorithm::QwoaCs {
                            out.extend((0..labels.len()).filter(|&u| labels[u] != labels[v]));
                        }
                    })
                }
            };
            msv_graph(&graph, &costs, mode)
        }
        (_, other) => Err(QvaError::Config(format!(
            "MSV is not defined for {other} on this instance type"
        ))),
    }
}

/// Mean-scaled cost table and Hamming-graph shape `(costs, n, m)` of a
/// scheduling instance under QMOA (`H(n, m)`) or QAOA (`H(n ceil(log2 m), 2)`,
/// penalised).
pub fn pms_msv_costs(inst: &PmsInstance, algorithm: Algorithm) -> (Vec<f64>, usize, usize) {
    let (radix, n, m) = match algorithm {
        Algorithm::Qaoa => (1usize << bits_for(inst.m), inst.n * bits_for(inst.m), 2),
        _ => (inst.m, inst.n, inst.m),
    };
    let mut costs = inst.cost_table(radix);
    let valid = inst.valid_mask(radix);
    let (s, k) = costs
        .iter()
        .zip(&valid)
        .filter(|(_, &v)| v)
        .fold((0.0, 0usize), |(s, k), (c, _)| (s + c, k + 1));
    crate::problems::scale_by_mean(&mut costs, s / k as f64);
    (costs, n, m)
}

/// Mean shell variance table.
pub fn cmd_msv(c: MsvConfig, out: Option<&Path>) -> Result<()> {
    let seed = match c.mode {
        MsvMode::Sampled { seed, .. } => Some(seed),
        MsvMode::Exact => None,
    };
    let o = Output::new(out, "msv", &c, seed)?;
    let instance = load_instance(&c.instance)?;
    let r = msv_for(&instance, c.algorithm, &c.mode)?;
    let mut rows = Vec::new();
    for (d, (s, v)) in r.shell_sizes.iter().zip(&r.shell_variance).enumerate() {
        rows.push(vec!["shell_size".into(), d.to_string(), fmt(*s)]);
        rows.push(vec!["shell_variance".into(), d.to_string(), fmt(*v)]);
    }
    rows.push(vec!["msv".into(), String::new(), fmt(r.msv)]);
    rows.push(vec!["references".into(), String::new(), r.references.to_string()]);
    o.table("msv.csv", &["quantity", "d", "value"], &rows)
}

/// Hamming scaling table.
pub fn cmd_hamming_scaling(c: HammingScalingConfig, out: Option<&Path>) -> Result<()> {
    let o = Output::new(out, "hamming-scaling", &c, None)?;
    let mut rows = Vec::new();
    for &m in &c.m {
        let single = amplification(1, m)?.prob_star;
        for &n in &c.n {
            let a = amplification(n, m)?;
            let t = convergence_potential(&HammingModel::new(n, m)?).t_star;
            rows.push(vec![
                n.to_string(),
                m.to_string(),
                fmt(t),
                fmt(a.prob_star),
                fmt(a.amplification),
                a.closed_form.map(fmt).unwrap_or_default(),
                fmt((a.prob_star - single.powi(n as i32)).abs()),
            ]);
        }
    }
    o.table(
        "hamming_scaling.csv",
        &["n", "m", "t_star", "prob_star", "amplification", "closed_form", "power_law_error"],
        &rows,
    )
}

/// Convert a price CSV to a portfolio instance JSON file.
pub fn cmd_ingest_prices(prices: &Path, eta: f64, net: i64, out: Option<&Path>) -> Result<()> {
    let file = fs::File::open(prices)?;
    let inst = ingest_prices(file, eta, net)?;
    let json = serde_json::to_string_pretty(&InstanceFile::Portfolio(inst))?;
    let o = Output::new(out, "ingest-prices", &(prices, eta, net), None)?;
    o.raw("instance.json", format!("{json}\n").as_bytes())
}
