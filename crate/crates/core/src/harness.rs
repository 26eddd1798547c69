//! Experiment driver behind the `hs2` binary: instance generation, analysis
//! and bound reports, and seeded trial sweeps that emit a results table.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{self, BoundInputs, BoundReport, BoundsError};
use crate::cut::{compare_with_ce, structural_params, CutError, StructuralParams, INFINITE};
use crate::datagen::{self, DatagenError, HsbmParams};
use crate::engine::{self, EngineError, NoisyOptions, RunResult};
use crate::hypergraph::Hypergraph;
use crate::labels::LabelFunction;
use crate::oracle::{NoiseMode, OracleError, PairwiseOracle, PointwiseOracle};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Hs2Point,
    Hs2Pair,
    Hs2PairNoisy,
    CeS2Point,
    CeS2Pair,
    CeS2PairNoisy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Hs2Point,
        Algorithm::Hs2Pair,
        Algorithm::Hs2PairNoisy,
        Algorithm::CeS2Point,
        Algorithm::CeS2Pair,
        Algorithm::CeS2PairNoisy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Hs2Point => "hs2-point",
            Algorithm::Hs2Pair => "hs2-pair",
            Algorithm::Hs2PairNoisy => "hs2-pair-noisy",
            Algorithm::CeS2Point => "ce-s2-point",
            Algorithm::CeS2Pair => "ce-s2-pair",
            Algorithm::CeS2PairNoisy => "ce-s2-pair-noisy",
        }
    }

    /// Runs on the clique expansion.
    pub fn is_ce(self) -> bool {
        matches!(self, Algorithm::CeS2Point | Algorithm::CeS2Pair | Algorithm::CeS2PairNoisy)
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, Algorithm::Hs2PairNoisy | Algorithm::CeS2PairNoisy)
    }

    pub fn is_pointwise(self) -> bool {
        matches!(self, Algorithm::Hs2Point | Algorithm::CeS2Point)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// The params' own seed is replaced by the instance seed of each trial.
    Hsbm(HsbmParams),
    File { hypergraph: PathBuf, labels: PathBuf },
    Knn { features: PathBuf, labels: PathBuf, r: usize },
}

impl InstanceSource {
    pub fn is_synthetic(&self) -> bool {
        matches!(self, InstanceSource::Hsbm(_))
    }

    pub fn load(&self, seed: u64) -> Result<(Hypergraph, LabelFunction), HarnessError> {
        let (g, f) = match self {
            InstanceSource::Hsbm(p) => datagen::hsbm(&HsbmParams { seed, ..*p })?,
            InstanceSource::File { hypergraph, labels } => {
                (datagen::load_hypergraph(hypergraph)?, datagen::load_labels(labels)?)
            }
            InstanceSource::Knn { features, labels, r } => {
                (datagen::knn_hypergraph(&datagen::load_features(features)?, *r)?, datagen::load_labels(labels)?)
            }
        };
        f.check_domain(g.num_nodes()).map_err(CutError::from)?;
        Ok((g, f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetSpec {
    Explicit(u64),
    QStar,
    QStarPair,
    Noisy,
}

impl FromStr for BudgetSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto:q_star" => Ok(BudgetSpec::QStar),
            "auto:q_star_pair" => Ok(BudgetSpec::QStarPair),
            "auto:noisy" => Ok(BudgetSpec::Noisy),
            _ => s
                .parse::<u64>()
                .map(BudgetSpec::Explicit)
                .map_err(|_| HarnessError::Config(format!("budget '{s}' is neither a count nor an auto mode"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSpec {
    Explicit(usize),
    Auto,
}

impl FromStr for SampleSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" || s == "auto:solve_min_M" {
            return Ok(SampleSpec::Auto);
        }
        s.parse::<usize>()
            .map(SampleSpec::Explicit)
            .map_err(|_| HarnessError::Config(format!("sample size '{s}' is neither a count nor 'auto'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub source: InstanceSource,
    pub budget: BudgetSpec,
    pub delta: f64,
    pub p: Option<f64>,
    pub noise_mode: NoiseMode,
    pub sample: SampleSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub workers: usize,
    /// `None` picks the default: regenerate synthetic instances per trial,
    /// reuse file-based ones.
    pub fix_instance: Option<bool>,
    pub skip_random_sampling: bool,
    /// Record wall-clock runtime; off keeps results byte-reproducible.
    pub timing: bool,
    /// Directory for per-trial oracle traces.
    pub trace_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, source: InstanceSource, budget: BudgetSpec) -> Self {
        ExperimentConfig {
            algorithm,
            source,
            budget,
            delta: 0.1,
            p: None,
            noise_mode: NoiseMode::Persistent,
            sample: SampleSpec::Auto,
            trials: 1,
            master_seed: 0,
            workers: 1,
            fix_instance: None,
            skip_random_sampling: false,
            timing: false,
            trace_dir: None,
        }
    }

    fn fixed(&self) -> bool {
        self.fix_instance.unwrap_or(!self.source.is_synthetic())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let conflict = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.trials == 0 {
            return conflict("trials must be at least 1");
        }
        if self.workers == 0 {
            return conflict("workers must be at least 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return conflict("delta must lie in (0, 1)");
        }
        match (self.algorithm.is_noisy(), self.p) {
            (true, None) => return conflict("noisy algorithms need p"),
            (true, Some(p)) if !(0.0..0.5).contains(&p) => return conflict("p must lie in [0, 1/2)"),
            (false, Some(p)) if p != 0.0 => return conflict("p > 0 needs a noisy algorithm"),
            _ => {}
        }
        match self.budget {
            BudgetSpec::Explicit(0) => return conflict("budget must be at least 1"),
            BudgetSpec::Noisy if !self.algorithm.is_noisy() => {
                return conflict("auto:noisy budget needs a noisy algorithm")
            }
            BudgetSpec::Noisy if self.p == Some(0.0) => return conflict("auto:noisy budget needs p > 0"),
            _ => {}
        }
        if self.algorithm.is_noisy() && self.sample == SampleSpec::Auto && self.p == Some(0.0) {
            return conflict("automatic sample size needs p > 0");
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        self.master_seed ^ trial
    }
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub k: usize,
    pub trial: u64,
    pub seed: u64,
    pub budget: u64,
    pub queries_used: u64,
    pub queries_until_recovery: Option<u64>,
    pub success: bool,
    pub accuracy: f64,
    pub runtime_ms: Option<f64>,
    pub params: StructuralParams,
}

pub const RESULTS_HEADER: &str = "algorithm,n,k,trial,seed,budget,queries_used,queries_until_recovery,success,accuracy,runtime_ms,beta,m,kappa,c_size,boundary_size";

fn kappa_text(kappa: Option<u32>) -> String {
    match kappa {
        None => String::new(),
        Some(INFINITE) => "inf".into(),
        Some(k) => k.to_string(),
    }
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.6},{},{:.6},{},{},{},{}",
            self.algorithm,
            self.n,
            self.k,
            self.trial,
            self.seed,
            self.budget,
            self.queries_used,
            self.queries_until_recovery.map(|q| q.to_string()).unwrap_or_default(),
            u8::from(self.success),
            self.accuracy,
            self.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            self.params.beta,
            self.params.m,
            kappa_text(self.params.kappa),
            self.params.c_size,
            self.params.boundary_size,
        )
    }
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub recovered: usize,
    /// Over trials that recovered the cut.
    pub mean_recovery: Option<f64>,
    pub std_recovery: Option<f64>,
    pub success_rate: f64,
    pub mean_queries_used: f64,
}

fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

impl Summary {
    pub fn of(rows: &[ResultRow]) -> Option<Summary> {
        let first = rows.first()?;
        let rec: Vec<f64> = rows.iter().filter_map(|r| r.queries_until_recovery).map(|q| q as f64).collect();
        let ms = mean_std(&rec);
        Some(Summary {
            algorithm: first.algorithm,
            trials: rows.len(),
            recovered: rec.len(),
            mean_recovery: ms.map(|m| m.0),
            std_recovery: ms.map(|m| m.1),
            success_rate: rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64,
            mean_queries_used: rows.iter().map(|r| r.queries_used as f64).sum::<f64>() / rows.len() as f64,
        })
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        writeln!(f, "algorithm  trials  recovered  mean_qur  std_qur  success_rate  mean_queries")?;
        write!(
            f,
            "{}  {}  {}  {}  {}  {:.3}  {:.3}",
            self.algorithm,
            self.trials,
            self.recovered,
            opt(self.mean_recovery),
            opt(self.std_recovery),
            self.success_rate,
            self.mean_queries_used
        )
    }
}

/// Budget and sample size a config resolves to on one analyzed instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub budget: u64,
    pub sample: Option<usize>,
}

pub fn resolve(config: &ExperimentConfig, params: &StructuralParams) -> Result<Resolved, HarnessError> {
    let p = config.p.unwrap_or(0.0);
    let inputs = || BoundInputs::from_params(params, config.delta, p);
    let noisy_parts = || -> Result<(f64, u64), HarnessError> {
        let i = inputs()?;
        let q4 = bounds::q_star(&BoundInputs { delta: config.delta / 4.0, ..i })?;
        let m = match config.sample {
            SampleSpec::Explicit(m) => m as u64,
            SampleSpec::Auto => bounds::solve_min_m(&bounds::SampleSizeInputs {
                k: i.k,
                beta: i.beta,
                p,
                delta: config.delta,
                q_star_quarter: q4,
            })?,
        };
        Ok((q4, m))
    };
    let sample = if config.algorithm.is_noisy() {
        let m = match config.sample {
            SampleSpec::Explicit(m) => m as u64,
            SampleSpec::Auto => noisy_parts()?.1,
        };
        if m > params.n as u64 {
            return Err(HarnessError::Config(format!("sample size {m} exceeds n = {}", params.n)));
        }
        Some(m as usize)
    } else {
        None
    };
    let budget = match config.budget {
        BudgetSpec::Explicit(b) => b,
        BudgetSpec::QStar => bounds::q_star(&inputs()?)?.ceil() as u64,
        BudgetSpec::QStarPair => bounds::q_star_pair(&inputs()?)?.ceil() as u64,
        BudgetSpec::Noisy => {
            let (q4, m) = noisy_parts()?;
            bounds::noisy_budget(params.k, p, m, q4)?.ceil() as u64
        }
    };
    Ok(Resolved { budget: budget.max(1), sample })
}

struct Instance {
    graph: Hypergraph,
    labels: LabelFunction,
    params: StructuralParams,
    cut: std::collections::BTreeSet<usize>,
}

fn prepare(config: &ExperimentConfig, seed: u64) -> Result<Instance, HarnessError> {
    let (g, f) = config.source.load(seed)?;
    let graph = if config.algorithm.is_ce() { g.clique_expansion() } else { g };
    let (params, profile) = structural_params(&graph, &f)?;
    Ok(Instance { graph, labels: f, params, cut: profile.cut_edges })
}

fn run_trial(config: &ExperimentConfig, trial: u64, shared: Option<&Instance>) -> Result<ResultRow, HarnessError> {
    let seed = config.trial_seed(trial);
    let own;
    let inst = match shared {
        Some(i) => i,
        None => {
            own = prepare(config, seed)?;
            &own
        }
    };
    let resolved = resolve(config, &inst.params)?;
    let tracing = config.trace_dir.is_some();
    let start = Instant::now();
    let (outcome, trace) = if config.algorithm.is_pointwise() {
        let mut o = PointwiseOracle::with_tracing(inst.labels.clone(), tracing);
        let out = engine::hs2_point(&inst.graph, &mut o, resolved.budget, seed)?;
        (out, o.ledger().export_trace())
    } else {
        let p = config.p.unwrap_or(0.0);
        let noise_seed = seed.rotate_left(32) ^ 0x6e6f_6973_65;
        let mut o = PairwiseOracle::new(inst.labels.clone(), p, config.noise_mode, noise_seed)?.with_tracing(tracing);
        let out = if config.algorithm.is_noisy() {
            let opts = NoisyOptions { skip_random_sampling: config.skip_random_sampling };
            engine::hs2_pair_noisy(&inst.graph, &mut o, resolved.budget, resolved.sample.unwrap(), seed, opts)?
        } else {
            engine::hs2_pair(&inst.graph, &mut o, resolved.budget, seed)?
        };
        (out, o.ledger().export_trace())
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    if let Some(dir) = &config.trace_dir {
        let path = dir.join(format!("{}_trial{trial}.trace", config.algorithm));
        fs::write(&path, trace).map_err(io_err(&path))?;
    }
    let result: RunResult = outcome.evaluate(&inst.cut);
    Ok(ResultRow {
        algorithm: config.algorithm,
        n: inst.params.n,
        k: inst.params.k,
        trial,
        seed,
        budget: resolved.budget,
        queries_used: result.queries_used,
        queries_until_recovery: result.queries_until_recovery,
        success: result.success,
        accuracy: result.label_accuracy(&inst.labels),
        runtime_ms: config.timing.then_some(elapsed),
        params: inst.params.clone(),
    })
}

/// Runs every trial and returns the rows in trial order.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    config.validate()?;
    if let Some(dir) = &config.trace_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let shared = if config.fixed() { Some(prepare(config, config.master_seed)?) } else { None };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t, shared.as_ref()))
            .collect::<Result<Vec<_>, _>>()
    })
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    fs::write(path, results_csv(rows)).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenerateSpec {
    Hsbm(HsbmParams),
    Knn { features: PathBuf, r: usize },
}

/// Writes the generated instance into `out_dir` and returns the written
/// paths followed by the manifest line.
pub fn generate(spec: &GenerateSpec, out_dir: &Path) -> Result<(Vec<PathBuf>, String), HarnessError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let graph_path = out_dir.join("hypergraph.txt");
    let mut written = vec![graph_path.clone()];
    let manifest = match spec {
        GenerateSpec::Hsbm(p) => {
            let (g, f) = datagen::hsbm(p)?;
            fs::write(&graph_path, g.to_text()).map_err(io_err(&graph_path))?;
            let label_path = out_dir.join("labels.txt");
            fs::write(&label_path, f.to_text()).map_err(io_err(&label_path))?;
            written.push(label_path);
            format!(
                "generator=hsbm n={} k={} d={} q_in={} q_out={} seed={} edges={}",
                p.n,
                p.k,
                p.d,
                p.q_in,
                p.q_out,
                p.seed,
                g.num_edges()
            )
        }
        GenerateSpec::Knn { features, r } => {
            let g = datagen::knn_hypergraph(&datagen::load_features(features)?, *r)?;
            fs::write(&graph_path, g.to_text()).map_err(io_err(&graph_path))?;
            format!("generator=knn features={} r={} n={} edges={}", features.display(), r, g.num_nodes(), g.num_edges())
        }
    };
    let manifest_path = out_dir.join("manifest.txt");
    fs::write(&manifest_path, format!("{manifest}\n")).map_err(io_err(&manifest_path))?;
    written.push(manifest_path);
    Ok((written, manifest))
}

fn params_lines(out: &mut String, prefix: &str, p: &StructuralParams) {
    let kappa = match p.kappa {
        None => "none".to_string(),
        Some(INFINITE) => "inf".to_string(),
        Some(k) => k.to_string(),
    };
    writeln!(out, "{prefix}n={}", p.n).unwrap();
    writeln!(out, "{prefix}k={}", p.k).unwrap();
    writeln!(out, "{prefix}beta={}", p.beta).unwrap();
    writeln!(out, "{prefix}m={}", p.m).unwrap();
    writeln!(out, "{prefix}kappa={kappa}").unwrap();
    writeln!(out, "{prefix}c_size={}", p.c_size).unwrap();
    writeln!(out, "{prefix}boundary_size={}", p.boundary_size).unwrap();
    writeln!(out, "{prefix}c_min={}", p.c_min).unwrap();
    writeln!(out, "{prefix}components_after_cut={}", p.components_after_cut).unwrap();
}

/// `key=value` report of the instance, its clique expansion and the five
/// comparison outcomes.
pub fn analyze(g: &Hypergraph, f: &LabelFunction) -> Result<String, HarnessError> {
    let cmp = compare_with_ce(g, f)?;
    let mut out = String::new();
    params_lines(&mut out, "", &cmp.original);
    params_lines(&mut out, "ce_", &cmp.expanded);
    writeln!(out, "beta_equal={}", cmp.beta_equal).unwrap();
    writeln!(out, "m_equal={}", cmp.m_equal).unwrap();
    writeln!(out, "kappa_equal={}", cmp.kappa_equal).unwrap();
    writeln!(out, "boundary_equal={}", cmp.boundary_equal).unwrap();
    writeln!(out, "min_not_larger={}", cmp.min_not_larger).unwrap();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Point,
    Pair,
    Noisy,
}

impl FromStr for BoundMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "point" => Ok(BoundMode::Point),
            "pair" => Ok(BoundMode::Pair),
            "noisy" => Ok(BoundMode::Noisy),
            _ => Err(HarnessError::Config(format!("unknown bound mode '{s}'"))),
        }
    }
}

/// Bound report for an analyzed instance; the `budget` line is the ceiled
/// budget of the chosen mode.
pub fn bound(
    g: &Hypergraph,
    f: &LabelFunction,
    delta: f64,
    p: f64,
    mode: BoundMode,
    sample: Option<u64>,
) -> Result<String, HarnessError> {
    if mode == BoundMode::Noisy && !(p > 0.0 && p < 0.5) {
        return Err(HarnessError::Config(format!("noisy mode needs p in (0, 1/2), got {p}")));
    }
    let (params, _) = structural_params(g, f)?;
    bound_from_inputs(&BoundInputs::from_params(&params, delta, p)?, mode, sample)
}

pub fn bound_from_inputs(inputs: &BoundInputs, mode: BoundMode, sample: Option<u64>) -> Result<String, HarnessError> {
    let report = BoundReport::compute(inputs, mode == BoundMode::Noisy, sample)?;
    let budget = match mode {
        BoundMode::Point => report.q_star,
        BoundMode::Pair => report.q_star_pair,
        BoundMode::Noisy => report.noisy.as_ref().map(|n| n.noisy_budget).unwrap_or_default(),
    };
    Ok(format!("{report}\nbudget={}\n", budget.ceil() as u64))
}
