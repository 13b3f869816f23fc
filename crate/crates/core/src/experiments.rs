//! Monte Carlo drivers: seeded trials, success-rate estimates with score
//! intervals, bisection over the augmentation constant, and report files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::absorption::{assemble, PipelineParams, Stage};
use crate::augment::{sample_gnp, union};
use crate::constructions::{dense_host, extremal_graph, ExtremalSpec};
use crate::edgelist;
use crate::graph::Graph;
use crate::rng;
use crate::search::{find_power_ham_cycle, verify_certificate, CycleCertificate, SearchBudget, SearchOutcome};

/// Largest `n` for exact search in experiments.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("bracket does not straddle {target}: rate({lo}) = {lo_rate}, rate({hi}) = {hi_rate}")]
    BracketInvalid {
        lo: f64,
        hi: f64,
        lo_rate: f64,
        hi_rate: f64,
        target: f64,
    },
    #[error("host graph: {0}")]
    Host(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Pipeline,
    Exact,
    PipelineThenExact,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pipeline" => Ok(Mode::Pipeline),
            "exact" => Ok(Mode::Exact),
            "pipeline-then-exact" => Ok(Mode::PipelineThenExact),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// Where the deterministic part of each trial comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Host {
    /// [`dense_host`] with a per-trial seed.
    Dense,
    /// The extremal graph for `(k, n, ε)`.
    Extremal,
    Complete,
    File(PathBuf),
}

impl FromStr for Host {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "dense" => Host::Dense,
            "extremal" => Host::Extremal,
            "complete" => Host::Complete,
            _ => match s.strip_prefix("file:") {
                Some(path) => Host::File(PathBuf::from(path)),
                None => return Err(format!("unknown host {s:?}")),
            },
        })
    }
}

/// A batch of trials, read from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    /// Defaults to `α − k/(k+1)`.
    pub eps: Option<f64>,
    /// Override the desk preset.
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub m: Option<usize>,
    pub c_grid: Vec<f64>,
    pub c_range: Option<(f64, f64)>,
    pub trials: usize,
    pub confidence: f64,
    pub mode: Mode,
    pub seed: u64,
    pub host: Host,
    /// Target success rate for bisection.
    pub target: f64,
    /// Bisection stops once the bracket is at most this wide.
    pub tolerance: f64,
    pub max_steps: usize,
    pub exact_nodes: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 1,
            n: 60,
            alpha: 0.58,
            eps: None,
            gamma: None,
            beta: None,
            m: None,
            c_grid: Vec::new(),
            c_range: None,
            trials: 100,
            confidence: 0.95,
            mode: Mode::Pipeline,
            seed: 1,
            host: Host::Dense,
            target: 0.9,
            tolerance: 1.0,
            max_steps: 12,
            exact_nodes: 50_000_000,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ExperimentError::Config { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(v: &str) -> Result<T, String>
            where
                T::Err: std::fmt::Display,
            {
                v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
            }
            let set: Result<(), String> = (|| {
                match key {
                    "k" => cfg.k = num(value)?,
                    "n" => cfg.n = num(value)?,
                    "alpha" => cfg.alpha = num(value)?,
                    "eps" => cfg.eps = Some(num(value)?),
                    "gamma" => cfg.gamma = Some(num(value)?),
                    "beta" => cfg.beta = Some(num(value)?),
                    "m" => cfg.m = Some(num(value)?),
                    "c_grid" => cfg.c_grid = parse_list(value)?,
                    "c_range" => match parse_list(value)?[..] {
                        [lo, hi] => cfg.c_range = Some((lo, hi)),
                        _ => return Err("c_range takes two values".into()),
                    },
                    "trials" => cfg.trials = num(value)?,
                    "confidence" => cfg.confidence = num(value)?,
                    "mode" => cfg.mode = value.parse()?,
                    "seed" => cfg.seed = num(value)?,
                    "host" => cfg.host = value.parse()?,
                    "target" => cfg.target = num(value)?,
                    "tolerance" => cfg.tolerance = num(value)?,
                    "max_steps" => cfg.max_steps = num(value)?,
                    "exact_nodes" => cfg.exact_nodes = num(value)?,
                    _ => return Err(format!("unknown key {key:?}")),
                }
                Ok(())
            })();
            set.map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let lower = self.k as f64 / (self.k as f64 + 1.0);
        let fail = |m: String| Err(ExperimentError::Invalid(m));
        if !(self.alpha > lower && self.alpha < 1.0) {
            return fail(format!("alpha = {} outside ({lower}, 1)", self.alpha));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.mode == Mode::Exact && self.n > EXACT_LIMIT {
            return fail(format!("exact mode needs n <= {EXACT_LIMIT}"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return fail(format!("confidence = {} outside (0, 1)", self.confidence));
        }
        if self.c_grid.iter().chain(self.c_range.iter().flat_map(|r| [&r.0, &r.1])).any(|&c| c < 0.0) {
            return fail("augmentation constants must be non-negative".into());
        }
        Ok(())
    }

    pub fn eps(&self) -> f64 {
        self.eps
            .unwrap_or(self.alpha - self.k as f64 / (self.k as f64 + 1.0))
    }

    /// Hex FNV-1a hash of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", rng::fnv1a(json.as_bytes()))
    }

    /// Pipeline parameters for constant `c` and a trial seed.
    pub fn pipeline_params(&self, c: f64, seed: u64) -> PipelineParams {
        let mut p = PipelineParams::desk_preset(self.k, self.n, self.alpha, c, seed);
        p.eps = self.eps();
        if let Some(g) = self.gamma {
            p.gamma = g;
        }
        if let Some(b) = self.beta {
            p.beta = b;
        }
        if let Some(m) = self.m {
            p.m = m;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Success,
    StageFailure { stage: Stage },
    Absent,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
    pub stages_ms: BTreeMap<Stage, f64>,
}

/// One trial. Everything except `timing` is a function of the config and
/// the trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub trial: usize,
    pub c: f64,
    pub sub_seed: u64,
    pub host_id: String,
    pub outcome: Outcome,
    /// `pipeline` or `exact`.
    pub decided_by: String,
    pub retries: BTreeMap<Stage, usize>,
    /// Relative to the batch output directory.
    pub certificate: Option<PathBuf>,
    pub timing: Timing,
}

fn host_graph(cfg: &ExperimentConfig, seed: u64) -> Result<(Graph, String), ExperimentError> {
    let host = |e: &dyn std::fmt::Display| ExperimentError::Host(e.to_string());
    Ok(match &cfg.host {
        Host::Dense => {
            let s = rng::labelled_seed(seed, "host", 0);
            (dense_host(cfg.n, cfg.alpha, s).map_err(|e| host(&e))?, format!("dense:{s:016x}"))
        }
        Host::Extremal => {
            let spec = ExtremalSpec::new(cfg.k, cfg.n, cfg.eps()).map_err(|e| host(&e))?;
            (
                extremal_graph(&spec).map_err(|e| host(&e))?,
                format!("extremal:k{}:n{}:eps{}", cfg.k, cfg.n, cfg.eps()),
            )
        }
        Host::Complete => (Graph::complete(cfg.n), format!("complete:n{}", cfg.n)),
        Host::File(path) => {
            let g = edgelist::read(path).map_err(|e| host(&e))?;
            if g.n() != cfg.n {
                return Err(ExperimentError::Host(format!("{} has n = {}, config says {}", path.display(), g.n(), cfg.n)));
            }
            (g, format!("file:{}", path.display()))
        }
    })
}

fn exact(h: &Graph, r: usize, nodes: u64) -> (Outcome, Option<CycleCertificate>) {
    match find_power_ham_cycle(h, r, SearchBudget::nodes(nodes)) {
        Ok(SearchOutcome::Found(c)) => (Outcome::Success, Some(c)),
        Ok(SearchOutcome::Absent) => (Outcome::Absent, None),
        Ok(SearchOutcome::BudgetExhausted) | Err(_) => (Outcome::Unknown, None),
    }
}

/// Runs trial `i` at constant `c`. The host, random part and pipeline
/// randomness derive from `sub_seed(seed, i)`, so the same trial index
/// sees the same host and a coupled random part for every `c`.
///
/// Successful certificates are written under `cert_dir` (when given),
/// read back, and re-verified.
pub fn run_trial(
    cfg: &ExperimentConfig,
    c: f64,
    i: usize,
    cert_dir: Option<&Path>,
) -> Result<RunRecord, ExperimentError> {
    let start = Instant::now();
    let sub = rng::sub_seed(cfg.seed, i as u64);
    let (g, host_id) = host_graph(cfg, sub)?;
    let n = g.n();
    let p = (c / n as f64).min(1.0);
    let h = union(&g, &sample_gnp(n, p, rng::labelled_seed(sub, "gnp", 0)).expect("p in [0,1]"))
        .expect("same vertex set");
    let r = cfg.k + 1;
    let mut retries = BTreeMap::new();
    let mut stages_ms = BTreeMap::new();
    let (mut outcome, mut cert, mut decided_by) = (Outcome::Unknown, None, "pipeline");
    if cfg.mode != Mode::Exact {
        let asm = assemble(&h, &cfg.pipeline_params(c, rng::labelled_seed(sub, "pipeline", 0)));
        retries = asm.retries();
        for e in &asm.trace {
            *stages_ms.entry(e.stage).or_insert(0.0) += e.micros as f64 / 1000.0;
        }
        match asm.outcome {
            Ok(c) => {
                outcome = Outcome::Success;
                cert = Some(c);
            }
            Err(f) => outcome = Outcome::StageFailure { stage: f.stage },
        }
    }
    let fallback = cfg.mode == Mode::PipelineThenExact && outcome != Outcome::Success && n <= EXACT_LIMIT;
    if cfg.mode == Mode::Exact || fallback {
        (outcome, cert) = exact(&h.union, r, cfg.exact_nodes);
        decided_by = "exact";
    }
    let certificate = match (&cert, cert_dir) {
        (Some(cert), Some(dir)) => {
            let rel = Path::new("certs").join(format!("c{c}_t{i:05}.txt"));
            let path = dir.join(&rel);
            fs::create_dir_all(path.parent().unwrap())?;
            fs::write(&path, cert.to_text())?;
            let back = CycleCertificate::from_text(&fs::read_to_string(&path)?, r)
                .map_err(|e| ExperimentError::Invalid(format!("certificate {}: {e}", path.display())))?;
            if !verify_certificate(&h.union, &back) {
                return Err(ExperimentError::Invalid(format!("certificate {} does not verify", path.display())));
            }
            Some(rel)
        }
        _ => None,
    };
    Ok(RunRecord {
        config_hash: cfg.hash(),
        trial: i,
        c,
        sub_seed: sub,
        host_id,
        outcome,
        decided_by: decided_by.into(),
        retries,
        certificate,
        timing: Timing {
            total_ms: start.elapsed().as_secs_f64() * 1000.0,
            stages_ms,
        },
    })
}

/// A rayon pool capped by `HPL_THREADS` (unset or 0: one thread per core).
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("HPL_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs all trials at `c` concurrently, returning records in trial order.
pub fn run_point(cfg: &ExperimentConfig, c: f64, cert_dir: Option<&Path>) -> Result<Vec<RunRecord>, ExperimentError> {
    thread_pool().install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, c, i, cert_dir))
            .collect()
    })
}

/// Success rate at one `c` with a Wilson score interval.
///
/// `rate` and the interval are over decided trials; unknown outcomes
/// are kept apart and bracketed by `pessimistic` (all fail) and
/// `optimistic` (all succeed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub c: f64,
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    pub unknowns: usize,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub optimistic: f64,
    pub pessimistic: f64,
    pub mean_ms: f64,
}

impl SuccessEstimate {
    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

/// Wilson score interval for `s` successes in `n` trials.
pub fn wilson_interval(s: usize, n: usize, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let (sf, nf) = (s as f64, n as f64);
    let phat = sf / nf;
    let denom = 1.0 + z * z / nf;
    let center = (phat + z * z / (2.0 * nf)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / nf + z * z / (4.0 * nf * nf)).sqrt();
    let lo = if s == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if s == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Aggregates the records of one `c` value.
pub fn estimate_success(records: &[RunRecord], c: f64, confidence: f64) -> SuccessEstimate {
    let trials = records.len();
    let successes = records.iter().filter(|r| r.outcome == Outcome::Success).count();
    let unknowns = records.iter().filter(|r| r.outcome == Outcome::Unknown).count();
    let failures = trials - successes - unknowns;
    let decided = successes + failures;
    let (ci_lo, ci_hi) = wilson_interval(successes, decided, confidence);
    let frac = |x: usize| if trials == 0 { 0.0 } else { x as f64 / trials as f64 };
    SuccessEstimate {
        c,
        trials,
        successes,
        failures,
        unknowns,
        rate: if decided == 0 { 0.0 } else { successes as f64 / decided as f64 },
        ci_lo,
        ci_hi,
        optimistic: frac(successes + unknowns),
        pessimistic: frac(successes),
        mean_ms: if trials == 0 {
            0.0
        } else {
            records.iter().map(|r| r.timing.total_ms).sum::<f64>() / trials as f64
        },
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub records: Vec<RunRecord>,
    pub estimates: Vec<SuccessEstimate>,
}

/// Runs every grid point and writes `records.jsonl`, `summary.csv` and
/// `curve.dat` into `out`.
pub fn run_batch(cfg: &ExperimentConfig, out: &Path) -> Result<BatchResult, ExperimentError> {
    cfg.validate()?;
    if cfg.c_grid.is_empty() {
        return Err(ExperimentError::Invalid("c_grid is empty".into()));
    }
    fs::create_dir_all(out)?;
    let mut records = Vec::new();
    let mut estimates = Vec::new();
    for &c in &cfg.c_grid {
        let point = run_point(cfg, c, Some(out))?;
        estimates.push(estimate_success(&point, c, cfg.confidence));
        records.extend(point);
    }
    write_records(&records, &out.join("records.jsonl"))?;
    emit_report(&estimates, out)?;
    Ok(BatchResult { records, estimates })
}

pub fn write_records(records: &[RunRecord], path: &Path) -> Result<(), ExperimentError> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut f, r).map_err(std::io::Error::from)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "c", "trials", "successes", "failures", "unknowns", "rate", "ci_lo", "ci_hi", "mean_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub c: f64,
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    pub unknowns: usize,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_ms: f64,
}

/// Writes `summary.csv` (one row per `c`) and `curve.dat` (`c rate` per
/// line) into `dir`.
pub fn emit_report(estimates: &[SuccessEstimate], dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(dir.join("summary.csv"))?;
    w.write_record(SUMMARY_HEADER)?;
    let mut curve = String::new();
    for e in estimates {
        w.serialize(SummaryRow {
            c: e.c,
            trials: e.trials,
            successes: e.successes,
            failures: e.failures,
            unknowns: e.unknowns,
            rate: e.rate,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            mean_ms: e.mean_ms,
        })?;
        curve.push_str(&format!("{} {}\n", e.c, e.rate));
    }
    w.flush()?;
    fs::write(dir.join("curve.dat"), curve)?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Bisection {
    pub lo: SuccessEstimate,
    pub hi: SuccessEstimate,
    pub steps: usize,
    /// Every point evaluated, in order.
    pub evaluated: Vec<SuccessEstimate>,
}

/// Bisects `cfg.c_range` for the smallest `c` whose success rate reaches
/// `cfg.target`, assuming the rate is monotone in `c`.
pub fn threshold_bisect(cfg: &ExperimentConfig) -> Result<Bisection, ExperimentError> {
    cfg.validate()?;
    let (mut lo_c, mut hi_c) = cfg
        .c_range
        .ok_or_else(|| ExperimentError::Invalid("c_range is required".into()))?;
    let mut evaluated = Vec::new();
    let mut eval = |c: f64| -> Result<SuccessEstimate, ExperimentError> {
        let e = estimate_success(&run_point(cfg, c, None)?, c, cfg.confidence);
        evaluated.push(e.clone());
        Ok(e)
    };
    let mut lo = eval(lo_c)?;
    if lo_c == hi_c {
        return Ok(Bisection {
            hi: lo.clone(),
            lo,
            steps: 0,
            evaluated,
        });
    }
    let mut hi = eval(hi_c)?;
    if !(lo.rate < cfg.target && hi.rate >= cfg.target) {
        return Err(ExperimentError::BracketInvalid {
            lo: lo_c,
            hi: hi_c,
            lo_rate: lo.rate,
            hi_rate: hi.rate,
            target: cfg.target,
        });
    }
    let mut steps = 0;
    while hi_c - lo_c > cfg.tolerance && steps < cfg.max_steps {
        let mid = (lo_c + hi_c) / 2.0;
        let e = eval(mid)?;
        if e.rate >= cfg.target {
            (hi_c, hi) = (mid, e);
        } else {
            (lo_c, lo) = (mid, e);
        }
        steps += 1;
    }
    Ok(Bisection {
        lo,
        hi,
        steps,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config() {
        let cfg = ExperimentConfig::parse(
            "# sweep\nk = 0\nn = 30\nalpha = 0.55\nc_grid = 1, 2.5,10\ntrials = 7\nmode = pipeline-then-exact\nhost = extremal\n",
        )
        .unwrap();
        assert_eq!(cfg.k, 0);
        assert_eq!(cfg.c_grid, vec![1.0, 2.5, 10.0]);
        assert_eq!(cfg.mode, Mode::PipelineThenExact);
        assert_eq!(cfg.host, Host::Extremal);
        assert!((cfg.eps() - 0.55).abs() < 1e-12);
        assert!(matches!(
            ExperimentConfig::parse("k = 1\nbogus = 3\n"),
            Err(ExperimentError::Config { line: 2, .. })
        ));
        assert!(matches!(ExperimentConfig::parse("k = 1\nalpha = 0.4\n"), Err(ExperimentError::Invalid(_))));
        assert!(matches!(
            ExperimentConfig::parse("mode = exact\nn = 20\n"),
            Err(ExperimentError::Invalid(_))
        ));
        assert!(matches!(ExperimentConfig::parse("trials = 0\n"), Err(ExperimentError::Invalid(_))));
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { seed: 2, ..a.clone() };
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(100, 100, 0.95);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0 && lo > 0.9);
        let (lo, hi) = wilson_interval(0, 100, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
        let w100 = {
            let (l, h) = wilson_interval(50, 100, 0.95);
            h - l
        };
        let w400 = {
            let (l, h) = wilson_interval(200, 400, 0.95);
            h - l
        };
        assert!(w400 < w100);
        // textbook value: 8/10 at 95% gives roughly [0.490, 0.943]
        let (lo, hi) = wilson_interval(8, 10, 0.95);
        assert!((lo - 0.4902).abs() < 1e-3 && (hi - 0.9433).abs() < 1e-3);
    }

    fn record(outcome: Outcome) -> RunRecord {
        RunRecord {
            config_hash: String::new(),
            trial: 0,
            c: 1.0,
            sub_seed: 0,
            host_id: String::new(),
            outcome,
            decided_by: "pipeline".into(),
            retries: BTreeMap::new(),
            certificate: None,
            timing: Timing {
                total_ms: 2.0,
                stages_ms: BTreeMap::new(),
            },
        }
    }

    #[test]
    fn estimates_keep_unknowns_apart() {
        let recs = vec![
            record(Outcome::Success),
            record(Outcome::Unknown),
            record(Outcome::StageFailure { stage: Stage::Cover }),
            record(Outcome::Absent),
        ];
        let e = estimate_success(&recs, 1.0, 0.95);
        assert_eq!((e.successes, e.failures, e.unknowns), (1, 2, 1));
        assert_eq!(e.successes + e.failures + e.unknowns, e.trials);
        assert!((e.rate - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(e.optimistic, 0.5);
        assert_eq!(e.pessimistic, 0.25);
        assert_eq!(e.mean_ms, 2.0);
    }

    #[test]
    fn records_round_trip() {
        let r = record(Outcome::StageFailure { stage: Stage::AbsorbingPath });
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"stage\":\"absorbing_path\""));
        assert_eq!(serde_json::from_str::<RunRecord>(&json).unwrap(), r);
    }
}
