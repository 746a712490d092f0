//! Per-network summaries, ensemble statistics and their CSV/JSON output.
//!
//! Every network is reduced to its largest connected component, its distance
//! matrix is computed once and shared by every requested problem, and every
//! witness is re-checked through [`crate::anonymity`] before it is reported.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anonymity::{measure, AttackerSet};
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::generators::{generate, GenConfig};
use crate::graph::{all_pairs_shortest_paths, largest_connected_component, DistanceMatrix, Graph};
use crate::solvers::{adim_eq1_within, adim_kopt_within, geq_profile, GeqProfile, Problem, SolutionRecord};
use crate::tree::antiresolving_chain_all;

/// Default per-network budget: 30 minutes.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30 * 60);

/// Components smaller than this are skipped.
const MIN_LCC: usize = 3;

/// Which `k` values the `mu >= k` table covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Every `k` from 1 to `k_opt`, keeping only rows where the cardinality
    /// changes from the previous `k`.
    All,
    /// Exactly these `k`, one row each.
    Ks(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problems: Vec<Problem>,
    /// Rows for [`Problem::Geq`]; ignored otherwise.
    pub sweep: Sweep,
    /// Does not affect results, so it is left out of serialized output.
    #[serde(skip_serializing, default = "one")]
    pub workers: usize,
    /// Per-network budget in seconds; `None` disables the guard.
    pub timeout_secs: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problems: vec![Problem::Kopt, Problem::Eq1],
            sweep: Sweep::All,
            workers: 1,
            timeout_secs: Some(DEFAULT_TIMEOUT.as_secs()),
        }
    }
}

impl RunConfig {
    pub fn with_problems(problems: impl IntoIterator<Item = Problem>) -> Self {
        RunConfig { problems: problems.into_iter().collect(), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::domain("no problem selected"));
        }
        if let Sweep::Ks(ks) = &self.sweep {
            if ks.contains(&0) {
                return Err(Error::domain("k values must be at least 1"));
            }
        }
        if self.workers == 0 {
            return Err(Error::domain("need at least one worker"));
        }
        Ok(())
    }

    fn wants(&self, p: Problem) -> bool {
        self.problems.contains(&p)
    }

    fn deadline(&self) -> Deadline {
        self.timeout_secs.map_or_else(Deadline::none, |s| Deadline::after(Duration::from_secs(s)))
    }
}

fn one() -> usize {
    1
}

/// Parses a comma-separated problem list such as `kopt,geq,eq1`.
pub fn parse_problems(text: &str) -> Result<Vec<Problem>> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let p = match tok {
            "kopt" => Problem::Kopt,
            "geq" | "geq-k" => Problem::Geq,
            "eq1" => Problem::Eq1,
            "tree-chain" => Problem::TreeChain,
            other => return Err(Error::domain(format!("unknown problem `{other}`"))),
        };
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    /// The time budget ran out; only the problems finished before it are present.
    Incomplete,
    /// The largest component was too small to analyse.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub name: String,
    /// Size of the graph as read or generated.
    pub n_input: usize,
    pub m_input: usize,
    /// Size of the largest connected component, which everything else refers to.
    pub n: usize,
    pub m: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kopt: Option<SolutionRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eq1: Option<SolutionRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sweep: Vec<SolutionRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub chain: Vec<SolutionRecord>,
}

impl NetworkSummary {
    pub fn k_opt(&self) -> Option<usize> {
        self.kopt.as_ref().map(|r| r.k)
    }

    pub fn p_opt(&self) -> Option<f64> {
        self.kopt.as_ref().map(|r| r.p)
    }

    /// Attacker-set size at `k_opt`.
    pub fn l_at_kopt(&self) -> Option<usize> {
        self.kopt.as_ref().and_then(|r| r.cardinality)
    }

    /// `k_opt / n`.
    pub fn fraction(&self) -> Option<f64> {
        self.k_opt().map(|k| k as f64 / self.n as f64)
    }

    pub fn l_eq1(&self) -> Option<usize> {
        self.eq1.as_ref().and_then(|r| r.cardinality)
    }

    /// `L` for `mu >= k` from the sweep rows, if that row was reported.
    pub fn l_geq(&self, k: usize) -> Option<Option<usize>> {
        self.sweep.iter().find(|r| r.k == k).map(|r| r.cardinality)
    }

    pub fn records(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.kopt.iter().chain(&self.eq1).chain(&self.sweep).chain(&self.chain)
    }
}

/// A network reduced to its largest component, with distances computed.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub n_input: usize,
    pub m_input: usize,
    pub graph: Graph,
    /// Label of each component node.
    pub labels: Vec<String>,
    /// `None` when the component is below the minimum size.
    pub distances: Option<DistanceMatrix>,
}

impl Prepared {
    /// `labels[id]` names node `id` of `graph`; numeric ids are used when absent.
    pub fn new(name: impl Into<String>, graph: &Graph, labels: Option<&[String]>) -> Result<Self> {
        let lcc = largest_connected_component(graph);
        let labels = lcc
            .original_ids
            .iter()
            .map(|&v| labels.map_or_else(|| v.to_string(), |l| l[v].clone()))
            .collect();
        let distances =
            if lcc.graph.n() >= MIN_LCC { Some(all_pairs_shortest_paths(&lcc.graph)?) } else { None };
        Ok(Prepared {
            name: name.into(),
            n_input: graph.n(),
            m_input: graph.edge_count(),
            graph: lcc.graph,
            labels,
            distances,
        })
    }

    pub fn id_of_label(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }
}

/// Runs every requested problem on one network.
///
/// Returns a summary with [`Status::Skipped`] when the largest component has
/// fewer than three nodes, and [`Status::Incomplete`] with whatever finished
/// when the time budget runs out.
pub fn run_single(cfg: &RunConfig, net: &Prepared) -> Result<NetworkSummary> {
    cfg.validate()?;
    let mut out = NetworkSummary {
        name: net.name.clone(),
        n_input: net.n_input,
        m_input: net.m_input,
        n: net.graph.n(),
        m: net.graph.edge_count(),
        status: Status::Complete,
        kopt: None,
        eq1: None,
        sweep: Vec::new(),
        chain: Vec::new(),
    };
    let Some(d) = &net.distances else {
        warn!("{}: largest component has {} nodes, skipping", net.name, net.graph.n());
        out.status = Status::Skipped;
        return Ok(out);
    };
    let deadline = cfg.deadline();
    match solve_all(cfg, net, d, &deadline, &mut out) {
        Ok(()) => {}
        Err(Error::Timeout) => {
            warn!("{}: time budget exhausted, reporting partial results", net.name);
            out.status = Status::Incomplete;
        }
        Err(e) => return Err(e),
    }
    for r in out.records() {
        let verdict = verify_record(d, &net.id_of_label(), r)?;
        if !verdict.ok {
            return Err(Error::Contract(format!(
                "{}: {:?} witness at k = {} has measure {}",
                net.name, r.problem, r.k, verdict.mu
            )));
        }
    }
    Ok(out)
}

fn solve_all(
    cfg: &RunConfig,
    net: &Prepared,
    d: &DistanceMatrix,
    deadline: &Deadline,
    out: &mut NetworkSummary,
) -> Result<()> {
    let label = |v: usize| net.labels[v].clone();
    if cfg.wants(Problem::Kopt) {
        out.kopt = Some(adim_kopt_within(d, deadline)?.record(label));
    }
    if cfg.wants(Problem::Eq1) {
        out.eq1 = Some(adim_eq1_within(d, deadline)?.record(label));
    }
    if cfg.wants(Problem::Geq) {
        let profile = geq_profile(d, deadline)?;
        out.sweep = sweep_rows(&cfg.sweep, &profile, d, &label)?;
    }
    if cfg.wants(Problem::TreeChain) {
        deadline.check()?;
        out.chain = antiresolving_chain_all(d)?
            .iter()
            .enumerate()
            .map(|(i, s)| chain_record(i + 1, s, &label))
            .collect();
    }
    Ok(())
}

fn sweep_rows(
    sweep: &Sweep,
    profile: &GeqProfile,
    d: &DistanceMatrix,
    label: &impl Fn(usize) -> String,
) -> Result<Vec<SolutionRecord>> {
    let ks: Vec<usize> = match sweep {
        Sweep::Ks(ks) => ks.clone(),
        Sweep::All => (1..=profile.k_opt())
            .filter(|&k| k == 1 || profile.cardinality(k) != profile.cardinality(k - 1))
            .collect(),
    };
    ks.into_iter().map(|k| Ok(profile.solution(d, k)?.record(label))).collect()
}

fn chain_record(k: usize, s: &AttackerSet, label: &impl Fn(usize) -> String) -> SolutionRecord {
    SolutionRecord {
        problem: Problem::TreeChain,
        k,
        feasible: true,
        cardinality: Some(s.len()),
        witness: s.members().iter().map(|&v| label(v)).collect(),
        p: 1.0 / k as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    /// Measure of the witness; 0 for infeasible records.
    pub mu: usize,
}

/// Re-checks one record against the distance matrix. Infeasible records pass
/// when they carry no witness.
pub fn verify_record(d: &DistanceMatrix, ids: &HashMap<&str, usize>, r: &SolutionRecord) -> Result<Verdict> {
    if !r.feasible {
        return Ok(Verdict { ok: r.witness.is_empty() && r.cardinality.is_none(), mu: 0 });
    }
    let members = r
        .witness
        .iter()
        .map(|l| {
            ids.get(l.as_str())
                .copied()
                .ok_or_else(|| Error::InvalidAttackerSet(format!("unknown node `{l}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let set = AttackerSet::new(members, d.n())?;
    let mu = measure(d, &set)?;
    let ok = r.problem.accepts(r.k, mu) && r.cardinality == Some(set.len());
    Ok(Verdict { ok, mu })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub generator: GenConfig,
    pub count: u64,
    pub run: RunConfig,
    /// Level for the "at least X% have `k_opt <= t`" line.
    pub quantile_level: f64,
}

impl BatchConfig {
    pub fn new(generator: GenConfig, count: u64, run: RunConfig) -> Self {
        BatchConfig { generator, count, run, quantile_level: 0.9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub retries: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub summary: Option<NetworkSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl SampleRecord {
    /// Samples that count towards the aggregates.
    fn usable(&self) -> Option<&NetworkSummary> {
        self.summary.as_ref().filter(|s| s.status == Status::Complete)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub t: usize,
    /// Fraction of samples with `k_opt >= t`.
    pub at_least: f64,
    /// Fraction of samples with `k_opt <= t`.
    pub at_most: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eq1Distribution {
    pub one: f64,
    pub two: f64,
    pub more: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub level: f64,
    pub threshold: usize,
    pub fraction: f64,
}

impl Quantile {
    pub fn line(&self) -> String {
        format!(
            "at least {:.0}% of networks have k_opt <= {}",
            (self.fraction * 100.0).floor(),
            self.threshold
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub config: BatchConfig,
    pub samples: u64,
    /// Samples in the aggregates (complete runs).
    pub used: usize,
    pub failed: usize,
    pub incomplete: usize,
    pub skipped: usize,
    pub kopt_grid: Vec<Threshold>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quantile: Option<Quantile>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eq1: Option<Eq1Distribution>,
    pub records: Vec<SampleRecord>,
}

impl BatchStats {
    /// Fraction of aggregated samples with `k_opt <= t`.
    pub fn kopt_at_most(&self, t: usize) -> Option<f64> {
        fraction(self.used_summaries().filter_map(NetworkSummary::k_opt), |k| k <= t)
    }

    /// Fraction of aggregated samples whose `mu = 1` attacker set satisfies `pred`.
    pub fn eq1_fraction(&self, pred: impl Fn(usize) -> bool) -> Option<f64> {
        fraction(self.used_summaries().filter_map(NetworkSummary::l_eq1), pred)
    }

    pub fn used_summaries(&self) -> impl Iterator<Item = &NetworkSummary> {
        self.records.iter().filter_map(SampleRecord::usable)
    }
}

fn fraction(values: impl Iterator<Item = usize>, pred: impl Fn(usize) -> bool) -> Option<f64> {
    let (mut hit, mut total) = (0usize, 0usize);
    for v in values {
        total += 1;
        hit += usize::from(pred(v));
    }
    (total > 0).then(|| hit as f64 / total as f64)
}

/// Generates `count` samples, runs [`run_single`] on each in a pool of
/// `run.workers` threads and aggregates in sample order.
pub fn run_batch(cfg: &BatchConfig) -> Result<BatchStats> {
    cfg.run.validate()?;
    cfg.generator.validate()?;
    if cfg.count == 0 {
        return Err(Error::domain("batch needs at least one sample"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| Error::domain(format!("worker pool: {e}")))?;
    let records: Vec<SampleRecord> =
        pool.install(|| (0..cfg.count).into_par_iter().map(|index| run_sample(cfg, index)).collect());
    Ok(aggregate(cfg, records))
}

fn run_sample(cfg: &BatchConfig, index: u64) -> SampleRecord {
    let generated = match generate(&cfg.generator, index) {
        Ok(g) => g,
        Err(e) => return SampleRecord { index, retries: 0, summary: None, error: Some(e.to_string()) },
    };
    let name = cfg.generator.file_name(index);
    let result = Prepared::new(name, &generated.graph, None).and_then(|p| run_single(&cfg.run, &p));
    match result {
        Ok(s) => SampleRecord { index, retries: generated.retries, summary: Some(s), error: None },
        Err(e) => {
            warn!("sample {index} failed: {e}");
            SampleRecord { index, retries: generated.retries, summary: None, error: Some(e.to_string()) }
        }
    }
}

fn aggregate(cfg: &BatchConfig, records: Vec<SampleRecord>) -> BatchStats {
    let count =
        |st: Status| records.iter().filter(|r| r.summary.as_ref().is_some_and(|s| s.status == st)).count();
    let mut stats = BatchStats {
        config: cfg.clone(),
        samples: cfg.count,
        used: count(Status::Complete),
        failed: records.iter().filter(|r| r.error.is_some()).count(),
        incomplete: count(Status::Incomplete),
        skipped: count(Status::Skipped),
        kopt_grid: Vec::new(),
        quantile: None,
        eq1: None,
        records,
    };
    let kopts: Vec<usize> = stats.used_summaries().filter_map(NetworkSummary::k_opt).collect();
    if let Some(&max) = kopts.iter().max() {
        let total = kopts.len() as f64;
        stats.kopt_grid = (1..=max)
            .map(|t| Threshold {
                t,
                at_least: kopts.iter().filter(|&&k| k >= t).count() as f64 / total,
                at_most: kopts.iter().filter(|&&k| k <= t).count() as f64 / total,
            })
            .collect();
        stats.quantile = stats
            .kopt_grid
            .iter()
            .find(|row| row.at_most >= cfg.quantile_level)
            .map(|row| Quantile { level: cfg.quantile_level, threshold: row.t, fraction: row.at_most });
    }
    if stats.used_summaries().any(|s| s.l_eq1().is_some()) {
        stats.eq1 = Some(Eq1Distribution {
            one: stats.eq1_fraction(|l| l == 1).unwrap_or(0.0),
            two: stats.eq1_fraction(|l| l == 2).unwrap_or(0.0),
            more: stats.eq1_fraction(|l| l > 2).unwrap_or(0.0),
        });
    }
    stats
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::domain(format!("unknown format `{other}` (expected json or csv)"))),
        }
    }
}

/// What to write out.
#[derive(Clone, Copy, Debug)]
pub enum Report<'a> {
    /// One row per network.
    Networks(&'a [NetworkSummary]),
    /// The `mu >= k` table of each network.
    Sweep(&'a [NetworkSummary]),
    /// The tree chain of each network.
    Chain(&'a [NetworkSummary]),
    Batch(&'a BatchStats),
}

impl Report<'_> {
    fn is_empty(&self) -> bool {
        match self {
            Report::Networks(s) | Report::Sweep(s) | Report::Chain(s) => s.is_empty(),
            Report::Batch(b) => b.records.is_empty(),
        }
    }
}

/// Renders `report`. JSON carries every field including witnesses; CSV is the
/// flat table.
pub fn render(report: Report<'_>, format: Format) -> Result<String> {
    if report.is_empty() {
        return Err(Error::domain("nothing to emit: results are empty"));
    }
    match format {
        Format::Json => {
            let mut text = match report {
                Report::Networks(s) | Report::Sweep(s) | Report::Chain(s) => serde_json::to_string_pretty(s)?,
                Report::Batch(b) => serde_json::to_string_pretty(b)?,
            };
            text.push('\n');
            Ok(text)
        }
        Format::Csv => render_csv(report),
    }
}

/// Renders and writes `report` to `path`.
pub fn emit(report: Report<'_>, format: Format, path: &Path) -> Result<()> {
    let text = render(report, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn render_csv(report: Report<'_>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::domain(format!("csv: {e}"));
    match report {
        Report::Networks(nets) => {
            w.write_record([
                "name",
                "n",
                "m",
                "k_opt",
                "p_opt",
                "L_at_kopt",
                "fraction_pct",
                "L_eq1",
                "status",
            ])
            .map_err(csv_err)?;
            for s in nets {
                w.write_record([
                    s.name.clone(),
                    s.n.to_string(),
                    s.m.to_string(),
                    opt(s.k_opt()),
                    opt(s.p_opt().map(|p| format!("{p:.3}"))),
                    opt(s.l_at_kopt()),
                    opt(s.fraction().map(|f| format!("{:.1}", f * 100.0))),
                    opt(s.l_eq1()),
                    status_name(s.status).into(),
                ])
                .map_err(csv_err)?;
            }
        }
        Report::Sweep(nets) | Report::Chain(nets) => {
            w.write_record(["name", "k", "p", "L"]).map_err(csv_err)?;
            for s in nets {
                let rows = if matches!(report, Report::Sweep(_)) { &s.sweep } else { &s.chain };
                for r in rows {
                    w.write_record([
                        s.name.clone(),
                        r.k.to_string(),
                        format!("{:.4}", r.p),
                        opt(r.cardinality),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
        Report::Batch(b) => {
            w.write_record(["t", "frac_kopt_at_least_t", "frac_kopt_at_most_t"]).map_err(csv_err)?;
            for row in &b.kopt_grid {
                w.write_record([
                    row.t.to_string(),
                    format!("{:.4}", row.at_least),
                    format!("{:.4}", row.at_most),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::domain(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::domain(format!("csv: {e}")))
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Complete => "complete",
        Status::Incomplete => "incomplete",
        Status::Skipped => "skipped",
    }
}

/// Plain-text digest of a batch for terminals.
pub fn batch_digest(b: &BatchStats) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "samples: {} (used {}, failed {}, incomplete {}, skipped {})",
        b.samples, b.used, b.failed, b.incomplete, b.skipped
    );
    if let Some(q) = &b.quantile {
        let _ = writeln!(out, "{}", q.line());
    }
    if let Some(e) = &b.eq1 {
        let _ = writeln!(
            out,
            "L_eq1: 1 -> {:.1}%, 2 -> {:.1}%, >2 -> {:.1}%",
            e.one * 100.0,
            e.two * 100.0,
            e.more * 100.0
        );
    }
    out
}
