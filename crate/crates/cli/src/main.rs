use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adim_core::generators::{generate, GenConfig, Model};
use adim_core::graph::parse_edge_list;
use adim_core::harness::{
    self, parse_problems, render, BatchConfig, Format, NetworkSummary, Prepared, Report, RunConfig, Status,
    Sweep,
};
use adim_core::solvers::{Problem, SolutionRecord};
use adim_core::Error;
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(name = "adim", version, about = "Attacker-set anonymity measures for graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k_opt and the mu = 1 attacker set of one or more networks.
    Measure {
        #[command(flatten)]
        input: Inputs,
        /// Comma-separated subset of kopt, geq, eq1, tree-chain.
        #[arg(long, default_value = "kopt,eq1")]
        problems: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Minimum attacker-set size for mu >= k, for each k.
    Sweep {
        #[command(flatten)]
        input: Inputs,
        /// Comma-separated k values; all k up to k_opt when omitted.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Statistics over a generated ensemble.
    Batch {
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value = "kopt,eq1")]
        problems: String,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Level of the "at least X% have k_opt <= t" line.
        #[arg(long, default_value_t = 0.9)]
        quantile: f64,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Write generated graphs as edge lists, plus a manifest.
    Gen {
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// k-antiresolving sets of a tree for every k up to k_opt.
    TreeChain {
        #[command(flatten)]
        input: Inputs,
        /// Report only this k.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Re-check the witnesses of a JSON result file against a graph.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// JSON written by measure, sweep or tree-chain.
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args)]
struct Inputs {
    /// Edge-list file(s): two labels per line, `#`/`%` comments.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
}

#[derive(Args)]
struct RunFlags {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Per-network budget in seconds.
    #[arg(long, default_value_t = harness::DEFAULT_TIMEOUT.as_secs())]
    timeout: u64,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelFlags {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resample until the graph is connected.
    #[arg(long)]
    connected: bool,
}

impl ModelFlags {
    fn config(&self) -> GenConfig {
        GenConfig {
            model: self.model,
            n: self.n,
            p: self.p,
            q: self.q,
            seed: self.seed,
            require_connected: self.connected,
        }
    }
}

impl RunFlags {
    fn config(&self, problems: Vec<Problem>, sweep: Sweep) -> RunConfig {
        let workers = if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        };
        RunConfig { problems, sweep, workers, timeout_secs: Some(self.timeout) }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let parse = e.chain().any(|c| {
                matches!(c.downcast_ref::<Error>(), Some(Error::Parse { .. } | Error::Json(_)))
                    || c.is::<serde_json::Error>()
            });
            let timeout = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Timeout)));
            ExitCode::from(if parse {
                EXIT_PARSE
            } else if timeout {
                EXIT_TIMEOUT
            } else {
                1
            })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Measure { input, problems, run } => {
            let cfg = run.config(parse_problems(&problems)?, Sweep::All);
            let nets = summarise(&input, &cfg)?;
            write(&run, Report::Networks(&nets))?;
            Ok(status_code(&nets, false))
        }
        Command::Sweep { input, k, run } => {
            let sweep = if k.is_empty() { Sweep::All } else { Sweep::Ks(k) };
            let cfg = run.config(vec![Problem::Geq], sweep);
            let nets = summarise(&input, &cfg)?;
            write(&run, Report::Sweep(&nets))?;
            Ok(status_code(&nets, true))
        }
        Command::Batch { model, count, problems, k, quantile, run } => {
            let sweep = if k.is_empty() { Sweep::All } else { Sweep::Ks(k) };
            let mut cfg =
                BatchConfig::new(model.config(), count, run.config(parse_problems(&problems)?, sweep));
            cfg.quantile_level = quantile;
            let stats = harness::run_batch(&cfg)?;
            eprint!("{}", harness::batch_digest(&stats));
            write(&run, Report::Batch(&stats))?;
            Ok(if stats.incomplete > 0 { ExitCode::from(EXIT_TIMEOUT) } else { ExitCode::SUCCESS })
        }
        Command::Gen { model, count, out_dir } => {
            gen(&model.config(), count, &out_dir)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TreeChain { input, k, run } => {
            let cfg = run.config(vec![Problem::TreeChain], Sweep::All);
            let mut nets = summarise(&input, &cfg)?;
            let mut missing = false;
            if let Some(k) = k {
                for s in &mut nets {
                    s.chain.retain(|r| r.k == k);
                    missing |= s.chain.is_empty() && s.status == Status::Complete;
                }
            }
            write(&run, Report::Chain(&nets))?;
            let code = status_code(&nets, false);
            Ok(if missing && code == ExitCode::SUCCESS { ExitCode::from(EXIT_INFEASIBLE) } else { code })
        }
        Command::Verify { input, witness } => verify(&input, &witness),
    }
}

fn load(path: &Path) -> anyhow::Result<Prepared> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let parsed =
        parse_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    let name =
        path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Prepared::new(name, &parsed.graph, Some(&parsed.labels))?)
}

fn summarise(inputs: &Inputs, cfg: &RunConfig) -> anyhow::Result<Vec<NetworkSummary>> {
    let pool = rayon_pool(cfg.workers)?;
    inputs
        .input
        .iter()
        .map(|path| {
            let net = load(path)?;
            info!("{}: n = {}, m = {} (largest component)", net.name, net.graph.n(), net.graph.edge_count());
            Ok(pool.install(|| harness::run_single(cfg, &net))?)
        })
        .collect()
}

fn rayon_pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

fn write(run: &RunFlags, report: Report<'_>) -> anyhow::Result<()> {
    let text = render(report, run.format)?;
    match &run.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Timeout beats infeasibility; `sweep_rows` also flags infeasible sweep rows.
fn status_code(nets: &[NetworkSummary], sweep_rows: bool) -> ExitCode {
    if nets.iter().any(|s| s.status == Status::Incomplete) {
        return ExitCode::from(EXIT_TIMEOUT);
    }
    if sweep_rows && nets.iter().any(|s| s.sweep.iter().any(|r| !r.feasible)) {
        return ExitCode::from(EXIT_INFEASIBLE);
    }
    ExitCode::SUCCESS
}

fn gen(cfg: &GenConfig, count: u64, out_dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut files = Vec::new();
    for index in 0..count {
        let g = generate(cfg, index)?;
        let name = cfg.file_name(index);
        fs::write(out_dir.join(&name), g.graph.to_edge_list()).with_context(|| format!("writing {name}"))?;
        files.push(json!({
            "file": name,
            "index": index,
            "n": g.graph.n(),
            "m": g.graph.edge_count(),
            "retries": g.retries,
        }));
    }
    let manifest = json!({ "config": cfg, "count": count, "files": files });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(out_dir.join("manifest.json"), text)?;
    Ok(())
}

fn verify(input: &Path, witness: &Path) -> anyhow::Result<ExitCode> {
    let net = load(input)?;
    let Some(d) = &net.distances else { bail!("{}: largest component too small", net.name) };
    let text = fs::read_to_string(witness).with_context(|| format!("reading {}", witness.display()))?;
    let records = witness_records(&text, &net.name)?;
    let ids = net.id_of_label();
    let mut failures = 0usize;
    for r in &records {
        let v = harness::verify_record(d, &ids, r)?;
        println!(
            "{} {:?} k={} L={} mu={}",
            if v.ok { "ok  " } else { "FAIL" },
            r.problem,
            r.k,
            r.cardinality.map_or_else(|| "-".into(), |c| c.to_string()),
            v.mu
        );
        failures += usize::from(!v.ok);
    }
    Ok(if failures > 0 { ExitCode::from(EXIT_INFEASIBLE) } else { ExitCode::SUCCESS })
}

/// Accepts a list of summaries, one summary, a list of records or one record.
/// From a list of summaries only the one named like the input graph is used.
fn witness_records(text: &str, name: &str) -> anyhow::Result<Vec<SolutionRecord>> {
    if let Ok(nets) = serde_json::from_str::<Vec<NetworkSummary>>(text) {
        let Some(s) =
            nets.iter().find(|s| s.name == name).or_else(|| nets.first().filter(|_| nets.len() == 1))
        else {
            bail!("no result for network `{name}` in the witness file");
        };
        return Ok(s.records().cloned().collect());
    }
    if let Ok(s) = serde_json::from_str::<NetworkSummary>(text) {
        return Ok(s.records().cloned().collect());
    }
    if let Ok(rs) = serde_json::from_str::<Vec<SolutionRecord>>(text) {
        return Ok(rs);
    }
    Ok(vec![serde_json::from_str::<SolutionRecord>(text)?])
}
