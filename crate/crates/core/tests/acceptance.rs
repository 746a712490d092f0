//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p adim-core --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use adim_core::anonymity::measure;
use adim_core::families;
use adim_core::generators::{generate, GenConfig};
use adim_core::graph::{all_pairs_shortest_paths, parse_edge_list};
use adim_core::harness::{
    render, run_batch, run_single, BatchConfig, Format, Prepared, Report, RunConfig, Sweep,
};
use adim_core::solvers::{
    adim_eq1, adim_geq_k, adim_kopt, oracle_brute_force_geq, oracle_eq1, oracle_kopt, Oracle, Problem,
};
use adim_core::tree::{antiresolving_chain, induces_connected};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
    /// Bytes the criterion produces; compared across reruns.
    artifact: Vec<u8>,
}

impl Outcome {
    fn new(pass: bool, detail: String, artifact: Vec<u8>) -> Self {
        Outcome { pass, detail, artifact }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome { pass: false, detail: detail.into(), artifact: Vec::new() }
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Option<Prepared> {
    let path = fixture(name);
    let file = std::fs::File::open(&path).ok()?;
    let parsed = parse_edge_list(std::io::BufReader::new(file)).expect("fixture parses");
    let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
    Some(Prepared::new(stem, &parsed.graph, Some(&parsed.labels)).expect("fixture prepares"))
}

fn json(report: Report<'_>) -> Vec<u8> {
    render(report, Format::Json).expect("render").into_bytes()
}

fn show(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn c1_karate() -> Outcome {
    let t = Instant::now();
    let Some(net) = load("zachary_karate.txt") else { return Outcome::fail("fixture missing") };
    let s = run_single(&RunConfig::with_problems([Problem::Kopt, Problem::Eq1]), &net).unwrap();
    let elapsed = secs(t);
    let p = format!("{:.3}", s.p_opt().unwrap_or(f64::NAN));
    let f = format!("{:.1}", s.fraction().unwrap_or(f64::NAN) * 100.0);
    let pass = s.n == 34
        && s.m == 78
        && s.k_opt() == Some(9)
        && p == "0.111"
        && s.l_at_kopt() == Some(1)
        && f == "26.5"
        && s.l_eq1() == Some(1)
        && elapsed < 5.0;
    let detail = format!(
        "karate n={} m={} k_opt={} p_opt={p} L={} fraction={f}% L_eq1={} ({elapsed:.2} s)",
        s.n,
        s.m,
        show(s.k_opt()),
        show(s.l_at_kopt()),
        show(s.l_eq1())
    );
    Outcome::new(pass, detail, json(Report::Networks(std::slice::from_ref(&s))))
}

fn c2_san_juan() -> Outcome {
    let t = Instant::now();
    let Some(net) = load("san_juan.txt") else {
        return Outcome::fail("San Juan: fixtures/san_juan.txt is not vendored, nothing to check");
    };
    let s = run_single(&RunConfig::with_problems([Problem::Kopt]), &net).unwrap();
    let elapsed = secs(t);
    let pass = s.n == 75 && s.k_opt() == Some(7) && s.l_at_kopt() == Some(1) && elapsed < 10.0;
    let detail =
        format!("San Juan n={} k_opt={} L={} ({elapsed:.2} s)", s.n, show(s.k_opt()), show(s.l_at_kopt()));
    Outcome::new(pass, detail, json(Report::Networks(std::slice::from_ref(&s))))
}

fn c3_enron(property_suite: bool) -> Outcome {
    const KS: [usize; 9] = [4, 5, 10, 20, 40, 60, 100, 120, 153];
    const LS: [usize; 9] = [1, 334, 463, 567, 683, 842, 935, 935, 935];
    let t = Instant::now();
    let Some(net) = load("enron.txt") else {
        return Outcome::new(
            property_suite,
            "Enron: no vendored edge list; downgraded to criterion 5".into(),
            Vec::new(),
        );
    };
    let mut cfg = RunConfig::with_problems([Problem::Geq]);
    cfg.sweep = Sweep::Ks(KS.to_vec());
    let s = run_single(&cfg, &net).unwrap();
    let got: Vec<Option<usize>> = s.sweep.iter().map(|r| r.cardinality).collect();
    let want: Vec<Option<usize>> = LS.iter().map(|&l| Some(l)).collect();
    let elapsed = secs(t);
    let pass = got == want && elapsed < 1800.0;
    Outcome::new(
        pass,
        format!("Enron n={} L={got:?} ({elapsed:.1} s)", s.n),
        json(Report::Sweep(std::slice::from_ref(&s))),
    )
}

fn c4_hamsterster(property_suite: bool) -> Outcome {
    let Some(net) = load("hamsterster.txt") else {
        return Outcome::new(
            property_suite,
            "Hamsterster: no vendored edge list; downgraded to criterion 5".into(),
            Vec::new(),
        );
    };
    let s = run_single(&RunConfig::with_problems([Problem::Eq1]), &net).unwrap();
    Outcome::new(
        s.l_eq1() == Some(2),
        format!("Hamsterster n={} L_eq1={}", s.n, show(s.l_eq1())),
        json(Report::Networks(std::slice::from_ref(&s))),
    )
}

fn c5_oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let corpus = common::small_connected_corpus(200, SEED);
    let mut failures = Vec::new();
    let mut artifact = String::new();
    for (i, (g, d)) in corpus.iter().enumerate() {
        let kopt = adim_kopt(d).unwrap();
        let oracle = oracle_kopt(d).unwrap();
        if kopt.k_opt != oracle.k_opt {
            failures.push(format!("graph {i}: k_opt {} vs {}", kopt.k_opt, oracle.k_opt));
        }
        for k in 1..=oracle.k_opt {
            let (a, b) = (adim_geq_k(d, k).unwrap(), oracle_brute_force_geq(d, k).unwrap());
            if a.cardinality() != b.cardinality() {
                failures.push(format!("graph {i}, k={k}: L {:?} vs {:?}", a.cardinality(), b.cardinality()));
            }
        }
        let approx = adim_eq1(d).unwrap();
        let exact = oracle_eq1(d).unwrap().cardinality();
        let bound = ((g.n() - 1) as f64).ln() + 1.0;
        if measure(d, &approx.witness).unwrap() != 1 || approx.cardinality() as f64 > bound * exact as f64 {
            failures.push(format!("graph {i}: eq1 {} vs oracle {exact}", approx.cardinality()));
        }
        artifact.push_str(&format!("{i} {} {} {}\n", g.n(), kopt.k_opt, approx.cardinality()));
    }
    let elapsed = secs(t);
    let pass = failures.is_empty() && elapsed < 120.0;
    let detail = format!(
        "oracle equivalence on {} graphs, {} failures{} ({elapsed:.1} s)",
        corpus.len(),
        failures.len(),
        failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    Outcome::new(pass, detail, artifact.into_bytes())
}

fn c6_monotonicity() -> Outcome {
    let corpus = common::small_connected_corpus(200, SEED);
    let mut failures = 0usize;
    let mut artifact = String::new();
    for (g, d) in &corpus {
        let k_opt = oracle_kopt(d).unwrap().k_opt;
        for k in 1..g.n() {
            let feasible = adim_geq_k(d, k).unwrap().feasible();
            failures += usize::from(feasible != (k <= k_opt));
            artifact.push(if feasible { '1' } else { '0' });
        }
        artifact.push('\n');
    }
    Outcome::new(
        failures == 0,
        format!("feasible iff k <= k_opt, {failures} failures"),
        artifact.into_bytes(),
    )
}

fn ensemble(gen: GenConfig, count: u64, problems: &[Problem]) -> (adim_core::harness::BatchStats, f64) {
    let t = Instant::now();
    let mut run = RunConfig::with_problems(problems.iter().copied());
    run.workers = 4;
    let stats = run_batch(&BatchConfig::new(gen, count, run)).unwrap();
    (stats, secs(t))
}

fn pct(f: Option<f64>) -> String {
    f.map_or_else(|| "n/a".into(), |f| format!("{:.1}%", f * 100.0))
}

fn c7_er_eq1() -> Outcome {
    let (b, elapsed) = ensemble(GenConfig::er(500, 0.01, SEED), 50, &[Problem::Eq1]);
    let one = b.eq1_fraction(|l| l == 1);
    let at_most_two = b.eq1_fraction(|l| l <= 2);
    let pass = b.used == 50
        && one.is_some_and(|f| (f - 0.92).abs() <= 0.15)
        && at_most_two.is_some_and(|f| f >= 0.90)
        && elapsed < 3600.0;
    let detail = format!(
        "ER n=500 p=0.01: L_eq1=1 in {}, L_eq1<=2 in {} of {} samples ({elapsed:.1} s)",
        pct(one),
        pct(at_most_two),
        b.used
    );
    Outcome::new(pass, detail, json(Report::Batch(&b)))
}

fn c8_er_kopt() -> Outcome {
    let (b, elapsed) = ensemble(GenConfig::er(500, 0.005, SEED), 50, &[Problem::Kopt]);
    let frac = b.kopt_at_most(8);
    let pass = b.used == 50 && frac.is_some_and(|f| f >= 0.80) && elapsed < 3600.0;
    let line = b.quantile.as_ref().map(|q| q.line()).unwrap_or_default();
    let detail =
        format!("ER n=500 p=0.005: k_opt<=8 in {} of {} samples; {line} ({elapsed:.1} s)", pct(frac), b.used);
    Outcome::new(pass, detail, json(Report::Batch(&b)))
}

fn c9_ba_eq1() -> Outcome {
    let (b, elapsed) = ensemble(GenConfig::ba(500, 5, SEED), 30, &[Problem::Eq1]);
    let two = b.eq1_fraction(|l| l == 2);
    let edges_ok = b.records.iter().filter(|r| r.summary.as_ref().is_some_and(|s| s.m_input == 2475)).count();
    let pass = b.used == 30 && two.is_some_and(|f| f >= 0.90) && edges_ok == 30;
    let detail = format!(
        "BA n=500 q=5: L_eq1=2 in {} (L_eq1=1 in {}), 2475 edges in {edges_ok}/30 ({elapsed:.1} s)",
        pct(two),
        pct(b.eq1_fraction(|l| l == 1))
    );
    Outcome::new(pass, detail, json(Report::Batch(&b)))
}

fn c10_trees() -> Outcome {
    let mut failures = Vec::new();
    let mut artifact = String::new();
    for i in 0..100u64 {
        let n = 10 + (i as usize * 7) % 41;
        let g = generate(&GenConfig::tree(n, SEED), i).unwrap().graph;
        let d = all_pairs_shortest_paths(&g).unwrap();
        let k_prime = adim_kopt(&d).unwrap().k_opt;
        for k in 1..=k_prime {
            match antiresolving_chain(&d, k) {
                Ok(s) if measure(&d, &s).unwrap() == k => {
                    artifact.push_str(&format!("{i} {k} {:?}\n", s.members()));
                }
                Ok(s) => failures.push(format!("tree {i} k={k}: measure {}", measure(&d, &s).unwrap())),
                Err(e) => failures.push(format!("tree {i} k={k}: {e}")),
            }
        }
    }
    let mut connectivity_sets = 0usize;
    let mut connectivity_failures = 0usize;
    for i in 0..50u64 {
        let n = 4 + (i as usize % 7);
        let g = generate(&GenConfig::tree(n, SEED + 1), i).unwrap().graph;
        let d = all_pairs_shortest_paths(&g).unwrap();
        Oracle::default()
            .for_each_measure(&d, |s, mu| {
                connectivity_sets += 1;
                if mu >= 2 && !induces_connected(&g, s.members()) {
                    connectivity_failures += 1;
                }
            })
            .unwrap();
    }
    let pass = failures.is_empty() && connectivity_failures == 0;
    let detail = format!(
        "tree chains on 100 trees: {} failures{}; connectivity on {connectivity_sets} sets of 50 small trees: {connectivity_failures} failures",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    Outcome::new(pass, detail, artifact.into_bytes())
}

fn c11_wheel() -> Outcome {
    let t = Instant::now();
    let d = all_pairs_shortest_paths(&families::wheel(16)).unwrap();
    let spectrum: BTreeSet<usize> = Oracle::with_guard(17).spectrum(&d).unwrap().into_keys().collect();
    let elapsed = secs(t);
    let want: BTreeSet<usize> = [1, 2, 3, 16].into();
    let pass = spectrum == want && elapsed < 120.0;
    Outcome::new(
        pass,
        format!("wheel W_1,16 attainable k = {spectrum:?} ({elapsed:.1} s)"),
        format!("{spectrum:?}").into_bytes(),
    )
}

fn run_all() -> Vec<Outcome> {
    let c5 = c5_oracle_equivalence();
    let c6 = c6_monotonicity();
    let property_suite = c5.pass && c6.pass;
    vec![
        c1_karate(),
        c2_san_juan(),
        c3_enron(property_suite),
        c4_hamsterster(property_suite),
        c5,
        c6,
        c7_er_eq1(),
        c8_er_kopt(),
        c9_ba_eq1(),
        c10_trees(),
        c11_wheel(),
    ]
}

fn main() -> ExitCode {
    let t = Instant::now();
    let first = run_all();
    let second = run_all();
    let differing: Vec<usize> =
        (0..first.len()).filter(|&i| first[i].artifact != second[i].artifact).map(|i| i + 1).collect();
    let c12 = Outcome::new(
        differing.is_empty(),
        format!("rerun byte-identical for criteria 1-11; differing: {differing:?}"),
        Vec::new(),
    );

    let mut failed = 0;
    for (i, o) in first.iter().chain(std::iter::once(&c12)).enumerate() {
        println!("{} {:>2}  {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{}/12 criteria passed ({:.1} s)", 12 - failed, t.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
