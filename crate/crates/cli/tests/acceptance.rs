//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! program so the lines always print; exits non-zero if any check fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cluster_explain::binning::BinningConfig;
use cluster_explain::build_taxonomy;
use cluster_explain::dataset::{ClusterId, Column, Dataset};
use cluster_explain::explain::{
    dominates, evaluate, explain_all, itemset_to_explanation, skyline, Explanation,
    ExplanationMetrics, Literal, Predicate, Thresholds,
};
use cluster_explain::gfim::{mine, mine_with_categories, CategoryTaxonomy};
use cluster_explain::taxonomy::Taxonomy;
use cluster_explain::transactions::{augment_dataset, Item, NegationConfig, Transaction};
use cluster_explain_cli::config::RunConfig;
use cluster_explain_cli::run::{report_json, run_explain, ExplainRun};
use cluster_explain_cli::synth::{generate_csv, SynthConfig};

type Check = Result<String, String>;
type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || {
        format!("took {elapsed:.2?}, budget {budget:.0?}")
    })
}

// 1

fn example_three() -> Dataset {
    let (mut age, mut edu, mut rel, mut labels) = (vec![], vec![], vec![], vec![]);
    let mut push = |a: f64, e: f64, r: &'static str, l: i64| {
        age.push(Some(a));
        edu.push(Some(e));
        rel.push(Some(r));
        labels.push(ClusterId::from(l));
    };
    for i in 0..373 {
        if i < 370 {
            push(
                16.0 + (i % 20) as f64,
                4.0 + (i % 10) as f64,
                ["Unmarried", "Wife"][i % 2],
                0,
            );
        } else {
            push(50.0, 9.0, "Unmarried", 0);
        }
    }
    for i in 0..600 {
        let l = 1 + (i % 2) as i64;
        if i < 20 {
            push(20.0 + (i % 10) as f64, 5.0 + (i % 5) as f64, "Unmarried", l);
        } else {
            push(
                40.0 + (i % 30) as f64,
                1.0 + (i % 16) as f64,
                ["Husband", "Wife", "Unmarried"][i % 3],
                l,
            );
        }
    }
    let cols = vec![
        Column::numeric("age", age).unwrap(),
        Column::numeric("education-num", edu).unwrap(),
        Column::categorical("relationship", &rel),
    ];
    Dataset::new(cols, labels, "cluster").unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let d = example_three();
    ensure(d.cluster_ids().len() == 3, || {
        "fixture must have 3 clusters".into()
    })?;
    let e = Explanation::new(
        ClusterId::from(0),
        vec![
            Predicate::between("age", 16.0, 35.0).unwrap(),
            Predicate::between("education-num", 4.0, 13.0).unwrap(),
            Predicate::neq("relationship", Literal::Text("Husband".into())),
        ],
    )
    .unwrap();
    let m = evaluate(&e, &d).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(1))?;
    ensure((m.coverage - 370.0 / 373.0).abs() <= 1e-12, || {
        format!("coverage {}", m.coverage)
    })?;
    ensure((m.separation_error - 20.0 / 390.0).abs() <= 1e-12, || {
        format!("separation error {}", m.separation_error)
    })?;
    ensure(m.conciseness == 1.0 / 3.0, || {
        format!("conciseness {}", m.conciseness)
    })?;
    Ok(format!(
        "coverage {:.6}, separation error {:.6}, conciseness {}",
        m.coverage, m.separation_error, m.conciseness
    ))
}

// 2

fn criterion_2() -> Check {
    let start = Instant::now();
    let triples = [
        (0.99, 0.05, 1.0 / 3.0),
        (0.95, 0.04, 0.5),
        (0.88, 0.04, 1.0 / 3.0),
    ];
    let cands: Vec<Explanation> = triples
        .iter()
        .enumerate()
        .map(|(i, &(c, s, k))| {
            let mut e = Explanation::new(
                ClusterId::from(0),
                vec![Predicate::eq(format!("a{i}"), Literal::Number(i as f64))],
            )
            .unwrap();
            e.metrics = Some(ExplanationMetrics {
                coverage: c,
                separation_error: s,
                conciseness: k,
            });
            e
        })
        .collect();
    let sky = skyline(cands).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(1))?;
    let got: BTreeSet<String> = sky.iter().map(|e| e.to_string()).collect();
    let want: BTreeSet<String> = ["a0 = 0", "a1 = 1"].iter().map(|s| s.to_string()).collect();
    ensure(sky.len() == 2 && got == want, || format!("skyline {got:?}"))?;
    Ok("first two triples kept, third dominated".into())
}

// 3

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut tax = CategoryTaxonomy::new();
    tax.add_edge("Character", "Number")
        .add_edge("Character", "Letter")
        .add_edge("Letter", "Lowercase")
        .add_edge("Letter", "Capital")
        .add_edge("Capital", "A")
        .add_edge("Lowercase", "b")
        .add_edge("Number", "1")
        .add_edge("Number", "2");
    let tx: Vec<Vec<String>> = [["A", "1"], ["b", "2"], ["A", "2"]]
        .iter()
        .map(|t| t.iter().map(|s| s.to_string()).collect())
        .collect();
    let found = mine_with_categories(&tx, &tax, 2.0 / 3.0, 2).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(1))?;
    for want in [&["A"][..], &["2"], &["Letter", "2"], &["A", "Number"]] {
        let mut key: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        key.sort();
        let hit = found.iter().find(|f| f.items == key);
        ensure(hit.is_some_and(|f| f.support == 2.0 / 3.0), || {
            format!("{want:?} missing or wrong support")
        })?;
    }
    for f in &found {
        for a in &f.items {
            let anc = tax.ancestors(a);
            ensure(f.items.iter().all(|b| !anc.contains(b)), || {
                format!("{:?} pairs an ancestor", f.items)
            })?;
        }
    }
    Ok(format!(
        "{} itemsets, required four present, no ancestor pairs",
        found.len()
    ))
}

// 4

fn random_dataset(seed: u64, rows: usize, attrs: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=3i64);
    let labels: Vec<i64> = (0..rows).map(|_| rng.random_range(0..k)).collect();
    let mut cols = Vec::new();
    for a in 0..attrs {
        let missing = if rng.random_bool(0.3) { 0.05 } else { 0.0 };
        if rng.random_bool(0.6) {
            let spread = rng.random_range(3..40i64);
            let v = labels
                .iter()
                .map(|&l| {
                    (!rng.random_bool(missing))
                        .then(|| (rng.random_range(0..spread) + l * spread / 2) as f64)
                })
                .collect();
            cols.push(Column::numeric(format!("n{a}"), v).unwrap());
        } else {
            let levels = ["u", "v", "w", "x", "y"];
            let n = rng.random_range(2..=levels.len());
            let v: Vec<Option<&str>> = labels
                .iter()
                .map(|&l| {
                    (!rng.random_bool(missing)).then(|| {
                        if rng.random_bool(0.5) {
                            levels[l as usize % n]
                        } else {
                            levels[rng.random_range(0..n)]
                        }
                    })
                })
                .collect();
            cols.push(Column::categorical(format!("c{a}"), &v));
        }
    }
    Dataset::new(
        cols,
        labels.into_iter().map(ClusterId::from).collect(),
        "cluster",
    )
    .unwrap()
}

fn holds(t: &Transaction, item: &Item, tax: &Taxonomy) -> bool {
    match item {
        Item::Interval { attr, node } => {
            let (_, iv) = tax.interval(*node).unwrap();
            t.items.iter().any(|i| {
                matches!(i, Item::NumericEq { attr: a, value } if a == attr && iv.lo() <= *value && *value <= iv.hi())
            })
        }
        other => t.items.contains(other),
    }
}

fn pair_ok(a: &Item, b: &Item, tax: &Taxonomy) -> bool {
    if let (Item::Interval { node: x, .. }, Item::Interval { node: y, .. }) = (a, b) {
        if tax.is_ancestor(*x, *y) || tax.is_ancestor(*y, *x) {
            return false;
        }
    }
    a.attr() != b.attr() || matches!((a, b), (Item::CatNeg { .. }, Item::CatNeg { .. }))
}

/// All legal itemsets with support >= minsup, by plain enumeration.
fn oracle(
    tx: &[&Transaction],
    tax: &Taxonomy,
    minsup: f64,
    maxsize: usize,
) -> Vec<(Vec<Item>, usize)> {
    let n = tx.len();
    let frequent = |c: usize| c > 0 && c as f64 / n as f64 >= minsup;
    let count = |set: &[Item]| {
        tx.iter()
            .filter(|t| set.iter().all(|i| holds(t, i, tax)))
            .count()
    };
    let mut universe: Vec<Item> = tx.iter().flat_map(|t| t.items.iter().copied()).collect();
    for attr in tax.attributes() {
        universe.extend(
            tax.attribute_nodes(attr)
                .iter()
                .map(|&node| Item::Interval { attr, node }),
        );
    }
    universe.sort();
    universe.dedup();
    let singles: Vec<Item> = universe
        .into_iter()
        .filter(|i| frequent(count(&[*i])))
        .collect();

    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..singles.len()).map(|i| vec![i]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for idx in frontier {
            let set: Vec<Item> = idx.iter().map(|&i| singles[i]).collect();
            let legal = set
                .iter()
                .enumerate()
                .all(|(x, a)| set[x + 1..].iter().all(|b| pair_ok(a, b, tax)));
            if !legal {
                continue;
            }
            let c = count(&set);
            if !frequent(c) {
                continue;
            }
            if idx.len() < maxsize {
                for j in idx[idx.len() - 1] + 1..singles.len() {
                    let mut grown = idx.clone();
                    grown.push(j);
                    next.push(grown);
                }
            }
            let mut sorted = set;
            sorted.sort();
            out.push((sorted, c));
        }
        frontier = next;
    }
    out.sort();
    out
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instances = 120;
    let mut itemsets = 0;
    for case in 0..instances {
        let seed = rng.random::<u64>();
        let rows = rng.random_range(5..=200);
        let attrs = rng.random_range(1..=6);
        let minsup = [0.5, 0.7, 0.9][rng.random_range(0..3)];
        let maxsize = rng.random_range(1..=3);
        let d = random_dataset(seed, rows, attrs);
        let tax = build_taxonomy(&d, &BinningConfig::default()).map_err(|e| e.to_string())?;
        let all = augment_dataset(&d, &NegationConfig::default());
        let refs: Vec<&Transaction> = all.iter().collect();
        let mut got: Vec<(Vec<Item>, usize)> = mine(&refs, &tax, minsup, maxsize)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|g| (g.items, g.count))
            .collect();
        got.sort();
        let want = oracle(&refs, &tax, minsup, maxsize);
        ensure(got == want, || {
            format!(
                "instance {case} (seed {seed}): miner {} itemsets, oracle {}",
                got.len(),
                want.len()
            )
        })?;
        itemsets += want.len();
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{instances} instances, {itemsets} itemsets identical"
    ))
}

// 5

/// Every mined candidate of every cluster passing the separation filter.
fn all_candidates(
    d: &Dataset,
    tax: &Taxonomy,
    tx: &[Transaction],
    th: &Thresholds,
) -> Result<Vec<Explanation>, String> {
    let mut out = Vec::new();
    for (ci, id) in d.cluster_ids().iter().enumerate() {
        let mine_on: Vec<&Transaction> = tx.iter().filter(|t| t.cluster as usize == ci).collect();
        for g in mine(&mine_on, tax, th.coverage, th.maxsize()).map_err(|e| e.to_string())? {
            let mut e =
                itemset_to_explanation(&g.items, id.clone(), d, tax).map_err(|e| e.to_string())?;
            let m = evaluate(&e, d).map_err(|e| e.to_string())?;
            if m.separation_error <= th.separation {
                e.metrics = Some(m);
                out.push(e);
            }
        }
    }
    Ok(out)
}

fn criterion_5() -> Check {
    let th = Thresholds::default();
    let mut fixtures: Vec<Dataset> = Vec::new();
    for seed in 0..4 {
        let cfg = SynthConfig {
            rows: 600,
            clusters: 3 + seed as usize % 2,
            seed,
            ..Default::default()
        };
        fixtures.push(cluster_explain_cli::synth::generate(&cfg).map_err(|e| e.to_string())?);
    }
    for seed in 0..8 {
        fixtures.push(random_dataset(500 + seed, 150, 4));
    }
    let (mut emitted, mut checked) = (0, 0);
    for (f, d) in fixtures.iter().enumerate() {
        let tax = build_taxonomy(d, &BinningConfig::default()).map_err(|e| e.to_string())?;
        let tx = augment_dataset(d, &NegationConfig::default());
        let outcome = explain_all(d, &tax, &tx, &th, None).map_err(|e| e.to_string())?;
        let candidates = all_candidates(d, &tax, &tx, &th)?;
        checked += candidates.len();
        for c in &outcome.clusters {
            for e in &c.explanations {
                emitted += 1;
                let m = evaluate(e, d).map_err(|e| e.to_string())?;
                ensure(
                    m.coverage >= th.coverage
                        && m.separation_error <= th.separation
                        && m.conciseness >= th.conciseness,
                    || format!("fixture {f}: `{e}` violates a threshold"),
                )?;
                let beaten = candidates
                    .iter()
                    .filter(|o| o.cluster == e.cluster)
                    .any(|o| dominates(o.metrics.as_ref().unwrap(), &m));
                ensure(!beaten, || format!("fixture {f}: `{e}` is dominated"))?;
            }
        }
    }
    Ok(format!(
        "{} fixtures, {emitted} explanations checked against {checked} candidates",
        fixtures.len()
    ))
}

// 6 to 8

fn write_synth(dir: &Path, name: &str, cfg: &SynthConfig) -> Result<std::path::PathBuf, String> {
    let path = dir.join(name);
    std::fs::write(&path, generate_csv(cfg).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(path)
}

fn explain(cfg: &RunConfig) -> Result<(ExplainRun, Duration), String> {
    let start = Instant::now();
    let run = run_explain(cfg).map_err(|e| e.to_string())?;
    Ok((run, start.elapsed()))
}

fn best_qse(run: &ExplainRun) -> f64 {
    let c = &run.report.clusters;
    c.iter()
        .map(|c| c.explanations.first().map_or(0.0, |e| e.qse))
        .sum::<f64>()
        / c.len() as f64
}

fn criterion_6(dir: &Path) -> Check {
    let input = write_synth(
        dir,
        "c6.csv",
        &SynthConfig {
            rows: 100_000,
            numeric: 5,
            categorical: 0,
            clusters: 5,
            noise: 45,
            seed: 6,
        },
    )?;
    let mut cfg = RunConfig::new(&input, "cluster");
    cfg.attr_selection = false;
    let (exact, exact_time) = explain(&cfg)?;
    cfg.attr_selection = true;
    cfg.p = 1.0;
    let (selected, selected_time) = explain(&cfg)?;
    let mine_exact = exact.report.timings_ms["mine"];
    let mine_selected = selected.report.timings_ms["mine"];
    let speedup = mine_exact / mine_selected;
    let dq = (best_qse(&selected) - best_qse(&exact)).abs();
    ensure(exact_time <= Duration::from_secs(600), || {
        format!("exact run took {exact_time:.2?}")
    })?;
    ensure(selected_time <= Duration::from_secs(180), || {
        format!("selected run took {selected_time:.2?}")
    })?;
    ensure(speedup >= 3.0, || format!("mining speedup {speedup:.2}x"))?;
    ensure(dq <= 0.1, || format!("QSE difference {dq:.4}"))?;
    Ok(format!(
        "mining {mine_exact:.0} ms exact vs {mine_selected:.0} ms selected ({speedup:.1}x), QSE difference {dq:.4}, runs {exact_time:.1?} / {selected_time:.1?}"
    ))
}

fn criterion_7(dir: &Path) -> Check {
    let input = write_synth(
        dir,
        "c7.csv",
        &SynthConfig {
            rows: 100_000,
            numeric: 4,
            categorical: 1,
            clusters: 5,
            noise: 15,
            seed: 7,
        },
    )?;
    let cfg = RunConfig::new(&input, "cluster");
    let (run, elapsed) = explain(&cfg)?;
    ensure(elapsed <= Duration::from_secs(60), || {
        format!("took {elapsed:.2?}")
    })?;
    Ok(format!(
        "{elapsed:.2?} on {} threads, aggregate QSE {:.3}",
        rayon::current_num_threads(),
        best_qse(&run)
    ))
}

fn canonical_json(run: &ExplainRun) -> Result<String, String> {
    let mut r = run.report.clone();
    r.timings_ms.clear();
    report_json(&r).map_err(|e| e.to_string())
}

fn explanation_set(run: &ExplainRun) -> BTreeSet<String> {
    run.outcome
        .clusters
        .iter()
        .flat_map(|c| {
            c.explanations
                .iter()
                .map(move |e| format!("{}: {e} {:?}", c.cluster, e.metrics))
        })
        .collect()
}

fn criterion_8(dir: &Path) -> Check {
    let input = write_synth(
        dir,
        "c8.csv",
        &SynthConfig {
            rows: 20_000,
            numeric: 4,
            categorical: 2,
            clusters: 4,
            noise: 6,
            seed: 8,
        },
    )?;
    let mut cfg = RunConfig::new(&input, "cluster");
    cfg.attr_selection = false;
    cfg.threads = Some(1);
    let (a, _) = explain(&cfg)?;
    let (b, _) = explain(&cfg)?;
    ensure(canonical_json(&a)? == canonical_json(&b)?, || {
        "single-threaded JSON differs".into()
    })?;
    cfg.threads = Some(4);
    let (c, _) = explain(&cfg)?;
    ensure(explanation_set(&a) == explanation_set(&c), || {
        "multi-threaded explanation set differs".into()
    })?;
    Ok(format!(
        "{} explanations, identical across runs",
        explanation_set(&a).len()
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let checks: Vec<Criterion> = vec![
        (1, "metric fixture", Box::new(criterion_1)),
        (2, "skyline fixture", Box::new(criterion_2)),
        (3, "generalized mining fixture", Box::new(criterion_3)),
        (4, "miner equals brute force", Box::new(criterion_4)),
        (5, "threshold and Pareto soundness", Box::new(criterion_5)),
        (
            6,
            "attribute selection speedup",
            Box::new(|| criterion_6(dir.path())),
        ),
        (
            7,
            "end-to-end performance",
            Box::new(|| criterion_7(dir.path())),
        ),
        (8, "determinism", Box::new(|| criterion_8(dir.path()))),
    ];
    let mut failed = 0;
    for (n, name, check) in checks {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n} ({name}): PASS in {secs:.2}s: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL in {secs:.2}s: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
