//! The explain command: load, select attributes, bin, build the taxonomy,
//! augment, mine, report.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use cluster_explain::attrsel::select_attributes;
use cluster_explain::dataset::{load_csv, AttrId, Dataset};
use cluster_explain::explain::report::{ClusterRecord, Report};
use cluster_explain::explain::{explain_all, ExplainOutcome};
use cluster_explain::taxonomy::Taxonomy;
use cluster_explain::transactions::augment_dataset;
use cluster_explain::{bin_attributes, taxonomy_from_bins};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::render;

#[derive(Debug)]
pub struct ExplainRun {
    pub report: Report,
    pub text: String,
    /// Taxonomy in DOT form, when requested.
    pub dot: Option<String>,
    pub outcome: ExplainOutcome,
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

struct Stopwatch {
    timings: BTreeMap<String, f64>,
    last: Instant,
}

impl Stopwatch {
    fn new() -> Self {
        Stopwatch {
            timings: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings
            .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }
}

pub fn run_explain(cfg: &RunConfig) -> Result<ExplainRun, CliError> {
    cfg.validate()?;
    with_threads(cfg.threads, || explain_inner(cfg))?
}

fn explain_inner(cfg: &RunConfig) -> Result<ExplainRun, CliError> {
    let started = Instant::now();
    let mut clock = Stopwatch::new();
    let hints: HashMap<_, _> = cfg
        .column_kinds
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    let d = load_csv(&cfg.input, &cfg.labels, &hints)?;
    if let Some(unknown) = cfg
        .column_kinds
        .keys()
        .find(|k| d.attr_by_name(k).is_none())
    {
        return Err(CliError::Usage(format!(
            "type hint for unknown column `{unknown}`"
        )));
    }
    clock.lap("load");

    let selected: Option<Vec<AttrId>> = if cfg.attr_selection {
        let scores = select_attributes(&d, cfg.thresholds.conciseness, cfg.p)?;
        log::info!(
            "selected attributes: {}",
            scores
                .selected
                .iter()
                .map(|&a| d.attr_name(a))
                .collect::<Vec<_>>()
                .join(", ")
        );
        Some(scores.selected)
    } else {
        None
    };
    clock.lap("attrsel");

    let attrs: Vec<AttrId> = selected.clone().unwrap_or_else(|| d.attr_ids().collect());
    let bins = bin_attributes(&d, &attrs, &cfg.binning)?;
    clock.lap("binning");
    let taxonomy = taxonomy_from_bins(bins)?;
    clock.lap("taxonomy");
    let transactions = augment_dataset(&d, &cfg.negation);
    clock.lap("augment");

    let outcome = explain_all(
        &d,
        &taxonomy,
        &transactions,
        &cfg.thresholds,
        selected.as_deref(),
    )?;
    clock.lap("explain");
    for w in &outcome.warnings {
        log::warn!("{w}");
    }

    let mut timings = clock.timings;
    timings.insert(
        "mine".into(),
        outcome.clusters.iter().map(|c| c.mine_ms).sum(),
    );
    timings.insert(
        "skyline".into(),
        outcome.clusters.iter().map(|c| c.skyline_ms).sum(),
    );
    for c in &outcome.clusters {
        timings.insert(format!("mine_cluster_{}", c.cluster), c.mine_ms);
    }
    timings.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);

    let report = build_report(cfg, &d, &outcome, selected.as_deref(), timings)?;
    let text = render::explain_text(&report, &d);
    let dot = cfg.dot_taxonomy.as_ref().map(|_| dot_of(&taxonomy, &d));
    Ok(ExplainRun {
        report,
        text,
        dot,
        outcome,
    })
}

fn dot_of(taxonomy: &Taxonomy, d: &Dataset) -> String {
    taxonomy.to_dot(|a| d.attr_name(a).to_string())
}

fn build_report(
    cfg: &RunConfig,
    d: &Dataset,
    outcome: &ExplainOutcome,
    selected: Option<&[AttrId]>,
    timings_ms: BTreeMap<String, f64>,
) -> Result<Report, CliError> {
    let clusters = outcome
        .clusters
        .iter()
        .map(|c| ClusterRecord::new(&c.cluster, &c.explanations))
        .collect::<Result<_, _>>()?;
    let config = serde_json::to_value(cfg.record(d.kinds()))
        .map_err(|e| CliError::Internal(format!("serializing config: {e}")))?;
    Ok(Report {
        clusters,
        selected_attributes: selected
            .map(|s| s.iter().map(|&a| d.attr_name(a).to_string()).collect()),
        warnings: outcome.warnings.clone(),
        config,
        timings_ms,
    })
}

/// Report JSON with a trailing newline.
pub fn report_json(report: &Report) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
