//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use cluster_explain::binning::{BinMethod, BinningConfig};
use cluster_explain::dataset::AttributeKind;
use cluster_explain::explain::Thresholds;
use cluster_explain::transactions::NegationConfig;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
    #[default]
    Both,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!(
                "unknown format `{other}` (expected json, text or both)"
            )),
        }
    }
}

/// Every setting as optional, the shape shared by flags and the TOML file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub input: Option<PathBuf>,
    pub labels: Option<String>,
    pub out: Option<PathBuf>,
    pub coverage: Option<f64>,
    pub separation: Option<f64>,
    pub conciseness: Option<f64>,
    pub attr_selection: Option<bool>,
    pub p: Option<f64>,
    pub bins: Option<usize>,
    pub tree_leaves: Option<usize>,
    pub bin_methods: Option<Vec<String>>,
    pub neg_cap: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub dot_taxonomy: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub numeric: Option<Vec<String>>,
    pub categorical: Option<Vec<String>>,
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields set here win over `other`.
    pub fn or(self, other: Settings) -> Settings {
        Settings {
            input: self.input.or(other.input),
            labels: self.labels.or(other.labels),
            out: self.out.or(other.out),
            coverage: self.coverage.or(other.coverage),
            separation: self.separation.or(other.separation),
            conciseness: self.conciseness.or(other.conciseness),
            attr_selection: self.attr_selection.or(other.attr_selection),
            p: self.p.or(other.p),
            bins: self.bins.or(other.bins),
            tree_leaves: self.tree_leaves.or(other.tree_leaves),
            bin_methods: self.bin_methods.or(other.bin_methods),
            neg_cap: self.neg_cap.or(other.neg_cap),
            seed: self.seed.or(other.seed),
            threads: self.threads.or(other.threads),
            dot_taxonomy: self.dot_taxonomy.or(other.dot_taxonomy),
            format: self.format.or(other.format),
            numeric: self.numeric.or(other.numeric),
            categorical: self.categorical.or(other.categorical),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub labels: String,
    pub out: Option<PathBuf>,
    pub thresholds: Thresholds,
    pub binning: BinningConfig,
    pub negation: NegationConfig,
    pub attr_selection: bool,
    pub p: f64,
    pub seed: u64,
    /// `None` uses every available core.
    pub threads: Option<usize>,
    pub dot_taxonomy: Option<PathBuf>,
    pub format: OutputFormat,
    /// Kind overrides for columns whose inferred type is wrong.
    pub column_kinds: BTreeMap<String, AttributeKind>,
}

impl RunConfig {
    /// Defaults with the given input and label column.
    pub fn new(input: impl Into<PathBuf>, labels: impl Into<String>) -> Self {
        RunConfig {
            input: input.into(),
            labels: labels.into(),
            out: None,
            thresholds: Thresholds::default(),
            binning: BinningConfig::default(),
            negation: NegationConfig::default(),
            attr_selection: true,
            p: 1.0,
            seed: 0,
            threads: None,
            dot_taxonomy: None,
            format: OutputFormat::default(),
            column_kinds: BTreeMap::new(),
        }
    }

    pub fn resolve(s: Settings) -> Result<Self, CliError> {
        let input = s
            .input
            .ok_or_else(|| CliError::Usage("missing --input".into()))?;
        let labels = s.labels.unwrap_or_else(|| "cluster".to_string());
        let mut cfg = RunConfig::new(input, labels);
        let th = &mut cfg.thresholds;
        th.coverage = s.coverage.unwrap_or(th.coverage);
        th.separation = s.separation.unwrap_or(th.separation);
        th.conciseness = s.conciseness.unwrap_or(th.conciseness);
        cfg.out = s.out;
        cfg.attr_selection = s.attr_selection.unwrap_or(cfg.attr_selection);
        cfg.p = s.p.unwrap_or(cfg.p);
        cfg.binning.bins_per_method = s.bins.unwrap_or(cfg.binning.bins_per_method);
        cfg.binning.tree_max_leaves = s.tree_leaves.unwrap_or(cfg.binning.tree_max_leaves);
        if let Some(methods) = s.bin_methods {
            cfg.binning.methods = methods
                .iter()
                .map(|m| {
                    BinMethod::from_short_name(m.trim()).ok_or_else(|| {
                        CliError::Usage(format!(
                            "unknown binning method `{m}` (expected ew, ef, km or tree)"
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
        }
        cfg.negation.max_neg_cardinality = s.neg_cap.unwrap_or(cfg.negation.max_neg_cardinality);
        cfg.seed = s.seed.unwrap_or(cfg.seed);
        cfg.threads = s.threads;
        cfg.dot_taxonomy = s.dot_taxonomy;
        cfg.format = s.format.unwrap_or(cfg.format);
        for (names, kind) in [
            (s.numeric, AttributeKind::Numeric),
            (s.categorical, AttributeKind::Categorical),
        ] {
            for name in names.into_iter().flatten() {
                if cfg.column_kinds.insert(name.clone(), kind).is_some() {
                    return Err(CliError::Usage(format!(
                        "column `{name}` given as both numeric and categorical"
                    )));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.thresholds
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        self.binning
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(CliError::Usage(format!(
                "--p must be positive, got {}",
                self.p
            )));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    /// The settings echoed in the JSON report, with the kinds the columns
    /// were loaded as.
    pub fn record(&self, column_kinds: BTreeMap<String, AttributeKind>) -> ConfigRecord {
        ConfigRecord {
            input: self.input.display().to_string(),
            labels: self.labels.clone(),
            coverage: self.thresholds.coverage,
            separation: self.thresholds.separation,
            conciseness: self.thresholds.conciseness,
            maxsize: self.thresholds.maxsize(),
            attr_selection: self.attr_selection,
            p: self.p,
            bin_methods: self
                .binning
                .methods
                .iter()
                .map(|m| m.short_name().to_string())
                .collect(),
            bins: self.binning.bins_per_method,
            tree_leaves: self.binning.tree_max_leaves,
            neg_cap: self.negation.max_neg_cardinality,
            seed: self.seed,
            column_kinds,
        }
    }
}

/// Report form of [`RunConfig`]. Thread count and output paths are left
/// out so reports from different machines compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub input: String,
    pub labels: String,
    pub coverage: f64,
    pub separation: f64,
    pub conciseness: f64,
    pub maxsize: usize,
    pub attr_selection: bool,
    pub p: f64,
    pub bin_methods: Vec<String>,
    pub bins: usize,
    pub tree_leaves: usize,
    pub neg_cap: usize,
    pub seed: u64,
    /// Kind of every attribute as loaded.
    pub column_kinds: BTreeMap<String, AttributeKind>,
}
