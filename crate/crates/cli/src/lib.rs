//! Command-line front end: `explain`, `eval` and `synth`.
//!
//! [`run`] takes the arguments and output streams so tests can drive the
//! whole program in process.

pub mod config;
pub mod error;
pub mod eval;
pub mod render;
pub mod run;
pub mod synth;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::{OutputFormat, RunConfig, Settings};
use error::CliError;
use synth::SynthConfig;

#[derive(Debug, Parser)]
#[command(
    name = "cluster-explain",
    version,
    about = "Explain clusters with concise predicate rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine explanations for every cluster of a labelled CSV.
    Explain(Box<ExplainArgs>),
    /// Recompute the metrics of a stored explanation report.
    Eval(EvalArgs),
    /// Write a seeded synthetic clustered CSV.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Name of the cluster label column [default: cluster]
    #[arg(long)]
    pub labels: Option<String>,
    /// Where to write the JSON report (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with the same keys as the long flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub coverage: Option<f64>,
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub conciseness: Option<f64>,
    /// Scale for the number of selected attributes
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, conflicts_with = "no_attr_selection")]
    pub attr_selection: Option<OnOff>,
    #[arg(long)]
    pub no_attr_selection: bool,
    /// Intervals per binning method
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub tree_leaves: Option<usize>,
    /// Comma-separated subset of ew, ef, km, tree
    #[arg(long, value_delimiter = ',')]
    pub bin_methods: Option<Vec<String>>,
    /// Most frequent values negated per categorical attribute
    #[arg(long)]
    pub neg_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the interval taxonomy as a DOT graph
    #[arg(long)]
    pub dot_taxonomy: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Force these columns to be numeric
    #[arg(long, value_delimiter = ',')]
    pub numeric: Option<Vec<String>>,
    /// Force these columns to be categorical
    #[arg(long, value_delimiter = ',')]
    pub categorical: Option<Vec<String>>,
}

impl ExplainArgs {
    fn settings(&self) -> Settings {
        let attr_selection = match (self.no_attr_selection, self.attr_selection) {
            (true, _) | (_, Some(OnOff::Off)) => Some(false),
            (_, Some(OnOff::On)) => Some(true),
            _ => None,
        };
        Settings {
            input: self.input.clone(),
            labels: self.labels.clone(),
            out: self.out.clone(),
            coverage: self.coverage,
            separation: self.separation,
            conciseness: self.conciseness,
            attr_selection,
            p: self.p,
            bins: self.bins,
            tree_leaves: self.tree_leaves,
            bin_methods: self.bin_methods.clone(),
            neg_cap: self.neg_cap,
            seed: self.seed,
            threads: self.threads,
            dot_taxonomy: self.dot_taxonomy.clone(),
            format: self.format,
            numeric: self.numeric.clone(),
            categorical: self.categorical.clone(),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => Settings::from_toml_file(path)?,
            None => Settings::default(),
        };
        RunConfig::resolve(self.settings().or(file))
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the label column recorded in the report
    #[arg(long)]
    pub labels: Option<String>,
    /// JSON report written by `explain`
    #[arg(long)]
    pub explanations: PathBuf,
    /// Where to write the evaluation as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub rows: usize,
    /// Informative numeric attributes
    #[arg(long, default_value_t = 3)]
    pub numeric: usize,
    /// Informative categorical attributes
    #[arg(long, default_value_t = 1)]
    pub categorical: usize,
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    /// Label-independent attributes
    #[arg(long, default_value_t = 2)]
    pub noise: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SynthArgs {
    pub fn config(&self) -> SynthConfig {
        SynthConfig {
            rows: self.rows,
            numeric: self.numeric,
            categorical: self.categorical,
            clusters: self.clusters,
            noise: self.noise,
            seed: self.seed,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn emit(stream: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stream
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Explain(a) => {
            let cfg = a.resolve()?;
            let result = run::run_explain(&cfg)?;
            let json = run::report_json(&result.report)?;
            if let (Some(path), Some(dot)) = (&cfg.dot_taxonomy, &result.dot) {
                write_file(path, dot.as_bytes())?;
            }
            if let Some(path) = &cfg.out {
                write_file(path, json.as_bytes())?;
            }
            match (cfg.format, &cfg.out) {
                (OutputFormat::Json, None) => emit(out, &json),
                (OutputFormat::Json, Some(_)) => Ok(()),
                (OutputFormat::Text, _) | (OutputFormat::Both, Some(_)) => emit(out, &result.text),
                (OutputFormat::Both, None) => {
                    emit(out, &json)?;
                    emit(err, &result.text)
                }
            }
        }
        Command::Eval(a) => {
            let report = eval::run_eval(&a.input, a.labels.as_deref(), &a.explanations)?;
            if let Some(path) = &a.out {
                let mut json = serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                json.push('\n');
                write_file(path, json.as_bytes())?;
            }
            emit(out, &render::eval_text(&report))
        }
        Command::Synth(a) => {
            let bytes = synth::generate_csv(&a.config())?;
            match &a.out {
                Some(path) => write_file(path, &bytes),
                None => out
                    .write_all(&bytes)
                    .map_err(|e| CliError::Internal(format!("writing output: {e}"))),
            }
        }
    }
}
