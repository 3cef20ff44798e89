use thiserror::Error;

use cluster_explain::attrsel::AttrSelError;
use cluster_explain::dataset::DataError;
use cluster_explain::explain::ExplainError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ExplainError> for CliError {
    fn from(e: ExplainError) -> Self {
        match e {
            ExplainError::InvalidThresholds(_) => CliError::Usage(e.to_string()),
            ExplainError::Data(_)
            | ExplainError::UnknownAttribute(_)
            | ExplainError::Schema(_)
            | ExplainError::InvalidPredicate(_)
            | ExplainError::EmptyExplanation
            | ExplainError::MissingMetrics(_) => CliError::Data(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<AttrSelError> for CliError {
    fn from(e: AttrSelError) -> Self {
        match e {
            AttrSelError::InvalidScale(_) | AttrSelError::InvalidConciseness(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<cluster_explain::Error> for CliError {
    fn from(e: cluster_explain::Error) -> Self {
        use cluster_explain::Error as E;
        match e {
            E::Data(e) => e.into(),
            E::Explain(e) => e.into(),
            E::AttrSel(e) => e.into(),
            E::Binning { .. } => CliError::Data(e.to_string()),
            E::Taxonomy(_) | E::Mine(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("invalid report JSON: {e}"))
    }
}
