//! Statement-type prediction and schema linking with deterministic
//! bag-of-words perceptrons.

mod linking;
mod model;

pub use linking::{link_schema, link_schema_in_context, ColumnBinding, SchemaBinding, TableSource};
pub use model::{featurize, fit, fit_invocations, parse_corpus, LinearModel, TrainingExample, DEFAULT_EPOCHS};

use thiserror::Error;

use crate::sql::StatementType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("cannot fit a model on an empty training set")]
    EmptyTrainingSet,
    #[error("no table could be resolved for the question")]
    NoTableResolved,
    #[error("training corpus line {line}: expected `label<TAB>text`")]
    CorpusParse { line: usize },
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
    #[error("statement model predicted unknown label `{0}`")]
    UnknownStatementType(String),
    #[error("{0}")]
    Io(String),
}

/// Runs the statement-type model and maps its label onto [`StatementType`].
pub fn predict_statement_type(model: &LinearModel, text: &str) -> Result<(StatementType, f64), ClassifyError> {
    let (label, score) = model.predict(text);
    let stype = label.parse().map_err(|_| ClassifyError::UnknownStatementType(label))?;
    Ok((stype, score))
}
