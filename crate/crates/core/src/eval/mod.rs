//! Execution and logical-form accuracy over question/gold-SQL corpora.

mod dataset;
mod report;
mod run;

pub use dataset::{load_dataset, parse_dataset, EvalExample};
pub use report::{parse_report_csv, render_report, ReportFormat};
pub use run::{evaluate, load_fixtures, EvalReport, ExampleResult, Fixtures};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("dataset line {line}: {message}")]
    DatasetParseError { line: usize, message: String },
    #[error("no fixture for database `{0}`")]
    MissingFixture(String),
    #[error("fixture `{db}` failed to load: {message}")]
    Fixture { db: String, message: String },
    #[error("report CSV: {0}")]
    ReportParse(String),
    #[error("{0}")]
    Io(String),
}
