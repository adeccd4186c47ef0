//! Schema catalog, CSV-backed in-memory tables, and the executor for the
//! restricted grammar (plus an independent brute-force executor).

mod exec;
mod oracle;
mod result;
mod store;
mod value;

pub use exec::{execute, select, select_from_result, Source};
pub use oracle::oracle_execute;
pub use result::ResultSet;
pub use store::{load_store, ColumnDef, Row, SchemaCatalog, Table, TableSchema, TableStore};
pub use value::{ColumnType, Value};

use thiserror::Error;

use crate::sql::StatementType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("catalog line {line}: {message}")]
    CatalogParse { line: usize, message: String },
    #[error("CSV header of `{0}` does not match the catalog")]
    CsvHeaderMismatch(String),
    #[error("`{table}` row {row}, column `{column}`: cell does not match the column type")]
    CellType { table: String, row: usize, column: String },
    #[error("CSV error in `{table}`: {message}")]
    Csv { table: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("column `{0}` assigned twice")]
    DuplicateColumn(String),
    #[error("only SELECT statements can run over a previous result")]
    MutationOnPreviousResult,
    #[error("{0} statements modify the store and need write access")]
    NotReadOnly(StatementType),
    #[error("type mismatch on `{column}`: {detail}")]
    TypeMismatch { column: String, detail: String },
}
