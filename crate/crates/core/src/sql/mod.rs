//! The restricted SQL dialect: one table, one optional aggregation, and a
//! conjunction of `column op constant` filters, plus single-table DML.

mod ast;
mod normalize;
mod parser;

pub use ast::{Aggregate, CompareOp, Literal, Predicate, Projection, SqlQuery, StatementType};
pub use normalize::{canonical_number, logical_form_equal, normalize};
pub use parser::{is_identifier, is_reserved, parse_sql, RESERVED};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SqlError {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unsupported SQL at offset {position}: {construct} is outside the supported subset")]
    Unsupported { construct: String, position: usize },
}

/// Canonical text of a query. Same as `q.to_string()`.
pub fn serialize(q: &SqlQuery) -> String {
    q.serialize()
}
