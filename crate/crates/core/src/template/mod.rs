//! Field-specific templates: a tag pattern, an SQL skeleton with slots, an
//! answer skeleton and an execution target per row.

mod catalog;
mod fill;
mod render;

pub use catalog::{load_templates, slots, PatternElement, Slot, Target, Template, TemplateCatalog};
pub use fill::{build_query, match_template, pattern_matches};
pub use render::{render_answer, NO_RESULTS};

use thiserror::Error;

use crate::sql::StatementType;
use crate::text::TagKind;

fn kinds(present: &[TagKind]) -> String {
    present.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template file line {line}: {message}")]
    TemplateParseError { line: usize, message: String },
    #[error("template {id}: skeleton does not parse: {message}")]
    TemplateSqlError { id: String, message: String },
    #[error("template {id}: slot {slot} has no source in the pattern")]
    TemplateSlotMismatch { id: String, slot: String },
    #[error("duplicate template id `{0}`")]
    DuplicateId(String),
    #[error("no {statement_type} template matches tags [{}]", kinds(.present))]
    NoTemplateMatch { statement_type: StatementType, present: Vec<TagKind> },
    #[error("no tag available for slot {0}")]
    UnfilledSlot(String),
    #[error("answer needs a single value but the result has {rows} rows and {columns} columns")]
    PlaceholderUnavailable { rows: usize, columns: usize },
    #[error("{0}")]
    Io(String),
}
