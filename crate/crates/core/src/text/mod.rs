//! Turns question text into tagged spans using rules and gazetteers built
//! from the connected schema, its cell values and an editable lexicon.

mod fuzzy;
mod lexicon;
mod tagger;
mod tags;
mod tokenize;
mod value_index;

pub use fuzzy::{levenshtein, similarity, within_threshold, FUZZY_THRESHOLD};
pub use lexicon::{Lexicon, LexiconEntry};
pub use tagger::{is_numeral, tag_entities, Gazetteer};
pub use tags::{EntityTag, TagKind, TaggedToken, ValueLocation};
pub use tokenize::{detokenize, is_punct, normalize_text, tokenize, Token};
pub use value_index::{build_value_index, ValueEntry, ValueIndex};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("lexicon line {line}: {message}")]
    LexiconParse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}
