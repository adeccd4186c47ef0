use std::fs;
use std::path::Path;

use super::tags::{EntityTag, TagKind};
use super::tokenize::tokenize;
use super::TextError;
use crate::sql::{Aggregate, CompareOp};

const BUNDLED: &str = include_str!("../../../../data/lexicon.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    /// Case-folded tokens of the phrase.
    pub phrase: Vec<String>,
    pub tag: EntityTag,
}

/// Cue phrases and schema synonyms, read from `phrase<TAB>KIND<TAB>payload` lines.
///
/// `AGG_CUE`, `OP_CUE` and `ANAPHORA_CUE` rows are cue phrases. `TABLE` and
/// `COLUMN` rows are synonyms for schema names and only take effect when the
/// named table or column exists in the connected catalog.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pub entries: Vec<LexiconEntry>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon, TextError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| TextError::LexiconParse { line, message };
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(err("expected `phrase<TAB>KIND<TAB>payload`".into()));
            }
            let phrase: Vec<String> = tokenize(fields[0]).into_iter().map(|t| t.lower).collect();
            if phrase.is_empty() {
                return Err(err("empty phrase".into()));
            }
            let kind: TagKind = fields[1].parse().map_err(err)?;
            let payload = fields.get(2).map(|p| p.trim()).unwrap_or("");
            let tag = match kind {
                TagKind::AggCue => EntityTag::AggCue(
                    Aggregate::from_function(payload).ok_or_else(|| err(format!("unknown aggregation `{payload}`")))?,
                ),
                TagKind::OpCue => EntityTag::OpCue(
                    CompareOp::from_symbol(payload).ok_or_else(|| err(format!("unsupported operator `{payload}`")))?,
                ),
                TagKind::AnaphoraCue => EntityTag::AnaphoraCue,
                TagKind::Table | TagKind::Column if !payload.is_empty() => {
                    if kind == TagKind::Table {
                        EntityTag::Table(payload.to_string())
                    } else {
                        EntityTag::Column(payload.to_string())
                    }
                }
                TagKind::Table | TagKind::Column => return Err(err("synonym needs a target name".into())),
                other => return Err(err(format!("{other} entries cannot be declared in a lexicon"))),
            };
            entries.push(LexiconEntry { phrase, tag });
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Lexicon, TextError> {
        let text = fs::read_to_string(path).map_err(|e| TextError::Io(format!("{}: {e}", path.display())))?;
        Lexicon::parse(&text)
    }

    /// The lexicon shipped in `data/lexicon.tsv`.
    pub fn bundled() -> Lexicon {
        Lexicon::parse(BUNDLED).expect("bundled lexicon parses")
    }
}
