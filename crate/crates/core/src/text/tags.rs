use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::tokenize::Token;
use crate::sql::{Aggregate, CompareOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TagKind {
    Table,
    Column,
    Value,
    Number,
    AggCue,
    OpCue,
    AnaphoraCue,
    Other,
}

impl TagKind {
    pub const ALL: [TagKind; 8] = [
        TagKind::Table,
        TagKind::Column,
        TagKind::Value,
        TagKind::Number,
        TagKind::AggCue,
        TagKind::OpCue,
        TagKind::AnaphoraCue,
        TagKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TagKind::Table => "TABLE",
            TagKind::Column => "COLUMN",
            TagKind::Value => "VALUE",
            TagKind::Number => "NUMBER",
            TagKind::AggCue => "AGG_CUE",
            TagKind::OpCue => "OP_CUE",
            TagKind::AnaphoraCue => "ANAPHORA_CUE",
            TagKind::Other => "OTHER",
        }
    }
}

impl fmt::Display for TagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TagKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TagKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown tag kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ValueLocation {
    pub table: String,
    pub column: String,
}

/// An entity tag together with its schema or literal linkage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EntityTag {
    Table(String),
    Column(String),
    /// A cell value, with every `(table, column)` it occurs in.
    Value { value: String, locations: Vec<ValueLocation> },
    Number(String),
    AggCue(Aggregate),
    OpCue(CompareOp),
    AnaphoraCue,
    Other,
}

impl EntityTag {
    pub fn kind(&self) -> TagKind {
        match self {
            EntityTag::Table(_) => TagKind::Table,
            EntityTag::Column(_) => TagKind::Column,
            EntityTag::Value { .. } => TagKind::Value,
            EntityTag::Number(_) => TagKind::Number,
            EntityTag::AggCue(_) => TagKind::AggCue,
            EntityTag::OpCue(_) => TagKind::OpCue,
            EntityTag::AnaphoraCue => TagKind::AnaphoraCue,
            EntityTag::Other => TagKind::Other,
        }
    }

    /// The payload as text, used for literal constraints in template patterns.
    pub fn payload(&self) -> Option<String> {
        match self {
            EntityTag::Table(s) | EntityTag::Column(s) | EntityTag::Number(s) => Some(s.clone()),
            EntityTag::Value { value, .. } => Some(value.clone()),
            EntityTag::AggCue(a) => Some(a.as_str().to_string()),
            EntityTag::OpCue(o) => Some(o.symbol().to_string()),
            EntityTag::AnaphoraCue | EntityTag::Other => None,
        }
    }
}

impl fmt::Display for EntityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityTag::Value { value, locations } => {
                let locs: Vec<String> = locations.iter().map(|l| format!("{}.{}", l.table, l.column)).collect();
                write!(f, "VALUE({},\"{}\")", locs.join("|"), value)
            }
            other => match other.payload() {
                Some(p) => write!(f, "{}({})", other.kind(), p),
                None => write!(f, "{}", other.kind()),
            },
        }
    }
}

/// One tagged span of the input. Multi-word matches cover `len` tokens
/// starting at `token.index`; `token.text` holds the joined surface form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedToken {
    pub token: Token,
    pub len: usize,
    pub tag: EntityTag,
    /// 1.0 for exact matches, the similarity score for fuzzy ones, 0.0 for OTHER.
    pub confidence: f64,
}

impl TaggedToken {
    pub fn kind(&self) -> TagKind {
        self.tag.kind()
    }

    pub fn span(&self) -> std::ops::Range<usize> {
        self.token.index..self.token.index + self.len
    }
}
