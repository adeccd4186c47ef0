use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::TemplateError;
use crate::sql::{parse_sql, StatementType};
use crate::text::TagKind;

/// Where a template's query runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Target {
    Database,
    PreviousResult,
    /// Left to the dialogue manager.
    Auto,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Database => "DATABASE",
            Target::PreviousResult => "PREVIOUS_RESULT",
            Target::Auto => "AUTO",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Target::Database, Target::PreviousResult, Target::Auto]
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown target `{s}`"))
    }
}

/// One required tag in a pattern, optionally pinned to a payload such as
/// `AGG_CUE(COUNT)` or `OP_CUE(>)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PatternElement {
    pub kind: TagKind,
    pub literal: Option<String>,
}

impl fmt::Display for PatternElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.literal {
            Some(l) => write!(f, "{}({})", self.kind, l),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl FromStr for PatternElement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, literal) = match s.split_once('(') {
            Some((k, rest)) => {
                let lit = rest.strip_suffix(')').ok_or_else(|| format!("unclosed `(` in `{s}`"))?.trim();
                if lit.is_empty() {
                    return Err(format!("empty literal in `{s}`"));
                }
                (k, Some(lit.to_string()))
            }
            None => (s, None),
        };
        let kind: TagKind = kind.parse()?;
        if kind == TagKind::Other {
            return Err("OTHER cannot be required by a pattern".into());
        }
        Ok(PatternElement { kind, literal })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Template {
    pub id: String,
    pub statement_type: StatementType,
    pub pattern: Vec<PatternElement>,
    pub sql_skeleton: String,
    pub answer_skeleton: String,
    pub target: Target,
}

/// A `$NAME` or `$NAMEn` placeholder in an SQL skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot<'a> {
    pub name: &'a str,
    /// 1 for an unnumbered slot.
    pub ordinal: usize,
    pub range: (usize, usize),
}

pub fn slots(skeleton: &str) -> Vec<Slot<'_>> {
    let bytes = skeleton.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'$' {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        let name_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_uppercase() || bytes[i] == b'_') {
            i += 1;
        }
        let name_end = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let ordinal = skeleton[name_end..i].parse().unwrap_or(1);
        out.push(Slot { name: &skeleton[name_start..name_end], ordinal, range: (start, i) });
    }
    out
}

impl Template {
    /// Pattern length plus the number of pinned literals.
    pub fn specificity(&self) -> usize {
        self.pattern.len() + self.pattern.iter().filter(|e| e.literal.is_some()).count()
    }

    fn required(&self, kinds: &[TagKind]) -> usize {
        self.pattern.iter().filter(|e| kinds.contains(&e.kind)).count()
    }

    /// Checks that every slot has a source in the pattern, then substitutes
    /// dummy identifiers and parses the result.
    pub fn validate(&self) -> Result<(), TemplateError> {
        let mut text = String::new();
        let mut last = 0;
        for slot in slots(&self.sql_skeleton) {
            let (kinds, dummy): (&[TagKind], String) = match slot.name {
                "TABLE" => (&[], "t".into()),
                "AGG" => (&[TagKind::AggCue], "MAX".into()),
                "COLUMN" => (&[TagKind::Column], format!("c{}", slot.ordinal)),
                "OP" => (&[TagKind::OpCue], "=".into()),
                "VALUE" => (&[TagKind::Value, TagKind::Number], "1".into()),
                _ => {
                    return Err(TemplateError::TemplateSlotMismatch {
                        id: self.id.clone(),
                        slot: self.sql_skeleton[slot.range.0..slot.range.1].to_string(),
                    })
                }
            };
            if !kinds.is_empty() && self.required(kinds) < slot.ordinal {
                return Err(TemplateError::TemplateSlotMismatch {
                    id: self.id.clone(),
                    slot: self.sql_skeleton[slot.range.0..slot.range.1].to_string(),
                });
            }
            text.push_str(&self.sql_skeleton[last..slot.range.0]);
            text.push_str(&dummy);
            last = slot.range.1;
        }
        text.push_str(&self.sql_skeleton[last..]);
        let parsed = parse_sql(&text).map_err(|e| TemplateError::TemplateSqlError { id: self.id.clone(), message: e.to_string() })?;
        if parsed.kind != self.statement_type {
            return Err(TemplateError::TemplateSqlError {
                id: self.id.clone(),
                message: format!("skeleton is a {} statement, row says {}", parsed.kind, self.statement_type),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pattern: Vec<String> = self.pattern.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} | {} | {} | {} | {} | {}",
            self.id,
            self.statement_type,
            pattern.join(", "),
            self.sql_skeleton,
            self.answer_skeleton,
            self.target
        )
    }
}

/// The templates of one field, most specific first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TemplateCatalog {
    templates: Vec<Template>,
}

impl TemplateCatalog {
    /// Validates every template, rejects duplicate ids and sorts by
    /// descending specificity, then ascending id.
    pub fn new(mut templates: Vec<Template>) -> Result<Self, TemplateError> {
        let mut seen = HashSet::new();
        for t in &templates {
            if !seen.insert(t.id.clone()) {
                return Err(TemplateError::DuplicateId(t.id.clone()));
            }
            t.validate()?;
        }
        templates.sort_by(|a, b| b.specificity().cmp(&a.specificity()).then_with(|| a.id.cmp(&b.id)));
        Ok(TemplateCatalog { templates })
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    /// Parses `id | statement_type | pattern | sql_skeleton | answer_skeleton | target`
    /// rows. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let mut templates = Vec::new();
        let mut seen = HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad = |message: String| TemplateError::TemplateParseError { line, message };
            let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
            let [id, stype, pattern, sql, answer, target] = fields[..] else {
                return Err(bad(format!("expected 6 `|`-separated fields, found {}", fields.len())));
            };
            if id.is_empty() || sql.is_empty() {
                return Err(bad("empty id or skeleton".into()));
            }
            if !seen.insert(id.to_string()) {
                return Err(bad(format!("duplicate template id `{id}`")));
            }
            let statement_type = stype.parse().map_err(bad)?;
            let pattern = pattern
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<PatternElement>, String>>()
                .map_err(bad)?;
            let target = target.parse().map_err(bad)?;
            templates.push(Template {
                id: id.to_string(),
                statement_type,
                pattern,
                sql_skeleton: sql.to_string(),
                answer_skeleton: answer.to_string(),
                target,
            });
        }
        if templates.is_empty() {
            log::warn!("template file holds no templates; every question will fail to match");
        }
        TemplateCatalog::new(templates)
    }
}

pub fn load_templates(path: &Path) -> Result<TemplateCatalog, TemplateError> {
    let text = fs::read_to_string(path).map_err(|e| TemplateError::Io(format!("{}: {e}", path.display())))?;
    TemplateCatalog::parse(&text)
}
