use super::catalog::{slots, PatternElement, Template, TemplateCatalog};
use super::TemplateError;
use crate::classify::SchemaBinding;
use crate::sql::{parse_sql, Literal, Predicate, SqlQuery, CompareOp, StatementType};
use crate::text::{EntityTag, TagKind, TaggedToken};

fn satisfies(tag: &EntityTag, element: &PatternElement) -> bool {
    tag.kind() == element.kind
        && element
            .literal
            .as_ref()
            .is_none_or(|lit| tag.payload().is_some_and(|p| p.eq_ignore_ascii_case(lit)))
}

/// Whether distinct tags can be found for every pattern element. Pinned
/// elements claim their tags first so a bare element never steals them.
pub fn pattern_matches(pattern: &[PatternElement], tagged: &[TaggedToken]) -> bool {
    let mut used = vec![false; tagged.len()];
    let ordered = pattern.iter().filter(|e| e.literal.is_some()).chain(pattern.iter().filter(|e| e.literal.is_none()));
    for element in ordered {
        match tagged.iter().enumerate().position(|(i, t)| !used[i] && satisfies(&t.tag, element)) {
            Some(i) => used[i] = true,
            None => return false,
        }
    }
    true
}

/// First template, in catalog order, with the right statement type whose
/// pattern is covered by the tags.
pub fn match_template<'c>(
    tagged: &[TaggedToken],
    stype: StatementType,
    catalog: &'c TemplateCatalog,
) -> Result<&'c Template, TemplateError> {
    catalog
        .templates()
        .iter()
        .find(|t| t.statement_type == stype && pattern_matches(&t.pattern, tagged))
        .ok_or_else(|| {
            let mut present: Vec<TagKind> = tagged.iter().map(TaggedToken::kind).collect();
            present.sort();
            present.dedup();
            TemplateError::NoTemplateMatch { statement_type: stype, present }
        })
}

/// Sources for each slot family, in sentence order.
struct Sources<'t> {
    columns: Vec<String>,
    aggs: Vec<String>,
    ops: Vec<CompareOp>,
    /// (span, tag) of every VALUE or NUMBER the pattern allows into `$VALUE`.
    values: Vec<(usize, &'t EntityTag)>,
}

fn sources<'t>(template: &Template, binding: &SchemaBinding, tagged: &'t [TaggedToken]) -> Sources<'t> {
    let wants = |k: TagKind| template.pattern.iter().any(|e| e.kind == k);
    let columns = tagged
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind() == TagKind::Column)
        .filter_map(|(i, _)| binding.column_of(i).map(str::to_string))
        .collect();
    let aggs = tagged
        .iter()
        .filter_map(|t| match &t.tag {
            EntityTag::AggCue(a) => Some(a.as_str().to_string()),
            _ => None,
        })
        .collect();
    let is_operand = |t: &TaggedToken| matches!(t.kind(), TagKind::Value | TagKind::Number) && wants(t.kind());
    // An operator cue followed by another before any operand is superseded,
    // as in "what is ... over 100".
    let mut ops = Vec::new();
    for (i, t) in tagged.iter().enumerate() {
        let EntityTag::OpCue(op) = t.tag else { continue };
        let next = tagged[i + 1..].iter().find(|n| n.kind() == TagKind::OpCue || is_operand(n));
        if !next.is_some_and(|n| n.kind() == TagKind::OpCue) {
            ops.push(op);
        }
    }
    let values = tagged.iter().enumerate().filter(|(_, t)| is_operand(t)).map(|(i, t)| (i, &t.tag)).collect();
    Sources { columns, aggs, ops, values }
}

fn literal_of(tag: &EntityTag) -> Literal {
    match tag {
        EntityTag::Number(n) => Literal::Number(n.clone()),
        EntityTag::Value { value, .. } => Literal::Text(value.clone()),
        other => Literal::Text(other.payload().unwrap_or_default()),
    }
}

/// Fills the skeleton's slots left to right from the tags, then attaches
/// every VALUE tag no slot consumed: as an equality conjunct, or for INSERT
/// as an extra column/value pair.
pub fn build_query(template: &Template, binding: &SchemaBinding, tagged: &[TaggedToken]) -> Result<SqlQuery, TemplateError> {
    let src = sources(template, binding, tagged);
    let mut consumed = Vec::new();
    let mut text = String::new();
    let mut last = 0;
    for slot in slots(&template.sql_skeleton) {
        let label = &template.sql_skeleton[slot.range.0..slot.range.1];
        let unfilled = || TemplateError::UnfilledSlot(label.to_string());
        let k = slot.ordinal - 1;
        let filled = match slot.name {
            "TABLE" => binding.table.clone(),
            "AGG" => src.aggs.get(k).cloned().ok_or_else(unfilled)?,
            "COLUMN" => src.columns.get(k).cloned().ok_or_else(unfilled)?,
            "OP" => src.ops.get(k).map(|o| o.symbol().to_string()).ok_or_else(unfilled)?,
            "VALUE" => {
                let (span, tag) = src.values.get(k).ok_or_else(unfilled)?;
                consumed.push(*span);
                literal_of(tag).to_string()
            }
            _ => return Err(unfilled()),
        };
        text.push_str(&template.sql_skeleton[last..slot.range.0]);
        text.push_str(&filled);
        last = slot.range.1;
    }
    text.push_str(&template.sql_skeleton[last..]);
    let mut query =
        parse_sql(&text).map_err(|e| TemplateError::TemplateSqlError { id: template.id.clone(), message: e.to_string() })?;

    for (span, t) in tagged.iter().enumerate() {
        if t.kind() != TagKind::Value || consumed.contains(&span) {
            continue;
        }
        let Some(column) = binding.column_of(span) else { continue };
        let value = literal_of(&t.tag);
        if query.kind == StatementType::Insert {
            let pairs = query.insert_values.get_or_insert_with(Vec::new);
            if !pairs.iter().any(|(c, _)| c.eq_ignore_ascii_case(column)) {
                pairs.push((column.to_string(), value));
            }
        } else {
            let p = Predicate::new(column, CompareOp::Eq, value);
            if !query.conjuncts.contains(&p) {
                query.conjuncts.push(p);
            }
        }
    }
    Ok(query)
}
