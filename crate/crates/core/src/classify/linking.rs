use serde::Serialize;

use super::model::LinearModel;
use super::ClassifyError;
use crate::engine::{SchemaCatalog, TableSchema};
use crate::text::{detokenize, EntityTag, TaggedToken, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableSource {
    /// Exactly one TABLE tag named it.
    Tagged,
    /// The linking model chose it.
    Predicted,
    /// Carried over from the previous turn of a dialogue.
    Context,
}

/// A COLUMN or VALUE span resolved against the chosen table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnBinding {
    /// Position of the span in the tagged sequence.
    pub span: usize,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaBinding {
    pub table: String,
    pub source: TableSource,
    pub columns: Vec<ColumnBinding>,
    /// Spans whose COLUMN or VALUE linkage does not fit the chosen table.
    pub unresolved: Vec<usize>,
}

impl SchemaBinding {
    pub fn column_of(&self, span: usize) -> Option<&str> {
        self.columns.iter().find(|b| b.span == span).map(|b| b.column.as_str())
    }
}

fn question_text(tagged: &[TaggedToken]) -> String {
    let tokens: Vec<Token> = tagged.iter().map(|t| t.token.clone()).collect();
    detokenize(&tokens)
}

/// Stage 1: the linking model restricted to `candidates`. Candidates the
/// model has never seen score 0 and rank after known classes on ties.
fn predict_table(model: &LinearModel, text: &str, candidates: &[&TableSchema]) -> Result<String, ClassifyError> {
    if let [only] = candidates {
        return Ok(only.name.clone());
    }
    let scores = model.scores(text);
    let ranked: Vec<(f64, usize, &str)> = candidates
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let class = model.classes().iter().position(|c| c.eq_ignore_ascii_case(&t.name));
            let score = class.map_or(0.0, |c| scores[c]);
            (score, class.unwrap_or(model.classes().len() + i), t.name.as_str())
        })
        .collect();
    if ranked.iter().all(|(s, _, _)| *s == 0.0) {
        return Err(ClassifyError::NoTableResolved);
    }
    let best = ranked
        .iter()
        .fold(None::<&(f64, usize, &str)>, |best, r| match best {
            Some(b) if b.0 > r.0 || (b.0 == r.0 && b.1 < r.1) => Some(b),
            _ => Some(r),
        })
        .expect("at least two candidates");
    Ok(best.2.to_string())
}

/// Stage 2: resolve COLUMN and VALUE spans against the chosen table only.
fn resolve_columns(tagged: &[TaggedToken], table: &TableSchema) -> (Vec<ColumnBinding>, Vec<usize>) {
    let mut columns = Vec::new();
    let mut unresolved = Vec::new();
    for (span, t) in tagged.iter().enumerate() {
        let found = match &t.tag {
            EntityTag::Column(c) => table.column(c).map(|c| c.name.clone()),
            EntityTag::Value { locations, .. } => locations
                .iter()
                .find(|l| l.table.eq_ignore_ascii_case(&table.name))
                .and_then(|l| table.column(&l.column))
                .map(|c| c.name.clone()),
            _ => continue,
        };
        match found {
            Some(column) => columns.push(ColumnBinding { span, column }),
            None => unresolved.push(span),
        }
    }
    (columns, unresolved)
}

/// Two-stage schema linking: pick the table, then resolve columns inside it.
pub fn link_schema(
    tagged: &[TaggedToken],
    catalog: &SchemaCatalog,
    model: &LinearModel,
) -> Result<SchemaBinding, ClassifyError> {
    link_schema_in_context(tagged, catalog, model, None)
}

/// Like [`link_schema`], but a question with no TABLE tag falls back to
/// `context_table` (the previous turn's table) before asking the model.
pub fn link_schema_in_context(
    tagged: &[TaggedToken],
    catalog: &SchemaCatalog,
    model: &LinearModel,
    context_table: Option<&str>,
) -> Result<SchemaBinding, ClassifyError> {
    if catalog.is_empty() {
        return Err(ClassifyError::NoTableResolved);
    }
    let mut named: Vec<&TableSchema> = Vec::new();
    for t in tagged {
        if let EntityTag::Table(name) = &t.tag {
            if let Some(schema) = catalog.table(name) {
                if !named.iter().any(|n| n.name == schema.name) {
                    named.push(schema);
                }
            }
        }
    }
    let (table, source) = match (named.as_slice(), context_table.and_then(|c| catalog.table(c))) {
        ([one], _) => (one.name.clone(), TableSource::Tagged),
        ([], Some(ctx)) => (ctx.name.clone(), TableSource::Context),
        ([], None) => {
            let all: Vec<&TableSchema> = catalog.tables.iter().collect();
            (predict_table(model, &question_text(tagged), &all)?, TableSource::Predicted)
        }
        (several, _) => (predict_table(model, &question_text(tagged), several)?, TableSource::Predicted),
    };
    let schema = catalog.table(&table).ok_or(ClassifyError::NoTableResolved)?;
    let (columns, unresolved) = resolve_columns(tagged, schema);
    Ok(SchemaBinding { table: schema.name.clone(), source, columns, unresolved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{fit, TrainingExample};
    use crate::engine::TableStore;
    use crate::text::{build_value_index, tag_entities, tokenize, Lexicon};

    fn setup() -> (SchemaCatalog, crate::text::ValueIndex, LinearModel) {
        let cat = SchemaCatalog::parse(
            "rooms\tid:int,floor:int,type:text,price:real,status:text\nreservations\tid:int,room_id:int,guest:text,month:text,nights:int\n",
        )
        .unwrap();
        let mut s = TableStore::new(&cat);
        s.load_csv("rooms", "id,floor,type,price,status\n1,1,single,50,available\n").unwrap();
        s.load_csv("reservations", "id,room_id,guest,month,nights\n1,1,Ada,june,3\n").unwrap();
        let model = fit(
            &[
                TrainingExample::new("rooms", "how many rooms are free"),
                TrainingExample::new("reservations", "how many bookings in may"),
                TrainingExample::new("rooms", "which rooms are on floor 2"),
                TrainingExample::new("reservations", "list the bookings for guest smith"),
            ],
            10,
        )
        .unwrap();
        (cat, build_value_index(&s), model)
    }

    fn link(text: &str) -> Result<SchemaBinding, ClassifyError> {
        let (cat, idx, model) = setup();
        let tagged = tag_entities(&tokenize(text), &cat, &idx, &Lexicon::bundled());
        link_schema(&tagged, &cat, &model)
    }

    #[test]
    fn single_table_tag_wins() {
        let b = link("how many rooms have status available").unwrap();
        assert_eq!(b.table, "rooms");
        assert_eq!(b.source, TableSource::Tagged);
        assert_eq!(b.columns.iter().map(|c| c.column.as_str()).collect::<Vec<_>>(), ["status"]);
    }

    #[test]
    fn model_picks_table_without_tag() {
        let b = link("how many bookings in june").unwrap();
        assert_eq!(b.table, "reservations");
        assert_eq!(b.source, TableSource::Predicted);
        assert_eq!(b.columns, vec![ColumnBinding { span: 3, column: "month".into() }]);
    }

    #[test]
    fn foreign_value_is_unresolved() {
        let b = link("rooms booked in june").unwrap();
        assert_eq!(b.table, "rooms");
        assert_eq!(b.unresolved, vec![3]);
        assert!(b.columns.is_empty());
    }

    #[test]
    fn zero_scores_everywhere_fail() {
        let (cat, _, _) = setup();
        let zero = LinearModel::zeros(vec!["rooms".into(), "reservations".into()], vec![]);
        let tagged = tag_entities(&tokenize("flurble"), &cat, &Default::default(), &Lexicon::default());
        assert_eq!(link_schema(&tagged, &cat, &zero), Err(ClassifyError::NoTableResolved));
    }

    #[test]
    fn context_table_fills_in() {
        let (cat, idx, model) = setup();
        let tagged = tag_entities(&tokenize("of those which are on floor 2"), &cat, &idx, &Lexicon::bundled());
        let b = link_schema_in_context(&tagged, &cat, &model, Some("rooms")).unwrap();
        assert_eq!((b.table.as_str(), b.source), ("rooms", TableSource::Context));
    }
}
