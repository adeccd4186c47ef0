use std::collections::HashMap;

use super::fuzzy::{similarity, within_threshold};
use super::lexicon::Lexicon;
use super::tags::{EntityTag, TaggedToken, ValueLocation};
use super::tokenize::{tokenize, Token};
use super::value_index::ValueIndex;
use crate::engine::SchemaCatalog;
use crate::sql::CompareOp;

type PhraseTable = HashMap<Vec<String>, EntityTag>;

/// Lookup tables built once per database: cue phrases, schema names and
/// synonyms, cell values, and the single-word candidates for fuzzy matching.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    cues: PhraseTable,
    names: PhraseTable,
    values: PhraseTable,
    longest: usize,
    /// (candidate, precedence, tag), sorted by candidate then precedence.
    fuzzy: Vec<(String, u8, EntityTag)>,
}

fn words(s: &str) -> Vec<String> {
    tokenize(s).into_iter().map(|t| t.lower).collect()
}

fn name_variants(name: &str) -> Vec<Vec<String>> {
    let mut out = vec![words(name)];
    if name.contains('_') {
        out.push(words(&name.replace('_', " ")));
    }
    out
}

pub fn is_numeral(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.is_none_or(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()))
}

impl Gazetteer {
    pub fn new(catalog: &SchemaCatalog, index: &ValueIndex, lexicon: &Lexicon) -> Self {
        let mut cues = PhraseTable::new();
        let mut names = PhraseTable::new();
        let mut values = PhraseTable::new();
        let mut fuzzy = Vec::new();

        for e in &lexicon.entries {
            if matches!(e.tag, EntityTag::AggCue(_) | EntityTag::OpCue(_) | EntityTag::AnaphoraCue) {
                cues.entry(e.phrase.clone()).or_insert_with(|| e.tag.clone());
            }
        }
        for t in &catalog.tables {
            for key in name_variants(&t.name) {
                names.entry(key).or_insert_with(|| EntityTag::Table(t.name.clone()));
            }
            fuzzy.push((t.name.to_lowercase(), 0, EntityTag::Table(t.name.clone())));
        }
        for t in &catalog.tables {
            for c in &t.columns {
                for key in name_variants(&c.name) {
                    names.entry(key).or_insert_with(|| EntityTag::Column(c.name.clone()));
                }
                fuzzy.push((c.name.to_lowercase(), 1, EntityTag::Column(c.name.clone())));
            }
        }
        for e in &lexicon.entries {
            let tag = match &e.tag {
                EntityTag::Table(t) => catalog.table(t).map(|s| EntityTag::Table(s.name.clone())),
                EntityTag::Column(c) => catalog
                    .tables
                    .iter()
                    .find_map(|t| t.column(c))
                    .map(|col| EntityTag::Column(col.name.clone())),
                _ => None,
            };
            if let Some(tag) = tag {
                names.entry(e.phrase.clone()).or_insert(tag);
            }
        }
        for (folded, entry) in index.iter() {
            let tag = EntityTag::Value { value: entry.value.clone(), locations: entry.locations.clone() };
            let key = words(folded);
            if key.len() == 1 {
                fuzzy.push((key[0].clone(), 2, tag.clone()));
            }
            if !key.is_empty() {
                values.entry(key).or_insert(tag);
            }
        }
        fuzzy.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        fuzzy.dedup_by(|a, b| a.0 == b.0);
        let longest = cues.keys().chain(names.keys()).chain(values.keys()).map(Vec::len).max().unwrap_or(1);
        Gazetteer { cues, names, values, longest, fuzzy }
    }

    fn longest_match(&self, table: &PhraseTable, tokens: &[Token], at: usize) -> Option<(usize, EntityTag)> {
        let max = self.longest.min(tokens.len() - at);
        (1..=max).rev().find_map(|n| {
            let key: Vec<String> = tokens[at..at + n].iter().map(|t| t.lower.clone()).collect();
            table.get(&key).map(|tag| (n, tag.clone()))
        })
    }

    /// Best fuzzy candidate: highest similarity, then smallest candidate string.
    fn fuzzy_match(&self, word: &str) -> Option<(f64, EntityTag)> {
        let mut best: Option<(f64, &EntityTag)> = None;
        for (cand, _, tag) in &self.fuzzy {
            if !within_threshold(word, cand) {
                continue;
            }
            let score = similarity(word, cand);
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, tag));
            }
        }
        best.map(|(s, t)| (s, t.clone()))
    }

    /// Tags every token exactly once. See the module docs for the precedence order.
    pub fn tag(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let exact = self
                .longest_match(&self.cues, tokens, i)
                .or_else(|| self.longest_match(&self.names, tokens, i))
                .or_else(|| self.longest_match(&self.values, tokens, i));
            let (len, tag, confidence) = if let Some((n, tag)) = exact {
                (n, tag, 1.0)
            } else {
                let word = &tokens[i].lower;
                let fuzzy = if word.chars().any(char::is_alphabetic) { self.fuzzy_match(word) } else { None };
                match fuzzy {
                    Some((score, tag)) => (1, tag, score),
                    None if is_numeral(word) => (1, EntityTag::Number(tokens[i].text.clone()), 1.0),
                    None => (1, EntityTag::Other, 0.0),
                }
            };
            let span = &tokens[i..i + len];
            out.push(TaggedToken {
                token: Token {
                    text: span.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" "),
                    lower: span.iter().map(|t| t.lower.as_str()).collect::<Vec<_>>().join(" "),
                    index: i,
                },
                len,
                tag,
                confidence,
            });
            i += len;
        }
        qualify_values(out)
    }
}

/// Folds `column [=] value` into one VALUE span when the value occurs in
/// that column, so "status cleaning" reads as a filter, not a projection.
fn qualify_values(tagged: Vec<TaggedToken>) -> Vec<TaggedToken> {
    let mut out: Vec<TaggedToken> = Vec::with_capacity(tagged.len());
    let mut i = 0;
    while i < tagged.len() {
        let EntityTag::Column(col) = &tagged[i].tag else {
            out.push(tagged[i].clone());
            i += 1;
            continue;
        };
        let mut j = i + 1;
        if tagged.get(j).is_some_and(|t| t.tag == EntityTag::OpCue(CompareOp::Eq)) {
            j += 1;
        }
        let merged = match tagged.get(j).map(|t| &t.tag) {
            Some(EntityTag::Value { value, locations }) => {
                let own: Vec<ValueLocation> =
                    locations.iter().filter(|l| l.column.eq_ignore_ascii_case(col)).cloned().collect();
                (!own.is_empty()).then(|| EntityTag::Value { value: value.clone(), locations: own })
            }
            _ => None,
        };
        match merged {
            Some(tag) => {
                let span = &tagged[i..=j];
                out.push(TaggedToken {
                    token: Token {
                        text: span.iter().map(|t| t.token.text.as_str()).collect::<Vec<_>>().join(" "),
                        lower: span.iter().map(|t| t.token.lower.as_str()).collect::<Vec<_>>().join(" "),
                        index: tagged[i].token.index,
                    },
                    len: span.iter().map(|t| t.len).sum(),
                    tag,
                    confidence: span.iter().map(|t| t.confidence).fold(1.0, f64::min),
                });
                i = j + 1;
            }
            None => {
                out.push(tagged[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Rule-based entity tagging against one catalog, its value index and a lexicon.
///
/// Precedence at each position: cue phrases, exact schema names (and
/// lexicon synonyms), exact cell values (each longest match first), then a
/// fuzzy single-word match at similarity >= 0.8, then numerals, else OTHER.
/// A column name directly before one of its own values (optionally with
/// "is" between) is folded into that VALUE span.
pub fn tag_entities(tokens: &[Token], catalog: &SchemaCatalog, index: &ValueIndex, lexicon: &Lexicon) -> Vec<TaggedToken> {
    Gazetteer::new(catalog, index, lexicon).tag(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::TableStore;
    use crate::sql::Aggregate;
    use crate::text::{build_value_index, TagKind};

    fn hotel() -> (SchemaCatalog, ValueIndex) {
        let cat = SchemaCatalog::parse(
            "rooms\tid:int,floor:int,type:text,price:real,status:text\nreservations\tid:int,room_id:int,guest:text,month:text,nights:int\n",
        )
        .unwrap();
        let mut s = TableStore::new(&cat);
        s.load_csv("rooms", "id,floor,type,price,status\n1,1,single,50,available\n2,1,double,80,occupied\n").unwrap();
        s.load_csv("reservations", "id,room_id,guest,month,nights\n1,2,Ada Lovelace,june,3\n").unwrap();
        let idx = build_value_index(&s);
        (cat, idx)
    }

    fn tag(text: &str) -> Vec<TaggedToken> {
        let (cat, idx) = hotel();
        tag_entities(&tokenize(text), &cat, &idx, &Lexicon::bundled())
    }

    #[test]
    fn table_one_question() {
        let tags = tag("how many rooms are available");
        assert_eq!(tags.len(), 4);
        assert_eq!(tags[0].tag, EntityTag::AggCue(Aggregate::Count));
        assert_eq!(tags[0].len, 2);
        assert_eq!(tags[1].tag, EntityTag::Table("rooms".into()));
        assert_eq!(tags[2].tag, EntityTag::Other);
        assert_eq!(
            tags[3].tag,
            EntityTag::Value {
                value: "available".into(),
                locations: vec![ValueLocation { table: "rooms".into(), column: "status".into() }]
            }
        );
        assert!(tags.iter().filter(|t| t.kind() != TagKind::Other).all(|t| t.confidence == 1.0));
    }

    #[test]
    fn unmatched_is_other() {
        let tags = tag("xyzzy");
        assert_eq!(tags[0].tag, EntityTag::Other);
        assert_eq!(tags[0].confidence, 0.0);
    }

    #[test]
    fn fuzzy_table_at_threshold() {
        let tags = tag("roms");
        assert_eq!(tags[0].tag, EntityTag::Table("rooms".into()));
        assert_eq!(tags[0].confidence, 0.8);
    }

    #[test]
    fn multiword_values_and_names() {
        let tags = tag("nights booked by ada lovelace for room id 2");
        let kinds: Vec<TagKind> = tags.iter().map(TaggedToken::kind).collect();
        assert_eq!(
            kinds,
            [
                TagKind::Column,
                TagKind::Other,
                TagKind::Other,
                TagKind::Value,
                TagKind::Other,
                TagKind::Column,
                TagKind::Number
            ]
        );
        assert_eq!(tags[3].token.text, "ada lovelace");
        assert_eq!(tags[5].tag, EntityTag::Column("room_id".into()));
    }

    #[test]
    fn synonyms_follow_catalog() {
        let tags = tag("rooms that cost less than 100");
        assert_eq!(tags[2].tag, EntityTag::Column("price".into()));
        assert_eq!(tags[3].tag, EntityTag::OpCue(crate::sql::CompareOp::Lt));
        assert_eq!(tags[4].tag, EntityTag::Number("100".into()));
        // `brand` maps to a column this catalog does not have.
        assert_eq!(tag("brand")[0].tag, EntityTag::Other);
    }

    #[test]
    fn column_qualified_value_is_one_span() {
        let tags = tag("rooms with status is available");
        assert_eq!(tags.len(), 3);
        assert_eq!(tags[2].token.text, "status is available");
        assert_eq!(tags[2].len, 3);
        assert_eq!(tags[2].kind(), TagKind::Value);
        // A column followed by a value from elsewhere stays a column.
        let tags = tag("type available");
        assert_eq!(tags[0].tag, EntityTag::Column("type".into()));
    }

    #[test]
    fn numerals() {
        assert!(is_numeral("10.5"));
        assert!(is_numeral("-3"));
        assert!(!is_numeral("1."));
        assert!(!is_numeral("x1"));
    }
}
