mod common;

use std::collections::BTreeSet;

use nlq_core::engine::{ColumnType, Value};
use nlq_core::text::{detokenize, is_numeral, normalize_text, tokenize, EntityTag, TagKind};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

const PIECES: &[&str] = &[
    "how", "many", "rooms", "room", "romos", "rooms?", "are", "available", "avialable", "suite", "suites", "floor", "flor",
    "price", "prise", "of", "those", "them", "more", "than", "under", "average", "june", "jnue", "Maria", "Silva", "guest",
    "reservations", "reservatons", "3", "2.5", "100", "?", ",", ".", "!", "'s", "\"x\"", "<", ">", "=", "x", "zzz", "status",
];

fn question(rng: &mut rand_chacha::ChaCha8Rng) -> String {
    let n = rng.random_range(0..12);
    let mut s = String::new();
    for _ in 0..n {
        s.push_str(PIECES.choose(rng).unwrap());
        s.push_str([" ", " ", "  ", "\t", ""].choose(rng).unwrap());
    }
    s
}

proptest! {
    #[test]
    fn tokenization_is_lossless_up_to_whitespace(seed in any::<u64>()) {
        let s = question(&mut common::rng(seed));
        let tokens = tokenize(&s);
        prop_assert_eq!(detokenize(&tokens), normalize_text(&s));
        for (i, t) in tokens.iter().enumerate() {
            prop_assert_eq!(t.index, i);
            prop_assert_eq!(&t.lower, &t.text.to_lowercase());
        }
    }

    #[test]
    fn free_text_tokenizes_losslessly(s in "[a-zA-Z0-9 ?.,!'<>=\t-]{0,40}") {
        prop_assert_eq!(detokenize(&tokenize(&s)), normalize_text(&s));
    }
}

#[test]
fn tagging_is_total_deterministic_and_grounded() {
    let assets = common::bundled("hotel");
    let db = &assets.db;
    let catalog = db.catalog();
    let mut rng = common::rng(7);
    for _ in 0..2000 {
        let q = question(&mut rng);
        let tokens = tokenize(&q);
        let tagged = db.gazetteer().tag(&tokens);
        assert_eq!(tagged, db.gazetteer().tag(&tokens), "{q}");

        let mut next = 0;
        for t in &tagged {
            assert_eq!(t.span().start, next, "{q}: spans must tile the tokens");
            assert!(t.len >= 1);
            next = t.span().end;
            assert!((0.0..=1.0).contains(&t.confidence));
            match &t.tag {
                EntityTag::Table(name) => assert!(catalog.table(name).is_some()),
                EntityTag::Column(name) => assert!(catalog.tables.iter().any(|s| s.column(name).is_some()), "{name}"),
                EntityTag::Value { locations, .. } => {
                    assert!(!locations.is_empty());
                    for l in locations {
                        assert!(catalog.table(&l.table).and_then(|s| s.column(&l.column)).is_some());
                    }
                }
                EntityTag::Number(n) => assert!(is_numeral(n), "{n}"),
                _ => {}
            }
            if t.kind() == TagKind::Other {
                assert_eq!(t.confidence, 0.0);
            }
        }
        assert_eq!(next, tokens.len());
        assert!(tagged.len() <= tokens.len());
    }
}

#[test]
fn fuzzy_hits_clear_the_threshold_under_a_reference_distance() {
    let assets = common::bundled("hotel");
    let db = &assets.db;
    let mut rng = common::rng(11);
    let mut fuzzy_seen = 0;
    for _ in 0..2000 {
        let q = question(&mut rng);
        for t in db.gazetteer().tag(&tokenize(&q)) {
            if t.kind() == TagKind::Other || t.confidence == 1.0 {
                continue;
            }
            let target = match &t.tag {
                EntityTag::Table(s) | EntityTag::Column(s) => s.to_lowercase(),
                EntityTag::Value { value, .. } => value.to_lowercase(),
                other => panic!("fuzzy hit on {other}"),
            };
            let reference = strsim::normalized_levenshtein(&t.token.lower, &target);
            assert!(reference >= 0.8, "{} ~ {target}: {reference}", t.token.lower);
            assert!((reference - t.confidence).abs() < 1e-12);
            fuzzy_seen += 1;
        }
    }
    assert!(fuzzy_seen > 0, "the corpus should exercise fuzzy matching");
}

#[test]
fn exact_schema_names_get_full_confidence() {
    let assets = common::bundled("hotel");
    let db = &assets.db;
    for schema in &db.catalog().tables {
        let mut names = vec![schema.name.clone()];
        names.extend(schema.columns.iter().map(|c| c.name.clone()));
        for n in names {
            let tagged = db.gazetteer().tag(&tokenize(&format!("show {n} please")));
            let hit = tagged.iter().find(|t| t.token.lower == n.to_lowercase()).expect("token survives");
            assert_eq!(hit.confidence, 1.0, "{n}");
            assert!(matches!(hit.kind(), TagKind::Table | TagKind::Column), "{n}: {}", hit.tag);
        }
    }
}

#[test]
fn value_index_covers_exactly_the_text_cells() {
    for name in ["hotel", "players", "cars"] {
        let assets = common::bundled(name);
        let db = &assets.db;
        let mut expected = BTreeSet::new();
        for table in db.store().tables() {
            for (i, col) in table.schema.columns.iter().enumerate() {
                if col.ty != ColumnType::Text {
                    continue;
                }
                for row in &table.rows {
                    if let Value::Text(s) = &row.cells[i] {
                        expected.insert((s.to_lowercase(), table.schema.name.clone(), col.name.clone()));
                    }
                }
            }
        }
        let mut actual = BTreeSet::new();
        for (key, entry) in db.index().iter() {
            for l in &entry.locations {
                actual.insert((key.clone(), l.table.clone(), l.column.clone()));
            }
        }
        assert_eq!(actual, expected, "{name}");
    }
}
