mod common;

use nlq_core::classify::link_schema;
use nlq_core::engine::{ColumnType, ResultSet, Value};
use nlq_core::sql::{parse_sql, StatementType};
use nlq_core::template::{build_query, match_template, pattern_matches, render_answer, TemplateCatalog};
use nlq_core::text::tokenize;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

fn vocabulary(db: &str) -> &'static [&'static str] {
    match db {
        "hotel" => &[
            "how many", "rooms", "reservations", "average", "highest", "total", "price", "floor", "nights", "guest", "month",
            "june", "suite", "double", "available", "Maria Silva", "more than", "under", "is", "3", "120", "of those", "show",
            "status", "cleaning", "add", "delete",
        ],
        "players" => &[
            "how many", "players", "average", "maximum", "age", "points", "team", "position", "country", "Falcons", "guard",
            "Japan", "Kenji Sato", "older than", "more than", "who", "aged", "24", "18", "of them", "list",
        ],
        _ => &[
            "how many", "cars", "average", "cheapest", "price", "mileage", "year", "color", "make", "red", "Honda", "Civic",
            "after", "under", "2019", "15000", "of those", "which", "change", "black", "show",
        ],
    }
}

fn question(rng: &mut rand_chacha::ChaCha8Rng, db: &str) -> String {
    let words = vocabulary(db);
    (0..rng.random_range(1..7)).map(|_| *words.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

proptest! {
    /// Every template that matches a tagged question and fills without error
    /// yields SQL that parses back to the same statement.
    #[test]
    fn filled_templates_stay_in_the_grammar(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for db in ["hotel", "players", "cars"] {
            let assets = common::shared(db);
            let q = question(&mut rng, db);
            let tagged = assets.db.gazetteer().tag(&tokenize(&q));
            let Ok(binding) = link_schema(&tagged, assets.db.catalog(), &assets.engine.linking_model) else { continue };
            for t in assets.engine.templates.templates() {
                if !pattern_matches(&t.pattern, &tagged) {
                    continue;
                }
                if let Ok(sql) = build_query(t, &binding, &tagged) {
                    let text = sql.to_string();
                    prop_assert_eq!(parse_sql(&text), Ok(sql.clone()), "{} via {}", q, t.id);
                    prop_assert_eq!(sql.kind, t.statement_type);
                }
            }
        }
    }

    #[test]
    fn matching_ignores_catalog_order(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for db in ["hotel", "players", "cars"] {
            let assets = common::shared(db);
            let mut rows = assets.engine.templates.templates().to_vec();
            rows.shuffle(&mut rng);
            let shuffled = TemplateCatalog::new(rows).unwrap();
            let q = question(&mut rng, db);
            let tagged = assets.db.gazetteer().tag(&tokenize(&q));
            for st in StatementType::ALL {
                let a = match_template(&tagged, st, &assets.engine.templates).map(|t| t.id.clone());
                let b = match_template(&tagged, st, &shuffled).map(|t| t.id.clone());
                prop_assert_eq!(a, b, "{}", q);
            }
        }
    }

    #[test]
    fn rendering_succeeds_when_the_shape_fits(seed in any::<u64>(), nrows in 0usize..5, ncols in 1usize..4) {
        let mut rng = common::rng(seed);
        let assets = common::shared("hotel");
        let binding = nlq_core::classify::SchemaBinding {
            table: "rooms".into(),
            source: nlq_core::classify::TableSource::Tagged,
            columns: vec![],
            unresolved: vec![],
        };
        for t in assets.engine.templates.templates() {
            let scalar = t.answer_skeleton.contains("(COUNT)") || t.answer_skeleton.contains("(VALUE)");
            let result = if scalar {
                ResultSet::scalar_of("x", ColumnType::Int, Value::Int(rng.random_range(0..100)))
            } else {
                ResultSet::new(
                    (0..ncols).map(|i| format!("c{i}")).collect(),
                    vec![ColumnType::Int; ncols],
                    (0..nrows).map(|_| (0..ncols).map(|_| Value::Int(rng.random_range(0..9))).collect()).collect(),
                )
            };
            let answer = render_answer(&result, t, &binding);
            prop_assert!(answer.is_ok(), "{}: {:?}", t.id, answer);
            let answer = answer.unwrap();
            prop_assert!(!answer.contains("(COUNT)") && !answer.contains("<OBJECT>") && !answer.contains("(ROWS)"));
        }
    }
}
