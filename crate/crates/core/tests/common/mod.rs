//! Seeded generators shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use nlq_core::dialogue::{AssetPaths, Assets};
use nlq_core::engine::{ColumnType, SchemaCatalog, TableSchema, TableStore};
use nlq_core::sql::{is_reserved, Aggregate, CompareOp, Literal, Predicate, Projection, SqlQuery, StatementType};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundled(db: &str) -> Assets {
    Assets::load(&AssetPaths::bundled(&data_root(), db)).expect("bundled assets load")
}

/// Read-only bundled assets, loaded once per test binary.
pub fn shared(db: &str) -> &'static Assets {
    static ALL: OnceLock<Vec<(&'static str, Assets)>> = OnceLock::new();
    let all = ALL.get_or_init(|| ["hotel", "players", "cars"].into_iter().map(|d| (d, bundled(d))).collect());
    &all.iter().find(|(d, _)| *d == db).expect("bundled database").1
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

pub fn identifier(rng: &mut ChaCha8Rng) -> String {
    loop {
        let len = rng.random_range(1..=8);
        let mut s = String::new();
        for i in 0..len {
            let pool: &[u8] = if i == 0 { b"abcdefghijklmnopqrstuvwxyz_" } else { b"abcdefghijklmnopqrstuvwxyz_0123456789" };
            s.push(*pool.choose(rng).unwrap() as char);
        }
        if rng.random_bool(0.2) {
            s = s.to_uppercase();
        }
        if !is_reserved(&s) {
            return s;
        }
    }
}

pub fn number(rng: &mut ChaCha8Rng) -> String {
    let mut n = String::new();
    if rng.random_bool(0.3) {
        n.push('-');
    }
    n.push_str(&rng.random_range(0..100_000u32).to_string());
    if rng.random_bool(0.3) {
        n.push('.');
        for _ in 0..rng.random_range(1..=3) {
            n.push((b'0' + rng.random_range(0..10u8)) as char);
        }
    }
    n
}

pub fn text(rng: &mut ChaCha8Rng) -> String {
    let pool: Vec<char> = "ab Z'é_-,9".chars().collect();
    (0..rng.random_range(0..8)).map(|_| *pool.choose(rng).unwrap()).collect()
}

pub fn literal(rng: &mut ChaCha8Rng) -> Literal {
    if rng.random_bool(0.5) {
        Literal::Number(number(rng))
    } else {
        Literal::Text(text(rng))
    }
}

fn op(rng: &mut ChaCha8Rng) -> CompareOp {
    *[CompareOp::Eq, CompareOp::Gt, CompareOp::Lt].choose(rng).unwrap()
}

fn conjuncts(rng: &mut ChaCha8Rng, max: usize, column: &mut impl FnMut(&mut ChaCha8Rng) -> String, value: &mut impl FnMut(&mut ChaCha8Rng, &str) -> Literal) -> Vec<Predicate> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| {
            let c = column(rng);
            let v = value(rng, &c);
            Predicate::new(c, op(rng), v)
        })
        .collect()
}

/// Any statement of the grammar, with random identifiers and literals.
pub fn query(rng: &mut ChaCha8Rng) -> SqlQuery {
    let table = identifier(rng);
    let mut col = |r: &mut ChaCha8Rng| identifier(r);
    let mut val = |r: &mut ChaCha8Rng, _: &str| literal(r);
    match rng.random_range(0..5) {
        0 => {
            let proj = if rng.random_bool(0.3) { Projection::Star } else { Projection::Column(identifier(rng)) };
            let mut q = SqlQuery::select(proj, table);
            q.conjuncts = conjuncts(rng, 4, &mut col, &mut val);
            q
        }
        1 => {
            let agg = *Aggregate::FUNCTIONS.choose(rng).unwrap();
            let proj = if agg == Aggregate::Count && rng.random_bool(0.3) { Projection::Star } else { Projection::Column(identifier(rng)) };
            let mut q = SqlQuery::aggregate(agg, proj, table);
            q.conjuncts = conjuncts(rng, 4, &mut col, &mut val);
            q
        }
        2 => {
            let mut q = SqlQuery::select(Projection::Star, table);
            q.kind = StatementType::Insert;
            let n = rng.random_range(1..=4);
            q.insert_values = Some((0..n).map(|_| (identifier(rng), literal(rng))).collect());
            q
        }
        3 => {
            let mut q = SqlQuery::select(Projection::Star, table);
            q.kind = StatementType::Delete;
            q.conjuncts = conjuncts(rng, 4, &mut col, &mut val);
            q
        }
        _ => {
            let mut q = SqlQuery::select(Projection::Star, table);
            q.kind = StatementType::Update;
            q.set_clause = Some((identifier(rng), literal(rng)));
            q.conjuncts = conjuncts(rng, 4, &mut col, &mut val);
            q
        }
    }
}

const WORDS: &[&str] = &["red", "Red", "blue", "suite", "Suite", "x", "", "zeta", "alpha", "b"];

fn cell(rng: &mut ChaCha8Rng, ty: ColumnType) -> String {
    if rng.random_bool(0.1) {
        return String::new();
    }
    match ty {
        ColumnType::Int => rng.random_range(-5..20i64).to_string(),
        ColumnType::Real => format!("{}", rng.random_range(-8..40i64) as f64 / 4.0),
        ColumnType::Text => WORDS.choose(rng).unwrap().to_string(),
    }
}

/// A one-table store with up to 8 columns and 50 rows.
pub fn table(rng: &mut ChaCha8Rng) -> (TableSchema, TableStore) {
    let ncols = rng.random_range(1..=8);
    let types: Vec<ColumnType> =
        (0..ncols).map(|_| *[ColumnType::Int, ColumnType::Real, ColumnType::Text].choose(rng).unwrap()).collect();
    let names: Vec<String> = (0..ncols).map(|i| format!("c{i}")).collect();
    let decl: Vec<String> = names.iter().zip(&types).map(|(n, t)| format!("{n}:{t}")).collect();
    let catalog = SchemaCatalog::parse(&format!("t\t{}\n", decl.join(","))).expect("generated catalog");
    let mut store = TableStore::new(&catalog);
    let mut csv = names.join(",");
    csv.push('\n');
    for _ in 0..rng.random_range(0..=50) {
        let row: Vec<String> = types.iter().map(|t| cell(rng, *t)).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    store.load_csv("t", &csv).expect("generated rows");
    let schema = catalog.table("t").unwrap().clone();
    (schema, store)
}

fn literal_for(rng: &mut ChaCha8Rng, schema: &TableSchema, column: &str) -> Literal {
    let ty = schema.column(column).map(|c| c.ty).unwrap_or(ColumnType::Text);
    // an occasional mistyped literal exercises the type-mismatch path
    let ty = if rng.random_bool(0.05) { ColumnType::Text } else { ty };
    match ty {
        ColumnType::Text => Literal::Text(WORDS.choose(rng).unwrap().to_string()),
        ColumnType::Int => Literal::Number(rng.random_range(-5..20i64).to_string()),
        ColumnType::Real => Literal::Number(format!("{}", rng.random_range(-8..40i64) as f64 / 4.0)),
    }
}

/// A SELECT over `schema`'s columns with at most `max_conjuncts` filters.
pub fn select_for(rng: &mut ChaCha8Rng, schema: &TableSchema, max_conjuncts: usize) -> SqlQuery {
    let names: Vec<String> = schema.columns.iter().map(|c| c.name.clone()).collect();
    let pick = |r: &mut ChaCha8Rng| names.choose(r).unwrap().clone();
    let mut q = match rng.random_range(0..4) {
        0 => SqlQuery::select(Projection::Star, &schema.name),
        1 => SqlQuery::select(Projection::Column(pick(rng)), &schema.name),
        2 => SqlQuery::aggregate(Aggregate::Count, Projection::Star, &schema.name),
        _ => {
            let agg = *Aggregate::FUNCTIONS.choose(rng).unwrap();
            SqlQuery::aggregate(agg, Projection::Column(pick(rng)), &schema.name)
        }
    };
    let mut col = pick;
    let mut val = |r: &mut ChaCha8Rng, c: &str| literal_for(r, schema, c);
    q.conjuncts = conjuncts(rng, max_conjuncts, &mut col, &mut val);
    q
}
