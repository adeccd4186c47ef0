use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::dataset::EvalExample;
use super::EvalError;
use crate::dialogue::{handle_turn, AssetPaths, Assets, DialogueContext, ExecTarget, TurnError, TurnOutcome};
use crate::engine::{execute, select_from_result, EngineError, ResultSet, Source};
use crate::sql::{logical_form_equal, parse_sql};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub statements_executed: u32,
    pub correct_execution: u32,
    pub correct_logical_form: u32,
    pub skipped: u32,
    pub avg_latency_ms: f64,
    pub multi_turn: bool,
}

impl EvalReport {
    pub fn empty(dataset: impl Into<String>) -> Self {
        EvalReport {
            dataset: dataset.into(),
            statements_executed: 0,
            correct_execution: 0,
            correct_logical_form: 0,
            skipped: 0,
            avg_latency_ms: 0.0,
            multi_turn: false,
        }
    }
}

/// What happened to one example.
#[derive(Debug, Clone)]
pub struct ExampleResult {
    pub example: EvalExample,
    pub outcome: Result<TurnOutcome, TurnError>,
    /// None when the gold query does not parse.
    pub gold: Option<Result<ResultSet, EngineError>>,
    pub correct_execution: bool,
    pub correct_logical_form: bool,
    pub latency_ms: f64,
}

impl ExampleResult {
    pub fn skipped(&self) -> bool {
        self.gold.is_none()
    }
}

/// Loaded databases keyed by fixture name.
pub type Fixtures = BTreeMap<String, Assets>;

/// Loads every database a corpus mentions from `<db_dir>/<name>/`.
pub fn load_fixtures(
    examples: &[EvalExample],
    db_dir: &Path,
    models_dir: &Path,
    lexicon: Option<&Path>,
) -> Result<Fixtures, EvalError> {
    let mut out = Fixtures::new();
    for e in examples {
        if out.contains_key(&e.db) {
            continue;
        }
        let dir = db_dir.join(&e.db);
        if !dir.is_dir() {
            return Err(EvalError::MissingFixture(e.db.clone()));
        }
        let paths = AssetPaths {
            catalog: dir.join("catalog.tsv"),
            templates: dir.join("templates.txt"),
            data_dir: dir,
            statement_model: models_dir.join("statement.linmodel"),
            linking_model: models_dir.join("linking.linmodel"),
            lexicon: lexicon.map(Path::to_path_buf),
        };
        let assets = Assets::load(&paths).map_err(|err| EvalError::Fixture { db: e.db.clone(), message: err.to_string() })?;
        out.insert(e.db.clone(), assets);
    }
    Ok(out)
}

/// Runs every session on a fresh copy of its database and scores each turn
/// against its gold query, executed on the same source the pipeline used.
pub fn evaluate(dataset: &str, examples: &[EvalExample], fixtures: &Fixtures) -> Result<(EvalReport, Vec<ExampleResult>), EvalError> {
    if let Some(e) = examples.iter().find(|e| !fixtures.contains_key(&e.db)) {
        return Err(EvalError::MissingFixture(e.db.clone()));
    }
    let mut results = Vec::with_capacity(examples.len());
    let mut multi_turn = false;
    let mut i = 0;
    while i < examples.len() {
        let session = &examples[i].session;
        let end = i + examples[i..].iter().take_while(|e| &e.session == session).count();
        multi_turn |= end - i > 1;
        let assets = &fixtures[&examples[i].db];
        let mut db = assets.db.clone();
        let mut ctx = DialogueContext::new(session.clone());
        for example in &examples[i..end] {
            let snapshot = db.store().clone();
            let previous = ctx.last_full_rows.clone();
            let started = Instant::now();
            let outcome = handle_turn(&mut ctx, &example.question, &assets.engine, &mut db);
            let latency_ms = started.elapsed().as_secs_f64() * 1000.0;

            let gold_query = parse_sql(&example.gold_sql).ok();
            let gold = gold_query.as_ref().map(|g| {
                let on_previous = matches!(&outcome, Ok(o) if o.target == ExecTarget::PreviousResult);
                match (&previous, on_previous) {
                    (Some(prev), true) => select_from_result(g, prev),
                    _ => execute(g, Source::Store(&mut snapshot.clone())),
                }
            });
            let (correct_execution, correct_logical_form) = match (&outcome, &gold, &gold_query) {
                (Ok(o), Some(Ok(g)), Some(gq)) => (o.result.same_rows(g), logical_form_equal(&o.effective_sql, gq)),
                _ => (false, false),
            };
            results.push(ExampleResult {
                example: example.clone(),
                outcome,
                gold,
                correct_execution,
                correct_logical_form,
                latency_ms,
            });
        }
        i = end;
    }

    let mut report = EvalReport::empty(dataset);
    report.multi_turn = multi_turn;
    let mut total_ms = 0.0;
    for r in &results {
        if r.skipped() {
            report.skipped += 1;
            continue;
        }
        report.statements_executed += 1;
        report.correct_execution += u32::from(r.correct_execution);
        report.correct_logical_form += u32::from(r.correct_logical_form);
        total_ms += r.latency_ms;
    }
    if report.statements_executed > 0 {
        report.avg_latency_ms = total_ms / f64::from(report.statements_executed);
    }
    Ok((report, results))
}
