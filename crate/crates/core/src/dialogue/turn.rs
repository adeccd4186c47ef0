use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use super::assets::{Database, Engine};
use crate::classify::{link_schema_in_context, predict_statement_type, ClassifyError, SchemaBinding};
use crate::engine::{execute, select, select_from_result, EngineError, ResultSet, Source};
use crate::sql::{SqlQuery, StatementType};
use crate::template::{build_query, match_template, render_answer, Target, Template, TemplateError};
use crate::text::{tokenize, TagKind, TaggedToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Tokenize,
    Tag,
    StatementType,
    TemplateMatching,
    SchemaLinking,
    BuildQuery,
    DecideTarget,
    Execute,
    RenderAnswer,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Tokenize => "tokenize",
            Stage::Tag => "tag",
            Stage::StatementType => "statement_type",
            Stage::TemplateMatching => "template_matching",
            Stage::SchemaLinking => "schema_linking",
            Stage::BuildQuery => "build_query",
            Stage::DecideTarget => "decide_target",
            Stage::Execute => "execute",
            Stage::RenderAnswer => "render_answer",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub detail: String,
    pub warning: Option<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecTarget {
    Database,
    PreviousResult,
}

impl ExecTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecTarget::Database => "database",
            ExecTarget::PreviousResult => "previous_result",
        }
    }
}

impl fmt::Display for ExecTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("empty question")]
    EmptyQuestion,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A failed turn: the stage that failed, its error, and the stages that ran before it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {error}")]
pub struct TurnError {
    pub stage: Stage,
    pub error: PipelineError,
    pub trace: Vec<StageRecord>,
    pub elapsed_ms: f64,
}

/// Per-session conversation state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DialogueContext {
    pub session_id: String,
    /// The last successful read, with any previous-result filters folded in.
    pub last_query: Option<SqlQuery>,
    pub last_result: Option<ResultSet>,
    /// Every column of the rows `last_query` matched.
    pub last_full_rows: Option<ResultSet>,
    pub turn_count: u64,
}

impl DialogueContext {
    pub fn new(session_id: impl Into<String>) -> Self {
        DialogueContext { session_id: session_id.into(), ..Default::default() }
    }

    pub fn reset(&mut self) {
        *self = DialogueContext::new(std::mem::take(&mut self.session_id));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnOutcome {
    pub question: String,
    pub template_id: String,
    pub statement_type: StatementType,
    /// The query the template produced.
    pub sql: SqlQuery,
    /// `sql` with the previous turn's filters folded in when it ran over
    /// the previous result; equal to `sql` otherwise.
    pub effective_sql: SqlQuery,
    pub target: ExecTarget,
    pub result: ResultSet,
    pub answer: String,
    pub elapsed_ms: f64,
    pub trace: Vec<StageRecord>,
}

/// Picks the execution target. The second value is a warning for the trace.
pub fn decide_target(tagged: &[TaggedToken], template: &Template, ctx: &DialogueContext) -> (ExecTarget, Option<String>) {
    let anaphora = tagged.iter().any(|t| t.kind() == TagKind::AnaphoraCue);
    let read_only = template.statement_type.is_read_only();
    let has_context = ctx.last_full_rows.is_some();
    match template.target {
        Target::Database => (ExecTarget::Database, None),
        Target::PreviousResult if has_context && read_only => (ExecTarget::PreviousResult, None),
        Target::PreviousResult => {
            (ExecTarget::Database, Some("template asks for the previous result but none applies; querying the database".into()))
        }
        Target::Auto if anaphora && has_context && read_only => (ExecTarget::PreviousResult, None),
        Target::Auto if anaphora && !has_context => {
            (ExecTarget::Database, Some("follow-up cue without a previous result; querying the database".into()))
        }
        Target::Auto => (ExecTarget::Database, None),
    }
}

/// Folds a follow-up's filters into the previous query.
fn compose(previous: &SqlQuery, follow_up: &SqlQuery) -> SqlQuery {
    let mut q = follow_up.clone();
    q.table = previous.table.clone();
    let mut conjuncts = previous.conjuncts.clone();
    for p in &follow_up.conjuncts {
        if !conjuncts.contains(p) {
            conjuncts.push(p.clone());
        }
    }
    q.conjuncts = conjuncts;
    q
}

struct Tracer {
    started: Instant,
    trace: Vec<StageRecord>,
}

impl Tracer {
    fn new() -> Self {
        Tracer { started: Instant::now(), trace: Vec::new() }
    }

    fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1000.0
    }

    /// Runs one stage, recording it on success.
    fn stage<T, E: Into<PipelineError>>(
        &mut self,
        stage: Stage,
        run: impl FnOnce() -> Result<T, E>,
        describe: impl FnOnce(&T) -> String,
    ) -> Result<T, TurnError> {
        let t0 = Instant::now();
        match run() {
            Ok(v) => {
                let detail = describe(&v);
                self.trace.push(StageRecord { stage, detail, warning: None, elapsed_ms: t0.elapsed().as_secs_f64() * 1000.0 });
                Ok(v)
            }
            Err(e) => Err(TurnError { stage, error: e.into(), trace: self.trace.clone(), elapsed_ms: self.elapsed_ms() }),
        }
    }

    fn warn(&mut self, warning: String) {
        log::debug!("{warning}");
        if let Some(last) = self.trace.last_mut() {
            last.warning = Some(warning);
        }
    }
}

/// Everything up to execution. Planning only reads the database.
pub struct TurnPlan {
    question: String,
    tracer: Tracer,
    template: Template,
    binding: SchemaBinding,
    sql: SqlQuery,
    effective_sql: SqlQuery,
    target: ExecTarget,
}

impl TurnPlan {
    pub fn statement_type(&self) -> StatementType {
        self.template.statement_type
    }

    /// Whether completing this turn writes to the store.
    pub fn needs_write(&self) -> bool {
        !self.template.statement_type.is_read_only()
    }

    pub fn target(&self) -> ExecTarget {
        self.target
    }

    pub fn sql(&self) -> &SqlQuery {
        &self.sql
    }
}

fn tagged_summary(tagged: &[TaggedToken]) -> String {
    tagged.iter().map(|t| t.tag.to_string()).collect::<Vec<_>>().join(" ")
}

/// Tokenize, tag, classify, match, link, fill and decide, without executing.
pub fn plan_turn(ctx: &DialogueContext, text: &str, engine: &Engine, db: &Database) -> Result<TurnPlan, TurnError> {
    let mut tr = Tracer::new();
    let tokens = tr.stage(
        Stage::Tokenize,
        || {
            let tokens = tokenize(text);
            if tokens.is_empty() {
                Err(PipelineError::EmptyQuestion)
            } else {
                Ok(tokens)
            }
        },
        |t| format!("{} tokens", t.len()),
    )?;
    let tagged = tr.stage(Stage::Tag, || Ok::<_, PipelineError>(db.gazetteer().tag(&tokens)), |t| tagged_summary(t))?;
    let (stype, _) = tr.stage(
        Stage::StatementType,
        || predict_statement_type(&engine.statement_model, text),
        |(s, score)| format!("{s} (score {score})"),
    )?;
    let template = tr
        .stage(Stage::TemplateMatching, || match_template(&tagged, stype, &engine.templates), |t| t.id.clone())?
        .clone();
    let anaphora = tagged.iter().any(|t| t.kind() == TagKind::AnaphoraCue);
    let context_table = ctx.last_query.as_ref().filter(|_| anaphora).map(|q| q.table.as_str());
    let binding = tr.stage(
        Stage::SchemaLinking,
        || link_schema_in_context(&tagged, db.catalog(), &engine.linking_model, context_table),
        |b| {
            let cols: Vec<&str> = b.columns.iter().map(|c| c.column.as_str()).collect();
            format!("{} via {:?}; columns [{}]", b.table, b.source, cols.join(", "))
        },
    )?;
    if !binding.unresolved.is_empty() {
        let spans: Vec<&str> = binding.unresolved.iter().map(|&i| tagged[i].token.text.as_str()).collect();
        tr.warn(format!("ignored terms not found in `{}`: {}", binding.table, spans.join(", ")));
    }
    let sql = tr.stage(Stage::BuildQuery, || build_query(&template, &binding, &tagged), |q| q.to_string())?;
    let (target, warning) = tr.stage(
        Stage::DecideTarget,
        || Ok::<_, PipelineError>(decide_target(&tagged, &template, ctx)),
        |(t, _)| t.to_string(),
    )?;
    if let Some(w) = warning {
        tr.warn(w);
    }
    let effective_sql = match (target, &ctx.last_query) {
        (ExecTarget::PreviousResult, Some(prev)) => compose(prev, &sql),
        _ => sql.clone(),
    };
    Ok(TurnPlan { question: text.to_string(), tracer: tr, template, binding, sql, effective_sql, target })
}

fn finish(
    mut plan: TurnPlan,
    ctx: &mut DialogueContext,
    run: impl FnOnce(&SqlQuery) -> Result<(ResultSet, Option<ResultSet>), EngineError>,
) -> Result<TurnOutcome, TurnError> {
    let tr = &mut plan.tracer;
    let (result, full_rows) = tr.stage(Stage::Execute, || run(&plan.sql), |(rs, _)| format!("{} rows", rs.rows.len()))?;
    let (template, binding) = (&plan.template, &plan.binding);
    let answer = tr.stage(Stage::RenderAnswer, || render_answer(&result, template, binding), Clone::clone)?;
    if let Some(full) = full_rows {
        ctx.last_query = Some(plan.effective_sql.clone());
        ctx.last_result = Some(result.clone());
        ctx.last_full_rows = Some(full);
    }
    ctx.turn_count += 1;
    Ok(TurnOutcome {
        question: plan.question,
        template_id: plan.template.id,
        statement_type: plan.template.statement_type,
        sql: plan.sql,
        effective_sql: plan.effective_sql,
        target: plan.target,
        result,
        answer,
        elapsed_ms: plan.tracer.elapsed_ms(),
        trace: plan.tracer.trace,
    })
}

/// Executes a read-only plan. The context is updated only on success.
pub fn complete_read(plan: TurnPlan, ctx: &mut DialogueContext, db: &Database) -> Result<TurnOutcome, TurnError> {
    let kind = plan.statement_type();
    let previous = match plan.target {
        ExecTarget::PreviousResult => ctx.last_full_rows.clone(),
        ExecTarget::Database => None,
    };
    finish(plan, ctx, |q| {
        if !kind.is_read_only() {
            return Err(EngineError::NotReadOnly(kind));
        }
        match &previous {
            Some(prev) => Ok((select_from_result(q, prev)?, Some(select_from_result(&q.full_rows(), prev)?))),
            None => Ok((select(q, db.store())?, Some(select(&q.full_rows(), db.store())?))),
        }
    })
}

/// Executes any plan with write access to the database.
pub fn complete_write(plan: TurnPlan, ctx: &mut DialogueContext, db: &mut Database) -> Result<TurnOutcome, TurnError> {
    if !plan.needs_write() {
        return complete_read(plan, ctx, db);
    }
    finish(plan, ctx, |q| execute(q, Source::Store(&mut db.store_mut())).map(|rs| (rs, None)))
}

/// Runs one full turn. On error the context is left untouched.
pub fn handle_turn(ctx: &mut DialogueContext, text: &str, engine: &Engine, db: &mut Database) -> Result<TurnOutcome, TurnError> {
    let plan = plan_turn(ctx, text, engine, db)?;
    complete_write(plan, ctx, db)
}
