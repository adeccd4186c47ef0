//! Per-turn orchestration of the whole pipeline and the choice between
//! querying the database and filtering the previous answer.

mod assets;
mod turn;

pub use assets::{AssetPaths, Assets, Database, Engine, LoadError, StoreGuard};
pub use turn::{
    complete_read, complete_write, decide_target, handle_turn, plan_turn, DialogueContext, ExecTarget, PipelineError, Stage,
    StageRecord, TurnError, TurnOutcome, TurnPlan,
};
