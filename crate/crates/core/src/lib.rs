//! Question answering over small in-memory tables: tokenizing and tagging,
//! statement and table classification, template filling, a restricted SQL
//! dialect with its executor, follow-up context and corpus evaluation.

pub mod classify;
pub mod dialogue;
pub mod engine;
pub mod eval;
pub mod sql;
pub mod template;
pub mod text;
