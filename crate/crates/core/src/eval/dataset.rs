use std::fs;
use std::path::Path;

use super::EvalError;

/// One question of an evaluation corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalExample {
    pub session: String,
    pub turn: u32,
    pub db: String,
    pub question: String,
    pub gold_sql: String,
}

/// Reads `session<TAB>turn<TAB>db<TAB>question<TAB>gold_sql` records.
///
/// The result is grouped by session (in order of first appearance) and
/// ordered by turn. Turns of a session must run 1, 2, 3, ... against a
/// single database.
pub fn parse_dataset(text: &str) -> Result<Vec<EvalExample>, EvalError> {
    let mut rows: Vec<(usize, EvalExample)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let bad = |message: &str| EvalError::DatasetParseError { line, message: message.to_string() };
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        let [session, turn, db, question, gold] = fields[..] else {
            return Err(bad("expected 5 tab-separated fields"));
        };
        let turn: u32 = turn.parse().map_err(|_| bad("turn is not a positive integer"))?;
        if turn == 0 || session.is_empty() || db.is_empty() || question.is_empty() {
            return Err(bad("empty field or turn 0"));
        }
        rows.push((
            line,
            EvalExample {
                session: session.into(),
                turn,
                db: db.into(),
                question: question.into(),
                gold_sql: gold.into(),
            },
        ));
    }

    let mut order: Vec<&str> = Vec::new();
    for (_, e) in &rows {
        if !order.contains(&e.session.as_str()) {
            order.push(&e.session);
        }
    }
    let mut out = Vec::with_capacity(rows.len());
    for session in order {
        let mut turns: Vec<&(usize, EvalExample)> = rows.iter().filter(|(_, e)| e.session == session).collect();
        turns.sort_by_key(|(_, e)| e.turn);
        for (i, (line, e)) in turns.iter().enumerate() {
            if e.turn as usize != i + 1 {
                return Err(EvalError::DatasetParseError {
                    line: *line,
                    message: format!("session `{session}` expects turn {} here, found {}", i + 1, e.turn),
                });
            }
            if e.db != turns[0].1.db {
                return Err(EvalError::DatasetParseError {
                    line: *line,
                    message: format!("session `{session}` switches database"),
                });
            }
            out.push(e.clone());
        }
    }
    Ok(out)
}

pub fn load_dataset(path: &Path) -> Result<Vec<EvalExample>, EvalError> {
    let text = fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text)
}
