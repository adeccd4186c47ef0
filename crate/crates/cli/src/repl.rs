use std::io::{self, BufRead, Write};

use nlq_core::dialogue::{handle_turn, Database, DialogueContext, Engine, TurnError, TurnOutcome};

pub fn print_outcome(out: &mut impl Write, o: &TurnOutcome) -> io::Result<()> {
    writeln!(out, "SQL:    {}", o.sql)?;
    if o.effective_sql != o.sql {
        writeln!(out, "As:     {}", o.effective_sql)?;
    }
    writeln!(out, "Target: {}", o.target)?;
    for w in o.trace.iter().filter_map(|r| r.warning.as_deref()) {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "Answer: {}", o.answer)?;
    writeln!(out, "Time:   {:.3} ms", o.elapsed_ms)
}

pub fn print_error(out: &mut impl Write, e: &TurnError) -> io::Result<()> {
    for w in e.trace.iter().filter_map(|r| r.warning.as_deref()) {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "error at {}: {}", e.stage, e.error)
}

/// Reads questions line by line until `:quit` or end of input.
/// `:reset` forgets the previous answer.
pub fn run_repl(input: impl BufRead, out: &mut impl Write, engine: &Engine, db: &mut Database) -> io::Result<()> {
    let mut ctx = DialogueContext::new("repl");
    write!(out, "nlq> ")?;
    out.flush()?;
    for line in input.lines() {
        let line = line?;
        match line.trim() {
            "" => {}
            ":quit" | ":q" => break,
            ":reset" => {
                ctx.reset();
                writeln!(out, "context cleared")?;
            }
            question => match handle_turn(&mut ctx, question, engine, db) {
                Ok(o) => print_outcome(out, &o)?,
                Err(e) => print_error(out, &e)?,
            },
        }
        write!(out, "nlq> ")?;
        out.flush()?;
    }
    writeln!(out)
}
