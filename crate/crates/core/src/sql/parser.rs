//! Recursive-descent parser for the restricted grammar.
//!
//! ```text
//! select := SELECT proj FROM ident [WHERE pred (AND pred)*]
//! proj   := '*' | ident | agg '(' ident ')' | COUNT '(' '*' ')'
//! insert := INSERT INTO ident '(' ident (',' ident)* ')' VALUES '(' lit (',' lit)* ')'
//! delete := DELETE FROM ident [WHERE ...]
//! update := UPDATE ident SET ident '=' lit [WHERE ...]
//! pred   := ident ('=' | '>' | '<') lit
//! ```
//!
//! Constructs outside the subset (joins, grouping, ordering, disjunction,
//! nesting and friends) are reported as [`SqlError::Unsupported`] rather than
//! as plain syntax errors.

use super::ast::{Aggregate, CompareOp, Literal, Predicate, Projection, SqlQuery, StatementType};
use super::SqlError;

/// Words that have a meaning in the grammar and therefore cannot name a table or column.
pub const RESERVED: &[&str] = &[
    "SELECT", "FROM", "WHERE", "AND", "INSERT", "INTO", "VALUES", "DELETE", "UPDATE", "SET",
    "COUNT", "MAX", "MIN", "SUM", "AVG", "NULL",
];

/// Keywords of full SQL that the subset deliberately leaves out.
const UNSUPPORTED: &[(&str, &str)] = &[
    ("JOIN", "JOIN"),
    ("INNER", "JOIN"),
    ("LEFT", "JOIN"),
    ("RIGHT", "JOIN"),
    ("FULL", "JOIN"),
    ("OUTER", "JOIN"),
    ("CROSS", "JOIN"),
    ("NATURAL", "JOIN"),
    ("ON", "JOIN"),
    ("USING", "JOIN"),
    ("GROUP", "GROUP BY"),
    ("HAVING", "GROUP BY"),
    ("ORDER", "ORDER BY"),
    ("OR", "OR"),
    ("NOT", "NOT"),
    ("UNION", "set operation"),
    ("INTERSECT", "set operation"),
    ("EXCEPT", "set operation"),
    ("LIMIT", "LIMIT"),
    ("OFFSET", "LIMIT"),
    ("DISTINCT", "DISTINCT"),
    ("IN", "IN"),
    ("EXISTS", "nested query"),
    ("LIKE", "LIKE"),
    ("BETWEEN", "BETWEEN"),
    ("AS", "alias"),
    ("CREATE", "DDL"),
    ("DROP", "DDL"),
    ("ALTER", "DDL"),
    ("WITH", "nested query"),
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|r| r.eq_ignore_ascii_case(word))
        || UNSUPPORTED.iter().any(|(k, _)| k.eq_ignore_ascii_case(word))
}

/// True if `s` can be used as a bare table or column name.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_reserved(s)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Number(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SqlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Word(text[start..i].to_string())));
        } else if c.is_ascii_digit()
            || (c == b'-' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((start, Tok::Number(text[start..i].to_string())));
        } else if c == b'\'' {
            let mut value = String::new();
            i += 1;
            loop {
                match text[i..].find('\'') {
                    None => {
                        return Err(SqlError::Syntax {
                            position: start,
                            expected: "closing quote".into(),
                        })
                    }
                    Some(off) => {
                        value.push_str(&text[i..i + off]);
                        i += off + 1;
                        if bytes.get(i) == Some(&b'\'') {
                            value.push('\'');
                            i += 1;
                        } else {
                            break;
                        }
                    }
                }
            }
            out.push((start, Tok::Str(value)));
        } else {
            let two = text.get(i..i + 2).unwrap_or("");
            let sym: &'static str = match two {
                ">=" => ">=",
                "<=" => "<=",
                "<>" => "<>",
                "!=" => "!=",
                _ => match c {
                    b'(' => "(",
                    b')' => ")",
                    b',' => ",",
                    b'*' => "*",
                    b'=' => "=",
                    b'<' => "<",
                    b'>' => ">",
                    b';' => ";",
                    b'.' => ".",
                    _ => {
                        return Err(SqlError::Syntax {
                            position: start,
                            expected: format!("a token, found `{}`", text[i..].chars().next().unwrap_or('?')),
                        })
                    }
                },
            };
            i += sym.len();
            out.push((start, Tok::Sym(sym)));
        }
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    /// Classifies the current token as either an excluded construct or a syntax error.
    fn fail(&self, expected: &str) -> SqlError {
        let position = self.offset();
        match self.peek() {
            Tok::Word(w) => {
                if let Some((_, construct)) = UNSUPPORTED.iter().find(|(k, _)| k.eq_ignore_ascii_case(w)) {
                    return SqlError::Unsupported {
                        construct: (*construct).to_string(),
                        position,
                    };
                }
            }
            Tok::Sym("(") if self.is_word_at(1, "SELECT") => {
                return SqlError::Unsupported {
                    construct: "nested query".into(),
                    position,
                }
            }
            Tok::Sym(s @ (">=" | "<=" | "<>" | "!=")) => {
                return SqlError::Unsupported {
                    construct: format!("operator {s}"),
                    position,
                }
            }
            _ => {}
        }
        SqlError::Syntax {
            position,
            expected: format!("{expected}, found {}", self.peek().describe()),
        }
    }

    fn is_word_at(&self, ahead: usize, kw: &str) -> bool {
        matches!(self.peek_at(ahead), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn is_keyword(&self, kw: &str) -> bool {
        self.is_word_at(0, kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SqlError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(kw))
        }
    }

    fn symbol(&mut self, s: &str) -> Result<(), SqlError> {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(&format!("`{s}`")))
        }
    }

    fn identifier(&mut self, what: &str) -> Result<String, SqlError> {
        match self.peek() {
            Tok::Word(w) if !is_reserved(w) => {
                let w = w.clone();
                self.bump();
                if matches!(self.peek(), Tok::Sym(".")) {
                    return Err(SqlError::Unsupported {
                        construct: "qualified name".into(),
                        position: self.offset(),
                    });
                }
                Ok(w)
            }
            _ => Err(self.fail(what)),
        }
    }

    fn literal(&mut self) -> Result<Literal, SqlError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Literal::Number(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Literal::Text(s))
            }
            _ => Err(self.fail("a literal")),
        }
    }

    fn table(&mut self) -> Result<String, SqlError> {
        let t = self.identifier("a table name")?;
        if matches!(self.peek(), Tok::Sym(",")) {
            return Err(SqlError::Unsupported {
                construct: "JOIN".into(),
                position: self.offset(),
            });
        }
        Ok(t)
    }

    fn predicate(&mut self) -> Result<Predicate, SqlError> {
        let column = self.identifier("a column name")?;
        let op = match self.peek() {
            Tok::Sym(s) => match CompareOp::from_symbol(s) {
                Some(op) => op,
                None => return Err(self.fail("a comparison operator")),
            },
            _ => return Err(self.fail("a comparison operator")),
        };
        self.bump();
        let value = self.literal()?;
        Ok(Predicate { column, op, value })
    }

    fn where_clause(&mut self) -> Result<Vec<Predicate>, SqlError> {
        let mut out = Vec::new();
        if self.is_keyword("WHERE") {
            self.bump();
            out.push(self.predicate()?);
            while self.is_keyword("AND") {
                self.bump();
                out.push(self.predicate()?);
            }
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<(), SqlError> {
        if matches!(self.peek(), Tok::Sym(";")) {
            self.bump();
        }
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.fail("end of statement")),
        }
    }

    fn projection(&mut self) -> Result<(Aggregate, Projection), SqlError> {
        if matches!(self.peek(), Tok::Sym("*")) {
            self.bump();
            return Ok((Aggregate::None, Projection::Star));
        }
        if let Tok::Word(w) = self.peek() {
            if let Some(agg) = Aggregate::from_function(w) {
                self.bump();
                self.symbol("(")?;
                let column = if matches!(self.peek(), Tok::Sym("*")) && agg == Aggregate::Count {
                    self.bump();
                    Projection::Star
                } else {
                    Projection::Column(self.identifier("a column name")?)
                };
                self.symbol(")")?;
                return Ok((agg, column));
            }
        }
        let c = self.identifier("a column, `*` or an aggregation")?;
        if matches!(self.peek(), Tok::Sym(",")) {
            return Err(SqlError::Syntax {
                position: self.offset(),
                expected: "FROM (only one projected column is allowed)".into(),
            });
        }
        Ok((Aggregate::None, Projection::Column(c)))
    }

    fn select(&mut self) -> Result<SqlQuery, SqlError> {
        self.keyword("SELECT")?;
        let (agg, column) = self.projection()?;
        self.keyword("FROM")?;
        let table = self.table()?;
        let conjuncts = self.where_clause()?;
        self.finish()?;
        Ok(SqlQuery {
            kind: if agg == Aggregate::None {
                StatementType::Select
            } else {
                StatementType::SelectAgg
            },
            agg,
            column,
            table,
            conjuncts,
            insert_values: None,
            set_clause: None,
        })
    }

    fn insert(&mut self) -> Result<SqlQuery, SqlError> {
        self.keyword("INSERT")?;
        self.keyword("INTO")?;
        let table = self.table()?;
        self.symbol("(")?;
        let mut columns = vec![self.identifier("a column name")?];
        while matches!(self.peek(), Tok::Sym(",")) {
            self.bump();
            columns.push(self.identifier("a column name")?);
        }
        self.symbol(")")?;
        self.keyword("VALUES")?;
        let values_at = self.offset();
        self.symbol("(")?;
        let mut values = vec![self.literal()?];
        while matches!(self.peek(), Tok::Sym(",")) {
            self.bump();
            values.push(self.literal()?);
        }
        self.symbol(")")?;
        self.finish()?;
        if columns.len() != values.len() {
            return Err(SqlError::Syntax {
                position: values_at,
                expected: format!("{} values to match the column list, found {}", columns.len(), values.len()),
            });
        }
        Ok(SqlQuery {
            kind: StatementType::Insert,
            agg: Aggregate::None,
            column: Projection::Star,
            table,
            conjuncts: Vec::new(),
            insert_values: Some(columns.into_iter().zip(values).collect()),
            set_clause: None,
        })
    }

    fn delete(&mut self) -> Result<SqlQuery, SqlError> {
        self.keyword("DELETE")?;
        self.keyword("FROM")?;
        let table = self.table()?;
        let conjuncts = self.where_clause()?;
        self.finish()?;
        Ok(SqlQuery {
            kind: StatementType::Delete,
            conjuncts,
            ..SqlQuery::select(Projection::Star, table)
        })
    }

    fn update(&mut self) -> Result<SqlQuery, SqlError> {
        self.keyword("UPDATE")?;
        let table = self.table()?;
        self.keyword("SET")?;
        let column = self.identifier("a column name")?;
        self.symbol("=")?;
        let value = self.literal()?;
        if matches!(self.peek(), Tok::Sym(",")) {
            return Err(SqlError::Syntax {
                position: self.offset(),
                expected: "WHERE or end of statement (one SET assignment only)".into(),
            });
        }
        let conjuncts = self.where_clause()?;
        self.finish()?;
        Ok(SqlQuery {
            kind: StatementType::Update,
            conjuncts,
            set_clause: Some((column, value)),
            ..SqlQuery::select(Projection::Star, table)
        })
    }
}

/// Parses one statement of the restricted grammar. Keywords are case-insensitive.
pub fn parse_sql(text: &str) -> Result<SqlQuery, SqlError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let parsed = match p.peek() {
        Tok::Word(w) if w.eq_ignore_ascii_case("SELECT") => p.select(),
        Tok::Word(w) if w.eq_ignore_ascii_case("INSERT") => p.insert(),
        Tok::Word(w) if w.eq_ignore_ascii_case("DELETE") => p.delete(),
        Tok::Word(w) if w.eq_ignore_ascii_case("UPDATE") => p.update(),
        _ => Err(p.fail("SELECT, INSERT, DELETE or UPDATE")),
    };
    // A syntax error may be a symptom of an excluded construct further on
    // (`SELECT a, COUNT(b) ... GROUP BY a` trips over the comma first).
    parsed.map_err(|e| match e {
        SqlError::Syntax { .. } => first_excluded(&p.toks).unwrap_or(e),
        other => other,
    })
}

fn first_excluded(toks: &[(usize, Tok)]) -> Option<SqlError> {
    let mut p = Parser { toks: toks.to_vec(), pos: 0 };
    for i in 0..toks.len() {
        p.pos = i;
        if let e @ SqlError::Unsupported { .. } = p.fail("") {
            return Some(e);
        }
    }
    None
}
