use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The statement families the engine can produce and execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatementType {
    Select,
    SelectAgg,
    Insert,
    Delete,
    Update,
}

impl StatementType {
    pub const ALL: [StatementType; 5] = [
        StatementType::Select,
        StatementType::SelectAgg,
        StatementType::Insert,
        StatementType::Delete,
        StatementType::Update,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementType::Select => "SELECT",
            StatementType::SelectAgg => "SELECT_AGG",
            StatementType::Insert => "INSERT",
            StatementType::Delete => "DELETE",
            StatementType::Update => "UPDATE",
        }
    }

    pub fn is_read_only(self) -> bool {
        matches!(self, StatementType::Select | StatementType::SelectAgg)
    }
}

impl fmt::Display for StatementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatementType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown statement type `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Aggregate {
    None,
    Count,
    Max,
    Min,
    Sum,
    Avg,
}

impl Aggregate {
    pub const FUNCTIONS: [Aggregate; 5] = [
        Aggregate::Count,
        Aggregate::Max,
        Aggregate::Min,
        Aggregate::Sum,
        Aggregate::Avg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::None => "NONE",
            Aggregate::Count => "COUNT",
            Aggregate::Max => "MAX",
            Aggregate::Min => "MIN",
            Aggregate::Sum => "SUM",
            Aggregate::Avg => "AVG",
        }
    }

    /// Parses an aggregation function name. `NONE` is not a function and is rejected.
    pub fn from_function(name: &str) -> Option<Aggregate> {
        Aggregate::FUNCTIONS
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompareOp {
    Eq,
    Gt,
    Lt,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Gt => ">",
            CompareOp::Lt => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CompareOp> {
        match s.trim() {
            "=" => Some(CompareOp::Eq),
            ">" => Some(CompareOp::Gt),
            "<" => Some(CompareOp::Lt),
            _ => None,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A constant in a predicate, INSERT list or SET clause.
///
/// Numbers keep their source spelling so that printing and re-parsing is
/// exact; [`crate::sql::normalize`] produces the canonical spelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Literal {
    Text(String),
    Number(String),
}

impl Literal {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Number(n) => n.parse().ok(),
            Literal::Text(_) => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write!(f, "'{}'", s.replace('\'', "''")),
            Literal::Number(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Projection {
    Star,
    Column(String),
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Star => f.write_str("*"),
            Projection::Column(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub column: String,
    pub op: CompareOp,
    pub value: Literal,
}

impl Predicate {
    pub fn new(column: impl Into<String>, op: CompareOp, value: Literal) -> Self {
        Predicate {
            column: column.into(),
            op,
            value,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.column, self.op, self.value)
    }
}

/// One statement of the restricted grammar: a single table, an optional
/// aggregation over one column, and a conjunction of `column op constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SqlQuery {
    pub kind: StatementType,
    pub agg: Aggregate,
    pub column: Projection,
    pub table: String,
    pub conjuncts: Vec<Predicate>,
    pub insert_values: Option<Vec<(String, Literal)>>,
    pub set_clause: Option<(String, Literal)>,
}

impl SqlQuery {
    pub fn select(column: Projection, table: impl Into<String>) -> Self {
        SqlQuery {
            kind: StatementType::Select,
            agg: Aggregate::None,
            column,
            table: table.into(),
            conjuncts: Vec::new(),
            insert_values: None,
            set_clause: None,
        }
    }

    pub fn aggregate(agg: Aggregate, column: Projection, table: impl Into<String>) -> Self {
        SqlQuery {
            kind: StatementType::SelectAgg,
            agg,
            ..SqlQuery::select(column, table)
        }
    }

    pub fn with_conjunct(mut self, p: Predicate) -> Self {
        self.conjuncts.push(p);
        self
    }

    /// The same filter with the projection widened to every column.
    pub fn full_rows(&self) -> SqlQuery {
        SqlQuery {
            conjuncts: self.conjuncts.clone(),
            ..SqlQuery::select(Projection::Star, self.table.clone())
        }
    }

    /// Canonical text form. Equivalent to `to_string()`.
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

fn write_where(f: &mut fmt::Formatter<'_>, conjuncts: &[Predicate]) -> fmt::Result {
    for (i, p) in conjuncts.iter().enumerate() {
        f.write_str(if i == 0 { " WHERE " } else { " AND " })?;
        write!(f, "{p}")?;
    }
    Ok(())
}

impl fmt::Display for SqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StatementType::Select | StatementType::SelectAgg => {
                f.write_str("SELECT ")?;
                if self.agg == Aggregate::None {
                    write!(f, "{}", self.column)?;
                } else {
                    write!(f, "{}({})", self.agg, self.column)?;
                }
                write!(f, " FROM {}", self.table)?;
                write_where(f, &self.conjuncts)
            }
            StatementType::Insert => {
                write!(f, "INSERT INTO {} (", self.table)?;
                let pairs = self.insert_values.as_deref().unwrap_or(&[]);
                for (i, (c, _)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(c)?;
                }
                f.write_str(") VALUES (")?;
                for (i, (_, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            StatementType::Delete => {
                write!(f, "DELETE FROM {}", self.table)?;
                write_where(f, &self.conjuncts)
            }
            StatementType::Update => {
                write!(f, "UPDATE {} SET ", self.table)?;
                if let Some((c, v)) = &self.set_clause {
                    write!(f, "{c} = {v}")?;
                }
                write_where(f, &self.conjuncts)
            }
        }
    }
}
