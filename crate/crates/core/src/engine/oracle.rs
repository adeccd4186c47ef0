//! A deliberately naive second executor used to cross-check [`super::execute`].
//!
//! Every row is materialized as a name-keyed map, every predicate is
//! re-evaluated from scratch, and aggregation is done by sorting. Nothing
//! here calls into `exec.rs`.

use std::collections::HashMap;

use super::exec::Source;
use super::result::ResultSet;
use super::store::TableStore;
use super::value::{ColumnType, Value};
use super::EngineError;
use crate::sql::{Aggregate, CompareOp, Literal, Projection, SqlQuery, StatementType};

type NaiveRow = HashMap<String, Value>;

struct Materialized {
    names: Vec<String>,
    types: Vec<ColumnType>,
    rows: Vec<NaiveRow>,
}

fn materialize(names: &[String], types: &[ColumnType], rows: &[Vec<Value>]) -> Materialized {
    let mut out = Vec::new();
    for r in rows {
        let mut m = HashMap::new();
        for (n, v) in names.iter().zip(r) {
            m.insert(n.to_lowercase(), v.clone());
        }
        out.push(m);
    }
    Materialized { names: names.to_vec(), types: types.to_vec(), rows: out }
}

fn type_of(m: &Materialized, column: &str) -> Option<ColumnType> {
    for (n, t) in m.names.iter().zip(&m.types) {
        if n.to_lowercase() == column.to_lowercase() {
            return Some(*t);
        }
    }
    None
}

fn real_name(m: &Materialized, column: &str) -> String {
    for n in &m.names {
        if n.to_lowercase() == column.to_lowercase() {
            return n.clone();
        }
    }
    column.to_string()
}

fn holds(cell: &Value, ty: ColumnType, op: CompareOp, lit: &Literal) -> bool {
    if let Value::Null = cell {
        return false;
    }
    if ty == ColumnType::Int || ty == ColumnType::Real {
        let left = match cell {
            Value::Int(i) => *i as f64,
            Value::Real(r) => *r,
            _ => return false,
        };
        let raw = match lit {
            Literal::Number(s) => s.clone(),
            Literal::Text(s) => s.trim().to_string(),
        };
        let right: f64 = match raw.parse() {
            Ok(x) => x,
            Err(_) => return false,
        };
        return match op {
            CompareOp::Eq => left == right,
            CompareOp::Gt => left > right,
            CompareOp::Lt => left < right,
        };
    }
    let left = format!("{cell}").to_lowercase();
    let right = match lit {
        Literal::Number(s) => s.to_lowercase(),
        Literal::Text(s) => s.to_lowercase(),
    };
    match op {
        CompareOp::Eq => left == right,
        CompareOp::Gt => left > right,
        CompareOp::Lt => left < right,
    }
}

fn matching(q: &SqlQuery, m: &Materialized) -> Result<Vec<NaiveRow>, EngineError> {
    for p in &q.conjuncts {
        if type_of(m, &p.column).is_none() {
            return Err(EngineError::UnknownColumn(p.column.clone()));
        }
    }
    let mut keep = Vec::new();
    for row in &m.rows {
        let mut ok = true;
        for p in &q.conjuncts {
            let ty = type_of(m, &p.column).unwrap();
            let cell = row.get(&p.column.to_lowercase()).cloned().unwrap_or(Value::Null);
            if !holds(&cell, ty, p.op, &p.value) {
                ok = false;
            }
        }
        if ok {
            keep.push(row.clone());
        }
    }
    Ok(keep)
}

fn naive_select(q: &SqlQuery, m: &Materialized) -> Result<ResultSet, EngineError> {
    for p in &q.conjuncts {
        if type_of(m, &p.column).is_none() {
            return Err(EngineError::UnknownColumn(p.column.clone()));
        }
    }
    if let Projection::Column(c) = &q.column {
        match type_of(m, c) {
            None => return Err(EngineError::UnknownColumn(c.clone())),
            Some(ColumnType::Text) if q.agg != Aggregate::None && q.agg != Aggregate::Count => {
                return Err(EngineError::TypeMismatch {
                    column: real_name(m, c),
                    detail: format!("{} needs a numeric column", q.agg),
                })
            }
            Some(_) => {}
        }
    }
    let rows = matching(q, m)?;

    match (&q.column, q.agg) {
        (Projection::Star, Aggregate::None) => {
            let mut out = Vec::new();
            for r in &rows {
                let mut v = Vec::new();
                for n in &m.names {
                    v.push(r[&n.to_lowercase()].clone());
                }
                out.push(v);
            }
            Ok(ResultSet { columns: m.names.clone(), types: m.types.clone(), rows: out })
        }
        (Projection::Column(c), Aggregate::None) => {
            let name = real_name(m, c);
            let ty = type_of(m, c).unwrap();
            let out = rows.iter().map(|r| vec![r[&c.to_lowercase()].clone()]).collect();
            Ok(ResultSet { columns: vec![name], types: vec![ty], rows: out })
        }
        (col, Aggregate::Count) => {
            let label = match col {
                Projection::Star => "COUNT(*)".to_string(),
                Projection::Column(c) => format!("COUNT({})", real_name(m, c)),
            };
            Ok(ResultSet {
                columns: vec![label],
                types: vec![ColumnType::Int],
                rows: vec![vec![Value::Int(rows.len() as i64)]],
            })
        }
        (Projection::Star, agg) => Err(EngineError::TypeMismatch {
            column: "*".into(),
            detail: format!("{agg} needs a column"),
        }),
        (Projection::Column(c), agg) => {
            let name = real_name(m, c);
            let ty = type_of(m, c).unwrap();
            let label = format!("{agg}({name})");
            let mut present: Vec<Value> = Vec::new();
            for r in &rows {
                let v = r[&c.to_lowercase()].clone();
                if !matches!(v, Value::Null) {
                    present.push(v);
                }
            }
            let out_ty = if agg == Aggregate::Avg { ColumnType::Real } else { ty };
            let value = if present.is_empty() {
                Value::Null
            } else {
                match agg {
                    Aggregate::Sum if ty == ColumnType::Int => {
                        let mut s: i64 = 0;
                        for v in &present {
                            if let Value::Int(i) = v {
                                s += i;
                            }
                        }
                        Value::Int(s)
                    }
                    Aggregate::Sum | Aggregate::Avg => {
                        let mut s = 0.0;
                        for v in &present {
                            s += match v {
                                Value::Int(i) => *i as f64,
                                Value::Real(r) => *r,
                                _ => 0.0,
                            };
                        }
                        if agg == Aggregate::Avg {
                            Value::Real(s / present.len() as f64)
                        } else {
                            Value::Real(s)
                        }
                    }
                    Aggregate::Max | Aggregate::Min => {
                        let mut sorted = present.clone();
                        sorted.sort_by(|a, b| a.total_cmp(b));
                        if agg == Aggregate::Max {
                            sorted.pop().unwrap()
                        } else {
                            sorted.remove(0)
                        }
                    }
                    Aggregate::Count | Aggregate::None => unreachable!(),
                }
            };
            Ok(ResultSet { columns: vec![label], types: vec![out_ty], rows: vec![vec![value]] })
        }
    }
}

fn to_cell(lit: &Literal, ty: ColumnType, column: &str) -> Result<Value, EngineError> {
    let bad = || EngineError::TypeMismatch {
        column: column.to_string(),
        detail: format!("{lit} is not a valid {ty} value"),
    };
    match lit {
        Literal::Text(s) => {
            if ty == ColumnType::Text {
                Ok(Value::Text(s.clone()))
            } else {
                Err(bad())
            }
        }
        Literal::Number(s) => match ty {
            ColumnType::Text => Ok(Value::Text(s.clone())),
            ColumnType::Int => s.parse::<i64>().map(Value::Int).map_err(|_| bad()),
            ColumnType::Real => s.parse::<f64>().map(Value::Real).map_err(|_| bad()),
        },
    }
}

fn count_result(n: usize) -> ResultSet {
    ResultSet {
        columns: vec!["affected_rows".into()],
        types: vec![ColumnType::Int],
        rows: vec![vec![Value::Int(n as i64)]],
    }
}

fn naive_mutation(q: &SqlQuery, store: &mut TableStore) -> Result<ResultSet, EngineError> {
    let Some(table) = store.table_mut(&q.table) else {
        return Err(EngineError::UnknownTable(q.table.clone()));
    };
    let names: Vec<String> = table.schema.columns.iter().map(|c| c.name.clone()).collect();
    let types: Vec<ColumnType> = table.schema.columns.iter().map(|c| c.ty).collect();
    match q.kind {
        StatementType::Insert => {
            let m = materialize(&names, &types, &[]);
            let mut row: NaiveRow = names.iter().map(|n| (n.to_lowercase(), Value::Null)).collect();
            let mut assigned: Vec<String> = Vec::new();
            for (c, v) in q.insert_values.clone().unwrap_or_default() {
                let Some(ty) = type_of(&m, &c) else {
                    return Err(EngineError::UnknownColumn(c));
                };
                if assigned.contains(&c.to_lowercase()) {
                    return Err(EngineError::DuplicateColumn(c));
                }
                assigned.push(c.to_lowercase());
                row.insert(c.to_lowercase(), to_cell(&v, ty, &c)?);
            }
            table.push(names.iter().map(|n| row[&n.to_lowercase()].clone()).collect());
            Ok(count_result(1))
        }
        StatementType::Delete => {
            let all: Vec<Vec<Value>> = table.rows.iter().map(|r| r.cells.clone()).collect();
            let m = materialize(&names, &types, &all);
            matching(q, &m)?;
            let mut removed = 0;
            let mut survivors = Vec::new();
            for (row, naive) in table.rows.drain(..).zip(&m.rows) {
                let single = Materialized { names: names.clone(), types: types.clone(), rows: vec![naive.clone()] };
                if matching(q, &single)?.is_empty() {
                    survivors.push(row);
                } else {
                    removed += 1;
                }
            }
            table.rows = survivors;
            Ok(count_result(removed))
        }
        StatementType::Update => {
            let all: Vec<Vec<Value>> = table.rows.iter().map(|r| r.cells.clone()).collect();
            let m = materialize(&names, &types, &all);
            matching(q, &m)?;
            let Some((c, lit)) = q.set_clause.clone() else {
                return Err(EngineError::UnknownColumn("<missing SET>".into()));
            };
            let Some(ty) = type_of(&m, &c) else {
                return Err(EngineError::UnknownColumn(c));
            };
            let cell = to_cell(&lit, ty, &c)?;
            let pos = names.iter().position(|n| n.to_lowercase() == c.to_lowercase()).unwrap();
            let mut changed = 0;
            for (row, naive) in table.rows.iter_mut().zip(&m.rows) {
                let single = Materialized { names: names.clone(), types: types.clone(), rows: vec![naive.clone()] };
                if !matching(q, &single)?.is_empty() {
                    row.cells[pos] = cell.clone();
                    changed += 1;
                }
            }
            Ok(count_result(changed))
        }
        StatementType::Select | StatementType::SelectAgg => unreachable!(),
    }
}

/// Same contract as [`super::execute`], computed the slow way.
pub fn oracle_execute(q: &SqlQuery, source: Source<'_>) -> Result<ResultSet, EngineError> {
    let read_only = q.kind == StatementType::Select || q.kind == StatementType::SelectAgg;
    match source {
        Source::Previous(rs) => {
            if !read_only {
                return Err(EngineError::MutationOnPreviousResult);
            }
            naive_select(q, &materialize(&rs.columns, &rs.types, &rs.rows))
        }
        Source::Store(store) => {
            if !read_only {
                return naive_mutation(q, store);
            }
            let Some(table) = store.table(&q.table) else {
                return Err(EngineError::UnknownTable(q.table.clone()));
            };
            let names: Vec<String> = table.schema.columns.iter().map(|c| c.name.clone()).collect();
            let types: Vec<ColumnType> = table.schema.columns.iter().map(|c| c.ty).collect();
            let all: Vec<Vec<Value>> = table.rows.iter().map(|r| r.cells.clone()).collect();
            naive_select(q, &materialize(&names, &types, &all))
        }
    }
}
