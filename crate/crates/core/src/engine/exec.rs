use super::result::ResultSet;
use super::store::{TableSchema, TableStore};
use super::value::{ColumnType, Value};
use super::EngineError;
use crate::sql::{Aggregate, CompareOp, Literal, Predicate, Projection, SqlQuery, StatementType};

/// Where a query runs: the database, or the rows of an earlier answer.
pub enum Source<'a> {
    Store(&'a mut TableStore),
    Previous(&'a ResultSet),
}

/// Runs any statement. Mutations need a [`Source::Store`].
pub fn execute(q: &SqlQuery, source: Source<'_>) -> Result<ResultSet, EngineError> {
    match source {
        Source::Previous(rs) => select_from_result(q, rs),
        Source::Store(store) => match q.kind {
            StatementType::Select | StatementType::SelectAgg => select(q, store),
            StatementType::Insert => insert(q, store),
            StatementType::Delete => delete(q, store),
            StatementType::Update => update(q, store),
        },
    }
}

/// Read-only execution against the database.
pub fn select(q: &SqlQuery, store: &TableStore) -> Result<ResultSet, EngineError> {
    if !q.kind.is_read_only() {
        return Err(EngineError::NotReadOnly(q.kind));
    }
    let table = store
        .table(&q.table)
        .ok_or_else(|| EngineError::UnknownTable(q.table.clone()))?;
    run_select(q, &table.schema, table.rows.iter().map(|r| r.cells.as_slice()))
}

/// Read-only execution over a previous result; `q.table` is ignored.
pub fn select_from_result(q: &SqlQuery, rs: &ResultSet) -> Result<ResultSet, EngineError> {
    if !q.kind.is_read_only() {
        return Err(EngineError::MutationOnPreviousResult);
    }
    let schema = rs.schema(&q.table);
    run_select(q, &schema, rs.rows.iter().map(Vec::as_slice))
}

struct Filter {
    column: usize,
    ty: ColumnType,
    op: CompareOp,
    value: Literal,
}

fn compile_filters(schema: &TableSchema, conjuncts: &[Predicate]) -> Result<Vec<Filter>, EngineError> {
    conjuncts
        .iter()
        .map(|p| {
            let column = schema
                .column_index(&p.column)
                .ok_or_else(|| EngineError::UnknownColumn(p.column.clone()))?;
            Ok(Filter {
                column,
                ty: schema.columns[column].ty,
                op: p.op,
                value: p.value.clone(),
            })
        })
        .collect()
}

impl Filter {
    fn keeps(&self, row: &[Value]) -> bool {
        let cell = &row[self.column];
        if cell.is_null() {
            return false;
        }
        if self.ty.is_numeric() {
            let (Some(lhs), Some(rhs)) = (cell.as_f64(), literal_number(&self.value)) else {
                return false;
            };
            return match self.op {
                CompareOp::Eq => lhs == rhs,
                CompareOp::Gt => lhs > rhs,
                CompareOp::Lt => lhs < rhs,
            };
        }
        let lhs = match cell {
            Value::Text(s) => s.to_lowercase(),
            other => other.to_string().to_lowercase(),
        };
        let rhs = literal_text(&self.value).to_lowercase();
        match self.op {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Lt => lhs < rhs,
        }
    }
}

fn literal_number(l: &Literal) -> Option<f64> {
    match l {
        Literal::Number(n) => n.parse().ok(),
        Literal::Text(t) => t.trim().parse().ok(),
    }
}

fn literal_text(l: &Literal) -> &str {
    match l {
        Literal::Number(n) | Literal::Text(n) => n,
    }
}

fn run_select<'r>(
    q: &SqlQuery,
    schema: &TableSchema,
    rows: impl Iterator<Item = &'r [Value]>,
) -> Result<ResultSet, EngineError> {
    let filters = compile_filters(schema, &q.conjuncts)?;
    let target = match &q.column {
        Projection::Star => None,
        Projection::Column(c) => Some(
            schema
                .column_index(c)
                .ok_or_else(|| EngineError::UnknownColumn(c.clone()))?,
        ),
    };
    if let (Some(i), Aggregate::Sum | Aggregate::Avg | Aggregate::Max | Aggregate::Min) = (target, q.agg) {
        if !schema.columns[i].ty.is_numeric() {
            return Err(EngineError::TypeMismatch {
                column: schema.columns[i].name.clone(),
                detail: format!("{} needs a numeric column", q.agg),
            });
        }
    }
    let kept: Vec<&[Value]> = rows.filter(|r| filters.iter().all(|f| f.keeps(r))).collect();

    if q.agg == Aggregate::None {
        return Ok(match target {
            None => ResultSet::new(
                schema.columns.iter().map(|c| c.name.clone()).collect(),
                schema.columns.iter().map(|c| c.ty).collect(),
                kept.iter().map(|r| r.to_vec()).collect(),
            ),
            Some(i) => ResultSet::new(
                vec![schema.columns[i].name.clone()],
                vec![schema.columns[i].ty],
                kept.iter().map(|r| vec![r[i].clone()]).collect(),
            ),
        });
    }

    let label = format!(
        "{}({})",
        q.agg,
        target.map_or("*", |i| schema.columns[i].name.as_str())
    );
    if q.agg == Aggregate::Count {
        return Ok(ResultSet::scalar_of(label, ColumnType::Int, Value::Int(kept.len() as i64)));
    }
    let i = target.ok_or_else(|| EngineError::TypeMismatch {
        column: "*".into(),
        detail: format!("{} needs a column", q.agg),
    })?;
    let ty = schema.columns[i].ty;
    let cells: Vec<&Value> = kept.iter().map(|r| &r[i]).filter(|v| !v.is_null()).collect();
    let out_ty = if q.agg == Aggregate::Avg { ColumnType::Real } else { ty };
    if cells.is_empty() {
        return Ok(ResultSet::scalar_of(label, out_ty, Value::Null));
    }
    let value = match (q.agg, ty) {
        (Aggregate::Avg, _) => {
            let total: f64 = cells.iter().filter_map(|v| v.as_f64()).sum();
            Value::Real(total / cells.len() as f64)
        }
        (Aggregate::Sum, ColumnType::Int) => Value::Int(
            cells
                .iter()
                .map(|v| match v {
                    Value::Int(x) => *x,
                    _ => 0,
                })
                .sum(),
        ),
        (Aggregate::Sum, _) => Value::Real(cells.iter().filter_map(|v| v.as_f64()).sum()),
        (Aggregate::Max, _) => extreme(&cells, std::cmp::Ordering::Greater),
        (Aggregate::Min, _) => extreme(&cells, std::cmp::Ordering::Less),
        (Aggregate::Count | Aggregate::None, _) => unreachable!(),
    };
    Ok(ResultSet::scalar_of(label, out_ty, value))
}

fn extreme(cells: &[&Value], want: std::cmp::Ordering) -> Value {
    let mut best = cells[0];
    for c in &cells[1..] {
        if c.total_cmp(best) == want {
            best = c;
        }
    }
    best.clone()
}

fn affected(n: usize) -> ResultSet {
    ResultSet::scalar_of("affected_rows", ColumnType::Int, Value::Int(n as i64))
}

/// Converts a literal to a cell of the column's type.
pub(crate) fn coerce_literal(l: &Literal, ty: ColumnType, column: &str) -> Result<Value, EngineError> {
    let mismatch = || EngineError::TypeMismatch {
        column: column.to_string(),
        detail: format!("{l} is not a valid {ty} value"),
    };
    match (ty, l) {
        (ColumnType::Text, Literal::Text(s) | Literal::Number(s)) => Ok(Value::Text(s.clone())),
        (ColumnType::Int, Literal::Number(n)) => n.parse().map(Value::Int).map_err(|_| mismatch()),
        (ColumnType::Real, Literal::Number(n)) => n.parse().map(Value::Real).map_err(|_| mismatch()),
        (_, Literal::Text(_)) => Err(mismatch()),
    }
}

fn insert(q: &SqlQuery, store: &mut TableStore) -> Result<ResultSet, EngineError> {
    let table = store
        .table_mut(&q.table)
        .ok_or_else(|| EngineError::UnknownTable(q.table.clone()))?;
    let mut cells = vec![Value::Null; table.schema.columns.len()];
    let mut seen = vec![false; cells.len()];
    for (c, v) in q.insert_values.as_deref().unwrap_or(&[]) {
        let i = table
            .schema
            .column_index(c)
            .ok_or_else(|| EngineError::UnknownColumn(c.clone()))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(EngineError::DuplicateColumn(c.clone()));
        }
        cells[i] = coerce_literal(v, table.schema.columns[i].ty, c)?;
    }
    table.push(cells);
    Ok(affected(1))
}

fn delete(q: &SqlQuery, store: &mut TableStore) -> Result<ResultSet, EngineError> {
    let table = store
        .table_mut(&q.table)
        .ok_or_else(|| EngineError::UnknownTable(q.table.clone()))?;
    let filters = compile_filters(&table.schema, &q.conjuncts)?;
    let before = table.rows.len();
    table.rows.retain(|r| !filters.iter().all(|f| f.keeps(&r.cells)));
    Ok(affected(before - table.rows.len()))
}

fn update(q: &SqlQuery, store: &mut TableStore) -> Result<ResultSet, EngineError> {
    let table = store
        .table_mut(&q.table)
        .ok_or_else(|| EngineError::UnknownTable(q.table.clone()))?;
    let filters = compile_filters(&table.schema, &q.conjuncts)?;
    let (column, lit) = q
        .set_clause
        .as_ref()
        .ok_or_else(|| EngineError::UnknownColumn("<missing SET>".into()))?;
    let i = table
        .schema
        .column_index(column)
        .ok_or_else(|| EngineError::UnknownColumn(column.clone()))?;
    let value = coerce_literal(lit, table.schema.columns[i].ty, column)?;
    let mut n = 0;
    for row in table.rows.iter_mut().filter(|r| filters.iter().all(|f| f.keeps(&r.cells))) {
        row.cells[i] = value.clone();
        n += 1;
    }
    Ok(affected(n))
}
