use serde::Serialize;

use super::store::{Table, TableSchema};
use super::value::{ColumnType, Value};

/// Column-named rows produced by executing a query.
///
/// A result is also a valid execution source: follow-up queries treat its
/// columns as the columns of a table.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub types: Vec<ColumnType>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultSet {
    pub fn new(columns: Vec<String>, types: Vec<ColumnType>, rows: Vec<Vec<Value>>) -> Self {
        debug_assert_eq!(columns.len(), types.len());
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        ResultSet { columns, types, rows }
    }

    pub fn scalar_of(column: impl Into<String>, ty: ColumnType, value: Value) -> Self {
        ResultSet::new(vec![column.into()], vec![ty], vec![vec![value]])
    }

    /// Every row of a table, all columns.
    pub fn from_table(table: &Table) -> Self {
        ResultSet::new(
            table.schema.columns.iter().map(|c| c.name.clone()).collect(),
            table.schema.columns.iter().map(|c| c.ty).collect(),
            table.rows.iter().map(|r| r.cells.clone()).collect(),
        )
    }

    pub fn schema(&self, name: &str) -> TableSchema {
        TableSchema {
            name: name.to_string(),
            columns: self
                .columns
                .iter()
                .zip(&self.types)
                .map(|(n, t)| super::store::ColumnDef { name: n.clone(), ty: *t })
                .collect(),
        }
    }

    /// The single cell, present iff the result is exactly one row by one column.
    pub fn scalar(&self) -> Option<&Value> {
        match (self.columns.len(), self.rows.as_slice()) {
            (1, [row]) => row.first(),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.eq_ignore_ascii_case(name))
    }

    /// Rows sorted under the total cell order; two results with equal
    /// sorted rows hold the same multiset.
    pub fn sorted_rows(&self) -> Vec<Vec<Value>> {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.len().cmp(&b.len()))
        });
        rows
    }

    /// Row-order-insensitive equality of the row multisets. Column names are not compared.
    pub fn same_rows(&self, other: &ResultSet) -> bool {
        self.rows.len() == other.rows.len() && self.sorted_rows() == other.sorted_rows()
    }
}
