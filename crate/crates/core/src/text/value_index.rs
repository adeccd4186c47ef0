use std::collections::BTreeMap;

use super::tags::ValueLocation;
use crate::engine::{ColumnType, TableStore, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueEntry {
    /// Surface form of the first occurrence, used when the value is put into SQL.
    pub value: String,
    pub locations: Vec<ValueLocation>,
}

/// Case-folded distinct text cell values and where they occur.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueIndex {
    entries: BTreeMap<String, ValueEntry>,
}

impl ValueIndex {
    pub fn get(&self, folded: &str) -> Option<&ValueEntry> {
        self.entries.get(folded)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ValueEntry)> {
        self.entries.iter()
    }
}

/// Indexes every text-typed cell of every table. Rebuild after mutations.
pub fn build_value_index(store: &TableStore) -> ValueIndex {
    let mut entries: BTreeMap<String, ValueEntry> = BTreeMap::new();
    for table in store.tables() {
        for (c, col) in table.schema.columns.iter().enumerate() {
            if col.ty != ColumnType::Text {
                continue;
            }
            for row in &table.rows {
                let Value::Text(s) = &row.cells[c] else { continue };
                let loc = ValueLocation { table: table.schema.name.clone(), column: col.name.clone() };
                let entry = entries
                    .entry(s.to_lowercase())
                    .or_insert_with(|| ValueEntry { value: s.clone(), locations: Vec::new() });
                if !entry.locations.contains(&loc) {
                    entry.locations.push(loc);
                }
            }
        }
    }
    ValueIndex { entries }
}
