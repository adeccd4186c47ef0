use std::fs;
use std::path::Path;

use serde::Serialize;

use super::value::{ColumnType, Value};
use super::EngineError;
use crate::sql::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnDef {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<ColumnDef>,
}

impl TableSchema {
    /// Case-insensitive column lookup.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.column_index(name).map(|i| &self.columns[i])
    }
}

/// Tables and their typed columns for one database.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SchemaCatalog {
    pub tables: Vec<TableSchema>,
}

impl SchemaCatalog {
    pub fn table(&self, name: &str) -> Option<&TableSchema> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn table_names(&self) -> impl Iterator<Item = &str> {
        self.tables.iter().map(|t| t.name.as_str())
    }

    /// Parses the `table<TAB>col:type,col:type` format.
    pub fn parse(text: &str) -> Result<SchemaCatalog, EngineError> {
        let mut tables: Vec<TableSchema> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let err = |message: String| EngineError::CatalogParse { line: lineno, message };
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (name, cols) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `table<TAB>col:type,...`".into()))?;
            let name = name.trim();
            if !is_identifier(name) {
                return Err(err(format!("`{name}` is not a valid table name")));
            }
            if tables.iter().any(|t| t.name.eq_ignore_ascii_case(name)) {
                return Err(err(format!("duplicate table `{name}`")));
            }
            let mut columns: Vec<ColumnDef> = Vec::new();
            for spec in cols.split(',') {
                let (cname, ty) = spec
                    .split_once(':')
                    .ok_or_else(|| err(format!("column `{}` lacks a `:type`", spec.trim())))?;
                let cname = cname.trim();
                if !is_identifier(cname) {
                    return Err(err(format!("`{cname}` is not a valid column name")));
                }
                if columns.iter().any(|c| c.name.eq_ignore_ascii_case(cname)) {
                    return Err(err(format!("duplicate column `{cname}` in `{name}`")));
                }
                let ty = ty.parse().map_err(err)?;
                columns.push(ColumnDef { name: cname.to_string(), ty });
            }
            tables.push(TableSchema { name: name.to_string(), columns });
        }
        Ok(SchemaCatalog { tables })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: u64,
    pub cells: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: TableSchema,
    pub rows: Vec<Row>,
    next_id: u64,
}

impl Table {
    pub fn new(schema: TableSchema) -> Self {
        Table { schema, rows: Vec::new(), next_id: 1 }
    }

    /// Appends a row and returns its identifier. Identifiers are never reused.
    pub fn push(&mut self, cells: Vec<Value>) -> u64 {
        debug_assert_eq!(cells.len(), self.schema.columns.len());
        let id = self.next_id;
        self.next_id += 1;
        self.rows.push(Row { id, cells });
        id
    }
}

/// In-memory row storage for every table of a catalog.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableStore {
    tables: Vec<Table>,
}

impl TableStore {
    pub fn new(catalog: &SchemaCatalog) -> Self {
        TableStore {
            tables: catalog.tables.iter().cloned().map(Table::new).collect(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.schema.name.eq_ignore_ascii_case(name))
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.tables.iter_mut().find(|t| t.schema.name.eq_ignore_ascii_case(name))
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn catalog(&self) -> SchemaCatalog {
        SchemaCatalog {
            tables: self.tables.iter().map(|t| t.schema.clone()).collect(),
        }
    }

    /// Reads one table's rows from CSV text with a header row naming every column.
    pub fn load_csv(&mut self, table: &str, csv_text: &str) -> Result<(), EngineError> {
        let t = self
            .table_mut(table)
            .ok_or_else(|| EngineError::UnknownTable(table.to_string()))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(csv_text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| EngineError::Csv { table: table.to_string(), message: e.to_string() })?
            .iter()
            .map(str::to_string)
            .collect();
        let names: Vec<String> = t.schema.columns.iter().map(|c| c.name.clone()).collect();
        let mut order = Vec::with_capacity(names.len());
        for col in &names {
            match header.iter().position(|h| h.eq_ignore_ascii_case(col.as_str())) {
                Some(i) => order.push(i),
                None => return Err(EngineError::CsvHeaderMismatch(table.to_string())),
            }
        }
        if header.len() != names.len() {
            return Err(EngineError::CsvHeaderMismatch(table.to_string()));
        }
        for (r, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| EngineError::Csv { table: table.to_string(), message: e.to_string() })?;
            let mut cells = Vec::with_capacity(names.len());
            for (c, &src) in order.iter().enumerate() {
                let raw = record.get(src).unwrap_or("");
                let ty = t.schema.columns[c].ty;
                let v = Value::coerce(raw, ty).ok_or_else(|| EngineError::CellType {
                    table: table.to_string(),
                    row: r + 1,
                    column: names[c].clone(),
                })?;
                cells.push(v);
            }
            t.push(cells);
        }
        Ok(())
    }
}

/// Loads a catalog file and one `<table>.csv` per table from `data_dir`.
pub fn load_store(catalog_file: &Path, data_dir: &Path) -> Result<(SchemaCatalog, TableStore), EngineError> {
    let text = fs::read_to_string(catalog_file)
        .map_err(|e| EngineError::Io(format!("{}: {e}", catalog_file.display())))?;
    let catalog = SchemaCatalog::parse(&text)?;
    let mut store = TableStore::new(&catalog);
    for t in &catalog.tables {
        let path = data_dir.join(format!("{}.csv", t.name));
        let csv_text =
            fs::read_to_string(&path).map_err(|e| EngineError::Io(format!("{}: {e}", path.display())))?;
        store.load_csv(&t.name, &csv_text)?;
    }
    Ok((catalog, store))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> SchemaCatalog {
        SchemaCatalog::parse("rooms\tid:int,floor:int,type:text,price:real,status:text\n").unwrap()
    }

    #[test]
    fn parses_catalog() {
        let c = catalog();
        assert_eq!(c.tables.len(), 1);
        assert_eq!(c.tables[0].columns[3], ColumnDef { name: "price".into(), ty: ColumnType::Real });
        assert!(c.table("ROOMS").is_some());
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(SchemaCatalog::parse("rooms id:int"), Err(EngineError::CatalogParse { line: 1, .. })));
        assert!(matches!(
            SchemaCatalog::parse("# c\nrooms\tid:int,id:text"),
            Err(EngineError::CatalogParse { line: 2, .. })
        ));
        assert!(matches!(SchemaCatalog::parse("rooms\tid:blob"), Err(EngineError::CatalogParse { .. })));
        assert!(matches!(SchemaCatalog::parse("order\tid:int"), Err(EngineError::CatalogParse { .. })));
    }

    #[test]
    fn header_mismatch() {
        let mut s = TableStore::new(&catalog());
        let err = s.load_csv("rooms", "id,floor,type,price\n1,1,single,50,available\n").unwrap_err();
        assert_eq!(err, EngineError::CsvHeaderMismatch("rooms".into()));
    }

    #[test]
    fn cell_type_error_has_coordinates() {
        let mut s = TableStore::new(&catalog());
        let err = s
            .load_csv("rooms", "id,floor,type,price,status\n1,1,single,50,available\n2,abc,double,80,occupied\n")
            .unwrap_err();
        assert_eq!(
            err,
            EngineError::CellType { table: "rooms".into(), row: 2, column: "floor".into() }
        );
    }

    #[test]
    fn header_order_may_differ() {
        let mut s = TableStore::new(&catalog());
        s.load_csv("rooms", "status,id,floor,type,price\navailable,1,1,single,50\n").unwrap();
        let t = s.table("rooms").unwrap();
        assert_eq!(t.rows[0].cells[0], Value::Int(1));
        assert_eq!(t.rows[0].cells[4], Value::Text("available".into()));
    }
}
