use super::catalog::Template;
use super::TemplateError;
use crate::classify::SchemaBinding;
use crate::engine::ResultSet;

pub const NO_RESULTS: &str = "NO RESULTS";

fn render_rows(result: &ResultSet) -> String {
    result
        .rows
        .iter()
        .map(|row| {
            result
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| format!("{c}={v}"))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Substitutes `(COUNT)`, `(VALUE)`, `<OBJECT>` and `(ROWS)` in the answer skeleton.
pub fn render_answer(result: &ResultSet, template: &Template, binding: &SchemaBinding) -> Result<String, TemplateError> {
    let skeleton = &template.answer_skeleton;
    let wants_scalar = skeleton.contains("(COUNT)") || skeleton.contains("(VALUE)");
    let mut out = skeleton.replace("<OBJECT>", &binding.table.to_uppercase());
    if wants_scalar {
        let scalar = result.scalar().ok_or(TemplateError::PlaceholderUnavailable {
            rows: result.rows.len(),
            columns: result.columns.len(),
        })?;
        let s = scalar.to_string();
        out = out.replace("(COUNT)", &s).replace("(VALUE)", &s);
    } else if result.is_empty() {
        return Ok(NO_RESULTS.to_string());
    }
    if out.contains("(ROWS)") {
        out = out.replace("(ROWS)", &render_rows(result));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::TableSource;
    use crate::engine::{ColumnType, Value};
    use crate::template::TemplateCatalog;

    fn template(answer: &str) -> Template {
        let row = format!("X | SELECT | TABLE | SELECT * FROM $TABLE | {answer} | AUTO");
        TemplateCatalog::parse(&row).unwrap().templates()[0].clone()
    }

    fn rooms() -> SchemaBinding {
        SchemaBinding { table: "rooms".into(), source: TableSource::Tagged, columns: vec![], unresolved: vec![] }
    }

    #[test]
    fn table_one_answer() {
        let rs = ResultSet::scalar_of("COUNT(id)", ColumnType::Int, Value::Int(12));
        let t = template("THERE ARE (COUNT) <OBJECT> AVAILABLE");
        assert_eq!(render_answer(&rs, &t, &rooms()).unwrap(), "THERE ARE 12 ROOMS AVAILABLE");
    }

    #[test]
    fn empty_listing() {
        let rs = ResultSet::new(vec!["id".into()], vec![ColumnType::Int], vec![]);
        assert_eq!(render_answer(&rs, &template("(ROWS)"), &rooms()).unwrap(), NO_RESULTS);
    }

    #[test]
    fn scalar_placeholder_needs_one_cell() {
        let rs = ResultSet::new(vec!["id".into()], vec![ColumnType::Int], vec![vec![Value::Int(1)]; 3]);
        assert_eq!(
            render_answer(&rs, &template("(COUNT) <OBJECT>"), &rooms()),
            Err(TemplateError::PlaceholderUnavailable { rows: 3, columns: 1 })
        );
    }

    #[test]
    fn rows_rendering() {
        let rs = ResultSet::new(
            vec!["id".into(), "type".into()],
            vec![ColumnType::Int, ColumnType::Text],
            vec![vec![Value::Int(1), Value::Text("single".into())], vec![Value::Int(2), Value::Null]],
        );
        assert_eq!(
            render_answer(&rs, &template("<OBJECT>: (ROWS)"), &rooms()).unwrap(),
            "ROOMS: id=1, type=single; id=2, type=NULL"
        );
    }
}
