use std::fmt::Write as _;
use std::str::FromStr;

use super::run::EvalReport;
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}` (expected table or csv)")),
        }
    }
}

fn table(out: &mut String, title: &str, header: [&str; 3], rows: &[[String; 3]]) {
    let mut widths = header.map(str::len);
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 3]| {
        format!("{:<w0$} | {:>w1$} | {:>w2$}\n", cells[0], cells[1], cells[2], w0 = widths[0], w1 = widths[1], w2 = widths[2])
    };
    let _ = writeln!(out, "{title}");
    out.push_str(&line(header));
    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 6));
    for r in rows {
        out.push_str(&line([&r[0], &r[1], &r[2]]));
    }
}

/// Accuracy table followed by the timing table, or the same numbers as CSV.
pub fn render_report(reports: &[EvalReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => {
            let mut out = String::new();
            let accuracy: Vec<[String; 3]> = reports
                .iter()
                .map(|r| [r.dataset.clone(), r.statements_executed.to_string(), r.correct_execution.to_string()])
                .collect();
            table(&mut out, "Accuracy", ["Dataset", "Statements executed", "No. of correct results"], &accuracy);
            out.push('\n');
            let timing: Vec<[String; 3]> = reports
                .iter()
                .map(|r| {
                    [
                        r.dataset.clone(),
                        format!("{:.3} ms", r.avg_latency_ms),
                        if r.multi_turn { "Yes" } else { "No" }.to_string(),
                    ]
                })
                .collect();
            table(&mut out, "Timing", ["Dataset", "Average Computation time", "Multi-turn"], &timing);
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if reports.is_empty() {
                let _ = w.write_record([
                    "dataset",
                    "statements_executed",
                    "correct_execution",
                    "correct_logical_form",
                    "skipped",
                    "avg_latency_ms",
                    "multi_turn",
                ]);
            }
            for r in reports {
                w.serialize(r).expect("report fields serialize");
            }
            String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
        }
    }
}

/// Reads back the CSV form of [`render_report`].
pub fn parse_report_csv(text: &str) -> Result<Vec<EvalReport>, EvalError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<EvalReport>, _>>()
        .map_err(|e| EvalError::ReportParse(e.to_string()))
}
