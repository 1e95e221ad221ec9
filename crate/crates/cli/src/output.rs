//! Writing result tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CmdResult, Classify};
use crate::svg::Chart;
use crate::Format;

/// CSV text of `rows`, with a header line.
pub fn to_csv<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize to CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}

pub fn write_text(path: &Path, text: &str) -> CmdResult {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).usage(format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).usage(format!("cannot write {}", path.display()))
}

/// `stem` with `.ext` appended; stems may contain dots of their own.
pub fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_os_string();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// Writes `rows` to `<stem>.csv` or `<stem>.json` and returns the CSV text
/// (charts are drawn from it in either case).
pub fn write_table<R: Serialize>(stem: &Path, format: Format, rows: &[R]) -> CmdResult<(PathBuf, String)> {
    let csv = to_csv(rows);
    let path = match format {
        Format::Csv => {
            let p = with_ext(stem, "csv");
            write_text(&p, &csv)?;
            p
        }
        Format::Json => {
            let p = with_ext(stem, "json");
            let text = serde_json::to_string_pretty(rows).expect("rows serialize to JSON");
            write_text(&p, &(text + "\n"))?;
            p
        }
    };
    Ok((path, csv))
}

pub fn write_chart(path: &Path, chart: &Chart) -> CmdResult {
    write_text(path, &chart.render())
}
