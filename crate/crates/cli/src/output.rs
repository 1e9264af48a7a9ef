use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Version of every JSON document and CSV table the CLI writes.
pub const FORMAT_VERSION: u32 = 1;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        let mut h = vec!["format_version"];
        h.extend_from_slice(header);
        Self {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>) {
        let mut row = vec![FORMAT_VERSION.to_string()];
        row.extend(cells);
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Float formatting that round-trips.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes `json()` or `table()` to `out`, chosen by its extension.
pub fn emit(out: Option<&Path>, json: impl FnOnce() -> Value, table: impl FnOnce() -> Table) -> Result<(), CliError> {
    let Some(path) = out else { return Ok(()) };
    let io = |e: std::io::Error| CliError::usage(format!("--out {}: {e}", path.display()));
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let text = serde_json::to_string_pretty(&json()).expect("serializable");
            std::fs::write(path, text + "\n").map_err(io)
        }
        Some("csv") => {
            let t = table();
            let mut w = csv::Writer::from_path(path).map_err(|e| CliError::usage(format!("--out: {e}")))?;
            let csv_err = |e: csv::Error| CliError::usage(format!("--out {}: {e}", path.display()));
            w.write_record(&t.header).map_err(csv_err)?;
            for row in &t.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush().map_err(io)
        }
        _ => Err(CliError::usage(format!(
            "--out {}: use a .json or .csv path",
            path.display()
        ))),
    }
}

/// Rejects an unsupported `--out` extension before any work starts.
pub fn check_out(out: Option<&Path>) -> Result<(), CliError> {
    match out.map(|p| p.extension().and_then(|e| e.to_str())) {
        None | Some(Some("json" | "csv")) => Ok(()),
        Some(_) => Err(CliError::usage("--out: use a .json or .csv path")),
    }
}
