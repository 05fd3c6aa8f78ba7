//! CSV serialization. Floats carry 17 significant digits; missing values
//! are written as `NA`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bec_squeeze::ObservableRecord;

pub const RECORD_COLUMNS: [&str; 15] = [
    "t", "source", "na_mean", "na_var", "nb_mean", "nb_var", "q_a", "q_b", "s1a", "s2a", "s1b", "s2b", "ntotal", "n_max",
    "tail_mass",
];

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), float)
}

pub fn record_header() -> String {
    RECORD_COLUMNS.join(",")
}

pub fn record_line(rec: &ObservableRecord) -> String {
    let mut line = format!("{},{}", float(rec.t), rec.source);
    for v in rec.fields() {
        let _ = write!(line, ",{}", opt_float(v));
    }
    let _ = write!(line, ",{},{}", rec.n_max.map_or_else(|| "NA".to_string(), |n| n.to_string()), opt_float(rec.tail_mass));
    line
}

/// Header plus one line per record, `'\n'`-terminated.
pub fn records_csv(records: &[ObservableRecord]) -> String {
    let mut out = record_header();
    out.push('\n');
    for rec in records {
        out.push_str(&record_line(rec));
        out.push('\n');
    }
    out
}

/// Writes `text` to `path`, or stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
