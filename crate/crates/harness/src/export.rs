use std::path::Path;

use crate::error::Result;
use crate::record::{read_toml, write_atomic, RunRecord};

/// The front as CSV: header `f1,...,fm`, then one point per row with 17
/// significant digits.
pub fn front_csv(record: &RunRecord) -> String {
    let header: Vec<String> = (1..=record.objectives).map(|k| format!("f{k}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for point in &record.front {
        let row: Vec<String> = point.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn export_front(record_path: &Path, out: &Path) -> Result<()> {
    let record: RunRecord = read_toml(record_path)?;
    write_atomic(out, front_csv(&record).as_bytes())
}
