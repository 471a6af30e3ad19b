//! Text, trajectory CSV and basin CSV files.

use std::fs;
use std::io::Write;
use std::path::Path;

use sirf_core::BasinMap64;

use crate::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or stdout when `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    write_bytes(path, text.as_bytes())
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let res = match path {
        Some(p) => fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    };
    res.map_err(CliError::Numeric)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

/// `{}` on f64 is the shortest string that round-trips.
fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_trajectory<const D: usize>(
    path: Option<&Path>,
    header: &[&str],
    times: &[f64],
    states: &[[f64; D]],
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for (t, y) in times.iter().zip(states) {
        let row: Vec<String> = std::iter::once(*t).chain(y.iter().copied()).map(num).collect();
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    write_bytes(path, &bytes)
}

pub fn write_basin(path: Option<&Path>, map: &BasinMap64) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["I0", "R0", "outcome_id"]).map_err(csv_error)?;
    for c in &map.cells {
        let outcome = c.outcome.map_or_else(|| "unresolved".to_string(), |id| id.to_string());
        w.write_record([num(c.i0), num(c.r0), outcome]).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    write_bytes(path, &bytes)
}

/// A trajectory as read back from CSV, projected to `(I, R)`.
pub struct PhaseRun {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn open_csv(path: &Path) -> CliResult<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let text = read_text(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Invalid(format!("{}: {e}", path.display()));
    let header = r.headers().map_err(bad)?.clone();
    let rows = r.records().collect::<Result<Vec<_>, _>>().map_err(bad)?;
    Ok((header, rows))
}

fn field(path: &Path, row: &csv::StringRecord, idx: usize) -> CliResult<f64> {
    row.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Invalid(format!("{}: bad number in row {:?}", path.display(), row)))
}

pub fn read_trajectory(path: &Path) -> CliResult<PhaseRun> {
    let (header, rows) = open_csv(path)?;
    let cols: Vec<&str> = header.iter().collect();
    let (ci, cr) = match cols[..] {
        ["tau", "I", "R"] => (1, 2),
        ["tau", "S", "I", "R"] => (2, 3),
        _ => {
            return Err(CliError::Invalid(format!(
                "{}: expected header tau,I,R or tau,S,I,R",
                path.display()
            )))
        }
    };
    let points = rows
        .iter()
        .map(|row| Ok((field(path, row, cr)?, field(path, row, ci)?)))
        .collect::<CliResult<_>>()?;
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Ok(PhaseRun { name, points })
}

pub struct BasinRow {
    pub i0: f64,
    pub r0: f64,
    pub outcome: Option<usize>,
}

pub fn read_basin(path: &Path) -> CliResult<Vec<BasinRow>> {
    let (header, rows) = open_csv(path)?;
    if header.iter().collect::<Vec<_>>() != ["I0", "R0", "outcome_id"] {
        return Err(CliError::Invalid(format!(
            "{}: expected header I0,R0,outcome_id",
            path.display()
        )));
    }
    rows.iter()
        .map(|row| {
            let outcome = match row.get(2) {
                Some("unresolved") => None,
                Some(s) => Some(
                    s.parse()
                        .map_err(|_| CliError::Invalid(format!("{}: bad outcome `{s}`", path.display())))?,
                ),
                None => return Err(CliError::Invalid(format!("{}: short row", path.display()))),
            };
            Ok(BasinRow {
                i0: field(path, row, 0)?,
                r0: field(path, row, 1)?,
                outcome,
            })
        })
        .collect()
}
