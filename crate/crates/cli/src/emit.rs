//! CSV and binary graymap output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use multimode_hom::hom::{CoincidenceMap, ScanGrid};

use crate::CliError;

pub const MAP_HEADER: &str = "x_mm,y_mm,probability";

/// Map as CSV in storage order (`y` outer, `x` inner). Values use Rust's
/// shortest round-trip float formatting, so re-parsing is exact.
pub fn map_csv(map: &CoincidenceMap) -> String {
    let mut out = String::with_capacity(32 * map.values.len());
    out.push_str(MAP_HEADER);
    out.push('\n');
    for (x, y, v) in map.points() {
        let _ = writeln!(out, "{x},{y},{v}");
    }
    out
}

fn parse_field(field: Option<&str>, line: usize) -> Result<f64, CliError> {
    let text = field.ok_or_else(|| CliError::Config(format!("map CSV line {line}: missing column")))?;
    text.trim()
        .parse()
        .map_err(|e| CliError::Config(format!("map CSV line {line}: {e}")))
}

/// Reads a map written by [`map_csv`]. The grid is recovered from the
/// coordinate columns.
pub fn parse_map_csv(text: &str, fixed_mm: (f64, f64)) -> Result<CoincidenceMap, CliError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAP_HEADER) {
        return Err(CliError::Config(format!("map CSV must start with '{MAP_HEADER}'")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut cols = line.split(',');
        let row = (
            parse_field(cols.next(), i + 2)?,
            parse_field(cols.next(), i + 2)?,
            parse_field(cols.next(), i + 2)?,
        );
        if cols.next().is_some() {
            return Err(CliError::Config(format!("map CSV line {}: too many columns", i + 2)));
        }
        rows.push(row);
    }
    let Some(&(x0, y0, _)) = rows.first() else {
        return Err(CliError::Config("map CSV has no data rows".into()));
    };
    let nx = rows.iter().take_while(|r| r.1 == y0).count();
    if rows.len() % nx != 0 {
        return Err(CliError::Config(format!("{} rows do not form a grid of width {nx}", rows.len())));
    }
    let ny = rows.len() / nx;
    let (x1, y1, _) = rows[rows.len() - 1];
    let grid = ScanGrid::new((x0, x1), nx, (y0, y1), ny)?;
    let values = rows.iter().map(|r| r.2).collect();
    Ok(CoincidenceMap::from_values(grid, fixed_mm, values, false)?)
}

/// Binary P5 graymap scaled linearly from 0 to the map peak. The first
/// image row is the largest `y`.
pub fn map_pgm(map: &CoincidenceMap) -> Vec<u8> {
    let (nx, ny) = (map.grid.nx, map.grid.ny);
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    let peak = map.peak();
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let level = if peak > 0.0 {
                (255.0 * map.value(ix, iy) / peak).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            out.push(level);
        }
    }
    out
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes `<stem>.csv` and `<stem>.pgm`.
pub fn emit_map(map: &CoincidenceMap, stem: &Path) -> Result<Vec<PathBuf>, CliError> {
    let csv = stem.with_extension("csv");
    let pgm = stem.with_extension("pgm");
    write_file(&csv, map_csv(map))?;
    write_file(&pgm, map_pgm(map))?;
    Ok(vec![csv, pgm])
}
