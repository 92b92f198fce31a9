//! Path CSV (`t,value`, 17 significant digits) and JSON report helpers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::synthesis::SamplePath;

/// Writes `t,value` rows with `t = k/n`. Values round-trip exactly.
pub fn write_path_csv<W: Write>(path: &SamplePath, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "t,value")?;
    for (k, v) in path.values().iter().enumerate() {
        writeln!(w, "{:.16e},{:.16e}", path.time(k), v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `t,value` CSV (header optional). The time column is ignored
/// beyond a sanity check; the grid is taken to be `k/n`.
pub fn read_path_csv<R: Read>(input: R) -> Result<SamplePath> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = match rec.len() {
            1 => &rec[0],
            2 => &rec[1],
            k => return Err(Error::Parse(format!("line {}: expected 1 or 2 columns, got {k}", line + 1))),
        };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => return Err(Error::Parse(format!("line {}: non-finite value {v}", line + 1))),
            // A non-numeric first line is a header.
            Err(_) if line == 0 => {}
            Err(_) => return Err(Error::Parse(format!("line {}: bad number {field:?}", line + 1))),
        }
    }
    SamplePath::from_values(values)
}

pub fn save_path(path: &SamplePath, file: &Path) -> Result<()> {
    write_path_csv(path, File::create(file)?)
}

pub fn load_path(file: &Path) -> Result<SamplePath> {
    read_path_csv(BufReader::new(File::open(file)?))
}

pub fn write_json<T: Serialize, W: Write>(value: &T, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn save_json<T: Serialize>(value: &T, file: &Path) -> Result<()> {
    write_json(value, File::create(file)?)
}
