use std::io::Write;
use std::path::Path;

use stland::signal::TimeSeries;

use crate::error::{CliError, CliResult};

/// Reads header-free CSV rows of `channels` values, optionally preceded by a
/// time column. Without a time column the samples are indexed 0, 1, 2, ...
pub fn read_series(path: &Path, channels: usize, time_column: bool) -> CliResult<TimeSeries> {
    if channels == 0 {
        return Err(CliError::Usage("--channels must be at least 1".into()));
    }
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let width = channels + usize::from(time_column);
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
            _ => CliError::Data(format!("{}: {e}", path.display())),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != width {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, expected {width}",
                path.display(),
                line + 1,
                record.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!("{}: row {}: cannot parse {field:?}", path.display(), line + 1))
            })?;
            if time_column && j == 0 {
                times.push(v);
            } else {
                samples.push(v);
            }
        }
    }
    if samples.is_empty() {
        return Err(CliError::Data(format!("{}: no samples", path.display())));
    }
    let (t0, dt) = match times.as_slice() {
        [t0, t1, ..] => (*t0, t1 - t0),
        [t0] => (*t0, 1.0),
        [] => (0.0, 1.0),
    };
    Ok(TimeSeries::new(t0, dt, channels, samples)?)
}

/// One sample per line, channels comma-separated.
pub fn write_series(path: &Path, ts: &TimeSeries) -> CliResult<()> {
    let mut out = String::new();
    for i in 0..ts.len() {
        let row: Vec<String> = ts.sample(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
