//! CSV and JSON writers. Every CSV has a header row and RFC 4180 quoting.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Writes `rows` as CSV to `out`.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes CSV to `path`, or to stdout when `path` is `None`.
pub fn emit_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", p.display()))?;
            write_csv(std::io::BufWriter::new(f), rows)
        }
        None => write_csv(std::io::stdout().lock(), rows),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
}

/// `runs/tail.csv` with suffix `survival.csv` becomes `runs/tail.survival.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}
