//! Run directories and CSV writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use thermopiezo_core::rod::{Observer, SnapshotRow};
use thermopiezo_core::{Error, TraceRecord};

/// Creates `<base>/<hash prefix>-<UTC timestamp>`, adding a suffix on collision.
pub fn run_dir(base: &Path, hash: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(base).with_context(|| format!("creating {}", base.display()))?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let stem = format!("{}-{stamp}", &hash[..12]);
    for n in 0.. {
        let name = if n == 0 { stem.clone() } else { format!("{stem}-{n}") };
        let dir = base.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e).with_context(|| format!("creating {}", dir.display())),
        }
    }
    unreachable!()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotFile {
    pub file: String,
    pub t: f64,
}

/// Streams the trace to `trace.csv` and snapshots to `snapshots/NNNN.csv`.
pub struct CsvObserver {
    dir: PathBuf,
    trace: csv::Writer<File>,
    pub snapshot_files: Vec<SnapshotFile>,
}

impl CsvObserver {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir.join("snapshots"))?;
        let trace = csv::Writer::from_path(dir.join("trace.csv"))?;
        Ok(Self { dir: dir.to_path_buf(), trace, snapshot_files: Vec::new() })
    }

    pub fn finish(mut self) -> anyhow::Result<Vec<SnapshotFile>> {
        self.trace.flush()?;
        Ok(self.snapshot_files)
    }
}

fn output_err(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

impl Observer for CsvObserver {
    fn on_trace(&mut self, rec: &TraceRecord) -> thermopiezo_core::Result<()> {
        self.trace.serialize(rec).map_err(output_err)?;
        // keep partial output usable if a later step fails
        self.trace.flush().map_err(output_err)
    }

    fn on_snapshot(&mut self, index: usize, t: f64, rows: &[SnapshotRow]) -> thermopiezo_core::Result<()> {
        let name = format!("snapshots/{index:04}.csv");
        write_csv(&self.dir.join(&name), rows).map_err(output_err)?;
        self.snapshot_files.push(SnapshotFile { file: name, t });
        Ok(())
    }
}
