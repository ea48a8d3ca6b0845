//! CSV and JSON writers. Every file is staged in a temporary sibling and
//! renamed into place, so a failed run never leaves a partial output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Shortest decimal that parses back to the same double, in scientific
/// notation outside `[1e-4, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Validation(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Validation(format!("csv: {e}")))
    }
}

/// Where the JSON summary for a CSV output goes: same stem, `.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        let mut name = out.as_os_str().to_owned();
        name.push(".summary.json");
        PathBuf::from(name)
    } else {
        out.with_extension("json")
    }
}

/// Writes all files or none: each is staged first, then renamed in order.
pub fn commit(files: &[(&Path, Vec<u8>)]) -> CliResult<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        match stage(path, bytes) {
            Ok(tmp) => staged.push((tmp, *path)),
            Err(e) => {
                staged.into_iter().for_each(|(tmp, _): (Staged, &Path)| tmp.discard());
                return Err(e);
            }
        }
    }
    for (tmp, path) in staged {
        tmp.persist(path)?;
    }
    Ok(())
}

fn stage(path: &Path, bytes: &[u8]) -> CliResult<Staged> {
    let fail = |e: std::io::Error| CliError::Validation(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(CliError::Validation(format!("cannot write {}: directory does not exist", path.display())));
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Validation(format!("cannot write {}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = dir.join(tmp_name);
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    let written = f.write_all(bytes).and_then(|_| f.sync_all());
    if let Err(e) = written {
        let _ = fs::remove_file(&tmp);
        return Err(fail(e));
    }
    Ok(Staged(tmp))
}

struct Staged(PathBuf);

impl Staged {
    fn discard(self) {
        let _ = fs::remove_file(&self.0);
    }

    fn persist(self, to: &Path) -> CliResult<()> {
        fs::rename(&self.0, to).map_err(|e| {
            let _ = fs::remove_file(&self.0);
            CliError::Validation(format!("cannot write {}: {e}", to.display()))
        })
    }
}
