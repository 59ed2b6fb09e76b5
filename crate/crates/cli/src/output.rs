//! Run directory: atomic file writes, verdicts and the manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bergspec::checks::Verdict;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const MANIFEST_SCHEMA: &str = "bergspec.manifest.v1";
pub const MANIFEST: &str = "manifest.json";
pub const VERDICTS: &str = "verdicts.json";

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// RFC 4180 CSV from a header and rows.
pub fn csv_bytes<R, I, S>(header: &[&str], rows: R) -> Result<Vec<u8>>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub check: String,
    pub pass: bool,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub metrics: Value,
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        Self {
            check: v.check.clone(),
            pass: v.pass,
            params: v.params.clone(),
            seed: v.seed,
            metrics: v.metrics.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool: String,
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub config: Value,
    pub files: Vec<FileEntry>,
    pub verdicts: Vec<VerdictRecord>,
    pub pass: bool,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn verdict(&self, check: &str) -> Option<&VerdictRecord> {
        self.verdicts.iter().find(|v| v.check == check)
    }
}

/// Collects the files and verdicts of one run.
#[derive(Debug)]
pub struct RunOutput {
    dir: PathBuf,
    files: Vec<FileEntry>,
    verdicts: Vec<Verdict>,
}

impl RunOutput {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), verdicts: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry { path: name.to_string(), bytes: bytes.len() as u64 });
        Ok(())
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn write_csv<R, I, S>(&mut self, name: &str, header: &[&str], rows: R) -> Result<()>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let bytes = csv_bytes(header, rows)?;
        self.write(name, &bytes)
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    /// Writes `verdicts.json` and `manifest.json`.
    pub fn finish(mut self, name: &str, kind: &str, seed: u64, config: Value) -> Result<Manifest> {
        let verdicts = std::mem::take(&mut self.verdicts);
        self.write_json(VERDICTS, &verdicts)?;
        self.files.sort();
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA.to_string(),
            tool: format!("bergspec {}", env!("CARGO_PKG_VERSION")),
            name: name.to_string(),
            kind: kind.to_string(),
            seed,
            config,
            files: self.files.clone(),
            pass: verdicts.iter().all(|v| v.pass),
            verdicts: verdicts.iter().map(VerdictRecord::from).collect(),
        };
        self.write_json(MANIFEST, &manifest)?;
        Ok(manifest)
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_crlf() {
        let b = csv_bytes(&["a", "b"], [["x,y", "z\"w"]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\r\n\"x,y\",\"z\"\"w\"\r\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn manifest_lists_files_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = RunOutput::create(dir.path()).unwrap();
        out.write("z.csv", b"1").unwrap();
        out.write("a.csv", b"22").unwrap();
        out.verdict(Verdict::new("c", Value::Null, None, true, Value::Null));
        let m = out.finish("t", "radial", 0, Value::Null).unwrap();
        let names: Vec<_> = m.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(names, ["a.csv", VERDICTS, "z.csv"]);
        assert!(m.pass);
        let back = Manifest::load(dir.path()).unwrap();
        assert_eq!(back.files, m.files);
    }
}
