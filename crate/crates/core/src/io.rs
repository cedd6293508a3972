//! Output artifacts: CSV tables with a config-hash comment line, JSON
//! documents, atomic writes and the run manifest. Also the noise-data CSV
//! reader.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::calibration::NoiseSample;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}, row {row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Rows of string cells under a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV bytes: a `# config_sha256=` comment line, the header, then rows.
    pub fn to_csv(&self, config_hash: &str) -> Vec<u8> {
        let mut out = format!("# config_sha256={config_hash}\n").into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.header).expect("write to memory");
            for r in &self.rows {
                w.write_record(r).expect("write to memory");
            }
            w.flush().expect("write to memory");
        }
        out
    }
}

/// Shortest round-trip decimal representation.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("output serializes");
    v.push(b'\n');
    v
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(file_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(file_err(dir))?;
    tmp.write_all(bytes).map_err(file_err(path))?;
    tmp.as_file().sync_all().map_err(file_err(path))?;
    tmp.persist(path).map_err(|e| IoError::File {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputRecord>,
}

/// Collects output files of one run and writes them with a manifest.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    config_hash: String,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new(dir: &Path, config_hash: &str) -> Self {
        OutputSet {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            files: Vec::new(),
        }
    }

    pub fn csv(&mut self, name: &str, table: &Table) {
        let bytes = table.to_csv(&self.config_hash);
        self.files.push((name.to_string(), bytes));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        self.files.push((name.to_string(), json_bytes(value)));
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    /// Writes every file, then `manifest.json`, each atomically.
    pub fn finish(
        self,
        command: &str,
        seeds: Vec<u64>,
        threads: usize,
        wall_clock_s: f64,
    ) -> Result<RunManifest, IoError> {
        let mut outputs = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            write_atomic(&self.dir.join(name), bytes)?;
            outputs.push(OutputRecord {
                file: name.clone(),
                bytes: bytes.len(),
                sha256: sha256_hex(bytes),
            });
        }
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: self.config_hash,
            seeds,
            threads,
            wall_clock_s,
            outputs,
        };
        write_atomic(&self.dir.join("manifest.json"), &json_bytes(&manifest))?;
        Ok(manifest)
    }
}

/// Reads noise samples. Columns are `T_vts_K`, `T_fridge_K` and either
/// `psd_out_quanta` or `psd_out_W` + `window_Hz` + `freq_Hz`. Lines starting
/// with `#` are skipped.
pub fn read_noise_csv(path: &Path) -> Result<Vec<NoiseSample>, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    parse_noise_csv(&text, path)
}

pub fn parse_noise_csv(text: &str, path: &Path) -> Result<Vec<NoiseSample>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let data_err = |message: String| IoError::Data {
        path: path.to_path_buf(),
        message,
    };
    let header = rdr.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (tv, tf) = match (col("T_vts_K"), col("T_fridge_K")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(data_err("missing T_vts_K or T_fridge_K column".into())),
    };
    enum Psd {
        Quanta(usize),
        Watts(usize, usize, usize),
    }
    let psd = match (col("psd_out_quanta"), col("psd_out_W"), col("window_Hz"), col("freq_Hz")) {
        (Some(q), _, _, _) => Psd::Quanta(q),
        (None, Some(w), Some(b), Some(f)) => Psd::Watts(w, b, f),
        _ => {
            return Err(data_err(
                "need psd_out_quanta, or psd_out_W with window_Hz and freq_Hz".into(),
            ))
        }
    };
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // data rows are numbered from 1
        let row = i + 1;
        let row_err = |message: String| IoError::Row {
            path: path.to_path_buf(),
            row,
            message,
        };
        let rec = rec.map_err(|e| row_err(e.to_string()))?;
        let field = |k: usize| -> Result<f64, IoError> {
            let s = rec.get(k).ok_or_else(|| row_err("missing field".into()))?;
            s.parse::<f64>()
                .map_err(|_| row_err(format!("'{s}' in column {} is not a number", &header[k])))
        };
        let sample = match psd {
            Psd::Quanta(q) => NoiseSample::new(field(tv)?, field(tf)?, field(q)?),
            Psd::Watts(w, b, f) => NoiseSample::from_power(
                field(tv)?,
                field(tf)?,
                field(w)?,
                field(b)?,
                2.0 * std::f64::consts::PI * field(f)?,
            ),
        };
        out.push(sample.map_err(|e| row_err(e.to_string()))?);
    }
    if out.is_empty() {
        return Err(data_err("no data rows".into()));
    }
    Ok(out)
}

pub fn noise_table(samples: &[NoiseSample]) -> Table {
    let mut t = Table::new(&["T_vts_K", "T_fridge_K", "psd_out_quanta"]);
    for s in samples {
        t.push(vec![num(s.t_vts), num(s.t_fridge), num(s.psd_out)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(1.5), opt(None)]);
        let s = String::from_utf8(t.to_csv("abc")).unwrap();
        assert_eq!(s, "# config_sha256=abc\na,b\n1.5,\n");
    }

    #[test]
    fn noise_csv_round_trip() {
        let samples = vec![
            NoiseSample::new(0.05, 0.05, 1e7).unwrap(),
            NoiseSample::new(0.1, 0.3, 2e7).unwrap(),
        ];
        let bytes = noise_table(&samples).to_csv("h");
        let back = parse_noise_csv(std::str::from_utf8(&bytes).unwrap(), Path::new("n.csv")).unwrap();
        assert_eq!(back, samples);
    }

    #[test]
    fn malformed_row_is_named() {
        let text = "T_vts_K,T_fridge_K,psd_out_quanta\n0.1,0.05,3\n0.2,abc,4\n";
        let e = parse_noise_csv(text, Path::new("n.csv")).unwrap_err();
        assert!(matches!(e, IoError::Row { row: 2, .. }), "{e}");
        assert!(e.to_string().contains("row 2"));
        let e = parse_noise_csv("T_vts_K,T_fridge_K,psd_out_quanta\n0.1,0.05\n", Path::new("n.csv")).unwrap_err();
        assert!(matches!(e, IoError::Row { row: 1, .. }), "{e}");
    }

    #[test]
    fn raw_power_columns() {
        let text = "T_vts_K,T_fridge_K,psd_out_W,window_Hz,freq_Hz\n0.1,0.05,1e-12,5e5,7e9\n";
        let s = parse_noise_csv(text, Path::new("n.csv")).unwrap();
        let expected = 1e-12 / (crate::model::HBAR * 2.0 * std::f64::consts::PI * 7e9 * 5e5);
        assert!((s[0].psd_out / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
