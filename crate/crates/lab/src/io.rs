//! CSV tables and JSON metadata sidecars.
//!
//! Every CSV file starts with a comment line naming its schema and version,
//! e.g. `# schema: qmf-sample/1`, followed by a header row. Floats are
//! written in the shortest form that parses back to the same binary64.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qmf_core::dist::{EmpiricalSample, SampleSource};
use qmf_core::Complex64;
use serde_json::{json, Map, Value};

pub const SAMPLE_SCHEMA: &str = "qmf-sample/1";
pub const ECDF_SCHEMA: &str = "qmf-ecdf/1";

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// A table of named float columns under a versioned schema.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Table { schema: schema.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Integer-valued columns such as `index` are written without a
    /// fractional part.
    pub fn write(&self, path: &Path) -> Result<(), String> {
        let err = |e: &dyn std::fmt::Display| format!("{}: {e}", path.display());
        let mut out = BufWriter::new(File::create(path).map_err(|e| err(&e))?);
        writeln!(out, "# schema: {}", self.schema).map_err(|e| err(&e))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(|e| err(&e))?;
        for row in &self.rows {
            let fields = row.iter().zip(&self.columns).map(|(&v, c)| {
                if matches!(c.as_str(), "index" | "q" | "p" | "b") {
                    format!("{}", v as i64)
                } else {
                    fmt_f64(v)
                }
            });
            w.write_record(fields).map_err(|e| err(&e))?;
        }
        w.flush().map_err(|e| err(&e))
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let err = |e: &dyn std::fmt::Display| format!("{}: {e}", path.display());
        let text = std::fs::read_to_string(path).map_err(|e| err(&e))?;
        let first = text.lines().next().unwrap_or_default();
        let schema = first
            .strip_prefix("# schema:")
            .map(|s| s.trim().to_string())
            .ok_or_else(|| err(&"missing `# schema:` header line"))?;
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().map_err(|e| err(&e))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| err(&e))?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>().map_err(|_| err(&format!("row {}: bad number {f:?}", i + 1))))
                .collect::<Result<Vec<f64>, String>>()?;
            rows.push(row);
        }
        Ok(Table { schema, columns, rows })
    }
}

/// `file.csv` → `file.csv.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Metadata of a sample as a JSON object.
pub fn sample_metadata(sample: &EmpiricalSample) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SAMPLE_SCHEMA));
    m.insert("form".into(), json!(sample.meta.form));
    m.insert("size".into(), json!(sample.values.len()));
    match &sample.meta.source {
        SampleSource::Scan { q, norm } => {
            m.insert("source".into(), json!("scan"));
            m.insert("q".into(), json!(q));
            m.insert("normalization".into(), json!(norm.tag()));
        }
        SampleSource::Pushforward(cfg) => {
            m.insert("source".into(), json!("pushforward"));
            m.insert("n".into(), json!(cfg.n));
            m.insert("seed".into(), json!(cfg.seed));
            m.insert("tol".into(), json!(cfg.tol));
            m.insert("max_depth".into(), json!(cfg.max_depth));
            m.insert("bound".into(), json!(cfg.bound));
            m.insert("law".into(), json!(format!("{:?}", cfg.law).to_lowercase()));
        }
    }
    if let Some(angle) = sample.meta.angle {
        m.insert("angle".into(), json!(angle));
    }
    m
}

pub fn write_sidecar(path: &Path, meta: &Map<String, Value>) -> Result<(), String> {
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(&Value::Object(meta.clone())).expect("metadata serializes");
    std::fs::write(&side, text + "\n").map_err(|e| format!("{}: {e}", side.display()))
}

pub fn read_sidecar(path: &Path) -> Result<Option<Map<String, Value>>, String> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&side).map_err(|e| format!("{}: {e}", side.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(Some(m)),
        Ok(_) => Err(format!("{}: expected a JSON object", side.display())),
        Err(e) => Err(format!("{}: {e}", side.display())),
    }
}

/// Writes `index,re,im` plus the sidecar.
pub fn write_sample(path: &Path, sample: &EmpiricalSample, extra: &[(&str, Value)]) -> Result<(), String> {
    let mut t = Table::new(SAMPLE_SCHEMA, &["index", "re", "im"]);
    for (i, z) in sample.values.iter().enumerate() {
        t.push(vec![i as f64, z.re, z.im]);
    }
    t.write(path)?;
    let mut meta = sample_metadata(sample);
    for (k, v) in extra {
        meta.insert(k.to_string(), v.clone());
    }
    write_sidecar(path, &meta)
}

/// Values of a sample file.
pub fn read_sample_values(path: &Path) -> Result<Vec<Complex64>, String> {
    let t = Table::read(path)?;
    if t.schema != SAMPLE_SCHEMA {
        return Err(format!("{}: expected schema {SAMPLE_SCHEMA}, found {}", path.display(), t.schema));
    }
    let (re, im) = match (t.column("re"), t.column("im")) {
        (Some(re), Some(im)) => (re, im),
        _ => return Err(format!("{}: needs columns re and im", path.display())),
    };
    if re.is_empty() {
        return Err(format!("{}: empty sample", path.display()));
    }
    Ok(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmf_core::dist::{Normalization, SampleMeta};

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, f64::MIN_POSITIVE, 123456789.125, -0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn sample_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let values = vec![Complex64::new(0.1, -1.0 / 3.0), Complex64::new(2e-17, 5.0)];
        let meta = SampleMeta {
            form: "kontsevich".into(),
            source: SampleSource::Scan { q: 7, norm: Normalization::Raw },
            angle: None,
        };
        let sample = EmpiricalSample { values: values.clone(), meta };
        write_sample(&path, &sample, &[("note", json!("x"))]).unwrap();
        assert_eq!(read_sample_values(&path).unwrap(), values);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# schema: qmf-sample/1\nindex,re,im\n0,"));
        let side = read_sidecar(&path).unwrap().unwrap();
        assert_eq!(side["q"], json!(7));
        assert_eq!(side["normalization"], json!("raw"));
        assert_eq!(side["note"], json!("x"));
    }

    #[test]
    fn bad_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "index,re,im\n0,1,2\n").unwrap();
        assert!(Table::read(&path).is_err());
        std::fs::write(&path, "# schema: qmf-sample/1\nindex,re,im\n0,x,2\n").unwrap();
        assert!(read_sample_values(&path).is_err());
        std::fs::write(&path, "# schema: qmf-ecdf/1\nt,F\n0,1\n").unwrap();
        assert!(read_sample_values(&path).is_err());
    }
}
