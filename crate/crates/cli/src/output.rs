//! Result files.
//!
//! Every table becomes `<stem>.<table>.csv`: a `#` metadata header, a
//! column line, data rows, then `#` footer lines with derived quantities.
//! A `<stem>.json` summary carries the same metadata and footers. Nothing
//! time-dependent is written, so identical configs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::AppResult;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Num(x) => num(*x),
            Self::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Int(i) => Some(i as f64),
            Self::Num(x) => Some(x),
            Self::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Self::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Text(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

/// 17 significant digits, lowercase scientific.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string().to_lowercase()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Footer {
    pub key: String,
    pub value: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<Footer>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.footer.push(Footer { key: key.into(), value: value.into() });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    pub fn footer(&self, key: &str) -> Option<&Cell> {
        self.footer.iter().find(|f| f.key == key).map(|f| &f.value)
    }

    pub fn footer_f64(&self, key: &str) -> Option<f64> {
        self.footer(key).and_then(Cell::as_f64)
    }

    /// Column line, rows and footer, without the metadata header.
    pub fn body(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for f in &self.footer {
            let _ = writeln!(s, "# {} = {}", f.key, f.value.render());
        }
        s
    }
}

/// What an experiment produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub tables: Vec<Table>,
    /// Failed pass/fail checks declared by the config, if any.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.into(), tables: Vec::new(), failures: Vec::new() }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// All table bodies concatenated; the determinism check compares these.
    pub fn body(&self) -> String {
        let mut s = String::new();
        for t in &self.tables {
            let _ = writeln!(s, "## {}", t.name);
            s.push_str(&t.body());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub seed: Option<u64>,
    pub config_sha256: String,
}

impl Metadata {
    pub fn new(kind: &str, seed: Option<u64>, canonical_config: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            kind: kind.into(),
            seed,
            config_sha256: sha256_hex(canonical_config.as_bytes()),
        }
    }

    fn header(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# {} {}\n# kind = {}\n# seed = {}\n# config_sha256 = {}\n",
            self.tool, self.version, self.kind, seed, self.config_sha256
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn render_csv(meta: &Metadata, table: &Table) -> String {
    format!("{}# table = {}\n{}", meta.header(), table.name, table.body())
}

#[derive(Serialize)]
struct Summary<'a> {
    metadata: &'a Metadata,
    failures: &'a [String],
    tables: &'a [Table],
}

pub fn render_json(meta: &Metadata, report: &Report) -> String {
    let summary = Summary { metadata: meta, failures: &report.failures, tables: &report.tables };
    let mut s = serde_json::to_string_pretty(&summary).expect("report serializes");
    s.push('\n');
    s
}

/// Writes all result files and returns their paths.
pub fn write_report(dir: &Path, stem: &str, meta: &Metadata, report: &Report) -> AppResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &report.tables {
        let path = dir.join(format!("{stem}.{}.csv", t.name));
        std::fs::write(&path, render_csv(meta, t))?;
        written.push(path);
    }
    let path = dir.join(format!("{stem}.json"));
    std::fs::write(&path, render_json(meta, report))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [1.0, 0.1, std::f64::consts::PI, 1e-300, -2.5e17] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains('E'));
        }
        assert_eq!(num(4.0), "4.0000000000000000e0");
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("eigenvalues", &["index", "re"]);
        t.push(vec![1usize.into(), 1.0.into()]);
        t.note("slope", 2.0);
        assert_eq!(t.body(), "index,re\n1,1.0000000000000000e0\n# slope = 2.0000000000000000e0\n");
        assert_eq!(t.column("re"), Some(vec![1.0]));
        assert_eq!(t.footer_f64("slope"), Some(2.0));
    }

    #[test]
    fn header_carries_hash() {
        let m = Metadata::new("weyl", Some(7), "{}");
        let t = Table::new("x", &["a"]);
        let csv = render_csv(&m, &t);
        assert!(csv.contains("# seed = 7"));
        assert!(csv.contains("# config_sha256 = 44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"));
    }
}
