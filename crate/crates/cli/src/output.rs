//! Tables, CSV rendering and the provenance header carried by every file.

use sha2::{Digest, Sha256};

use crate::config::{CommandKind, RunConfig};
use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell. Floats are written in shortest round-trip form, so equal
/// values give equal bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) => format!("{x}"),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
            Self::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Self::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Self::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Self::Empty, Into::into)
    }
}

/// A probability vector as `p_0;p_1;...`.
pub fn pmf_cell(p: Option<&abstain_core::Distribution>) -> Cell {
    match p {
        Some(p) => Cell::Text(p.probs().iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")),
        None => Cell::Empty,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|s| s.as_ref().to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of column `name`.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Num(x) => Some(x),
                Cell::Int(k) => Some(k as f64),
                _ => None,
            })
            .collect()
    }
}

/// Provenance written at the top of every file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Header {
    pub fn new(cmd: CommandKind, config: &RunConfig) -> Self {
        Self { command: cmd.name(), config_hash: config_hash(cmd, config), seed: config.seed }
    }

    pub fn lines(&self) -> [String; 4] {
        [
            format!("abstain-ht {VERSION}"),
            format!("command: {}", self.command),
            format!("config-sha256: {}", self.config_hash),
            format!("seed: {}", self.seed),
        ]
    }
}

/// SHA-256 of the command name and the JSON form of the configuration.
pub fn config_hash(cmd: CommandKind, config: &RunConfig) -> String {
    let json = serde_json::to_string(config).expect("configuration serialises");
    let mut h = Sha256::new();
    h.update(cmd.name().as_bytes());
    h.update(b"\n");
    h.update(json.as_bytes());
    hex::encode(h.finalize())
}

/// `#`-prefixed header lines, the column names, then the rows.
pub fn render_csv(header: &Header, table: &Table) -> Result<String> {
    let mut buf = Vec::new();
    for line in header.lines() {
        buf.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(csv::Error::from)?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Parses a file produced by [`render_csv`], skipping the header.
pub fn parse_csv(text: &str) -> std::result::Result<(Vec<String>, Vec<Vec<String>>), csv::Error> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let cols = r.headers()?.iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(str::to_owned).collect())).collect::<std::result::Result<_, _>>()?;
    Ok((cols, rows))
}

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn floats_round_trip_exactly(xs in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20)) {
            let cfg = RunConfig::defaults(CommandKind::Exponent);
            let mut t = Table::new(&["x"]);
            xs.iter().for_each(|&x| t.push(vec![x.into()]));
            let s = render_csv(&Header::new(CommandKind::Exponent, &cfg), &t).unwrap();
            let (_, rows) = parse_csv(&s).unwrap();
            let back: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
            prop_assert_eq!(back, xs);
        }
    }

    #[test]
    fn round_trip_and_header() {
        let cfg = RunConfig::defaults(CommandKind::Exponent);
        let h = Header::new(CommandKind::Exponent, &cfg);
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.1.into(), Cell::Empty, "x,y".into()]);
        let s = render_csv(&h, &t).unwrap();
        assert!(s.starts_with("# abstain-ht "));
        assert!(s.contains(&format!("# config-sha256: {}", h.config_hash)));
        let (cols, rows) = parse_csv(&s).unwrap();
        assert_eq!(cols, vec!["a", "b", "c"]);
        assert_eq!(rows, vec![vec!["0.1".to_owned(), String::new(), "x,y".to_owned()]]);
    }

    #[test]
    fn hash_tracks_config_but_not_output_path() {
        let a = RunConfig::defaults(CommandKind::Region);
        let mut b = a.clone();
        b.out = Some("elsewhere".into());
        assert_eq!(config_hash(CommandKind::Region, &a), config_hash(CommandKind::Region, &b));
        b.seed = 1;
        assert_ne!(config_hash(CommandKind::Region, &a), config_hash(CommandKind::Region, &b));
        assert_ne!(config_hash(CommandKind::Region, &a), config_hash(CommandKind::Figure4, &a));
    }
}
