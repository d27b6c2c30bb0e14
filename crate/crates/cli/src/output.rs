//! Record rendering for the four output formats.
//!
//! Every format prints the same cell text for numbers: integers in decimal,
//! reals with six decimal places, errors in six-digit scientific notation.
//! Rust's float formatting never consults the locale, so the decimal point
//! is always `.`.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Tsv,
    #[value(name = "jsonl", alias = "json-lines")]
    JsonLines,
    Human,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Sci(f64),
    Text(String),
    Bool(bool),
    /// A value that does not exist for this row.
    Undefined,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.6}"),
            Cell::Sci(v) => format!("{v:.6e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Undefined => "undefined".to_owned(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Undefined => "null".to_owned(),
            other => other.text(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Named columns and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.delimited(b','),
            OutputFormat::Tsv => self.delimited(b'\t'),
            OutputFormat::JsonLines => self.json_lines(),
            OutputFormat::Human => self.human(),
        }
    }

    fn delimited(&self, delimiter: u8) -> String {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::text))
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    fn json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push('{');
            for (i, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "\"{name}\":{}", cell.json());
            }
            out.push_str("}\n");
        }
        out
    }

    fn human(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(Cell::text).collect())
            .collect();
        let mut out = String::new();

        // A single record reads better as one field per line.
        if let [row] = cells.as_slice() {
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (name, value) in self.columns.iter().zip(row) {
                let _ = writeln!(out, "{name:<width$}  {value}");
            }
            return out;
        }

        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap())
            .collect();
        let line = |out: &mut String, fields: &mut dyn Iterator<Item = &str>| {
            let parts: Vec<String> = fields
                .zip(&widths)
                .map(|(f, &w)| format!("{f:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  "));
        };
        line(&mut out, &mut self.columns.iter().copied());
        for row in &cells {
            line(&mut out, &mut row.iter().map(String::as_str));
        }
        out
    }
}
