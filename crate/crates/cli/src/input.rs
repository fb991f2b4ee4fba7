//! Reading count matrices and single-row compositions from CSV/TSV.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use clap::{Args, ValueEnum};
use codashrink::{Composition, CountVector};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeaderMode {
    /// Header if any value field of the first record is not a number.
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Count matrix, one sample per row; `-` reads stdin.
    pub input: String,
    /// Field delimiter (`,` `;` `tab` or any single character). Defaults to
    /// tab for .tsv/.tab files and comma otherwise.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// Treat the first column as row identifiers.
    #[arg(long)]
    pub id_col: bool,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
}

/// Rows of nonnegative values with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    pub rows: Vec<Vec<f64>>,
    pub column_names: Option<Vec<String>>,
    pub row_ids: Option<Vec<String>>,
    /// Source line of each row, for messages.
    pub lines: Vec<u64>,
}

impl CountMatrix {
    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    /// Column names, or `x1..xD` when the input had no header.
    pub fn names(&self) -> Vec<String> {
        match &self.column_names {
            Some(n) => n.clone(),
            None => (1..=self.dim()).map(|j| format!("x{j}")).collect(),
        }
    }

    /// Human-readable label of row `i`.
    pub fn row_label(&self, i: usize) -> String {
        match &self.row_ids {
            Some(ids) => format!("row `{}` (line {})", ids[i], self.lines[i]),
            None => format!("row {} (line {})", i + 1, self.lines[i]),
        }
    }
}

/// Integer counts if every value is a whole number, else `None`.
pub fn as_counts(row: &[f64]) -> Option<CountVector> {
    const MAX_EXACT: f64 = 9_007_199_254_740_992.0;
    if row.iter().all(|v| v.fract() == 0.0 && *v <= MAX_EXACT) {
        CountVector::new(row.iter().map(|&v| v as u64).collect()).ok()
    } else {
        None
    }
}

pub fn parse_delimiter(spec: &str) -> CliResult<u8> {
    match spec {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        s if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        s => Err(CliError::input(format!(
            "delimiter must be a single ASCII character or `tab`, got `{s}`"
        ))),
    }
}

fn default_delimiter(path: &str) -> u8 {
    match Path::new(path).extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("tsv") || e.eq_ignore_ascii_case("tab") => b'\t',
        _ => b',',
    }
}

fn read_source(path: &str) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        io::stdin().read_to_end(&mut buf)?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut buf))
            .map_err(|e| CliError::input(format!("cannot read `{path}`: {e}")))?;
    }
    Ok(buf)
}

fn parse_value(field: &str) -> Option<f64> {
    field.parse::<f64>().ok()
}

pub fn read_matrix(args: &InputArgs) -> CliResult<CountMatrix> {
    let delimiter = match &args.delimiter {
        Some(d) => parse_delimiter(d)?,
        None => default_delimiter(&args.input),
    };
    let data = read_source(&args.input)?;
    parse_matrix(&data, delimiter, args.id_col, args.header).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", args.input)),
        other => other,
    })
}

pub fn parse_matrix(
    data: &[u8],
    delimiter: u8,
    id_col: bool,
    header: HeaderMode,
) -> CliResult<CountMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(data);

    let skip = usize::from(id_col);
    let mut m = CountMatrix {
        rows: Vec::new(),
        column_names: None,
        row_ids: id_col.then(Vec::new),
        lines: Vec::new(),
    };
    let mut width: Option<usize> = None;

    // physical line of a byte offset; the reader's own line count skips blank lines
    let newlines: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .map(|(i, _)| i)
        .collect();
    let line_of = |pos: Option<&csv::Position>| {
        pos.map_or(0, |p| {
            // a record's offset can point at blank lines that precede it
            let mut start = p.byte() as usize;
            while matches!(data.get(start), Some(b'\n' | b'\r')) {
                start += 1;
            }
            newlines.partition_point(|&i| i < start) as u64 + 1
        })
    };

    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            CliError::input(format!(
                "line {}: malformed record: {e}",
                line_of(e.position())
            ))
        })?;
        let line = line_of(record.position());
        if record.get(0).is_some_and(|f| f.starts_with('#')) {
            continue;
        }
        if record.len() <= skip {
            return Err(CliError::input(format!("line {line}: no value columns")));
        }
        let values: Vec<&str> = record.iter().skip(skip).collect();

        if std::mem::take(&mut first) {
            let is_header = match header {
                HeaderMode::Yes => true,
                HeaderMode::No => false,
                HeaderMode::Auto => values.iter().any(|v| parse_value(v).is_none()),
            };
            if is_header {
                m.column_names = Some(values.iter().map(|s| s.to_string()).collect());
                width = Some(values.len());
                continue;
            }
        }

        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(CliError::input(format!(
                    "line {line}: expected {w} values, found {}",
                    values.len()
                )))
            }
            Some(_) => {}
        }

        let row = values
            .iter()
            .enumerate()
            .map(|(j, field)| match parse_value(field) {
                Some(v) if v.is_finite() && v >= 0.0 => Ok(v),
                Some(v) => Err(CliError::input(format!(
                    "line {line}, column {}: value {v} is not a finite nonnegative number",
                    j + 1 + skip
                ))),
                None => Err(CliError::input(format!(
                    "line {line}, column {}: cannot parse `{field}` as a number",
                    j + 1 + skip
                ))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        if let Some(ids) = &mut m.row_ids {
            ids.push(record[0].to_string());
        }
        m.rows.push(row);
        m.lines.push(line);
    }

    match width {
        _ if m.rows.is_empty() => Err(CliError::input("no data rows")),
        Some(w) if w < 2 => Err(CliError::input(format!(
            "need at least 2 columns, found {w}"
        ))),
        _ => Ok(m),
    }
}

/// Parses `uniformD` or a comma-separated list of parts.
pub fn parse_composition_spec(spec: &str, renormalize: bool) -> CliResult<Composition> {
    if let Some(d) = spec.strip_prefix("uniform") {
        let d: usize = d.parse().map_err(|_| {
            CliError::input(format!(
                "expected `uniformD` with an integer D, got `{spec}`"
            ))
        })?;
        return Composition::uniform(d).map_err(|e| CliError::input(e.to_string()));
    }
    let parts = parse_list(spec)?;
    composition_from_parts(parts, renormalize)
}

pub fn parse_list(spec: &str) -> CliResult<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("cannot parse `{s}` as a number")))
        })
        .collect()
}

pub fn composition_from_parts(parts: Vec<f64>, renormalize: bool) -> CliResult<Composition> {
    let result = if renormalize {
        Composition::closure(&parts)
    } else {
        Composition::new(parts)
    };
    result.map_err(|e| {
        let hint = if renormalize {
            ""
        } else {
            " (use --renormalize to close it)"
        };
        CliError::input(format!("{e}{hint}"))
    })
}

/// `uniform` for the maximum-entropy target, otherwise a file holding one
/// row of nonnegative weights, closed to a composition.
pub fn read_target(spec: &str, dim: usize) -> CliResult<Composition> {
    if spec == "uniform" {
        return Composition::uniform(dim).map_err(|e| CliError::input(e.to_string()));
    }
    let data = read_source(spec)?;
    let m = parse_matrix(&data, default_delimiter(spec), false, HeaderMode::Auto)
        .map_err(|e| CliError::input(format!("target {spec}: {e}")))?;
    if m.rows.len() != 1 {
        return Err(CliError::input(format!(
            "target {spec}: expected one row, found {}",
            m.rows.len()
        )));
    }
    if m.dim() != dim {
        return Err(CliError::input(format!(
            "target {spec}: has {} parts, input has {dim}",
            m.dim()
        )));
    }
    Composition::closure(&m.rows[0]).map_err(|e| CliError::input(format!("target {spec}: {e}")))
}
