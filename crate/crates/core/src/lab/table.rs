//! CSV and JSON-lines renderings of batch tables.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::batch::{Cell, Counts, TableFormat, TableRow};
use super::LabError;
use crate::cfrac::Algorithm;

const SUFFIXES: [&str; 4] = ["P", "H", "finite", "step_limit"];

/// Column names: `prime`, the `P`/`H` pairs, then the auxiliary columns.
pub fn table_header(algorithms: &[Algorithm]) -> Vec<String> {
    let mut h = vec!["prime".to_string()];
    for suffix in [&SUFFIXES[..2], &SUFFIXES[2..]] {
        for a in algorithms {
            for s in suffix {
                h.push(format!("{}_{s}", a.label()));
            }
        }
    }
    h
}

fn csv_record(row: &TableRow) -> Vec<String> {
    let mut r = vec![row.prime.to_string()];
    for c in &row.cells {
        r.push(c.counts.periodic.to_string());
        r.push(c.counts.height.to_string());
    }
    for c in &row.cells {
        r.push(c.counts.finite.to_string());
        r.push(c.counts.step_limit.to_string());
    }
    r
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    prime: u64,
    cells: Vec<Cell>,
}

/// Writes `rows`; `algorithms` fixes the CSV header even when `rows` is empty.
pub fn emit_table<W: Write>(
    rows: &[TableRow],
    algorithms: &[Algorithm],
    format: TableFormat,
    out: W,
) -> Result<(), LabError> {
    for row in rows {
        let labels: Vec<Algorithm> = row.cells.iter().map(|c| c.algorithm).collect();
        if labels != algorithms {
            return Err(LabError::Config(format!(
                "row for prime {} has different columns",
                row.prime
            )));
        }
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(table_header(algorithms))?;
            for row in rows {
                w.write_record(csv_record(row))?;
            }
            w.flush()?;
        }
        TableFormat::Jsonl => {
            let mut out = out;
            for row in rows {
                let line = serde_json::to_string(&JsonRow {
                    prime: row.prime,
                    cells: row.cells.clone(),
                })?;
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

pub fn table_string(
    rows: &[TableRow],
    algorithms: &[Algorithm],
    format: TableFormat,
) -> Result<String, LabError> {
    let mut buf = Vec::new();
    emit_table(rows, algorithms, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}

fn column_algorithms(header: &csv::StringRecord) -> Result<Vec<Algorithm>, LabError> {
    let bad = || LabError::Parse(format!("unexpected header {header:?}"));
    let cols: Vec<&str> = header.iter().collect();
    if cols.first() != Some(&"prime") || !(cols.len() - 1).is_multiple_of(4) {
        return Err(bad());
    }
    let n = (cols.len() - 1) / 4;
    let algorithms = (0..n)
        .map(|i| {
            let label = cols[1 + 2 * i].strip_suffix("_P").ok_or_else(bad)?;
            label.parse::<Algorithm>().map_err(LabError::Parse)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if table_header(&algorithms) != cols {
        return Err(bad());
    }
    Ok(algorithms)
}

/// Inverse of [`emit_table`]; returns the column algorithms and the rows.
pub fn parse_table<R: BufRead>(
    input: R,
    format: TableFormat,
) -> Result<(Vec<Algorithm>, Vec<TableRow>), LabError> {
    match format {
        TableFormat::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let algorithms = column_algorithms(r.headers()?)?;
            let n = algorithms.len();
            let mut rows = Vec::new();
            for rec in r.records() {
                let rec = rec?;
                let nums = rec
                    .iter()
                    .map(|x| x.parse::<u64>().map_err(|e| LabError::Parse(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let cells = algorithms
                    .iter()
                    .enumerate()
                    .map(|(i, &algorithm)| Cell {
                        algorithm,
                        counts: Counts {
                            periodic: nums[1 + 2 * i],
                            height: nums[2 + 2 * i],
                            finite: nums[1 + 2 * n + 2 * i],
                            step_limit: nums[2 + 2 * n + 2 * i],
                        },
                    })
                    .collect();
                rows.push(TableRow {
                    prime: nums[0],
                    cells,
                });
            }
            Ok((algorithms, rows))
        }
        TableFormat::Jsonl => {
            let mut rows = Vec::new();
            for line in input.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: JsonRow = serde_json::from_str(&line)?;
                rows.push(TableRow {
                    prime: row.prime,
                    cells: row.cells,
                });
            }
            let algorithms = rows
                .first()
                .map(|r| r.cells.iter().map(|c| c.algorithm).collect())
                .unwrap_or_default();
            Ok((algorithms, rows))
        }
    }
}
