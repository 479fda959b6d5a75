//! Deterministic CSV / JSONL rendering of sweep rows and profiles.
//!
//! Floats use 17 significant digits in scientific notation.

use std::path::Path;

use weakbeam_core::SampledField;

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::scenario::SweepRow;

/// Column order of sweep output, fixed.
pub const SWEEP_COLUMNS: [&str; 18] = [
    "index",
    "scenario",
    "parameter",
    "value",
    "measured_centroid",
    "fitted_center",
    "predicted",
    "signed_prediction",
    "abs_error",
    "relative_error",
    "pps_measured",
    "pps_predicted",
    "weak_regime_margin",
    "diffraction_margin",
    "weak_regime_ok",
    "grid_n",
    "grid_dx",
    "warnings",
];

pub const PROFILE_COLUMNS: [&str; 4] = ["x", "re", "im", "intensity"];

/// `{:.16e}`; non-finite values print as Rust does (`NaN`, `inf`).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

fn sweep_cells(row: &SweepRow) -> Vec<Cell> {
    let r = &row.report;
    let opt = |v: Option<f64>| v.map(Cell::Float).unwrap_or(Cell::Missing);
    vec![
        Cell::Int(row.index),
        Cell::Text(row.scenario.name().to_string()),
        row.parameter
            .clone()
            .map(Cell::Text)
            .unwrap_or(Cell::Missing),
        opt(row.value),
        Cell::Float(r.measured_centroid),
        Cell::Float(r.fitted_center),
        Cell::Float(r.predicted),
        Cell::Float(r.signed_prediction()),
        Cell::Float(row.abs_error()),
        opt(row.relative_error()),
        Cell::Float(r.postselection_probability_measured),
        Cell::Float(r.postselection_probability_predicted),
        Cell::Float(r.weak_regime_margin),
        Cell::Float(r.diffraction_margin),
        Cell::Bool(r.weak_regime_holds()),
        Cell::Int(row.grid.n()),
        Cell::Float(row.grid.dx()),
        Cell::Text(r.warnings.join("; ")),
    ]
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(v) => fmt_float(*v),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(v) if v.is_finite() => fmt_float(*v),
        Cell::Float(_) | Cell::Missing => "null".to_string(),
        Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
        Cell::Bool(b) => b.to_string(),
    }
}

fn render(columns: &[&str], rows: &[Vec<Cell>], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(columns).expect("in-memory write");
            for row in rows {
                w.write_record(row.iter().map(csv_cell))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
        OutputFormat::Jsonl => {
            let mut out = String::new();
            for row in rows {
                let fields: Vec<String> = columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| format!("\"{k}\":{}", json_cell(c)))
                    .collect();
                out.push('{');
                out.push_str(&fields.join(","));
                out.push_str("}\n");
            }
            out
        }
    }
}

pub fn render_sweep(rows: &[SweepRow], format: OutputFormat) -> String {
    let cells: Vec<Vec<Cell>> = rows.iter().map(sweep_cells).collect();
    render(&SWEEP_COLUMNS, &cells, format)
}

pub fn render_profile(field: &SampledField, format: OutputFormat) -> String {
    let cells: Vec<Vec<Cell>> = field
        .grid()
        .positions()
        .zip(field.values())
        .map(|(x, v)| {
            vec![
                Cell::Float(x),
                Cell::Float(v.re),
                Cell::Float(v.im),
                Cell::Float(v.norm_sqr()),
            ]
        })
        .collect();
    render(&PROFILE_COLUMNS, &cells, format)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Fixed-width table for the terminal.
pub fn summary_table(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{:>5} {:>12} {:>13} {:>13} {:>10} {:>11} {:>10}  {}\n",
        "index", "value", "centroid", "predicted", "rel_err", "pps", "margin", "regime"
    );
    for row in rows {
        let r = &row.report;
        let value = row
            .value
            .map(|v| format!("{v:.5e}"))
            .unwrap_or_else(|| "-".into());
        let rel = row
            .relative_error()
            .map(|v| format!("{v:.3e}"))
            .unwrap_or_else(|| "-".into());
        let flag = if r.weak_regime_holds() {
            "ok"
        } else {
            "VIOLATED"
        };
        out.push_str(&format!(
            "{:>5} {:>12} {:>13.5e} {:>13.5e} {:>10} {:>11.4e} {:>10.3e}  {}\n",
            row.index,
            value,
            r.measured_centroid,
            r.signed_prediction(),
            rel,
            r.postselection_probability_measured,
            r.weak_regime_margin,
            flag
        ));
        for w in &r.warnings {
            out.push_str(&format!("      warning: {w}\n"));
        }
    }
    out
}
