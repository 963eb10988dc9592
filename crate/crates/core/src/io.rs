//! Text serializations: CSV and JSON for matrices, controls, bases and
//! adiabatic trajectories.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which round-trips
//! every `f64` exactly. CSV files may start with `#` comment lines carrying
//! the units and the resolved run configuration; readers skip them.

use std::fmt::Write as _;

use serde_json::Value;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::floquet::AdiabaticTrajectory;
use crate::grape::ControlSequence;
use crate::numerics::CMatrix;
use crate::operators::HermitianOperator;

pub const UNITS: &str = "energies in units of J, times in units of 1/J, hbar = 1";

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# units: …` and `# config: {…}` comment lines.
pub fn comment_header(config: Option<&Value>) -> String {
    let mut out = format!("# units: {UNITS}\n");
    if let Some(cfg) = config {
        let _ = writeln!(out, "# config: {cfg}");
    }
    out
}

fn csv_rows(header: &str, m: &CMatrix, part: impl Fn(num_complex::Complex64) -> f64) -> String {
    let mut out = header.to_string();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| real(part(m[(i, j)]))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Real and imaginary parts as two CSV documents.
pub fn matrix_csv_pair(m: &CMatrix, config: Option<&Value>) -> (String, String) {
    let header = comment_header(config);
    (csv_rows(&header, m, |z| z.re), csv_rows(&header, m, |z| z.im))
}

fn parse_csv_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut column = 1;
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v = cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: n + 1,
                column,
                message: format!("{:?}: {e}", cell.trim()),
            })?;
            row.push(v);
            column += cell.len() + 1;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Inverse of [`matrix_csv_pair`].
pub fn read_matrix_csv_pair(re: &str, im: &str) -> Result<CMatrix> {
    let re = parse_csv_table(re)?;
    let im = parse_csv_table(im)?;
    let d = re.len();
    let square = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
    if !square(&re) || !square(&im) {
        return Err(Error::InvalidParameter(format!(
            "matrix CSV pair must hold two {d}×{d} tables"
        )));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| num_complex::Complex64::new(re[i][j], im[i][j])))
}

/// `{"dim", "space", "units", "config", "entries": [[[re, im], …], …]}`.
pub fn matrix_json(op: &HermitianOperator, config: Option<&Value>) -> Result<String> {
    let m = op.matrix();
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"dim\": {},", op.dim());
    let _ = writeln!(out, "  \"space\": {},", serde_json::to_string(op.space())?);
    let _ = writeln!(out, "  \"units\": {},", serde_json::to_string(UNITS)?);
    if let Some(cfg) = config {
        let _ = writeln!(out, "  \"config\": {cfg},");
    }
    out.push_str("  \"entries\": [\n");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("[{}, {}]", real(m[(i, j)].re), real(m[(i, j)].im)))
            .collect();
        let sep = if i + 1 < m.nrows() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    out.push_str("  ]\n}\n");
    Ok(out)
}

/// Entries of a [`matrix_json`] document.
pub fn read_matrix_json(text: &str) -> Result<CMatrix> {
    let v: Value = serde_json::from_str(text)?;
    let bad = || Error::InvalidParameter("matrix JSON needs an `entries` array of [re, im] rows".into());
    let rows = v.get("entries").and_then(Value::as_array).ok_or_else(bad)?;
    let d = rows.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == d).ok_or_else(bad)?;
        for (j, z) in row.iter().enumerate() {
            let re = z.get(0).and_then(Value::as_f64).ok_or_else(bad)?;
            let im = z.get(1).and_then(Value::as_f64).ok_or_else(bad)?;
            m[(i, j)] = num_complex::Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// `step,control_name,value` with 1-based steps.
pub fn controls_csv(seq: &ControlSequence, config: Option<&Value>) -> String {
    let mut out = comment_header(config);
    out.push_str("step,control_name,value\n");
    for j in 0..seq.steps {
        for (k, name) in seq.names.iter().enumerate() {
            let _ = writeln!(out, "{},{name},{}", j + 1, real(seq.value(k, j)));
        }
    }
    out
}

/// Inverse of [`controls_csv`]; control order follows first appearance.
pub fn read_controls_csv(text: &str) -> Result<ControlSequence> {
    let mut names: Vec<String> = Vec::new();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut steps = 0;
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("step,") {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: n + 1,
            column: 1,
            message,
        };
        let cells: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let [step, name, value] = cells[..] else {
            return Err(parse_err("expected `step,control_name,value`".into()));
        };
        let step: usize = step.parse().map_err(|e| parse_err(format!("step: {e}")))?;
        if step == 0 {
            return Err(parse_err("steps are numbered from 1".into()));
        }
        let value: f64 = value.parse().map_err(|e| parse_err(format!("value: {e}")))?;
        let k = match names.iter().position(|x| x == name) {
            Some(k) => k,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        };
        steps = steps.max(step);
        entries.push((k, step - 1, value));
    }
    if entries.len() != names.len() * steps {
        return Err(Error::InvalidParameter(format!(
            "controls CSV holds {} values, expected {} controls × {steps} steps",
            entries.len(),
            names.len()
        )));
    }
    let mut seq = ControlSequence::zeros(names, steps);
    for (k, j, v) in entries {
        seq.set(k, j, v);
    }
    Ok(seq)
}

/// `index,occ_1,…,occ_L`, 0-based index.
pub fn basis_csv(basis: &Basis, config: Option<&Value>) -> String {
    let mut out = comment_header(config);
    out.push_str("index");
    for l in 1..=basis.sector().sites() {
        let _ = write!(out, ",occ_{l}");
    }
    out.push('\n');
    for (i, s) in basis.iter().enumerate() {
        let occ: Vec<String> = s.0.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{i},{}", occ.join(","));
    }
    out
}

/// `cycle,lambda,ground_fidelity,cost_expectation,e_0,…,e_{D-1}`.
pub fn trajectory_csv(traj: &AdiabaticTrajectory, config: Option<&Value>) -> String {
    let mut out = comment_header(config);
    out.push_str("cycle,lambda,ground_fidelity,cost_expectation");
    let d = traj.records.first().map_or(0, |r| r.quasienergies.len());
    for k in 0..d {
        let _ = write!(out, ",e_{k}");
    }
    out.push('\n');
    for r in &traj.records {
        let _ = write!(
            out,
            "{},{},{},{}",
            r.cycle,
            real(r.lambda),
            real(r.ground_fidelity),
            real(r.cost_expectation)
        );
        for e in &r.quasienergies {
            let _ = write!(out, ",{}", real(*e));
        }
        out.push('\n');
    }
    out
}
