//! CSV/JSON rendering and atomic file writes.

use std::fs;
use std::path::Path;

use fractb::cost_eff::{CostEffReport, SweepRow};
use fractb::sensitivity::{PerturbationResult, SensitivityIndex};
use fractb::{StateVec, Trajectory};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// Ten significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

fn row(fields: &[f64]) -> String {
    let cells: Vec<String> = fields.iter().map(|&v| sci(v)).collect();
    cells.join(",") + "\n"
}

/// Header `t,S,L,I,T,u,F`. `F` is `NaN` throughout when `I(0) = 0`.
pub fn trajectory_csv(traj: &Trajectory, control: &[f64]) -> String {
    let grid = traj.grid();
    let i0 = traj.initial().i;
    let mut s = String::from("t,S,L,I,T,u,F\n");
    for ((t, x), u) in grid.nodes().zip(traj.states()).zip(control) {
        let f = if i0 > 0.0 { 1.0 - x.i / i0 } else { f64::NAN };
        s += &row(&[t, x.s, x.l, x.i, x.t, *u, f]);
    }
    s
}

pub fn equilibrium_csv(x: &StateVec) -> String {
    String::from("S,L,I,T\n") + &row(&x.to_array())
}

pub fn sensitivity_csv(table: &[SensitivityIndex]) -> String {
    let mut s = String::from("param,index\n");
    for r in table {
        s += &format!("{},{}\n", r.param, sci(r.index));
    }
    s
}

pub fn perturbation_csv(r: &PerturbationResult) -> String {
    let mut s = String::from("t,I_baseline,I_perturbed\n");
    for ((t, b), p) in r.grid.nodes().zip(&r.baseline_i).zip(&r.perturbed_i) {
        s += &row(&[t, *b, *p]);
    }
    s
}

/// Header `alpha,B,J,A,TC,ACER,Fbar`; an undefined ACER is an empty cell.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,B,J,A,TC,ACER,Fbar\n");
    for r in rows {
        let c = &r.report;
        let acer = c.acer.map(sci).unwrap_or_default();
        s += &format!(
            "{},{},{},{},{},{},{}\n",
            sci(c.alpha.value()),
            sci(c.b),
            sci(c.j),
            sci(c.a),
            sci(c.tc),
            acer,
            sci(c.fbar)
        );
    }
    s
}

pub fn summary_json(r0: f64, report: &CostEffReport, iterations: usize, converged: bool) -> Value {
    json!({
        "r0": r0,
        "alpha": report.alpha.value(),
        "B": report.b,
        "J": report.j,
        "A": report.a,
        "TC": report.tc,
        "ACER": report.acer,
        "Fbar": report.fbar,
        "iterations": iterations,
        "converged": converged,
    })
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

/// Writes to a hidden sibling and renames it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(CliError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Io { path: path.to_owned(), source: e }
    })
}
