//! Command dispatch. [`dispatch`] only computes; [`run`] also writes files.

use std::fs;
use std::time::{SystemTime, UNIX_EPOCH};

use fractb::cost_eff::{self, weight_sweep};
use fractb::sensitivity::{perturbation_experiment, sensitivity_table, Param};
use fractb::{endemic_equilibrium, r0, simulate, solve_focp, Error, FocpSolution, FracOrder, Treatment};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::{self, pretty, sci};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate,
    Equilibrium,
    R0,
    Sensitivity,
    Perturb {
        param: Param,
        pct: f64,
    },
    Optimize,
    CostEff,
    /// `None` lists fall back to the default weights and the scenario order.
    SweepB {
        b_values: Option<Vec<f64>>,
        alphas: Option<Vec<f64>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Equilibrium => "equilibrium",
            Command::R0 => "r0",
            Command::Sensitivity => "sensitivity",
            Command::Perturb { .. } => "perturb",
            Command::Optimize => "optimize",
            Command::CostEff => "cost-eff",
            Command::SweepB { .. } => "sweep-b",
        }
    }

    fn args(&self) -> Value {
        match self {
            Command::Perturb { param, pct } => json!({ "param": param.name(), "pct": pct }),
            Command::SweepB { b_values, alphas } => json!({ "b_values": b_values, "alphas": alphas }),
            _ => json!({}),
        }
    }
}

/// What a command produced, before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    /// File name (relative to the output directory) and contents.
    pub files: Vec<(String, String)>,
    pub diagnostics: Value,
    /// Set when outputs are valid but some solve hit its iteration cap.
    pub not_converged: Option<String>,
}

fn focp_outcome(scenario: &Scenario) -> CliResult<(FocpSolution, Option<String>)> {
    match solve_focp(&scenario.params, scenario.x0, &scenario.focp) {
        Ok(s) => Ok((s, None)),
        Err(Error::NotConverged(s)) => {
            let msg = format!(
                "forward-backward sweep stopped after {} iterations (last change {:.3e}); outputs hold the last iterate",
                s.iterations, s.last_change
            );
            Ok((*s, Some(msg)))
        }
        Err(e) => Err(e.into()),
    }
}

fn focp_diagnostics(s: &FocpSolution) -> Value {
    json!({ "iterations": s.iterations, "converged": s.converged, "last_change": s.last_change, "J_history": s.j_history })
}

pub fn dispatch(cmd: &Command, scenario: &Scenario) -> CliResult<Outcome> {
    let params = &scenario.params;
    let mut out = Outcome { diagnostics: Value::Null, ..Outcome::default() };
    match cmd {
        Command::R0 => {
            out.stdout = format!("{:.4}\n", r0(params)?);
        }
        Command::Equilibrium => {
            let x = endemic_equilibrium(params)?;
            out.stdout = format!("S = {}\nL = {}\nI = {}\nT = {}\n", x.s, x.l, x.i, x.t);
            out.files.push(("equilibrium.csv".into(), output::equilibrium_csv(&x)));
        }
        Command::Simulate => {
            let traj =
                simulate(params, scenario.x0, scenario.alpha(), scenario.grid(), Treatment::Constant(params.gamma))?;
            let u = vec![params.gamma; traj.grid().len()];
            let end = traj.last();
            out.stdout =
                format!("t = {}: S = {}, L = {}, I = {}, T = {}\n", traj.grid().tf(), end.s, end.l, end.i, end.t);
            out.files.push(("trajectory.csv".into(), output::trajectory_csv(&traj, &u)));
        }
        Command::Sensitivity => {
            let table = sensitivity_table(params)?;
            for r in &table {
                out.stdout += &format!("{:<8} {:+.6}\n", r.param.name(), r.index);
            }
            out.files.push(("sensitivity.csv".into(), output::sensitivity_csv(&table)));
        }
        Command::Perturb { param, pct } => {
            let r = perturbation_experiment(params, *param, *pct, scenario.alpha(), scenario.grid())?;
            out.stdout = format!("relative L2 change in I under {pct:+}% {param}: {}\n", sci(r.rel_l2_diff));
            out.diagnostics = json!({ "rel_l2_diff": r.rel_l2_diff });
            out.files.push((format!("perturb_{}.csv", param.name()), output::perturbation_csv(&r)));
        }
        Command::Optimize | Command::CostEff => {
            let (sol, not_converged) = focp_outcome(scenario)?;
            let report = cost_eff::report(&sol, &scenario.focp)?;
            let summary = output::summary_json(r0(params)?, &report, sol.iterations, sol.converged);
            out.diagnostics = focp_diagnostics(&sol);
            out.not_converged = not_converged;
            if *cmd == Command::Optimize {
                out.stdout = format!("J = {} after {} iterations\n", report.j, sol.iterations);
                out.files.push(("trajectory.csv".into(), output::trajectory_csv(&sol.states, sol.control.values())));
                out.files.push(("summary.json".into(), pretty(&summary)));
            } else {
                let acer = report.acer.map_or("undefined".to_owned(), |v| format!("{v:.6}"));
                out.stdout = format!(
                    "alpha = {}\nA     = {:.6}\nTC    = {:.6}\nACER  = {acer}\nFbar  = {:.6}\n",
                    report.alpha, report.a, report.tc, report.fbar
                );
                out.files.push(("cost_eff.json".into(), pretty(&summary)));
            }
        }
        Command::SweepB { b_values, alphas } => {
            let b_values = b_values.clone().unwrap_or_else(cost_eff::default_b_values);
            let alphas: Vec<FracOrder> = match alphas {
                Some(list) => list
                    .iter()
                    .map(|&a| FracOrder::new(a))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::InvariantViolation(e.to_string()))?,
                None => vec![scenario.alpha()],
            };
            if b_values.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                return Err(CliError::InvariantViolation(format!("0 < B < inf for every weight, got {b_values:?}")));
            }
            let rows = weight_sweep(params, scenario.x0, &alphas, &b_values, &scenario.focp)?;
            let failed = rows.iter().filter(|r| !r.converged).count();
            out.stdout = format!("{} runs, {failed} not converged\n", rows.len());
            if failed > 0 {
                out.not_converged = Some(format!("{failed} of {} sweep runs hit the iteration cap", rows.len()));
            }
            out.diagnostics = Value::Array(
                rows.iter()
                    .map(|r| json!({ "alpha": r.report.alpha.value(), "B": r.report.b, "iterations": r.iterations, "converged": r.converged }))
                    .collect(),
            );
            out.files.push(("sweep.csv".into(), output::sweep_csv(&rows)));
        }
    }
    Ok(out)
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Runs `cmd` and writes its files, plus `scenario.conf` and `manifest.json`,
/// into the scenario's output directory. Returns the text for stdout.
///
/// Results of a run that hit the iteration cap are still written; the
/// function then returns [`CliError::NotConverged`].
pub fn run(cmd: &Command, scenario: &Scenario) -> CliResult<String> {
    let started = unix_seconds();
    let outcome = dispatch(cmd, scenario)?;
    if outcome.files.is_empty() {
        return Ok(outcome.stdout);
    }

    let dir = &scenario.out;
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    for (name, contents) in &outcome.files {
        output::write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    let scenario_text = scenario.to_config_text();
    output::write_atomic(&dir.join("scenario.conf"), scenario_text.as_bytes())?;
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "args": cmd.args(),
        "scenario": scenario_text,
        "outputs": outcome.files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        "started_unix": started,
        "finished_unix": unix_seconds(),
        "diagnostics": outcome.diagnostics,
    });
    output::write_atomic(&dir.join("manifest.json"), pretty(&manifest).as_bytes())?;

    match outcome.not_converged {
        Some(msg) => Err(CliError::NotConverged(msg)),
        None => Ok(outcome.stdout),
    }
}
