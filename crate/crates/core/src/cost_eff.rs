//! Cost-effectiveness of a treatment intervention.
//!
//! For the optimally controlled infectious curve `I*(t)` on `[0, tf]`:
//!
//! ```text
//! F(t) = 1 − I*(t)/I(0)              efficacy
//! A    = tf·I(0) − ∫ I*(t) dt        averted cases
//! F̄    = A / (tf·I(0))               effectiveness
//! TC   = ∫ C·u*(t)·I*(t) dt          total cost
//! ACER = TC / A
//! ```
//!
//! All integrals use the trapezoidal rule of [`crate::quadrature`].

use rayon::prelude::*;

use crate::fde::{FracOrder, TimeGrid};
use crate::focp::{cost_functional, solve_focp, FocpConfig, FocpSolution};
use crate::model::{ControlPath, ModelParams, StateVec, Trajectory};
use crate::quadrature::trapezoid;
use crate::{Error, Result};

/// `|A|` below this fraction of `tf·I(0)` is quadrature noise; ACER is then undefined.
const ZERO_AVERTED_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EfficacySeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl EfficacySeries {
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

pub fn efficacy(states: &Trajectory) -> Result<EfficacySeries> {
    let i0 = states.initial().i;
    if !(i0 > 0.0) {
        return Err(Error::ZeroInitialInfectious);
    }
    Ok(EfficacySeries { grid: states.grid(), values: states.states().iter().map(|x| 1.0 - x.i / i0).collect() })
}

pub fn averted_cases(states: &Trajectory) -> f64 {
    let grid = states.grid();
    grid.tf() * states.initial().i - trapezoid(&grid, &states.infectious())
}

pub fn total_cost(states: &Trajectory, control: &ControlPath, c: f64) -> Result<f64> {
    if states.grid() != control.grid() {
        return Err(Error::GridMismatch);
    }
    let integrand: Vec<f64> = states.states().iter().zip(control.values()).map(|(x, u)| c * u * x.i).collect();
    Ok(trapezoid(&states.grid(), &integrand))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEffReport {
    /// Averted cases (individual·years).
    pub a: f64,
    pub tc: f64,
    /// `None` when no cases are averted.
    pub acer: Option<f64>,
    pub fbar: f64,
    pub j: f64,
    pub alpha: FracOrder,
    pub b: f64,
}

pub fn summarize(states: &Trajectory, control: &ControlPath, cfg: &FocpConfig) -> Result<CostEffReport> {
    let i0 = states.initial().i;
    if !(i0 > 0.0) {
        return Err(Error::ZeroInitialInfectious);
    }
    let total_possible = states.grid().tf() * i0;
    let a = averted_cases(states);
    let tc = total_cost(states, control, cfg.c)?;
    let acer = (a.abs() > ZERO_AVERTED_REL * total_possible).then(|| tc / a);
    Ok(CostEffReport {
        a,
        tc,
        acer,
        fbar: a / total_possible,
        j: cost_functional(states, control, cfg.b, cfg.rho)?,
        alpha: cfg.alpha,
        b: cfg.b,
    })
}

/// Report for a solved control problem.
pub fn report(solution: &FocpSolution, cfg: &FocpConfig) -> Result<CostEffReport> {
    summarize(&solution.states, &solution.control, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub report: CostEffReport,
    pub iterations: usize,
    /// `false` when the sweep hit its iteration cap; the row then holds the last iterate.
    pub converged: bool,
}

/// `B ∈ {0.05, 0.10, …, 1.00}`.
pub fn default_b_values() -> Vec<f64> {
    (1..=20).map(|k| k as f64 * 0.05).collect()
}

/// Solves the control problem for every `(α, B)` pair of the cartesian
/// product, in parallel, and returns rows sorted by `(α, B)`.
///
/// Pairs that do not converge are kept with `converged = false`; any other
/// solver failure aborts the sweep.
pub fn weight_sweep(
    params: &ModelParams,
    x0: StateVec,
    alphas: &[FracOrder],
    b_values: &[f64],
    template: &FocpConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(b) = b_values.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidParams(format!("0 < B < inf, got {b}")));
    }
    let pairs: Vec<(FracOrder, f64)> = alphas.iter().flat_map(|&a| b_values.iter().map(move |&b| (a, b))).collect();

    let mut rows = pairs
        .into_par_iter()
        .map(|(alpha, b)| {
            let cfg = FocpConfig { alpha, b, ..*template };
            let solution = match solve_focp(params, x0, &cfg) {
                Ok(s) => s,
                Err(Error::NotConverged(s)) => *s,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                report: report(&solution, &cfg)?,
                iterations: solution.iterations,
                converged: solution.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    rows.sort_by(|x, y| {
        x.report.alpha.value().total_cmp(&y.report.alpha.value()).then(x.report.b.total_cmp(&y.report.b))
    });
    Ok(rows)
}
