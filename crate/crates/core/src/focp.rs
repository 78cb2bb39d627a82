//! Fractional optimal control of the treatment rate.
//!
//! Minimise
//!
//! ```text
//! J(u) = ∫_0^tf I(t) + B·ρ·u(t)² dt,    0 ≤ u(t) ≤ u_max,
//! ```
//!
//! subject to the fractional TB model with `γ` replaced by the control `u(t)`.
//! The maximum principle yields the costates `p1..p4`, which satisfy a system
//! of right Riemann–Liouville derivatives with terminal data `p_i(tf) = 0`,
//! and the projected control law
//!
//! ```text
//! u = min(max(0, (p3 − p4)·I / (2Bρ)), u_max).
//! ```
//!
//! The problem is solved by a forward-backward sweep: integrate the states
//! forward under the current control, integrate the costates backward, apply
//! the control law, relax, and repeat until the control stops moving.
//!
//! Backward solve: with `τ = tf − t` and `q(τ) = p(tf − τ)` the right-sided
//! operator on `[t, tf]` becomes a left-sided one on `[0, τ]`, and the terminal
//! condition becomes `q(0) = 0`. For zero initial data the left
//! Riemann–Liouville and Caputo derivatives coincide, so `q` is computed with
//! the same PECE solver as the states. At `α = 1` the right derivative is
//! `−d/dt`, which fixes the sign: `D^α q(τ) = −g(t, p)` where `g` is the
//! costate right-hand side of [`adjoint_rhs`].

use crate::fde::{solve_caputo_ivp, FnField, FracOrder, TimeGrid};
use crate::model::{simulate, ControlPath, ModelParams, StateVec, Trajectory, Treatment};
use crate::quadrature::trapezoid;
use crate::{Error, Result};

/// Settings of one optimal-control solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocpConfig {
    /// Weight of the control cost, `0 < B < ∞`.
    pub b: f64,
    /// Reference number of infectious individuals scaling the control cost.
    pub rho: f64,
    /// Upper bound of the treatment rate (1/year).
    pub u_max: f64,
    /// Unit cost of detection and treatment, used by the cost-effectiveness report.
    pub c: f64,
    pub grid: TimeGrid,
    pub alpha: FracOrder,
    /// Relaxation weight of the control update, in `(0, 1]`.
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl FocpConfig {
    /// Published experiment: `B = 0.15`, `ρ = 452.758`, `u_max = 1`, `C = 1`,
    /// `tf = 5` years on 2000 steps.
    pub fn baseline(alpha: FracOrder) -> Self {
        Self {
            b: 0.15,
            rho: 452.758,
            u_max: 1.0,
            c: 1.0,
            grid: TimeGrid::new(5.0, 2000).expect("valid default grid"),
            alpha,
            theta: 0.5,
            tol: 1e-4,
            max_iter: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{what}, got {v}")))
            }
        };
        check(self.b > 0.0 && self.b.is_finite(), "0 < B < inf", self.b)?;
        check(self.rho > 0.0 && self.rho.is_finite(), "rho > 0", self.rho)?;
        check(self.u_max > 0.0 && self.u_max.is_finite(), "u_max > 0", self.u_max)?;
        check(self.c >= 0.0 && self.c.is_finite(), "C >= 0", self.c)?;
        check(self.theta > 0.0 && self.theta <= 1.0, "0 < theta <= 1", self.theta)?;
        check(self.tol > 0.0 && self.tol.is_finite(), "tol > 0", self.tol)?;
        check(self.max_iter >= 1, "max_iter >= 1", self.max_iter as f64)?;
        Ok(())
    }
}

/// Costates `(p1, p2, p3, p4)` on every node.
#[derive(Debug, Clone, PartialEq)]
pub struct CostatePath {
    grid: TimeGrid,
    values: Vec<[f64; 4]>,
}

impl CostatePath {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[[f64; 4]] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocpSolution {
    pub states: Trajectory,
    /// Control that produced `states` and `costates`.
    pub control: ControlPath,
    pub costates: CostatePath,
    pub j: f64,
    /// Cost functional of every sweep iteration.
    pub j_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `max_j |u_law(t_j) − u(t_j)|` on the last iteration, where `u_law` is
    /// the control law applied to the returned states and costates.
    pub last_change: f64,
}

/// `J = ∫ I + B·ρ·u² dt` by the trapezoidal rule.
pub fn cost_functional(states: &Trajectory, control: &ControlPath, b: f64, rho: f64) -> Result<f64> {
    if states.grid() != control.grid() {
        return Err(Error::GridMismatch);
    }
    let integrand: Vec<f64> =
        states.states().iter().zip(control.values()).map(|(x, u)| x.i + b * rho * u * u).collect();
    Ok(trapezoid(&states.grid(), &integrand))
}

/// Right-hand sides of the costate system:
///
/// ```text
/// μp1 − βI(p1 − p2)
/// (ε+μ)p2 − εp3
/// −1 + (α1+u+μ)p3 − u·p4 + βS(p1 − p2)
/// (α2+μ+δ)p4 + δ(k−1)p2 − δk·p3
/// ```
///
/// The last three rows are `−∂H/∂(L, I, T)` of the Hamiltonian
/// `H = I + Bρu² + p·f(x, u)`. The first row keeps the published sign of the
/// `βI(p1 − p2)` term, which differs from `−∂H/∂S = μp1 + βI(p1 − p2)`; the
/// published cost-effectiveness figures are reproduced with this form.
pub fn adjoint_rhs(x: &StateVec, p: &[f64; 4], u: f64, m: &ModelParams) -> [f64; 4] {
    let [p1, p2, p3, p4] = *p;
    [
        m.mu * p1 - m.beta * x.i * (p1 - p2),
        (m.epsilon + m.mu) * p2 - m.epsilon * p3,
        -1.0 + (m.alpha1 + u + m.mu) * p3 - u * p4 + m.beta * x.s * (p1 - p2),
        (m.alpha2 + m.mu + m.delta) * p4 + m.delta * (m.k - 1.0) * p2 - m.delta * m.k * p3,
    ]
}

/// Pointwise minimiser of the Hamiltonian over `[0, u_max]`.
#[inline]
pub fn optimal_control_law(i: f64, p3: f64, p4: f64, b: f64, rho: f64, u_max: f64) -> f64 {
    ((p3 - p4) * i / (2.0 * b * rho)).max(0.0).min(u_max)
}

/// Integrates the costates backward from `p(tf) = 0` along the given states
/// and control (see the module docs for the time reversal).
pub fn solve_costates(
    states: &Trajectory,
    control: &ControlPath,
    params: &ModelParams,
    alpha: FracOrder,
) -> Result<CostatePath> {
    let grid = states.grid();
    if control.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let n = grid.n_steps();
    let xs = states.states();
    let us = control.values();

    let field = FnField::new(4, |m, _tau, q: &[f64], dq: &mut [f64]| {
        let node = n - m;
        let g = adjoint_rhs(&xs[node], &[q[0], q[1], q[2], q[3]], us[node], params);
        for (d, gi) in dq.iter_mut().zip(g) {
            *d = -gi;
        }
    });
    let reversed = solve_caputo_ivp(&field, &[0.0; 4], alpha, grid)?;

    let values = (0..=n)
        .map(|j| {
            let q = reversed.value(n - j);
            [q[0], q[1], q[2], q[3]]
        })
        .collect();
    Ok(CostatePath { grid, values })
}

/// Forward-backward PECE sweep.
///
/// Starting from `u ≡ 0`, each iteration
/// 1. integrates the states under `u`,
/// 2. integrates the costates backward,
/// 3. evaluates the control law `u_law`,
/// 4. stops if `max_j |u_law − u| ≤ tol·max(1, max_j |u_law|)`,
/// 5. otherwise sets `u ← clamp(θ·u_law + (1−θ)·u)`.
///
/// On success the returned states, costates and `J` all belong to the returned
/// control. Hitting `max_iter` yields [`Error::NotConverged`] carrying the last
/// iterate.
pub fn solve_focp(params: &ModelParams, x0: StateVec, cfg: &FocpConfig) -> Result<FocpSolution> {
    params.validate()?;
    cfg.validate()?;
    let grid = cfg.grid;
    let mut u = vec![0.0; grid.len()];
    let mut j_history = Vec::new();

    for iteration in 1..=cfg.max_iter {
        let control = ControlPath::new(grid, u)?;
        let states = simulate(params, x0, cfg.alpha, grid, Treatment::Path(&control))?;
        let costates = solve_costates(&states, &control, params, cfg.alpha)?;
        let j = cost_functional(&states, &control, cfg.b, cfg.rho)?;
        j_history.push(j);

        let u_law: Vec<f64> = states
            .states()
            .iter()
            .zip(costates.values())
            .map(|(x, p)| optimal_control_law(x.i, p[2], p[3], cfg.b, cfg.rho, cfg.u_max))
            .collect();
        let change = u_law.iter().zip(control.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = u_law.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let converged = change <= cfg.tol * scale;

        if converged || iteration == cfg.max_iter {
            let solution = FocpSolution {
                states,
                control,
                costates,
                j,
                j_history,
                iterations: iteration,
                converged,
                last_change: change,
            };
            return if converged { Ok(solution) } else { Err(Error::NotConverged(Box::new(solution))) };
        }

        u = u_law
            .iter()
            .zip(control.values())
            .map(|(new, old)| (cfg.theta * new + (1.0 - cfg.theta) * old).clamp(0.0, cfg.u_max))
            .collect();
    }
    unreachable!("max_iter >= 1 is validated")
}
