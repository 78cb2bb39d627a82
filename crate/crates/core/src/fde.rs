//! Caputo fractional initial-value problems.
//!
//! Solves `D^α x(t) = f(t, x(t))`, `x(0) = x0`, `0 < α ≤ 1`, on a uniform grid
//! `t_j = j·h` with the fractional Adams–Bashforth–Moulton method in PECE form
//! (predict, evaluate, correct once, evaluate). The problem is rewritten as the
//! Volterra equation
//!
//! ```text
//! x(t) = x0 + 1/Γ(α) ∫_0^t (t − s)^(α−1) f(s, x(s)) ds
//! ```
//!
//! and the integral is replaced by product rectangle (predictor) and product
//! trapezoidal (corrector) rules. With `n` the index of the last known node:
//!
//! ```text
//! b_j     = h^α/α · ((n+1−j)^α − (n−j)^α)                                  0 ≤ j ≤ n
//! a_0     = h^α/(α(α+1)) · (n^(α+1) − (n−α)(n+1)^α)
//! a_j     = h^α/(α(α+1)) · ((n−j+2)^(α+1) + (n−j)^(α+1) − 2(n−j+1)^(α+1))  1 ≤ j ≤ n
//! a_{n+1} = h^α/(α(α+1))
//!
//! x^P_{n+1} = x0 + 1/Γ(α) Σ_j b_j f(t_j, x_j)
//! x_{n+1}   = x0 + 1/Γ(α) (Σ_j a_j f(t_j, x_j) + a_{n+1} f(t_{n+1}, x^P_{n+1}))
//! ```
//!
//! For α = 1 the predictor is the explicit rectangle rule and the corrector the
//! trapezoidal rule, i.e. Heun's method.
//!
//! The whole history is kept (no short-memory truncation), so a solve costs
//! O(N²) right-hand-side combinations for N steps. Exactly one correction is
//! applied per step.

use statrs::function::gamma::gamma;

use crate::{Error, Result};

/// Order of a Caputo derivative, `0 < α ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub const ONE: FracOrder = FracOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Uniform grid on `[0, tf]` with `n_steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tf: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(tf: f64, n_steps: usize) -> Result<Self> {
        if !(tf.is_finite() && tf > 0.0) {
            return Err(Error::InvalidGrid(format!("tf must be positive and finite, got {tf}")));
        }
        if n_steps < 2 {
            return Err(Error::InvalidGrid(format!("n_steps must be at least 2, got {n_steps}")));
        }
        Ok(Self { tf, n_steps })
    }

    #[inline]
    pub fn tf(&self) -> f64 {
        self.tf
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.tf / self.n_steps as f64
    }

    /// Time of node `j`; exact at both ends of the interval.
    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.tf * j as f64 / self.n_steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.t(j))
    }
}

/// Right-hand side `f(t, x)` of a first-order system.
///
/// `node` is the grid index of `t`; fields that carry node-sampled data (a
/// control, a frozen trajectory) look it up by index instead of by time.
pub trait VectorField {
    fn dim(&self) -> usize;

    fn eval(&self, node: usize, t: f64, x: &[f64], dx: &mut [f64]);
}

/// Adapts a closure `(node, t, x, dx)` into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(usize, f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(usize, f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, node: usize, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.f)(node, t, x, dx)
    }
}

/// Vector-valued samples on every node of a [`TimeGrid`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TimeGrid,
    dim: usize,
    data: Vec<f64>,
}

impl GridFunction {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// State at node `j`.
    pub fn value(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn values(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Samples of one component across all nodes.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values().map(|x| x[i]).collect()
    }

    pub fn last(&self) -> &[f64] {
        self.value(self.grid.n_steps())
    }
}

/// Predictor weights `b_0..b_n` for the step from node `n` to `n + 1`.
pub fn abm_predictor_weights(alpha: FracOrder, n: usize, h: f64) -> Vec<f64> {
    let a = alpha.value();
    let scale = h.powf(a) / a;
    (0..=n)
        .map(|j| {
            let m = (n - j) as f64;
            scale * ((m + 1.0).powf(a) - m.powf(a))
        })
        .collect()
}

/// Corrector weights `a_0..a_{n+1}` for the step from node `n` to `n + 1`.
pub fn abm_corrector_weights(alpha: FracOrder, n: usize, h: f64) -> Vec<f64> {
    let a = alpha.value();
    let ap1 = a + 1.0;
    let scale = h.powf(a) / (a * ap1);
    let nf = n as f64;
    let mut w = Vec::with_capacity(n + 2);
    w.push(scale * (nf.powf(ap1) - (nf - a) * (nf + 1.0).powf(a)));
    for j in 1..=n {
        let m = (n - j) as f64;
        w.push(scale * ((m + 2.0).powf(ap1) + m.powf(ap1) - 2.0 * (m + 1.0).powf(ap1)));
    }
    w.push(scale);
    w
}

/// Weight sequences shared by every step of a solve on one grid.
///
/// Both rules are convolutions: apart from the corrector's first weight, the
/// weight of node `j` at step `n` depends only on the lag `n − j`.
struct Kernel {
    alpha: f64,
    /// `h^α / Γ(α + 1)`
    pred_scale: f64,
    /// `h^α / Γ(α + 2)`
    corr_scale: f64,
    /// `(m+1)^α − m^α`
    pred: Vec<f64>,
    /// `(m+2)^(α+1) + m^(α+1) − 2(m+1)^(α+1)`
    corr: Vec<f64>,
}

impl Kernel {
    fn new(alpha: FracOrder, grid: &TimeGrid) -> Self {
        let a = alpha.value();
        let ap1 = a + 1.0;
        let hp = grid.h().powf(a);
        let n = grid.n_steps();
        let pred = (0..n)
            .map(|m| {
                let m = m as f64;
                (m + 1.0).powf(a) - m.powf(a)
            })
            .collect();
        let corr = (0..n)
            .map(|m| {
                let m = m as f64;
                (m + 2.0).powf(ap1) + m.powf(ap1) - 2.0 * (m + 1.0).powf(ap1)
            })
            .collect();
        Self { alpha: a, pred_scale: hp / gamma(a + 1.0), corr_scale: hp / gamma(a + 2.0), pred, corr }
    }

    /// Unscaled corrector weight of node 0 at step `n`.
    fn corr_first(&self, n: usize) -> f64 {
        let nf = n as f64;
        nf.powf(self.alpha + 1.0) - (nf - self.alpha) * (nf + 1.0).powf(self.alpha)
    }
}

/// Solves `D^α x = f(t, x)`, `x(0) = x0` on `grid` with the PECE scheme
/// described in the module docs.
pub fn solve_caputo_ivp<F>(f: &F, x0: &[f64], alpha: FracOrder, grid: TimeGrid) -> Result<GridFunction>
where
    F: VectorField + ?Sized,
{
    let d = f.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { node: 0, t: 0.0 });
    }

    let n_steps = grid.n_steps();
    let kernel = Kernel::new(alpha, &grid);

    let mut xs = Vec::with_capacity(grid.len() * d);
    let mut fs = vec![0.0; grid.len() * d];
    xs.extend_from_slice(x0);
    f.eval(0, 0.0, x0, &mut fs[..d]);

    let mut pred_sum = vec![0.0; d];
    let mut corr_sum = vec![0.0; d];
    let mut x_pred = vec![0.0; d];
    let mut f_pred = vec![0.0; d];

    for n in 0..n_steps {
        pred_sum.iter_mut().for_each(|v| *v = 0.0);
        corr_sum.iter_mut().for_each(|v| *v = 0.0);

        let a0 = kernel.corr_first(n);
        let b0 = kernel.pred[n];
        for (i, &fi) in fs[..d].iter().enumerate() {
            pred_sum[i] += b0 * fi;
            corr_sum[i] += a0 * fi;
        }
        for j in 1..=n {
            let lag = n - j;
            let bj = kernel.pred[lag];
            let aj = kernel.corr[lag];
            let fj = &fs[j * d..(j + 1) * d];
            for i in 0..d {
                pred_sum[i] += bj * fj[i];
                corr_sum[i] += aj * fj[i];
            }
        }

        let t_next = grid.t(n + 1);
        for i in 0..d {
            x_pred[i] = x0[i] + kernel.pred_scale * pred_sum[i];
        }
        f.eval(n + 1, t_next, &x_pred, &mut f_pred);

        let start = xs.len();
        for i in 0..d {
            xs.push(x0[i] + kernel.corr_scale * (corr_sum[i] + f_pred[i]));
        }
        let x_next = &xs[start..];
        if x_next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { node: n + 1, t: t_next });
        }
        f.eval(n + 1, t_next, x_next, &mut fs[(n + 1) * d..(n + 2) * d]);
    }

    Ok(GridFunction { grid, dim: d, data: xs })
}
