//! Caputo fractional-order TB transmission model.
//!
//! Four compartments: susceptible `S`, latent `L`, infectious `I` and under
//! treatment `T`:
//!
//! ```text
//! D^α S = Λ − βIS − μS
//! D^α L = βIS + (1−k)δT − (μ+ε)L
//! D^α I = εL + kδT − (μ+u+α1)I
//! D^α T = uI − (μ+δ+α2)T
//! ```
//!
//! With a constant treatment rate `u = γ` this is the uncontrolled model; the
//! optimal-control problem replaces `γ` by a time-dependent `u(t)`.
//!
//! The baseline treatment-entry rate `γ = 0.7` is not part of the published
//! parameter table. It is recovered from the reported `R0 = 7.1343`
//! (bisection on `r0(γ)` gives `γ ≈ 0.700006`) and agrees with the reported
//! equilibrium, where `T* = γI*/(μ+δ+α2) = 78.43`.

use std::fmt;
use std::str::FromStr;

use crate::fde::{solve_caputo_ivp, FnField, FracOrder, TimeGrid};
use crate::{Error, Result};

/// Epidemiological rates of the TB model. Rates are per year, `lambda` is in
/// individuals per year and `beta` per individual per year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Recruitment rate Λ.
    pub lambda: f64,
    /// Transmission coefficient β.
    pub beta: f64,
    /// Natural death rate μ.
    pub mu: f64,
    /// Fraction of treatment exits that fail back to `I`.
    pub k: f64,
    /// Rate of leaving treatment δ.
    pub delta: f64,
    /// Latent-to-infectious rate ε.
    pub epsilon: f64,
    /// Treatment-entry rate γ.
    pub gamma: f64,
    /// TB-induced death rate of `I`.
    pub alpha1: f64,
    /// TB-induced death rate of `T`.
    pub alpha2: f64,
}

impl ModelParams {
    /// Published baseline values, with `γ = 0.7` (see module docs).
    pub fn baseline() -> Self {
        Self {
            lambda: 792.8571,
            beta: 0.0005,
            mu: 1.0 / 70.0,
            k: 0.15,
            delta: 1.5,
            epsilon: 0.00368,
            gamma: 0.7,
            alpha1: 0.3,
            alpha2: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in Param::ALL {
            let v = self.get(p);
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{p} must be finite, got {v}")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{p} >= 0, got {v}")));
            }
        }
        if self.k > 1.0 {
            return Err(Error::InvalidParams(format!("0 <= k <= 1, got {}", self.k)));
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidParams(format!("mu > 0, got {}", self.mu)));
        }
        if self.lambda <= 0.0 {
            return Err(Error::InvalidParams(format!("Lambda > 0, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn derived_rates(&self) -> DerivedRates {
        DerivedRates {
            b1: self.mu + self.epsilon,
            b2: self.mu + self.gamma + self.alpha1,
            b3: self.mu + self.delta + self.alpha2,
        }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Lambda => self.lambda,
            Param::Beta => self.beta,
            Param::Mu => self.mu,
            Param::K => self.k,
            Param::Delta => self.delta,
            Param::Epsilon => self.epsilon,
            Param::Gamma => self.gamma,
            Param::Alpha1 => self.alpha1,
            Param::Alpha2 => self.alpha2,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        let slot = match p {
            Param::Lambda => &mut self.lambda,
            Param::Beta => &mut self.beta,
            Param::Mu => &mut self.mu,
            Param::K => &mut self.k,
            Param::Delta => &mut self.delta,
            Param::Epsilon => &mut self.epsilon,
            Param::Gamma => &mut self.gamma,
            Param::Alpha1 => &mut self.alpha1,
            Param::Alpha2 => &mut self.alpha2,
        };
        *slot = value;
    }

    pub fn with(mut self, p: Param, value: f64) -> Self {
        self.set(p, value);
        self
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Names of the nine model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Mu,
    Epsilon,
    Gamma,
    Alpha1,
    Delta,
    Alpha2,
    Lambda,
    K,
    Beta,
}

impl Param {
    /// All parameters, in the order of the published sensitivity table.
    pub const ALL: [Param; 9] = [
        Param::Mu,
        Param::Epsilon,
        Param::Gamma,
        Param::Alpha1,
        Param::Delta,
        Param::Alpha2,
        Param::Lambda,
        Param::K,
        Param::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "Lambda",
            Param::Beta => "beta",
            Param::Mu => "mu",
            Param::K => "k",
            Param::Delta => "delta",
            Param::Epsilon => "epsilon",
            Param::Gamma => "gamma",
            Param::Alpha1 => "alpha1",
            Param::Alpha2 => "alpha2",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownParameter(s.to_owned()))
    }
}

/// `b1 = μ+ε`, `b2 = μ+γ+α1`, `b3 = μ+δ+α2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

/// Compartment sizes (individuals).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVec {
    pub s: f64,
    pub l: f64,
    pub i: f64,
    pub t: f64,
}

impl StateVec {
    pub const fn new(s: f64, l: f64, i: f64, t: f64) -> Self {
        Self { s, l, i, t }
    }

    /// Endemic equilibrium of the baseline parameters, as published
    /// (rounded to six significant digits).
    pub const fn published_equilibrium() -> Self {
        Self::new(7779.28, 43511.9, 175.267, 78.4299)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.s, self.l, self.i, self.t]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn total(&self) -> f64 {
        self.s + self.l + self.i + self.t
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<[f64; 4]> for StateVec {
    fn from(x: [f64; 4]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }
}

/// Right-hand side of the model with treatment rate `u` in place of `γ`.
pub fn tb_rhs(x: &StateVec, p: &ModelParams, u: f64) -> StateVec {
    let infection = p.beta * x.i * x.s;
    StateVec {
        s: p.lambda - infection - p.mu * x.s,
        l: infection + (1.0 - p.k) * p.delta * x.t - (p.mu + p.epsilon) * x.l,
        i: p.epsilon * x.l + p.k * p.delta * x.t - (p.mu + u + p.alpha1) * x.i,
        t: u * x.i - (p.mu + p.delta + p.alpha2) * x.t,
    }
}

/// `μ·b1·b2·b3 − μ·δ·γ·((1−k)ε + k·b1)`
fn r0_denominator(p: &ModelParams) -> f64 {
    let DerivedRates { b1, b2, b3 } = p.derived_rates();
    p.mu * b1 * b2 * b3 - p.mu * p.delta * p.gamma * ((1.0 - p.k) * p.epsilon + p.k * b1)
}

/// Basic reproduction number `β·ε·b3·Λ / (μ·b1·b2·b3 − μ·δ·γ·((1−k)ε + k·b1))`.
pub fn r0(p: &ModelParams) -> Result<f64> {
    let den = r0_denominator(p);
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator(den));
    }
    let b3 = p.derived_rates().b3;
    Ok(p.beta * p.epsilon * b3 * p.lambda / den)
}

/// Positive steady state of the uncontrolled model (`u = γ`).
///
/// Eliminating `S`, `L` and `T` from the steady-state equations leaves
/// `βΛ/(βI*+μ) = μ·R0`, hence `I* = μ(R0 − 1)/β`; the rest follows by
/// back-substitution: `S* = Λ/(βI*+μ)`, `T* = γI*/b3`, `L* = (b2·I* − kδT*)/ε`.
pub fn endemic_equilibrium(p: &ModelParams) -> Result<StateVec> {
    let r0 = r0(p)?;
    if r0 <= 1.0 || p.beta <= 0.0 || p.epsilon <= 0.0 {
        return Err(Error::NoEndemicEquilibrium { r0 });
    }
    let DerivedRates { b2, b3, .. } = p.derived_rates();
    let i = p.mu * (r0 - 1.0) / p.beta;
    let s = p.lambda / (p.beta * i + p.mu);
    let t = p.gamma * i / b3;
    let l = (b2 * i - p.k * p.delta * t) / p.epsilon;
    Ok(StateVec { s, l, i, t })
}

/// Treatment rate applied per grid node (1/year), each value in `[0, u_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl ControlPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidState(format!("control values must be finite and >= 0, got {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid, u: f64) -> Result<Self> {
        Self::new(grid, vec![u; grid.len()])
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Treatment-rate input to [`simulate`].
#[derive(Debug, Clone, Copy)]
pub enum Treatment<'a> {
    Constant(f64),
    /// Node-aligned path on the simulation grid.
    Path(&'a ControlPath),
}

impl Treatment<'_> {
    #[inline]
    fn at(&self, node: usize) -> f64 {
        match self {
            Treatment::Constant(u) => *u,
            Treatment::Path(p) => p.values[node],
        }
    }
}

/// Model states on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<StateVec>,
}

impl Trajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn states(&self) -> &[StateVec] {
        &self.states
    }

    pub fn initial(&self) -> StateVec {
        self.states[0]
    }

    pub fn last(&self) -> StateVec {
        self.states[self.states.len() - 1]
    }

    pub fn infectious(&self) -> Vec<f64> {
        self.states.iter().map(|x| x.i).collect()
    }
}

/// Integrates the model with `D^α` from `x0` under the given treatment.
///
/// Path controls are sampled at nodes: the predictor and corrector evaluations
/// at `t_{n+1}` both use the control value of node `n + 1`.
pub fn simulate(
    params: &ModelParams,
    x0: StateVec,
    alpha: FracOrder,
    grid: TimeGrid,
    treatment: Treatment<'_>,
) -> Result<Trajectory> {
    if x0.to_array().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidState(format!("initial state must be nonnegative, got {x0:?}")));
    }
    match treatment {
        Treatment::Path(path) if path.grid != grid => return Err(Error::GridMismatch),
        Treatment::Constant(u) if !(u.is_finite() && u >= 0.0) => {
            return Err(Error::InvalidState(format!("treatment rate must be >= 0, got {u}")))
        }
        _ => {}
    }

    let field = FnField::new(4, |node, _t, x: &[f64], dx: &mut [f64]| {
        let d = tb_rhs(&StateVec::from_slice(x), params, treatment.at(node));
        dx.copy_from_slice(&d.to_array());
    });
    let sol = solve_caputo_ivp(&field, &x0.to_array(), alpha, grid)?;
    Ok(Trajectory { grid, states: sol.values().map(StateVec::from_slice).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(tf: f64, n: usize) -> TimeGrid {
        TimeGrid::new(tf, n).unwrap()
    }

    #[test]
    fn empty_population_only_recruits() {
        let p = ModelParams::baseline();
        let d = tb_rhs(&StateVec::default(), &p, 0.0);
        assert_eq!(d, StateVec::new(p.lambda, 0.0, 0.0, 0.0));
    }

    #[test]
    fn published_equilibrium_is_nearly_stationary() {
        let p = ModelParams::baseline();
        let d = tb_rhs(&StateVec::published_equilibrium(), &p, p.gamma);
        assert!(d.max_abs() < 1e-2, "{d:?}");
    }

    #[test]
    fn susceptible_derivative_by_hand() {
        let p = ModelParams::baseline();
        let d = tb_rhs(&StateVec::new(1000.0, 0.0, 10.0, 0.0), &p, 0.0);
        assert_relative_eq!(d.s, 792.8571 - 5.0 - 1000.0 / 70.0, max_relative = 1e-15);
        assert!((d.s - 773.5714).abs() < 1e-4);
    }

    #[test]
    fn r0_baseline() {
        let v = r0(&ModelParams::baseline()).unwrap();
        assert!((v - 7.1343).abs() < 1e-3, "{v}");
    }

    #[test]
    fn r0_linear_in_beta_and_lambda() {
        let p = ModelParams::baseline();
        let base = r0(&p).unwrap();
        assert_eq!(r0(&p.with(Param::Beta, 2.0 * p.beta)).unwrap(), 2.0 * base);
        assert_relative_eq!(r0(&p.with(Param::Lambda, 2.0 * p.lambda)).unwrap(), 2.0 * base, max_relative = 1e-15);
    }

    #[test]
    fn gamma_recovered_by_bisection() {
        // r0 is decreasing in gamma
        let base = ModelParams::baseline();
        let f = |g: f64| r0(&base.with(Param::Gamma, g)).unwrap() - 7.1343;
        let (mut lo, mut hi) = (1e-6, 5.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g = 0.5 * (lo + hi);
        assert!((g - 0.7).abs() < 1e-4, "{g}");
        let b3 = base.derived_rates().b3;
        let eq = StateVec::published_equilibrium();
        assert!((g * eq.i / b3 - eq.t).abs() < 1e-2);
    }

    #[test]
    fn degenerate_denominator() {
        let p = ModelParams { mu: 0.0, ..ModelParams::baseline() };
        assert!(matches!(r0(&p), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn equilibrium_matches_published_table() {
        let eq = endemic_equilibrium(&ModelParams::baseline()).unwrap();
        let want = StateVec::published_equilibrium();
        for (got, want) in eq.to_array().into_iter().zip(want.to_array()) {
            assert!(((got - want) / want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn equilibrium_residual() {
        let p = ModelParams::baseline();
        let eq = endemic_equilibrium(&p).unwrap();
        let res = tb_rhs(&eq, &p, p.gamma);
        assert!(res.max_abs() / eq.max_abs() < 1e-6, "{res:?}");
    }

    #[test]
    fn no_equilibrium_below_threshold() {
        let p = ModelParams { beta: 0.00005, ..ModelParams::baseline() };
        assert!(r0(&p).unwrap() < 1.0);
        assert!(matches!(endemic_equilibrium(&p), Err(Error::NoEndemicEquilibrium { .. })));
    }

    #[test]
    fn invariant_checks() {
        let ok = ModelParams::baseline();
        assert!(ok.validate().is_ok());
        let err = ModelParams { k: 1.5, ..ok }.validate().unwrap_err();
        assert!(err.to_string().contains("0 <= k <= 1"), "{err}");
        assert!(ModelParams { mu: 0.0, ..ok }.validate().is_err());
        assert!(ModelParams { lambda: 0.0, ..ok }.validate().is_err());
        assert!(ModelParams { delta: -1.0, ..ok }.validate().is_err());
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert_eq!("LAMBDA".parse::<Param>().unwrap(), Param::Lambda);
        assert!("rho".parse::<Param>().is_err());
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p = ModelParams::baseline();
        let eq = endemic_equilibrium(&p).unwrap();
        for a in [1.0, 0.9, 0.8] {
            let traj =
                simulate(&p, eq, FracOrder::new(a).unwrap(), grid(5.0, 500), Treatment::Constant(p.gamma)).unwrap();
            for x in traj.states() {
                for (v, e) in x.to_array().into_iter().zip(eq.to_array()) {
                    assert!(((v - e) / e).abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn removing_treatment_raises_infections() {
        let p = ModelParams::baseline();
        let eq = endemic_equilibrium(&p).unwrap();
        let traj = simulate(&p, eq, FracOrder::ONE, grid(5.0, 500), Treatment::Constant(0.0)).unwrap();
        let i = traj.infectious();
        assert!(i.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn total_population_bounded() {
        let p = ModelParams::baseline();
        let x0 = StateVec::new(30_000.0, 20_000.0, 500.0, 100.0);
        let traj = simulate(&p, x0, FracOrder::ONE, grid(20.0, 2000), Treatment::Constant(0.0)).unwrap();
        let bound = x0.total().max(p.lambda / p.mu);
        for x in traj.states() {
            assert!(x.total() <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn converges_to_equilibrium_from_perturbed_start() {
        let p = ModelParams::baseline();
        let eq = endemic_equilibrium(&p).unwrap();
        let x0 = StateVec::new(eq.s * 1.2, eq.l * 0.9, eq.i * 1.3, eq.t * 0.8);
        let traj = simulate(&p, x0, FracOrder::ONE, grid(500.0, 5000), Treatment::Constant(p.gamma)).unwrap();
        let end = traj.last();
        for (v, e) in end.to_array().into_iter().zip(eq.to_array()) {
            assert!(((v - e) / e).abs() < 1e-3, "{v} vs {e}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ModelParams::baseline();
        let g = grid(1.0, 10);
        let neg = StateVec::new(-1.0, 0.0, 0.0, 0.0);
        assert!(simulate(&p, neg, FracOrder::ONE, g, Treatment::Constant(0.0)).is_err());
        let other = ControlPath::constant(grid(2.0, 10), 0.1).unwrap();
        let eq = StateVec::published_equilibrium();
        assert!(matches!(simulate(&p, eq, FracOrder::ONE, g, Treatment::Path(&other)), Err(Error::GridMismatch)));
        assert!(ControlPath::new(g, vec![0.0; 5]).is_err());
        assert!(ControlPath::new(g, vec![-0.1; 11]).is_err());
    }
}
