//! Scenario files: flat `key = value` text with `#` comments.
//!
//! Recognized keys (case-insensitive): the model parameters `Lambda`, `beta`,
//! `mu`, `k`, `delta`, `epsilon`, `gamma`, `alpha1`, `alpha2`; the initial
//! state `x0` (`S,L,I,T` or `equilibrium`); and `alpha`, `tf`, `steps`, `B`,
//! `rho`, `u_max`, `C`, `theta`, `tol`, `max_iter`, `out`. Absent keys take the
//! published baseline values.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fractb::{endemic_equilibrium, FocpConfig, FracOrder, ModelParams, Param, StateVec, TimeGrid};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub x0: StateVec,
    /// Order, grid and sweep settings.
    pub focp: FocpConfig,
    pub out: PathBuf,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            params: ModelParams::baseline(),
            x0: StateVec::published_equilibrium(),
            focp: FocpConfig::baseline(FracOrder::ONE),
            out: PathBuf::from("."),
        }
    }
}

impl Scenario {
    pub fn alpha(&self) -> FracOrder {
        self.focp.alpha
    }

    pub fn grid(&self) -> TimeGrid {
        self.focp.grid
    }

    /// Every key with its resolved value; loading the text gives back `self`.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        for p in PARAM_ORDER {
            writeln!(s, "{} = {}", p.name(), self.params.get(p)).unwrap();
        }
        let x = self.x0;
        let f = &self.focp;
        writeln!(s, "x0 = {},{},{},{}", x.s, x.l, x.i, x.t).unwrap();
        writeln!(s, "alpha = {}", f.alpha.value()).unwrap();
        writeln!(s, "tf = {}", f.grid.tf()).unwrap();
        writeln!(s, "steps = {}", f.grid.n_steps()).unwrap();
        writeln!(s, "B = {}", f.b).unwrap();
        writeln!(s, "rho = {}", f.rho).unwrap();
        writeln!(s, "u_max = {}", f.u_max).unwrap();
        writeln!(s, "C = {}", f.c).unwrap();
        writeln!(s, "theta = {}", f.theta).unwrap();
        writeln!(s, "tol = {}", f.tol).unwrap();
        writeln!(s, "max_iter = {}", f.max_iter).unwrap();
        writeln!(s, "out = {}", self.out.display()).unwrap();
        s
    }
}

const PARAM_ORDER: [Param; 9] = [
    Param::Lambda,
    Param::Beta,
    Param::Mu,
    Param::K,
    Param::Delta,
    Param::Epsilon,
    Param::Gamma,
    Param::Alpha1,
    Param::Alpha2,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Param(Param),
    X0,
    Alpha,
    Tf,
    Steps,
    B,
    Rho,
    UMax,
    C,
    Theta,
    Tol,
    MaxIter,
    Out,
}

impl Key {
    fn lookup(name: &str) -> Option<Key> {
        if let Ok(p) = Param::from_str(name) {
            return Some(Key::Param(p));
        }
        let key = match name.to_ascii_lowercase().as_str() {
            "x0" => Key::X0,
            "alpha" => Key::Alpha,
            "tf" => Key::Tf,
            "steps" => Key::Steps,
            "b" => Key::B,
            "rho" => Key::Rho,
            "u_max" => Key::UMax,
            "c" => Key::C,
            "theta" => Key::Theta,
            "tol" => Key::Tol,
            "max_iter" => Key::MaxIter,
            "out" => Key::Out,
            _ => return None,
        };
        Some(key)
    }
}

/// Unresolved scenario: grid and order are kept raw until every override is in.
struct Builder {
    params: ModelParams,
    /// `None` is the `equilibrium` sentinel.
    x0: Option<StateVec>,
    alpha: f64,
    tf: f64,
    steps: usize,
    focp: FocpConfig,
    out: PathBuf,
}

impl Builder {
    fn new() -> Self {
        let d = Scenario::default();
        Self {
            params: d.params,
            x0: Some(d.x0),
            alpha: d.focp.alpha.value(),
            tf: d.focp.grid.tf(),
            steps: d.focp.grid.n_steps(),
            focp: d.focp,
            out: d.out,
        }
    }

    fn apply(&mut self, key: Key, value: &str) -> Result<(), String> {
        let num = || value.parse::<f64>().map_err(|_| format!("expected a number, got `{value}`"));
        let count = || value.parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{value}`"));
        match key {
            Key::Param(p) => self.params.set(p, num()?),
            Key::X0 => self.x0 = parse_x0(value)?,
            Key::Alpha => self.alpha = num()?,
            Key::Tf => self.tf = num()?,
            Key::Steps => self.steps = count()?,
            Key::B => self.focp.b = num()?,
            Key::Rho => self.focp.rho = num()?,
            Key::UMax => self.focp.u_max = num()?,
            Key::C => self.focp.c = num()?,
            Key::Theta => self.focp.theta = num()?,
            Key::Tol => self.focp.tol = num()?,
            Key::MaxIter => self.focp.max_iter = count()?,
            Key::Out => {
                if value.is_empty() {
                    return Err("out must not be empty".into());
                }
                self.out = PathBuf::from(value)
            }
        }
        Ok(())
    }

    fn resolve(self) -> CliResult<Scenario> {
        let invariant = |e: fractb::Error| CliError::InvariantViolation(strip_prefix(e));
        self.params.validate().map_err(invariant)?;
        let alpha = FracOrder::new(self.alpha).map_err(invariant)?;
        let grid = TimeGrid::new(self.tf, self.steps).map_err(invariant)?;
        let focp = FocpConfig { alpha, grid, ..self.focp };
        focp.validate().map_err(invariant)?;
        let x0 = match self.x0 {
            Some(x) => x,
            None => endemic_equilibrium(&self.params).map_err(invariant)?,
        };
        if !x0.to_array().iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(CliError::InvariantViolation(format!("x0 must be finite and non-negative, got {x0:?}")));
        }
        Ok(Scenario { params: self.params, x0, focp, out: self.out })
    }
}

fn strip_prefix(e: fractb::Error) -> String {
    match e {
        fractb::Error::InvalidParams(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_x0(value: &str) -> Result<Option<StateVec>, String> {
    if value.eq_ignore_ascii_case("equilibrium") {
        return Ok(None);
    }
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("x0 must be `equilibrium` or four numbers S,L,I,T, got `{value}`"))?;
    if parts.len() != 4 {
        return Err(format!("x0 needs four components S,L,I,T, got {}", parts.len()));
    }
    Ok(Some(StateVec::from_slice(&parts)))
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> CliResult<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_owned(), v.trim().to_owned())),
        _ => Err(CliError::BadOverride(s.to_owned())),
    }
}

/// Parses scenario text, then applies `overrides` in order (later wins).
pub fn parse_scenario(text: &str, overrides: &[(String, String)]) -> CliResult<Scenario> {
    let mut builder = Builder::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(CliError::Parse { line, msg: format!("expected `key = value`, got `{content}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        let key = Key::lookup(k).ok_or_else(|| CliError::UnknownKey { key: k.to_owned(), line: Some(line) })?;
        if !seen.insert(key) {
            return Err(CliError::Parse { line, msg: format!("duplicate key `{k}`") });
        }
        builder.apply(key, v).map_err(|msg| CliError::Parse { line, msg: format!("{k}: {msg}") })?;
    }
    for (k, v) in overrides {
        let key = Key::lookup(k).ok_or_else(|| CliError::UnknownKey { key: k.clone(), line: None })?;
        builder.apply(key, v).map_err(|msg| CliError::BadValue { key: k.clone(), msg })?;
    }
    builder.resolve()
}

/// Reads `path` (or starts from the baseline when `None`) and applies `overrides`.
pub fn load_scenario(path: Option<&Path>, overrides: &[(String, String)]) -> CliResult<Scenario> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(CliError::io(p))?,
        None => String::new(),
    };
    parse_scenario(&text, overrides)
}
