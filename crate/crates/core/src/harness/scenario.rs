//! Scenarios: what to run, on which grids, with which tolerances.
//!
//! Config files are flat `key = value` text. `#` starts a comment, blank
//! lines are ignored, lists are comma separated and tolerances are written
//! `tol.<name> = <value>`:
//!
//! ```text
//! name = shifted_s0.5_p2
//! family = shifted
//! s = 0.5
//! p = 2
//! d = 1
//! shift = 1
//! t_grid = 0.5, 0.6, 0.7
//! tol.monotone = 1e-8
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::FracParams;

/// Which exact or test field a scenario is built on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `u = A t^-beta` with the exact amplitude.
    SelfSimilar,
    /// `u = A (t + c)^-beta`, an exact solution that is not self-similar.
    Shifted { c: f64 },
    /// Time-independent Gaussian data; not a solution, linear checks only.
    GaussianBump { amplitude: f64, width: f64 },
    /// The fundamental solution of the extension equation, reversed at
    /// `reversal_time`; not a solution of the semilinear problem.
    FundamentalSolution { reversal_time: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SelfSimilar => "self_similar",
            Family::Shifted { .. } => "shifted",
            Family::GaussianBump { .. } => "gaussian_bump",
            Family::FundamentalSolution { .. } => "fundamental_solution",
        }
    }

    /// Whether the family solves the semilinear problem (and so the
    /// monotonicity checks apply).
    pub fn is_solution(&self) -> bool {
        matches!(self, Family::SelfSimilar | Family::Shifted { .. })
    }
}

/// Quadrature resolutions, per module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolutions {
    /// `J`, `D` and the scaling-identity energies.
    pub functionals: usize,
    /// The reduced lift integrals.
    pub lift: usize,
    /// Singular integrals of the fractional operators and the extensions.
    pub operators: usize,
}

impl Default for Resolutions {
    fn default() -> Self {
        Self {
            functionals: 64,
            lift: 64,
            operators: 64,
        }
    }
}

impl Resolutions {
    pub fn uniform(res: usize) -> Self {
        Self {
            functionals: res,
            lift: res,
            operators: res,
        }
    }
}

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("exact_residual", 1e-6),
    ("dirichlet_gap", 1e-3),
    ("neumann_rel", 1e-3),
    ("neumann_zero", 1e-6),
    ("pde_residual", 1e-8),
    ("heat_average", 1e-10),
    ("scaling", 1e-8),
    ("j_constant", 1e-5),
    ("d_zero", 1e-8),
    ("monotone", 1e-8),
    ("derivative", 1e-3),
    ("lift_theorem", 1e-3),
    ("b_decay_exponent", 0.9),
];

pub fn default_tolerances() -> BTreeMap<String, f64> {
    DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: FracParams,
    pub family: Family,
    pub t_grid: Vec<f64>,
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub resolutions: Resolutions,
    /// Step of the finite-difference `dJ/dt`.
    pub fd_h: f64,
    /// Split of the radial concentration integrals.
    pub lift_eps: f64,
    pub tolerances: BTreeMap<String, f64>,
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub const DEFAULT_N_LIST: [usize; 6] = [8, 16, 32, 64, 128, 256];

impl Scenario {
    /// A scenario with the default grids and tolerances.
    pub fn new(name: impl Into<String>, params: FracParams, family: Family) -> Result<Self> {
        let sc = Self {
            name: name.into(),
            params,
            family,
            t_grid: linspace(0.5, 1.5, 11),
            r_grid: vec![1.0, 1.4],
            n_list: DEFAULT_N_LIST.to_vec(),
            resolutions: Resolutions::default(),
            fd_h: 1e-3,
            lift_eps: 0.5,
            tolerances: default_tolerances(),
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .expect("tolerance names are compile-time constants")
        })
    }

    /// Set a tolerance; unknown names and non-positive values are rejected.
    pub fn set_tol(&mut self, name: &str, value: f64) -> Result<()> {
        if !DEFAULT_TOLERANCES.iter().any(|(k, _)| *k == name) {
            return Err(Error::config(format!("tol.{name}"), "unknown tolerance"));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::config(format!("tol.{name}"), format!("{value} must be finite and > 0")));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if self.t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("t_grid", "must be strictly increasing"));
        }
        if self.t_grid.first().is_some_and(|t| !(*t > 0.0)) {
            return Err(Error::config("t_grid", "min(t_grid) must be > 0"));
        }
        if self.r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::config("R_grid", "radii must be finite and > 0"));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) || self.n_list.first().is_some_and(|n| *n < 2) {
            return Err(Error::config("n_list", "must be strictly increasing with n >= 2"));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::config(format!("tol.{k}"), format!("{v} must be finite and > 0")));
        }
        if !(self.fd_h > 0.0) {
            return Err(Error::config("fd_h", "must be > 0"));
        }
        if !(self.lift_eps > 0.0 && self.lift_eps < 1.0) {
            return Err(Error::config("lift_eps", "must lie in (0, 1)"));
        }
        let t_min = self.t_grid.first().copied().unwrap_or(1.0);
        if t_min - 2.0 * self.fd_h <= 0.0 && self.family.is_solution() {
            return Err(Error::config("fd_h", "t_grid[0] - 2 fd_h must be > 0"));
        }
        match self.family {
            Family::Shifted { c } if !(c > 0.0 && c.is_finite()) => Err(Error::config("shift", "must be finite and > 0")),
            Family::GaussianBump { width, .. } if !(width > 0.0) => Err(Error::config("width", "must be > 0")),
            Family::FundamentalSolution { reversal_time } => {
                let t_max = self.t_grid.last().copied().unwrap_or(1.0);
                if reversal_time > t_max {
                    Ok(())
                } else {
                    Err(Error::config("reversal_time", "must exceed max(t_grid)"))
                }
            }
            _ => Ok(()),
        }
    }

    /// Parse the flat config format (see the module docs).
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")))?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::config(k, "given twice"));
            }
        }
        let take = |kv: &mut BTreeMap<String, String>, k: &str| kv.remove(k);
        let real = |k: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::config(k, format!("`{v}` is not a number")))
        };
        let int = |k: &str, v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::config(k, format!("`{v}` is not a non-negative integer")))
        };
        let list = |v: &str| -> Vec<String> {
            v.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
        };
        let need = |kv: &mut BTreeMap<String, String>, k: &str| -> Result<String> {
            take(kv, k).ok_or_else(|| Error::config(k, "missing"))
        };

        let name = need(&mut kv, "name")?;
        let s = real("s", &need(&mut kv, "s")?)?;
        let p = real("p", &need(&mut kv, "p")?)?;
        let d = match take(&mut kv, "d") {
            Some(v) => int("d", &v)?,
            None => 1,
        };
        let params = FracParams::new(s, p, d).map_err(|e| Error::config("s/p/d", e.to_string()))?;
        let family_name = need(&mut kv, "family")?;
        let real_or = |kv: &mut BTreeMap<String, String>, k: &str, dflt: f64| -> Result<f64> {
            match take(kv, k) {
                Some(v) => real(k, &v),
                None => Ok(dflt),
            }
        };
        let family = match family_name.as_str() {
            "self_similar" => Family::SelfSimilar,
            "shifted" => Family::Shifted {
                c: real_or(&mut kv, "shift", 1.0)?,
            },
            "gaussian_bump" => Family::GaussianBump {
                amplitude: real_or(&mut kv, "amplitude", 1.0)?,
                width: real_or(&mut kv, "width", 1.0)?,
            },
            "fundamental_solution" => Family::FundamentalSolution {
                reversal_time: real_or(&mut kv, "reversal_time", 2.5)?,
            },
            other => {
                return Err(Error::config(
                    "family",
                    format!("unknown family `{other}` (self_similar, shifted, gaussian_bump, fundamental_solution)"),
                ))
            }
        };
        let mut sc = Scenario {
            name,
            params,
            family,
            t_grid: linspace(0.5, 1.5, 11),
            r_grid: vec![1.0, 1.4],
            n_list: DEFAULT_N_LIST.to_vec(),
            resolutions: Resolutions::default(),
            fd_h: 1e-3,
            lift_eps: 0.5,
            tolerances: default_tolerances(),
        };
        if let Some(v) = take(&mut kv, "t_grid") {
            sc.t_grid = list(&v).iter().map(|x| real("t_grid", x)).collect::<Result<_>>()?;
        }
        if let Some(v) = take(&mut kv, "R_grid") {
            sc.r_grid = list(&v).iter().map(|x| real("R_grid", x)).collect::<Result<_>>()?;
        }
        if let Some(v) = take(&mut kv, "n_list") {
            sc.n_list = list(&v).iter().map(|x| int("n_list", x)).collect::<Result<_>>()?;
        }
        if let Some(v) = take(&mut kv, "res") {
            sc.resolutions = Resolutions::uniform(int("res", &v)?);
        }
        for (k, slot) in [
            ("res.functionals", &mut sc.resolutions.functionals),
            ("res.lift", &mut sc.resolutions.lift),
            ("res.operators", &mut sc.resolutions.operators),
        ] {
            if let Some(v) = take(&mut kv, k) {
                *slot = int(k, &v)?;
            }
        }
        sc.fd_h = real_or(&mut kv, "fd_h", sc.fd_h)?;
        sc.lift_eps = real_or(&mut kv, "lift_eps", sc.lift_eps)?;
        let tol_keys: Vec<String> = kv.keys().filter(|k| k.starts_with("tol.")).cloned().collect();
        for k in tol_keys {
            let v = take(&mut kv, &k).expect("key listed above");
            sc.set_tol(&k["tol.".len()..], real(&k, &v)?)?;
        }
        if let Some(k) = kv.keys().next() {
            return Err(Error::config(k.clone(), "unknown key"));
        }
        sc.validate()?;
        Ok(sc)
    }

    /// Render as config text; `Scenario::parse(&sc.to_config())` reproduces
    /// `sc` exactly.
    pub fn to_config(&self) -> String {
        let join_f = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "family = {}", self.family.name());
        let _ = writeln!(out, "s = {:?}", self.params.s());
        let _ = writeln!(out, "p = {:?}", self.params.p());
        let _ = writeln!(out, "d = {}", self.params.d());
        match self.family {
            Family::SelfSimilar => {}
            Family::Shifted { c } => {
                let _ = writeln!(out, "shift = {c:?}");
            }
            Family::GaussianBump { amplitude, width } => {
                let _ = writeln!(out, "amplitude = {amplitude:?}");
                let _ = writeln!(out, "width = {width:?}");
            }
            Family::FundamentalSolution { reversal_time } => {
                let _ = writeln!(out, "reversal_time = {reversal_time:?}");
            }
        }
        let _ = writeln!(out, "t_grid = {}", join_f(&self.t_grid));
        let _ = writeln!(out, "R_grid = {}", join_f(&self.r_grid));
        let ns: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "n_list = {}", ns.join(", "));
        let _ = writeln!(out, "res.functionals = {}", self.resolutions.functionals);
        let _ = writeln!(out, "res.lift = {}", self.resolutions.lift);
        let _ = writeln!(out, "res.operators = {}", self.resolutions.operators);
        let _ = writeln!(out, "fd_h = {:?}", self.fd_h);
        let _ = writeln!(out, "lift_eps = {:?}", self.lift_eps);
        for (k, v) in &self.tolerances {
            let _ = writeln!(out, "tol.{k} = {v:?}");
        }
        out
    }
}

/// The `(s, p)` pairs of the default suite.
pub const SUITE_PARAMS: [(f64, f64); 3] = [(0.5, 2.0), (0.25, 3.0), (0.75, 2.0)];

fn suite_name(family: &str, s: f64, p: f64, d: usize) -> String {
    if d == 1 {
        format!("{family}_s{s}_p{p}")
    } else {
        format!("{family}_s{s}_p{p}_d{d}")
    }
}

/// The default scenario suite: `{self_similar, shifted (c = 1)}` for every
/// pair in [`SUITE_PARAMS`] in one dimension, plus a two-dimensional smoke
/// case. Only `shifted_s0.5_p2` carries a lift table.
pub fn builtin_suite() -> Vec<Scenario> {
    let mut out = Vec::new();
    for (s, p) in SUITE_PARAMS {
        let params = FracParams::new(s, p, 1).expect("suite parameters are valid");
        for family in [Family::SelfSimilar, Family::Shifted { c: 1.0 }] {
            let mut sc = Scenario::new(suite_name(family.name(), s, p, 1), params, family).expect("suite scenarios are valid");
            if !(family != Family::SelfSimilar && s == 0.5) {
                sc.n_list.clear();
                sc.r_grid.clear();
            }
            out.push(sc);
        }
    }
    let params = FracParams::new(0.5, 2.0, 2).expect("suite parameters are valid");
    let mut smoke = Scenario::new(suite_name("shifted", 0.5, 2.0, 2), params, Family::Shifted { c: 1.0 }).expect("valid");
    smoke.t_grid = linspace(0.5, 1.5, 5);
    smoke.n_list.clear();
    smoke.r_grid.clear();
    out.push(smoke);
    out
}

/// Extra named scenarios outside the default suite.
pub fn builtin_extras() -> Vec<Scenario> {
    let p1 = FracParams::new(0.5, 2.0, 1).expect("valid");
    let mut bump = Scenario::new(
        "gaussian_bump_s0.5",
        p1,
        Family::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        },
    )
    .expect("valid");
    bump.n_list.clear();
    bump.r_grid.clear();
    let mut fundamental = Scenario::new("fundamental_solution_s0.5", p1, Family::FundamentalSolution { reversal_time: 2.5 }).expect("valid");
    fundamental.n_list.clear();
    fundamental.r_grid.clear();
    vec![bump, fundamental]
}

/// Look up a builtin scenario by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_suite().into_iter().chain(builtin_extras()).find(|sc| sc.name == name)
}

/// Names of all builtin scenarios.
pub fn builtin_names() -> Vec<String> {
    builtin_suite().into_iter().chain(builtin_extras()).map(|sc| sc.name).collect()
}
