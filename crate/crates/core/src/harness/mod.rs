//! Scenario runner, pass/fail gating and report output.
//!
//! [`run`] executes the checks that make sense for a scenario's family and
//! records every number a verdict depends on, so a stored [`Report`] can be
//! re-audited without re-running anything ([`Report::reaudit`]).

mod emit;
mod scenario;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use emit::{emit, render_csv, render_json, render_svg, Format, CSV_HEADER};
pub use scenario::{
    builtin, builtin_extras, builtin_names, builtin_suite, default_tolerances, linspace, Family, Resolutions, Scenario,
    DEFAULT_N_LIST, DEFAULT_TOLERANCES, SUITE_PARAMS,
};

use crate::error::Result;
use crate::extension::{fractional_heat_apply, neumann_trace, pde_residual, Direction, PoissonExtension, TraceOptions, TraceReport};
use crate::fields::{BoundaryField, ExtensionField, FundamentalSolution, GaussianBump, Rescaled, StaticBump, TimePowerSolution};
use crate::functionals::{eval_e_elliptic, functional_curve, CurveTolerances, FunctionalCurve};
use crate::kernels::{FracKernels, FracParams};
use crate::lift::{convergence_report, ConvergenceReport, LiftOptions};
use crate::quadrature::{build_rule, log_trapezoid, marchaud_apply, CompensatedSum, RuleKind};
use crate::special::ln_gamma;

/// How a check's value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value <= threshold`.
    AtMost,
    /// `value >= threshold`.
    AtLeast,
    /// `value > threshold`.
    Above,
}

impl Comparison {
    pub fn holds(&self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Above => value > threshold,
        }
    }
}

/// One named pass/fail criterion with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison,
            passed: comparison.holds(value, threshold),
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, threshold)
    }

    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Above => ">",
        };
        format!(
            "{} {}: {:e} {op} {:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

/// A check that was not run, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

/// Where and how a report was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub resolutions: Resolutions,
    pub wall_time_s: f64,
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub curve: Option<FunctionalCurve>,
    pub traces: Vec<TraceReport>,
    pub convergence: Option<ConvergenceReport>,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub provenance: Provenance,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Recompute every verdict from the stored values and thresholds; true
    /// when they all agree with the stored `passed` flags.
    pub fn reaudit(&self) -> bool {
        self.checks.iter().all(|c| c.comparison.holds(c.value, c.threshold) == c.passed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Trace options whose Dirichlet height makes the boundary-layer term
/// `x0^(2s)` of size `1e-3`: the gap `U(x0) - u` is of exact order
/// `x0^(2s)`, so a fixed height of `1e-3` cannot resolve `s < 1/2`.
fn trace_options(params: &FracParams) -> TraceOptions {
    TraceOptions {
        dirichlet_x0: 1e-3f64.powf(1f64.max(0.5 / params.s())),
        ..TraceOptions::default()
    }
}

fn middle(grid: &[f64]) -> f64 {
    if grid.is_empty() {
        1.0
    } else {
        grid[grid.len() / 2]
    }
}

/// Run a scenario. Tolerance failures are recorded in the report; only
/// configuration and domain errors abort.
pub fn run(scenario: &Scenario) -> Result<Report> {
    scenario.validate()?;
    let start = Instant::now();
    let mut out = Report {
        scenario: scenario.clone(),
        curve: None,
        traces: Vec::new(),
        convergence: None,
        checks: Vec::new(),
        skipped: Vec::new(),
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            resolutions: scenario.resolutions,
            wall_time_s: 0.0,
        },
    };
    match scenario.family {
        Family::SelfSimilar => run_solution(scenario, 0.0, &mut out)?,
        Family::Shifted { c } => run_solution(scenario, c, &mut out)?,
        Family::GaussianBump { amplitude, width } => run_bump(scenario, amplitude, width, &mut out)?,
        Family::FundamentalSolution { reversal_time } => run_fundamental(scenario, reversal_time, &mut out)?,
    }
    out.provenance.wall_time_s = start.elapsed().as_secs_f64();
    Ok(out)
}

fn skip_monotonicity(out: &mut Report, reason: &str) {
    for name in ["monotone", "derivative", "d_nonnegative"] {
        out.skipped.push(Skipped {
            name: name.to_string(),
            reason: reason.to_string(),
        });
    }
}

fn run_solution(sc: &Scenario, c: f64, out: &mut Report) -> Result<()> {
    let params = sc.params;
    let d = params.d();
    let res = sc.resolutions;
    let sol = TimePowerSolution::exact(params, c)?;
    let ext = sol.extension();

    // (-d/dt)^s u = u^p at the ends and the middle of the time grid.
    let probe_times: Vec<f64> = match sc.t_grid.as_slice() {
        [] => vec![1.0],
        g => vec![g[0], middle(g), g[g.len() - 1]],
    };
    let mut worst = 0.0f64;
    for &t in &probe_times {
        let lhs = marchaud_apply(|tt| sol.at(tt), t, params.s(), res.operators)?.value;
        worst = worst.max(rel(lhs, sol.at(t)?.powf(params.p())));
    }
    out.checks.push(Check::at_most("exact_residual", worst, sc.tol("exact_residual")));

    let t_mid = middle(&sc.t_grid);
    let x = vec![0.0; d];
    let tr = neumann_trace(&ext, Some(&sol), &x, t_mid, &params, trace_options(&params))?;
    out.checks
        .push(Check::at_most("dirichlet_gap", tr.dirichlet_gap.unwrap_or(f64::NAN), sc.tol("dirichlet_gap")));
    out.checks.push(Check::at_most(
        "neumann_rel",
        rel(tr.neumann_value, tr.neumann_target.unwrap_or(f64::NAN)),
        sc.tol("neumann_rel"),
    ));
    out.traces.push(tr);

    if !sc.t_grid.is_empty() {
        let tol = CurveTolerances {
            monotone_rel: sc.tol("monotone"),
            derivative_rel: sc.tol("derivative"),
        };
        let curve = functional_curve(&sol, &ext, &params, &sc.t_grid, res.functionals, sc.fd_h, tol)?;
        let v = curve.verdicts;
        let max_j = curve.samples.iter().map(|s| s.j.abs()).fold(0.0, f64::max);
        let max_d = curve.samples.iter().map(|s| s.d.abs()).fold(0.0, f64::max);
        out.checks
            .push(Check::at_most("monotone", v.max_violation / max_j.max(f64::MIN_POSITIVE), tol.monotone_rel));
        out.checks.push(Check::at_most("derivative", v.max_derivative_gap, tol.derivative_rel));
        let neg = curve.samples.iter().map(|s| -(s.d + s.quadrature_error)).fold(0.0, f64::max);
        out.checks.push(Check::at_most("d_nonnegative", neg, 0.0));
        if c == 0.0 {
            let j_ref = curve.samples[curve.samples.len() / 2].j;
            let spread = curve.samples.iter().map(|s| rel(s.j, j_ref)).fold(0.0, f64::max);
            out.checks.push(Check::at_most("j_constant", spread, sc.tol("j_constant")));
            out.checks
                .push(Check::at_most("d_zero", max_d / v.scale.max(f64::MIN_POSITIVE), sc.tol("d_zero")));
        } else {
            let min_d = curve.samples.iter().map(|s| s.d).fold(f64::INFINITY, f64::min);
            out.checks.push(Check::new("d_positive", min_d, Comparison::Above, 0.0));
        }
        out.curve = Some(curve);
    }

    if !sc.n_list.is_empty() && !sc.r_grid.is_empty() {
        let opts = LiftOptions {
            res: res.lift,
            eps: sc.lift_eps,
        };
        let table = convergence_report(&sol, &ext, &params, &sc.r_grid, &sc.n_list, opts)?;
        let count = |f: &dyn Fn(&crate::lift::GapTrend) -> bool| table.trends.iter().filter(|t| !f(t)).count() as f64;
        out.checks
            .push(Check::at_most("lift_energy_gap_increases", count(&|t| t.energy_gap_decreasing), 0.0));
        out.checks.push(Check::at_most("lift_a_gap_increases", count(&|t| t.a_gap_decreasing), 0.0));
        if table.b_decay.is_empty() {
            out.skipped.push(Skipped {
                name: "b_decay_exponent".into(),
                reason: "needs at least two values of n".into(),
            });
        } else {
            let q = table.b_decay.iter().map(|f| f.exponent).fold(f64::INFINITY, f64::min);
            out.checks
                .push(Check::new("b_decay_exponent", q, Comparison::AtLeast, sc.tol("b_decay_exponent")));
        }
        let worst = table.rows.iter().map(|r| r.theorem_residual).fold(0.0, f64::max);
        out.checks.push(Check::at_most("lift_theorem", worst, sc.tol("lift_theorem")));
        out.convergence = Some(table);
    }
    Ok(())
}

/// Boundary data that only knows its pointwise values, so heat averages go
/// through the generic Gauss-Hermite path.
struct PointwiseOnly<'a, B: ?Sized>(&'a B);

impl<B: BoundaryField + ?Sized> BoundaryField for PointwiseOnly<'_, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        self.0.value(x, t)
    }
}

fn run_bump(sc: &Scenario, amplitude: f64, width: f64, out: &mut Report) -> Result<()> {
    let params = sc.params;
    let d = params.d();
    let res = sc.resolutions;
    let u = GaussianBump::new(amplitude, vec![0.0; d], width)?;
    let ext = PoissonExtension {
        boundary: u.clone(),
        params,
        res: res.operators,
    };
    let t = middle(&sc.t_grid);
    let x = vec![0.3; d];

    let closed = u.heat_average(&x, t, 0.7, res.operators)?;
    let numeric = PointwiseOnly(&u).heat_average(&x, t, 0.7, res.operators)?;
    out.checks.push(Check::at_most("heat_average", rel(numeric, closed), sc.tol("heat_average")));

    let tr = neumann_trace(&ext, Some(&u), &x, t, &params, trace_options(&params))?;
    out.checks
        .push(Check::at_most("dirichlet_gap", tr.dirichlet_gap.unwrap_or(f64::NAN), sc.tol("dirichlet_gap")));
    let eta = FracKernels::new(params)?.constants().eta_s;
    let target = -eta * fractional_heat_apply(&u, &x, t, Direction::Backward, &params, res.operators)?;
    out.checks
        .push(Check::at_most("neumann_rel", rel(tr.neumann_value, target), sc.tol("neumann_rel")));
    out.traces.push(tr);

    // Scale invariance of the elliptic energy: E(V; R) = E(W; 1) for
    // W = R^gamma V(R .).
    let radius = 1.3;
    let v = StaticBump::new(amplitude, vec![0.0; d + 1], width)?;
    let w = Rescaled {
        inner: v.clone(),
        radius,
        exponent: params.gamma_exponent(),
    };
    let ev = eval_e_elliptic(&v, radius, &params, res.functionals)?.total;
    let ew = eval_e_elliptic(&w, 1.0, &params, res.functionals)?.total;
    out.checks.push(Check::at_most("scaling", rel(ew, ev), sc.tol("scaling")));

    skip_monotonicity(out, "not a solution");
    Ok(())
}

fn run_fundamental(sc: &Scenario, reversal_time: f64, out: &mut Report) -> Result<()> {
    let params = sc.params;
    let d = params.d();
    let field = FundamentalSolution::reversed(FracKernels::new(params)?, reversal_time);
    let t = middle(&sc.t_grid);
    let x = vec![0.3; d];
    let tr = neumann_trace(&field, None, &x, t, &params, TraceOptions::default())?;
    out.checks
        .push(Check::at_most("neumann_zero", tr.neumann_value.abs(), sc.tol("neumann_zero")));
    out.traces.push(tr);

    let mut worst = 0.0f64;
    for &(x0, xi) in &[(0.2, 0.0), (0.5, 0.4), (1.0, -0.7), (1.7, 1.2)] {
        let xs = vec![xi; d];
        let r = pde_residual(&field, x0, &xs, t, &params, None)?;
        let size = field.jet(x0, &xs, t)?.dt.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(r.abs() / size);
    }
    out.checks.push(Check::at_most("pde_residual", worst, sc.tol("pde_residual")));
    skip_monotonicity(out, "not a solution of the semilinear problem");
    Ok(())
}

/// `pi^(N/2) / Gamma(N/2)`-style sphere area `|S^(N-1)|`.
fn sphere_area(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok((std::f64::consts::LN_2 + 0.5 * nf * std::f64::consts::PI.ln() - ln_gamma(0.5 * nf)?).exp())
}

/// Normalisation checks of the kernels: the elliptic Poisson kernel
/// integrates to one over `R^N`, the parabolic Poisson marginal is a
/// probability density in `tau` and matches the spatial integral of the
/// kernel, `K_s` has spatial mass `tau^(-1-s)/|Gamma(-s)|`, and
/// `eta_(1/2) = kappa_(1/2) = 1`.
pub fn kernel_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for s in [0.25, 0.5, 0.75] {
        for big_n in [1usize, 2] {
            let params = FracParams::new(s, 2.0, big_n)?;
            let k = FracKernels::new(params)?;
            // int_{R^N} P(z0, z) dz = |S^(N-1)| int_0^(pi/2) sin^(N-1)(th) cos^(2s-1)(th) dth
            // up to the kernel constant; with phi = pi/2 - th = (pi/2) x the
            // cos factor becomes the Jacobi weight x^(2s-1).
            let mu = 2.0 * s - 1.0;
            let rule = build_rule(RuleKind::JacobiSingular { mu }, 48)?;
            let z0 = 0.7;
            let area = sphere_area(big_n)?;
            let mut acc = CompensatedSum::new();
            for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
                let phi = 0.5 * std::f64::consts::PI * xi;
                let r = z0 / phi.tan();
                let mut z = vec![0.0; big_n];
                z[0] = r;
                let integrand = area * r.powi(big_n as i32 - 1) * k.poisson_elliptic(z0, &z)? * z0 / phi.sin().powi(2);
                acc.add(wi * integrand * xi.powf(-mu) * 0.5 * std::f64::consts::PI);
            }
            checks.push(Check::at_most(
                format!("elliptic_poisson_mass_N{big_n}_s{s}"),
                (acc.value() - 1.0).abs(),
                1e-8,
            ));
        }
        let params = FracParams::new(s, 2.0, 1)?;
        let k = FracKernels::new(params)?;
        let x0: f64 = 0.8;
        let v_mid = (0.25 * x0 * x0).ln();
        let mut acc = CompensatedSum::new();
        for node in log_trapezoid(v_mid - 6.0, v_mid + 60.0 / s, 1.0 / 16.0) {
            acc.add(node.weight * k.poisson_marginal(x0, node.x)?);
        }
        checks.push(Check::at_most(format!("parabolic_poisson_mass_s{s}"), (acc.value() - 1.0).abs(), 1e-6));

        let tau = 0.6;
        let marginal = k.poisson_marginal(x0, tau)?;
        let spatial = hermite_mass(1, tau, |z| k.poisson_parabolic(x0, z, tau))?;
        checks.push(Check::at_most(format!("parabolic_poisson_marginal_s{s}"), rel(spatial, marginal), 1e-6));

        for d in [1usize, 2] {
            let k = FracKernels::new(FracParams::new(s, 2.0, d)?)?;
            let tau = 0.7;
            let mass = hermite_mass(d, tau, |z| k.ks(z, tau))?;
            let exact = tau.powf(-1.0 - s) / k.abs_gamma_neg_s();
            checks.push(Check::at_most(format!("ks_mass_d{d}_s{s}"), rel(mass, exact), 1e-8));
        }
    }
    let c = FracKernels::new(FracParams::new(0.5, 2.0, 1)?)?.constants();
    checks.push(Check::at_most("eta_half", (c.eta_s - 1.0).abs(), 1e-12));
    checks.push(Check::at_most("kappa_half", (c.kappa_s - 1.0).abs(), 1e-12));
    Ok(checks)
}

/// `int_{R^d} f(z) dz` for `f` carrying a Gaussian factor `e^(-|z|^2/4tau)`.
fn hermite_mass(d: usize, tau: f64, f: impl Fn(&[f64]) -> Result<f64>) -> Result<f64> {
    let rule = build_rule(RuleKind::Hermite, 48)?;
    let scale = 2.0 * tau.sqrt();
    let n = rule.len();
    let mut acc = CompensatedSum::new();
    let mut z = vec![0.0; d];
    for idx in 0..n.pow(d as u32) {
        let mut rem = idx;
        let mut w = 1.0;
        let mut y2 = 0.0;
        for zk in z.iter_mut() {
            let i = rem % n;
            rem /= n;
            *zk = scale * rule.nodes[i];
            y2 += rule.nodes[i] * rule.nodes[i];
            w *= rule.weights[i] * scale;
        }
        acc.add(w * y2.exp() * f(&z)?);
    }
    Ok(acc.value())
}
