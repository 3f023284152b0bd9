use std::process::Command;

use fracmono::harness::{
    builtin, builtin_names, builtin_suite, emit, linspace, render_csv, render_json, render_svg, run, Check, Comparison,
    Family, Format, Report, Scenario, CSV_HEADER,
};
use fracmono::{Error, FracParams};
use proptest::prelude::*;

fn quick(name: &str, family: Family, t_grid: Vec<f64>) -> Scenario {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let mut sc = Scenario::new(name, params, family).unwrap();
    sc.t_grid = t_grid;
    sc.n_list.clear();
    sc.r_grid.clear();
    sc
}

fn config_key(err: Error) -> String {
    match err {
        Error::Config { key, .. } => key,
        other => panic!("expected a configuration error, got {other}"),
    }
}

const SAMPLE_CONFIG: &str = "\
# shifted solution on a short grid
name = demo
family = shifted
s = 0.25
p = 3
d = 1
shift = 0.5        # c
t_grid = 0.5, 0.75, 1.0
R_grid = 1.0
n_list = 8, 16
res = 32
res.lift = 48
tol.monotone = 1e-9
";

#[test]
fn config_parses_every_documented_key() {
    let sc = Scenario::parse(SAMPLE_CONFIG).unwrap();
    assert_eq!(sc.name, "demo");
    assert_eq!(sc.family, Family::Shifted { c: 0.5 });
    assert_eq!(sc.params, FracParams::new(0.25, 3.0, 1).unwrap());
    assert_eq!(sc.t_grid, vec![0.5, 0.75, 1.0]);
    assert_eq!(sc.r_grid, vec![1.0]);
    assert_eq!(sc.n_list, vec![8, 16]);
    assert_eq!(sc.resolutions.functionals, 32);
    assert_eq!(sc.resolutions.lift, 48);
    assert_eq!(sc.tol("monotone"), 1e-9);
    assert_eq!(sc.tol("derivative"), 1e-3);
    assert_eq!(Scenario::parse(&sc.to_config()).unwrap(), sc);
}

#[test]
fn config_errors_name_the_offending_field() {
    let cases = [
        ("name = x\nfamily = shifted\ns = 0.5\n", "p"),
        ("name = x\nfamily = shifted\ns = 0.5\np = two\n", "p"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\nshift = -1\n", "shift"),
        ("name = x\nfamily = wave\ns = 0.5\np = 2\n", "family"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\nt_grid = 1, 0.5\n", "t_grid"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\nt_grid = 0, 0.5\n", "t_grid"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\nn_list = 16, 8\n", "n_list"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\nR_grid = -1\n", "R_grid"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\ntol.monotone = 0\n", "tol.monotone"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\ntol.bogus = 1\n", "tol.bogus"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\ncolour = red\n", "colour"),
        ("name = x\nfamily = shifted\ns = 0.5\np = 2\np = 3\n", "p"),
        ("name = x\nfamily = shifted\ns = 1.5\np = 2\n", "s/p/d"),
        ("name = x\nfamily = fundamental_solution\ns = 0.5\np = 2\nreversal_time = 1\n", "reversal_time"),
        ("name = x\nfamily shifted\n", "line 2"),
    ];
    for (text, key) in cases {
        assert_eq!(config_key(Scenario::parse(text).unwrap_err()), key, "{text}");
    }
}

proptest! {
    #[test]
    fn config_round_trip_is_exact(
        s in 0.05f64..0.95,
        p in 1.2f64..6.0,
        c in 0.01f64..10.0,
        t0 in 0.1f64..1.0,
        len in 2usize..8,
        tol in 1e-12f64..1e-2,
    ) {
        let params = FracParams::new(s, p, 1).unwrap();
        let mut sc = Scenario::new("prop", params, Family::Shifted { c }).unwrap();
        sc.t_grid = linspace(t0, t0 + 1.0 / 3.0, len);
        sc.set_tol("derivative", tol).unwrap();
        let back = Scenario::parse(&sc.to_config()).unwrap();
        prop_assert_eq!(back, sc);
    }

    #[test]
    fn comparisons_decide_as_documented(value in -1e3f64..1e3, threshold in -1e3f64..1e3) {
        prop_assert_eq!(Check::at_most("x", value, threshold).passed, value <= threshold);
        prop_assert_eq!(Check::new("x", value, Comparison::AtLeast, threshold).passed, value >= threshold);
        prop_assert_eq!(Check::new("x", value, Comparison::Above, threshold).passed, value > threshold);
    }
}

#[test]
fn builtin_suite_covers_the_default_families() {
    let names = builtin_names();
    for want in [
        "self_similar_s0.5_p2",
        "shifted_s0.5_p2",
        "self_similar_s0.25_p3",
        "shifted_s0.25_p3",
        "self_similar_s0.75_p2",
        "shifted_s0.75_p2",
        "shifted_s0.5_p2_d2",
        "gaussian_bump_s0.5",
        "fundamental_solution_s0.5",
    ] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
    assert_eq!(builtin_suite().len(), 7);
    let sc = builtin("shifted_s0.5_p2").unwrap();
    assert_eq!(sc.t_grid.len(), 11);
    assert_eq!(sc.r_grid, vec![1.0, 1.4]);
    assert!(builtin("nope").is_none());
}

#[test]
fn self_similar_run_passes_with_constant_curve() {
    let sc = quick("ss", Family::SelfSimilar, linspace(0.5, 1.5, 5));
    let report = run(&sc).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    for want in ["exact_residual", "dirichlet_gap", "neumann_rel", "monotone", "derivative", "j_constant", "d_zero"] {
        assert!(names.contains(&want), "{want} not in {names:?}");
    }
    assert!(report.skipped.is_empty());
    assert!(report.reaudit());
}

#[test]
fn shifted_run_has_strictly_positive_derivative() {
    let sc = quick("sh", Family::Shifted { c: 1.0 }, linspace(0.5, 1.5, 5));
    let report = run(&sc).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let d_pos = report.checks.iter().find(|c| c.name == "d_positive").unwrap();
    assert!(d_pos.value > 0.0);
    let curve = report.curve.unwrap();
    assert!(curve.samples.windows(2).all(|w| w[1].j > w[0].j));
}

#[test]
fn gaussian_bump_runs_only_linear_checks() {
    let sc = builtin("gaussian_bump_s0.5").unwrap();
    let report = run(&sc).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["heat_average", "dirichlet_gap", "neumann_rel", "scaling"]);
    assert!(report.curve.is_none());
    assert!(report.skipped.iter().any(|s| s.name == "monotone" && s.reason == "not a solution"));
}

#[test]
fn fundamental_solution_run_checks_trace_and_equation() {
    let report = run(&builtin("fundamental_solution_s0.5").unwrap()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["neumann_zero", "pde_residual"]);
}

#[test]
fn tolerance_failures_are_recorded_not_raised() {
    let mut sc = quick("strict", Family::Shifted { c: 1.0 }, linspace(0.5, 1.5, 3));
    sc.set_tol("neumann_rel", 1e-300).unwrap();
    let report = run(&sc).unwrap();
    assert!(!report.passed());
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["neumann_rel"]);
    assert!(report.reaudit());
    // Tampering with a stored verdict is caught.
    let mut bad = report.clone();
    bad.checks[0].passed = !bad.checks[0].passed;
    assert!(!bad.reaudit());
}

#[test]
fn csv_layout() {
    let mut sc = quick("csv", Family::Shifted { c: 1.0 }, vec![]);
    let empty = run(&sc).unwrap();
    assert_eq!(render_csv(&empty), format!("{CSV_HEADER}\n"));
    assert_eq!(CSV_HEADER, "t,J,D,dJdt_fd,term_energy,term_potential,term_l2,quad_err");

    sc.t_grid = vec![0.9, 1.1];
    let report = run(&sc).unwrap();
    let csv = render_csv(&report);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    let s = &report.curve.as_ref().unwrap().samples[1];
    let fields: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(
        fields,
        [s.t, s.j, s.d, s.dj_dt_fd, s.term_energy, s.term_potential, s.term_l2, s.quadrature_error]
    );
}

#[test]
fn json_round_trip_is_bit_exact() {
    let sc = quick("json", Family::Shifted { c: 1.0 }, linspace(0.5, 1.5, 3));
    let report = run(&sc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    emit(&report, Format::Json, &path).unwrap();
    let back: Report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, report);
    assert_eq!(render_json(&back).unwrap(), render_json(&report).unwrap());
    // Key order follows the report tree.
    let text = render_json(&report).unwrap();
    let order: Vec<usize> = ["\"scenario\"", "\"curve\"", "\"traces\"", "\"convergence\"", "\"checks\"", "\"skipped\"", "\"provenance\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn svg_plots_both_curves() {
    let sc = quick("svg", Family::Shifted { c: 1.0 }, linspace(0.5, 1.5, 3));
    let svg = render_svg(&run(&sc).unwrap());
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("J(t)") && svg.contains("D(t)"));
    let empty = render_svg(&run(&quick("e", Family::Shifted { c: 1.0 }, vec![])).unwrap());
    assert_eq!(empty.matches("<polyline").count(), 0);
}

#[test]
fn emit_surfaces_io_errors() {
    let sc = quick("io", Family::Shifted { c: 1.0 }, vec![]);
    let report = run(&sc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = emit(&report, Format::Csv, &dir.path().join("missing").join("x.csv")).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    assert!("pdf".parse::<Format>().is_err());
}

#[test]
fn repeated_runs_are_bit_identical() {
    let sc = quick("det", Family::Shifted { c: 1.0 }, linspace(0.5, 1.5, 4));
    assert_eq!(render_csv(&run(&sc).unwrap()), render_csv(&run(&sc).unwrap()));
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fracmono");
    let ok = Command::new(bin).args(["check", "kernels"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS eta_half"));

    let missing = Command::new(bin).args(["run", "no_such_scenario"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    std::fs::write(
        &cfg,
        "name = strict\nfamily = shifted\ns = 0.5\np = 2\nt_grid = 0.9, 1.1\nn_list =\nR_grid =\ntol.neumann_rel = 1e-300\n",
    )
    .unwrap();
    let fail = Command::new(bin).arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(fail.status.code(), Some(1), "{}", String::from_utf8_lossy(&fail.stderr));
    assert!(dir.path().join("strict.csv").exists());

    let relaxed = Command::new(bin)
        .arg("--tol")
        .arg("neumann_rel=1e-3")
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(relaxed.status.code(), Some(0), "{}", String::from_utf8_lossy(&relaxed.stderr));
}
