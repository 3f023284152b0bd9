use fracmono::extension::{
    extend, fractional_heat_apply, neumann_trace, pde_residual, Direction, PoissonExtension, TraceOptions,
};
use fracmono::fields::{BoundaryField, ConstantField, ExtensionField, FundamentalSolution, GaussianBump};
use fracmono::{FracKernels, FracParams, TimePowerSolution};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

/// `(-Delta)^s e^(-x^2/w^2)` in one dimension from the Fourier
/// representation, evaluated to 20 digits.
const LAPLACIAN_TABLE: &[(f64, f64, &[(f64, f64)])] = &[
    (
        0.5,
        1.0,
        &[
            (0.0, 1.1283791670955125739),
            (0.3, 0.93702975743257305243),
            (-0.45, 0.72835908977951914576),
            (0.8, 0.16771919746613329636),
            (3.0, -0.078564735130089746072),
        ],
    ),
    (
        0.25,
        1.5,
        &[
            (0.0, 0.79832223860303845383),
            (0.3, 0.75152433736233070053),
            (-0.45, 0.69602454469295901602),
            (0.8, 0.50875090168036481071),
            (3.0, -0.12234010673078758424),
        ],
    ),
    (
        0.75,
        1.0,
        &[
            (0.0, 1.4464090846320771425),
            (0.3, 1.1421005760782316076),
            (-0.45, 0.81618809066404363797),
            (3.0, -0.049468363055134062667),
        ],
    ),
];

#[test]
fn fractional_heat_operator_reduces_to_fractional_laplacian_on_static_data() {
    for &(s, w, points) in LAPLACIAN_TABLE {
        let params = FracParams::new(s, 2.0, 1).unwrap();
        let u = GaussianBump::new(1.0, vec![0.0], w).unwrap();
        for &(x, want) in points {
            for direction in [Direction::Backward, Direction::Forward] {
                let got = fractional_heat_apply(&u, &[x], 0.7, direction, &params, 64).unwrap();
                assert!(close(got, want, 1e-4), "s = {s}, x = {x}, {direction:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn fractional_heat_operator_on_time_power_matches_closed_form() {
    // (-d/dt)^s (t + c)^-beta = Gamma(beta + s)/Gamma(beta) (t + c)^(-beta-s).
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let sol = TimePowerSolution::exact(params, 1.0).unwrap();
    for t in [0.5, 1.0, 2.0] {
        let got = fractional_heat_apply(&sol, &[0.0], t, Direction::Backward, &params, 64).unwrap();
        let want = sol.at(t).unwrap().powf(params.p());
        assert!(close(got, want, 1e-8), "t = {t}: {got} vs {want}");
    }
}

#[test]
fn constants_are_annihilated() {
    let params = FracParams::new(0.25, 3.0, 2).unwrap();
    let c = ConstantField::new(2, 2.5);
    let v = fractional_heat_apply(&c, &[0.1, 0.2], 1.0, Direction::Backward, &params, 32).unwrap();
    assert!(v.abs() < 1e-14, "{v}");
    let e = extend(&c, 0.3, &[0.1, 0.2], 1.0, &params, 32).unwrap();
    assert!(close(e, 2.5, 1e-13), "{e}");
}

#[test]
fn poisson_extension_of_time_power_matches_its_closed_form() {
    for (s, p) in [(0.5, 2.0), (0.25, 3.0), (0.75, 2.0)] {
        let params = FracParams::new(s, p, 1).unwrap();
        let sol = TimePowerSolution::exact(params, 1.0).unwrap();
        let ext = sol.extension();
        for (x0, t) in [(0.1, 0.8), (0.7, 1.2), (1.5, 0.5)] {
            let got = extend(&sol, x0, &[0.0], t, &params, 64).unwrap();
            let want = ext.profile(x0, t).unwrap();
            assert!(close(got, want, 1e-10), "s = {s}, x0 = {x0}, t = {t}: {got} vs {want}");
        }
    }
}

#[test]
fn extend_rejects_boundary_points() {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let u = ConstantField::new(1, 1.0);
    assert!(extend(&u, 0.0, &[0.0], 1.0, &params, 32).is_err());
    assert!(extend(&u, 0.5, &[0.0, 0.0], 1.0, &params, 32).is_err());
}

#[test]
fn time_power_traces_match_the_nonlinear_neumann_law() {
    for (s, p, x0_d) in [(0.5, 2.0, 1e-3), (0.75, 2.0, 1e-3), (0.25, 3.0, 1e-6)] {
        let params = FracParams::new(s, p, 1).unwrap();
        let sol = TimePowerSolution::exact(params, 1.0).unwrap();
        let ext = sol.extension();
        let opts = TraceOptions {
            dirichlet_x0: x0_d,
            ..TraceOptions::default()
        };
        let tr = neumann_trace(&ext, Some(&sol), &[0.0], 1.0, &params, opts).unwrap();
        let target = tr.neumann_target.unwrap();
        let eta = FracKernels::new(params).unwrap().constants().eta_s;
        assert!(close(target, -eta * sol.at(1.0).unwrap().powf(p), 1e-15));
        assert!(close(tr.neumann_value, target, 1e-3), "s = {s}: {} vs {target}", tr.neumann_value);
        assert!(tr.dirichlet_gap.unwrap() <= 1e-3, "s = {s}: gap {:e}", tr.dirichlet_gap.unwrap());
        assert_eq!(tr.extrapolation_steps.len(), 3);
    }
}

#[test]
fn dirichlet_gap_scales_like_x0_to_the_2s() {
    // For s < 1/2 the gap at x0 = 1e-3 is larger than 1e-3 even for smooth
    // data; the trace is approached at rate x0^(2s).
    let params = FracParams::new(0.25, 3.0, 1).unwrap();
    let sol = TimePowerSolution::exact(params, 1.0).unwrap();
    let ext = sol.extension();
    let u = sol.at(1.0).unwrap();
    let g1 = (ext.profile(1e-3, 1.0).unwrap() - u).abs();
    let g2 = (ext.profile(1e-5, 1.0).unwrap() - u).abs();
    assert!(g1 > 1e-3);
    assert!((g1 / g2 - 10.0).abs() < 0.1, "{g1} / {g2}");
}

#[test]
fn gaussian_extension_neumann_trace_is_the_scaled_operator() {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let u = GaussianBump::new(1.0, vec![0.0], 1.0).unwrap();
    let ext = PoissonExtension {
        boundary: u.clone(),
        params,
        res: 64,
    };
    let x = [0.3];
    let tr = neumann_trace(&ext, Some(&u), &x, 1.0, &params, TraceOptions::default()).unwrap();
    let eta = FracKernels::new(params).unwrap().constants().eta_s;
    let target = -eta * fractional_heat_apply(&u, &x, 1.0, Direction::Backward, &params, 64).unwrap();
    assert!(close(tr.neumann_value, target, 1e-3), "{} vs {target}", tr.neumann_value);
    assert!(tr.dirichlet_gap.unwrap() <= 1e-3);
    assert!(close(ext.value(1e-3, &x, 1.0).unwrap(), u.value(&x, 1.0).unwrap(), 1e-2));
}

#[test]
fn fundamental_solution_has_zero_neumann_trace_and_solves_the_extension_equation() {
    for s in [0.25, 0.5, 0.75] {
        let params = FracParams::new(s, 2.0, 1).unwrap();
        let field = FundamentalSolution::reversed(FracKernels::new(params).unwrap(), 2.5);
        let tr = neumann_trace(&field, None, &[0.3], 1.0, &params, TraceOptions::default()).unwrap();
        assert!(tr.neumann_value.abs() <= 1e-6, "s = {s}: {}", tr.neumann_value);
        assert!(tr.dirichlet_gap.is_none() && tr.neumann_target.is_none());
        for (x0, x) in [(0.2, 0.0), (0.9, -0.6), (1.6, 1.1)] {
            let r = pde_residual(&field, x0, &[x], 1.0, &params, None).unwrap();
            let size = field.jet(x0, &[x], 1.0).unwrap().dt.abs();
            assert!(r.abs() <= 1e-10 * size, "s = {s}, x0 = {x0}: {r}");
        }
    }
}

#[test]
fn time_power_extension_solves_the_extension_equation() {
    let params = FracParams::new(0.75, 2.0, 2).unwrap();
    let ext = TimePowerSolution::exact(params, 0.5).unwrap().extension();
    for (x0, t) in [(0.1, 0.7), (0.8, 1.3)] {
        let r = pde_residual(&ext, x0, &[0.2, 0.1], t, &params, None).unwrap();
        let size = ext.jet(x0, &[0.2, 0.1], t).unwrap().dt.abs();
        assert!(r.abs() <= 1e-10 * size, "x0 = {x0}: {r}");
    }
}

#[test]
fn finite_difference_residual_detects_non_solutions() {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let u = GaussianBump::new(1.0, vec![0.0], 1.0).unwrap();
    let ext = PoissonExtension {
        boundary: u,
        params,
        res: 64,
    };
    // The Poisson extension of static data solves the extension equation.
    let r = pde_residual(&ext, 0.5, &[0.2], 1.0, &params, Some(1e-3)).unwrap();
    assert!(r.abs() < 1e-4, "{r}");
    let bad = fracmono::fields::AffineInTime {
        dim: 1,
        offset: 0.0,
        slope: 1.0,
    };
    let r = pde_residual(&bad, 0.5, &[0.2], 1.0, &params, None).unwrap();
    assert!(close(r, 1.0, 1e-12));
}
