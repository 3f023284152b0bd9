use fracmono::fields::{ConstantField, HomogeneousField, Rescaled, StaticBump};
use fracmono::functionals::{
    dj_dt_fd, eval_d, eval_d_script, eval_e_elliptic, eval_e_script, eval_j, functional_curve, j_to_e_factor,
    CurveTolerances, FunctionalCurve, FunctionalSample,
};
use fracmono::harness::linspace;
use fracmono::{FracParams, TimePowerSolution};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

fn shifted(s: f64, p: f64, d: usize, c: f64) -> (FracParams, TimePowerSolution) {
    let params = FracParams::new(s, p, d).unwrap();
    (params, TimePowerSolution::exact(params, c).unwrap())
}

#[test]
fn shifted_functional_reference_values() {
    // Independent evaluation of the Gaussian-weighted integrals at t = 1
    // (c = 1, s = 1/2, p = 2, d = 1).
    let (params, sol) = shifted(0.5, 2.0, 1, 1.0);
    let ext = sol.extension();
    let j = eval_j(&sol, &ext, 1.0, &params, 64).unwrap();
    let d = eval_d(&ext, 1.0, &params, 64).unwrap();
    assert!(close(j.total(), 0.013989536140117, 1e-11), "J = {:.15e}", j.total());
    assert!(close(d.value, 0.003207651255002, 1e-11), "D = {:.15e}", d.value);
    assert!(j.quadrature_error < 1e-12 && d.error_estimate < 1e-12);
}

#[test]
fn derivative_of_j_is_d_along_shifted_solutions() {
    for (s, p) in [(0.5, 2.0), (0.25, 3.0), (0.75, 2.0)] {
        let (params, sol) = shifted(s, p, 1, 1.0);
        let ext = sol.extension();
        for t in [0.7, 1.3] {
            let fd = dj_dt_fd(&sol, &ext, t, 1e-3, &params, 64).unwrap();
            let d = eval_d(&ext, t, &params, 64).unwrap().value;
            assert!(d > 0.0);
            assert!(close(fd, d, 1e-5), "s = {s}, t = {t}: {fd} vs {d}");
        }
    }
}

#[test]
fn self_similar_functional_is_constant_with_vanishing_derivative() {
    for (s, p) in [(0.5, 2.0), (0.25, 3.0), (0.75, 2.0)] {
        let (params, sol) = shifted(s, p, 1, 0.0);
        let ext = sol.extension();
        let j1 = eval_j(&sol, &ext, 1.0, &params, 64).unwrap();
        for t in [0.5, 0.8, 1.5] {
            let jt = eval_j(&sol, &ext, t, &params, 64).unwrap();
            assert!(close(jt.total(), j1.total(), 1e-12), "s = {s}, t = {t}");
            // Each term is separately invariant.
            assert!(close(jt.energy, j1.energy, 1e-12));
            assert!(close(jt.l2, j1.l2, 1e-12));
            let d = eval_d(&ext, t, &params, 64).unwrap().value;
            assert!(d.abs() <= 1e-12 * j1.magnitude(), "s = {s}, D = {d}");
        }
    }
}

#[test]
fn j_is_a_constant_multiple_of_the_rescaled_energy() {
    for (s, p, d, c) in [(0.5, 2.0, 1, 1.0), (0.25, 3.0, 1, 0.0), (0.75, 2.0, 2, 0.5)] {
        let (params, sol) = shifted(s, p, d, c);
        let ext = sol.extension();
        let k = j_to_e_factor(&params).unwrap();
        for t in [0.6, 1.1] {
            let j = eval_j(&sol, &ext, t, &params, 64).unwrap().total();
            let e = eval_e_script(&sol, &ext, (2.0 * t).sqrt(), &params, 64).unwrap();
            assert!(close(j, k * e, 1e-10), "s = {s}, t = {t}: {j} vs {}", k * e);
        }
    }
}

#[test]
fn rescaled_energy_derivative_matches_finite_differences() {
    let (params, sol) = shifted(0.5, 2.0, 1, 1.0);
    let ext = sol.extension();
    let r = 1.2;
    let h = 1e-3;
    let e = |rr: f64| eval_e_script(&sol, &ext, rr, &params, 64).unwrap();
    let fd = (8.0 * (e(r + h) - e(r - h)) - (e(r + 2.0 * h) - e(r - 2.0 * h))) / (12.0 * h);
    let de = eval_d_script(&ext, r, &params, 64).unwrap().value;
    assert!(close(fd, de, 1e-7), "{fd} vs {de}");
}

#[test]
fn zero_field_has_zero_functional() {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let z = ConstantField::zero(1);
    let j = eval_j(&z, &z, 1.0, &params, 32).unwrap();
    assert_eq!(j.total(), 0.0);
    assert_eq!(eval_d(&z, 1.0, &params, 32).unwrap().value, 0.0);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let params = FracParams::new(0.5, 2.0, 2).unwrap();
    let z = ConstantField::zero(1);
    assert!(eval_j(&z, &z, 1.0, &params, 32).is_err());
    assert!(eval_d(&z, 1.0, &params, 32).is_err());
    assert!(eval_e_script(&z, &z, -1.0, &FracParams::new(0.5, 2.0, 1).unwrap(), 32).is_err());
}

#[test]
fn elliptic_energy_is_scale_invariant() {
    for (s, p, n) in [(0.5, 2.0, 1), (0.25, 3.0, 2), (0.75, 2.0, 1)] {
        let params = FracParams::new(s, p, n).unwrap();
        let v = StaticBump::new(0.8, vec![0.1; n + 1], 0.9).unwrap();
        for radius in [0.7, 1.3, 2.0] {
            let w = Rescaled {
                inner: v.clone(),
                radius,
                exponent: params.gamma_exponent(),
            };
            let ev = eval_e_elliptic(&v, radius, &params, 64).unwrap();
            let ew = eval_e_elliptic(&w, 1.0, &params, 64).unwrap();
            assert!(close(ew.total, ev.total, 1e-8), "s = {s}, R = {radius}: {} vs {}", ew.total, ev.total);
            let fine = eval_e_elliptic(&v, radius, &params, 128).unwrap();
            assert!(close(ev.total, fine.total, 1e-10), "s = {s}, R = {radius}: resolution");
        }
    }
}

#[test]
fn elliptic_energy_of_homogeneous_field_is_radius_independent() {
    // A field of degree -gamma is a fixed point of the rescaling, so its
    // energy does not depend on R; p = 5, s = 1/4 keeps every term
    // integrable at the origin.
    let params = FracParams::new(0.25, 5.0, 1).unwrap();
    let v = HomogeneousField {
        degree: params.gamma_exponent(),
        constant: 1.0,
        linear: vec![0.3, -0.2],
    };
    let e1 = eval_e_elliptic(&v, 1.0, &params, 128).unwrap();
    assert!(e1.quadrature_error < 1e-7, "{e1:?}");
    for radius in [0.7, 1.5, 3.0] {
        let e = eval_e_elliptic(&v, radius, &params, 128).unwrap();
        assert!(close(e.total, e1.total, 1e-12), "R = {radius}: {} vs {}", e.total, e1.total);
    }
    // Differs from the constant-free field.
    let w = HomogeneousField {
        constant: 0.0,
        ..v
    };
    assert!((eval_e_elliptic(&w, 1.0, &params, 64).unwrap().total - e1.total).abs() > 1e-3);
}

#[test]
fn curve_verdicts_for_exact_families() {
    let grid = linspace(0.5, 1.5, 11);
    let (params, sol) = shifted(0.5, 2.0, 1, 1.0);
    let ext = sol.extension();
    let curve = functional_curve(&sol, &ext, &params, &grid, 64, 1e-3, CurveTolerances::default()).unwrap();
    let v = curve.verdicts;
    assert!(v.monotone && v.derivative_match && v.nonnegative_d);
    assert!(v.max_violation < 0.0, "strictly increasing");
    assert!(curve.samples.windows(2).all(|w| w[1].j > w[0].j));
    assert_eq!(curve.samples.len(), 11);

    let (params, sol) = shifted(0.5, 2.0, 1, 0.0);
    let ext = sol.extension();
    let curve = functional_curve(&sol, &ext, &params, &grid, 64, 1e-3, CurveTolerances::default()).unwrap();
    assert!(curve.verdicts.monotone && curve.verdicts.derivative_match);
    let j1 = curve.samples[5].j;
    assert!(curve.samples.iter().all(|s| close(s.j, j1, 1e-5)));
}

#[test]
fn curve_judge_flags_decrease() {
    let params = FracParams::new(0.5, 2.0, 1).unwrap();
    let sample = |t: f64, j: f64| FunctionalSample {
        t,
        j,
        d: 0.0,
        dj_dt_fd: 0.0,
        term_energy: j,
        term_potential: 0.0,
        term_l2: 0.0,
        quadrature_error: 0.0,
    };
    let c = FunctionalCurve::judge(
        params,
        vec![sample(1.0, 1.0), sample(2.0, 0.9), sample(3.0, 1.1)],
        CurveTolerances::default(),
    );
    assert!(!c.verdicts.monotone);
    assert!(close(c.verdicts.max_violation, 0.1, 1e-12));
    let empty = FunctionalCurve::judge(params, vec![], CurveTolerances::default());
    assert!(empty.verdicts.monotone);
}

#[test]
fn curve_rejects_bad_grids() {
    let (params, sol) = shifted(0.5, 2.0, 1, 1.0);
    let ext = sol.extension();
    for grid in [vec![1.0, 0.5], vec![0.0, 1.0], vec![1.0, 1.0]] {
        assert!(functional_curve(&sol, &ext, &params, &grid, 32, 1e-3, CurveTolerances::default()).is_err());
    }
    assert!(dj_dt_fd(&sol, &ext, 1e-3, 1e-3, &params, 32).is_err());
}
