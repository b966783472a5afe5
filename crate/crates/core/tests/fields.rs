use hitchin::algebra::{make_generators, RealFormSignature};
use hitchin::fields::*;
use proptest::prelude::*;

const SU2: RealFormSignature = RealFormSignature::SU2;

/// Kink of ∇²α = (κ²/2) sinh 2α: α = 2 artanh(e^{-κx}), α' = -κ/sinh(κx).
/// With g = κ cosh α, h = κ sinh α, f₁ = 0, f₂ = α' it solves the SU(2) system.
fn kink(kappa: f64) -> AnsatzField {
    let alpha = move |x: f64| 2.0 * (-kappa * x).exp().atanh();
    AnsatzField::from_fns(
        SU2,
        |_, _| 0.0,
        move |x, _| -kappa / (kappa * x).sinh(),
        move |x, _| kappa * alpha(x).cosh(),
        move |x, _| kappa * alpha(x).sinh(),
    )
}

fn sample_points() -> Vec<(f64, f64)> {
    (0..40).map(|k| (0.6 + 0.06 * k as f64, (k as f64 * 0.7).sin())).collect()
}

#[test]
fn kink_solves_reduced_system() {
    let f = kink(1.3);
    assert!(max_hitchin_residual(&f, &sample_points()).unwrap() < 1e-8);
    for (x, y) in sample_points() {
        assert!(flat_connection_residual(&f, x, y).unwrap() < 1e-8);
    }
}

#[test]
fn kappa_constant_on_exact_solution() {
    let f = kink(1.3);
    for (x, y) in sample_points() {
        let g = f.g.value(x, y).unwrap();
        let h = f.h.value(x, y).unwrap();
        assert!((kappa_squared(g, h, SU2) - 1.69).abs() < 1e-12);
    }
}

#[test]
fn f12_is_form_sign_times_gh() {
    let f = kink(0.8);
    let t1 = make_generators(SU2)[0].clone();
    for (x, y) in sample_points() {
        let c = curvature(&f, x, y).unwrap();
        let gh = f.g.value(x, y).unwrap() * f.h.value(x, y).unwrap();
        assert!(c.f12.approx_eq(&t1.scale_real(SU2.sign1() * gh), 1e-7));
    }
}

#[test]
fn curvature_component_structure() {
    // generic non-solution: F12, F34 ∝ τ₁; the mixed components have no τ₁ part
    for sig in RealFormSignature::all() {
        let f = AnsatzField::from_fns(sig, |x, y| x * y, |x, _| x.sin(), |x, y| 1.0 + x * x + y, |_, y| y.cos());
        let c = curvature(&f, 0.4, -0.3).unwrap();
        for comp in [&c.f12, &c.f34] {
            let k = comp.coeffs(sig);
            assert!(k[1].norm() < 1e-12 && k[2].norm() < 1e-12);
        }
        for comp in [&c.f13, &c.f14, &c.f23, &c.f24] {
            assert!(comp.coeffs(sig)[0].norm() < 1e-12);
        }
    }
}

#[test]
fn g_field_equation_on_kink() {
    let kappa = 1.3;
    let f = kink(kappa);
    let diff = DiffOptions::default();
    for (x, y) in sample_points() {
        let r = field_equation_residual_g(&f.g, kappa, SU2, x, y, &diff).unwrap();
        assert!(r.abs() < 1e-6, "{r}");
    }
}

#[test]
fn g_field_equation_on_liouville() {
    // g = 2/(1 + r²), κ = 0, signature (1,0)
    let g = ScalarField::callable(|x, y| 2.0 / (1.0 + x * x + y * y));
    let diff = DiffOptions::default();
    for (x, y) in annulus_points(30, 0.2, 5.0) {
        let r = field_equation_residual_g(&g, 0.0, RealFormSignature::SO21_COMPACT_TAU1, x, y, &diff).unwrap();
        assert!(r.abs() < 1e-6);
    }
}

#[test]
fn raw_and_reduced_action_integrands_agree() {
    let kappa = 1.3;
    let f = kink(kappa);
    let diff = DiffOptions::default();
    for (x, y) in sample_points() {
        let raw = action_integrand_raw(&f, x, y).unwrap();
        let red = action_integrand_g(&f.g, kappa, SU2, x, y, &diff).unwrap();
        assert!((raw - red).abs() < 1e-8 * raw.abs().max(1.0));
        // both equal (-1)^{n₁} ∇²g² / 2
        let sigma = action_density(&f.g, SU2, x, y, &diff).unwrap();
        let via_sigma = 8.0 * std::f64::consts::PI.powi(2) * sigma;
        assert!((raw - via_sigma).abs() < 1e-5 * raw.abs().max(1.0));
    }
}

#[test]
fn non_solution_is_not_flat() {
    let f = AnsatzField::from_fns(SU2, |_, y| 0.7 * y, |_, _| 0.0, |x, _| 1.0 + x, |_, _| 0.5);
    assert!(flat_connection_residual(&f, 0.3, 0.2).unwrap() > 0.1);
    assert!(hitchin_residual(&f, 0.3, 0.2).unwrap().max_abs() > 0.1);
}

#[test]
fn second_order_convergence_callable() {
    let base = kink(1.0);
    let (x, y) = (1.1, 0.0);
    let r = |h: f64| hitchin_residual(&base.clone().with_diff(DiffOptions::second_order(h)), x, y).unwrap().max_abs();
    let ratio = r(2e-2) / r(1e-2);
    assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn second_order_convergence_grid() {
    let base = kink(1.0);
    let (x, y) = (1.2, 0.0);
    let r = |h: f64| {
        let g = base.sampled(0.5, -0.5, h, h, (1.4 / h).round() as usize, (1.0 / h).round() as usize + 1).unwrap();
        hitchin_residual(&g, x, y).unwrap().max_abs()
    };
    let ratio = r(0.02) / r(0.01);
    assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn grid_exterior_point_rejected() {
    let g = kink(1.0).sampled(0.5, -0.5, 0.05, 0.05, 20, 20).unwrap();
    assert!(matches!(hitchin_residual(&g, 5.0, 0.0), Err(FieldError::OutsideGrid { .. })));
}

#[test]
fn constant_g_zero_action() {
    let g = ScalarField::constant(2.0);
    assert_eq!(action_density(&g, SU2, 0.1, 0.2, &DiffOptions::default()).unwrap(), 0.0);
    let profile = RadialProfile::from_fn(&[0.1, 1.0, 10.0], |_| (2.0, 0.0));
    assert_eq!(reduced_action_radial(&profile, SU2).value, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_squared_formula(g in -5.0f64..5.0, h in -5.0f64..5.0) {
        for sig in RealFormSignature::all() {
            let want = g * g - sig.sign2() * h * h;
            prop_assert_eq!(kappa_squared(g, h, sig), want);
        }
    }

    #[test]
    fn alpha_parametrization_of_kappa(kappa in 0.1f64..4.0, alpha in -3.0f64..3.0) {
        let both = RealFormSignature::SO21_NONCOMPACT_TAU1;
        let k2 = kappa_squared(kappa * alpha.cos(), kappa * alpha.sin(), both);
        prop_assert!((k2 - kappa * kappa).abs() < 1e-12 * kappa * kappa);
        let k2 = kappa_squared(kappa * alpha.cosh(), kappa * alpha.sinh(), SU2);
        prop_assert!((k2 - kappa * kappa).abs() < 1e-10 * (kappa * alpha.cosh()).powi(2));
    }

    #[test]
    fn hitchin_implies_flat(x in 0.6f64..3.0, y in -2.0f64..2.0, kappa in 0.5f64..2.0) {
        let f = kink(kappa);
        let r = hitchin_residual(&f, x, y).unwrap().max_abs();
        prop_assert!(r < 1e-7);
        prop_assert!(flat_connection_residual(&f, x, y).unwrap() < 1e-7);
    }

    #[test]
    fn kappa_constant_across_grid(kappa in 0.5f64..2.0) {
        let f = kink(kappa).sampled(0.6, -0.5, 0.02, 0.02, 100, 50).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut res: f64 = 0.0;
        for i in 1..99 {
            let (x, y) = (0.6 + 0.02 * i as f64, 0.0);
            let k2 = kappa_squared(f.g.value(x, y).unwrap(), f.h.value(x, y).unwrap(), SU2);
            lo = lo.min(k2);
            hi = hi.max(k2);
            res = res.max(hitchin_residual(&f, x, y).unwrap().max_abs());
        }
        prop_assert!(hi - lo < 10.0 * res.max(1e-12));
    }
}
