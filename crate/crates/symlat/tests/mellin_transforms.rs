//! Transform tests: closed forms against direct quadrature, the dilation
//! law, contour-inversion roundtrips and typed refusals, and the pairing
//! identity computed by two independent routes.

use num_complex::Complex64;

use symlat::mellin::{
    mellin_inverse, plancherel_line_integral, plancherel_pairing, MellinError, MellinPair,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Direct quadrature of `∫ ρ(e^u) e^{−su} du` on a wide fine grid — the
/// independent oracle for every closed-form transform.
fn transform_by_quadrature(p: &MellinPair, s: Complex64, lo: f64, hi: f64, cells: usize) -> Complex64 {
    let h = (hi - lo) / cells as f64;
    let mut acc = c(0.0, 0.0);
    for k in 0..cells {
        let u = lo + (k as f64 + 0.5) * h;
        acc += p.rho(u.exp()) * (-s * u).exp();
    }
    acc * h
}

#[test]
fn interval_transform_closed_form() {
    let p = MellinPair::y_interval(1.0, 2.0).unwrap();
    // (1^{−2} − 2^{−2})/2 = 3/8.
    let v = p.transform(c(2.0, 0.0));
    assert!((v.re - 0.375).abs() < 1e-14 && v.im.abs() < 1e-14);
    // At s = 0 the value is log(b/a).
    let p2 = MellinPair::y_interval(1.0, std::f64::consts::E.powi(2)).unwrap();
    let v0 = p2.transform(c(0.0, 0.0));
    assert!((v0.re - 2.0).abs() < 1e-12);
    // The small-s series branch agrees with the direct formula evaluated
    // at the same point (still ~10 good digits there).
    let s0 = c(9.0e-7, 3.0e-7);
    let series = p2.transform(s0);
    let lb = std::f64::consts::E.powi(2).ln();
    let direct = ((-s0 * 0.0).exp() - (-s0 * lb).exp()) / s0;
    assert!((series - direct).norm() < 1e-9 * direct.norm());
}

#[test]
fn log_gaussian_transform_closed_form() {
    let p = MellinPair::log_gaussian(0.0).unwrap();
    // √π · e^{(0−2)²/4} = √π · e.
    let v = p.transform(c(2.0, 0.0));
    let expect = std::f64::consts::PI.sqrt() * std::f64::consts::E;
    assert!((v.re - expect).abs() < 1e-13 && v.im.abs() < 1e-14);
}

#[test]
fn closed_forms_match_direct_quadrature() {
    let lg = MellinPair::log_gaussian(1.5).unwrap();
    for s in [c(2.0, 0.7), c(0.5, -1.3), c(4.0, 2.0)] {
        let closed = lg.transform(s);
        let quad = transform_by_quadrature(&lg, s, -15.0, 16.5, 120_000);
        assert!(
            (closed - quad).norm() < 1e-9 * (1.0 + closed.norm()),
            "log-gaussian at {s}: closed {closed}, quadrature {quad}"
        );
    }
    let iv = MellinPair::y_interval(0.5, 3.0).unwrap();
    for s in [c(2.0, 0.0), c(1.0, 1.0), c(3.0, -0.5)] {
        let closed = iv.transform(s);
        let quad = transform_by_quadrature(&iv, s, 0.5f64.ln(), 3.0f64.ln(), 400_000);
        assert!(
            (closed - quad).norm() < 1e-8 * (1.0 + closed.norm()),
            "interval at {s}: closed {closed}, quadrature {quad}"
        );
    }
}

#[test]
fn dilation_multiplies_transform_by_lambda_to_minus_s() {
    let base = MellinPair::log_gaussian(1.0).unwrap();
    let lam = 2.5f64;
    let dil = base.clone().dilated(lam).unwrap();
    // Pointwise dilation semantics.
    for y in [0.3, 1.0, 2.2, 7.5] {
        assert!((dil.rho(y) - base.rho(y / lam)).abs() < 1e-15);
    }
    // The law itself, with the dilated ρ integrated directly.
    for s in [c(2.0, 0.0), c(1.0, 0.8)] {
        let closed = dil.transform(s);
        let law = (-s * lam.ln()).exp() * base.transform(s);
        assert!((closed - law).norm() < 1e-12 * (1.0 + closed.norm()));
        let quad = transform_by_quadrature(&dil, s, -15.0, 18.0, 120_000);
        assert!((closed - quad).norm() < 1e-9 * (1.0 + closed.norm()));
    }
}

#[test]
fn numeric_bump_approximates_its_source() {
    let base = MellinPair::log_gaussian(1.0).unwrap();
    let bump = MellinPair::sampled(&base, -12.0, 13.0, 8001).unwrap();
    for y in [0.4, 1.0, 1.9, 6.0] {
        assert!((bump.rho(y) - base.rho(y)).abs() < 1e-5);
    }
    for s in [c(2.0, 0.0), c(1.0, 0.5)] {
        let b = bump.transform(s);
        let exact = base.transform(s);
        assert!(
            (b - exact).norm() < 1e-5 * (1.0 + exact.norm()),
            "bump {b} vs exact {exact} at {s}"
        );
    }
}

#[test]
fn inversion_roundtrip_for_log_gaussian() {
    let p = MellinPair::log_gaussian(2.0).unwrap();
    for sigma in [1.0, 3.0] {
        for y in [0.5, 1.0, 1.7, 3.0] {
            let back = mellin_inverse(&p, sigma, y, 0.05, 40.0).unwrap();
            assert!(
                (back - p.rho(y)).abs() < 1e-8 * (1.0 + p.rho(y)),
                "roundtrip at σ={sigma}, y={y}: got {back}, want {}",
                p.rho(y)
            );
        }
    }
}

#[test]
fn inversion_is_refused_for_slowly_decaying_transforms() {
    let iv = MellinPair::y_interval(1.0, 2.0).unwrap();
    assert!(matches!(
        mellin_inverse(&iv, 2.0, 1.5, 0.05, 40.0),
        Err(MellinError::InversionUnsupported { .. })
    ));
    let bump = MellinPair::sampled(&MellinPair::log_gaussian(0.0).unwrap(), -8.0, 8.0, 101).unwrap();
    assert!(matches!(
        mellin_inverse(&bump, 2.0, 1.0, 0.05, 40.0),
        Err(MellinError::InversionUnsupported { .. })
    ));
    // Dilation preserves (only) the base family's certificate.
    let dil_iv = iv.dilated(3.0).unwrap();
    assert!(mellin_inverse(&dil_iv, 2.0, 1.5, 0.05, 40.0).is_err());
    let dil_lg = MellinPair::log_gaussian(0.0).unwrap().dilated(3.0).unwrap();
    assert!(mellin_inverse(&dil_lg, 2.0, 1.5, 0.05, 40.0).is_ok());
}

#[test]
fn pairing_closed_form_for_interval_pairs() {
    // ∫₂⁴ y^{−3} dy = 1/8 − 1/32 = 3/32.
    let p = MellinPair::y_interval(2.0, 4.0).unwrap();
    let v = plancherel_pairing(&p, &p, 1);
    assert!((v - 3.0 / 32.0).abs() < 1e-15);
    // Disjoint supports pair to zero.
    let q = MellinPair::y_interval(5.0, 6.0).unwrap();
    assert_eq!(plancherel_pairing(&p, &q, 1), 0.0);
    // Partial overlap: ∫₃⁴ y^{−3} dy = 1/18 − 1/32.
    let r = MellinPair::y_interval(3.0, 7.0).unwrap();
    let v2 = plancherel_pairing(&p, &r, 1);
    assert!((v2 - (1.0 / 18.0 - 1.0 / 32.0)).abs() < 1e-15);
}

#[test]
fn pairing_identity_both_routes_log_gaussian() {
    // For ρ(y) = e^{−(log y)²} and n = 1 both routes equal
    // ∫ e^{−2u²−2u} du = e^{1/2}·√(π/2).
    let p = MellinPair::log_gaussian(0.0).unwrap();
    let expect = 0.5f64.exp() * (std::f64::consts::PI / 2.0).sqrt();
    let y_side = plancherel_pairing(&p, &p, 1);
    assert!((y_side - expect).abs() < 1e-10 * expect);
    let line = plancherel_line_integral(&p, &p, 1, 0.01, 30.0);
    assert!((line - expect).abs() < 1e-10 * expect);

    // A second, asymmetric pair at n = 2: the two numeric routes must agree.
    let p1 = MellinPair::log_gaussian(4.0).unwrap();
    let p2 = MellinPair::log_gaussian(1.0).unwrap();
    let y_side = plancherel_pairing(&p1, &p2, 2);
    let line = plancherel_line_integral(&p1, &p2, 2, 0.01, 30.0);
    assert!(
        (y_side - line).abs() < 1e-9 * (1.0 + y_side.abs()),
        "y-side {y_side}, line {line}"
    );
}

#[test]
fn pairing_identity_for_interval_profiles() {
    // Transform-side integral converges like 1/T for indicators; with a
    // long contour it must approach the exact y-side value.
    let p = MellinPair::y_interval(2.0, 4.0).unwrap();
    let exact = 3.0 / 32.0;
    let line = plancherel_line_integral(&p, &p, 1, 0.005, 4000.0);
    assert!(
        (line - exact).abs() < 1e-3 * exact,
        "line {line} vs exact {exact}"
    );
    // Mixed indicator × smooth pair: quadrature vs transform side.
    let lg = MellinPair::log_gaussian(0.0).unwrap();
    let iv = MellinPair::y_interval(1.0, 3.0).unwrap();
    let y_side = plancherel_pairing(&iv, &lg, 1);
    let line = plancherel_line_integral(&iv, &lg, 1, 0.005, 3000.0);
    assert!(
        (y_side - line).abs() < 1e-3 * (1.0 + y_side.abs()),
        "y-side {y_side}, line {line}"
    );
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(MellinPair::y_interval(2.0, 1.0).is_err());
    assert!(MellinPair::y_interval(-1.0, 2.0).is_err());
    assert!(MellinPair::y_interval(0.0, 2.0).is_err());
    assert!(MellinPair::log_gaussian(f64::NAN).is_err());
    assert!(MellinPair::log_gaussian(0.0).unwrap().dilated(0.0).is_err());
    assert!(MellinPair::log_gaussian(0.0).unwrap().dilated(-2.0).is_err());
    assert!(MellinPair::numeric_bump(0.0, 1.0, vec![1.0]).is_err());
    assert!(MellinPair::numeric_bump(1.0, 0.0, vec![1.0, 2.0]).is_err());
    assert!(MellinPair::numeric_bump(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
}

#[test]
fn profile_serialization_roundtrip() {
    let p = MellinPair::log_gaussian(2.0)
        .unwrap()
        .dilated(1.5)
        .unwrap();
    let json = serde_json::to_string(&p).unwrap();
    let back: MellinPair = serde_json::from_str(&json).unwrap();
    assert_eq!(p, back);
    assert!(json.contains("dilated") && json.contains("log-gaussian"));
}

/// At the central point the reflection collapses to exactly computable
/// factor values: rank 1 has `Z_m(1) = -1` for every even weight, and
/// rank 2 weight 2 has `Z_2(2) = ((4-2)/2) · ξ(-1)/ξ(2) = 1`.
#[test]
fn reflection_central_point_values() {
    let sqrt_pi = std::f64::consts::PI.sqrt();

    // rank 1, bidegree (0,0): v̂(1) = (+1) · ρ̂(1) · (-1).
    let refl = MellinPair::log_gaussian(2.0)
        .unwrap()
        .critical_reflection(1, 0, 0)
        .unwrap();
    let got = refl.transform(c(1.0, 0.0));
    let rho_hat_1 = sqrt_pi * (0.25f64).exp();
    assert!((got.re + rho_hat_1).abs() < 1e-12 * rho_hat_1 && got.im.abs() < 1e-13);

    // rank 1, bidegree (1,1): the (-1)^p sign cancels Z_2(1) = -1.
    let refl = MellinPair::log_gaussian(2.0)
        .unwrap()
        .critical_reflection(1, 1, 1)
        .unwrap();
    let got = refl.transform(c(1.0, 0.0));
    assert!((got.re - rho_hat_1).abs() < 1e-12 * rho_hat_1 && got.im.abs() < 1e-13);

    // rank 2, bidegree (2,0): v̂(2) = ρ̂(2) · Z_2(2) = ρ̂(2).
    let refl = MellinPair::log_gaussian(3.0)
        .unwrap()
        .critical_reflection(2, 2, 0)
        .unwrap();
    let got = refl.transform(c(2.0, 0.0));
    let rho_hat_2 = sqrt_pi * (0.25f64).exp();
    assert!((got.re - rho_hat_2).abs() < 1e-9 * rho_hat_2 && got.im.abs() < 1e-10);
}

/// On the central line the reflected transform has the same modulus as the
/// base transform at the mirrored point (the extra factor is unitary
/// there), and conjugate heights give conjugate values.
#[test]
fn reflection_is_unitary_on_the_central_line() {
    let base = MellinPair::log_gaussian(3.0).unwrap();
    let refl = base.clone().critical_reflection(2, 2, 2).unwrap();
    for &t in &[0.4, 3.0, 17.5, 39.0] {
        let v = refl.transform(c(2.0, t));
        let b = base.transform(c(2.0, -t)).norm();
        assert!(
            (v.norm() - b).abs() < 1e-11 * (1.0 + b),
            "modulus mismatch at t = {t}: {} vs {b}",
            v.norm()
        );
        let w = refl.transform(c(2.0, -t));
        assert!((w - v.conj()).norm() < 1e-11 * (1.0 + v.norm()));
    }
}

/// Point values of the reflected profile against an independent
/// high-precision quadrature oracle (adaptive Gauss over the same line,
/// 30-digit arithmetic, separate special-function implementations).
#[test]
fn reflection_point_values_match_independent_oracle() {
    let refl1 = MellinPair::log_gaussian(2.0)
        .unwrap()
        .critical_reflection(1, 0, 0)
        .unwrap();
    let v_half = refl1.rho(0.5);
    assert!(
        (v_half - 0.018555576120481627).abs() < 1e-9,
        "rho(0.5) = {v_half}"
    );
    let v_13 = refl1.rho(1.3);
    assert!(
        (v_13 + 1.3954774648782916).abs() < 1e-9 * 1.395,
        "rho(1.3) = {v_13}"
    );

    let refl2 = MellinPair::log_gaussian(3.0)
        .unwrap()
        .critical_reflection(2, 2, 0)
        .unwrap();
    let v_11 = refl2.rho(1.1);
    assert!(
        (v_11 - 1.230749902028902).abs() < 1e-9 * 1.23,
        "rho(1.1) = {v_11}"
    );
}

/// The base-against-reflection pairing on the transform side, against the
/// same independent oracle.
#[test]
fn reflection_pairing_line_route_matches_oracle() {
    let base1 = MellinPair::log_gaussian(2.0).unwrap();
    let refl1 = base1.clone().critical_reflection(1, 0, 0).unwrap();
    let p1 = plancherel_line_integral(&base1, &refl1, 1, 0.05, 40.0);
    assert!((p1 + 1.9148620312680164).abs() < 1e-9 * 1.91, "pairing = {p1}");

    let base2 = MellinPair::log_gaussian(3.0).unwrap();
    let refl2 = base2.clone().critical_reflection(2, 2, 0).unwrap();
    let p2 = plancherel_line_integral(&base2, &refl2, 2, 0.05, 40.0);
    assert!((p2 - 1.9556110500582812).abs() < 1e-9 * 1.96, "pairing = {p2}");
}

/// The same pairing computed on the `y` side: tabulate the reflected
/// profile (each point value is itself a line quadrature), then integrate
/// the product of profiles directly. Two fully distinct routes.
#[test]
fn reflection_pairing_y_side_route_agrees() {
    let base = MellinPair::log_gaussian(2.0).unwrap();
    let refl = base.clone().critical_reflection(1, 0, 0).unwrap();
    let line = plancherel_line_integral(&base, &refl, 1, 0.05, 40.0);

    let (lo, hi) = base.u_support();
    let bump = MellinPair::sampled(&refl, lo, hi, 641).unwrap();
    let y_side = plancherel_pairing(&base, &bump, 1);
    assert!(
        (y_side - line).abs() < 1e-3 * line.abs(),
        "y-side {y_side} vs line {line}"
    );
}

/// Reflection preserves the pairing norm: `∫ |v̂(n+it)|² dt` equals
/// `∫ |ρ̂(n+it)|² dt`, both matching the closed form
/// `e^{(b-n)²/2} √(π/2)` for the log-Gaussian base.
#[test]
fn reflection_preserves_line_norm() {
    let base = MellinPair::log_gaussian(3.0).unwrap();
    let refl = base.clone().critical_reflection(2, 0, 4).unwrap();
    let norm_base = plancherel_line_integral(&base, &base, 2, 0.05, 40.0);
    let norm_refl = plancherel_line_integral(&refl, &refl, 2, 0.05, 40.0);
    let closed = (0.5f64).exp() * (std::f64::consts::PI / 2.0).sqrt();
    assert!((norm_base - closed).abs() < 1e-10 * closed);
    assert!(
        (norm_refl - closed).abs() < 1e-9 * closed,
        "reflected norm {norm_refl} vs {closed}"
    );
}

#[test]
fn reflection_rejects_bad_bidegrees() {
    let base = MellinPair::log_gaussian(1.0).unwrap();
    assert!(matches!(
        base.clone().critical_reflection(1, 1, 0),
        Err(MellinError::BadParameters(_))
    ));
    assert!(matches!(
        base.clone().critical_reflection(0, 0, 0),
        Err(MellinError::BadParameters(_))
    ));
    assert!(base.critical_reflection(2, 3, 1).is_ok());
}

/// Off the central line the unitary route does not apply; where the factor
/// itself is singular the transform reports NaN, and profiles over a base
/// without certified inversion have no point values.
#[test]
fn reflection_degenerate_points_are_nan() {
    let refl = MellinPair::log_gaussian(2.0)
        .unwrap()
        .critical_reflection(1, 0, 0)
        .unwrap();
    // s = 2 mirrors to w = 0, a pole of the ξ quotient.
    let v = refl.transform(c(2.0, 0.0));
    assert!(v.re.is_nan() && v.im.is_nan());
    // A regular off-line point is finite.
    assert!(refl.transform(c(1.5, 2.0)).is_finite());
    assert!(!refl.supports_inversion());
    assert!(matches!(
        mellin_inverse(&refl, 1.0, 1.0, 0.05, 40.0),
        Err(MellinError::InversionUnsupported { .. })
    ));

    let over_interval = MellinPair::y_interval(0.25, 0.5)
        .unwrap()
        .critical_reflection(1, 0, 0)
        .unwrap();
    assert!(over_interval.rho(1.0).is_nan());
}

#[test]
fn reflection_serialization_roundtrip() {
    let refl = MellinPair::log_gaussian(4.0)
        .unwrap()
        .critical_reflection(2, 2, 0)
        .unwrap();
    let json = serde_json::to_string(&refl).unwrap();
    let back: MellinPair = serde_json::from_str(&json).unwrap();
    assert_eq!(refl, back);
    assert!(json.contains("critical-reflection"));
    assert_eq!(refl.family(), "critical-reflection(log-gaussian)");
}
