//! Series, constant terms, periods, the isometric twist, and the closed
//! moment formulas.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symlat::eisenstein::{
    constant_term_closed, constant_term_direct, eisenstein_series, function_integral,
    function_norm2, incomplete_theta, incomplete_theta_threshold, iota_apply, iota_pairing_value,
    moment_rhs, period_closed, period_direct_n1, primitive_series_cache, vol_sphere,
    EisensteinError, ProductFunction, SphereHarmonic,
};
use symlat::harmonic::{harmonic_basis, BidegreePolynomial, GRat};
use symlat::lattice::LatticeBasis;
use symlat::mellin::MellinPair;
use symlat::special::{xi_c, zeta_c};
use symlat::symplectic::{
    a_y, k_from_sphere_point, symplectic_completion, unipotent, SpherePoint, SymplecticMatrix,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zeta_real(x: f64) -> f64 {
    zeta_c(c(x, 0.0)).unwrap().re
}

/// A generic group element `u_t · a_y · k` from a seeded stream.
fn random_group_point(n: usize, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let t: Vec<f64> = (0..2 * n - 1).map(|_| rng.gen_range(-0.4f64..0.4)).collect();
    let y = rng.gen_range(0.8f64..1.3);
    let raw: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let k = k_from_sphere_point(&SpherePoint::new(&unit).unwrap());
    unipotent(n, &t)
        .unwrap()
        .mul(&a_y(n, y).unwrap())
        .unwrap()
        .mul(&k)
        .unwrap()
}

#[test]
fn spherical_series_matches_epstein_closed_form() {
    // Sum over Z^4 \ {0} of |v|^{-8}: r_4(m) = 8σ(m) − 32σ(m/4) gives the
    // closed value 8(1 − 4^{-3}) ζ(4) ζ(3).
    let full_sum_oracle = 10.245_486_151_943_348f64;
    let g = SymplecticMatrix::identity(2);
    let series = eisenstein_series(c(8.0, 0.0), &g, None, 12.0, 1.0).unwrap();
    let full_sum = series.value * zeta_c(c(8.0, 0.0)).unwrap();
    assert!(
        (full_sum.re - full_sum_oracle).abs() < 1e-5 * full_sum_oracle,
        "full lattice sum {} vs {}",
        full_sum.re,
        full_sum_oracle
    );
    assert!(full_sum.im.abs() < 1e-12);
    assert!(series.points > 50_000, "only {} points", series.points);
    assert!(series.error_estimate < 1e-4);
    assert!(series.tail_bound > 0.0 && series.tail_bound.is_finite());
}

#[test]
fn spherical_equals_typed_series_with_constant_angular() {
    let one = SphereHarmonic::constant(2);
    let g = unipotent(2, &[0.3, 0.1, -0.2])
        .unwrap()
        .mul(&a_y(2, 1.1).unwrap())
        .unwrap();
    for s in [c(7.0, 0.0), c(7.0, 1.5)] {
        let spherical = eisenstein_series(s, &g, None, 12.0, 1.0).unwrap().value;
        let typed = eisenstein_series(s, &g, Some(&one), 12.0, 1.0).unwrap().value;
        assert!(
            (spherical - typed).norm() < 1e-5 * typed.norm(),
            "at s = {s}: spherical {spherical} vs typed {typed}"
        );
    }
}

#[test]
fn series_is_invariant_under_integer_symplectic_moves() {
    let gamma = symplectic_completion(&[1, 2, 0, 3]).unwrap().to_real();
    let g = unipotent(2, &[0.2, -0.3, 0.15])
        .unwrap()
        .mul(&a_y(2, 1.2).unwrap())
        .unwrap();
    let moved = gamma.mul(&g).unwrap();
    let base = eisenstein_series(c(8.0, 0.0), &g, None, 10.0, 1.0).unwrap().value;
    let shifted = eisenstein_series(c(8.0, 0.0), &moved, None, 10.0, 1.0)
        .unwrap()
        .value;
    assert!(
        (base - shifted).norm() < 1e-9 * base.norm(),
        "{base} vs {shifted}"
    );
}

#[test]
fn mean_zero_angular_series_vanishes_at_the_standard_lattice() {
    // φ = z_0 · conj(z_1): flipping the two middle coordinates of Z^4
    // negates φ and fixes the norm, so the lattice sum cancels in pairs.
    let phi = SphereHarmonic::new(BidegreePolynomial::monomial(
        2,
        &[1, 0],
        &[0, 1],
        GRat::one(),
    ))
    .unwrap();
    let g = SymplecticMatrix::identity(2);
    let series = eisenstein_series(c(6.0, 0.0), &g, Some(&phi), 10.0, 1.0).unwrap();
    assert!(series.value.norm() < 1e-10, "got {}", series.value);
    assert!(series.tail_bound > 0.0 && series.tail_bound.is_finite());
    // Mean-zero angular part: nothing to compensate, so the residual
    // estimate is the full tail bound.
    assert_eq!(series.error_estimate, series.tail_bound);
}

#[test]
fn theta_counts_short_primitive_vectors_exactly() {
    // ρ = indicator(2/3 < y ≤ 10^6) makes f the indicator of the ambient
    // region 10^{-6} ≤ ‖x‖ < 3/2, which holds exactly the 8 + 24 = 32
    // primitive vectors of Z^4 with ‖v‖² ∈ {1, 2}.
    let f = ProductFunction::spherical(
        2,
        MellinPair::y_interval(2.0 / 3.0, 1.0e6).unwrap(),
    );
    let basis = LatticeBasis::identity(2);
    let theta = incomplete_theta(&f, &basis).unwrap();
    assert_eq!(theta.value.re, 32.0);
    assert_eq!(theta.value.im, 0.0);
    assert_eq!(theta.points, 32);
    assert_eq!(theta.tail_bound, 0.0);

    // A profile supported below the shortest vector sums to zero.
    let empty = ProductFunction::spherical(2, MellinPair::y_interval(5.0, 6.0).unwrap());
    let nothing = incomplete_theta(&empty, &basis).unwrap();
    assert_eq!(nothing.value.re, 0.0);
    assert_eq!(nothing.points, 0);
}

#[test]
fn theta_matches_contour_integral_of_the_series() {
    // Θ_f(g) = (1/2π) ∫ ρ̂(σ+it) E(σ+it, g, 1) dt on the line σ = 2n+3,
    // for the log-Gaussian profile with b = 4.
    let n = 2usize;
    let f = ProductFunction::spherical(n, MellinPair::log_gaussian(4.0).unwrap());
    let one = SphereHarmonic::constant(n);
    let sigma = 2.0 * n as f64 + 3.0;
    let (step, t_max) = (0.1f64, 30.0f64);
    let steps = (2.0 * t_max / step).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..5 {
        let g = random_group_point(n, &mut rng);
        let theta = incomplete_theta_threshold(&f, &LatticeBasis::from_symplectic(&g), 1e-10)
            .unwrap()
            .value;
        let cache = primitive_series_cache(&g, &one, 10.0).unwrap();
        let mut acc = c(0.0, 0.0);
        for idx in 0..=steps {
            let t = -t_max + idx as f64 * step;
            let w = if idx == 0 || idx == steps { 0.5 } else { 1.0 };
            let s = c(sigma, t);
            acc += w * f.radial().transform(s) * cache.evaluate(s).unwrap().value;
        }
        let contour = acc * step / (2.0 * std::f64::consts::PI);
        assert!(
            (contour.re - theta.re).abs() < 1e-4 * theta.re.abs(),
            "trial {trial}: theta {} vs contour {}",
            theta.re,
            contour.re
        );
        assert!(contour.im.abs() < 1e-6 * theta.re.abs());
    }
}

#[test]
fn rank_one_constant_term_matches_reference_value() {
    // 2(y^s + (ξ(3)/ξ(4)) y^{2−s}) at s = 4, y = 2.
    let value = constant_term_closed(c(4.0, 0.0), &SymplecticMatrix::empty(), 2.0, 1).unwrap();
    let reference = 32.872_284_041_065_628f64;
    assert!(
        (value.re - reference).abs() < 1e-12 * reference,
        "got {}",
        value.re
    );
    assert!(value.im.abs() < 1e-14);
}

#[test]
fn constant_term_direct_average_agrees_with_closed_form() {
    let s = c(8.0, 0.0);
    let y = 1.2;
    let m = SymplecticMatrix::identity(1);
    let closed = constant_term_closed(s, &m, y, 2).unwrap();
    let direct = constant_term_direct(s, &m, y, 8).unwrap();
    assert!(
        (direct - closed).norm() < 1e-3 * closed.norm(),
        "direct {direct} vs closed {closed}"
    );
    assert!(direct.im.abs() < 1e-8);
}

#[test]
fn constant_term_residue_recovers_the_volume_constant() {
    // ε · c(4 + ε, y = 1) → 2/ξ(4) = 180/π² as ε → 0; two evaluations and
    // one Richardson step remove the linear term.
    let m = SymplecticMatrix::identity(1);
    let probe = |eps: f64| -> f64 {
        let value = constant_term_closed(c(4.0 + eps, 0.0), &m, 1.0, 2).unwrap();
        eps * value.re
    };
    let extrapolated = 2.0 * probe(0.2) - probe(0.4);
    let target = 18.237_813_055_620_799f64; // 180/π²
    assert!(
        (extrapolated - target).abs() < 0.03 * target,
        "extrapolated {extrapolated} vs {target}"
    );
}

#[test]
fn period_direct_circle_average_matches_contour_formula() {
    // Spherical profile.
    let f = ProductFunction::spherical(1, MellinPair::log_gaussian(2.0).unwrap());
    let k = SpherePoint::new(&[0.6, 0.8]).unwrap();
    let closed = period_closed(&f, 1.0, &k).unwrap();
    let direct = period_direct_n1(&f, 1.0, &k).unwrap();
    assert!(
        (direct - closed).norm() < 1e-3 * closed.norm(),
        "spherical: direct {direct} vs closed {closed}"
    );

    // Weight-two angular part φ(z) = z².
    let phi = SphereHarmonic::new(BidegreePolynomial::monomial(1, &[2], &[0], GRat::one()))
        .unwrap();
    let g = ProductFunction::new(MellinPair::log_gaussian(2.0).unwrap(), phi);
    let closed2 = period_closed(&g, 1.6, &k).unwrap();
    let direct2 = period_direct_n1(&g, 1.6, &k).unwrap();
    assert!(
        (direct2 - closed2).norm() < 1e-3 * closed2.norm(),
        "weight 2: direct {direct2} vs closed {closed2}"
    );
}

#[test]
fn leftover_constant_identity_holds_across_ranks() {
    // 2/ξ(2n) = vol(S^{2n−1})/ζ(2n): the spherical period constant and the
    // integral constant in the twist cancel exactly.
    for n in 1usize..=3 {
        let two_n = 2.0 * n as f64;
        let lhs = 2.0 / xi_c(c(two_n, 0.0)).unwrap().re;
        let rhs = vol_sphere(n) / zeta_real(two_n);
        assert!(
            (lhs - rhs).abs() < 1e-12 * lhs.abs(),
            "n = {n}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn twist_preserves_the_ambient_norm() {
    let cases: Vec<(u32, u32)> = vec![(0, 0), (1, 1), (2, 0)];
    for (p, q) in cases {
        let poly = if (p, q) == (0, 0) {
            BidegreePolynomial::one(2)
        } else {
            harmonic_basis(2, p, q).into_iter().next().unwrap()
        };
        let f = ProductFunction::new(
            MellinPair::log_gaussian(3.0).unwrap(),
            SphereHarmonic::new(poly).unwrap(),
        );
        let twisted = iota_apply(&f).unwrap();
        let ratio = function_norm2(&twisted).unwrap() / function_norm2(&f).unwrap();
        assert!(
            (ratio - 1.0).abs() < 1e-6,
            "bidegree ({p},{q}): norm ratio {ratio}"
        );
    }
    let f = ProductFunction::spherical(2, MellinPair::log_gaussian(3.0).unwrap());
    assert_eq!(
        iota_apply(&f).unwrap().radial().family(),
        "critical-reflection(log-gaussian)"
    );
}

#[test]
fn moment_closed_forms_for_the_indicator_annulus() {
    // ρ = indicator(1/4 < y ≤ 1/2) is the ambient indicator of
    // 2 ≤ ‖x‖ < 4 in R², with ∫f = π(16 − 4) = 12π = ‖f‖².
    let f = ProductFunction::spherical(1, MellinPair::y_interval(0.25, 0.5).unwrap());
    let twelve_pi = 12.0 * std::f64::consts::PI;
    let integral = function_integral(&f);
    assert!((integral.re - twelve_pi).abs() < 1e-12 * twelve_pi);
    assert!(integral.im.abs() < 1e-14);
    let norm2 = function_norm2(&f).unwrap();
    assert!((norm2 - twelve_pi).abs() < 1e-12 * twelve_pi);

    let report = moment_rhs(&f).unwrap();
    let z2 = zeta_real(2.0);
    assert!((report.first_rhs.re - twelve_pi / z2).abs() < 1e-12 * twelve_pi);
    // The line integral certifies its own reality instead of discarding it.
    assert!(report.iota_pairing.im.abs() < 1e-8 * report.norm2);
    assert!(report.second_rhs.im.abs() < 1e-8 * report.second_rhs.re);
    let lower = report.first_rhs.norm_sqr();
    let upper = lower + 4.0 / z2 * report.norm2;
    assert!(report.second_rhs.re >= lower * (1.0 - 1e-9));
    assert!(report.second_rhs.re <= upper * (1.0 + 1e-3));
}

#[test]
fn moment_second_rhs_respects_cauchy_schwarz() {
    let f = ProductFunction::spherical(2, MellinPair::log_gaussian(4.0).unwrap());
    let report = moment_rhs(&f).unwrap();
    let z4 = zeta_real(4.0);
    let lower = report.first_rhs.norm_sqr();
    let upper = lower + 4.0 / z4 * report.norm2;
    assert!(report.second_rhs.im.abs() < 1e-8 * report.second_rhs.re);
    assert!(report.second_rhs.re >= lower * (1.0 - 1e-9));
    assert!(report.second_rhs.re <= upper * (1.0 + 1e-6));

    // A nonconstant pure bidegree has exact sphere mean zero, so the
    // ambient integral vanishes identically.
    let phi = SphereHarmonic::new(harmonic_basis(2, 1, 1).into_iter().next().unwrap()).unwrap();
    let g = ProductFunction::new(MellinPair::log_gaussian(3.0).unwrap(), phi);
    let integral = function_integral(&g);
    assert_eq!(integral.re, 0.0);
    assert_eq!(integral.im, 0.0);
}

#[test]
fn sphere_harmonic_validates_and_reports_statistics() {
    let one = SphereHarmonic::constant(2);
    assert_eq!(one.mean(), c(1.0, 0.0));
    assert_eq!(one.norm2(), 1.0);
    assert_eq!(one.sup_bound(), 1.0);
    assert_eq!(one.weight(), 0);

    let phi = SphereHarmonic::new(BidegreePolynomial::monomial(
        2,
        &[1, 0],
        &[0, 1],
        GRat::one(),
    ))
    .unwrap();
    assert_eq!(phi.mean(), c(0.0, 0.0));
    assert!((phi.norm2() - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(phi.sup_bound(), 1.0);
    assert_eq!(phi.bidegree(), (1, 1));

    // |z_0|² is not harmonic.
    let bad = SphereHarmonic::new(BidegreePolynomial::monomial(
        2,
        &[1, 0],
        &[1, 0],
        GRat::one(),
    ));
    assert!(matches!(bad, Err(EisensteinError::BadSphereFunction(_))));

    // Odd total degree cancels over ±v.
    let odd = SphereHarmonic::new(BidegreePolynomial::monomial(
        2,
        &[1, 0],
        &[0, 0],
        GRat::one(),
    ));
    assert!(matches!(odd, Err(EisensteinError::BadSphereFunction(_))));

    // Mixed bidegrees are rejected.
    let mixed = SphereHarmonic::new(
        BidegreePolynomial::monomial(2, &[2, 0], &[0, 0], GRat::one()).add(
            &BidegreePolynomial::monomial(2, &[1, 0], &[0, 1], GRat::one()),
        ),
    );
    assert!(matches!(mixed, Err(EisensteinError::BadSphereFunction(_))));

    let zero = SphereHarmonic::new(BidegreePolynomial::zero(2));
    assert!(matches!(zero, Err(EisensteinError::BadSphereFunction(_))));
}

#[test]
fn operators_reject_mismatched_inputs() {
    let g2 = SymplecticMatrix::identity(2);

    let low = eisenstein_series(c(3.0, 0.0), &g2, None, 8.0, 1.0);
    assert!(matches!(
        low,
        Err(EisensteinError::OutsideConvergenceRange { .. })
    ));

    let tight = eisenstein_series(c(4.05, 0.0), &g2, None, 8.0, 1e-6);
    assert!(matches!(tight, Err(EisensteinError::TailTooLarge { .. })));

    let phi1 = SphereHarmonic::constant(1);
    let wrong = eisenstein_series(c(8.0, 0.0), &g2, Some(&phi1), 8.0, 1.0);
    assert!(matches!(wrong, Err(EisensteinError::WrongRank { .. })));

    let indicator = ProductFunction::spherical(1, MellinPair::y_interval(0.25, 0.5).unwrap());
    let k1 = SpherePoint::new(&[1.0, 0.0]).unwrap();
    let slow = period_closed(&indicator, 1.0, &k1);
    assert!(matches!(slow, Err(EisensteinError::SlowDecay { .. })));

    let f2 = ProductFunction::spherical(2, MellinPair::log_gaussian(2.0).unwrap());
    let k2 = SpherePoint::new(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let rank = period_direct_n1(&f2, 1.0, &k2);
    assert!(matches!(rank, Err(EisensteinError::WrongRank { .. })));

    let direct = constant_term_direct(c(8.0, 0.0), &g2, 1.0, 4);
    assert!(matches!(direct, Err(EisensteinError::WrongRank { .. })));

    let closed = constant_term_closed(c(4.0, 0.0), &SymplecticMatrix::identity(1), 1.0, 1);
    assert!(matches!(closed, Err(EisensteinError::WrongRank { .. })));

    let twisted = iota_apply(&f2).unwrap();
    let refuse = twisted.truncation_radius(1e-6);
    assert!(matches!(refuse, Err(EisensteinError::SlowDecay { .. })));

    let bad = f2.truncation_radius(-1.0);
    assert!(matches!(bad, Err(EisensteinError::BadParameter(_))));

    let pairing = iota_pairing_value(&f2).unwrap();
    assert!(pairing.im.abs() < 1e-8 * pairing.re.abs().max(1.0));
}
