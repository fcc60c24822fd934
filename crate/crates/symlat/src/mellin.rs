//! Radial profiles on `(0, ∞)` and their transforms under the normalization
//!
//! ```text
//! ρ̂(s) = ∫₀^∞ ρ(y) · y^{−(s+1)} dy,      ρ(y) = (1/2πi) ∫_{(σ)} ρ̂(s) y^s ds.
//! ```
//!
//! Under `u = log y` this is a two-sided Laplace transform, so the usual
//! machinery applies: dilation `ρ(y/λ)` multiplies the transform by
//! `λ^{−s}`, and the line-integral pairing
//!
//! ```text
//! (1/2π) ∫_ℝ ρ̂₁(n+it) · conj(ρ̂₂(n+it)) dt = ∫₀^∞ ρ₁(y) ρ₂(y) y^{−2n−1} dy
//! ```
//!
//! holds for real profiles (both sides are computed here, by independent
//! routes, so they can be cross-checked).
//!
//! Profile families:
//! - [`MellinPair::LogGaussian`]: `ρ(y) = y^b e^{−(log y)²}` with the entire
//!   transform `ρ̂(s) = √π · e^{(b−s)²/4}`; super-exponential decay on every
//!   vertical line, so contour inversion is supported.
//! - [`MellinPair::YInterval`]: the indicator of `a < y ≤ b`, with
//!   `ρ̂(s) = (a^{−s} − b^{−s})/s` (and `log(b/a)` at `s = 0`). Its transform
//!   decays only like `1/|t|`, so numeric contour inversion is refused with
//!   a typed error rather than silently returning garbage.
//! - [`MellinPair::NumericBump`]: a profile tabulated on a uniform grid in
//!   `u = log y`; the transform is evaluated by quadrature.
//! - [`MellinPair::Dilated`]: `ρ(y/λ)` around any base profile.
//! - [`MellinPair::CriticalReflection`]: the profile whose transform is
//!   `± ρ̂(2n−s) · Z_m(2n−s)` around a base `ρ̂`; it is defined by that
//!   transform on the central line `Re s = n`, and point values are
//!   recovered by central-line quadrature when the base family certifies
//!   inversion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{z_factor, z_factor_unitary, ZFactorSpec};

/// Errors from profile construction and transform evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MellinError {
    /// Contour inversion needs certified decay of `ρ̂` on vertical lines.
    #[error("contour inversion unsupported for {family}: transform decays too slowly on vertical lines")]
    InversionUnsupported { family: String },
    /// Invalid family parameters.
    #[error("bad profile parameters: {0}")]
    BadParameters(String),
}

/// A radial profile together with the data needed to evaluate its
/// transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MellinPair {
    /// `ρ(y) = y^b · e^{−(log y)²}`.
    LogGaussian { b: f64 },
    /// Indicator of the interval `a < y ≤ b` (half-open, like the annulus
    /// region convention).
    YInterval { a: f64, b: f64 },
    /// Samples of `ρ(e^u)` on the uniform grid `u_min + k·Δu`.
    NumericBump {
        u_min: f64,
        u_max: f64,
        values: Vec<f64>,
    },
    /// `ρ(y/λ)` for a base profile.
    Dilated { lambda: f64, base: Box<MellinPair> },
    /// The profile with transform `sign · ρ̂(2n−s) · Z_m(2n−s)`, where `ρ̂`
    /// is the base transform, `n` is `half_rank`, `m` is `weight`, and
    /// `sign` is `-1` iff `negate`.
    ///
    /// On the central line `Re s = n` the factor `Z_m` has modulus one and
    /// is evaluated by the phase route ([`z_factor_unitary`]), so the
    /// transform is stable at any height there. Off that line the direct
    /// quotient is used; at its poles and ξ-singular points the transform
    /// returns NaN rather than an error, keeping the family's pointwise
    /// call shape. [`MellinPair::rho`] inverts the transform along the
    /// central line on demand (a full quadrature per call — tabulate with
    /// [`MellinPair::sampled`] before dense `y`-side work), and is NaN when
    /// the base family does not certify inversion.
    CriticalReflection {
        base: Box<MellinPair>,
        half_rank: u32,
        weight: u32,
        negate: bool,
    },
}

impl MellinPair {
    pub fn log_gaussian(b: f64) -> Result<Self, MellinError> {
        if !b.is_finite() {
            return Err(MellinError::BadParameters(format!("log-gaussian b = {b}")));
        }
        Ok(Self::LogGaussian { b })
    }

    pub fn y_interval(a: f64, b: f64) -> Result<Self, MellinError> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(MellinError::BadParameters(format!(
                "interval needs 0 < a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Self::YInterval { a, b })
    }

    pub fn numeric_bump(u_min: f64, u_max: f64, values: Vec<f64>) -> Result<Self, MellinError> {
        if !(u_min.is_finite() && u_max > u_min && values.len() >= 2) {
            return Err(MellinError::BadParameters(
                "bump needs u_min < u_max and at least 2 samples".into(),
            ));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(MellinError::BadParameters("non-finite bump sample".into()));
        }
        Ok(Self::NumericBump {
            u_min,
            u_max,
            values,
        })
    }

    /// Tabulates an existing profile on a uniform `log y` grid.
    pub fn sampled(base: &MellinPair, u_min: f64, u_max: f64, count: usize) -> Result<Self, MellinError> {
        if count < 2 {
            return Err(MellinError::BadParameters("need at least 2 samples".into()));
        }
        let h = (u_max - u_min) / (count - 1) as f64;
        let values = (0..count)
            .map(|k| base.rho((u_min + k as f64 * h).exp()))
            .collect();
        Self::numeric_bump(u_min, u_max, values)
    }

    /// The dilate `y ↦ ρ(y/λ)`.
    pub fn dilated(self, lambda: f64) -> Result<Self, MellinError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MellinError::BadParameters(format!("dilation λ = {lambda}")));
        }
        Ok(Self::Dilated {
            lambda,
            base: Box::new(self),
        })
    }

    /// The reflected profile for bidegree `(p, q)`: transform
    /// `(-1)^p · ρ̂(2n−s) · Z_{p+q}(2n−s)` around this profile's `ρ̂`.
    pub fn critical_reflection(self, n: u32, p: u32, q: u32) -> Result<Self, MellinError> {
        if n == 0 {
            return Err(MellinError::BadParameters(
                "reflection needs half-rank n >= 1".into(),
            ));
        }
        if (p + q) % 2 != 0 {
            return Err(MellinError::BadParameters(format!(
                "reflection weight p + q must be even, got ({p}, {q})"
            )));
        }
        Ok(Self::CriticalReflection {
            base: Box::new(self),
            half_rank: n,
            weight: p + q,
            negate: p % 2 != 0,
        })
    }

    /// Family name for error messages.
    pub fn family(&self) -> String {
        match self {
            Self::LogGaussian { .. } => "log-gaussian".into(),
            Self::YInterval { .. } => "y-interval".into(),
            Self::NumericBump { .. } => "numeric-bump".into(),
            Self::Dilated { base, .. } => format!("dilated({})", base.family()),
            Self::CriticalReflection { base, .. } => {
                format!("critical-reflection({})", base.family())
            }
        }
    }

    /// Pointwise profile value; zero for `y ≤ 0` and off the support.
    pub fn rho(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        match self {
            Self::LogGaussian { b } => {
                let u = y.ln();
                (b * u - u * u).exp()
            }
            Self::YInterval { a, b } => {
                if y > *a && y <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::NumericBump {
                u_min,
                u_max,
                values,
            } => {
                let u = y.ln();
                if u < *u_min || u > *u_max {
                    return 0.0;
                }
                let h = (u_max - u_min) / (values.len() - 1) as f64;
                let pos = (u - u_min) / h;
                let k = (pos.floor() as usize).min(values.len() - 2);
                let frac = pos - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
            Self::Dilated { lambda, base } => base.rho(y / lambda),
            Self::CriticalReflection {
                base, half_rank, ..
            } => {
                if !base.supports_inversion() {
                    return f64::NAN;
                }
                // The transform decays like the reflected base transform on
                // the central line (|Z_m| = 1 there), so the same trapezoid
                // window as the certified inversions applies.
                line_inversion(self, *half_rank as f64, y, 0.05, 40.0)
            }
        }
    }

    /// The transform `ρ̂(s) = ∫₀^∞ ρ(y) y^{−s−1} dy`.
    pub fn transform(&self, s: Complex64) -> Complex64 {
        match self {
            Self::LogGaussian { b } => {
                let w = Complex64::new(*b, 0.0) - s;
                std::f64::consts::PI.sqrt() * (w * w / 4.0).exp()
            }
            Self::YInterval { a, b } => {
                let la = a.ln();
                let lb = b.ln();
                if s.norm() < 1e-6 {
                    // (e^{−s·la} − e^{−s·lb})/s, expanded about s = 0 to
                    // avoid the removable singularity.
                    let c0 = lb - la;
                    let c1 = -(lb * lb - la * la) / 2.0;
                    let c2 = (lb * lb * lb - la * la * la) / 6.0;
                    Complex64::new(c0, 0.0) + s * (c1 + s * c2)
                } else {
                    ((-s * la).exp() - (-s * lb).exp()) / s
                }
            }
            Self::NumericBump {
                u_min,
                u_max,
                values,
            } => {
                // Trapezoid in u: ∫ ρ(e^u) e^{−su} du.
                let m = values.len();
                let h = (u_max - u_min) / (m - 1) as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, v) in values.iter().enumerate() {
                    let u = u_min + k as f64 * h;
                    let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
                    acc += w * v * (-s * u).exp();
                }
                acc * h
            }
            Self::Dilated { lambda, base } => {
                (-s * lambda.ln()).exp() * base.transform(s)
            }
            Self::CriticalReflection {
                base,
                half_rank,
                weight,
                negate,
            } => {
                let n = *half_rank;
                let w = Complex64::new(2.0 * n as f64, 0.0) - s;
                let z = if (w.re - n as f64).abs() < 1e-9 {
                    z_factor_unitary(n, *weight, w.im)
                } else {
                    z_factor(&ZFactorSpec {
                        n,
                        m: *weight,
                        s: w,
                    })
                };
                let sign = if *negate { -1.0 } else { 1.0 };
                match z {
                    Ok(zv) => sign * base.transform(w) * zv,
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            }
        }
    }

    /// `true` iff numeric contour inversion is certified for this family.
    ///
    /// A reflection answers `false` even over an invertible base: its decay
    /// is certified only on the central line `Re s = n` (off it the `Z_m`
    /// quotient underflows at large height), and [`MellinPair::rho`]
    /// already performs that central-line inversion internally.
    pub fn supports_inversion(&self) -> bool {
        match self {
            Self::LogGaussian { .. } => true,
            Self::YInterval { .. } | Self::NumericBump { .. } => false,
            Self::Dilated { base, .. } => base.supports_inversion(),
            Self::CriticalReflection { .. } => false,
        }
    }

    /// Effective support `[u_lo, u_hi]` in `u = log y` (where the profile
    /// is not negligible).
    pub fn u_support(&self) -> (f64, f64) {
        match self {
            Self::LogGaussian { b } => (b / 2.0 - 16.0, b / 2.0 + 16.0),
            Self::YInterval { a, b } => (a.ln(), b.ln()),
            Self::NumericBump { u_min, u_max, .. } => (*u_min, *u_max),
            Self::Dilated { lambda, base } => {
                let (lo, hi) = base.u_support();
                (lo + lambda.ln(), hi + lambda.ln())
            }
            Self::CriticalReflection { base, .. } => {
                // Up to the unitary factor the reflected transform belongs
                // to y^{2n} ρ(1/y), so the support negates; the factor
                // smears it, hence the margin.
                let (lo, hi) = base.u_support();
                (-hi - 4.0, -lo + 4.0)
            }
        }
    }
}

/// Numeric contour inversion `(1/2π) ∫_{−T}^{T} ρ̂(σ+it) y^{σ+it} dt`,
/// refused (typed) for families whose transform decay is not certified.
pub fn mellin_inverse(
    pair: &MellinPair,
    sigma: f64,
    y: f64,
    step: f64,
    t_max: f64,
) -> Result<f64, MellinError> {
    if !pair.supports_inversion() {
        return Err(MellinError::InversionUnsupported {
            family: pair.family(),
        });
    }
    if !(y > 0.0 && step > 0.0 && t_max > 0.0) {
        return Err(MellinError::BadParameters(format!(
            "inverse needs y, step, t_max > 0, got {y}, {step}, {t_max}"
        )));
    }
    Ok(line_inversion(pair, sigma, y, step, t_max))
}

/// Trapezoid for `(1/2π) ∫_{−T}^{T} ρ̂(σ+it) y^{σ+it} dt` with no decay
/// certification; callers own the choice of line.
fn line_inversion(pair: &MellinPair, sigma: f64, y: f64, step: f64, t_max: f64) -> f64 {
    let steps = (2.0 * t_max / step).ceil() as usize;
    let h = 2.0 * t_max / steps as f64;
    let lny = y.ln();
    let mut acc = 0.0f64;
    for k in 0..=steps {
        let t = -t_max + k as f64 * h;
        let s = Complex64::new(sigma, t);
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        acc += w * (pair.transform(s) * (s * lny).exp()).re;
    }
    acc * h / (2.0 * std::f64::consts::PI)
}

/// The pairing `∫₀^∞ ρ₁(y) ρ₂(y) y^{−2n−1} dy`, computed on the `y` side:
/// closed form for a pair of interval indicators, midpoint quadrature in
/// `u = log y` otherwise.
pub fn plancherel_pairing(p1: &MellinPair, p2: &MellinPair, n: u32) -> f64 {
    if let (MellinPair::YInterval { a: a1, b: b1 }, MellinPair::YInterval { a: a2, b: b2 }) =
        (p1, p2)
    {
        let lo = a1.max(*a2);
        let hi = b1.min(*b2);
        if hi <= lo {
            return 0.0;
        }
        // ∫ y^{−2n−1} dy = (lo^{−2n} − hi^{−2n})/(2n).
        let m = 2.0 * n as f64;
        return (lo.powf(-m) - hi.powf(-m)) / m;
    }
    let (lo1, hi1) = p1.u_support();
    let (lo2, hi2) = p2.u_support();
    let lo = lo1.max(lo2);
    let hi = hi1.min(hi2);
    if hi <= lo {
        return 0.0;
    }
    // Midpoint rule: avoids evaluating indicators exactly on their jumps.
    let cells = 20_000usize;
    let h = (hi - lo) / cells as f64;
    let w = -2.0 * n as f64;
    let mut acc = 0.0f64;
    let mut kahan_c = 0.0f64;
    for k in 0..cells {
        let u = lo + (k as f64 + 0.5) * h;
        let y = u.exp();
        let term = p1.rho(y) * p2.rho(y) * (w * u).exp();
        let t = acc + (term - kahan_c);
        kahan_c = (t - acc) - (term - kahan_c);
        acc = t;
    }
    acc * h
}

/// The same pairing computed on the transform side:
/// `(1/2π) ∫_{−T}^{T} ρ̂₁(n+it) · conj(ρ̂₂(n+it)) dt`.
pub fn plancherel_line_integral(
    p1: &MellinPair,
    p2: &MellinPair,
    n: u32,
    step: f64,
    t_max: f64,
) -> f64 {
    let steps = (2.0 * t_max / step).ceil() as usize;
    let h = 2.0 * t_max / steps as f64;
    let sigma = n as f64;
    let mut acc = 0.0f64;
    for k in 0..=steps {
        let t = -t_max + k as f64 * h;
        let s = Complex64::new(sigma, t);
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        acc += w * (p1.transform(s) * p2.transform(s).conj()).re;
    }
    acc * h / (2.0 * std::f64::consts::PI)
}
