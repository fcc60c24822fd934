//! Random symplectic lattices and Monte Carlo experiments.
//!
//! Two samplers target the invariant probability measure on the space of
//! unimodular symplectic lattices:
//!
//! * [`HaarSampler::exact_modular`] — rank one only. The space is the
//!   classical modular surface, and the invariant measure pushes forward to
//!   an explicit density in the `(x, y, θ)` coordinates of the standard
//!   fundamental domain, so independent exact draws are available by
//!   inverting the marginals in closed form.
//! * [`HaarSampler::random_walk`] — any rank. A multiplicative random walk
//!   `g ← γ · g · exp(ε X)` with Gaussian Lie-algebra directions `X`,
//!   renormalized by integer symplectic moves `γ` (see
//!   [`symplectic_reduce`]) so the floating-point representative stays
//!   well conditioned while the lattice it spans is untouched.
//!
//! Both samplers hand out *streams*: `sample(i)` derives an independent
//! generator for index `i` from the master seed, so parallel evaluation
//! order cannot change the draw.
//!
//! On top of the samplers sit the laboratory experiments: moment estimates
//! for truncated lattice sums ([`mc_moments`]), mean-square discrepancy of
//! counting estimators ([`discrepancy_meansquare`]), pointwise counting
//! error along dilations of a fixed star-shaped region ([`dilation_scan`]),
//! and dyadic second moments of counting deviations ([`schmidt_dyadic`]).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::eisenstein::{
    moment_rhs, siegel_transform_truncated, EisensteinError, ProductFunction,
};
use crate::lattice::{
    ball_volume, count_in_region, shortest_nonzero, LatticeBasis, LatticeError, RegionSpec,
};
use crate::mellin::MellinPair;
use crate::report::ExperimentReport;
use crate::special::SpecialError;
use crate::symplectic::{
    omega, symplectic_completion, IntegerSymplecticMatrix, SymplecticError, SymplecticMatrix,
};

/// Hard ceiling on the admissible dyadic depth of [`schmidt_deviations`];
/// level `T` enumerates on the order of `2^T` lattice points per sample,
/// so the cost doubles with each extra level.
pub const MAX_DYADIC_DEPTH: u32 = 14;

/// Matrix entries beyond this magnitude make enumeration and floating-point
/// validation unreliable; the walk restarts with a smaller step instead.
const CONDITION_LIMIT: f64 = 1e12;

/// Errors from samplers and Monte Carlo experiments.
#[derive(Debug, Error)]
pub enum SamplerError {
    /// The sampler rank and the test function (or region) rank disagree.
    #[error("rank mismatch: sampler has half-rank {sampler}, input has {input}")]
    WrongRank { sampler: usize, input: usize },
    /// A structurally invalid parameter.
    #[error("bad parameter: {0}")]
    BadParameter(String),
    /// The radial profile decays too slowly for a reliable truncation radius.
    #[error("radial profile `{family}` has a heavy tail; no finite truncation radius is safe")]
    SlowDecay { family: String },
    /// The walk could not keep the matrix well conditioned even after
    /// repeatedly halving the step size.
    #[error("random walk failed to stay well conditioned after {attempts} restarts")]
    ConditioningFailed { attempts: u32 },
    /// Lattice-layer failure.
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    /// Symplectic-layer failure.
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    /// Series/transform-layer failure.
    #[error(transparent)]
    Eisenstein(#[from] EisensteinError),
    /// Special-function failure.
    #[error(transparent)]
    Special(#[from] SpecialError),
}

fn zeta_real(x: f64) -> Result<f64, SamplerError> {
    Ok(crate::special::zeta_c(num_complex::Complex64::new(x, 0.0))?.re)
}

// ---------------------------------------------------------------------------
// Seed streams
// ---------------------------------------------------------------------------

/// SplitMix64 step: advances `state` and returns a well-mixed word.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the independent generator for stream `index` of a master seed.
///
/// The (seed, index) pair is mixed through SplitMix64 into a full 256-bit
/// ChaCha key, so distinct indices give statistically independent streams
/// and the draw for index `i` never depends on evaluation order.
fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// A reproducible sampler for the invariant probability measure on the
/// space of unimodular symplectic lattices of a fixed rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HaarSampler {
    /// Exact independent draws on the rank-one space (modular surface).
    ExactModular {
        /// Master seed; `sample(i)` uses stream `i` of this seed.
        seed: u64,
    },
    /// Multiplicative random walk with periodic integer renormalization.
    RandomWalk {
        /// Half-rank `n` of the sampled group elements.
        n: usize,
        /// Lie-algebra step size `ε`.
        step: f64,
        /// Number of walk steps per sample.
        burn_in: u32,
        /// Renormalize with an integer symplectic move every this many steps.
        reduce_every: u32,
        /// Master seed; `sample(i)` uses stream `i` of this seed.
        seed: u64,
    },
}

impl HaarSampler {
    /// Exact rank-one sampler with independent draws.
    pub fn exact_modular(seed: u64) -> Self {
        HaarSampler::ExactModular { seed }
    }

    /// Random-walk sampler with the default step `ε = 0.2`, 400 walk steps
    /// per sample, and renormalization every 8 steps.
    ///
    /// Every sample index runs its own chain from the identity, so the
    /// chain must mix on its own: the defaults put the diffusion scale
    /// `ε·√L = 4` deep past the point where the rank-one height marginal
    /// passes a 1%-level Kolmogorov–Smirnov test, and the rank-two moment
    /// estimates agree with the closed forms within Monte Carlo error.
    /// Shorter, cheaper chains remain available through
    /// [`HaarSampler::random_walk_custom`] but bias the estimates toward
    /// the starting lattice.
    pub fn random_walk(n: usize, seed: u64) -> Result<Self, SamplerError> {
        HaarSampler::random_walk_custom(n, 0.2, 400, 8, seed)
    }

    /// Random-walk sampler with explicit walk parameters.
    pub fn random_walk_custom(
        n: usize,
        step: f64,
        burn_in: u32,
        reduce_every: u32,
        seed: u64,
    ) -> Result<Self, SamplerError> {
        if n == 0 {
            return Err(SamplerError::BadParameter("half-rank must be positive".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(SamplerError::BadParameter(format!("step size {step} must be positive")));
        }
        if burn_in == 0 || reduce_every == 0 {
            return Err(SamplerError::BadParameter(
                "burn-in and renormalization period must be positive".into(),
            ));
        }
        Ok(HaarSampler::RandomWalk {
            n,
            step,
            burn_in,
            reduce_every,
            seed,
        })
    }

    /// Half-rank `n` of sampled group elements (lattices live in `ℝ^{2n}`).
    pub fn half_rank(&self) -> usize {
        match self {
            HaarSampler::ExactModular { .. } => 1,
            HaarSampler::RandomWalk { n, .. } => *n,
        }
    }

    /// The master seed.
    pub fn seed(&self) -> u64 {
        match self {
            HaarSampler::ExactModular { seed } | HaarSampler::RandomWalk { seed, .. } => *seed,
        }
    }

    /// Whether draws follow the invariant measure exactly (as opposed to a
    /// random-walk approximation).
    pub fn is_exact(&self) -> bool {
        matches!(self, HaarSampler::ExactModular { .. })
    }

    /// Draws sample `index` of this seed's stream. Deterministic: the same
    /// `(sampler, index)` always returns the same matrix, regardless of
    /// which other indices were drawn before.
    pub fn sample(&self, index: u64) -> Result<SymplecticMatrix, SamplerError> {
        match self {
            HaarSampler::ExactModular { seed } => {
                let mut rng = stream_rng(*seed, index);
                Ok(modular_matrix(&mut rng))
            }
            HaarSampler::RandomWalk {
                n,
                step,
                burn_in,
                reduce_every,
                seed,
            } => {
                let mut rng = stream_rng(*seed, index);
                walk_sample(*n, *step, *burn_in, *reduce_every, &mut rng)
            }
        }
    }

    /// Draws sample `index` as a lattice basis (rows of the group element).
    pub fn sample_basis(&self, index: u64) -> Result<LatticeBasis, SamplerError> {
        Ok(LatticeBasis::from_symplectic(&self.sample(index)?))
    }
}

/// Draws `(x, y, θ)` for the exact rank-one sampler: `x` is the horizontal
/// coordinate of the fundamental-domain marginal, `y` the height, `θ` the
/// rotation angle.
fn draw_modular(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let w: f64 = rng.gen();
    // Horizontal marginal: density 3/2 · dx on |x| ≤ 1/2 after integrating
    // the hyperbolic area element over y > y_min(x) = √(1−x²); inverting
    // the CDF gives x = sin(πu/3 − π/6).
    let x = (PI * u / 3.0 - PI / 6.0).sin();
    // Conditional height: density ∝ dy/y² on y > √(1−x²), so
    // y = √(1−x²)/(1−v) inverts the conditional CDF.
    let y = (1.0 - x * x).sqrt() / (1.0 - v);
    let theta = 2.0 * PI * w;
    (x, y, theta)
}

/// Assembles the group element for a fundamental-domain draw: the upper
/// triangular part places the lattice at (x, y), the rotation spins the
/// frame without moving the lattice class.
fn modular_matrix(rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let (x, y, theta) = draw_modular(rng);
    let sy = y.sqrt();
    let (c, s) = (theta.cos(), theta.sin());
    // Rows (1/√y, 0) and (x/√y, √y), then right rotation by θ.
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[
            c / sy,
            s / sy,
            x * c / sy - sy * s,
            x * s / sy + sy * c,
        ],
    );
    SymplecticMatrix::new(mat).expect("closed-form rank-one draw is symplectic by construction")
}

/// Distribution function of the height marginal `y` under the exact
/// rank-one sampler. Closed form:
///
/// * `F(y) = 0` for `y < √3/2`,
/// * `F(y) = (6/π)·[arcsin(1/2) − arcsin(x₀) − (1/2 − x₀)/y]` with
///   `x₀ = √(1−y²)` for `√3/2 ≤ y < 1`,
/// * `F(y) = 1 − 3/(πy)` for `y ≥ 1`.
pub fn modular_y_cdf(y: f64) -> f64 {
    let lower = 3f64.sqrt() / 2.0;
    if y < lower {
        0.0
    } else if y >= 1.0 {
        1.0 - 3.0 / (PI * y)
    } else {
        let x0 = (1.0 - y * y).sqrt();
        (6.0 / PI) * ((0.5f64).asin() - x0.asin() - (0.5 - x0) / y)
    }
}

// ---------------------------------------------------------------------------
// Random walk machinery
// ---------------------------------------------------------------------------

/// A Gaussian direction in the symplectic Lie algebra: `X = S·Ω` with `S`
/// symmetric, entries iid standard normal (the `n(2n+1)` free coefficients).
fn lie_direction(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let d = 2 * n;
    let mut sym = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let g: f64 = rng.sample(StandardNormal);
            sym[(i, j)] = g;
            sym[(j, i)] = g;
        }
    }
    sym * omega(n)
}

/// Matrix exponential by scaling-and-squaring over a fixed-order Taylor
/// core. Inputs are small multiples of bounded directions, so the scaled
/// norm is well under 1 and fourteen terms reach double precision.
fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = m.nrows();
    let norm = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * d as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let mut term = DMatrix::identity(d, d);
    let mut acc = DMatrix::identity(d, d);
    for j in 1..=14 {
        term = &term * &scaled / j as f64;
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Replaces `g` by `γ·g` with `γ` integer symplectic, chosen so the product
/// has a smaller Frobenius norm. The lattice spanned by the rows is
/// unchanged; only the floating-point representative improves.
///
/// Strategy: find the shortest nonzero lattice vector, complete its
/// coefficient row to an integer symplectic matrix, and accept the move if
/// it shrinks the Frobenius norm; repeat until no progress.
pub fn symplectic_reduce(
    g: &SymplecticMatrix,
) -> Result<(IntegerSymplecticMatrix, SymplecticMatrix), SamplerError> {
    let n = g.half_rank();
    let mut gamma = IntegerSymplecticMatrix::identity(n);
    // The loop multiplies by integer matrices with possibly large entries,
    // which amplifies any residual error in the symplectic form; keep the
    // state raw and re-project before each typed wrap.
    let mut current: DMatrix<f64> = g.matrix().clone();
    let mut best = frobenius(&current);
    for _ in 0..20 {
        let wrapped = SymplecticMatrix::new(resymplectify(&current, n))?;
        let basis = LatticeBasis::from_symplectic(&wrapped);
        let shortest = shortest_nonzero(&basis)?;
        let candidate = symplectic_completion(&shortest.coeffs)?;
        let moved = candidate.to_real().matrix() * &current;
        let norm = frobenius(&moved);
        if norm < best * 0.999 {
            gamma = candidate.mul(&gamma)?;
            best = norm;
            current = moved;
        } else {
            break;
        }
    }
    Ok((gamma, SymplecticMatrix::new(resymplectify(&current, n))?))
}

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs one full walk chain for a single sample index.
///
/// Each step multiplies on the right by `exp(ε X)` with a fresh Gaussian
/// direction; every `reduce_every` steps (and at the end) an integer
/// renormalization keeps the representative well conditioned. If entries
/// still blow past [`CONDITION_LIMIT`] or the symplectic identity drifts,
/// the chain restarts with `ε` halved.
fn walk_sample(
    n: usize,
    step: f64,
    burn_in: u32,
    reduce_every: u32,
    rng: &mut ChaCha8Rng,
) -> Result<SymplecticMatrix, SamplerError> {
    const MAX_ATTEMPTS: u32 = 6;
    let mut eps = step;
    for _attempt in 0..MAX_ATTEMPTS {
        match walk_attempt(n, eps, burn_in, reduce_every, rng)? {
            Some(g) => return Ok(g),
            None => eps *= 0.5,
        }
    }
    Err(SamplerError::ConditioningFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Newton iteration back onto the symplectic form: with
/// `E = gΩgᵀ − Ω` (antisymmetric), the update `g ← (I + EΩ/2)·g` cancels
/// the form error to first order, leaving `O(‖E‖²)`; two iterations put
/// any realistic drift at the floating point floor. Each multiplication
/// in the chain adds rounding of order `‖g‖²·ε_mach`, so repairing once
/// per renormalization window keeps the accumulated error flat over
/// arbitrarily long chains.
fn resymplectify(g: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let om = omega(n);
    let mut out = g.clone();
    for _ in 0..2 {
        let error = &out * &om * out.transpose() - &om;
        let half_correction = error * &om * 0.5;
        out = &out + half_correction * &out;
    }
    out
}

/// One attempt at the walk; `Ok(None)` signals "restart with smaller step".
///
/// The chain state is kept as a raw matrix between renormalizations: per
/// step the form error only drifts by rounding, and each window ends with
/// a projection back onto the form followed by an integer reduction, so
/// the strict symplectic validation only runs on repaired matrices.
fn walk_attempt(
    n: usize,
    eps: f64,
    burn_in: u32,
    reduce_every: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Option<SymplecticMatrix>, SamplerError> {
    let mut g = DMatrix::<f64>::identity(2 * n, 2 * n);
    let finish = |raw: DMatrix<f64>| -> Result<Option<SymplecticMatrix>, SamplerError> {
        let wrapped = match SymplecticMatrix::new(resymplectify(&raw, n)) {
            Ok(v) => v,
            // Drift past the symplectic tolerance even after the repair
            // step: the excursion is numerically lost, retry smaller.
            Err(SymplecticError::NotSymplectic { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match symplectic_reduce(&wrapped) {
            Ok((_, reduced)) => Ok(Some(reduced)),
            Err(SamplerError::Symplectic(SymplecticError::NotSymplectic { .. })) => Ok(None),
            Err(e) => Err(e),
        }
    };
    for k in 1..=burn_in {
        let direction = lie_direction(n, rng) * eps;
        g *= matrix_exp(&direction);
        if g.iter().any(|x| x.abs() > CONDITION_LIMIT) {
            return Ok(None);
        }
        if k % reduce_every == 0 {
            g = match finish(g)? {
                Some(reduced) => reduced.matrix().clone(),
                None => return Ok(None),
            };
        }
    }
    finish(g)
}

// ---------------------------------------------------------------------------
// Moment experiments
// ---------------------------------------------------------------------------

/// Truncation radius for Monte Carlo evaluation of a lattice sum: chosen so
/// the *integrated* (volume-weighted) tail of the radial profile is
/// negligible relative to its total mass, which controls the truncation
/// bias of the sample mean even though individual lattices may weight the
/// tail differently.
pub fn mc_truncation_radius(f: &ProductFunction) -> Result<f64, SamplerError> {
    mc_radius_radial(f.radial(), f.half_rank())
}

fn mc_radius_radial(radial: &MellinPair, n: usize) -> Result<f64, SamplerError> {
    match radial {
        MellinPair::YInterval { a, .. } => Ok(1.0 / a),
        MellinPair::LogGaussian { b } => {
            // Mass integrand in w = log r is e^{(2n−b)w − w²} up to constants:
            // a Gaussian in w centered at (2n−b)/2 with σ = 1/√2. Cutting
            // 2.75/σ... i.e. at center + 2.75 leaves a relative tail below
            // 1e−4 of the total mass.
            let center = 0.5 * (2.0 * n as f64 - b);
            Ok((center + 2.75).exp())
        }
        MellinPair::NumericBump { u_min, .. } => Ok((-u_min).exp()),
        MellinPair::Dilated { lambda, base } => Ok(mc_radius_radial(base, n)? / lambda),
        MellinPair::CriticalReflection { .. } => Err(SamplerError::SlowDecay {
            family: radial.family(),
        }),
    }
}

/// Sample mean and its standard error (`s/√N`, zero for fewer than two
/// samples).
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Result of a two-moment Monte Carlo run: both estimates packaged with
/// their closed-form targets and pass/fail verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentExperiment {
    /// Mean of the (real part of the) truncated lattice sum against the
    /// closed-form first moment.
    pub first: ExperimentReport,
    /// Mean of the squared modulus against the closed-form second moment.
    pub second: ExperimentReport,
    /// Truncation radius used for every per-lattice sum.
    pub radius: f64,
}

/// Estimates the first and second moments of the truncated lattice sum of
/// `f` over `samples` random lattices, comparing each against its
/// closed-form target with tolerance `rel_tolerance · |target|` (or three
/// standard errors, whichever is larger).
pub fn mc_moments(
    f: &ProductFunction,
    sampler: &HaarSampler,
    samples: u64,
    rel_tolerance: f64,
) -> Result<MomentExperiment, SamplerError> {
    if samples == 0 {
        return Err(SamplerError::BadParameter("need at least one sample".into()));
    }
    if !(rel_tolerance > 0.0 && rel_tolerance.is_finite()) {
        return Err(SamplerError::BadParameter(format!(
            "relative tolerance {rel_tolerance} must be positive"
        )));
    }
    if f.half_rank() != sampler.half_rank() {
        return Err(SamplerError::WrongRank {
            sampler: sampler.half_rank(),
            input: f.half_rank(),
        });
    }
    let targets = moment_rhs(f)?;
    let radius = mc_truncation_radius(f)?;
    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64), SamplerError> {
            let basis = sampler.sample_basis(i)?;
            let (theta, _) = siegel_transform_truncated(f, &basis, radius)?;
            Ok((theta.re, theta.norm_sqr()))
        })
        .collect::<Result<_, _>>()?;
    let firsts: Vec<f64> = per_sample.iter().map(|p| p.0).collect();
    let seconds: Vec<f64> = per_sample.iter().map(|p| p.1).collect();
    let (m1, s1) = mean_stderr(&firsts);
    let (m2, s2) = mean_stderr(&seconds);
    let t1 = targets.first_rhs.re;
    let t2 = targets.second_rhs.re;
    Ok(MomentExperiment {
        first: ExperimentReport::equality(
            "first-moment",
            m1,
            s1,
            t1,
            rel_tolerance * t1.abs(),
            samples,
            sampler.seed(),
        ),
        second: ExperimentReport::equality(
            "second-moment",
            m2,
            s2,
            t2,
            rel_tolerance * t2.abs(),
            samples,
            sampler.seed(),
        ),
        radius,
    })
}

// ---------------------------------------------------------------------------
// Discrepancy experiments
// ---------------------------------------------------------------------------

/// Mean-square relative counting errors over random lattices, with their
/// variance bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscrepancyExperiment {
    /// `E[(N_prim/ (vol/ζ(2n)) − 1)²]` against the bound `4ζ(2n)/vol`.
    pub primitive: ExperimentReport,
    /// `E[(N_all/vol − 1)²]` against `4ζ(n)²/(ζ(2n)·vol)` (infinite bound
    /// in rank one, where the all-points variance constant diverges).
    pub all_points: ExperimentReport,
}

/// Estimates the mean-square relative error of lattice-point counts in a
/// fixed region over random lattices, for both primitive and unrestricted
/// counts, against the closed-form variance bounds.
///
/// The region must not contain the origin (counts are over nonzero points;
/// a region hugging the origin has no volume-count law of the advertised
/// shape).
pub fn discrepancy_meansquare(
    region: &RegionSpec,
    sampler: &HaarSampler,
    samples: u64,
) -> Result<DiscrepancyExperiment, SamplerError> {
    if samples == 0 {
        return Err(SamplerError::BadParameter("need at least one sample".into()));
    }
    let n = sampler.half_rank();
    let d = 2 * n;
    let volume = region.volume(d);
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(SamplerError::BadParameter(format!(
            "region volume {volume} must be positive and finite"
        )));
    }
    if region_contains_origin(region) {
        return Err(SamplerError::BadParameter(
            "region must exclude the origin".into(),
        ));
    }
    let zeta_2n = zeta_real(2.0 * n as f64)?;
    let prim_expect = volume / zeta_2n;
    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64), SamplerError> {
            let basis = sampler.sample_basis(i)?;
            let counts = count_in_region(&basis, region)?;
            let d_all = counts.all as f64 / volume - 1.0;
            let d_prim = counts.primitive as f64 / prim_expect - 1.0;
            Ok((d_prim * d_prim, d_all * d_all))
        })
        .collect::<Result<_, _>>()?;
    let prims: Vec<f64> = per_sample.iter().map(|p| p.0).collect();
    let alls: Vec<f64> = per_sample.iter().map(|p| p.1).collect();
    let (mp, sp) = mean_stderr(&prims);
    let (ma, sa) = mean_stderr(&alls);
    let prim_bound = 4.0 * zeta_2n / volume;
    let all_bound = if n == 1 {
        f64::INFINITY
    } else {
        let zeta_n = zeta_real(n as f64)?;
        4.0 * zeta_n * zeta_n / (zeta_2n * volume)
    };
    Ok(DiscrepancyExperiment {
        primitive: ExperimentReport::upper_bound(
            "primitive-discrepancy-meansquare",
            mp,
            sp,
            prim_bound,
            samples,
            sampler.seed(),
        ),
        all_points: ExperimentReport::upper_bound(
            "discrepancy-meansquare",
            ma,
            sa,
            all_bound,
            samples,
            sampler.seed(),
        ),
    })
}

fn region_contains_origin(region: &RegionSpec) -> bool {
    match region {
        RegionSpec::Ball { center, radius } => norm(center) <= *radius,
        RegionSpec::Annulus {
            center,
            r_inner,
            r_outer,
        } => {
            let dist = norm(center);
            dist > *r_inner && dist <= *r_outer
        }
        RegionSpec::Box { lo, hi } => lo.iter().zip(hi).all(|(a, b)| *a <= 0.0 && 0.0 < *b),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Dilation scans
// ---------------------------------------------------------------------------

/// One piece of a region built as a difference of balls: the outer ball
/// `‖x − center‖ ≤ r_outer` minus the closed removed ball of radius
/// `r_inner` around `inner_center` (the outer center itself when no
/// separate hole center is given). With distinct centers the piece is a
/// genuinely non-star-shaped ball difference; with `r_inner = 0` it is a
/// solid ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarPiece {
    /// Center of the outer ball.
    pub center: Vec<f64>,
    /// Radius of the removed ball (0 for a solid ball).
    pub r_inner: f64,
    /// Outer radius.
    pub r_outer: f64,
    /// Center of the removed ball; `None` means concentric with the outer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_center: Option<Vec<f64>>,
}

impl StarPiece {
    /// Solid ball piece.
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        StarPiece {
            center,
            r_inner: 0.0,
            r_outer: radius,
            inner_center: None,
        }
    }

    /// Spherical-shell piece (concentric removed ball).
    pub fn shell(center: Vec<f64>, r_inner: f64, r_outer: f64) -> Self {
        StarPiece {
            center,
            r_inner,
            r_outer,
            inner_center: None,
        }
    }

    /// Difference of two balls with distinct centers: the outer ball minus
    /// a removed ball that must lie fully inside it.
    pub fn difference(
        center: Vec<f64>,
        r_outer: f64,
        inner_center: Vec<f64>,
        r_inner: f64,
    ) -> Self {
        StarPiece {
            center,
            r_inner,
            r_outer,
            inner_center: Some(inner_center),
        }
    }

    /// Volume of the piece in dimension `d` (exact for a contained hole).
    pub fn volume(&self, d: usize) -> f64 {
        ball_volume(d, self.r_outer) - ball_volume(d, self.r_inner)
    }

    /// Counts nonzero lattice points in the piece dilated by `t`. The
    /// off-center difference subtracts the removed-ball count from the
    /// outer-ball count, which is exact because the hole is contained in
    /// the outer ball and the zero vector is never counted.
    fn count_dilated(
        &self,
        basis: &LatticeBasis,
        t: f64,
    ) -> Result<crate::lattice::RegionCount, SamplerError> {
        let scale = |c: &[f64]| c.iter().map(|x| x * t).collect::<Vec<f64>>();
        match &self.inner_center {
            None => {
                let center = scale(&self.center);
                let region = if self.r_inner == 0.0 {
                    RegionSpec::Ball {
                        center,
                        radius: t * self.r_outer,
                    }
                } else {
                    RegionSpec::Annulus {
                        center,
                        r_inner: t * self.r_inner,
                        r_outer: t * self.r_outer,
                    }
                };
                Ok(count_in_region(basis, &region)?)
            }
            Some(hole) => {
                let outer = count_in_region(
                    basis,
                    &RegionSpec::Ball {
                        center: scale(&self.center),
                        radius: t * self.r_outer,
                    },
                )?;
                let removed = count_in_region(
                    basis,
                    &RegionSpec::Ball {
                        center: scale(hole),
                        radius: t * self.r_inner,
                    },
                )?;
                Ok(crate::lattice::RegionCount {
                    all: outer.all - removed.all,
                    primitive: outer.primitive - removed.primitive,
                })
            }
        }
    }

    fn validate(&self, d: usize) -> Result<(), SamplerError> {
        if self.center.len() != d {
            return Err(SamplerError::WrongRank {
                sampler: d / 2,
                input: self.center.len() / 2,
            });
        }
        if !(self.r_inner >= 0.0 && self.r_outer > self.r_inner && self.r_outer.is_finite()) {
            return Err(SamplerError::BadParameter(format!(
                "piece radii ({}, {}] are invalid",
                self.r_inner, self.r_outer
            )));
        }
        let hole = self.inner_center.as_deref().unwrap_or(&self.center);
        if hole.len() != d {
            return Err(SamplerError::WrongRank {
                sampler: d / 2,
                input: hole.len() / 2,
            });
        }
        let offset: f64 = self
            .center
            .iter()
            .zip(hole)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        // The hole must lie inside the outer ball so that volumes and
        // counts subtract exactly.
        if offset + self.r_inner > self.r_outer + 1e-12 {
            return Err(SamplerError::BadParameter(format!(
                "removed ball (offset {offset:.6}, radius {}) pokes out of the \
                 outer ball (radius {})",
                self.r_inner, self.r_outer
            )));
        }
        // Every dilate of the piece must stay away from the origin, which
        // holds exactly when the origin is not in the closed piece: either
        // covered by the removed ball or outside the outer ball.
        let origin_in_outer = norm(&self.center) <= self.r_outer;
        let origin_in_hole = self.r_inner > 0.0 && norm(hole) <= self.r_inner;
        if origin_in_outer && !origin_in_hole {
            return Err(SamplerError::BadParameter(
                "piece contains the origin; dilations would not exclude the zero vector".into(),
            ));
        }
        Ok(())
    }
}

/// Counting data for one dilation factor of a star-shaped region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    /// Dilation factor.
    pub t: f64,
    /// Volume of the dilated region.
    pub volume: f64,
    /// Nonzero lattice points in the dilated region (all points).
    pub count_all: u64,
    /// Primitive lattice points in the dilated region.
    pub count_primitive: u64,
    /// Relative counting error `|N_all/vol − 1|`.
    pub d_all: f64,
    /// Relative counting error `|N_prim/(vol/ζ(2n)) − 1|`.
    pub d_primitive: f64,
    /// Reference decay profile `log(t)²/tⁿ` for comparison.
    pub bound: f64,
}

/// Counts lattice points of one fixed lattice in dilations `t·B` of a
/// region `B` given as a disjoint union of ball-difference pieces
/// (disjointness is the caller's responsibility), and records the relative
/// counting errors next to the `log(t)²/tⁿ` decay profile.
///
/// The pieces must have total volume 1 and must exclude the origin.
pub fn dilation_scan(
    pieces: &[StarPiece],
    basis: &LatticeBasis,
    t_grid: &[f64],
) -> Result<Vec<DiscrepancyRecord>, SamplerError> {
    if pieces.is_empty() || t_grid.is_empty() {
        return Err(SamplerError::BadParameter(
            "need at least one piece and one dilation factor".into(),
        ));
    }
    let d = basis.dimension();
    let n = basis.half_rank();
    for piece in pieces {
        piece.validate(d)?;
    }
    let total_volume: f64 = pieces.iter().map(|p| p.volume(d)).sum();
    if (total_volume - 1.0).abs() > 1e-9 {
        return Err(SamplerError::BadParameter(format!(
            "pieces have total volume {total_volume}, expected 1"
        )));
    }
    let zeta_2n = zeta_real(2.0 * n as f64)?;
    let mut records = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SamplerError::BadParameter(format!(
                "dilation factor {t} must be positive"
            )));
        }
        let mut all = 0u64;
        let mut primitive = 0u64;
        for piece in pieces {
            let counts = piece.count_dilated(basis, t)?;
            all += counts.all;
            primitive += counts.primitive;
        }
        let volume = total_volume * t.powi(d as i32);
        let d_all = (all as f64 / volume - 1.0).abs();
        let d_primitive = (primitive as f64 / (volume / zeta_2n) - 1.0).abs();
        records.push(DiscrepancyRecord {
            t,
            volume,
            count_all: all,
            count_primitive: primitive,
            d_all,
            d_primitive,
            bound: t.ln().powi(2) / t.powi(n as i32),
        });
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// Dyadic counting deviations
// ---------------------------------------------------------------------------

/// Deviations `S_N = #(primitive points in the annulus 1 < ‖x‖ ≤ R_N) −
/// N/ζ(2n)` for `N = 1, …, 2^t`, where `R_N` is chosen so the annulus has
/// volume exactly `N`.
pub fn schmidt_deviations(basis: &LatticeBasis, t: u32) -> Result<Vec<f64>, SamplerError> {
    if t > MAX_DYADIC_DEPTH {
        return Err(SamplerError::BadParameter(format!(
            "dyadic depth {t} exceeds the supported maximum {MAX_DYADIC_DEPTH}"
        )));
    }
    let d = basis.dimension();
    let n = basis.half_rank();
    let n_max = 1u64 << t;
    // ball_volume(d, R) = unit·R^{2n} with unit = ball_volume(d, 1), so the
    // annulus (1, R_N] has volume N exactly when R_N = (1 + N/unit)^{1/2n}.
    let unit = ball_volume(d, 1.0);
    let r_max = (1.0 + n_max as f64 / unit).powf(1.0 / d as f64);
    // One enumeration pass: for each primitive point with ‖v‖ > 1, find the
    // first N whose annulus contains it and record it in a difference
    // array; prefix sums then give all 2^t counts at once.
    let en = crate::lattice::Enumerator::new(basis)?;
    let center = vec![0.0; d];
    let mut first_level = vec![0u64; n_max as usize + 2];
    en.visit_ball(&center, r_max, |pt| {
        if pt.is_zero() || !pt.is_primitive() || pt.dist2 <= 1.0 {
            return;
        }
        // ‖v‖ ≤ R_N  ⟺  N ≥ unit·(‖v‖^{2n} − 1).
        let level = (unit * (pt.dist2.powi(n as i32) - 1.0)).ceil() as u64;
        let level = level.max(1);
        if level <= n_max {
            first_level[level as usize] += 1;
        }
    })?;
    let density = 1.0 / zeta_real(2.0 * n as f64)?;
    let mut deviations = Vec::with_capacity(n_max as usize);
    let mut running = 0u64;
    for level in 1..=n_max {
        running += first_level[level as usize];
        deviations.push(running as f64 - level as f64 * density);
    }
    Ok(deviations)
}

/// Smallest volume `N₀` from which the deviation profile stays inside the
/// envelope `√N · ln²N`: every `N ≥ N₀` in the computed range satisfies
/// `|S_N| ≤ √N ln²N`. Returns `None` if the final entry still violates the
/// envelope, so no onset can be certified from this range.
pub fn deviation_onset(deviations: &[f64]) -> Option<u64> {
    let mut last_violation = 0u64;
    for (idx, s_n) in deviations.iter().enumerate() {
        let n = (idx + 1) as f64;
        let envelope = n.sqrt() * n.ln().powi(2);
        if s_n.abs() > envelope {
            last_violation = idx as u64 + 1;
        }
    }
    if last_violation == deviations.len() as u64 {
        None
    } else {
        Some(last_violation + 1)
    }
}

/// Dyadic second-moment experiment for counting deviations: averages
/// `Σ_j Σ_m |S_{m·2^j} − S_{(m−1)·2^j}|²` (over all dyadic intervals up to
/// depth `t`, with `S_0 = 0`) over random lattices, against the bound
/// `(4/ζ(2n)) · (t+1) · 2^t`.
pub fn schmidt_dyadic(
    sampler: &HaarSampler,
    samples: u64,
    t: u32,
) -> Result<ExperimentReport, SamplerError> {
    if samples == 0 {
        return Err(SamplerError::BadParameter("need at least one sample".into()));
    }
    if t > MAX_DYADIC_DEPTH {
        return Err(SamplerError::BadParameter(format!(
            "dyadic depth {t} exceeds the supported maximum {MAX_DYADIC_DEPTH}"
        )));
    }
    let n = sampler.half_rank();
    let per_sample: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64, SamplerError> {
            let basis = sampler.sample_basis(i)?;
            let s = schmidt_deviations(&basis, t)?;
            let at = |idx: u64| if idx == 0 { 0.0 } else { s[idx as usize - 1] };
            let mut total = 0.0;
            for j in 0..=t {
                let width = 1u64 << j;
                for m in 1..=(1u64 << (t - j)) {
                    let diff = at(m * width) - at((m - 1) * width);
                    total += diff * diff;
                }
            }
            Ok(total)
        })
        .collect::<Result<_, _>>()?;
    let (mean, stderr) = mean_stderr(&per_sample);
    let bound = 4.0 / zeta_real(2.0 * n as f64)?
        * (t as f64 + 1.0)
        * (1u64 << t) as f64;
    Ok(ExperimentReport::upper_bound(
        "dyadic-deviation-meansquare",
        mean,
        stderr,
        bound,
        samples,
        sampler.seed(),
    ))
}
