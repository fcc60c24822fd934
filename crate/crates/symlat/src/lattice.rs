//! Lattice-point machinery: LLL reduction, Fincke–Pohst enumeration in
//! balls, annuli and boxes, and counting with primitivity bookkeeping.
//!
//! A lattice is given by a **row basis**: the lattice is
//! `{x · B : x ∈ ℤ^d}` with the rows of `B` as generators, matching the
//! row-vector group convention used across the crate.
//!
//! Enumeration first LLL-reduces the basis (δ = 0.99, float Gram–Schmidt,
//! exact integer transform), then walks the Fincke–Pohst tree of the
//! reduced basis with an optional center offset. Pruning bounds carry a
//! relative slack of `1e-9` so boundary points cannot be lost to rounding;
//! the final membership test recomputes the distance directly from the
//! assembled vector (with a `1e-12` relative tolerance), which keeps the
//! accept/reject rule independent of the Gram–Schmidt recursion.
//!
//! Counts never include the zero vector. Primitivity of a point is decided
//! by the gcd of its coefficient vector, which is invariant under the
//! unimodular change of basis done by the reduction.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::symplectic::SymplecticMatrix;

/// Hard cap on enumerated points per call; a predicted count above this is
/// rejected before any work is done.
pub const ENUMERATION_CAP: u64 = 100_000_000;

/// Errors from reduction, enumeration and counting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    /// Basis matrix is not square/even-dimensional or is singular.
    #[error("bad basis: {0}")]
    BadBasis(String),
    /// Predicted or actual point count exceeds [`ENUMERATION_CAP`].
    #[error("enumeration would visit ~{predicted:.3e} points (cap {cap})")]
    CapExceeded { predicted: f64, cap: u64 },
    /// Integer coefficients left the i64 range.
    #[error("integer overflow in basis transform")]
    Overflow,
    /// Reduction failed to converge (pathologically conditioned basis).
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    /// Region parameters are inconsistent (negative radius, reversed box…).
    #[error("bad region: {0}")]
    BadRegion(String),
}

/// Row basis of a full-rank lattice in ℝ^d (d even).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    rows: DMatrix<f64>,
    n: usize,
}

impl LatticeBasis {
    /// Wraps a `2n × 2n` nonsingular row matrix.
    pub fn from_rows(rows: DMatrix<f64>) -> Result<Self, LatticeError> {
        let (r, c) = rows.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(LatticeError::BadBasis(format!(
                "expected square even-dimensional basis, got {r}×{c}"
            )));
        }
        if !rows.iter().all(|x| x.is_finite()) {
            return Err(LatticeError::BadBasis("non-finite entry".into()));
        }
        let det = rows.clone().lu().determinant();
        if det.abs() < 1e-12 {
            return Err(LatticeError::BadBasis(format!(
                "basis is numerically singular (det = {det:.3e})"
            )));
        }
        Ok(Self { rows, n: r / 2 })
    }

    /// The standard lattice ℤ^{2n}.
    pub fn identity(n: usize) -> Self {
        Self {
            rows: DMatrix::identity(2 * n, 2 * n),
            n,
        }
    }

    /// Basis from a symplectic group element (unimodular by construction).
    pub fn from_symplectic(g: &SymplecticMatrix) -> Self {
        Self {
            rows: g.matrix().clone(),
            n: g.half_rank(),
        }
    }

    /// Underlying row matrix.
    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Ambient dimension `2n`.
    pub fn dimension(&self) -> usize {
        2 * self.n
    }

    /// Half-rank `n`.
    pub fn half_rank(&self) -> usize {
        self.n
    }

    /// Covolume `|det B|`.
    pub fn covolume(&self) -> f64 {
        self.rows.clone().lu().determinant().abs()
    }

    /// Frobenius condition estimate `‖B‖_F · ‖B⁻¹‖_F`.
    pub fn condition_estimate(&self) -> f64 {
        let inv = match self.rows.clone().try_inverse() {
            Some(i) => i,
            None => return f64::INFINITY,
        };
        let nf = |m: &DMatrix<f64>| m.iter().map(|x| x * x).sum::<f64>().sqrt();
        nf(&self.rows) * nf(&inv)
    }
}

/// gcd of a coefficient slice; 0 only for the zero vector.
pub fn coeff_gcd(coeffs: &[i64]) -> i64 {
    coeffs.iter().fold(0i64, |g, &v| {
        let (mut a, mut b) = (g.abs(), v.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    })
}

/// `true` iff the coefficient vector is primitive (gcd exactly 1).
pub fn is_primitive(coeffs: &[i64]) -> bool {
    coeff_gcd(coeffs) == 1
}

/// Volume of the d-ball of radius `r` (d even): `π^{d/2} r^d / (d/2)!`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    let half = d / 2;
    let mut fact = 1.0f64;
    for k in 1..=half {
        fact *= k as f64;
    }
    std::f64::consts::PI.powi(half as i32) * r.powi(d as i32) / fact
}

/// LLL reduction (δ = 0.99) returning the reduced basis and the unimodular
/// transform `U` with `reduced = U · original` (rows).
pub fn reduce_basis(basis: &LatticeBasis) -> Result<(LatticeBasis, Vec<Vec<i64>>), LatticeError> {
    let d = basis.dimension();
    let mut b: Vec<Vec<f64>> = (0..d)
        .map(|i| basis.rows.row(i).iter().copied().collect())
        .collect();
    let mut u: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            let mut row = vec![0i64; d];
            row[i] = 1;
            row
        })
        .collect();
    lll_in_place(&mut b, &mut u, 0.99, d)?;
    let rows = DMatrix::from_fn(d, d, |i, j| b[i][j]);
    Ok((LatticeBasis { rows, n: d / 2 }, u))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Textbook LLL with float Gram–Schmidt and checked integer bookkeeping.
fn lll_in_place(
    b: &mut [Vec<f64>],
    u: &mut [Vec<i64>],
    delta: f64,
    d: usize,
) -> Result<(), LatticeError> {
    let max_steps = 10_000 * d * d;
    let mut steps = 0usize;

    // Gram–Schmidt data, recomputed from scratch on each structural change:
    // cheap at the crate's dimensions (d ≤ 8 in practice).
    let gram = |b: &[Vec<f64>]| -> Result<(Vec<Vec<f64>>, Vec<f64>), LatticeError> {
        let mut mu = vec![vec![0.0f64; d]; d];
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut norms = vec![0.0f64; d];
        for i in 0..d {
            let mut v = b[i].clone();
            for j in 0..i {
                let m = dot(&b[i], &bstar[j]) / norms[j];
                mu[i][j] = m;
                for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= m * sk;
                }
            }
            norms[i] = dot(&v, &v);
            if !(norms[i] > 0.0 && norms[i].is_finite()) {
                return Err(LatticeError::NumericalBreakdown(
                    "Gram–Schmidt norm collapsed".into(),
                ));
            }
            bstar.push(v);
        }
        Ok((mu, norms))
    };

    let mut k = 1usize;
    let (mut mu, mut norms) = gram(b)?;
    while k < d {
        steps += 1;
        if steps > max_steps {
            return Err(LatticeError::NumericalBreakdown(
                "LLL iteration cap exceeded".into(),
            ));
        }
        // Size-reduce b_k against b_{k-1} … b_0.
        let mut changed = false;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                changed = true;
                if q.abs() > 9e18 {
                    return Err(LatticeError::Overflow);
                }
                let qi = q as i64;
                for idx in 0..d {
                    let bj = b[j][idx];
                    b[k][idx] -= q * bj;
                    let prod = (qi as i128) * (u[j][idx] as i128);
                    let next = (u[k][idx] as i128) - prod;
                    u[k][idx] = i64::try_from(next).map_err(|_| LatticeError::Overflow)?;
                }
                for l in 0..=j {
                    let mj = mu[j][l];
                    mu[k][l] -= q * mj;
                }
            }
        }
        if changed {
            (mu, norms) = gram(b)?;
        }
        // Lovász condition.
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            (mu, norms) = gram(b)?;
            k = k.max(2) - 1;
        }
    }
    Ok(())
}

/// A reusable enumerator: reduced basis, transform back to the original
/// coefficients, and Gram–Schmidt data for the Fincke–Pohst walk.
#[derive(Debug, Clone)]
pub struct Enumerator {
    d: usize,
    /// Reduced basis rows.
    rows: Vec<Vec<f64>>,
    /// `reduced = u · original`; original coefficients are `x_red · u`.
    u: Vec<Vec<i64>>,
    /// Gram–Schmidt `μ[i][j]` (i > j) of the reduced rows.
    mu: Vec<Vec<f64>>,
    /// `‖b*_j‖²`.
    bstar_norm2: Vec<f64>,
    /// Orthogonalized rows (needed to project enumeration centers).
    bstar: Vec<Vec<f64>>,
    covolume: f64,
}

/// One enumerated lattice point, borrowed from the enumerator's scratch
/// space during a visit.
#[derive(Debug)]
pub struct VisitPoint<'a> {
    /// Coefficients w.r.t. the **reduced** basis.
    pub reduced_coeffs: &'a [i64],
    /// The lattice vector itself.
    pub vector: &'a [f64],
    /// Squared distance to the enumeration center.
    pub dist2: f64,
}

impl VisitPoint<'_> {
    /// Primitivity is basis-independent: gcd of the coefficients.
    pub fn is_primitive(&self) -> bool {
        is_primitive(self.reduced_coeffs)
    }

    /// `true` iff this is the zero vector (all coefficients zero).
    pub fn is_zero(&self) -> bool {
        self.reduced_coeffs.iter().all(|&c| c == 0)
    }
}

impl Enumerator {
    /// Reduces the basis and prepares enumeration data.
    pub fn new(basis: &LatticeBasis) -> Result<Self, LatticeError> {
        let (red, u) = reduce_basis(basis)?;
        let d = basis.dimension();
        let rows: Vec<Vec<f64>> = (0..d)
            .map(|i| red.rows.row(i).iter().copied().collect())
            .collect();
        let mut mu = vec![vec![0.0f64; d]; d];
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut bstar_norm2 = vec![0.0f64; d];
        for i in 0..d {
            let mut v = rows[i].clone();
            for j in 0..i {
                let m = dot(&rows[i], &bstar[j]) / bstar_norm2[j];
                mu[i][j] = m;
                for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= m * sk;
                }
            }
            bstar_norm2[i] = dot(&v, &v);
            bstar.push(v);
        }
        Ok(Self {
            d,
            rows,
            u,
            mu,
            bstar,
            bstar_norm2,
            covolume: red.covolume(),
        })
    }

    /// Maps reduced coefficients to coefficients in the original basis.
    pub fn original_coeffs(&self, reduced: &[i64]) -> Result<Vec<i64>, LatticeError> {
        let d = self.d;
        let mut out = vec![0i64; d];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for i in 0..d {
                acc += reduced[i] as i128 * self.u[i][j] as i128;
            }
            *o = i64::try_from(acc).map_err(|_| LatticeError::Overflow)?;
        }
        Ok(out)
    }

    /// Predicted number of points in the ball: volume over covolume plus a
    /// fundamental-cell diameter margin.
    pub fn predicted_count(&self, radius: f64) -> f64 {
        let cell_diam = self.bstar_norm2.iter().sum::<f64>().sqrt();
        ball_volume(self.d, radius + 0.5 * cell_diam) / self.covolume
    }

    /// Visits every lattice point `v` with `‖v - center‖ ≤ radius`
    /// (including the zero vector if it qualifies). Returns the number of
    /// visits. Deterministic order: coefficients ascend innermost-first.
    pub fn visit_ball<F: FnMut(&VisitPoint)>(
        &self,
        center: &[f64],
        radius: f64,
        mut visit: F,
    ) -> Result<u64, LatticeError> {
        let d = self.d;
        if center.len() != d {
            return Err(LatticeError::BadRegion(format!(
                "center has length {}, ambient dimension is {d}",
                center.len()
            )));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(LatticeError::BadRegion(format!("bad radius {radius}")));
        }
        let predicted = self.predicted_count(radius);
        if predicted > ENUMERATION_CAP as f64 {
            return Err(LatticeError::CapExceeded {
                predicted,
                cap: ENUMERATION_CAP,
            });
        }

        // Center in Gram–Schmidt coordinates: c = Σ c*_j b*_j.
        let cstar: Vec<f64> = (0..d)
            .map(|j| dot(center, &self.bstar[j]) / self.bstar_norm2[j])
            .collect();

        let r2_slack = radius * radius * (1.0 + 1e-9) + 1e-30;
        let accept2 = radius * radius * (1.0 + 1e-12) + 1e-300;

        // Iterative tree walk, level d-1 outermost.
        let mut x = vec![0i64; d];
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        let mut rem = vec![0.0f64; d]; // slack budget remaining at level j
        let mut off = vec![0.0f64; d]; // Σ_{i>j} μ_{ij} x_i
        // pvec[j] = Σ_{i>j} x_i b_i (updated on descend); scratch for leaf.
        let mut pvec = vec![vec![0.0f64; d]; d + 1];
        let mut leaf = vec![0.0f64; d];

        let mut count = 0u64;
        let mut j = d - 1;
        rem[d - 1] = r2_slack;
        let mut descending = true;
        loop {
            if descending {
                // Compute offset and bounds at level j.
                let mut o = 0.0;
                for i in (j + 1)..d {
                    o += self.mu[i][j] * x[i] as f64;
                }
                o -= cstar[j];
                off[j] = o;
                let width = (rem[j] / self.bstar_norm2[j]).max(0.0).sqrt();
                let lo_f = (-width - o).ceil();
                let hi_f = (width - o).floor();
                if lo_f > hi_f || lo_f.abs() > 9e17 || hi_f.abs() > 9e17 {
                    // Empty range: backtrack.
                    if lo_f.abs() > 9e17 || hi_f.abs() > 9e17 {
                        return Err(LatticeError::NumericalBreakdown(
                            "enumeration bounds exploded".into(),
                        ));
                    }
                    descending = false;
                    j += 1;
                    if j >= d {
                        break;
                    }
                    continue;
                }
                lo[j] = lo_f as i64;
                hi[j] = hi_f as i64;
                x[j] = lo[j];
            } else {
                // Advance x[j]; if exhausted, keep backtracking.
                if x[j] >= hi[j] {
                    j += 1;
                    if j >= d {
                        break;
                    }
                    continue;
                }
                x[j] += 1;
            }

            // Here x[j] is fresh at level j: update partial vector.
            {
                let xf = x[j] as f64;
                let (upper, lower) = pvec.split_at_mut(j + 1);
                let src = &lower[0]; // pvec[j+1]
                let dst = &mut upper[j]; // pvec[j]
                for idx in 0..d {
                    dst[idx] = src[idx] + xf * self.rows[j][idx];
                }
            }

            if j == 0 {
                // Leaf: exact membership test on the assembled vector.
                let mut dist2 = 0.0;
                for idx in 0..d {
                    leaf[idx] = pvec[0][idx];
                    let dx = leaf[idx] - center[idx];
                    dist2 += dx * dx;
                }
                if dist2 <= accept2 {
                    count += 1;
                    if count > ENUMERATION_CAP {
                        return Err(LatticeError::CapExceeded {
                            predicted,
                            cap: ENUMERATION_CAP,
                        });
                    }
                    visit(&VisitPoint {
                        reduced_coeffs: &x,
                        vector: &leaf,
                        dist2,
                    });
                }
                descending = false;
            } else {
                // Budget for the next level down.
                let z = x[j] as f64 + off[j];
                let used = z * z * self.bstar_norm2[j];
                let next_rem = rem[j] - used;
                if next_rem >= 0.0 {
                    rem[j - 1] = next_rem;
                    j -= 1;
                    descending = true;
                } else {
                    descending = false;
                }
            }
        }
        Ok(count)
    }
}

/// A fully collected lattice point (coefficients in the original basis).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub vector: Vec<f64>,
    pub norm2: f64,
}

/// Collects all lattice points in the closed ball `‖v‖ ≤ radius` around the
/// origin, zero vector included, sorted by (norm², coefficients).
pub fn enumerate_ball(basis: &LatticeBasis, radius: f64) -> Result<Vec<LatticePoint>, LatticeError> {
    let en = Enumerator::new(basis)?;
    let center = vec![0.0; basis.dimension()];
    let mut out = Vec::new();
    let mut map_err = None;
    en.visit_ball(&center, radius, |pt| {
        if map_err.is_some() {
            return;
        }
        match en.original_coeffs(pt.reduced_coeffs) {
            Ok(coeffs) => out.push(LatticePoint {
                coeffs,
                vector: pt.vector.to_vec(),
                norm2: pt.dist2,
            }),
            Err(e) => map_err = Some(e),
        }
    })?;
    if let Some(e) = map_err {
        return Err(e);
    }
    out.sort_by(|a, b| {
        a.norm2
            .partial_cmp(&b.norm2)
            .expect("finite norms")
            .then_with(|| a.coeffs.cmp(&b.coeffs))
    });
    Ok(out)
}

/// Region specification for counting.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegionSpec {
    /// Closed ball `‖x - center‖ ≤ radius`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Half-open annulus `r_inner < ‖x - center‖ ≤ r_outer`.
    Annulus {
        center: Vec<f64>,
        r_inner: f64,
        r_outer: f64,
    },
    /// Half-open box `lo_i ≤ x_i < hi_i`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl RegionSpec {
    /// Euclidean volume of the region.
    pub fn volume(&self, d: usize) -> f64 {
        match self {
            RegionSpec::Ball { radius, .. } => ball_volume(d, *radius),
            RegionSpec::Annulus {
                r_inner, r_outer, ..
            } => ball_volume(d, *r_outer) - ball_volume(d, *r_inner),
            RegionSpec::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
        }
    }

    fn validate(&self, d: usize) -> Result<(), LatticeError> {
        let bad = |msg: String| Err(LatticeError::BadRegion(msg));
        match self {
            RegionSpec::Ball { center, radius } => {
                if center.len() != d {
                    return bad(format!("center dimension {} ≠ {d}", center.len()));
                }
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return bad(format!("radius {radius}"));
                }
            }
            RegionSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                if center.len() != d {
                    return bad(format!("center dimension {} ≠ {d}", center.len()));
                }
                if !(*r_inner >= 0.0 && r_outer >= r_inner && r_outer.is_finite()) {
                    return bad(format!("annulus radii {r_inner}, {r_outer}"));
                }
            }
            RegionSpec::Box { lo, hi } => {
                if lo.len() != d || hi.len() != d {
                    return bad("box dimension mismatch".into());
                }
                if !lo.iter().zip(hi).all(|(a, b)| a.is_finite() && b >= a) {
                    return bad("box bounds reversed or non-finite".into());
                }
            }
        }
        Ok(())
    }
}

/// Counts of nonzero lattice points in a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RegionCount {
    /// All nonzero points.
    pub all: u64,
    /// Points with primitive coefficient vector.
    pub primitive: u64,
}

/// Counts nonzero lattice points (all and primitive) in the region.
pub fn count_in_region(basis: &LatticeBasis, region: &RegionSpec) -> Result<RegionCount, LatticeError> {
    let d = basis.dimension();
    region.validate(d)?;
    let en = Enumerator::new(basis)?;
    let mut all = 0u64;
    let mut primitive = 0u64;
    let mut tally = |pt: &VisitPoint, inside: bool| {
        if inside && !pt.is_zero() {
            all += 1;
            if pt.is_primitive() {
                primitive += 1;
            }
        }
    };
    match region {
        RegionSpec::Ball { center, radius } => {
            en.visit_ball(center, *radius, |pt| tally(pt, true))?;
        }
        RegionSpec::Annulus {
            center,
            r_inner,
            r_outer,
        } => {
            let cut2 = r_inner * r_inner * (1.0 + 1e-12);
            en.visit_ball(center, *r_outer, |pt| tally(pt, pt.dist2 > cut2))?;
        }
        RegionSpec::Box { lo, hi } => {
            let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let radius = lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt()
                * 0.5;
            en.visit_ball(&center, radius, |pt| {
                let inside = pt
                    .vector
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(v, (a, b))| *v >= *a && *v < *b);
                tally(pt, inside);
            })?;
        }
    }
    Ok(RegionCount { all, primitive })
}

/// Counts nonzero points satisfying an arbitrary predicate, which must be
/// contained in the closed ball of `bounding_radius` about `center`.
pub fn count_in_predicate_region<P: Fn(&[f64]) -> bool>(
    basis: &LatticeBasis,
    center: &[f64],
    bounding_radius: f64,
    pred: P,
) -> Result<RegionCount, LatticeError> {
    let en = Enumerator::new(basis)?;
    let mut all = 0u64;
    let mut primitive = 0u64;
    en.visit_ball(center, bounding_radius, |pt| {
        if !pt.is_zero() && pred(pt.vector) {
            all += 1;
            if pt.is_primitive() {
                primitive += 1;
            }
        }
    })?;
    Ok(RegionCount { all, primitive })
}

/// Shortest nonzero lattice vector (ties broken by coefficient order):
/// returns original-basis coefficients, the vector, and its squared norm.
pub fn shortest_nonzero(basis: &LatticeBasis) -> Result<LatticePoint, LatticeError> {
    let en = Enumerator::new(basis)?;
    // The first reduced row is within a factor of the true minimum; widen a
    // little to be safe against float Gram–Schmidt looseness.
    let r0 = dot(&en.rows[0], &en.rows[0]).sqrt();
    let center = vec![0.0; en.d];
    let mut best: Option<(f64, Vec<i64>)> = None;
    en.visit_ball(&center, r0 * (1.0 + 1e-9), |pt| {
        if pt.is_zero() {
            return;
        }
        let better = match &best {
            None => true,
            Some((bn, bc)) => {
                pt.dist2 < bn * (1.0 - 1e-12)
                    || ((pt.dist2 - bn).abs() <= bn * 1e-12 && pt.reduced_coeffs < bc.as_slice())
            }
        };
        if better {
            best = Some((pt.dist2, pt.reduced_coeffs.to_vec()));
        }
    })?;
    let (norm2, red) = best.ok_or_else(|| {
        LatticeError::NumericalBreakdown("no nonzero vector found in shortest-vector ball".into())
    })?;
    let coeffs = en.original_coeffs(&red)?;
    let vector: Vec<f64> = (0..en.d)
        .map(|idx| {
            red.iter()
                .enumerate()
                .map(|(i, &c)| c as f64 * en.rows[i][idx])
                .sum()
        })
        .collect();
    Ok(LatticePoint {
        coeffs,
        vector,
        norm2,
    })
}
