//! The symplectic group in a row-vector convention: validation, Iwasawa-type
//! coordinates, unit-sphere cosets of the maximal compact subgroup, and exact
//! integer completion of a primitive row to a symplectic matrix.
//!
//! # Conventions
//!
//! Vectors are rows and matrices act on the right: `v ↦ v·g`. The symplectic
//! form is the anti-diagonal one,
//!
//! ```text
//! ⟨u, v⟩ = Σ_{j=1}^{n} (u_j v_{2n+1-j} - u_{2n+1-j} v_j),
//! ```
//!
//! with Gram matrix `Ω = [[0, J_n], [-J_n, 0]]` (`J_n` the n×n exchange
//! matrix), so `⟨u, v⟩ = u Ω vᵀ` and `Ω² = -I`. A matrix `g` is symplectic
//! when `g Ω gᵀ = Ω`.
//!
//! # Iwasawa-type coordinates
//!
//! Every `g` factors uniquely as `g = u_t · m̃ · a_y · k` where
//!
//! - `a_y = diag(y, 1, …, 1, 1/y)` scales the first/last coordinates,
//! - `m̃ = diag(1, m, 1)` embeds a rank-(n-1) symplectic matrix `m` into the
//!   middle block,
//! - `u_t` is unipotent with first row `(1, t₂, …, t_{2n})`, last column
//!   determined by the sign pattern that makes it symplectic, and identity
//!   in between,
//! - `k` lies in the maximal compact `K = Sp(2n,ℝ) ∩ O(2n)`, isomorphic to
//!   `U(n)` through the complex aliasing `(T x)_j = x_j + i·x_{2n+1-j}`.
//!
//! The height `y_of(g) = ‖e_{2n} g‖⁻¹` only sees the `a_y` factor: it is
//! exactly invariant under left multiplication by `u_t` and `m̃` and under
//! right multiplication by `k` (the latter because `k` is orthogonal). The
//! unit vector `polar_point(g) = e_{2n} g / ‖e_{2n} g‖` records the `K`-coset
//! instead.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Maximum absolute deviation allowed in `g Ω gᵀ - Ω` for a matrix to count
/// as symplectic. Float symplectic matrices in this crate are produced by
/// products of exact generators and short random-walk steps; their drift
/// stays below 1e-12, so 1e-10 separates real defects cleanly.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Errors from the symplectic layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    /// `g Ω gᵀ` deviates from `Ω` beyond [`SYMPLECTIC_TOL`].
    #[error("matrix is not symplectic: max |gΩgᵀ - Ω| = {max_dev:.3e}")]
    NotSymplectic { max_dev: f64 },
    /// Dimensions must be even and consistent.
    #[error("bad dimension: {0}")]
    BadDimension(String),
    /// Integer completion needs a primitive vector (component gcd 1).
    #[error("vector is not primitive (gcd = {0})")]
    NotPrimitive(i64),
    /// Integer arithmetic left the i64 range.
    #[error("integer overflow during exact symplectic computation")]
    Overflow,
    /// A sphere point must have positive norm to be normalized.
    #[error("cannot normalize a zero vector onto the sphere")]
    ZeroVector,
}

/// A validated real symplectic matrix of size 2n×2n, row convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    mat: DMatrix<f64>,
    n: usize,
}

/// An exactly symplectic integer matrix (entries i64, verified in integer
/// arithmetic on construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSymplecticMatrix {
    entries: Vec<i64>, // row-major, (2n)²
    n: usize,
}

/// Iwasawa-type coordinates of `g = u_t · m̃ · a_y · k`.
///
/// `t` stores `(t₂, …, t_{2n})` (length `2n-1`); `m` is the middle
/// rank-(n-1) block (a 0×0 matrix when `n = 1`); `y > 0` is the height;
/// `k` is symplectic-orthogonal.
#[derive(Debug, Clone)]
pub struct IwasawaCoordinates {
    pub t: Vec<f64>,
    pub m: SymplecticMatrix,
    pub y: f64,
    pub k: SymplecticMatrix,
}

/// A unit vector in ℝ^{2n}, the `K`-coset datum of a group element.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes `v` onto the unit sphere.
    pub fn new(v: &[f64]) -> Result<Self, SymplecticError> {
        if v.len() % 2 != 0 || v.is_empty() {
            return Err(SymplecticError::BadDimension(format!(
                "sphere point needs even positive length, got {}",
                v.len()
            )));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SymplecticError::ZeroVector);
        }
        Ok(Self {
            coords: v.iter().map(|x| x / norm).collect(),
        })
    }

    /// Coordinates of the unit vector.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Half-rank `n` (the vector lives in ℝ^{2n}).
    pub fn half_rank(&self) -> usize {
        self.coords.len() / 2
    }

    /// Complex aliasing `z_j = x_j + i·x_{2n+1-j}` of the point.
    pub fn to_complex(&self) -> Vec<Complex64> {
        let d = self.coords.len();
        let n = d / 2;
        (0..n)
            .map(|j| Complex64::new(self.coords[j], self.coords[d - 1 - j]))
            .collect()
    }
}

/// Gram matrix `Ω = [[0, J_n], [-J_n, 0]]` of the pairing, size 2n×2n.
pub fn omega(n: usize) -> DMatrix<f64> {
    let d = 2 * n;
    DMatrix::from_fn(d, d, |i, j| {
        if i < n && j == d - 1 - i {
            1.0
        } else if i >= n && j == d - 1 - i {
            -1.0
        } else {
            0.0
        }
    })
}

/// The pairing `⟨u, v⟩ = Σ_{j≤n} (u_j v_{2n+1-j} - u_{2n+1-j} v_j)`.
pub fn pairing(u: &[f64], v: &[f64]) -> f64 {
    let d = u.len();
    let n = d / 2;
    let mut acc = 0.0;
    for j in 0..n {
        acc += u[j] * v[d - 1 - j] - u[d - 1 - j] * v[j];
    }
    acc
}

/// Exact integer pairing, widened to i128 so no intermediate can overflow.
pub fn pairing_int(u: &[i64], v: &[i64]) -> i128 {
    let d = u.len();
    let n = d / 2;
    let mut acc: i128 = 0;
    for j in 0..n {
        acc += u[j] as i128 * v[d - 1 - j] as i128 - u[d - 1 - j] as i128 * v[j] as i128;
    }
    acc
}

/// Checks `‖g Ω gᵀ - Ω‖_max < tol` (with [`SYMPLECTIC_TOL`]).
pub fn validate_symplectic(mat: &DMatrix<f64>) -> Result<(), SymplecticError> {
    let (r, c) = mat.shape();
    if r != c || r == 0 || r % 2 != 0 {
        return Err(SymplecticError::BadDimension(format!(
            "expected square even-dimensional matrix, got {r}×{c}"
        )));
    }
    let om = omega(r / 2);
    let dev = mat * &om * mat.transpose() - &om;
    let max_dev = dev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max_dev < SYMPLECTIC_TOL && max_dev.is_finite() {
        Ok(())
    } else {
        Err(SymplecticError::NotSymplectic { max_dev })
    }
}

impl SymplecticMatrix {
    /// Validates and wraps a matrix.
    pub fn new(mat: DMatrix<f64>) -> Result<Self, SymplecticError> {
        validate_symplectic(&mat)?;
        let n = mat.nrows() / 2;
        Ok(Self { mat, n })
    }

    /// The 0×0 matrix, used as the middle block in rank 1.
    pub fn empty() -> Self {
        Self {
            mat: DMatrix::zeros(0, 0),
            n: 0,
        }
    }

    /// Identity element of rank `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            mat: DMatrix::identity(2 * n, 2 * n),
            n,
        }
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Half-rank `n`.
    pub fn half_rank(&self) -> usize {
        self.n
    }

    /// Group product (revalidated to catch accumulated drift early).
    pub fn mul(&self, other: &Self) -> Result<Self, SymplecticError> {
        Self::new(&self.mat * &other.mat)
    }

    /// Row `i` of the matrix as a slice-backed vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.mat.row(i).iter().copied().collect()
    }
}

impl IntegerSymplecticMatrix {
    /// Validates (exactly, in integer arithmetic) and wraps.
    pub fn new(entries: Vec<i64>, n: usize) -> Result<Self, SymplecticError> {
        let d = 2 * n;
        if entries.len() != d * d || n == 0 {
            return Err(SymplecticError::BadDimension(format!(
                "expected {}x{} entries",
                d, d
            )));
        }
        let m = Self { entries, n };
        m.check_exact()?;
        Ok(m)
    }

    fn check_exact(&self) -> Result<(), SymplecticError> {
        let d = 2 * self.n;
        for i in 0..d {
            for j in 0..d {
                let want: i128 = if j == d - 1 - i {
                    if i < self.n {
                        1
                    } else {
                        -1
                    }
                } else {
                    0
                };
                if pairing_int(self.row(i), self.row(j)) != want {
                    return Err(SymplecticError::NotSymplectic { max_dev: f64::NAN });
                }
            }
        }
        Ok(())
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[i64] {
        let d = 2 * self.n;
        &self.entries[i * d..(i + 1) * d]
    }

    /// Half-rank `n`.
    pub fn half_rank(&self) -> usize {
        self.n
    }

    /// Identity element.
    pub fn identity(n: usize) -> Self {
        let d = 2 * n;
        let mut entries = vec![0i64; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        Self { entries, n }
    }

    /// Exact product, with overflow surfaced as a typed error.
    pub fn mul(&self, other: &Self) -> Result<Self, SymplecticError> {
        let d = 2 * self.n;
        if other.n != self.n {
            return Err(SymplecticError::BadDimension("rank mismatch".into()));
        }
        let mut entries = vec![0i64; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc: i128 = 0;
                for k in 0..d {
                    acc += self.entries[i * d + k] as i128 * other.entries[k * d + j] as i128;
                }
                entries[i * d + j] =
                    i64::try_from(acc).map_err(|_| SymplecticError::Overflow)?;
            }
        }
        Ok(Self { entries, n: self.n })
    }

    /// Float image of the matrix.
    pub fn to_real(&self) -> SymplecticMatrix {
        let d = 2 * self.n;
        let mat = DMatrix::from_fn(d, d, |i, j| self.entries[i * d + j] as f64);
        SymplecticMatrix { mat, n: self.n }
    }
}

/// Height `y_of(g) = ‖e_{2n} g‖⁻¹`.
pub fn y_of(g: &SymplecticMatrix) -> f64 {
    let last = g.mat.row(2 * g.n - 1);
    1.0 / last.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Unit last row `e_{2n} g / ‖e_{2n} g‖`.
pub fn polar_point(g: &SymplecticMatrix) -> SpherePoint {
    let last: Vec<f64> = g.mat.row(2 * g.n - 1).iter().copied().collect();
    SpherePoint::new(&last).expect("symplectic matrices have nonzero rows")
}

/// Diagonal element `a_y = diag(y, 1, …, 1, 1/y)`.
pub fn a_y(n: usize, y: f64) -> Result<SymplecticMatrix, SymplecticError> {
    if y <= 0.0 || !y.is_finite() {
        return Err(SymplecticError::BadDimension(format!(
            "height must be positive and finite, got {y}"
        )));
    }
    let d = 2 * n;
    let mut mat = DMatrix::identity(d, d);
    mat[(0, 0)] = y;
    mat[(d - 1, d - 1)] = 1.0 / y;
    Ok(SymplecticMatrix { mat, n })
}

/// Unipotent element `u_t` from parameters `t = (t₂, …, t_{2n})`
/// (length `2n-1`).
///
/// First row `(1, t₂, …, t_{2n})`, last row `e_{2n}`, identity middle block,
/// and last-column entries `+t_{2n+1-i}` for rows `2 ≤ i ≤ n`,
/// `-t_{2n+1-i}` for rows `n+1 ≤ i ≤ 2n-1` — the unique pattern making the
/// matrix symplectic for the anti-diagonal form.
pub fn unipotent(n: usize, t: &[f64]) -> Result<SymplecticMatrix, SymplecticError> {
    let d = 2 * n;
    if t.len() != d - 1 {
        return Err(SymplecticError::BadDimension(format!(
            "expected {} unipotent parameters, got {}",
            d - 1,
            t.len()
        )));
    }
    let mut mat = DMatrix::identity(d, d);
    // t[idx] holds t_{idx+2} in the 1-based naming.
    for (idx, &v) in t.iter().enumerate() {
        mat[(0, idx + 1)] = v;
    }
    // Last column: row i (1-based, 2 ≤ i ≤ 2n-1) gets ±t_{2n+1-i}.
    for i in 2..d {
        let tv = t[d - i - 1]; // t_{2n+1-i}
        mat[(i - 1, d - 1)] = if i <= n { tv } else { -tv };
    }
    SymplecticMatrix::new(mat)
}

/// Embedding `m̃ = diag(1, m, 1)` of a rank-(n-1) symplectic matrix into the
/// middle block of rank n.
pub fn m_embed(n: usize, m: &SymplecticMatrix) -> Result<SymplecticMatrix, SymplecticError> {
    if m.n + 1 != n {
        return Err(SymplecticError::BadDimension(format!(
            "middle block must have half-rank {}, got {}",
            n - 1,
            m.n
        )));
    }
    let d = 2 * n;
    let mut mat = DMatrix::identity(d, d);
    for i in 0..2 * m.n {
        for j in 0..2 * m.n {
            mat[(i + 1, j + 1)] = m.mat[(i, j)];
        }
    }
    SymplecticMatrix::new(mat)
}

/// Builds the symplectic-orthogonal element `k` with prescribed last row:
/// `e_{2n}·k = x̂`.
///
/// Through the complex aliasing `T`, elements of `K` correspond to unitary
/// `U ∈ U(n)` via `T(x·k) = T(x)·U`, and the last row of `k` is
/// `T⁻¹`-conjugate to the first row of `U`; that first row must be
/// `u₁ = -i·T(x̂)`. The remaining rows come from a pivoted Gram–Schmidt
/// completion of `u₁` to a unitary basis (deterministic: the dropped
/// standard vector is the one with the largest overlap against `u₁`).
pub fn k_from_sphere_point(x: &SpherePoint) -> SymplecticMatrix {
    let n = x.half_rank();
    let z = x.to_complex();
    let u1: Vec<Complex64> = z.iter().map(|w| -Complex64::i() * w).collect();

    // Candidate rows: u1, then standard basis vectors minus the pivot.
    let pivot = (0..n)
        .max_by(|&a, &b| {
            u1[a]
                .norm()
                .partial_cmp(&u1[b].norm())
                .expect("unit vectors have finite entries")
        })
        .unwrap_or(0);
    let mut rows: Vec<Vec<Complex64>> = vec![u1];
    for j in 0..n {
        if j == pivot {
            continue;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        rows.push(e);
    }
    // Modified Gram–Schmidt with a re-orthogonalization pass.
    for i in 1..n {
        for _pass in 0..2 {
            for k in 0..i {
                let proj: Complex64 = (0..n).map(|j| rows[i][j] * rows[k][j].conj()).sum();
                for j in 0..n {
                    let sub = proj * rows[k][j];
                    rows[i][j] -= sub;
                }
            }
        }
        let norm: f64 = rows[i].iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        for w in rows[i].iter_mut() {
            *w /= norm;
        }
    }

    // Real form: complex row l supplies real rows l and 2n-1-l (0-based).
    let d = 2 * n;
    let mut mat = DMatrix::zeros(d, d);
    for l in 0..n {
        for j in 0..n {
            mat[(l, j)] = rows[l][j].re;
            mat[(d - 1 - l, j)] = -rows[l][j].im;
        }
        for p in n..d {
            let q = d - 1 - p;
            mat[(l, p)] = rows[l][q].im;
            mat[(d - 1 - l, p)] = rows[l][q].re;
        }
    }
    SymplecticMatrix { mat, n }
}

/// Iwasawa-type decomposition `g = u_t · m̃ · a_y · k`.
///
/// The factors are recovered in closed form: `y` and `k` from the last row,
/// then `h = g k⁻¹ a_y⁻¹` has last row `e_{2n}` and yields `m` (middle
/// block), `t₂, …, t_{2n-1}` (from the signed last column) and `t_{2n}`
/// (first row, last entry).
pub fn iwasawa(g: &SymplecticMatrix) -> Result<IwasawaCoordinates, SymplecticError> {
    let n = g.n;
    let d = 2 * n;
    let y = y_of(g);
    let k = k_from_sphere_point(&polar_point(g));
    // h = g · k⁻¹ · a_y⁻¹; k⁻¹ = kᵀ (orthogonal).
    let mut h = &g.mat * k.mat.transpose();
    for i in 0..d {
        h[(i, 0)] /= y;
        h[(i, d - 1)] *= y;
    }
    // Middle block.
    let mut mmat = DMatrix::zeros(d - 2, d - 2);
    for i in 0..d - 2 {
        for j in 0..d - 2 {
            mmat[(i, j)] = h[(i + 1, j + 1)];
        }
    }
    let m = if n == 1 {
        SymplecticMatrix::empty()
    } else {
        SymplecticMatrix::new(mmat)?
    };
    // t parameters: t_{2n} from the first row; t_2 … t_{2n-1} from the signed
    // last column of h, t_{2n+1-i} = ±h[i-1][d-1].
    let mut t = vec![0.0; d - 1];
    t[d - 2] = h[(0, d - 1)];
    for i in 2..d {
        let c = h[(i - 1, d - 1)];
        t[d - i - 1] = if i <= n { c } else { -c };
    }
    Ok(IwasawaCoordinates { t, m, y, k })
}

impl IwasawaCoordinates {
    /// Recomposes `u_t · m̃ · a_y · k`.
    pub fn compose(&self) -> Result<SymplecticMatrix, SymplecticError> {
        let n = self.k.n;
        let u = unipotent(n, &self.t)?;
        let me = if n == 1 {
            SymplecticMatrix::identity(1)
        } else {
            m_embed(n, &self.m)?
        };
        let a = a_y(n, self.y)?;
        u.mul(&me)?.mul(&a)?.mul(&self.k)
    }
}

// ------------------------------------------------------------------
// Exact integer symplectic completion.
// ------------------------------------------------------------------

/// Extended gcd over a vector: returns `(g, x)` with `Σ x_i a_i = g ≥ 0`,
/// `g = gcd(a)`. Deterministic left-to-right folding.
fn extended_gcd_vec(a: &[i64]) -> (i64, Vec<i64>) {
    let mut g: i64 = 0;
    let mut x = vec![0i64; a.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        if g == 0 {
            g = ai.abs();
            x[i] = ai.signum();
            continue;
        }
        // (g, ai) -> gcd via extended Euclid on the pair.
        let (mut r0, mut r1) = (g, ai);
        let (mut s0, mut s1) = (1i64, 0i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0.div_euclid(r1);
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        let sign = r0.signum();
        let (gg, u, v) = (r0 * sign, s0 * sign, t0 * sign);
        for xj in x.iter_mut() {
            *xj *= u;
        }
        x[i] = v;
        g = gg;
    }
    (g, x)
}

fn gcd_vec(a: &[i64]) -> i64 {
    a.iter().fold(0i64, |g, &v| {
        let mut a = g.abs();
        let mut b = v.abs();
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    })
}

/// Coefficient vector of the linear form `w ↦ ⟨w, v⟩`.
fn pairing_form_coeffs(v: &[i64]) -> Vec<i64> {
    let d = v.len();
    let n = d / 2;
    (0..d)
        .map(|l| {
            if l < n {
                v[d - 1 - l]
            } else {
                -v[d - 1 - l]
            }
        })
        .collect()
}

fn checked_i64(x: i128) -> Result<i64, SymplecticError> {
    i64::try_from(x).map_err(|_| SymplecticError::Overflow)
}

/// Adds `c · src` into `dst`, erroring on i64 overflow.
fn axpy_checked(dst: &mut [i64], c: i64, src: &[i64]) -> Result<(), SymplecticError> {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = checked_i64(*d as i128 + c as i128 * s as i128)?;
    }
    Ok(())
}

/// Integer kernel of the two linear forms `⟨·, v⟩` and `⟨·, w⟩`: returns
/// `2n - 2` independent rows spanning `{u : ⟨u,v⟩ = ⟨u,w⟩ = 0}`.
///
/// Works by row-reducing `[α | β | I]` where α, β are the form coefficient
/// columns: Euclidean elimination turns the α-column into `(g, 0, …, 0)` and
/// then the β-column into `(*, g', 0, …, 0)`; the identity block tracks the
/// unimodular transform, whose trailing rows are the kernel basis.
fn integer_kernel_two_forms(
    alpha: &[i64],
    beta: &[i64],
) -> Result<Vec<Vec<i64>>, SymplecticError> {
    let d = alpha.len();
    let mut col_a: Vec<i64> = alpha.to_vec();
    let mut col_b: Vec<i64> = beta.to_vec();
    let mut u: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            let mut row = vec![0i64; d];
            row[i] = 1;
            row
        })
        .collect();

    // Clear column a below row 0.
    loop {
        // Pick the row with smallest nonzero |col_a| as pivot, rotate to 0.
        let pivot = (0..d)
            .filter(|&i| col_a[i] != 0)
            .min_by_key(|&i| (col_a[i].unsigned_abs(), i))
            .ok_or(SymplecticError::BadDimension("zero form".into()))?;
        if pivot != 0 {
            col_a.swap(0, pivot);
            col_b.swap(0, pivot);
            u.swap(0, pivot);
        }
        let mut done = true;
        for i in 1..d {
            if col_a[i] == 0 {
                continue;
            }
            let q = col_a[i].div_euclid(col_a[0]);
            if q != 0 {
                col_a[i] = checked_i64(col_a[i] as i128 - q as i128 * col_a[0] as i128)?;
                col_b[i] = checked_i64(col_b[i] as i128 - q as i128 * col_b[0] as i128)?;
                let (head, tail) = u.split_at_mut(i);
                let src = head[0].clone();
                axpy_checked(&mut tail[0], -q, &src)?;
            }
            if col_a[i] != 0 {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    // Clear column b below row 1 (rows 1.. have col_a = 0 already).
    loop {
        let pivot = (1..d)
            .filter(|&i| col_b[i] != 0)
            .min_by_key(|&i| (col_b[i].unsigned_abs(), i));
        let Some(pivot) = pivot else {
            return Err(SymplecticError::BadDimension(
                "forms are not independent".into(),
            ));
        };
        if pivot != 1 {
            col_b.swap(1, pivot);
            u.swap(1, pivot);
        }
        let mut done = true;
        for i in 2..d {
            if col_b[i] == 0 {
                continue;
            }
            let q = col_b[i].div_euclid(col_b[1]);
            if q != 0 {
                col_b[i] = checked_i64(col_b[i] as i128 - q as i128 * col_b[1] as i128)?;
                let (head, tail) = u.split_at_mut(i);
                let src = head[1].clone();
                axpy_checked(&mut tail[0], -q, &src)?;
            }
            if col_b[i] != 0 {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    Ok(u.split_off(2))
}

/// Recursively transforms `basis` (a ℤ-basis of a sublattice on which the
/// pairing is unimodular alternating) into hyperbolic pairs
/// `(p₁, q₁), …, (p_m, q_m)` with `⟨p_i, q_i⟩ = 1` and all other pairings 0.
fn symplectic_pairs(mut basis: Vec<Vec<i64>>) -> Result<Vec<(Vec<i64>, Vec<i64>)>, SymplecticError> {
    let mut pairs = Vec::new();
    while !basis.is_empty() {
        // Gram row of basis[0] against the others; its gcd is 1 because the
        // form is unimodular on the span and basis[0] is primitive in it.
        let head = basis[0].clone();
        // Euclidean reduction among basis[1..] until exactly one has nonzero
        // pairing with head, equal to ±1.
        loop {
            let mut vals: Vec<(usize, i128)> = (1..basis.len())
                .map(|i| (i, pairing_int(&head, &basis[i])))
                .filter(|&(_, p)| p != 0)
                .collect();
            if vals.is_empty() {
                return Err(SymplecticError::BadDimension(
                    "pairing degenerates on sublattice".into(),
                ));
            }
            vals.sort_by_key(|&(i, p)| (p.unsigned_abs(), i));
            if vals.len() == 1 {
                let (idx, p) = vals[0];
                if p.unsigned_abs() != 1 {
                    return Err(SymplecticError::BadDimension(
                        "pairing not unimodular on sublattice".into(),
                    ));
                }
                if p == -1 {
                    for x in basis[idx].iter_mut() {
                        *x = -*x;
                    }
                }
                basis.swap(1, idx);
                break;
            }
            let (imin, pmin) = vals[0];
            for &(i, p) in vals.iter().skip(1) {
                let q = p.div_euclid(pmin);
                if q != 0 {
                    let src = basis[imin].clone();
                    axpy_checked(&mut basis[i], checked_i64(-q)?, &src)?;
                }
            }
        }
        let partner = basis[1].clone();
        // Project the rest onto the symplectic complement of (head, partner):
        // u ← u + ⟨partner, u⟩·head − ⟨head, u⟩·partner.
        for i in 2..basis.len() {
            let a = checked_i64(pairing_int(&partner, &basis[i]))?;
            let b = checked_i64(pairing_int(&head, &basis[i]))?;
            let (h, p) = (head.clone(), partner.clone());
            axpy_checked(&mut basis[i], a, &h)?;
            axpy_checked(&mut basis[i], -b, &p)?;
        }
        pairs.push((head, partner));
        basis.drain(0..2);
    }
    Ok(pairs)
}

/// Completes a primitive integer row `v` to an exactly symplectic integer
/// matrix whose **last** row is `v`.
///
/// Construction: extended gcd on the coefficients of `⟨·, v⟩` produces `w`
/// with `⟨w, v⟩ = 1`; the integer kernel of the two forms `⟨·, v⟩, ⟨·, w⟩`
/// is then split into hyperbolic pairs; rows are assembled as
/// `(w, p₁, …, p_{n-1}, q_{n-1}, …, q₁, v)` so the Gram matrix is exactly
/// `Ω`. Fully deterministic; exactness is re-verified on the result.
pub fn symplectic_completion(v: &[i64]) -> Result<IntegerSymplecticMatrix, SymplecticError> {
    let d = v.len();
    if d % 2 != 0 || d == 0 {
        return Err(SymplecticError::BadDimension(format!(
            "vector length {} is not even and positive",
            d
        )));
    }
    let n = d / 2;
    let g = gcd_vec(v);
    if g != 1 {
        return Err(SymplecticError::NotPrimitive(g));
    }
    let alpha = pairing_form_coeffs(v);
    let (g, w) = extended_gcd_vec(&alpha);
    debug_assert_eq!(g, 1);
    debug_assert_eq!(pairing_int(&w, v), 1);

    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(d);
    rows.push(w.clone());
    if n > 1 {
        let beta = pairing_form_coeffs(&w);
        let kernel = integer_kernel_two_forms(&alpha, &beta)?;
        let pairs = symplectic_pairs(kernel)?;
        debug_assert_eq!(pairs.len(), n - 1);
        for (p, _) in pairs.iter() {
            rows.push(p.clone());
        }
        for (_, q) in pairs.iter().rev() {
            rows.push(q.clone());
        }
    }
    rows.push(v.to_vec());
    let entries: Vec<i64> = rows.concat();
    IntegerSymplecticMatrix::new(entries, n)
}
