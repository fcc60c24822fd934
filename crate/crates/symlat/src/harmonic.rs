//! Exact algebra of polynomials in `z, z̄` on ℂⁿ: Wirtinger derivatives,
//! the flat Laplacian, harmonic decomposition by bidegree, radial-power
//! sums `Σ P_k(z, z̄) · r^{α_k}`, raising operators, and closed-form
//! monomial integrals over the unit sphere.
//!
//! Everything in this module is computed exactly over the Gaussian
//! rationals ℚ(i); floating point appears only at the evaluation boundary
//! ([`GRat::to_c64`], [`CompiledPoly`]). That makes operator identities
//! checkable as *equalities of canonical forms* rather than numerically.
//!
//! Conventions:
//! - `∂/∂z_j = ½(∂/∂u_j − i ∂/∂v_j)` and `∂/∂z̄_j = ½(∂/∂u_j + i ∂/∂v_j)`
//!   for `z_j = u_j + i v_j`.
//! - The Laplacian is `Δ = 4 Σ_j ∂²/∂z_j ∂z̄_j`.
//! - `r² = Σ_j z_j z̄_j`; a [`RadialSum`] term `P · r^α` differentiates by
//!   `∂_{z_j} r^α = (α/2) z̄_j r^{α−2}` and its mirror.
//! - The sphere measure `σ` is the rotation-invariant **probability**
//!   measure on the unit sphere `S^{2n−1} ⊂ ℂⁿ`; monomial integrals are
//!   `∫ z^a z̄^b dσ = δ_{a,b} (n−1)! ∏_j a_j! / (n−1+|a|)!`.
//!
//! Canonical form of a [`RadialSum`]: terms whose exponents differ by an
//! even integer are merged onto the smallest exponent by multiplying the
//! polynomial part with the polynomial `r²`; exponent groups are sorted.
//! Equality of radial sums is therefore equality of functions on ℂⁿ∖{0}.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A Gaussian rational `re + i·im` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GRat {
    re: BigRational,
    im: BigRational,
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(k)),
            im: BigRational::zero(),
        }
    }

    /// Real rational `num/den`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add<&GRat> for &GRat {
    type Output = GRat;
    fn add(self, o: &GRat) -> GRat {
        GRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub<&GRat> for &GRat {
    type Output = GRat;
    fn sub(self, o: &GRat) -> GRat {
        GRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul<&GRat> for &GRat {
    type Output = GRat;
    fn mul(self, o: &GRat) -> GRat {
        GRat {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Neg for &GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        GRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Add for GRat {
    type Output = GRat;
    fn add(self, o: GRat) -> GRat {
        &self + &o
    }
}

impl Sub for GRat {
    type Output = GRat;
    fn sub(self, o: GRat) -> GRat {
        &self - &o
    }
}

impl Mul for GRat {
    type Output = GRat;
    fn mul(self, o: GRat) -> GRat {
        &self * &o
    }
}

impl Neg for GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        -&self
    }
}

/// Monomial exponents: `z^a z̄^b` with `a, b ∈ ℕⁿ`.
type Mono = (Vec<u32>, Vec<u32>);

/// Polynomial in `z_1..z_n, z̄_1..z̄_n` over the Gaussian rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidegreePolynomial {
    n: usize,
    terms: BTreeMap<Mono, GRat>,
}

impl BidegreePolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, &vec![0; n], &vec![0; n], GRat::one())
    }

    /// The single term `coeff · z^a z̄^b`.
    pub fn monomial(n: usize, a: &[u32], b: &[u32], coeff: GRat) -> Self {
        assert_eq!(a.len(), n);
        assert_eq!(b.len(), n);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((a.to_vec(), b.to_vec()), coeff);
        }
        Self { n, terms }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &GRat)> {
        self.terms.iter()
    }

    /// `(p, q)` if every term has z-degree `p` and z̄-degree `q`.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let deg = |m: &Mono| (m.0.iter().sum::<u32>(), m.1.iter().sum::<u32>());
        let d0 = deg(first);
        for m in it {
            if deg(m) != d0 {
                return None;
            }
        }
        Some(d0)
    }

    fn insert_term(&mut self, mono: Mono, coeff: GRat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &coeff;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GRat::from_int(-1)))
    }

    pub fn scale(&self, c: &GRat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let a: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b: Vec<u32> = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.insert_term((a, b), c1 * c2);
            }
        }
        out
    }

    /// Complex conjugate: swaps `z^a z̄^b → z^b z̄^a` and conjugates
    /// coefficients.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((b.clone(), a.clone()), c.conj()))
                .collect(),
        }
    }

    /// `∂/∂z_j` (0-based `j`).
    pub fn wirtinger_z(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            if a[j] == 0 {
                continue;
            }
            let mut a2 = a.clone();
            a2[j] -= 1;
            out.insert_term((a2, b.clone()), c * &GRat::from_int(a[j] as i64));
        }
        out
    }

    /// `∂/∂z̄_j` (0-based `j`).
    pub fn wirtinger_zbar(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            if b[j] == 0 {
                continue;
            }
            let mut b2 = b.clone();
            b2[j] -= 1;
            out.insert_term((a.clone(), b2), c * &GRat::from_int(b[j] as i64));
        }
        out
    }

    /// `Δ = 4 Σ_j ∂²/∂z_j∂z̄_j`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n);
        for j in 0..self.n {
            out = out.add(&self.wirtinger_zbar(j).wirtinger_z(j));
        }
        out.scale(&GRat::from_int(4))
    }

    /// Multiplication by the polynomial `r² = Σ_j z_j z̄_j`.
    pub fn mul_r2(&self) -> Self {
        let mut out = Self::zero(self.n);
        for j in 0..self.n {
            let mut a = vec![0u32; self.n];
            let mut b = vec![0u32; self.n];
            a[j] = 1;
            b[j] = 1;
            out = out.add(&self.mul(&Self::monomial(self.n, &a, &b, GRat::one())));
        }
        out
    }

    /// Exact division by `r² = Σ_j z_j z̄_j`: `Some(Q)` iff `self = Q·r²`.
    ///
    /// Single-divisor reduction in the lexicographic monomial order, where
    /// the divisor's leading term is `z_1 z̄_1`: whenever the input lies in
    /// the principal ideal `(r²)`, every intermediate leading term must be
    /// divisible by `z_1 z̄_1`, so a failure at any step certifies
    /// non-divisibility. Returns `None` for the zero polynomial.
    pub fn div_r2(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.n;
        let mut rem = self.clone();
        let mut quot = Self::zero(n);
        while let Some((m, c)) = rem
            .terms
            .iter()
            .next_back()
            .map(|(m, c)| (m.clone(), c.clone()))
        {
            if m.0[0] == 0 || m.1[0] == 0 {
                return None;
            }
            let mut a = m.0.clone();
            a[0] -= 1;
            let mut b = m.1.clone();
            b[0] -= 1;
            let mono = Self::monomial(n, &a, &b, c);
            rem = rem.sub(&mono.mul_r2());
            quot = quot.add(&mono);
        }
        Some(quot)
    }

    /// Exact evaluation (converts coefficients at the boundary).
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let mut t = c.to_c64();
            for j in 0..self.n {
                if a[j] > 0 {
                    t *= z[j].powu(a[j]);
                }
                if b[j] > 0 {
                    t *= z[j].conj().powu(b[j]);
                }
            }
            acc += t;
        }
        acc
    }

    /// Freezes coefficients to `f64` for fast repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| (a.clone(), b.clone(), c.to_c64()))
                .collect(),
        }
    }
}

/// Float-coefficient snapshot of a polynomial for hot evaluation loops.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    n: usize,
    terms: Vec<(Vec<u32>, Vec<u32>, Complex64)>,
}

impl CompiledPoly {
    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b, c) in &self.terms {
            let mut t = *c;
            for j in 0..self.n {
                if a[j] > 0 {
                    t *= z[j].powu(a[j]);
                }
                if b[j] > 0 {
                    t *= z[j].conj().powu(b[j]);
                }
            }
            acc += t;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Radial sums P(z, z̄) · r^α.
// ---------------------------------------------------------------------------

/// One summand `poly · r^alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialTerm {
    pub poly: BidegreePolynomial,
    pub alpha: GRat,
}

/// A finite sum `Σ_k P_k(z, z̄) · r^{α_k}` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialSum {
    n: usize,
    terms: Vec<RadialTerm>,
}

/// `Some(k)` iff `a − b = 2k` with `k` a (signed) integer.
fn half_even_gap(a: &GRat, b: &GRat) -> Option<i64> {
    let d = a - b;
    if !d.im().is_zero() {
        return None;
    }
    let re = d.re();
    if !re.is_integer() {
        return None;
    }
    let int = re.to_integer();
    if (&int % 2i32) != BigInt::zero() {
        return None;
    }
    (int / 2i32).to_i64()
}

/// Orders exponents by (real part, imaginary part).
fn alpha_key(a: &GRat) -> (BigRational, BigRational) {
    (a.re().clone(), a.im().clone())
}

impl RadialSum {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: vec![] }
    }

    /// `poly · r^alpha`.
    pub fn from_poly(poly: BidegreePolynomial, alpha: GRat) -> Self {
        let n = poly.vars();
        Self::canonical(
            n,
            vec![RadialTerm { poly, alpha }],
        )
    }

    fn canonical(n: usize, raw: Vec<RadialTerm>) -> Self {
        // Merge exponents that differ by even integers onto the smallest
        // one; `r^{α+2k} = (r²)^k · r^α` with `(r²)^k` a polynomial.
        let mut groups: Vec<RadialTerm> = Vec::new();
        for t in raw {
            if t.poly.is_zero() {
                continue;
            }
            assert_eq!(t.poly.vars(), n, "mixed variable counts");
            let mut placed = false;
            for g in groups.iter_mut() {
                if let Some(k) = half_even_gap(&t.alpha, &g.alpha) {
                    if k >= 0 {
                        let mut p = t.poly.clone();
                        for _ in 0..k {
                            p = p.mul_r2();
                        }
                        g.poly = g.poly.add(&p);
                    } else {
                        let mut gp = g.poly.clone();
                        for _ in 0..(-k) {
                            gp = gp.mul_r2();
                        }
                        g.poly = gp.add(&t.poly);
                        g.alpha = t.alpha.clone();
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                groups.push(t);
            }
        }
        groups.retain(|g| !g.poly.is_zero());
        // Strip r² factors so each group has its unique minimal polynomial
        // part; without this, `P·r^α` and `(P·r²)·r^{α−2}` would compare
        // unequal despite being the same function.
        for g in groups.iter_mut() {
            while let Some(q) = g.poly.div_r2() {
                g.poly = q;
                g.alpha = &g.alpha + &GRat::from_int(2);
            }
        }
        groups.sort_by(|a, b| alpha_key(&a.alpha).cmp(&alpha_key(&b.alpha)));
        Self { n, terms: groups }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut raw = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        Self::canonical(self.n, raw)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GRat::from_int(-1)))
    }

    pub fn scale(&self, c: &GRat) -> Self {
        Self::canonical(
            self.n,
            self.terms
                .iter()
                .map(|t| RadialTerm {
                    poly: t.poly.scale(c),
                    alpha: t.alpha.clone(),
                })
                .collect(),
        )
    }

    pub fn mul_poly(&self, p: &BidegreePolynomial) -> Self {
        Self::canonical(
            self.n,
            self.terms
                .iter()
                .map(|t| RadialTerm {
                    poly: t.poly.mul(p),
                    alpha: t.alpha.clone(),
                })
                .collect(),
        )
    }

    /// `∂/∂z_j`, using `∂_{z_j} r^α = (α/2) z̄_j r^{α−2}`.
    pub fn wirtinger_z(&self, j: usize) -> Self {
        let half = GRat::from_ratio(1, 2);
        let two = GRat::from_int(2);
        let mut raw = Vec::new();
        for t in &self.terms {
            raw.push(RadialTerm {
                poly: t.poly.wirtinger_z(j),
                alpha: t.alpha.clone(),
            });
            let mut b = vec![0u32; self.n];
            b[j] = 1;
            let zbar_j = BidegreePolynomial::monomial(self.n, &vec![0; self.n], &b, GRat::one());
            raw.push(RadialTerm {
                poly: t.poly.mul(&zbar_j).scale(&(&t.alpha * &half)),
                alpha: &t.alpha - &two,
            });
        }
        Self::canonical(self.n, raw)
    }

    /// `∂/∂z̄_j`, using `∂_{z̄_j} r^α = (α/2) z_j r^{α−2}`.
    pub fn wirtinger_zbar(&self, j: usize) -> Self {
        let half = GRat::from_ratio(1, 2);
        let two = GRat::from_int(2);
        let mut raw = Vec::new();
        for t in &self.terms {
            raw.push(RadialTerm {
                poly: t.poly.wirtinger_zbar(j),
                alpha: t.alpha.clone(),
            });
            let mut a = vec![0u32; self.n];
            a[j] = 1;
            let z_j = BidegreePolynomial::monomial(self.n, &a, &vec![0; self.n], GRat::one());
            raw.push(RadialTerm {
                poly: t.poly.mul(&z_j).scale(&(&t.alpha * &half)),
                alpha: &t.alpha - &two,
            });
        }
        Self::canonical(self.n, raw)
    }

    /// Evaluation away from the origin.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let r2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let lnr = 0.5 * r2.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let radial = (t.alpha.to_c64() * lnr).exp();
            acc += t.poly.eval(z) * radial;
        }
        acc
    }

    /// The restriction to the unit sphere (sets `r = 1`).
    pub fn sphere_restriction(&self) -> BidegreePolynomial {
        let mut out = BidegreePolynomial::zero(self.n);
        for t in &self.terms {
            out = out.add(&t.poly);
        }
        out
    }
}

/// `Δ = 4 Σ_j ∂²/∂z_j∂z̄_j` on a radial sum.
pub fn laplacian_apply(f: &RadialSum) -> RadialSum {
    let mut out = RadialSum::zero(f.vars());
    for j in 0..f.vars() {
        out = out.add(&f.wirtinger_zbar(j).wirtinger_z(j));
    }
    out.scale(&GRat::from_int(4))
}

/// The extremal function `z_1^p z̄_n^q · r^{−(s+p+q)}` whose bidegree part
/// is a highest-weight vector of the harmonic space `(p, q)` for `n ≥ 2`.
pub fn highest_weight_function(n: usize, s: &GRat, p: u32, q: u32) -> RadialSum {
    assert!(n >= 1);
    let mut a = vec![0u32; n];
    let mut b = vec![0u32; n];
    a[0] = p;
    b[n - 1] += q;
    let poly = BidegreePolynomial::monomial(n, &a, &b, GRat::one());
    let alpha = -&(s + &GRat::from_int(p as i64 + q as i64));
    RadialSum::from_poly(poly, alpha)
}

/// Raising operator `2 z_1 ∂/∂z̄_1` (shifts bidegree by `(+2, 0)` on the
/// extremal family).
pub fn raise_holomorphic(f: &RadialSum) -> RadialSum {
    let n = f.vars();
    let mut a = vec![0u32; n];
    a[0] = 1;
    let z1 = BidegreePolynomial::monomial(n, &a, &vec![0; n], GRat::from_int(2));
    f.wirtinger_zbar(0).mul_poly(&z1)
}

/// Raising operator `2 z̄_n ∂/∂z_n` (shifts bidegree by `(0, +2)` on the
/// extremal family).
pub fn raise_antiholomorphic(f: &RadialSum) -> RadialSum {
    let n = f.vars();
    let mut b = vec![0u32; n];
    b[n - 1] = 1;
    let zbar_n = BidegreePolynomial::monomial(n, &vec![0; n], &b, GRat::from_int(2));
    f.wirtinger_z(n - 1).mul_poly(&zbar_n)
}

/// Mixed raising operator `2 z_n ∂/∂z̄_1 + 2 z_1 ∂/∂z̄_n`, which moves
/// between bidegrees `(0, 2) → (1, 1) ⊕ (2, 2)` on the extremal family.
pub fn raise_cross(f: &RadialSum) -> RadialSum {
    let n = f.vars();
    let mut an = vec![0u32; n];
    an[n - 1] = 1;
    let zn = BidegreePolynomial::monomial(n, &an, &vec![0; n], GRat::from_int(2));
    let mut a1 = vec![0u32; n];
    a1[0] = 1;
    let z1 = BidegreePolynomial::monomial(n, &a1, &vec![0; n], GRat::from_int(2));
    f.wirtinger_zbar(0)
        .mul_poly(&zn)
        .add(&f.wirtinger_zbar(n - 1).mul_poly(&z1))
}

// ---------------------------------------------------------------------------
// Harmonic spaces by bidegree.
// ---------------------------------------------------------------------------

fn binomial(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimension of the space of harmonic polynomials of bidegree `(p, q)` in
/// `n` complex variables:
/// `C(n+p−1, p)·C(n+q−1, q) − C(n+p−2, p−1)·C(n+q−2, q−1)`.
pub fn harmonic_dimension(n: usize, p: u32, q: u32) -> u64 {
    let n = n as u64;
    let (p, q) = (p as u64, q as u64);
    let full = binomial(n + p - 1, p) * binomial(n + q - 1, q);
    let drop = if p == 0 || q == 0 {
        0
    } else {
        binomial(n + p - 2, p - 1) * binomial(n + q - 2, q - 1)
    };
    (full - drop) as u64
}

/// All multi-indices of length `n` summing to `total`, in a fixed order.
fn multi_indices(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(total);
            out.push(v);
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            rec(n - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

/// Kernel of a rational matrix (rows × cols), as column vectors.
fn rational_kernel(mut mat: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigRational>> {
    let rows = mat.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        // Find a pivot row below `rank`.
        let mut pr = None;
        for (r, row) in mat.iter().enumerate().skip(rank) {
            if !row[col].is_zero() {
                pr = Some(r);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        mat.swap(rank, pr);
        let inv = {
            let p = &mat[rank][col];
            BigRational::one() / p.clone()
        };
        for x in mat[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != rank && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..cols {
                    let sub = &factor * &mat[rank][c];
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (col, p) in pivot_of_col.iter().enumerate() {
            if let Some(prow) = p {
                v[col] = -mat[*prow][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Exact basis of the harmonic polynomials of bidegree `(p, q)`: the kernel
/// of the Laplacian from bidegree `(p, q)` to `(p−1, q−1)` monomials.
pub fn harmonic_basis(n: usize, p: u32, q: u32) -> Vec<BidegreePolynomial> {
    let src_a = multi_indices(n, p);
    let src_b = multi_indices(n, q);
    let sources: Vec<Mono> = src_a
        .iter()
        .flat_map(|a| src_b.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    if p == 0 || q == 0 {
        // Every monomial is harmonic.
        return sources
            .into_iter()
            .map(|(a, b)| BidegreePolynomial::monomial(n, &a, &b, GRat::one()))
            .collect();
    }
    let tgt_a = multi_indices(n, p - 1);
    let tgt_b = multi_indices(n, q - 1);
    let mut tgt_index: BTreeMap<Mono, usize> = BTreeMap::new();
    for a in &tgt_a {
        for b in &tgt_b {
            let idx = tgt_index.len();
            tgt_index.insert((a.clone(), b.clone()), idx);
        }
    }
    let mut mat = vec![vec![BigRational::zero(); sources.len()]; tgt_index.len()];
    for (col, (a, b)) in sources.iter().enumerate() {
        // Δ(z^a z̄^b) = 4 Σ_j a_j b_j z^{a-e_j} z̄^{b-e_j}.
        for j in 0..n {
            if a[j] == 0 || b[j] == 0 {
                continue;
            }
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            a2[j] -= 1;
            b2[j] -= 1;
            let row = tgt_index[&(a2, b2)];
            let c = BigRational::from_integer(BigInt::from(4 * a[j] as i64 * b[j] as i64));
            mat[row][col] = &mat[row][col] + &c;
        }
    }
    rational_kernel(mat, sources.len())
        .into_iter()
        .map(|v| {
            let mut poly = BidegreePolynomial::zero(n);
            for (col, coeff) in v.into_iter().enumerate() {
                if !coeff.is_zero() {
                    let (a, b) = &sources[col];
                    poly = poly.add(&BidegreePolynomial::monomial(
                        n,
                        a,
                        b,
                        GRat::from_rational(coeff),
                    ));
                }
            }
            poly
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sphere integrals.
// ---------------------------------------------------------------------------

fn factorial_big(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// `∫_{S^{2n−1}} z^a z̄^b dσ` for the rotation-invariant probability
/// measure: `δ_{a,b} · (n−1)! ∏_j a_j! / (n−1+|a|)!`.
pub fn sphere_monomial_integral(n: usize, a: &[u32], b: &[u32]) -> BigRational {
    assert_eq!(a.len(), n);
    assert_eq!(b.len(), n);
    if a != b {
        return BigRational::zero();
    }
    let total: u64 = a.iter().map(|&x| x as u64).sum();
    let mut numer = factorial_big(n as u64 - 1);
    for &aj in a {
        numer *= factorial_big(aj as u64);
    }
    let denom = factorial_big(n as u64 - 1 + total);
    BigRational::new(numer, denom)
}

/// Exact Hermitian inner product `⟨P, Q⟩_σ = ∫ P · conj(Q) dσ` on the unit
/// sphere.
pub fn sphere_inner(p: &BidegreePolynomial, q: &BidegreePolynomial) -> GRat {
    assert_eq!(p.vars(), q.vars());
    let n = p.vars();
    let mut acc = GRat::zero();
    for ((a1, b1), c1) in p.terms() {
        for ((a2, b2), c2) in q.terms() {
            // conj(z^{a2} z̄^{b2}) = z^{b2} z̄^{a2}.
            let a: Vec<u32> = a1.iter().zip(b2).map(|(x, y)| x + y).collect();
            let b: Vec<u32> = b1.iter().zip(a2).map(|(x, y)| x + y).collect();
            let integral = sphere_monomial_integral(n, &a, &b);
            if integral.is_zero() {
                continue;
            }
            let w = c1 * &c2.conj();
            acc = &acc + &(&w * &GRat::from_rational(integral));
        }
    }
    acc
}

/// `‖P‖²_σ` as an exact non-negative rational.
pub fn sphere_norm2(p: &BidegreePolynomial) -> BigRational {
    let g = sphere_inner(p, p);
    debug_assert!(g.im().is_zero());
    debug_assert!(!g.re().is_negative());
    g.re().clone()
}

/// `⟨P, 1⟩_σ = ∫ P dσ`.
pub fn sphere_mean(p: &BidegreePolynomial) -> GRat {
    sphere_inner(p, &BidegreePolynomial::one(p.vars()))
}
