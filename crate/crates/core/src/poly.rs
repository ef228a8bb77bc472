//! Dense complex polynomials: arithmetic, composition, roots and right factors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A polynomial with complex coefficients in ascending degree order.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has an
/// empty coefficient vector and `degree() == None`.
#[derive(Clone, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `c * z^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `(z - r_1)...(z - r_n)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Self::constant(Complex64::new(1.0, 0.0));
        for &r in roots {
            p = &p * &Self::new(vec![-r, Complex64::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn degree_signed(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Largest coefficient modulus.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `sum |p_i| |z|^i`, the natural scale for rounding errors of `eval`.
    pub fn eval_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> ComplexPoly {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> ComplexPoly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> ComplexPoly {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficients of `p(z + h)`, i.e. the scaled Taylor coefficients at `h`.
    pub fn shift(&self, h: Complex64) -> ComplexPoly {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = out[j + 1];
                out[j] += h * next;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: usize) -> ComplexPoly {
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `outer(inner(z))` by Horner's scheme in the polynomial ring.
    pub fn compose(&self, inner: &ComplexPoly) -> ComplexPoly {
        let mut acc = ComplexPoly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &ComplexPoly::constant(c);
        }
        acc
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &ComplexPoly) -> (ComplexPoly, ComplexPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (ComplexPoly::zero(), ComplexPoly::zero());
        };
        if nd < dd {
            return (ComplexPoly::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = Complex64::zero();
        }
        rem.truncate(dd);
        (ComplexPoly::new(quot), ComplexPoly::new(rem))
    }

    /// Max-coefficient distance.
    pub fn distance(&self, other: &ComplexPoly) -> f64 {
        (self - other).norm_inf()
    }

    /// Affine normal form: returns `(w, alpha, beta)` with `self = alpha * w + beta`,
    /// `w` monic and `w(0) = 0`. `None` for constants.
    pub fn normalize_affine(&self) -> Option<(ComplexPoly, Complex64, Complex64)> {
        let deg = self.degree()?;
        if deg == 0 {
            return None;
        }
        let alpha = self.leading();
        let beta = self.coeff(0);
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|&c| c / alpha).collect();
        coeffs[0] = Complex64::zero();
        coeffs[deg] = Complex64::new(1.0, 0.0);
        Some((ComplexPoly::new(coeffs), alpha, beta))
    }

    /// Multiplicity of `z` as a root: the number of leading Taylor coefficients at
    /// `z` that are negligible relative to `rel_tol * eval_abs(z)`.
    pub fn root_multiplicity(&self, z: Complex64, rel_tol: f64) -> usize {
        let taylor = self.shift(z);
        let scale = self.eval_abs(z).max(f64::MIN_POSITIVE);
        taylor
            .coeffs
            .iter()
            .take_while(|c| c.norm() <= rel_tol * scale)
            .count()
    }
}

impl fmt::Debug for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![Complex64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for ComplexPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        Ok(ComplexPoly::new(
            repr.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

/// Chebyshev polynomial of the first kind from `T_{n+1} = 2z T_n - T_{n-1}`.
pub fn chebyshev(n: usize) -> ComplexPoly {
    let two_z = ComplexPoly::from_real(&[0.0, 2.0]);
    let mut prev = ComplexPoly::from_real(&[1.0]);
    if n == 0 {
        return prev;
    }
    let mut cur = ComplexPoly::identity();
    for _ in 1..n {
        let next = &(&two_z * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Settings for [`roots_with`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub tol_root: f64,
    pub tol_cluster: f64,
    pub max_iter: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol_root: 1e-10,
            tol_cluster: 1e-8,
            max_iter: 1000,
            max_restarts: 8,
            seed: 0x5eed,
        }
    }
}

pub fn roots(p: &ComplexPoly) -> Result<Vec<Complex64>> {
    roots_with(p, &RootOptions::default())
}

/// All roots with multiplicity (Aberth–Ehrlich iteration).
///
/// Near-multiple roots come out of the iteration as a small ring of radius about
/// `eps^(1/m)`; such rings are replaced by their centroid when the Taylor
/// expansion at the centroid confirms an `m`-fold root.
pub fn roots_with(p: &ComplexPoly, opts: &RootOptions) -> Result<Vec<Complex64>> {
    let n = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::DegreeTooLow(p.degree_signed())),
    };
    let monic = p.scale(p.leading().inv());
    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let dp = monic.derivative();
    // Cauchy-type bound for the initial circle.
    let radius = 1.0
        + monic.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut roots = Vec::new();
    let mut converged = false;
    for restart in 0..=opts.max_restarts {
        let r0 = if restart == 0 {
            0.5 * radius
        } else {
            radius * rng.gen_range(0.1..1.0)
        };
        let phase0: f64 = if restart == 0 { 0.4 } else { rng.gen_range(0.0..std::f64::consts::TAU) };
        roots = (0..n)
            .map(|k| {
                Complex64::from_polar(r0, phase0 + std::f64::consts::TAU * k as f64 / n as f64)
            })
            .collect::<Vec<_>>();
        if aberth(&monic, &dp, &mut roots, opts.max_iter) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(opts.max_restarts));
    }
    polish_simple(&monic, &dp, &mut roots);
    Ok(cluster_roots(&monic, roots, opts.tol_cluster))
}

fn aberth(p: &ComplexPoly, dp: &ComplexPoly, z: &mut [Complex64], max_iter: usize) -> bool {
    let n = z.len();
    let eps = f64::EPSILON;
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pv = p.eval(z[i]);
            if pv.norm() <= 4.0 * n as f64 * eps * p.eval_abs(z[i]) {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = pv / dp.eval(z[i]);
            let mut sum = Complex64::zero();
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let step = if denom.norm() > 0.0 && denom.is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if !step.is_finite() {
                return false;
            }
            z[i] -= step;
            if step.norm() <= eps * z[i].norm().max(eps) {
                done[i] = true;
            }
        }
        if all {
            return true;
        }
    }
    // Accept if every root has a small backward error even when the
    // correction did not flatten out (typical for clusters).
    z.iter()
        .all(|&r| p.eval(r).norm() <= 1e3 * n as f64 * eps * p.eval_abs(r))
}

fn polish_simple(p: &ComplexPoly, dp: &ComplexPoly, z: &mut [Complex64]) {
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = (p.eval(*r), dp.eval(*r));
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            // Only polish well-conditioned roots; Newton is linear on clusters.
            if step.norm().is_nan() || step.norm() >= 1e-6 * (1.0 + r.norm()) {
                break;
            }
            *r -= step;
        }
    }
}

/// Agglomerative clustering of computed roots; a merged group of size `m`
/// is accepted when its members lie inside the rounding radius predicted for an
/// `m`-fold root at the centroid.
fn cluster_roots(p: &ComplexPoly, roots: Vec<Complex64>, tol_cluster: f64) -> Vec<Complex64> {
    let n = roots.len();
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut groups: Vec<Vec<Complex64>> = roots.into_iter().map(|r| vec![r]).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let d = (centroid(&groups[i]) - centroid(&groups[j])).norm();
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, d)) = best else { break };
        let mut merged = groups[i].clone();
        merged.extend_from_slice(&groups[j]);
        let accept = d <= tol_cluster * scale || cluster_is_multiple_root(p, &merged, n);
        if !accept {
            break;
        }
        groups[i] = merged;
        groups.swap_remove(j);
    }
    let mut out = Vec::with_capacity(n);
    for g in &groups {
        let c = refine_cluster_center(p, centroid(g), g.len());
        out.extend(std::iter::repeat_n(c, g.len()));
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// An `m`-fold root is a simple root of the `(m-1)`-th derivative.
fn refine_cluster_center(p: &ComplexPoly, c: Complex64, m: usize) -> Complex64 {
    if m == 1 {
        return c;
    }
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = c;
    for _ in 0..8 {
        let den = dd.eval(z);
        if den.norm() == 0.0 {
            break;
        }
        let step = d.eval(z) / den;
        if !step.is_finite() || step.norm() > 1e-2 * (1.0 + z.norm()) {
            return c;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn centroid(zs: &[Complex64]) -> Complex64 {
    zs.iter().sum::<Complex64>() / zs.len() as f64
}

fn cluster_is_multiple_root(p: &ComplexPoly, members: &[Complex64], n: usize) -> bool {
    let m = members.len();
    let c = centroid(members);
    let taylor = p.shift(c);
    let am = taylor.coeff(m).norm();
    if am == 0.0 {
        return false;
    }
    let noise = 64.0 * n as f64 * f64::EPSILON * p.eval_abs(c);
    let rho = (noise / am).powf(1.0 / m as f64);
    members.iter().all(|&r| (r - c).norm() <= 4.0 * rho)
        && (0..m).all(|j| taylor.coeff(j).norm() * rho.powi(j as i32) <= 16.0 * noise)
}

/// Right factor of degree `m`: `p = A ∘ B` with `B` monic and `B(0) = 0`.
///
/// The top `m` coefficients of `p` determine `B` through a triangular system;
/// `A` then comes from the `B`-adic expansion of `p`. Returns `Ok(None)` when
/// the expansion leaves a non-constant remainder above `tol_decomp`.
pub fn decompose_right(
    p: &ComplexPoly,
    m: usize,
    tol_decomp: f64,
) -> Result<Option<(ComplexPoly, ComplexPoly)>> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegreeTooLow(p.degree_signed()));
    }
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::InvalidDegree { n, m });
    }
    let r = n / m;
    let lead = p.leading();
    let target: Vec<Complex64> = p.coeffs.iter().map(|&c| c / lead).collect();
    // b[m] = 1, b[0] = 0; solve b[m-j] for j = 1..m-1 from coefficient n-j of B^r.
    let mut b = vec![Complex64::zero(); m + 1];
    b[m] = Complex64::new(1.0, 0.0);
    for j in 1..m {
        let partial = ComplexPoly::new(b.clone()).pow(r);
        let c = partial.coeff(n - j);
        b[m - j] = (target[n - j] - c) / r as f64;
    }
    let bpoly = ComplexPoly::new(b);
    let Some(a) = b_adic_expansion(p, &bpoly, tol_decomp) else {
        return Ok(None);
    };
    Ok(Some((a, bpoly)))
}

/// Writes `p = sum a_i B^i` and returns `A = sum a_i z^i` when every remainder
/// is constant up to `tol * |p|_inf`, with a final composition check.
pub fn b_adic_expansion(p: &ComplexPoly, b: &ComplexPoly, tol: f64) -> Option<ComplexPoly> {
    let scale = p.norm_inf().max(f64::MIN_POSITIVE);
    let mut rest = p.clone();
    let mut digits = Vec::new();
    while !rest.is_zero() {
        let (q, rem) = rest.div_rem(b);
        if rem.coeffs.iter().skip(1).any(|c| c.norm() > tol * scale) {
            return None;
        }
        digits.push(rem.coeff(0));
        rest = q;
    }
    let a = ComplexPoly::new(digits);
    (p.distance(&a.compose(b)) <= tol * scale).then_some(a)
}

/// Left-affine equivalence: `(alpha, beta)` with `w2 ≈ alpha * w1 + beta`.
pub fn affine_equivalent(
    w1: &ComplexPoly,
    w2: &ComplexPoly,
    tol: f64,
) -> Option<(Complex64, Complex64)> {
    let d = w1.degree()?;
    if d == 0 || w2.degree() != Some(d) {
        return None;
    }
    let alpha = w2.leading() / w1.leading();
    let beta = w2.coeff(0) - alpha * w1.coeff(0);
    let fitted = &w1.scale(alpha) + &ComplexPoly::constant(beta);
    (w2.distance(&fitted) <= tol * (1.0 + w2.norm_inf())).then_some((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0]);
        assert!(p.eval(c(0.0, 1.0)).norm() < 1e-15);
        let t3 = ComplexPoly::from_real(&[0.0, -3.0, 0.0, 4.0]);
        assert!(t3.eval(c(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-14);
        assert_eq!(ComplexPoly::zero().eval(c(7.0, 2.0)), c(0.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            ComplexPoly::monomial(c(1.0, 0.0), 3).derivative(),
            ComplexPoly::monomial(c(3.0, 0.0), 2)
        );
        assert!(ComplexPoly::constant(c(5.0, 0.0)).derivative().is_zero());
        assert_eq!(
            ComplexPoly::from_real(&[-1.0, 0.0, 2.0]).derivative(),
            ComplexPoly::from_real(&[0.0, 4.0])
        );
    }

    #[test]
    fn compose_examples() {
        let z2 = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let zp1 = ComplexPoly::from_real(&[1.0, 1.0]);
        assert_eq!(z2.compose(&zp1), ComplexPoly::from_real(&[1.0, 2.0, 1.0]));
        let t6 = chebyshev(3).compose(&chebyshev(2));
        assert_eq!(
            t6,
            ComplexPoly::from_real(&[-1.0, 0.0, 18.0, 0.0, -48.0, 0.0, 32.0])
        );
        let p = ComplexPoly::from_real(&[3.0, -1.0, 2.0]);
        assert_eq!(ComplexPoly::identity().compose(&p), p);
    }

    #[test]
    fn chebyshev_small() {
        assert_eq!(chebyshev(0), ComplexPoly::from_real(&[1.0]));
        assert_eq!(chebyshev(1), ComplexPoly::identity());
        assert_eq!(chebyshev(2), ComplexPoly::from_real(&[-1.0, 0.0, 2.0]));
        assert_eq!(chebyshev(3), ComplexPoly::from_real(&[0.0, -3.0, 0.0, 4.0]));
    }

    #[test]
    fn chebyshev_matches_cosine_identity() {
        for n in 0..12 {
            let t = chebyshev(n);
            for k in 0..7 {
                let th = 0.37 * k as f64;
                let v = t.eval(c(th.cos(), 0.0));
                assert!((v.re - (n as f64 * th).cos()).abs() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn roots_examples() {
        let mut r = roots(&ComplexPoly::from_real(&[1.0, 0.0, 1.0])).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);

        let cube = ComplexPoly::from_real(&[-1.0, 3.0, -3.0, 1.0]);
        let r = roots(&cube).unwrap();
        assert_eq!(r.len(), 3);
        for x in &r {
            assert_eq!(*x, r[0]);
            assert!((x - c(1.0, 0.0)).norm() < 1e-8, "{r:?}");
        }

        let r = roots(&ComplexPoly::from_real(&[-3.0, 0.0, 3.0])).unwrap();
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_reject_constants() {
        assert_eq!(
            roots(&ComplexPoly::constant(c(2.0, 0.0))),
            Err(Error::DegreeTooLow(0))
        );
        assert_eq!(roots(&ComplexPoly::zero()), Err(Error::DegreeTooLow(-1)));
    }

    #[test]
    fn roots_of_high_power() {
        let p = ComplexPoly::monomial(c(12.0, 0.0), 11);
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 11);
        assert!(r.iter().all(|x| x.norm() < 1e-6));
    }

    #[test]
    fn decompose_right_examples() {
        let z4 = ComplexPoly::monomial(c(1.0, 0.0), 4);
        let (a, b) = decompose_right(&z4, 2, 1e-9).unwrap().unwrap();
        assert_eq!(a, ComplexPoly::monomial(c(1.0, 0.0), 2));
        assert_eq!(b, ComplexPoly::monomial(c(1.0, 0.0), 2));

        let t6 = chebyshev(6);
        let (a, b) = decompose_right(&t6, 2, 1e-9).unwrap().unwrap();
        assert!(a.compose(&b).distance(&t6) < 1e-9);
        assert!(affine_equivalent(&chebyshev(2), &b, 1e-9).is_some());

        let p = ComplexPoly::from_real(&[0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(decompose_right(&p, 2, 1e-9).unwrap(), None);
    }

    #[test]
    fn decompose_right_rejects_non_divisor() {
        assert_eq!(
            decompose_right(&chebyshev(6), 4, 1e-9),
            Err(Error::InvalidDegree { n: 6, m: 4 })
        );
    }

    #[test]
    fn decompose_right_trivial_degrees() {
        let p = ComplexPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0), c(2.0, -1.0)]);
        let (a, b) = decompose_right(&p, 1, 1e-9).unwrap().unwrap();
        assert_eq!(b, ComplexPoly::identity());
        assert!(a.distance(&p) < 1e-12);
        let (a, b) = decompose_right(&p, 3, 1e-9).unwrap().unwrap();
        assert!(a.degree() == Some(1));
        assert!(a.compose(&b).distance(&p) < 1e-12);
        assert_eq!(b.leading(), c(1.0, 0.0));
        assert_eq!(b.coeff(0), c(0.0, 0.0));
    }

    #[test]
    fn affine_equivalence_examples() {
        let z2 = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let w = ComplexPoly::from_real(&[1.0, 0.0, 3.0]);
        let (al, be) = affine_equivalent(&z2, &w, 1e-12).unwrap();
        assert!((al - c(3.0, 0.0)).norm() < 1e-14 && (be - c(1.0, 0.0)).norm() < 1e-14);
        assert!(affine_equivalent(&z2, &ComplexPoly::from_real(&[0.0, 1.0, 1.0]), 1e-12).is_none());
        let t2 = chebyshev(2);
        let w = &t2.scale(c(2.0, 0.0)) - &ComplexPoly::constant(c(5.0, 0.0));
        let (al, be) = affine_equivalent(&t2, &w, 1e-12).unwrap();
        assert!((al - c(2.0, 0.0)).norm() < 1e-14 && (be - c(-5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn multiplicity_via_taylor() {
        let p = ComplexPoly::from_real(&[-1.0, 3.0, -3.0, 1.0]);
        assert_eq!(p.root_multiplicity(c(1.0, 0.0), 1e-12), 3);
        assert_eq!(p.root_multiplicity(c(0.0, 0.0), 1e-12), 0);
    }
}
