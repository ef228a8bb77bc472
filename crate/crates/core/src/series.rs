//! Puiseux expansions at infinity in the local parameter `x = z^{-1/n}`.
//!
//! A [`PuiseuxSeries`] stores `s_k` for `low <= k <= trunc`, representing
//! `Σ s_k z^{-k/n}`. Branch `i` (0-based) carries `s_k ε_n^{ik}` with
//! `ε_n = exp(2πi/n)`, matching the numbering in which the clockwise loop at
//! infinity acts as `(1 2 ... n)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;

type Series = Vec<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn mul_trunc(a: &[Complex64], b: &[Complex64], len: usize) -> Series {
    let mut out = vec![zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if *x == zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1/a` modulo `x^len`, for `a[0] != 0`.
fn inv_trunc(a: &[Complex64], len: usize) -> Series {
    let mut out = vec![zero(); len];
    let a0 = a[0].inv();
    out[0] = a0;
    for k in 1..len {
        let mut acc = zero();
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * out[k - j];
        }
        out[k] = -acc * a0;
    }
    out
}

/// `Σ_i p_i x^{d-i} v^i` modulo `x^len` by Horner in `v`, with `d = deg p`.
fn homogenized(p: &ComplexPoly, v: &[Complex64], len: usize) -> Series {
    let d = match p.degree() {
        Some(d) => d,
        None => return vec![zero(); len],
    };
    let mut acc: Series = vec![zero(); len];
    acc[0] = p.coeff(d);
    for i in (0..d).rev() {
        acc = mul_trunc(&acc, v, len);
        let shift = d - i;
        if shift < len {
            acc[shift] += p.coeff(i);
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PuiseuxSeries {
    pub n: usize,
    pub low: i64,
    pub trunc: i64,
    pub coeffs: Vec<Complex64>,
}

impl PuiseuxSeries {
    pub fn zero(n: usize, trunc: i64) -> Self {
        PuiseuxSeries { n, low: 0, trunc, coeffs: vec![zero(); (trunc + 1).max(0) as usize] }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.low || k > self.trunc {
            return zero();
        }
        self.coeffs[(k - self.low) as usize]
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.low..=self.trunc
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Indices whose coefficient exceeds `rel_tol * max |s_k|`.
    pub fn support(&self, rel_tol: f64) -> Vec<i64> {
        let cut = rel_tol * self.max_abs();
        self.indices().filter(|&k| self.coeff(k).norm() > cut).collect()
    }

    /// Like [`support`](Self::support), also dropping indices at or below the
    /// matching coefficient of `floor`.
    pub fn support_above(&self, rel_tol: f64, floor: &PuiseuxSeries) -> Vec<i64> {
        let cut = rel_tol * self.max_abs();
        self.indices()
            .filter(|&k| {
                let v = self.coeff(k).norm();
                v > cut && v > floor.coeff(k).norm()
            })
            .collect()
    }

    /// Value on branch `branch` (0-based) at the point with `u = z^{1/n}`.
    pub fn eval_branch(&self, u: Complex64, branch: usize) -> Complex64 {
        let eps = Complex64::from_polar(1.0, -TAU * branch as f64 / self.n as f64);
        let x = (eps * u).inv();
        self.indices().map(|k| self.coeff(k) * x.powi(k as i32)).sum()
    }

    pub fn sub(&self, other: &PuiseuxSeries) -> PuiseuxSeries {
        let low = self.low.min(other.low);
        let trunc = self.trunc.min(other.trunc);
        PuiseuxSeries {
            n: self.n,
            low,
            trunc,
            coeffs: (low..=trunc).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        }
    }
}

/// The principal branch `w(u) = Σ_{j >= -1} t_j u^{-j}` of `P^{-1}`, with
/// `t_{-1}` the principal `n`-th root of `1/lc(P)` and coefficients through
/// `j = trunc`; obtained by Newton iteration with precision doubling.
pub fn puiseux_inverse(p: &ComplexPoly, trunc: usize) -> Result<PuiseuxSeries> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(Error::NotNormalizable),
        None => return Err(Error::NotNormalizable),
    };
    // v(x) = x w, so that F(x, v) = x^n P(v/x) = 1.
    let target = trunc + 2;
    let inv_lc = p.leading().inv();
    let v0 = Complex64::from_polar(inv_lc.norm().powf(1.0 / n as f64), inv_lc.arg() / n as f64);
    let dp = p.derivative();
    let mut v: Series = vec![v0];
    let mut len = 1;
    let mut passes = 0;
    while len < target || passes < 2 {
        if len >= target {
            passes += 1;
        }
        len = (2 * len).min(target);
        v.resize(len, zero());
        let mut f = homogenized(p, &v, len);
        f[0] -= Complex64::new(1.0, 0.0);
        // F_v(x, v) = x^{n-1} P'(v/x) = Σ i p_i x^{n-i} v^{i-1}
        let fv = homogenized(&dp, &v, len);
        let step = mul_trunc(&f, &inv_trunc(&fv, len), len);
        for (vi, si) in v.iter_mut().zip(step) {
            *vi -= si;
        }
    }
    let mut resid = homogenized(p, &v, target);
    resid[0] -= Complex64::new(1.0, 0.0);
    let r = resid.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = 1.0 + v.iter().map(|c| c.norm()).fold(0.0, f64::max) * p.norm_inf() / p.leading().norm();
    if r.is_nan() || r > 1e-9 * scale {
        return Err(Error::RecoveryFailure(r));
    }
    Ok(PuiseuxSeries { n, low: -1, trunc: trunc as i64, coeffs: v })
}

/// Coefficients of `Q(w)` for `k <= trunc`.
pub fn q_of_inverse(q: &ComplexPoly, w: &PuiseuxSeries, trunc: i64) -> Result<PuiseuxSeries> {
    let d = match q.degree() {
        Some(d) => d as i64,
        None => return Ok(PuiseuxSeries::zero(w.n, trunc)),
    };
    if w.low != -1 || trunc + d - 1 > w.trunc {
        return Err(Error::TruncationTooShort {
            need: (trunc + d - 1).max(0) as usize,
            got: w.trunc.max(0) as usize,
        });
    }
    let len = (trunc + d + 1) as usize;
    let g = homogenized(q, &w.coeffs[..len.min(w.coeffs.len())], len);
    Ok(PuiseuxSeries { n: w.n, low: -d, trunc, coeffs: g })
}

/// Rounding-error estimate for `q_of_inverse(q, w, trunc)`: the same
/// composition on coefficient moduli, times a small multiple of machine
/// epsilon. The coefficients of `w` grow geometrically, so a threshold relative
/// to `max |s_k|` alone mistakes late rounding noise for support.
pub fn noise_floor(q: &ComplexPoly, w: &PuiseuxSeries, trunc: i64) -> Result<PuiseuxSeries> {
    let modulus = |c: &Complex64| Complex64::new(c.norm(), 0.0);
    let aq = ComplexPoly::new(q.coeffs().iter().map(modulus).collect());
    let aw = PuiseuxSeries { coeffs: w.coeffs.iter().map(modulus).collect(), ..w.clone() };
    let mut floor = q_of_inverse(&aq, &aw, trunc)?;
    for c in &mut floor.coeffs {
        *c *= 256.0 * f64::EPSILON;
    }
    Ok(floor)
}

/// Default truncation: every structurally possible `s_k` plus `2n` guard terms.
pub fn default_truncation(n: usize, deg_q: usize) -> i64 {
    (n * (deg_q + 2) + 2 * n) as i64
}

/// Sub-series on the indices `k ≡ 0 (mod n/f)`.
pub fn extract_psi(series: &PuiseuxSeries, f: usize) -> Result<PuiseuxSeries> {
    let n = series.n;
    if f == 0 || !n.is_multiple_of(f) || f == n {
        return Err(Error::InvalidDivisor { n, d: f });
    }
    let step = (n / f) as i64;
    let mut out = series.clone();
    for k in series.indices() {
        if k.rem_euclid(step) != 0 {
            out.coeffs[(k - series.low) as usize] = zero();
        }
    }
    Ok(out)
}

/// The polynomial `S` with `S(w) = psi` through the common truncation, by
/// eliminating leading terms against powers of `w`. Coefficients within
/// `floor` (see [`noise_floor`]) count as zero.
pub fn recover_polynomial(
    psi: &PuiseuxSeries,
    w: &PuiseuxSeries,
    floor: &PuiseuxSeries,
    tol_recover: f64,
) -> Result<ComplexPoly> {
    let scale = psi.max_abs();
    let lead = psi.support_above(tol_recover, floor);
    if lead.is_empty() {
        return Ok(ComplexPoly::zero());
    }
    let deg = (-lead[0]).max(0) as usize;
    let trunc = psi.trunc;
    let mut rest = psi.clone();
    let mut coeffs = vec![zero(); deg + 1];
    let t_lead = w.coeff(-1);
    for j in (0..=deg).rev() {
        let c = rest.coeff(-(j as i64)) / t_lead.powi(j as i32);
        if c == zero() {
            continue;
        }
        coeffs[j] = c;
        let term = q_of_inverse(&ComplexPoly::monomial(c, j), w, trunc)?;
        rest = rest.sub(&term);
    }
    let resid = rest.indices().map(|k| rest.coeff(k).norm() - floor.coeff(k).norm()).fold(0.0, f64::max);
    if resid > tol_recover * scale {
        return Err(Error::RecoveryFailure(resid / scale));
    }
    Ok(ComplexPoly::new(coeffs))
}
