//! Moments `∫_a^b P^i dQ`, the coefficients of `Ĥ`, and the vanishing verifier
//! that compares moments, branch relations, and the Puiseux support.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::cactus::{Cactus, FVectors};
use crate::error::Result;
use crate::monodromy::{ray_root, MonodromyData};
use crate::poly::ComplexPoly;
use crate::rational::{rat, RationalSubspace, RationalVector};
use crate::series::{default_truncation, noise_floor, puiseux_inverse, q_of_inverse};
use crate::tol::Tolerances;
use crate::track::continue_branches;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn default_nodes(deg_p: usize, deg_q: usize, moments: usize) -> usize {
    64.max(4 * (moments + deg_p * moments + deg_q))
}

/// `Q - Q(a)`.
pub fn normalize_at(q: &ComplexPoly, a: Complex64) -> ComplexPoly {
    q - &ComplexPoly::constant(q.eval(a))
}

/// `(Σ_j P(z_j)^i g(z_j) dz_j, Σ_j |P(z_j)|^i |g(z_j)| |dz_j|)` for `i = 0..count`.
fn power_integrals(
    p: &ComplexPoly,
    g: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    count: usize,
    nodes: usize,
) -> (Vec<Complex64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(nodes);
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut vals = vec![Complex64::new(0.0, 0.0); count];
    let mut abs = vec![0.0; count];
    for (x, w) in xs.iter().zip(&ws) {
        let z = mid + half * x;
        let pz = p.eval(z);
        let mut term = g.eval(z) * half * w;
        for i in 0..count {
            vals[i] += term;
            abs[i] += term.norm();
            term *= pz;
        }
    }
    (vals, abs)
}

/// `m_i = ∫_a^b P^i Q' dz` for `i = 0..=count`, with the absolute integrals as scale.
pub fn quadrature_moments_scaled(
    p: &ComplexPoly,
    q: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    moments: usize,
    nodes: usize,
) -> (Vec<Complex64>, Vec<f64>) {
    power_integrals(p, &q.derivative(), a, b, moments + 1, nodes)
}

pub fn quadrature_moments(
    p: &ComplexPoly,
    q: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    moments: usize,
    nodes: usize,
) -> Vec<Complex64> {
    quadrature_moments_scaled(p, q, a, b, moments, nodes).0
}

/// `∫_a^b P^i Q P' dz` for `i < count`, with `Q` normalized by `Q(a) = 0`.
pub fn h_series_scaled(
    p: &ComplexPoly,
    q: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    count: usize,
) -> (Vec<Complex64>, Vec<f64>) {
    let qn = normalize_at(q, a);
    let g = &qn * &p.derivative();
    let nodes = default_nodes(p.degree().unwrap_or(0), g.degree().unwrap_or(0), count);
    power_integrals(p, &g, a, b, count, nodes)
}

pub fn h_series(p: &ComplexPoly, q: &ComplexPoly, a: Complex64, b: Complex64, count: usize) -> Vec<Complex64> {
    h_series_scaled(p, q, a, b, count).0
}

/// Elements the space `M_{P,a,b}` must contain: `1/d_a` on `V(a)` minus `1/d_b`
/// on `V(b)` when `P(a) = P(b)`, and the two indicator averages separately otherwise.
pub fn brc_elements(cactus: &Cactus, same_value: bool) -> Vec<RationalVector> {
    let n = cactus.n;
    let indicator = |set: &[usize], sign: i64| {
        let mut v = RationalVector::zeros(n);
        for &i in set {
            v[i] = rat(sign, set.len() as i64);
        }
        v
    };
    let va = indicator(&cactus.v_a, 1);
    let vb = indicator(&cactus.v_b, 1);
    if same_value {
        let mut v = va;
        for i in 0..n {
            v[i] = &v[i] - &vb[i];
        }
        vec![v]
    } else {
        vec![va, vb]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PuiseuxViolation {
    pub k: i64,
    /// Largest `|<w_k, v>|` over unit basis vectors `v` of M.
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub moments: Vec<Complex64>,
    pub moment_scale: f64,
    pub moments_vanish: bool,
    /// Indices `i` of moments above tolerance.
    pub nonvanishing_moments: Vec<usize>,
    pub h_coefficients: Vec<Complex64>,
    pub h_vanish: bool,
    /// Largest relative `|φ_s|` over the sample points, per color.
    pub phi_residuals: Vec<f64>,
    /// Largest relative `|Σ v_i Q(P_i^{-1})|` over basis vectors of M.
    pub invariant_residual: f64,
    pub phi_vanish: bool,
    pub puiseux_support: Vec<i64>,
    pub puiseux_violations: Vec<PuiseuxViolation>,
    pub verdict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub moments: usize,
    pub truncation: Option<i64>,
    pub tol: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { moments: 25, truncation: None, tol: Tolerances::default() }
    }
}

/// Points `c + r u` on the outward ray, geometrically spaced, with the fiber
/// continued to each of them.
pub fn ray_samples(md: &MonodromyData, p: &ComplexPoly, count: usize, tol: &Tolerances) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let c = md.base_point;
    let reach = md.critical_values.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
    let r0 = 0.5 * reach.max(1.0);
    let mut out = Vec::with_capacity(count);
    let mut z_prev = c;
    let mut fiber = md.fiber.clone();
    for j in 0..count {
        let z = c + md.outward * (r0 * 3f64.powi(j as i32));
        fiber = continue_branches(p, &[z_prev, z], &fiber, tol.track)?;
        out.push((z, fiber.clone()));
        z_prev = z;
    }
    Ok(out)
}

fn unit_vectors(m: &RationalSubspace, norm2: bool) -> Vec<Vec<f64>> {
    m.basis()
        .iter()
        .map(|v| {
            let f = v.to_f64();
            let s = if norm2 {
                f.iter().map(|x| x * x).sum::<f64>().sqrt()
            } else {
                f.iter().map(|x| x.abs()).fold(0.0, f64::max)
            };
            f.iter().map(|x| x / s).collect()
        })
        .collect()
}

fn relation_residual(weights: &[f64], values: &[Complex64]) -> f64 {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: Complex64 = weights.iter().zip(values).map(|(w, v)| v * w).sum();
    s.norm() / scale
}

/// Largest relative `|Σ_i v_i Q(P_i^{-1}(z))|` over the samples, per weight vector.
pub fn sampled_residuals(
    samples: &[(Complex64, Vec<Complex64>)],
    q: &ComplexPoly,
    weights: &[Vec<f64>],
) -> Vec<f64> {
    let mut out = vec![0.0f64; weights.len()];
    for (_, fiber) in samples {
        let values: Vec<Complex64> = fiber.iter().map(|w| q.eval(*w)).collect();
        for (r, v) in out.iter_mut().zip(weights) {
            *r = r.max(relation_residual(v, &values));
        }
    }
    out
}

/// Three independent vanishing checks for `Q` (normalized by `Q(a) = 0`).
#[allow(clippy::too_many_arguments)]
pub fn verify_vanishing(
    p: &ComplexPoly,
    q: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    md: &MonodromyData,
    fvectors: &FVectors,
    m_space: &RationalSubspace,
    opts: &VerifyOptions,
) -> Result<MomentReport> {
    let tol = &opts.tol;
    let n = md.n;
    let qn = normalize_at(q, a);
    let deg_q = qn.degree().unwrap_or(0);

    // moments i = 0..count-1
    let count = opts.moments.max(1);
    let nodes = default_nodes(n, deg_q, count);
    let (moments, abs) = quadrature_moments_scaled(p, &qn, a, b, count - 1, nodes);
    let moment_scale = abs.iter().copied().fold(0.0, f64::max);
    let nonvanishing_moments: Vec<usize> = if qn.is_zero() {
        Vec::new()
    } else {
        moments
            .iter()
            .zip(&abs)
            .enumerate()
            .filter(|(_, (m, s))| m.norm().is_nan() || m.norm() > tol.moments * s.max(f64::MIN_POSITIVE))
            .map(|(i, _)| i)
            .collect()
    };
    let moments_vanish = nonvanishing_moments.is_empty();
    let (h_coefficients, h_abs) = h_series_scaled(p, &qn, a, b, count);
    let h_vanish = h_coefficients.iter().zip(&h_abs).all(|(h, s)| h.norm() <= tol.moments * s.max(f64::MIN_POSITIVE))
        || qn.is_zero();

    let samples = ray_samples(md, p, 8, tol)?;
    let fweights: Vec<Vec<f64>> = fvectors
        .vectors
        .iter()
        .map(|f| f.iter().map(|&x| x as f64).collect())
        .collect();
    let phi_residuals = sampled_residuals(&samples, &qn, &fweights);
    let invariant_residual = sampled_residuals(&samples, &qn, &unit_vectors(m_space, false))
        .into_iter()
        .fold(0.0, f64::max);
    let phi_vanish = phi_residuals.iter().all(|r| *r <= tol.phi) && invariant_residual <= tol.phi;

    let trunc = opts.truncation.unwrap_or_else(|| default_truncation(n, deg_q));
    let w = puiseux_inverse(p, (trunc + deg_q as i64).max(1) as usize)?;
    let series = q_of_inverse(&qn, &w, trunc)?;
    let puiseux_support = series.support_above(tol.series, &noise_floor(&qn, &w, trunc)?);
    let unit = unit_vectors(m_space, true);
    let mut puiseux_violations = Vec::new();
    for &k in &puiseux_support {
        let witness = unit
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(i, x)| Complex64::from_polar(*x, TAU * (i as i64 * k).rem_euclid(n as i64) as f64 / n as f64))
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max);
        if witness > tol.perp * (n as f64).sqrt() {
            puiseux_violations.push(PuiseuxViolation { k, witness });
        }
    }
    let verdict = moments_vanish && phi_vanish && puiseux_violations.is_empty();
    Ok(MomentReport {
        moments,
        moment_scale,
        moments_vanish,
        nonvanishing_moments,
        h_coefficients,
        h_vanish,
        phi_residuals,
        invariant_residual,
        phi_vanish,
        puiseux_support,
        puiseux_violations,
        verdict,
    })
}

/// Series values at far points of the outward ray against continued branches:
/// the largest relative discrepancy over all branches.
pub fn branch_consistency(md: &MonodromyData, p: &ComplexPoly, z_far: Complex64, tol: &Tolerances) -> Result<f64> {
    let w = puiseux_inverse(p, 8 * md.n)?;
    let fiber = continue_branches(p, &[md.base_point, z_far], &md.fiber, tol.track)?;
    let u = ray_root(z_far, md.outward, md.n);
    Ok(fiber
        .iter()
        .enumerate()
        .map(|(i, v)| (w.eval_branch(u, i) - v).norm() / v.norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cactus::{build_cactus, f_vectors, tree_path};
    use crate::monodromy::monodromy;
    use crate::poly::chebyshev;
    use crate::rational::{contains_vector, invariant_closure};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for k in 0..14 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn moment_examples() {
        let z2 = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let half = ComplexPoly::monomial(c(0.5, 0.0), 2);
        let m = quadrature_moments(&z2, &half, c(-1.0, 0.0), c(1.0, 0.0), 10, 64);
        assert!(m.iter().all(|x| x.norm() < 1e-14));
        let m = quadrature_moments(&z2, &ComplexPoly::identity(), c(-1.0, 0.0), c(1.0, 0.0), 3, 64);
        assert!((m[0] - c(2.0, 0.0)).norm() < 1e-14);

        let h = 3f64.sqrt() / 2.0;
        let q = &chebyshev(2) + &chebyshev(3);
        let m = quadrature_moments(&chebyshev(6), &q, c(-h, 0.0), c(h, 0.0), 25, default_nodes(6, 3, 25));
        assert!(m.iter().all(|x| x.norm() <= 1e-10), "{m:?}");
    }

    #[test]
    fn h_series_matches_integration_by_parts() {
        let p = ComplexPoly::from_real(&[0.2, -1.0, 0.5, 1.0]);
        let q = ComplexPoly::from_real(&[0.0, 0.3, -0.7, 0.2]);
        let (a, b) = (c(-0.4, 0.1), c(0.9, -0.2));
        let qn = normalize_at(&q, a);
        let m = quadrature_moments(&p, &qn, a, b, 8, 128);
        let hs = h_series(&p, &q, a, b, 7);
        let pb = p.eval(b);
        for (i, h) in hs.iter().enumerate() {
            let k = (i + 1) as f64;
            let want = (pb.powi(i as i32 + 1) * qn.eval(b) - m[i + 1]) / k;
            assert!((h - want).norm() < 1e-12 * (1.0 + want.norm()), "i={i}");
        }
        let z = ComplexPoly::identity();
        let h0 = h_series(&z, &ComplexPoly::monomial(c(1.0, 0.0), 2), c(0.0, 0.0), c(1.0, 0.0), 1);
        assert!(h0[0].norm() > 0.1);
    }

    #[test]
    fn h_series_vanishes_for_symmetric_solution() {
        let z2 = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let q = ComplexPoly::monomial(c(0.5, 0.0), 2);
        assert!(h_series(&z2, &q, c(-1.0, 0.0), c(1.0, 0.0), 10).iter().all(|h| h.norm() < 1e-13));
    }

    struct Setup {
        md: MonodromyData,
        f: FVectors,
        m: RationalSubspace,
        cactus: Cactus,
    }

    fn setup(p: &ComplexPoly, a: Complex64, b: Complex64) -> Setup {
        let tol = Tolerances::default();
        let md = monodromy(p, a, b).unwrap();
        let cactus = build_cactus(&md, p, a, b, &tol).unwrap();
        let f = f_vectors(&cactus, &tree_path(&cactus).unwrap());
        let seed: Vec<RationalVector> = f
            .vectors
            .iter()
            .map(|v| RationalVector::from_ints(&v.iter().map(|&x| x as i64).collect::<Vec<_>>()))
            .collect();
        let m = invariant_closure(md.n, &seed, &md.all_generators()).unwrap();
        Setup { md, f, m, cactus }
    }

    #[test]
    fn verifier_accepts_chebyshev_reducible_sum() {
        let h = 3f64.sqrt() / 2.0;
        let (a, b) = (c(-h, 0.0), c(h, 0.0));
        let p = chebyshev(6);
        let s = setup(&p, a, b);
        let q = &chebyshev(2) + &chebyshev(3);
        let r = verify_vanishing(&p, &q, a, b, &s.md, &s.f, &s.m, &VerifyOptions::default()).unwrap();
        assert!(r.verdict, "{r:?}");
        assert!(r.h_vanish);
    }

    #[test]
    fn verifier_rejects_non_solution() {
        let (a, b) = (c(-1.0, 0.0), c(1.0, 0.0));
        let p = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let s = setup(&p, a, b);
        let r = verify_vanishing(&p, &ComplexPoly::identity(), a, b, &s.md, &s.f, &s.m, &VerifyOptions::default())
            .unwrap();
        assert!(!r.verdict);
        assert!(!r.moments_vanish && !r.h_vanish && !r.phi_vanish);
        assert!(!r.puiseux_violations.is_empty());
        let zero = verify_vanishing(&p, &ComplexPoly::zero(), a, b, &s.md, &s.f, &s.m, &VerifyOptions::default())
            .unwrap();
        assert!(zero.verdict);
    }

    #[test]
    fn brc_elements_lie_in_m() {
        let h = 3f64.sqrt() / 2.0;
        let s = setup(&chebyshev(6), c(-h, 0.0), c(h, 0.0));
        let e = brc_elements(&s.cactus, true);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].0.iter().filter(|x| **x == rat(1, 2)).count(), 2);
        assert_eq!(e[0].0.iter().filter(|x| **x == rat(-1, 2)).count(), 2);
        assert!(contains_vector(&s.m, &e[0]).unwrap());

        let s = setup(&ComplexPoly::monomial(c(1.0, 0.0), 2), c(-1.0, 0.0), c(1.0, 0.0));
        let e = brc_elements(&s.cactus, true);
        assert_eq!(e[0].0.iter().map(|x| x.clone() * x.clone()).sum::<crate::rational::Rational>(), rat(2, 1));

        let s = setup(&ComplexPoly::monomial(c(1.0, 0.0), 2), c(0.0, 0.0), c(1.0, 0.0));
        let e = brc_elements(&s.cactus, false);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0], RationalVector(vec![rat(1, 2), rat(1, 2)]));
        for v in &e {
            assert!(contains_vector(&s.m, v).unwrap());
        }
    }

    #[test]
    fn branches_agree_with_puiseux_far_out() {
        let p = ComplexPoly::new(vec![c(0.3, 0.1), c(-1.0, 0.2), c(0.5, 0.0), c(0.0, 0.4), c(1.0, 0.0)]);
        let s = setup(&p, c(0.2, 0.0), c(-0.5, 0.3));
        let scale = 10.0 * p.norm_inf();
        let z = s.md.base_point + s.md.outward * scale.powi(4);
        assert!(branch_consistency(&s.md, &p, z, &Tolerances::default()).unwrap() < 1e-6);
    }
}
