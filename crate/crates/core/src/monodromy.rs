//! Monodromy of `P` over its critical values (plus `P(a)`, `P(b)`).
//!
//! Loops are based at a non-critical point `c` and run along the straight arc
//! to `c_s`, once counterclockwise around `c_s`, and back. Arcs are ordered
//! counterclockwise starting from the outward ray, the bisector of the widest
//! angular gap between arc directions, so that `g_1 ... g_k g_inf = 1` with
//! `g_inf` the monodromy of a large clockwise circle. Branches are numbered so
//! that `g_inf = (1 2 ... n)`, branch 1 being the principal Puiseux branch
//! far out on the outward ray.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::poly::{roots_with, ComplexPoly, RootOptions};
use crate::tol::Tolerances;
use crate::track::{circle_path, continue_branches, match_fibers, min_pairwise_distance};

const CIRCLE_PIECES: usize = 64;

/// Distinct critical values with `P(a)`, `P(b)` appended when not critical,
/// ordered by the arcs from `base_point`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalData {
    pub values: Vec<Complex64>,
    pub supplemented: Vec<bool>,
    pub base_point: Complex64,
    /// Unit vector along the outward ray from `base_point`.
    pub outward: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyData {
    pub n: usize,
    pub base_point: Complex64,
    pub outward: Complex64,
    pub critical_values: Vec<Complex64>,
    pub supplemented: Vec<bool>,
    pub generators: Vec<Permutation>,
    pub g_inf: Permutation,
    /// `fiber[i]` is branch `i` over the base point.
    pub fiber: Vec<Complex64>,
}

impl MonodromyData {
    pub fn k(&self) -> usize {
        self.generators.len()
    }

    /// Index of the value `z` among the critical values, if it is one of them.
    pub fn color_of(&self, z: Complex64, tol_cluster: f64) -> Option<usize> {
        let radius = cluster_radius(&self.critical_values, tol_cluster);
        self.critical_values
            .iter()
            .position(|v| (v - z).norm() <= radius)
    }

    /// Generators followed by `g_inf`, the full relation of the monodromy group.
    pub fn all_generators(&self) -> Vec<Permutation> {
        let mut g = self.generators.clone();
        g.push(self.g_inf.clone());
        g
    }
}

fn cluster_radius(values: &[Complex64], tol_cluster: f64) -> f64 {
    tol_cluster * (1.0 + values.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

fn root_options(tol: &Tolerances) -> RootOptions {
    RootOptions { tol_root: tol.root, tol_cluster: tol.cluster, ..RootOptions::default() }
}

fn dist_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn spread(values: &[Complex64]) -> (Complex64, f64) {
    let m = values.iter().sum::<Complex64>() / values.len() as f64;
    let mut diam = 0.0f64;
    for (i, u) in values.iter().enumerate() {
        for v in &values[i + 1..] {
            diam = diam.max((u - v).norm());
        }
    }
    (m, diam)
}

/// How well the straight arcs from `c` avoid the other values.
fn arc_clearance(c: Complex64, values: &[Complex64]) -> f64 {
    let mut best = values.iter().map(|v| (v - c).norm()).fold(f64::INFINITY, f64::min);
    for (s, vs) in values.iter().enumerate() {
        for (t, vt) in values.iter().enumerate() {
            if s != t {
                best = best.min(dist_to_segment(*vt, c, *vs));
            }
        }
    }
    best
}

/// A base point off all values whose straight arcs to the values keep the
/// largest clearance from the other values; candidates lie on rings about the
/// centroid, each point at distance at least `0.4 * diameter` from every value.
pub fn choose_basepoint(values: &[Complex64]) -> Complex64 {
    let (m, diam) = spread(values);
    let scale = if diam > 0.0 { diam } else { 1.0 };
    let min_dist = if diam > 0.0 { 0.4 * diam } else { scale };
    let mut best = (f64::NEG_INFINITY, m + scale * 1.5);
    for &r in &[0.45, 0.7, 1.0, 1.5] {
        for j in 0..48 {
            let c = m + Complex64::from_polar(r * scale, 0.1234 + TAU * j as f64 / 48.0);
            if values.iter().any(|v| (v - c).norm() < min_dist) {
                continue;
            }
            let score = arc_clearance(c, values);
            if score > best.0 {
                best = (score, c);
            }
        }
    }
    best.1
}

/// Counterclockwise order of the arcs from `c` starting after the outward ray,
/// and the unit outward direction.
pub fn arc_order(c: Complex64, values: &[Complex64]) -> (Vec<usize>, Complex64) {
    let mut angles: Vec<(f64, usize)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| ((v - c).arg(), i))
        .collect();
    angles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let k = angles.len();
    let mut gap = (f64::NEG_INFINITY, 0.0);
    for i in 0..k {
        let a = angles[i].0;
        let b = if i + 1 < k { angles[i + 1].0 } else { angles[0].0 + TAU };
        if b - a > gap.0 {
            gap = (b - a, a + 0.5 * (b - a));
        }
    }
    let theta = gap.1;
    let rel = |a: f64| (a - theta).rem_euclid(TAU);
    angles.sort_by(|a, b| rel(a.0).total_cmp(&rel(b.0)).then(a.1.cmp(&b.1)));
    (angles.into_iter().map(|(_, i)| i).collect(), Complex64::from_polar(1.0, theta))
}

/// Critical values of `P` (clustered), supplemented by `P(a)` and `P(b)`.
pub fn critical_data(p: &ComplexPoly, a: Complex64, b: Complex64, tol: &Tolerances) -> Result<CriticalData> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegenerateInput(format!("degree {} < 2", p.degree_signed())));
    }
    if a == b {
        return Err(Error::DegenerateInput("a = b".into()));
    }
    let crit_points = roots_with(&p.derivative(), &root_options(tol))?;
    let raw: Vec<Complex64> = crit_points.iter().map(|z| p.eval(*z)).collect();
    let (pa, pb) = (p.eval(a), p.eval(b));
    let mut all = raw.clone();
    all.extend([pa, pb]);
    let radius = cluster_radius(&all, tol.cluster);
    let mut values: Vec<Complex64> = Vec::new();
    let mut supplemented = Vec::new();
    for (i, v) in all.iter().enumerate() {
        if !values.iter().any(|u| (u - v).norm() <= radius) {
            values.push(*v);
            supplemented.push(i >= raw.len());
        }
    }
    let c = choose_basepoint(&values);
    let (order, outward) = arc_order(c, &values);
    Ok(CriticalData {
        values: order.iter().map(|&i| values[i]).collect(),
        supplemented: order.iter().map(|&i| supplemented[i]).collect(),
        base_point: c,
        outward,
    })
}

/// Closed loop from `c` around `target` counterclockwise at radius `r`.
pub fn standard_loop(c: Complex64, target: Complex64, r: f64) -> Vec<Complex64> {
    let dir = (c - target) / (c - target).norm();
    let near = target + dir * r;
    let mut path = vec![c];
    path.extend(circle_path(target, r, dir.arg(), true, CIRCLE_PIECES));
    path.push(c);
    debug_assert!((path[1] - near).norm() < 1e-9 * (1.0 + near.norm()));
    path
}

/// Loop radius around `values[s]`: half the distance to the nearest other value,
/// capped at half the distance to the base point.
pub fn loop_radius(c: Complex64, values: &[Complex64], s: usize) -> f64 {
    let others = values
        .iter()
        .enumerate()
        .filter(|&(t, _)| t != s)
        .map(|(_, v)| (v - values[s]).norm())
        .fold(f64::INFINITY, f64::min);
    (0.5 * others).min(0.5 * (c - values[s]).norm())
}

fn permutation_from_loop(
    p: &ComplexPoly,
    path: &[Complex64],
    fiber: &[Complex64],
    tol: &Tolerances,
) -> Result<Permutation> {
    let end = continue_branches(p, path, fiber, tol.track)?;
    Permutation::from_images(match_fibers(&end, fiber)?)
        .map_err(|_| Error::TrackingFailure("loop endpoint matching is not a bijection".into()))
}

/// Geometric waypoints `c + r u` for `r` from `r0` up to `r1`.
fn ray_path(c: Complex64, u: Complex64, r0: f64, r1: f64) -> Vec<Complex64> {
    let mut path = vec![c];
    let mut r = r0.max(f64::MIN_POSITIVE);
    while r < r1 {
        path.push(c + u * r);
        r *= 4.0;
    }
    path.push(c + u * r1);
    path
}

/// `z^{1/n}` for `z` far out on the ray from `c` in direction `u`, continued
/// from the direction of the ray at infinity.
pub fn ray_root(z: Complex64, u: Complex64, n: usize) -> Complex64 {
    let theta = u.arg();
    let arg = theta + (z.arg() - theta + PI).rem_euclid(TAU) - PI;
    Complex64::from_polar(z.norm().powf(1.0 / n as f64), arg / n as f64)
}

/// Bound on the root moduli of `P - z` scaled out of `z`: the size of the
/// lower-order Puiseux coefficients.
fn intrinsic_scale(p: &ComplexPoly) -> f64 {
    let n = p.degree().unwrap_or(0);
    let lc = p.leading();
    (0..n)
        .map(|i| (p.coeff(i) / lc).norm().powf(1.0 / (n - i) as f64))
        .fold(1.0, f64::max)
}

/// Index of the principal Puiseux branch among `fiber` (the fiber over `c`).
fn principal_branch(
    p: &ComplexPoly,
    c: Complex64,
    u: Complex64,
    fiber: &[Complex64],
    tol: &Tolerances,
) -> Result<usize> {
    let n = fiber.len();
    let lc = p.leading();
    let t_lead = Complex64::new(1.0, 0.0) / lc;
    let t_lead = Complex64::from_polar(t_lead.norm().powf(1.0 / n as f64), t_lead.arg() / n as f64);
    let t0 = -p.coeff(n - 1) / (lc * n as f64);
    let scale = intrinsic_scale(p) + c.norm().powf(1.0 / n as f64);
    let mut w_far = 64.0 * scale * (n as f64).sqrt();
    let mut reached = (c, fiber.to_vec(), 0.0f64);
    for _ in 0..12 {
        let r_far = p.eval_abs(Complex64::new(w_far, 0.0)) + c.norm();
        let (z_prev, start, r_prev) = reached.clone();
        let path = ray_path(z_prev, u, (r_prev.max(1.0)).min(r_far - r_prev), r_far - r_prev);
        let z_far = c + u * r_far;
        let far = continue_branches(p, &path, &start, tol.track)?;
        let guess = t_lead * ray_root(z_far, u, n) + t0;
        let mut d: Vec<(f64, usize)> = far.iter().map(|w| (w - guess).norm()).zip(0..).collect();
        d.sort_by(|x, y| x.0.total_cmp(&y.0));
        if d[0].0 < min_pairwise_distance(&far) / 3.0 {
            return Ok(d[0].1);
        }
        reached = (z_far, far, r_far);
        w_far *= 4.0;
    }
    Err(Error::TrackingFailure("principal branch could not be identified at infinity".into()))
}

pub fn monodromy(p: &ComplexPoly, a: Complex64, b: Complex64) -> Result<MonodromyData> {
    monodromy_with(p, a, b, &Tolerances::default())
}

pub fn monodromy_with(
    p: &ComplexPoly,
    a: Complex64,
    b: Complex64,
    tol: &Tolerances,
) -> Result<MonodromyData> {
    let crit = critical_data(p, a, b, tol)?;
    let n = p.degree().expect("degree checked");
    let c = crit.base_point;
    let values = &crit.values;
    let fiber = roots_with(&(p - &ComplexPoly::constant(c)), &root_options(tol))?;
    if min_pairwise_distance(&fiber) == 0.0 {
        return Err(Error::TrackingFailure("base point fiber is not simple".into()));
    }

    let mut gens = Vec::with_capacity(values.len());
    for s in 0..values.len() {
        let r = loop_radius(c, values, s);
        gens.push(permutation_from_loop(p, &standard_loop(c, values[s], r), &fiber, tol)?);
    }

    let u = crit.outward;
    let big = 2.0 * values.iter().map(|v| (v - c).norm()).fold(0.0, f64::max) + 1.0;
    let mut path = ray_path(c, u, big / 8.0, big);
    path.extend(circle_path(c, big, u.arg(), false, 2 * CIRCLE_PIECES).into_iter().skip(1));
    path.extend(ray_path(c, u, big / 8.0, big).into_iter().rev().skip(1));
    let g_inf = permutation_from_loop(p, &path, &fiber, tol)?;
    if !g_inf.is_full_cycle() {
        return Err(Error::RelationViolation);
    }

    let first = principal_branch(p, c, u, &fiber, tol)?;
    let mut label = vec![0; n];
    let mut x = first;
    for i in 0..n {
        label[x] = i;
        x = g_inf.apply(x);
    }
    let mut relabeled_fiber = vec![Complex64::new(0.0, 0.0); n];
    for (r, &l) in label.iter().enumerate() {
        relabeled_fiber[l] = fiber[r];
    }
    let generators: Vec<Permutation> = gens.iter().map(|g| g.relabel(&label)).collect();
    let g_inf = g_inf.relabel(&label);
    debug_assert_eq!(g_inf, Permutation::cycle(n));

    let product = generators
        .iter()
        .fold(Permutation::identity(n), |acc, g| acc.then(g))
        .then(&g_inf);
    if !product.is_identity() {
        return Err(Error::RelationViolation);
    }
    Ok(MonodromyData {
        n,
        base_point: c,
        outward: u,
        critical_values: crit.values,
        supplemented: crit.supplemented,
        generators,
        g_inf,
        fiber: relabeled_fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::enumerate_group;
    use crate::poly::chebyshev;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn has_value(values: &[Complex64], z: Complex64) -> bool {
        values.iter().any(|v| (v - z).norm() < 1e-8)
    }

    #[test]
    fn critical_data_examples() {
        let tol = Tolerances::default();
        let z2 = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let cd = critical_data(&z2, c(1.0, 0.0), c(-1.0, 0.0), &tol).unwrap();
        assert_eq!(cd.values.len(), 2);
        for (v, s) in cd.values.iter().zip(&cd.supplemented) {
            assert_eq!(*s, (v - c(1.0, 0.0)).norm() < 1e-9);
        }

        let p = ComplexPoly::from_real(&[0.0, -3.0, 0.0, 1.0]);
        let cd = critical_data(&p, c(0.0, 0.0), c(3f64.sqrt(), 0.0), &tol).unwrap();
        assert_eq!(cd.values.len(), 3);
        assert!(has_value(&cd.values, c(2.0, 0.0)) && has_value(&cd.values, c(-2.0, 0.0)));
        assert_eq!(cd.supplemented.iter().filter(|s| **s).count(), 1);

        let t6 = chebyshev(6);
        let h = 3f64.sqrt() / 2.0;
        let cd = critical_data(&t6, c(-h, 0.0), c(h, 0.0), &tol).unwrap();
        assert_eq!(cd.values.len(), 2);
        assert!(cd.supplemented.iter().all(|s| !s));

        assert!(matches!(critical_data(&t6, c(1.0, 0.0), c(1.0, 0.0), &tol), Err(Error::DegenerateInput(_))));
        let lin = ComplexPoly::from_real(&[1.0, 2.0]);
        assert!(matches!(critical_data(&lin, c(0.0, 0.0), c(1.0, 0.0), &tol), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn basepoint_contracts() {
        for vals in [vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(0.0, -1.0)]] {
            let (_, diam) = spread(&vals);
            let p = choose_basepoint(&vals);
            assert!(vals.iter().all(|v| (v - p).norm() >= 0.4 * diam));
        }
        assert!(choose_basepoint(&[c(0.0, 0.0)]).norm() >= 1.0);
    }

    #[test]
    fn arc_order_starts_after_widest_gap() {
        let vals = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let (order, u) = arc_order(c(0.0, 0.0), &vals);
        assert!((u - c(0.0, -1.0)).norm() < 1e-12);
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn ray_root_follows_ray_direction() {
        let u = c(-1.0, 1e-3).unscale(c(-1.0, 1e-3).norm());
        let z = c(0.0, -0.5) + u * 1e6;
        // Below the negative axis the principal root would jump; the ray root does not.
        let r = ray_root(z, u, 2);
        assert!(r.im > 0.0);
        assert!((r * r - z).norm() < 1e-6 * z.norm());
    }

    fn check_invariants(md: &MonodromyData) {
        let n = md.n;
        assert_eq!(md.g_inf, Permutation::cycle(n));
        let prod = md
            .generators
            .iter()
            .fold(Permutation::identity(n), |acc, g| acc.then(g))
            .then(&md.g_inf);
        assert!(prod.is_identity());
        let euler: usize = md.generators.iter().map(|g| n - g.cycle_count()).sum();
        assert_eq!(euler, n - 1);
    }

    #[test]
    fn power_map_monodromy() {
        for n in 2..=6 {
            let p = ComplexPoly::monomial(c(1.0, 0.0), n);
            let md = monodromy(&p, c(1.0, 0.0), c(0.5, 0.5)).unwrap();
            check_invariants(&md);
            let s0 = md.color_of(c(0.0, 0.0), 1e-8).unwrap();
            assert_eq!(md.generators[s0], Permutation::cycle(n).inverse());
        }
    }

    #[test]
    fn cubic_monodromy_is_two_transpositions() {
        let p = ComplexPoly::from_real(&[0.0, -3.0, 0.0, 1.0]);
        let md = monodromy(&p, c(0.0, 0.0), c(3f64.sqrt(), 0.0)).unwrap();
        check_invariants(&md);
        for (v, g) in md.critical_values.iter().zip(&md.generators) {
            if (v.norm() - 2.0).abs() < 1e-8 {
                assert_eq!(g.cycle_count(), 2);
                assert_eq!(g.order(), 2);
            } else {
                assert!(g.is_identity());
            }
        }
    }

    #[test]
    fn chebyshev_six_monodromy() {
        let h = 3f64.sqrt() / 2.0;
        let md = monodromy(&chebyshev(6), c(-h, 0.0), c(h, 0.0)).unwrap();
        check_invariants(&md);
        let mut transpositions: Vec<usize> = md
            .generators
            .iter()
            .map(|g| {
                assert_eq!(g.order(), 2);
                g.cycles().iter().filter(|c| c.len() == 2).count()
            })
            .collect();
        transpositions.sort_unstable();
        assert_eq!(transpositions, vec![2, 3]);
        assert_eq!(enumerate_group(&md.all_generators(), 6, 1000).unwrap().len(), 12);
    }

    #[test]
    fn fiber_is_labelled_consistently() {
        let p = ComplexPoly::new(vec![c(0.1, 0.2), c(-1.0, 0.5), c(0.0, 0.0), c(0.3, -0.1), c(1.0, 0.2)]);
        let md = monodromy(&p, c(0.3, 0.0), c(-0.7, 0.4)).unwrap();
        check_invariants(&md);
        for w in &md.fiber {
            assert!((p.eval(*w) - md.base_point).norm() < 1e-8);
        }
    }
}
