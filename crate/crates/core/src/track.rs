//! Analytic continuation of the fiber `P^{-1}(z)` along polygonal paths.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;

const MIN_STEP: f64 = 1e-13;
const NEWTON_ITERS: usize = 16;

/// Smallest pairwise distance among `pts` (`inf` for fewer than two points).
pub fn min_pairwise_distance(pts: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min((pts[i] - pts[j]).norm());
        }
    }
    best
}

/// Newton on `P(w) = z` from `w`; `None` unless the residual reaches the
/// tolerance within a fixed budget.
fn newton(p: &ComplexPoly, z: Complex64, mut w: Complex64, tol_track: f64) -> Option<Complex64> {
    for _ in 0..NEWTON_ITERS {
        let (f, df) = p.eval_with_derivative(w);
        let r = f - z;
        let floor = 64.0 * f64::EPSILON * p.eval_abs(w);
        if r.norm() <= (tol_track * (1.0 + z.norm())).max(floor) {
            return Some(w);
        }
        if df.norm() == 0.0 {
            return None;
        }
        let delta = r / df;
        w -= delta;
        if !w.is_finite() {
            return None;
        }
        if delta.norm() <= 4.0 * f64::EPSILON * w.norm() {
            return Some(w);
        }
    }
    let r = p.eval(w) - z;
    (r.norm() <= (tol_track * (1.0 + z.norm())).max(1e3 * f64::EPSILON * p.eval_abs(w)))
        .then_some(w)
}

/// Continues every branch in `start` (the fiber over `path[0]`) along the
/// polygon through `path`, returning the fiber over its last vertex in the
/// same order.
///
/// Each step is an Euler predictor with a Newton corrector; it is rejected and
/// halved when Newton fails or a branch moves by more than half the current
/// minimal branch separation.
pub fn continue_branches(
    p: &ComplexPoly,
    path: &[Complex64],
    start: &[Complex64],
    tol_track: f64,
) -> Result<Vec<Complex64>> {
    if p.degree() != Some(start.len()) {
        return Err(Error::DimensionMismatch {
            expected: p.degree().unwrap_or(0),
            got: start.len(),
        });
    }
    let dp = p.derivative();
    let mut w = start.to_vec();
    for seg in path.windows(2) {
        let (z0, z1) = (seg[0], seg[1]);
        let dz_total = z1 - z0;
        if dz_total.norm() == 0.0 {
            continue;
        }
        let mut t = 0.0f64;
        let mut h = 0.25f64;
        while t < 1.0 {
            h = h.min(1.0 - t);
            let za = z0 + dz_total * t;
            let zb = if t + h >= 1.0 { z1 } else { z0 + dz_total * (t + h) };
            let dz = zb - za;
            let sep = min_pairwise_distance(&w);
            let mut next = Vec::with_capacity(w.len());
            let mut ok = true;
            for &wi in &w {
                let d = dp.eval(wi);
                if d.norm() == 0.0 {
                    ok = false;
                    break;
                }
                let guess = wi + dz / d;
                match newton(p, zb, guess, tol_track) {
                    Some(wn) if (wn - wi).norm() < 0.5 * sep && (wn - guess).norm() < 0.25 * sep => {
                        next.push(wn)
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && w.len() > 1 && min_pairwise_distance(&next) < 1e-3 * sep {
                ok = false;
            }
            if ok {
                w = next;
                t += h;
                h *= 2.0;
            } else {
                h *= 0.5;
                if h < MIN_STEP {
                    return Err(Error::TrackingFailure(format!(
                        "step underflow near z = {za} (branch separation {sep:e})"
                    )));
                }
            }
        }
    }
    Ok(w)
}

/// Greedy nearest matching: `result[i]` is the index in `target` matched to
/// `end[i]`. Fails when a match is farther than a third of the minimal
/// separation of `target`.
pub fn match_fibers(end: &[Complex64], target: &[Complex64]) -> Result<Vec<usize>> {
    let n = target.len();
    if end.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: end.len() });
    }
    let limit = if n > 1 { min_pairwise_distance(target) / 3.0 } else { f64::INFINITY };
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, e) in end.iter().enumerate() {
        for (j, t) in target.iter().enumerate() {
            pairs.push(((e - t).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (d, i, j) in pairs {
        if out[i] != usize::MAX || used[j] {
            continue;
        }
        if d > limit {
            return Err(Error::TrackingFailure(format!(
                "branch {i} ends {d:e} from the nearest unmatched fiber point (limit {limit:e})"
            )));
        }
        out[i] = j;
        used[j] = true;
    }
    Ok(out)
}

/// Vertices of a polygon approximating the circle `|z - center| = r`, starting
/// and ending at `center + r e^{i phi0}`; `ccw` selects the orientation.
pub fn circle_path(center: Complex64, r: f64, phi0: f64, ccw: bool, pieces: usize) -> Vec<Complex64> {
    let sign = if ccw { 1.0 } else { -1.0 };
    (0..=pieces)
        .map(|j| {
            let phi = phi0 + sign * std::f64::consts::TAU * j as f64 / pieces as f64;
            center + Complex64::from_polar(r, phi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::roots;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_root_loop_swaps_branches() {
        let p = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let path = circle_path(c(0.0, 0.0), 1.0, 0.0, true, 32);
        let end = continue_branches(&p, &path, &[c(1.0, 0.0), c(-1.0, 0.0)], 1e-12).unwrap();
        assert_eq!(match_fibers(&end, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn straight_path_keeps_branches() {
        let p = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let end = continue_branches(&p, &[c(1.0, 0.0), c(4.0, 0.0)], &[c(1.0, 0.0), c(-1.0, 0.0)], 1e-12)
            .unwrap();
        assert!((end[0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!((end[1] - c(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn power_loop_rotates_roots() {
        for n in 2..7 {
            let p = ComplexPoly::monomial(c(1.0, 0.0), n);
            let fiber: Vec<Complex64> = (0..n)
                .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
                .collect();
            let end = continue_branches(&p, &circle_path(c(0.0, 0.0), 1.0, 0.0, true, 48), &fiber, 1e-12)
                .unwrap();
            let m = match_fibers(&end, &fiber).unwrap();
            assert_eq!(m, (0..n).map(|j| (j + 1) % n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn residual_stays_small_along_path() {
        let p = ComplexPoly::from_real(&[0.3, -1.0, 0.0, 1.0, 0.2]);
        let z0 = c(2.0, 1.0);
        let start = roots(&(&p - &ComplexPoly::constant(z0))).unwrap();
        let z1 = c(-3.0, 2.5);
        let end = continue_branches(&p, &[z0, c(0.0, 4.0), z1], &start, 1e-12).unwrap();
        for w in &end {
            assert!((p.eval(*w) - z1).norm() < 1e-9);
        }
        assert!(min_pairwise_distance(&end) > 1e-3);
    }

    #[test]
    fn matching_rejects_far_points() {
        let t = [c(0.0, 0.0), c(1.0, 0.0)];
        assert!(match_fibers(&[c(0.5, 0.0), c(1.0, 0.0)], &t).is_err());
    }
}
