//! Randomized reducible instances: `P = A∘B`, `B(a) = B(b)`, `Q = R∘B`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::poly::{roots, ComplexPoly};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducibleCase {
    pub p: ComplexPoly,
    pub a: Complex64,
    pub b: Complex64,
    pub outer: ComplexPoly,
    pub inner: ComplexPoly,
    pub r: ComplexPoly,
    pub q: ComplexPoly,
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Degree-`deg` polynomial with uniform coefficients and leading coefficient near 1.
pub fn random_poly<R: Rng>(rng: &mut R, deg: usize) -> ComplexPoly {
    let mut coeffs: Vec<Complex64> = (0..deg).map(|_| random_complex(rng)).collect();
    coeffs.push(Complex64::new(1.0, 0.0) + random_complex(rng) * 0.1);
    ComplexPoly::new(coeffs)
}

/// One case with `deg A, deg B ∈ [2, 4]`, `deg R ∈ [1, 3]`; `b` is the other
/// preimage of `B(a)` farthest from `a`.
pub fn random_reducible_case<R: Rng>(rng: &mut R) -> ReducibleCase {
    loop {
        let (da, db, dr) = (rng.gen_range(2..=4), rng.gen_range(2..=4), rng.gen_range(1..=3));
        let outer = random_poly(rng, da);
        let inner = random_poly(rng, db);
        let r = random_poly(rng, dr);
        let a = random_complex(rng);
        if inner.derivative().eval(a).norm() < 0.1 {
            continue;
        }
        let shifted = &inner - &ComplexPoly::constant(inner.eval(a));
        let Ok(pre) = roots(&shifted) else { continue };
        let b = pre
            .into_iter()
            .max_by(|x, y| (x - a).norm().total_cmp(&(y - a).norm()))
            .expect("degree >= 2");
        if (b - a).norm() < 0.1 {
            continue;
        }
        let p = outer.compose(&inner);
        let q = r.compose(&inner);
        return ReducibleCase { p, a, b, outer, inner, r, q };
    }
}

pub fn reducible_corpus(seed: u64, count: usize) -> Vec<ReducibleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_reducible_case(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_cases_are_reducible() {
        for case in reducible_corpus(7, 10) {
            assert!((case.inner.eval(case.a) - case.inner.eval(case.b)).norm() < 1e-9);
            assert!((case.p.eval(case.a) - case.p.eval(case.b)).norm() < 1e-8 * (1.0 + case.p.norm_inf()));
            assert!(case.p.distance(&case.outer.compose(&case.inner)) == 0.0);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(reducible_corpus(3, 4), reducible_corpus(3, 4));
    }
}
