//! Exact linear algebra over Q^n: canonical row-echelon subspaces and dense matrices.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Permutation;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// A vector in Q^n.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalVector(v.iter().map(|&x| int(x)).collect())
    }

    /// Unit vector `e_i` (0-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `x ↦ (x_{σ(1)}, ..., x_{σ(n)})`.
    pub fn permuted(&self, sigma: &Permutation) -> RationalVector {
        RationalVector((0..self.len()).map(|i| self.0[sigma.apply(i)].clone()).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational_to_f64).collect()
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RationalVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl fmt::Debug for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.iter().map(|x| format!("{x}")))
            .finish()
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn rational_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
    let d: BigInt = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
    if d.is_zero() {
        return Err(format!("{s}: zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.0.iter().map(rational_to_string).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RationalVector)
            .map_err(serde::de::Error::custom)
    }
}

/// In-place reduced row-echelon form; returns pivot columns. Zero rows are dropped.
fn rref(rows: &mut Vec<RationalVector>, n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].0.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.0.iter_mut().zip(&pivot_row.0).skip(col) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A subspace of Q^n stored by its reduced row-echelon basis, so equal subspaces
/// compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RationalSubspace {
    n: usize,
    basis: Vec<RationalVector>,
}

impl fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, dim={}, {:?})", self.n, self.dim(), self.basis)
    }
}

impl RationalSubspace {
    pub fn zero(n: usize) -> Self {
        RationalSubspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        RationalSubspace {
            n,
            basis: (0..n).map(|i| RationalVector::unit(n, i)).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalVector] {
        &self.basis
    }

    /// Subspace of `d`-periodic vectors (constant on residue classes mod `d`).
    pub fn periodic(n: usize, d: usize) -> Self {
        let gens: Vec<RationalVector> = (0..d)
            .map(|r| {
                RationalVector((0..n).map(|i| if i % d == r { int(1) } else { int(0) }).collect())
            })
            .collect();
        span(n, &gens).expect("consistent lengths")
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.0.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }
}

fn check_len(n: usize, v: &RationalVector) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(())
}

/// Canonical basis of the span of `vectors` inside Q^n.
pub fn span(n: usize, vectors: &[RationalVector]) -> Result<RationalSubspace> {
    for v in vectors {
        check_len(n, v)?;
    }
    let mut rows: Vec<RationalVector> = vectors.iter().filter(|v| !v.is_zero()).cloned().collect();
    rref(&mut rows, n);
    Ok(RationalSubspace { n, basis: rows })
}

/// `{x : (x, b) = 0 for every basis vector b}` under the standard scalar product.
pub fn orth_complement(u: &RationalSubspace) -> RationalSubspace {
    let n = u.n;
    let pivots = u.pivots();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut kernel = Vec::with_capacity(n - pivots.len());
    for free in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = RationalVector::zeros(n);
        v[free] = Rational::one();
        for (row, &p) in u.basis.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        kernel.push(v);
    }
    let mut rows = kernel;
    rref(&mut rows, n);
    RationalSubspace { n, basis: rows }
}

pub fn sum(u: &RationalSubspace, v: &RationalSubspace) -> Result<RationalSubspace> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch { expected: u.n, got: v.n });
    }
    let mut all = u.basis.clone();
    all.extend(v.basis.iter().cloned());
    span(u.n, &all)
}

/// `u ∩ v`, computed as the kernel of the stacked system of both complements.
pub fn intersect(u: &RationalSubspace, v: &RationalSubspace) -> Result<RationalSubspace> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch { expected: u.n, got: v.n });
    }
    let stacked = sum(&orth_complement(u), &orth_complement(v))?;
    Ok(orth_complement(&stacked))
}

pub fn contains_vector(u: &RationalSubspace, v: &RationalVector) -> Result<bool> {
    check_len(u.n, v)?;
    // Reduce v against the RREF rows; membership iff the remainder vanishes.
    let mut r = v.clone();
    for (row, p) in u.basis.iter().zip(u.pivots()) {
        if r[p].is_zero() {
            continue;
        }
        let f = r[p].clone();
        for (x, y) in r.0.iter_mut().zip(&row.0) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    Ok(r.is_zero())
}

pub fn contains_subspace(u: &RationalSubspace, v: &RationalSubspace) -> Result<bool> {
    if u.n != v.n {
        return Err(Error::DimensionMismatch { expected: u.n, got: v.n });
    }
    for b in &v.basis {
        if !contains_vector(u, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest subspace containing `seed` and closed under the coordinate
/// permutations of every generator.
pub fn invariant_closure(
    n: usize,
    seed: &[RationalVector],
    gens: &[Permutation],
) -> Result<RationalSubspace> {
    for g in gens {
        if g.degree() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.degree() });
        }
    }
    let mut current = span(n, seed)?;
    loop {
        let mut rows = current.basis.clone();
        for b in &current.basis {
            for g in gens {
                rows.push(b.permuted(g));
            }
        }
        let next = span(n, &rows)?;
        if next.dim() == current.dim() {
            return Ok(next);
        }
        current = next;
    }
}

/// Dense square matrix over Q.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        RationalMatrix { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        RationalMatrix { n, data }
    }

    /// Matrix of `x ↦ (x_{σ(1)}, ..., x_{σ(n)})`.
    pub fn permutation(sigma: &Permutation) -> Self {
        let n = sigma.degree();
        Self::from_fn(n, |i, j| if sigma.apply(i) == j { int(1) } else { int(0) })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> RationalVector {
        RationalVector(self.data[i * self.n..(i + 1) * self.n].to_vec())
    }

    pub fn column(&self, j: usize) -> RationalVector {
        RationalVector((0..self.n).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        RationalMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        RationalMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn apply(&self, v: &RationalVector) -> RationalVector {
        RationalVector((0..self.n).map(|i| self.row(i).dot(v)).collect())
    }

    /// Column space.
    pub fn image(&self) -> RationalSubspace {
        let cols: Vec<RationalVector> = (0..self.n).map(|j| self.column(j)).collect();
        span(self.n, &cols).expect("square matrix")
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> RationalVector {
        RationalVector::from_ints(x)
    }

    #[test]
    fn span_examples() {
        let s = span(2, &[v(&[1, 1]), v(&[2, 2])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis()[0], v(&[1, 1]));
        assert_eq!(span(3, &[]).unwrap().dim(), 0);
        assert_eq!(span(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap(), RationalSubspace::full(2));
    }

    #[test]
    fn span_rejects_wrong_length() {
        assert_eq!(
            span(3, &[v(&[1, 0])]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn intersect_periodic_subspaces() {
        let v2 = RationalSubspace::periodic(6, 2);
        let v3 = RationalSubspace::periodic(6, 3);
        assert_eq!(intersect(&v2, &v3).unwrap(), RationalSubspace::periodic(6, 1));
        assert_eq!(intersect(&v2, &v2).unwrap(), v2);
        assert_eq!(
            intersect(&v2, &RationalSubspace::zero(6)).unwrap(),
            RationalSubspace::zero(6)
        );
    }

    #[test]
    fn orth_complement_examples() {
        let u = span(2, &[v(&[1, 1])]).unwrap();
        assert_eq!(orth_complement(&u), span(2, &[v(&[1, -1])]).unwrap());
        assert_eq!(orth_complement(&RationalSubspace::zero(3)), RationalSubspace::full(3));
        let w = orth_complement(&RationalSubspace::periodic(4, 1));
        assert_eq!(w.dim(), 3);
        assert!(w.basis().iter().all(|b| b.0.iter().sum::<Rational>().is_zero()));
    }

    #[test]
    fn contains_examples() {
        let u = span(4, &[v(&[1, 0, 1, 0]), v(&[0, 1, 0, 1])]).unwrap();
        assert!(contains_vector(&u, &v(&[1, 1, 1, 1])).unwrap());
        assert!(contains_vector(&RationalSubspace::zero(3), &v(&[0, 0, 0])).unwrap());
        let w = span(2, &[v(&[1, 1])]).unwrap();
        assert!(!contains_vector(&w, &v(&[1, -1])).unwrap());
        assert!(contains_subspace(&u, &RationalSubspace::periodic(4, 1)).unwrap());
    }

    #[test]
    fn invariant_closure_examples() {
        let c3 = Permutation::cycle(3);
        let full = invariant_closure(3, &[v(&[1, 0, 0])], std::slice::from_ref(&c3)).unwrap();
        assert_eq!(full, RationalSubspace::full(3));
        let fixed = invariant_closure(3, &[v(&[1, 1, 1])], &[c3]).unwrap();
        assert_eq!(fixed.dim(), 1);

        // Oracle: span of the four cyclic shifts, enumerated explicitly.
        let seed = v(&[1, -1, 0, 0]);
        let shifts: Vec<RationalVector> = (0..4)
            .map(|s| RationalVector((0..4).map(|i| seed[(i + s) % 4].clone()).collect()))
            .collect();
        let oracle = span(4, &shifts).unwrap();
        let closed = invariant_closure(4, &[seed], &[Permutation::cycle(4)]).unwrap();
        assert_eq!(closed, oracle);
        assert_eq!(closed, orth_complement(&RationalSubspace::periodic(4, 1)));
    }

    #[test]
    fn vector_json_uses_fraction_strings() {
        let x = RationalVector(vec![rat(1, 2), rat(-3, 1)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["1/2","-3/1"]"#);
        let back: RationalVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    fn arb_vectors(n: usize) -> impl Strategy<Value = Vec<RationalVector>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, n).prop_map(|x| v(&x)), 0..=n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn complement_is_involutive(vs in arb_vectors(5)) {
            let u = span(5, &vs).unwrap();
            let c = orth_complement(&u);
            prop_assert_eq!(u.dim() + c.dim(), 5);
            prop_assert_eq!(orth_complement(&c), u);
        }

        #[test]
        fn intersection_is_greatest_lower_bound(a in arb_vectors(4), b in arb_vectors(4), w in arb_vectors(4)) {
            let (u, v, w) = (span(4, &a).unwrap(), span(4, &b).unwrap(), span(4, &w).unwrap());
            let i = intersect(&u, &v).unwrap();
            prop_assert!(contains_subspace(&u, &i).unwrap());
            prop_assert!(contains_subspace(&v, &i).unwrap());
            let wu = intersect(&w, &u).unwrap();
            let wuv = intersect(&wu, &v).unwrap();
            prop_assert!(contains_subspace(&i, &wuv).unwrap());
        }

        #[test]
        fn closure_is_a_fixed_point(vs in arb_vectors(6), k in 1usize..6) {
            let g = Permutation::cycle(6).power(k as i64);
            let swap = Permutation::from_cycles(6, &[&[0, 3]]).unwrap();
            let gens = [g, swap];
            let m = invariant_closure(6, &vs, &gens).unwrap();
            for b in m.basis() {
                for g in &gens {
                    prop_assert!(contains_vector(&m, &b.permuted(g)).unwrap());
                }
            }
        }
    }
}
