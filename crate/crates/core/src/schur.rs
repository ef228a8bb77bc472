//! Imprimitivity lattices and Schur rings of groups containing the full cycle.
//!
//! For a group `G ≤ S_n` containing `c = (1 2 ... n)` every block system is a
//! family of residue classes mod `d`, and the invariant subspaces of Q^n are
//! sums of the pieces `U_d` cut out by the minimal projectors built here.
//! Points are identified with exponents of `c` by `i ↔ c^(i - point)`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{orbit_with_transversal, Permutation};
use crate::rational::{int, rat, Rational, RationalMatrix, RationalSubspace, RationalVector};

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// A sublattice of the divisors of `n` (under gcd/lcm) with its cover relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorLattice {
    n: usize,
    divisors: Vec<usize>,
    /// `covers[d]` lists the elements `f | d`, `f < d`, with nothing of the
    /// lattice strictly between.
    covers: BTreeMap<usize, Vec<usize>>,
}

impl DivisorLattice {
    /// Builds the lattice from a set of divisors of `n`; fails unless the set
    /// contains `1` and `n` and is closed under gcd and lcm.
    pub fn new(n: usize, mut set: Vec<usize>) -> Result<Self> {
        set.sort_unstable();
        set.dedup();
        if let Some(&d) = set.iter().find(|&&d| d == 0 || !n.is_multiple_of(d)) {
            return Err(Error::InvalidDivisor { n, d });
        }
        if set.first() != Some(&1) || set.last() != Some(&n) {
            return Err(Error::MalformedInput(format!("lattice {set:?} must contain 1 and {n}")));
        }
        for &a in &set {
            for &b in &set {
                if set.binary_search(&a.gcd(&b)).is_err() || set.binary_search(&a.lcm(&b)).is_err() {
                    return Err(Error::MalformedInput(format!(
                        "{set:?} is not closed under gcd/lcm ({a}, {b})"
                    )));
                }
            }
        }
        let covers = set
            .iter()
            .map(|&d| {
                let below: Vec<usize> = set.iter().copied().filter(|&f| f < d && d % f == 0).collect();
                let covered = below
                    .iter()
                    .copied()
                    .filter(|&f| !below.iter().any(|&x| x > f && x % f == 0))
                    .collect();
                (d, covered)
            })
            .collect();
        Ok(DivisorLattice { n, divisors: set, covers })
    }

    /// All divisors of `n`.
    pub fn full(n: usize) -> Self {
        Self::new(n, divisors(n)).expect("divisor lattice")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn divisors(&self) -> &[usize] {
        &self.divisors
    }

    pub fn contains(&self, d: usize) -> bool {
        self.divisors.binary_search(&d).is_ok()
    }

    pub fn covers(&self, d: usize) -> &[usize] {
        self.covers.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `{n/d : d ∈ self}`.
    pub fn dual(&self) -> DivisorLattice {
        Self::new(self.n, self.divisors.iter().map(|d| self.n / d).collect())
            .expect("dual of a lattice is a lattice")
    }

    /// Number of imprimitivity systems, trivial ones included.
    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }
}

/// Residue classes mod `d` are blocks of `g` iff `g(i) mod d` depends only on `i mod d`.
pub fn preserves_residues(g: &Permutation, d: usize) -> bool {
    let n = g.degree();
    (0..n).all(|i| i + d >= n || g.apply(i) % d == g.apply(i + d) % d)
}

/// Imprimitivity divisors of the group generated by `gens`.
///
/// The full cycle must be among the generators unless `full_cycle_certified`.
pub fn divisor_lattice(
    gens: &[Permutation],
    n: usize,
    full_cycle_certified: bool,
) -> Result<DivisorLattice> {
    for g in gens {
        if g.degree() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.degree() });
        }
    }
    let c = Permutation::cycle(n);
    if !full_cycle_certified && !gens.contains(&c) {
        return Err(Error::NotFullCycle);
    }
    let set = divisors(n)
        .into_iter()
        .filter(|&d| gens.iter().all(|g| preserves_residues(g, d)))
        .collect();
    DivisorLattice::new(n, set)
}

/// Basic sets of a Schur ring over Z_n, as exponent sets with `T_0 = {0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchurBasis {
    n: usize,
    basic_sets: Vec<Vec<usize>>,
}

impl SchurBasis {
    /// Validates the partition axioms; sets are sorted and ordered by minimum.
    pub fn new(n: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        for s in sets.iter_mut() {
            s.sort_unstable();
        }
        sets.retain(|s| !s.is_empty());
        sets.sort();
        let mut seen = vec![false; n];
        for s in &sets {
            for &e in s {
                if e >= n || seen[e] {
                    return Err(Error::MalformedInput(format!("basic sets overlap at {e}")));
                }
                seen[e] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedInput("basic sets do not cover Z_n".into()));
        }
        if sets.first().map(Vec::as_slice) != Some(&[0][..]) {
            return Err(Error::MalformedInput("T_0 must be {0}".into()));
        }
        Ok(SchurBasis { n, basic_sets: sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basic_sets(&self) -> &[Vec<usize>] {
        &self.basic_sets
    }

    pub fn rank(&self) -> usize {
        self.basic_sets.len()
    }

    /// Index of the basic set containing exponent `e`.
    pub fn class_of(&self) -> Vec<usize> {
        let mut class = vec![0; self.n];
        for (k, s) in self.basic_sets.iter().enumerate() {
            for &e in s {
                class[e] = k;
            }
        }
        class
    }

    /// Axiom (S3): `-T` is a basic set for every basic set `T`.
    pub fn closed_under_inversion(&self) -> bool {
        self.basic_sets.iter().all(|t| {
            let mut neg: Vec<usize> = t.iter().map(|&e| (self.n - e) % self.n).collect();
            neg.sort_unstable();
            self.basic_sets.contains(&neg)
        })
    }

    /// Is `set` a union of basic sets?
    pub fn is_union_of_basic_sets(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.n];
        for &e in set {
            member[e] = true;
        }
        self.basic_sets
            .iter()
            .all(|t| t.iter().all(|&e| member[e]) || t.iter().all(|&e| !member[e]))
    }
}

/// Orbits of the stabilizer of `point`, via Schreier generators.
pub fn stabilizer_orbits(gens: &[Permutation], point: usize) -> Result<SchurBasis> {
    let n = gens.first().map(Permutation::degree).unwrap_or(0);
    if gens.iter().any(|g| g.degree() != n) || point >= n.max(1) {
        return Err(Error::DimensionMismatch { expected: n, got: point });
    }
    let trans = orbit_with_transversal(gens, point, n);
    if trans.iter().any(Option::is_none) {
        return Err(Error::NotTransitive);
    }
    let trans: Vec<Permutation> = trans.into_iter().map(Option::unwrap).collect();
    let inv: Vec<Permutation> = trans.iter().map(Permutation::inverse).collect();

    // Union-find over points driven by the Schreier generators u_x g u_{x^g}^{-1}.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for x in 0..n {
        for g in gens {
            let schreier = trans[x].then(g).then(&inv[g.apply(x)]);
            debug_assert_eq!(schreier.apply(point), point);
            for i in 0..n {
                let (a, b) = (find(&mut parent, i), find(&mut parent, schreier.apply(i)));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut orbits: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        orbits.entry(r).or_default().push((i + n - point) % n);
    }
    SchurBasis::new(n, orbits.into_values().collect())
}

/// `λ[i][j][k]` with `T_i T_j = Σ_k λ[i][j][k] T_k` in the group algebra of Z_n.
///
/// Coefficients of products of simple quantities are element counts, so the
/// table is integral; `NotClosed` reports a product that is not constant on
/// some basic set.
pub fn schur_structure_constants(basis: &SchurBasis) -> Result<Vec<Vec<Vec<i64>>>> {
    let n = basis.n;
    let sets = &basis.basic_sets;
    let r = sets.len();
    let mut table = vec![vec![vec![0i64; r]; r]; r];
    for i in 0..r {
        for j in 0..r {
            let mut conv = vec![0i64; n];
            for &a in &sets[i] {
                for &b in &sets[j] {
                    conv[(a + b) % n] += 1;
                }
            }
            for (k, t) in sets.iter().enumerate() {
                let v = conv[t[0]];
                if t.iter().any(|&e| conv[e] != v) {
                    return Err(Error::NotClosed);
                }
                table[i][j][k] = v;
            }
        }
    }
    Ok(table)
}

/// Exponent set of the subgroup `C_d` of order `d`: multiples of `n/d`.
pub fn subgroup_exponents(n: usize, d: usize) -> Vec<usize> {
    (0..n).step_by(n / d).collect()
}

/// `D(A) = {d | n : C_d is a union of basic sets}`, the divisor lattice of the
/// rational closure.
pub fn rational_closure(basis: &SchurBasis) -> DivisorLattice {
    let n = basis.n;
    let set = divisors(n)
        .into_iter()
        .filter(|&d| basis.is_union_of_basic_sets(&subgroup_exponents(n, d)))
        .collect();
    DivisorLattice::new(n, set).expect("rational closure is a lattice")
}

/// Circulant matrix stored by its first row: `M[i][j] = row[(j - i) mod n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circulant {
    row: Vec<Rational>,
}

impl Circulant {
    pub fn identity(n: usize) -> Self {
        let mut row = vec![Rational::zero(); n];
        row[0] = Rational::one();
        Circulant { row }
    }

    pub fn from_row(row: Vec<Rational>) -> Self {
        Circulant { row }
    }

    pub fn row(&self) -> &[Rational] {
        &self.row
    }

    pub fn n(&self) -> usize {
        self.row.len()
    }

    /// Matrix product, i.e. cyclic convolution of first rows.
    pub fn mul(&self, other: &Circulant) -> Circulant {
        let n = self.n();
        let mut row = vec![Rational::zero(); n];
        for (a, x) in self.row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.row.iter().enumerate() {
                if !y.is_zero() {
                    row[(a + b) % n] += x * y;
                }
            }
        }
        Circulant { row }
    }

    pub fn add(&self, other: &Circulant) -> Circulant {
        Circulant { row: self.row.iter().zip(&other.row).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Circulant) -> Circulant {
        Circulant { row: self.row.iter().zip(&other.row).map(|(a, b)| a - b).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.row.iter().all(Zero::is_zero)
    }

    /// `M v` with `(M v)_i = Σ_j row[(j - i) mod n] v_j`.
    pub fn apply(&self, v: &RationalVector) -> RationalVector {
        let n = self.n();
        let mut out = RationalVector::zeros(n);
        for (j, vj) in v.0.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for i in 0..n {
                let r = &self.row[(j + n - i) % n];
                if !r.is_zero() {
                    out.0[i] += r * vj;
                }
            }
        }
        out
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        let n = self.n();
        RationalMatrix::from_fn(n, |i, j| self.row[(j + n - i) % n].clone())
    }
}

/// Projector onto the `d`-periodic vectors: `d/n` where `i ≡ j (mod d)`.
pub fn sigma_circulant(n: usize, d: usize) -> Result<Circulant> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidDivisor { n, d });
    }
    let w = rat(d as i64, n as i64);
    Ok(Circulant::from_row(
        (0..n).map(|j| if j % d == 0 { w.clone() } else { int(0) }).collect(),
    ))
}

pub fn sigma_projector(n: usize, d: usize) -> Result<RationalMatrix> {
    Ok(sigma_circulant(n, d)?.to_matrix())
}

/// `π_d = σ_d ∏_{f covered by d} (I - σ_f)` for every `d` of the lattice.
pub fn minimal_projector_circulants(lattice: &DivisorLattice) -> BTreeMap<usize, Circulant> {
    let n = lattice.n;
    let id = Circulant::identity(n);
    lattice
        .divisors
        .iter()
        .map(|&d| {
            let mut p = sigma_circulant(n, d).expect("lattice divisor");
            for &f in lattice.covers(d) {
                p = p.mul(&id.sub(&sigma_circulant(n, f).expect("lattice divisor")));
            }
            (d, p)
        })
        .collect()
}

pub fn minimal_projectors(lattice: &DivisorLattice) -> BTreeMap<usize, RationalMatrix> {
    minimal_projector_circulants(lattice)
        .into_iter()
        .map(|(d, c)| (d, c.to_matrix()))
        .collect()
}

/// `U_d = V_d ∩ V_{f_1}^⊥ ∩ ... ∩ V_{f_l}^⊥` from subspace operations alone.
pub fn irreducible_piece(lattice: &DivisorLattice, d: usize) -> RationalSubspace {
    use crate::rational::{intersect, orth_complement};
    let n = lattice.n;
    let mut u = RationalSubspace::periodic(n, d);
    for &f in lattice.covers(d) {
        u = intersect(&u, &orth_complement(&RationalSubspace::periodic(n, f)))
            .expect("same ambient space");
    }
    u
}
