//! The space `M_{P,a,b}`, its splitting into the pieces `U_d`, right factors of
//! `P`, and the constructive splitting of a solution into reducible summands.

use num_complex::Complex64;
use serde::Serialize;

use crate::cactus::{build_cactus, f_vectors, tree_path, Cactus, FVectors, Node};
use crate::error::{Error, Result};
use crate::monodromy::{monodromy_with, MonodromyData};
use crate::moments::{normalize_at, verify_vanishing, MomentReport, VerifyOptions};
use crate::poly::{b_adic_expansion, decompose_right, ComplexPoly};
use crate::rational::{invariant_closure, span, RationalSubspace, RationalVector};
use crate::schur::{divisor_lattice, irreducible_piece, minimal_projector_circulants, DivisorLattice};
use crate::series::{default_truncation, extract_psi, noise_floor, puiseux_inverse, q_of_inverse, recover_polynomial};

#[derive(Debug, Clone, Serialize)]
pub struct ProblemInstance {
    pub p: ComplexPoly,
    pub a: Complex64,
    pub b: Complex64,
    pub md: MonodromyData,
    pub cactus: Cactus,
    pub path: Vec<Node>,
    pub fv: FVectors,
    pub lattice: DivisorLattice,
    pub m: RationalSubspace,
    #[serde(skip)]
    pub opts: VerifyOptions,
}

impl ProblemInstance {
    pub fn n(&self) -> usize {
        self.md.n
    }

    /// `τ_pt`, the threshold for point-value equality.
    pub fn point_tol(&self) -> f64 {
        self.opts.tol.point * (1.0 + self.p.norm_inf())
    }

    pub fn same_value(&self) -> bool {
        (self.p.eval(self.a) - self.p.eval(self.b)).norm() <= self.point_tol()
    }

    pub fn verify(&self, q: &ComplexPoly) -> Result<MomentReport> {
        verify_vanishing(&self.p, q, self.a, self.b, &self.md, &self.fv, &self.m, &self.opts)
    }
}

pub fn fvector_seed(fv: &FVectors) -> Vec<RationalVector> {
    fv.vectors
        .iter()
        .map(|f| RationalVector::from_ints(&f.iter().map(|&x| i64::from(x)).collect::<Vec<_>>()))
        .collect()
}

pub fn build_instance(p: &ComplexPoly, a: Complex64, b: Complex64, opts: &VerifyOptions) -> Result<ProblemInstance> {
    let tol = &opts.tol;
    let md = monodromy_with(p, a, b, tol)?;
    let cactus = build_cactus(&md, p, a, b, tol)?;
    let path = tree_path(&cactus)?;
    let fv = f_vectors(&cactus, &path);
    let gens = md.all_generators();
    let m = invariant_closure(md.n, &fvector_seed(&fv), &gens)?;
    let lattice = divisor_lattice(&gens, md.n, false)?;
    Ok(ProblemInstance { p: p.clone(), a, b, md, cactus, path, fv, lattice, m, opts: *opts })
}

/// The divisors `d` of the lattice with `U_d ⊆ M`, checked against `dim M`.
pub fn decompose_m(lattice: &DivisorLattice, m: &RationalSubspace) -> Result<Vec<usize>> {
    let n = lattice.n();
    let projectors = minimal_projector_circulants(lattice);
    let mut chosen = Vec::new();
    let mut total = 0;
    for &d in lattice.divisors() {
        let pi = &projectors[&d];
        let image: Vec<RationalVector> = m.basis().iter().map(|v| pi.apply(v)).collect();
        let piece = irreducible_piece(lattice, d);
        if span(n, &image)?.dim() == piece.dim() {
            chosen.push(d);
            total += piece.dim();
        }
    }
    if total != m.dim() {
        return Err(Error::DecompositionMismatch { expected: total, got: m.dim() });
    }
    Ok(chosen)
}

pub fn decompose_instance(inst: &ProblemInstance) -> Result<Vec<usize>> {
    decompose_m(&inst.lattice, &inst.m)
}

/// `P = A ∘ B` with `deg B = n/d`, `B` monic and `B(0) = 0`, checked to be
/// constant exactly on the residue classes mod `d` of the base fiber.
pub fn right_factor_for(inst: &ProblemInstance, d: usize) -> Result<(ComplexPoly, ComplexPoly)> {
    let n = inst.n();
    if !inst.lattice.contains(d) {
        return Err(Error::InvalidDivisor { n, d });
    }
    let degree = n / d;
    let (a, b) = if degree == 1 {
        (inst.p.clone(), ComplexPoly::identity())
    } else {
        decompose_right(&inst.p, degree, inst.opts.tol.decomp)?.ok_or(Error::FactorMissing { degree })?
    };
    if !block_check(&b, &inst.md.fiber, d, inst.opts.tol.block) {
        return Err(Error::BlockMismatch { d });
    }
    Ok((a, b))
}

/// Does `B` take equal values on branches `i, j` exactly when `i ≡ j (mod d)`?
pub fn block_check(b: &ComplexPoly, fiber: &[Complex64], d: usize, tol_block: f64) -> bool {
    let vals: Vec<Complex64> = fiber.iter().map(|w| b.eval(*w)).collect();
    let scale = 1.0 + vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (0..vals.len()).all(|i| {
        (0..vals.len()).all(|j| ((vals[i] - vals[j]).norm() <= tol_block * scale) == (i % d == j % d))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RightFactor {
    pub d: usize,
    pub w: ComplexPoly,
    pub a: ComplexPoly,
    pub gap: f64,
}

/// Right factors `W` (one per `d`) with `W(a) = W(b)`.
pub fn reducible_generators(inst: &ProblemInstance) -> Result<Vec<RightFactor>> {
    let mut out = Vec::new();
    for &d in inst.lattice.divisors() {
        if d == inst.n() {
            continue;
        }
        let (a, w) = right_factor_for(inst, d)?;
        let gap = (w.eval(inst.a) - w.eval(inst.b)).norm();
        if gap <= inst.point_tol() {
            out.push(RightFactor { d, w, a, gap });
        }
    }
    Ok(out)
}

pub fn exists_nonzero_solution(inst: &ProblemInstance) -> bool {
    inst.same_value()
}

/// `(A, B)` with `P = A∘B`.
pub type Decomposition = (ComplexPoly, ComplexPoly);

/// Pairs of right factors from incomparable divisors, neither a polynomial in the other.
pub fn double_decompositions(inst: &ProblemInstance) -> Result<Vec<(Decomposition, Decomposition)>> {
    let n = inst.n();
    let inner: Vec<usize> = inst.lattice.divisors().iter().copied().filter(|&d| d != 1 && d != n).collect();
    let factors: Vec<(ComplexPoly, ComplexPoly)> =
        inner.iter().map(|&d| right_factor_for(inst, d)).collect::<Result<_>>()?;
    let tol = inst.opts.tol.decomp;
    let factors_through = |outer: &ComplexPoly, inner: &ComplexPoly| -> bool {
        let (Some(dout), Some(din)) = (outer.degree(), inner.degree()) else { return false };
        dout % din == 0 && b_adic_expansion(outer, inner, tol).is_some()
    };
    let mut out = Vec::new();
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            let (bi, bj) = (&factors[i].1, &factors[j].1);
            if !factors_through(bi, bj) && !factors_through(bj, bi) {
                out.push((factors[i].clone(), factors[j].clone()));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducibleSummand {
    pub q: ComplexPoly,
    pub w: ComplexPoly,
    pub a_tilde: ComplexPoly,
    pub q_tilde: ComplexPoly,
    pub gap: f64,
}

impl ReducibleSummand {
    /// `(|P - Ã∘W|, |Q_j - Q̃∘W|)`, max-coefficient.
    pub fn residuals(&self, p: &ComplexPoly) -> (f64, f64) {
        (
            p.distance(&self.a_tilde.compose(&self.w)),
            self.q.distance(&self.q_tilde.compose(&self.w)),
        )
    }
}

/// Splits a verified solution `Q` into reducible summands `Q̃_j ∘ W_j` with
/// `P = Ã_j ∘ W_j` and `W_j(a) = W_j(b)`; the summands add up to `Q`.
pub fn decompose_solution(inst: &ProblemInstance, q: &ComplexPoly) -> Result<Vec<ReducibleSummand>> {
    let qn = normalize_at(q, inst.a);
    if qn.is_zero() {
        return Ok(Vec::new());
    }
    let report = inst.verify(&qn)?;
    if !report.verdict {
        return Err(Error::NotASolution(describe_failure(&report)));
    }
    let mut parts = split(inst, &qn)?;
    // Fix constants: every summand vanishes at a, the first one carries Q(a).
    for s in parts.iter_mut() {
        let c0 = s.q_tilde.eval(s.w.eval(inst.a));
        s.q_tilde = &s.q_tilde - &ComplexPoly::constant(c0);
    }
    if let Some(first) = parts.first_mut() {
        first.q_tilde = &first.q_tilde + &ComplexPoly::constant(q.eval(inst.a));
    }
    for s in parts.iter_mut() {
        s.q = s.q_tilde.compose(&s.w);
    }
    let total = parts.iter().fold(ComplexPoly::zero(), |acc, s| &acc + &s.q);
    let resid = total.distance(q);
    if resid > inst.opts.tol.recover * (1.0 + q.norm_inf()) {
        return Err(Error::RecoveryFailure(resid));
    }
    Ok(parts)
}

fn describe_failure(r: &MomentReport) -> String {
    let mut why = Vec::new();
    if !r.moments_vanish {
        let (i, m) = r
            .moments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .expect("at least one moment");
        why.push(format!("moment m_{i} = {m}"));
    }
    if !r.phi_vanish {
        why.push(format!("branch relation residual {:e}", r.invariant_residual));
    }
    if !r.puiseux_violations.is_empty() {
        why.push(format!("{} Puiseux indices outside the allowed support", r.puiseux_violations.len()));
    }
    why.join("; ")
}

fn split(inst: &ProblemInstance, q: &ComplexPoly) -> Result<Vec<ReducibleSummand>> {
    let n = inst.n();
    let tol = &inst.opts.tol;
    let deg_q = q.degree().unwrap_or(0);
    let trunc = inst.opts.truncation.unwrap_or_else(|| default_truncation(n, deg_q));
    let w = puiseux_inverse(&inst.p, (trunc + deg_q as i64).max(1) as usize)?;
    let series = q_of_inverse(q, &w, trunc)?;
    let cut = tol.series * series.max_abs();
    let floor = noise_floor(q, &w, trunc)?;
    let support: Vec<i64> = series.support_above(tol.series, &floor);

    if support.iter().all(|k| k % n as i64 == 0) {
        let r = b_adic_expansion(q, &inst.p, tol.decomp).ok_or(Error::RecoveryFailure(f64::NAN))?;
        if !inst.same_value() {
            return Err(Error::NotASolution("Q factors through P but P(a) != P(b)".into()));
        }
        let (wn, alpha, beta) = inst.p.normalize_affine().ok_or(Error::NotNormalizable)?;
        let affine = ComplexPoly::new(vec![beta, alpha]);
        return Ok(vec![summand(r.compose(&affine), wn, affine, inst)]);
    }

    let mut rest = series;
    let mut out = Vec::new();
    for &f in inst.lattice.divisors().iter().rev() {
        if f == n {
            continue;
        }
        let step = (n / f) as i64;
        let visible = |k: i64| rest.coeff(k).norm() > cut.max(floor.coeff(k).norm());
        if !rest.indices().any(|k| k % step == 0 && visible(k)) {
            continue;
        }
        let psi = extract_psi(&rest, f)?;
        let s = recover_polynomial(&psi, &w, &floor, tol.recover)?;
        let (a_f, b_f) = right_factor_for(inst, f)?;
        let r = b_adic_expansion(&s, &b_f, tol.recover).ok_or(Error::FactorMissing { degree: n / f })?;
        rest = rest.sub(&psi);
        let gap = (b_f.eval(inst.a) - b_f.eval(inst.b)).norm();
        if gap <= inst.point_tol() {
            out.push(summand(r, b_f, a_f, inst));
            continue;
        }
        if a_f.degree().unwrap_or(0) < 2 {
            if r.degree().unwrap_or(0) > 0 {
                return Err(Error::NotASolution("component through P with P(a) != P(b)".into()));
            }
            continue;
        }
        let (a2, b2) = (b_f.eval(inst.a), b_f.eval(inst.b));
        let sub = build_instance(&a_f, a2, b2, &inst.opts)?;
        let rn = normalize_at(&r, a2);
        if rn.is_zero() {
            continue;
        }
        let report = sub.verify(&rn)?;
        if !report.verdict {
            return Err(Error::NotASolution(format!(
                "component of degree {} does not solve the reduced problem: {}",
                n / f,
                describe_failure(&report)
            )));
        }
        for e in split(&sub, &rn)? {
            out.push(ReducibleSummand {
                q: ComplexPoly::zero(),
                w: e.w.compose(&b_f),
                a_tilde: e.a_tilde,
                q_tilde: e.q_tilde,
                gap: 0.0,
            });
        }
    }
    let left = rest
        .indices()
        .filter(|&k| k != 0)
        .map(|k| rest.coeff(k).norm() - floor.coeff(k).norm())
        .fold(0.0, f64::max);
    if left > cut {
        return Err(Error::ResidualNonzero(left));
    }
    for s in out.iter_mut() {
        s.gap = (s.w.eval(inst.a) - s.w.eval(inst.b)).norm();
    }
    Ok(out)
}

fn summand(q_tilde: ComplexPoly, w: ComplexPoly, a_tilde: ComplexPoly, inst: &ProblemInstance) -> ReducibleSummand {
    let gap = (w.eval(inst.a) - w.eval(inst.b)).norm();
    ReducibleSummand { q: q_tilde.compose(&w), w, a_tilde, q_tilde, gap }
}
