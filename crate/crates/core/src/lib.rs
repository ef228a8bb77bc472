//! Polynomial moment problems on a segment: monodromy of `P`, the invariant
//! subspace `M_{P,a,b}`, and the splitting of solutions into reducible parts.
//!
//! ```
//! use polymoment::{poly::chebyshev, solver, Complex64, VerifyOptions};
//!
//! let h = 3f64.sqrt() / 2.0;
//! let (a, b) = (Complex64::new(-h, 0.0), Complex64::new(h, 0.0));
//! let inst = solver::build_instance(&chebyshev(6), a, b, &VerifyOptions::default())?;
//! assert_eq!(inst.lattice.divisors(), &[1, 2, 3, 6]);
//!
//! let q = &chebyshev(2) + &chebyshev(3);
//! assert!(inst.verify(&q)?.verdict);
//! let parts = solver::decompose_solution(&inst, &q)?;
//! assert_eq!(parts.len(), 2);
//! # Ok::<(), polymoment::Error>(())
//! ```

pub mod acceptance;
pub mod cactus;
pub mod corpus;
pub mod error;
pub mod moments;
pub mod monodromy;
pub mod perm;
pub mod poly;
pub mod rational;
pub mod report;
pub mod schur;
pub mod series;
pub mod solver;
pub mod tol;
pub mod track;

pub use error::{Error, Result};
pub use moments::{MomentReport, VerifyOptions};
pub use num_complex::Complex64;
pub use perm::Permutation;
pub use poly::ComplexPoly;
pub use rational::{Rational, RationalSubspace, RationalVector};
pub use schur::DivisorLattice;
pub use solver::{ProblemInstance, ReducibleSummand};
pub use tol::Tolerances;
