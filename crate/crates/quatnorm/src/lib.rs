//! Which positive integers are reduced norms of *integral* elements of a
//! definite quaternion algebra over Q?
//!
//! By Hasse-Maass-Schilling, every positive integer is a reduced norm from
//! such an algebra; the ones that are not norms of integers are called
//! outliers. This crate decides single integers with checkable witnesses,
//! enumerates complete outlier sets using the effective bound M = C^2/16
//! together with descent by squares of ramified primes, and computes exact
//! Dirichlet densities of the primes r for which a given integer is an
//! outlier for A_r (the algebra ramified exactly at r and infinity).
//!
//! # Modules
//!
//! - [`arith`]: deterministic primality, factorization, Kronecker symbols,
//!   square classes, CRT.
//! - [`padic`]: squares in Q_p and R, local irreducibility of quadratics.
//! - [`algebra`]: quaternion algebras from symbols or ramification data,
//!   Hilbert symbols, the Eichler gate.
//! - [`outliers`]: the decision engine, witness search, enumeration with
//!   the effective bound, descent, supersingular interpretation.
//! - [`density`]: condition expressions over Legendre symbols, exact
//!   densities by GF(2) square-class elimination, empirical prime scans.
//! - [`cli`]: machine-readable run reports behind the `quatnorm` binary.
//!
//! # Examples
//!
//! One runnable example per capability, under `examples/`:
//!
//! ```text
//! cargo run --example check_norm          # decide single integers, witnesses
//! cargo run --example enumerate_outliers  # complete outlier sets
//! cargo run --example densities           # exact densities of outlier primes
//! cargo run --example prime_scan          # empirical scans vs exact values
//! cargo run --example hilbert_symbols     # symbols and ramification
//! cargo run --example supersingular       # endomorphism-degree reading
//! ```
//!
//! # Quick start
//!
//! ```
//! use quatnorm::algebra::QuaternionAlgebra;
//! use quatnorm::outliers::{enumerate_base_outliers, is_outlier};
//!
//! let a67 = QuaternionAlgebra::a_r(67).unwrap();
//! assert!(is_outlier(3, &a67).unwrap());
//! assert!(!is_outlier(12, &a67).unwrap());
//!
//! let cls = enumerate_base_outliers(&a67).unwrap();
//! assert_eq!(cls.base_outliers, vec![3]);
//! assert_eq!(cls.m_bound, 280);
//! ```

#![allow(clippy::manual_is_multiple_of)]

pub mod algebra;
pub mod arith;
pub mod cli;
pub mod density;
mod error;
pub mod outliers;
pub mod padic;

pub use error::Error;
