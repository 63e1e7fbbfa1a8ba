//! Squares in the completions of Q: the p-adic fields (including p = 2) and
//! the reals, plus irreducibility of monic integer quadratics over each.

use std::fmt;

use crate::arith::{is_prime, kronecker};
use crate::error::Error;

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Real,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Real => write!(f, "real"),
        }
    }
}

/// Why a value is or is not a square in a given completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertReason {
    Square,
    OddValuation,
    /// The unit part is not a residue; carries the reduced unit
    /// (mod p for odd p, mod 8 for p = 2).
    UnitNonResidue { residue: i64 },
    NegativeAtReal,
}

/// Checkable record of a local square decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSquareCertificate {
    pub place: Place,
    pub value: i64,
    pub valuation: u32,
    pub is_square: bool,
    pub reason: CertReason,
}

/// Largest v with p^v dividing x. Errors on x = 0.
pub fn valuation(p: u64, x: i64) -> Result<u32, Error> {
    debug_assert!(is_prime(p), "valuation requires a prime");
    if x == 0 {
        return Err(Error::ZeroValuation);
    }
    let p = p as i128;
    let mut y = x as i128;
    let mut v = 0;
    while y % p == 0 {
        y /= p;
        v += 1;
    }
    Ok(v)
}

fn split(p: u64, x: i64) -> (u32, i64) {
    let p = p as i128;
    let mut y = x as i128;
    let mut v = 0;
    while y % p == 0 {
        y /= p;
        v += 1;
    }
    (v, y as i64)
}

/// Decide whether a nonzero integer is a square in Q_p.
///
/// For odd p: square iff the valuation is even and the unit part is a
/// residue mod p. For p = 2: square iff the valuation is even and the unit
/// part is 1 mod 8.
pub fn is_square_in_qp(p: u64, x: i64) -> (bool, LocalSquareCertificate) {
    debug_assert!(is_prime(p), "is_square_in_qp requires a prime");
    assert!(x != 0, "zero is not classified");
    let (v, u) = split(p, x);
    let (is_square, reason) = if v % 2 == 1 {
        (false, CertReason::OddValuation)
    } else if p == 2 {
        let residue = u.rem_euclid(8);
        if residue == 1 {
            (true, CertReason::Square)
        } else {
            (false, CertReason::UnitNonResidue { residue })
        }
    } else if kronecker(u, p as i64) == 1 {
        (true, CertReason::Square)
    } else {
        (
            false,
            CertReason::UnitNonResidue {
                residue: u.rem_euclid(p as i64),
            },
        )
    };
    (
        is_square,
        LocalSquareCertificate {
            place: Place::Finite(p),
            value: x,
            valuation: v,
            is_square,
            reason,
        },
    )
}

/// Square decision at the real place: positive iff square.
pub fn real_square_certificate(x: i64) -> (bool, LocalSquareCertificate) {
    assert!(x != 0, "zero is not classified");
    let is_square = x > 0;
    (
        is_square,
        LocalSquareCertificate {
            place: Place::Real,
            value: x,
            valuation: 0,
            is_square,
            reason: if is_square {
                CertReason::Square
            } else {
                CertReason::NegativeAtReal
            },
        },
    )
}

/// Is t^2 + b t + m irreducible over Q_p? Equivalent to the discriminant
/// b^2 - 4m not being a square in Q_p. Errors when the discriminant is zero.
pub fn quadratic_irreducible_over_qp(p: u64, b: i64, m: i64) -> Result<bool, Error> {
    let d = (b as i128) * (b as i128) - 4 * (m as i128);
    if d == 0 {
        return Err(Error::DegenerateDiscriminant);
    }
    let d = i64::try_from(d).map_err(|_| Error::InputTooLarge)?;
    Ok(!is_square_in_qp(p, d).0)
}

/// Is t^2 + b t + m irreducible over R, i.e. b^2 - 4m < 0?
pub fn quadratic_irreducible_over_r(b: i64, m: i64) -> bool {
    (b as i128) * (b as i128) - 4 * (m as i128) < 0
}
