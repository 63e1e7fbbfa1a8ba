//! Quaternion algebras over Q: construction from symbols (a,b) or from
//! ramification data, Hilbert symbols at every place, and the gate deciding
//! when integral-norm failures are possible at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::arith::{factorize, is_prime, kronecker};
use crate::error::Error;
use crate::padic::Place;

/// Ramified primes must stay below this so every derived quantity
/// (C, C^2/16, discriminants) fits in 63 bits.
const MAX_RAMIFIED_PRIME: u64 = (1 << 31) - 1;

fn split2(x: i64) -> (u32, i64) {
    let v = x.trailing_zeros();
    (v, x >> v)
}

fn split_odd(p: u64, x: i64) -> (u32, i64) {
    let p = p as i128;
    let mut y = x as i128;
    let mut v = 0;
    while y % p == 0 {
        y /= p;
        v += 1;
    }
    (v, y as i64)
}

/// (u - 1)/2 mod 2 for odd u.
fn eps(u: i64) -> u32 {
    u32::from(u.rem_euclid(4) == 3)
}

/// (u^2 - 1)/8 mod 2 for odd u.
fn omega(u: i64) -> u32 {
    u32::from(matches!(u.rem_euclid(8), 3 | 5))
}

/// Hilbert symbol of the quaternion symbol (a,b) at a place of Q: -1 exactly
/// when the symbol algebra is ramified there.
///
/// At the real place: -1 iff both entries are negative. At odd p, writing
/// a = p^alpha u and b = p^beta v:
///   (a,b)_p = (-1)^(alpha beta (p-1)/2) (u|p)^beta (v|p)^alpha.
/// At p = 2, with unit parts u, v:
///   (a,b)_2 = (-1)^(eps(u) eps(v) + alpha omega(v) + beta omega(u)).
pub fn hilbert_symbol(a: i64, b: i64, place: Place) -> i32 {
    assert!(a != 0 && b != 0, "symbol entries must be nonzero");
    match place {
        Place::Real => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split2(a);
            let (beta, v) = split2(b);
            let e = eps(u) * eps(v) + alpha % 2 * omega(v) + beta % 2 * omega(u);
            if e % 2 == 1 {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            debug_assert!(is_prime(p) && p % 2 == 1);
            let (alpha, u) = split_odd(p, a);
            let (beta, v) = split_odd(p, b);
            let mut s = 1;
            if beta % 2 == 1 {
                s *= kronecker(u, p as i64);
            }
            if alpha % 2 == 1 {
                s *= kronecker(v, p as i64);
            }
            if alpha % 2 == 1 && beta % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            s
        }
    }
}

/// A quaternion algebra over Q, identified by its ramified places.
///
/// Two algebras with the same ramification compare equal even if they were
/// constructed from different symbols.
#[derive(Debug, Clone)]
pub struct QuaternionAlgebra {
    finite_ramified: Vec<u64>,
    infinite_ramified: bool,
    symbol: Option<(i64, i64)>,
}

impl PartialEq for QuaternionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.finite_ramified == other.finite_ramified
            && self.infinite_ramified == other.infinite_ramified
    }
}

impl Eq for QuaternionAlgebra {}

impl Hash for QuaternionAlgebra {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.finite_ramified.hash(state);
        self.infinite_ramified.hash(state);
    }
}

impl fmt::Display for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ramified at {{")?;
        for (i, p) in self.finite_ramified.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        if self.infinite_ramified {
            if !self.finite_ramified.is_empty() {
                write!(f, ", ")?;
            }
            write!(f, "inf")?;
        }
        write!(f, "}}")
    }
}

impl QuaternionAlgebra {
    /// The algebra generated by i, j with i^2 = a, j^2 = b, ij = -ji.
    /// Ramification is computed from Hilbert symbols at the real place and
    /// all primes dividing 2ab. Errors when the symbol splits everywhere.
    pub fn from_symbol(a: i64, b: i64) -> Result<QuaternionAlgebra, Error> {
        assert!(a != 0 && b != 0, "symbol entries must be nonzero");
        let infinite_ramified = hilbert_symbol(a, b, Place::Real) == -1;
        let mut candidates: BTreeSet<u64> = BTreeSet::new();
        candidates.insert(2);
        for x in [a, b] {
            for &(p, _) in &factorize(x.unsigned_abs()).factors {
                candidates.insert(p);
            }
        }
        let finite_ramified: Vec<u64> = candidates
            .into_iter()
            .filter(|&p| hilbert_symbol(a, b, Place::Finite(p)) == -1)
            .collect();
        if finite_ramified.is_empty() && !infinite_ramified {
            return Err(Error::SplitSymbol);
        }
        if finite_ramified.iter().any(|&p| p > MAX_RAMIFIED_PRIME) {
            return Err(Error::InputTooLarge);
        }
        debug_assert_eq!(
            (finite_ramified.len() + usize::from(infinite_ramified)) % 2,
            0,
            "product formula violated"
        );
        Ok(QuaternionAlgebra {
            finite_ramified,
            infinite_ramified,
            symbol: Some((a, b)),
        })
    }

    /// The definite algebra ramified exactly at the prime r and infinity.
    pub fn a_r(r: u64) -> Result<QuaternionAlgebra, Error> {
        if !is_prime(r) {
            return Err(Error::NotPrime(r));
        }
        if r > MAX_RAMIFIED_PRIME {
            return Err(Error::InputTooLarge);
        }
        Ok(QuaternionAlgebra {
            finite_ramified: vec![r],
            infinite_ramified: true,
            symbol: None,
        })
    }

    /// The algebra with the given finite ramified set; ramification at
    /// infinity is forced by the even-count product formula.
    pub fn from_ramified_primes(primes: &[u64]) -> Result<QuaternionAlgebra, Error> {
        if primes.is_empty() {
            return Err(Error::SplitSymbol);
        }
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::AlgebraSpec(format!("duplicate prime {}", w[0])));
            }
        }
        for &p in &sorted {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p > MAX_RAMIFIED_PRIME {
                return Err(Error::InputTooLarge);
            }
        }
        let infinite_ramified = sorted.len() % 2 == 1;
        Ok(QuaternionAlgebra {
            finite_ramified: sorted,
            infinite_ramified,
            symbol: None,
        })
    }

    pub fn finite_ramified(&self) -> &[u64] {
        &self.finite_ramified
    }

    pub fn infinite_ramified(&self) -> bool {
        self.infinite_ramified
    }

    /// Definite means ramified at the real place.
    pub fn is_definite(&self) -> bool {
        self.infinite_ramified
    }

    pub fn symbol(&self) -> Option<(i64, i64)> {
        self.symbol
    }

    /// Local-degree profile of this algebra as a degree-2 central simple
    /// algebra.
    pub fn profile(&self) -> CsaProfile {
        CsaProfile {
            degree: 2,
            finite: self.finite_ramified.iter().map(|&p| (p, 2)).collect(),
            infinite: if self.infinite_ramified { 2 } else { 1 },
        }
    }
}

/// Parse the algebra grammar shared with the command line:
/// `p:<prime>`, `ram:<p1,p2,...>`, or `sym:<a>,<b>`.
pub fn parse_algebra_spec(text: &str) -> Result<QuaternionAlgebra, Error> {
    let bad = || Error::AlgebraSpec(text.to_string());
    if let Some(rest) = text.strip_prefix("p:") {
        let r: u64 = rest.trim().parse().map_err(|_| bad())?;
        QuaternionAlgebra::a_r(r)
    } else if let Some(rest) = text.strip_prefix("ram:") {
        let primes: Vec<u64> = rest
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        QuaternionAlgebra::from_ramified_primes(&primes)
    } else if let Some(rest) = text.strip_prefix("sym:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let a: i64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: i64 = parts[1].trim().parse().map_err(|_| bad())?;
        if a == 0 || b == 0 {
            return Err(bad());
        }
        QuaternionAlgebra::from_symbol(a, b)
    } else {
        Err(bad())
    }
}

/// Local degrees of a central simple algebra over Q: the degree n, the local
/// degree at each finite place (1 where omitted), and at the real place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsaProfile {
    degree: u32,
    finite: BTreeMap<u64, u32>,
    infinite: u32,
}

impl CsaProfile {
    pub fn new(
        degree: u32,
        finite: BTreeMap<u64, u32>,
        infinite: u32,
    ) -> Result<CsaProfile, Error> {
        if degree < 2 {
            return Err(Error::InvalidProfile(format!("degree {degree} < 2")));
        }
        if !matches!(infinite, 1 | 2) {
            return Err(Error::InvalidProfile(format!(
                "infinite local degree {infinite} must be 1 or 2"
            )));
        }
        if infinite == 2 && degree % 2 != 0 {
            return Err(Error::InvalidProfile(
                "real ramification requires even degree".to_string(),
            ));
        }
        let mut cleaned = BTreeMap::new();
        for (p, nv) in finite {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if nv == 0 || degree % nv != 0 {
                return Err(Error::InvalidProfile(format!(
                    "local degree {nv} at {p} does not divide {degree}"
                )));
            }
            if nv > 1 {
                cleaned.insert(p, nv);
            }
        }
        Ok(CsaProfile {
            degree,
            finite: cleaned,
            infinite,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn local_degree(&self, place: Place) -> u32 {
        match place {
            Place::Real => self.infinite,
            Place::Finite(p) => self.finite.get(&p).copied().unwrap_or(1),
        }
    }

    pub fn ramified_finite(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.finite.iter().map(|(&p, &n)| (p, n))
    }
}

/// Why integral-norm failures are ruled out for a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoOutlierReason {
    DegreeAboveTwo,
    Indefinite,
    NoFiniteRamification,
}

impl fmt::Display for NoOutlierReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoOutlierReason::DegreeAboveTwo => write!(f, "degree > 2"),
            NoOutlierReason::Indefinite => write!(f, "indefinite"),
            NoOutlierReason::NoFiniteRamification => write!(f, "no finite ramification"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateVerdict {
    NoOutliers(NoOutlierReason),
    PossiblyHasOutliers,
}

/// Decide from local degrees alone whether the algebra can have positive
/// integers that are norms but not norms of integers. Only totally definite
/// quaternion algebras survive the gate.
pub fn eichler_gate(profile: &CsaProfile) -> Result<GateVerdict, Error> {
    if profile.degree > 2 {
        return Ok(GateVerdict::NoOutliers(NoOutlierReason::DegreeAboveTwo));
    }
    if profile.infinite == 1 {
        return Ok(GateVerdict::NoOutliers(NoOutlierReason::Indefinite));
    }
    if profile.finite.is_empty() {
        return Ok(GateVerdict::NoOutliers(NoOutlierReason::NoFiniteRamification));
    }
    let ramified = profile.finite.len() + usize::from(profile.infinite == 2);
    if ramified % 2 != 0 {
        return Err(Error::RamificationParity);
    }
    Ok(GateVerdict::PossiblyHasOutliers)
}

/// Does the local degree of `a` divide that of `b` at every place?
/// Profiles must have equal degrees.
pub fn local_divides(a: &CsaProfile, b: &CsaProfile) -> Result<bool, Error> {
    if a.degree != b.degree {
        return Err(Error::UnequalDegrees);
    }
    if b.infinite % a.infinite != 0 {
        return Ok(false);
    }
    for (&p, &na) in &a.finite {
        if b.local_degree(Place::Finite(p)) % na != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Test oracle: (a,b) splits at p iff z^2 = a x^2 + b y^2 has a solution
    /// mod p^(2 + v_p(4ab)) with x, y not both divisible by p.
    fn splits_bruteforce(a: i64, b: i64, p: u64) -> bool {
        let v = match p {
            2 => 2 + split2(a).0 + split2(b).0,
            _ => split_odd(p, a).0 + split_odd(p, b).0,
        };
        let k = 2 + v;
        let modulus = (p as i128).pow(k);
        let squares: std::collections::HashSet<i128> =
            (0..modulus).map(|z| z * z % modulus).collect();
        for x in 0..modulus {
            for y in 0..modulus {
                if x % p as i128 == 0 && y % p as i128 == 0 {
                    continue;
                }
                let w = (a as i128 * x * x + b as i128 * y * y).rem_euclid(modulus);
                if squares.contains(&w) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(-58, -17, Place::Real), -1);
        for place in [Place::Real, Place::Finite(2), Place::Finite(3)] {
            assert_eq!(hilbert_symbol(1, -7, place), 1);
        }
        assert_eq!(hilbert_symbol(-1, -1, Place::Finite(2)), -1);
    }

    #[test]
    fn hilbert_matches_bruteforce() {
        let vals = [-14i64, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 14];
        for &a in &vals {
            for &b in &vals {
                for &p in &[2u64, 3, 5, 7] {
                    assert_eq!(
                        hilbert_symbol(a, b, Place::Finite(p)) == 1,
                        splits_bruteforce(a, b, p),
                        "({a},{b}) at {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn hilbert_symmetric_and_bimultiplicative() {
        let vals = [-9i64, -7, -5, -4, -3, -2, -1, 1, 2, 3, 4, 5, 7, 9];
        let places = [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7)];
        for &a in &vals {
            for &b in &vals {
                for &v in &places {
                    assert_eq!(hilbert_symbol(a, b, v), hilbert_symbol(b, a, v));
                    for &a2 in &[-3i64, 2, 5] {
                        assert_eq!(
                            hilbert_symbol(a * a2, b, v),
                            hilbert_symbol(a, b, v) * hilbert_symbol(a2, b, v)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_formula() {
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                if a == 0 || b == 0 {
                    continue;
                }
                let mut prod = hilbert_symbol(a, b, Place::Real);
                let mut primes: BTreeSet<u64> = BTreeSet::new();
                primes.insert(2);
                for x in [a, b] {
                    primes.extend(factorize(x.unsigned_abs()).factors.iter().map(|&(p, _)| p));
                }
                for p in primes {
                    prod *= hilbert_symbol(a, b, Place::Finite(p));
                }
                assert_eq!(prod, 1, "({a},{b})");
            }
        }
    }

    #[test]
    fn from_symbol_examples() {
        let b = QuaternionAlgebra::from_symbol(-58, -17).unwrap();
        assert_eq!(b.finite_ramified(), &[2, 17, 29]);
        assert!(b.infinite_ramified());

        let a = QuaternionAlgebra::from_symbol(-1, -67).unwrap();
        assert_eq!(a.finite_ramified(), &[67]);
        assert!(a.infinite_ramified());
        assert_eq!(a, QuaternionAlgebra::a_r(67).unwrap());

        assert!(matches!(
            QuaternionAlgebra::from_symbol(1, 5),
            Err(Error::SplitSymbol)
        ));
    }

    #[test]
    fn a_r_examples() {
        for r in [67u64, 2, 113] {
            let alg = QuaternionAlgebra::a_r(r).unwrap();
            assert_eq!(alg.finite_ramified(), &[r]);
            assert!(alg.is_definite());
        }
        assert!(matches!(QuaternionAlgebra::a_r(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn ramified_set_constructor() {
        let alg = QuaternionAlgebra::from_ramified_primes(&[3, 2]).unwrap();
        assert_eq!(alg.finite_ramified(), &[2, 3]);
        assert!(!alg.infinite_ramified()); // even count: indefinite
        assert!(QuaternionAlgebra::from_ramified_primes(&[2, 2]).is_err());
        assert!(QuaternionAlgebra::from_ramified_primes(&[]).is_err());
    }

    #[test]
    fn spec_grammar() {
        assert_eq!(
            parse_algebra_spec("p:67").unwrap(),
            QuaternionAlgebra::a_r(67).unwrap()
        );
        assert_eq!(
            parse_algebra_spec("ram:2,17,29").unwrap(),
            QuaternionAlgebra::from_symbol(-58, -17).unwrap()
        );
        assert_eq!(
            parse_algebra_spec("sym:-58,-17").unwrap().finite_ramified(),
            &[2, 17, 29]
        );
        for bad in ["", "p:abc", "sym:1", "sym:0,5", "q:7", "ram:"] {
            assert!(parse_algebra_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn gate_examples() {
        let deg4 = CsaProfile::new(4, BTreeMap::from([(2, 2)]), 2).unwrap();
        assert_eq!(
            eichler_gate(&deg4).unwrap(),
            GateVerdict::NoOutliers(NoOutlierReason::DegreeAboveTwo)
        );

        let indefinite = QuaternionAlgebra::from_ramified_primes(&[2, 3])
            .unwrap()
            .profile();
        assert_eq!(
            eichler_gate(&indefinite).unwrap(),
            GateVerdict::NoOutliers(NoOutlierReason::Indefinite)
        );

        let a67 = QuaternionAlgebra::a_r(67).unwrap().profile();
        assert_eq!(eichler_gate(&a67).unwrap(), GateVerdict::PossiblyHasOutliers);

        let unram = CsaProfile::new(2, BTreeMap::new(), 2).unwrap();
        assert_eq!(
            eichler_gate(&unram).unwrap(),
            GateVerdict::NoOutliers(NoOutlierReason::NoFiniteRamification)
        );

        let parity = CsaProfile::new(2, BTreeMap::from([(2, 2), (3, 2)]), 2).unwrap();
        assert!(matches!(
            eichler_gate(&parity),
            Err(Error::RamificationParity)
        ));
    }

    #[test]
    fn local_divisibility() {
        let a67 = QuaternionAlgebra::a_r(67).unwrap().profile();
        let sym = QuaternionAlgebra::from_symbol(-1, -67).unwrap().profile();
        assert!(local_divides(&a67, &sym).unwrap());

        let a2 = QuaternionAlgebra::a_r(2).unwrap().profile();
        let b = QuaternionAlgebra::from_symbol(-58, -17).unwrap().profile();
        assert!(local_divides(&a2, &b).unwrap());

        let a3 = QuaternionAlgebra::a_r(3).unwrap().profile();
        assert!(!local_divides(&a3, &a2).unwrap());

        let deg4 = CsaProfile::new(4, BTreeMap::new(), 1).unwrap();
        assert!(matches!(
            local_divides(&a3, &deg4),
            Err(Error::UnequalDegrees)
        ));
    }
}
