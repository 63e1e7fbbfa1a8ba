//! The decision engine: is a positive integer the reduced norm of an
//! integral element of a definite quaternion algebra over Q?
//!
//! A positive integer m is always a norm from a definite algebra (positivity
//! at the ramified real place is the only obstruction). Whether it is the
//! norm of an *integer* of the algebra reduces to a finite search: m is such
//! a norm iff m is a perfect square, or some monic quadratic t^2 + bt + m
//! with 0 <= b <= floor(2 sqrt(m)) is irreducible at every ramified place.
//! Integers failing the search are called outliers. Outliers are stable
//! under multiplication by squares of ramified primes, and above the bound
//! M = C^2/16 (C the product of the finite ramified primes) every candidate
//! with squarefree ramified part is certified a norm by Chinese remaindering.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{eichler_gate, GateVerdict, QuaternionAlgebra};
use crate::arith::{crt, is_perfect_square, isqrt, kronecker};
use crate::error::Error;
use crate::padic::{is_square_in_qp, real_square_certificate, LocalSquareCertificate};

/// Inputs above this would overflow the i64 discriminant b^2 - 4m.
const MAX_NORM_INPUT: u64 = (1 << 61) - 1;

/// Certificate that m is the reduced norm of an integral element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormWitness {
    /// m = root^2 is the norm of the rational integer `root`.
    RationalSquare { m: u64, root: u64 },
    /// A quadratic t^2 + bt + m irreducible at every ramified place.
    Quadratic(QuadraticWitness),
}

/// The quadratic case of [`NormWitness`]: the coefficient b, the negative
/// discriminant d = b^2 - 4m, and one non-square certificate per ramified
/// place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticWitness {
    pub m: u64,
    pub b: u64,
    pub d: i64,
    pub local_certs: Vec<LocalSquareCertificate>,
    pub real_cert: LocalSquareCertificate,
}

impl NormWitness {
    /// Re-derive every claim in the witness against the given algebra.
    pub fn verify(&self, algebra: &QuaternionAlgebra) -> bool {
        match self {
            NormWitness::RationalSquare { m, root } => root
                .checked_mul(*root)
                .is_some_and(|sq| sq == *m),
            NormWitness::Quadratic(w) => w.verify(algebra),
        }
    }
}

impl QuadraticWitness {
    pub fn verify(&self, algebra: &QuaternionAlgebra) -> bool {
        if self.m == 0 || self.m > MAX_NORM_INPUT {
            return false;
        }
        let d = (self.b as i128) * (self.b as i128) - 4 * (self.m as i128);
        if d >= 0 || d != self.d as i128 {
            return false;
        }
        let (_, real_fresh) = real_square_certificate(self.d);
        if self.real_cert != real_fresh || self.real_cert.is_square {
            return false;
        }
        let ramified = algebra.finite_ramified();
        if self.local_certs.len() != ramified.len() {
            return false;
        }
        for (&q, cert) in ramified.iter().zip(&self.local_certs) {
            let (sq, fresh) = is_square_in_qp(q, self.d);
            if sq || fresh != *cert {
                return false;
            }
        }
        true
    }
}

fn require_decidable(m: u64, algebra: &QuaternionAlgebra) -> Result<(), Error> {
    if m == 0 {
        return Err(Error::NotPositive);
    }
    if !algebra.is_definite() {
        return Err(Error::EichlerHolds);
    }
    if m > MAX_NORM_INPUT {
        return Err(Error::InputTooLarge);
    }
    Ok(())
}

/// Search for the smallest b in [0, floor(2 sqrt(m))] whose discriminant
/// b^2 - 4m is a non-square in Q_q for every finite ramified q. For
/// non-square m the search is exhaustive: `None` means m is not the reduced
/// norm of any integral element.
pub fn find_witness(
    m: u64,
    algebra: &QuaternionAlgebra,
) -> Result<Option<QuadraticWitness>, Error> {
    require_decidable(m, algebra)?;
    if is_perfect_square(m).is_some() {
        return Err(Error::SquareShortcut(m));
    }
    let b_max = isqrt(4 * m);
    'search: for b in 0..=b_max {
        let d = (b * b) as i64 - (4 * m) as i64;
        debug_assert!(d < 0);
        let mut local_certs = Vec::with_capacity(algebra.finite_ramified().len());
        for &q in algebra.finite_ramified() {
            let (sq, cert) = is_square_in_qp(q, d);
            if sq {
                continue 'search;
            }
            local_certs.push(cert);
        }
        let (_, real_cert) = real_square_certificate(d);
        return Ok(Some(QuadraticWitness {
            m,
            b,
            d,
            local_certs,
            real_cert,
        }));
    }
    Ok(None)
}

/// Decide whether m is the reduced norm of an integral element, with a
/// witness when it is. Perfect squares short-circuit: m = k^2 is the norm
/// of the rational integer k.
pub fn is_norm_of_integer(
    m: u64,
    algebra: &QuaternionAlgebra,
) -> Result<(bool, Option<NormWitness>), Error> {
    require_decidable(m, algebra)?;
    if let Some(root) = is_perfect_square(m) {
        return Ok((true, Some(NormWitness::RationalSquare { m, root })));
    }
    Ok(match find_witness(m, algebra)? {
        Some(w) => (true, Some(NormWitness::Quadratic(w))),
        None => (false, None),
    })
}

/// Is m a norm from the algebra but not the norm of any integral element?
pub fn is_outlier(m: u64, algebra: &QuaternionAlgebra) -> Result<bool, Error> {
    is_norm_of_integer(m, algebra).map(|(norm, _)| !norm)
}

/// Strip squares of ramified primes: returns (m0, exponents) with
/// m = m0 * prod q^(2 n_q) and v_q(m0) <= 1 for every ramified q.
/// The outlier verdicts of m and m0 coincide.
pub fn reduce_by_ramified_squares(
    m: u64,
    algebra: &QuaternionAlgebra,
) -> (u64, BTreeMap<u64, u32>) {
    assert!(m >= 1);
    let mut m0 = m;
    let mut exponents = BTreeMap::new();
    for &q in algebra.finite_ramified() {
        let Some(qq) = q.checked_mul(q) else { continue };
        let mut n_q = 0;
        while m0 % qq == 0 {
            m0 /= qq;
            n_q += 1;
        }
        if n_q > 0 {
            exponents.insert(q, n_q);
        }
    }
    (m0, exponents)
}

pub const CLOSURE_RULE: &str = "base * prod_{q in S} q^(2 n_q)";

/// Complete description of the outliers of a definite algebra: the finite
/// base set below M = floor(C^2/16) together with the closure rule. When the
/// gate rules outliers out, the base is empty and no scan is performed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutlierClassification {
    pub algebra: QuaternionAlgebra,
    /// Product of the finite ramified primes.
    pub c: u64,
    /// floor(c^2 / 16): scanning [1, m_bound] determines every outlier.
    pub m_bound: u64,
    /// Sorted outliers m0 <= m_bound with v_q(m0) <= 1 for all ramified q.
    pub base_outliers: Vec<u64>,
    pub closure_rule: &'static str,
    /// Upper end of an extra verified band (m_bound, k * m_bound], if run.
    pub verified_band: Option<u64>,
    pub gate: GateVerdict,
}

impl OutlierClassification {
    /// Is m in the closure of the base set, i.e. an outlier?
    pub fn closure_contains(&self, m: u64) -> bool {
        let (m0, _) = reduce_by_ramified_squares(m, &self.algebra);
        self.base_outliers.binary_search(&m0).is_ok()
    }

    pub fn has_outliers(&self) -> bool {
        !self.base_outliers.is_empty()
    }
}

fn bounds(algebra: &QuaternionAlgebra) -> Result<(u64, u64), Error> {
    let mut c: u64 = 1;
    for &q in algebra.finite_ramified() {
        c = c.checked_mul(q).ok_or(Error::InputTooLarge)?;
    }
    let m_bound = c.checked_mul(c).ok_or(Error::InputTooLarge)? / 16;
    if m_bound > MAX_NORM_INPUT {
        return Err(Error::InputTooLarge);
    }
    Ok((c, m_bound))
}

/// Enumerate the base outliers of the algebra by scanning [1, M].
pub fn enumerate_base_outliers(
    algebra: &QuaternionAlgebra,
) -> Result<OutlierClassification, Error> {
    enumerate_with_band(algebra, None)
}

/// As [`enumerate_base_outliers`], optionally re-scanning the band
/// (M, k * M] as an independent check that no reduced outlier hides there.
pub fn enumerate_with_band(
    algebra: &QuaternionAlgebra,
    band_factor: Option<u64>,
) -> Result<OutlierClassification, Error> {
    let gate = eichler_gate(&algebra.profile())?;
    let (c, m_bound) = bounds(algebra)?;
    let mut classification = OutlierClassification {
        algebra: algebra.clone(),
        c,
        m_bound,
        base_outliers: Vec::new(),
        closure_rule: CLOSURE_RULE,
        verified_band: None,
        gate,
    };
    if matches!(gate, GateVerdict::NoOutliers(_)) {
        return Ok(classification);
    }
    let reduced_outlier = |m: u64| -> bool {
        let skip = algebra.finite_ramified().iter().any(|&q| {
            q.checked_mul(q).is_some_and(|qq| m % qq == 0)
        });
        !skip && is_outlier(m, algebra).unwrap_or(false)
    };
    let mut base: Vec<u64> = (1..m_bound + 1)
        .into_par_iter()
        .filter(|&m| reduced_outlier(m))
        .collect();
    base.sort_unstable();
    classification.base_outliers = base;
    if let Some(k) = band_factor {
        let hi = m_bound.checked_mul(k.max(1)).ok_or(Error::InputTooLarge)?;
        if hi > MAX_NORM_INPUT {
            return Err(Error::InputTooLarge);
        }
        let mut stray: Vec<u64> = (m_bound + 1..hi + 1)
            .into_par_iter()
            .filter(|&m| reduced_outlier(m))
            .collect();
        stray.sort_unstable();
        if let Some(&m) = stray.first() {
            return Err(Error::BandCheckFailed(m));
        }
        classification.verified_band = Some(hi);
    }
    Ok(classification)
}

/// Certify that m > M with v_q(m) <= 1 everywhere is the norm of an integer,
/// constructing b by Chinese remaindering instead of searching:
/// at odd q not dividing m, pick b with b^2 - 4m a non-residue mod q;
/// at q dividing m, pick b = 0 mod q so the discriminant has odd valuation;
/// at q = 2, pick the parity of b that lands the discriminant off the
/// 2-adic squares. The representative with b <= C/2 keeps b^2 < 4m.
pub fn certify_not_outlier_large(
    m: u64,
    algebra: &QuaternionAlgebra,
) -> Result<NormWitness, Error> {
    require_decidable(m, algebra)?;
    if let Some(root) = is_perfect_square(m) {
        return Ok(NormWitness::RationalSquare { m, root });
    }
    let (c, m_bound) = bounds(algebra)?;
    let (_, exponents) = reduce_by_ramified_squares(m, algebra);
    if !exponents.is_empty() || m <= m_bound {
        return Err(Error::BoundPrecondition);
    }
    let mut residues: Vec<(i64, u64)> = Vec::new();
    for &q in algebra.finite_ramified() {
        if q == 2 {
            residues.push((if m % 2 == 0 { 0 } else { 1 }, 2));
        } else if m % q == 0 {
            residues.push((0, q));
        } else {
            let b_q = (0..q)
                .find(|&b| {
                    let d = (b as i128 * b as i128 - 4 * m as i128).rem_euclid(q as i128);
                    kronecker(d as i64, q as i64) == -1
                })
                .expect("a non-residue discriminant exists mod every odd prime");
            residues.push((b_q as i64, q));
        }
    }
    let b0 = crt(&residues)?;
    let b = b0.min(c - b0);
    let d = (b * b) as i64 - (4 * m) as i64;
    let mut local_certs = Vec::new();
    for &q in algebra.finite_ramified() {
        let (sq, cert) = is_square_in_qp(q, d);
        if sq {
            // construction failed; fall back to the exhaustive search
            return match find_witness(m, algebra)? {
                Some(w) => Ok(NormWitness::Quadratic(w)),
                None => Err(Error::BandCheckFailed(m)),
            };
        }
        local_certs.push(cert);
    }
    let (_, real_cert) = real_square_certificate(d);
    Ok(NormWitness::Quadratic(QuadraticWitness {
        m,
        b,
        d,
        local_certs,
        real_cert,
    }))
}

/// Verdict of [`is_norm_of_integer`] for A_p, phrased in the language of
/// endomorphisms of supersingular elliptic curves in characteristic p.
#[derive(Debug, Clone)]
pub struct SupersingularReport {
    pub m: u64,
    pub p: u64,
    pub outlier: bool,
    pub witness: Option<NormWitness>,
    pub text: String,
}

pub(crate) fn witness_polynomial(b: u64, m: u64) -> String {
    match b {
        0 => format!("t^2 + {m}"),
        1 => format!("t^2 + t + {m}"),
        _ => format!("t^2 + {b}t + {m}"),
    }
}

/// Endomorphism rings of supersingular curves over the algebraic closure of
/// GF(p) are exactly the maximal orders of A_p, and the degree of an
/// endomorphism is the reduced norm of the corresponding element. So m is an
/// outlier for A_p iff no such curve has an endomorphism of degree m.
pub fn supersingular_report(m: u64, p: u64) -> Result<SupersingularReport, Error> {
    let algebra = QuaternionAlgebra::a_r(p)?;
    let (norm, witness) = is_norm_of_integer(m, &algebra)?;
    let text = match &witness {
        None => format!(
            "no supersingular elliptic curve over the algebraic closure of GF({p}) \
             has an endomorphism of degree {m}"
        ),
        Some(NormWitness::RationalSquare { root, .. }) => format!(
            "every supersingular elliptic curve over the algebraic closure of GF({p}) \
             has an endomorphism of degree {m}: multiplication by {root}"
        ),
        Some(NormWitness::Quadratic(w)) => format!(
            "some supersingular elliptic curve over the algebraic closure of GF({p}) \
             has an endomorphism of degree {m}, with characteristic polynomial {}",
            witness_polynomial(w.b, w.m)
        ),
    };
    Ok(SupersingularReport {
        m,
        p,
        outlier: !norm,
        witness,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_r(r: u64) -> QuaternionAlgebra {
        QuaternionAlgebra::a_r(r).unwrap()
    }

    fn algebra_b() -> QuaternionAlgebra {
        QuaternionAlgebra::from_symbol(-58, -17).unwrap()
    }

    #[test]
    fn witness_search_examples() {
        assert_eq!(find_witness(3, &a_r(67)).unwrap(), None);

        // t^2 + 10 is Eisenstein at 2 and -40 is a non-residue mod 17 and 29
        let w = find_witness(10, &algebra_b()).unwrap().unwrap();
        assert_eq!((w.b, w.d), (0, -40));
        assert!(w.verify(&algebra_b()));

        let w = find_witness(201, &a_r(67)).unwrap().unwrap();
        assert_eq!(w.b, 0);
        assert_eq!(w.d, -804);
        assert!(w.verify(&a_r(67)));

        assert!(matches!(
            find_witness(9, &a_r(67)),
            Err(Error::SquareShortcut(9))
        ));
        let indefinite = QuaternionAlgebra::from_ramified_primes(&[2, 3]).unwrap();
        assert!(matches!(
            find_witness(5, &indefinite),
            Err(Error::EichlerHolds)
        ));
    }

    #[test]
    fn norm_examples() {
        let (norm, w) = is_norm_of_integer(12, &a_r(67)).unwrap();
        assert!(norm);
        assert!(w.unwrap().verify(&a_r(67)));

        let (norm, w) = is_norm_of_integer(9, &algebra_b()).unwrap();
        assert!(norm);
        assert_eq!(w, Some(NormWitness::RationalSquare { m: 9, root: 3 }));

        let (norm, w) = is_norm_of_integer(2, &a_r(113)).unwrap();
        assert!(!norm);
        assert!(w.is_none());

        assert!(matches!(
            is_norm_of_integer(0, &a_r(67)),
            Err(Error::NotPositive)
        ));
    }

    #[test]
    fn outlier_examples() {
        let a67 = a_r(67);
        assert!(is_outlier(3, &a67).unwrap());
        assert!(is_outlier(3 * 67 * 67, &a67).unwrap());
        assert!(!is_outlier(3 * 67, &a67).unwrap());
        assert!(!is_outlier(12, &a67).unwrap());
    }

    #[test]
    fn reduction_examples() {
        let a67 = a_r(67);
        let (m0, e) = reduce_by_ramified_squares(3 * 67u64.pow(4), &a67);
        assert_eq!(m0, 3);
        assert_eq!(e, BTreeMap::from([(67, 2)]));

        let (m0, e) = reduce_by_ramified_squares(40, &algebra_b());
        assert_eq!(m0, 10);
        assert_eq!(e, BTreeMap::from([(2, 1)]));

        let (m0, e) = reduce_by_ramified_squares(12, &a67);
        assert_eq!(m0, 12);
        assert!(e.is_empty());
    }

    #[test]
    fn enumerate_a67() {
        let cls = enumerate_base_outliers(&a_r(67)).unwrap();
        assert_eq!(cls.c, 67);
        assert_eq!(cls.m_bound, 280);
        assert_eq!(cls.base_outliers, vec![3]);
        assert_eq!(cls.gate, GateVerdict::PossiblyHasOutliers);
        assert!(cls.closure_contains(3 * 67 * 67));
        assert!(!cls.closure_contains(3 * 67));
        assert!(!cls.closure_contains(12));
    }

    #[test]
    fn enumerate_a2_empty() {
        let cls = enumerate_base_outliers(&a_r(2)).unwrap();
        assert_eq!(cls.m_bound, 0);
        assert!(cls.base_outliers.is_empty());
        // cross-check by direct decision
        for m in 1..=100 {
            assert!(!is_outlier(m, &a_r(2)).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn enumerate_indefinite_gate() {
        let indefinite = QuaternionAlgebra::from_ramified_primes(&[2, 3]).unwrap();
        let cls = enumerate_base_outliers(&indefinite).unwrap();
        assert!(matches!(cls.gate, GateVerdict::NoOutliers(_)));
        assert!(cls.base_outliers.is_empty());
    }

    #[test]
    fn band_verification() {
        let cls = enumerate_with_band(&a_r(11), Some(4)).unwrap();
        assert_eq!(cls.m_bound, 7);
        assert_eq!(cls.verified_band, Some(28));
    }

    #[test]
    fn large_certificate_examples() {
        let a67 = a_r(67);
        let w = certify_not_outlier_large(300, &a67).unwrap();
        match &w {
            NormWitness::Quadratic(q) => {
                assert!(q.b < 34);
                assert_eq!(kronecker(q.d, 67), -1);
            }
            _ => panic!("expected quadratic witness"),
        }
        assert!(w.verify(&a67));

        // 610 = 10 * 61 is below M for B, so the precondition fails
        assert!(matches!(
            certify_not_outlier_large(610, &algebra_b()),
            Err(Error::BoundPrecondition)
        ));
    }

    #[test]
    fn large_certificate_sweep() {
        // every reduced m above the bound gets a verifying witness
        for r in [3u64, 11, 67] {
            let alg = a_r(r);
            let m_bound = r * r / 16;
            for m in m_bound + 1..=m_bound + 120 {
                if m % (r * r) == 0 {
                    continue;
                }
                let w = certify_not_outlier_large(m, &alg).unwrap();
                assert!(w.verify(&alg), "r = {r}, m = {m}");
            }
        }
        let b = algebra_b();
        for m in 60_763u64..60_800 {
            if [4u64, 289, 841].iter().any(|&qq| m % qq == 0) {
                continue;
            }
            let w = certify_not_outlier_large(m, &b).unwrap();
            assert!(w.verify(&b), "m = {m}");
        }
    }

    #[test]
    fn certificate_agrees_with_search() {
        let alg = a_r(23);
        let m_bound = 23 * 23 / 16;
        for m in m_bound + 1..=m_bound + 200 {
            if m % (23 * 23) == 0 || is_perfect_square(m).is_some() {
                continue;
            }
            let constructed = certify_not_outlier_large(m, &alg).unwrap();
            let searched = find_witness(m, &alg).unwrap();
            assert!(searched.is_some(), "m = {m}");
            assert!(constructed.verify(&alg), "m = {m}");
        }
    }

    #[test]
    fn supersingular_text() {
        let rep = supersingular_report(3, 67).unwrap();
        assert!(rep.outlier);
        assert_eq!(
            rep.text,
            "no supersingular elliptic curve over the algebraic closure of GF(67) \
             has an endomorphism of degree 3"
        );

        let rep = supersingular_report(4, 67).unwrap();
        assert!(!rep.outlier);
        assert!(rep.text.contains("multiplication by 2"));

        let rep = supersingular_report(2, 113).unwrap();
        assert!(rep.outlier);
    }
}
