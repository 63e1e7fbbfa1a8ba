//! Exact Dirichlet densities of prime sets cut out by quadratic conditions.
//!
//! Conditions are boolean combinations of atoms "(d|r) = ±1" over the
//! unknown prime r. Each atom depends on d only through its square class,
//! and independent square classes have independent, equidistributed signs
//! over primes. So the density of a condition is exactly the fraction of
//! sign assignments to a GF(2) basis of the involved classes that satisfy
//! it, a dyadic rational.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::arith::{isqrt, is_perfect_square, kronecker, primes_up_to, SquareClass};
use crate::error::Error;

/// Enumerating sign assignments is capped at this rank.
const RANK_CAP: u32 = 24;

/// A boolean condition on an unknown odd prime r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionExpr {
    True,
    False,
    /// The Kronecker symbol of the class representative at r equals target.
    Sym { class: SquareClass, target: i8 },
    Not(Box<ConditionExpr>),
    And(Box<ConditionExpr>, Box<ConditionExpr>),
    Or(Box<ConditionExpr>, Box<ConditionExpr>),
}

impl ConditionExpr {
    /// Atom "(d|r) = target"; d is canonicalized to its square class.
    pub fn sym(d: i64, target: i8) -> Result<ConditionExpr, Error> {
        assert!(target == 1 || target == -1);
        Ok(ConditionExpr::Sym {
            class: SquareClass::from_integer(d)?,
            target,
        })
    }

    pub fn and(self, other: ConditionExpr) -> ConditionExpr {
        ConditionExpr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: ConditionExpr) -> ConditionExpr {
        ConditionExpr::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> ConditionExpr {
        ConditionExpr::Not(Box::new(self))
    }

    /// Distinct square classes in first-occurrence order.
    pub fn classes(&self) -> Vec<SquareClass> {
        let mut out = Vec::new();
        self.collect_classes(&mut out);
        out
    }

    fn collect_classes(&self, out: &mut Vec<SquareClass>) {
        match self {
            ConditionExpr::True | ConditionExpr::False => {}
            ConditionExpr::Sym { class, .. } => {
                if !out.contains(class) {
                    out.push(class.clone());
                }
            }
            ConditionExpr::Not(e) => e.collect_classes(out),
            ConditionExpr::And(a, b) | ConditionExpr::Or(a, b) => {
                a.collect_classes(out);
                b.collect_classes(out);
            }
        }
    }

    /// Evaluate at a concrete odd prime via Kronecker symbols.
    pub fn eval_at_prime(&self, r: u64) -> bool {
        match self {
            ConditionExpr::True => true,
            ConditionExpr::False => false,
            ConditionExpr::Sym { class, target } => {
                kronecker(class.representative(), r as i64) == *target as i32
            }
            ConditionExpr::Not(e) => !e.eval_at_prime(r),
            ConditionExpr::And(a, b) => a.eval_at_prime(r) && b.eval_at_prime(r),
            ConditionExpr::Or(a, b) => a.eval_at_prime(r) || b.eval_at_prime(r),
        }
    }
}

/// Square classes of the discriminants b^2 - 4m over the witness range
/// 0 <= b <= floor(2 sqrt(m)), deduplicated in first-occurrence order.
pub fn discriminant_classes(m: u64) -> Result<Vec<SquareClass>, Error> {
    if is_perfect_square(m).is_some() {
        return Err(Error::SquareShortcut(m));
    }
    if m > (1 << 61) - 1 {
        return Err(Error::InputTooLarge);
    }
    let mut out = Vec::new();
    for b in 0..=isqrt(4 * m) {
        let d = (b * b) as i64 - (4 * m) as i64;
        let class = SquareClass::from_integer(d)?;
        if !out.contains(&class) {
            out.push(class);
        }
    }
    Ok(out)
}

/// The condition "m is an outlier for A_r": every witness discriminant must
/// be an r-adic square, i.e. every discriminant class has symbol +1 at r.
pub fn outlier_condition(m: u64) -> Result<ConditionExpr, Error> {
    let mut expr: Option<ConditionExpr> = None;
    for class in discriminant_classes(m)? {
        let atom = ConditionExpr::Sym { class, target: 1 };
        expr = Some(match expr {
            None => atom,
            Some(e) => e.and(atom),
        });
    }
    Ok(expr.unwrap_or(ConditionExpr::True))
}

/// Exact density as satisfying_count / 2^rank, with the basis used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityResult {
    pub satisfying: u64,
    pub rank: u32,
    pub basis: Vec<SquareClass>,
}

impl DensityResult {
    /// The density as a reduced fraction.
    pub fn density(&self) -> (u64, u64) {
        if self.satisfying == 0 {
            return (0, 1);
        }
        let mut num = self.satisfying;
        let mut den = 1u64 << self.rank;
        while num % 2 == 0 && den % 2 == 0 {
            num /= 2;
            den /= 2;
        }
        (num, den)
    }

    pub fn as_f64(&self) -> f64 {
        self.satisfying as f64 / (1u64 << self.rank) as f64
    }
}

/// Incremental reduced row echelon form over GF(2), with square classes as
/// vectors (sign bit plus one bit per prime) and products as XOR. Tracks,
/// for every inserted class, its expression as a product of the independent
/// generators chosen so far.
struct ClassSpan {
    rows: Vec<(SquareClass, u32)>,
    generators: Vec<SquareClass>,
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Coord {
    Sign,
    Prime(u64),
}

fn pivot(class: &SquareClass) -> Option<Coord> {
    match class.primes().last() {
        Some(&p) => Some(Coord::Prime(p)),
        None if class.is_negative() => Some(Coord::Sign),
        None => None,
    }
}

fn has_coord(class: &SquareClass, coord: Coord) -> bool {
    match coord {
        Coord::Sign => class.is_negative(),
        Coord::Prime(p) => class.primes().contains(&p),
    }
}

impl ClassSpan {
    fn new() -> ClassSpan {
        ClassSpan {
            rows: Vec::new(),
            generators: Vec::new(),
        }
    }

    fn rank(&self) -> u32 {
        self.generators.len() as u32
    }

    /// Insert a class; returns its generator mask (bit k set means the
    /// product includes generator k).
    fn insert(&mut self, class: &SquareClass) -> u32 {
        let mut cur = class.clone();
        let mut mask = 0u32;
        for (row, row_mask) in &self.rows {
            let pv = pivot(row).expect("rows are nonzero");
            if has_coord(&cur, pv) {
                cur = cur.product(row);
                mask ^= row_mask;
            }
        }
        if cur.is_trivial() {
            return mask;
        }
        let k = self.generators.len() as u32;
        assert!(k < 32, "rank cap enforced by caller");
        self.generators.push(class.clone());
        let row_mask = mask | (1 << k);
        let pv = pivot(&cur).expect("nontrivial");
        for (row, row_mask_old) in &mut self.rows {
            if has_coord(row, pv) {
                *row = row.product(&cur);
                *row_mask_old ^= row_mask;
            }
        }
        self.rows.push((cur, row_mask));
        1 << k
    }
}

/// Exact Dirichlet density of the set of odd primes satisfying the
/// condition, excluding the finitely many primes dividing an atom.
///
/// The involved square classes are reduced to a GF(2) basis; every
/// assignment of signs to the basis is enumerated and dependent classes
/// evaluate as products.
pub fn exact_density(expr: &ConditionExpr) -> Result<DensityResult, Error> {
    let classes = expr.classes();
    let mut span = ClassSpan::new();
    let mut masks: HashMap<SquareClass, u32> = HashMap::with_capacity(classes.len());
    for class in &classes {
        if span.rank() > RANK_CAP {
            return Err(Error::RankTooLarge(span.rank()));
        }
        let mask = span.insert(class);
        masks.insert(class.clone(), mask);
    }
    let rank = span.rank();
    if rank > RANK_CAP {
        return Err(Error::RankTooLarge(rank));
    }
    let mut satisfying = 0u64;
    for sigma in 0u32..(1u32 << rank) {
        if eval_assignment(expr, &masks, sigma) {
            satisfying += 1;
        }
    }
    Ok(DensityResult {
        satisfying,
        rank,
        basis: span.generators,
    })
}

fn eval_assignment(expr: &ConditionExpr, masks: &HashMap<SquareClass, u32>, sigma: u32) -> bool {
    match expr {
        ConditionExpr::True => true,
        ConditionExpr::False => false,
        ConditionExpr::Sym { class, target } => {
            // generator k has sign -1 when bit k of sigma is set
            let negatives = (masks[class] & sigma).count_ones();
            let value: i8 = if negatives % 2 == 0 { 1 } else { -1 };
            value == *target
        }
        ConditionExpr::Not(e) => !eval_assignment(e, masks, sigma),
        ConditionExpr::And(a, b) => {
            eval_assignment(a, masks, sigma) && eval_assignment(b, masks, sigma)
        }
        ConditionExpr::Or(a, b) => {
            eval_assignment(a, masks, sigma) || eval_assignment(b, masks, sigma)
        }
    }
}

/// Density of primes r for which m is an outlier for A_r. Positive density
/// means infinitely many such primes.
pub fn density_for_outlier(m: u64) -> Result<DensityResult, Error> {
    exact_density(&outlier_condition(m)?)
}

/// Empirical counterpart of [`exact_density`]: evaluate the condition at
/// every odd prime up to the bound, skipping primes that divide an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalDensity {
    pub satisfied: u64,
    pub sample: u64,
    pub excluded: u64,
}

impl EmpiricalDensity {
    pub fn fraction(&self) -> f64 {
        if self.sample == 0 {
            0.0
        } else {
            self.satisfied as f64 / self.sample as f64
        }
    }
}

pub fn empirical_density(expr: &ConditionExpr, prime_bound: u64) -> EmpiricalDensity {
    let classes = expr.classes();
    let is_excluded = |r: u64| classes.iter().any(|c| c.primes().contains(&r));
    let (satisfied, sample, excluded) = primes_up_to(prime_bound)
        .par_iter()
        .filter(|&&r| r > 2)
        .map(|&r| {
            if is_excluded(r) {
                (0u64, 0u64, 1u64)
            } else if expr.eval_at_prime(r) {
                (1, 1, 0)
            } else {
                (0, 1, 0)
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    EmpiricalDensity {
        satisfied,
        sample,
        excluded,
    }
}

/// Parse the condition grammar:
///
/// ```text
/// expr := and ('|' and)*          -- '&' binds tighter than '|'
/// and  := unary ('&' unary)*
/// unary := '!' unary | '(' expr ')' | atom
/// atom := 'sym(' int ')=' ('1' | '-1') | 'outlier(' int ')'
/// ```
///
/// `outlier(m)` expands to the conjunction of its discriminant conditions.
pub fn parse_condition(text: &str) -> Result<ConditionExpr, Error> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ConditionExpr, Error> {
        let mut lhs = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<ConditionExpr, Error> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ConditionExpr, Error> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.bytes[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64, Error> {
        self.skip_ws();
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                self.pos = start;
                self.err("expected an integer")
            })
    }

    fn atom(&mut self) -> Result<ConditionExpr, Error> {
        if self.keyword("sym") {
            self.expect(b'(')?;
            let at = self.pos;
            let d = self.int()?;
            if d == 0 {
                self.pos = at;
                return Err(self.err("zero has no square class"));
            }
            self.expect(b')')?;
            self.expect(b'=')?;
            let target = self.int()?;
            if target != 1 && target != -1 {
                return Err(self.err("target must be 1 or -1"));
            }
            ConditionExpr::sym(d, target as i8)
        } else if self.keyword("outlier") {
            self.expect(b'(')?;
            let at = self.pos;
            let m = self.int()?;
            if m <= 0 {
                self.pos = at;
                return Err(self.err("outlier argument must be positive"));
            }
            self.expect(b')')?;
            outlier_condition(m as u64).map_err(|e| match e {
                Error::SquareShortcut(m) => Error::Parse {
                    pos: at,
                    msg: format!("{m} is a perfect square and never an outlier"),
                },
                other => other,
            })
        } else {
            Err(self.err("expected `sym(...)`, `outlier(...)`, `!`, or `(`"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reps(classes: &[SquareClass]) -> Vec<i64> {
        classes.iter().map(|c| c.representative()).collect()
    }

    #[test]
    fn discriminant_class_examples() {
        assert_eq!(reps(&discriminant_classes(2).unwrap()), vec![-2, -7, -1]);
        assert_eq!(reps(&discriminant_classes(3).unwrap()), vec![-3, -11, -2]);
        assert_eq!(
            reps(&discriminant_classes(6).unwrap()),
            vec![-6, -23, -5, -15, -2]
        );
        assert!(matches!(
            discriminant_classes(4),
            Err(Error::SquareShortcut(4))
        ));
    }

    #[test]
    fn outlier_condition_shape() {
        let cond = outlier_condition(2).unwrap();
        assert_eq!(cond.classes().len(), 3);
        let cond = outlier_condition(6).unwrap();
        assert_eq!(cond.classes().len(), 5);
    }

    #[test]
    fn landmark_densities() {
        for (m, expected) in [(2u64, (1u64, 8u64)), (3, (1, 8)), (6, (1, 16))] {
            let d = density_for_outlier(m).unwrap();
            assert_eq!(d.density(), expected, "m = {m}");
        }
    }

    #[test]
    fn compound_density() {
        let text = "sym(-2)=1 & sym(-3)=1 & sym(-5)=1 & sym(-23)=1 \
                    & (sym(-1)=-1 | (sym(-1)=1 & sym(11)=-1 & sym(7)=-1))";
        let expr = parse_condition(text).unwrap();
        let d = exact_density(&expr).unwrap();
        assert_eq!(d.rank, 7);
        assert_eq!(d.satisfying, 5);
        assert_eq!(d.density(), (5, 128));
    }

    #[test]
    fn compound_direct_form_agrees() {
        // negating the outlier conditions directly gives the same density
        // as the simplified symbol form
        let direct = parse_condition("!outlier(2) & !outlier(3) & outlier(6)").unwrap();
        let d = exact_density(&direct).unwrap();
        assert_eq!(d.rank, 7);
        assert_eq!(d.density(), (5, 128));
    }

    #[test]
    fn density_for_5() {
        // kernels of {-20, -19, -16, -11, -4}: rank found by elimination
        let classes = discriminant_classes(5).unwrap();
        assert_eq!(reps(&classes), vec![-5, -19, -1, -11]);
        let d = density_for_outlier(5).unwrap();
        assert_eq!(d.rank, 4);
        assert_eq!(d.density(), (1, 16));
    }

    #[test]
    fn all_positive_conjunctions_hit_once() {
        for m in 2u64..=50 {
            if is_perfect_square(m).is_some() {
                continue;
            }
            let d = density_for_outlier(m).unwrap();
            assert_eq!(d.satisfying, 1, "m = {m}");
        }
    }

    #[test]
    fn complement_and_monotonicity() {
        let exprs = [
            parse_condition("outlier(2)").unwrap(),
            parse_condition("sym(-1)=1 | sym(3)=-1").unwrap(),
            parse_condition("!(sym(5)=1 & sym(-6)=1) | outlier(3)").unwrap(),
            parse_condition("sym(2)=1 & sym(3)=1 & sym(6)=-1").unwrap(), // unsatisfiable
        ];
        for e in &exprs {
            let d = exact_density(e).unwrap();
            let dn = exact_density(&e.clone().not()).unwrap();
            assert_eq!(d.rank, dn.rank);
            assert_eq!(d.satisfying + dn.satisfying, 1 << d.rank);
            for other in &exprs {
                let both = exact_density(&e.clone().and(other.clone())).unwrap();
                assert!(both.as_f64() <= d.as_f64() + 1e-12);
            }
        }
        assert_eq!(exact_density(&exprs[3]).unwrap().satisfying, 0);
        assert_eq!(exact_density(&ConditionExpr::True).unwrap().density(), (1, 1));
    }

    #[test]
    fn parser_roundtrip_and_errors() {
        let e = parse_condition("!outlier(2) & !outlier(3) & outlier(6)").unwrap();
        assert!(matches!(e, ConditionExpr::And(_, _)));

        let err = parse_condition("sym(0)=1").unwrap_err();
        match err {
            Error::Parse { pos, msg } => {
                assert_eq!(pos, 4);
                assert!(msg.contains("square class"));
            }
            other => panic!("unexpected {other:?}"),
        }

        assert!(parse_condition("outlier(9)").is_err());
        assert!(parse_condition("sym(3)=2").is_err());
        assert!(parse_condition("sym(3)=1 garbage").is_err());
        assert!(parse_condition("(sym(3)=1").is_err());
        assert!(parse_condition("").is_err());
    }

    #[test]
    fn parse_respects_precedence() {
        // a | b & c parses as a | (b & c)
        let e = parse_condition("sym(-1)=1 | sym(2)=1 & sym(3)=1").unwrap();
        match e {
            ConditionExpr::Or(_, rhs) => assert!(matches!(*rhs, ConditionExpr::And(_, _))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empirical_matches_exact() {
        for m in [2u64, 3, 5, 6, 7, 10] {
            let cond = outlier_condition(m).unwrap();
            let exact = exact_density(&cond).unwrap().as_f64();
            let emp = empirical_density(&cond, 100_000);
            assert!(
                (emp.fraction() - exact).abs() <= 0.01,
                "m = {m}: {} vs {exact}",
                emp.fraction()
            );
        }
        let all = empirical_density(&ConditionExpr::True, 1_000);
        assert_eq!(all.fraction(), 1.0);
    }

    #[test]
    fn excluded_primes_are_counted() {
        let cond = outlier_condition(6).unwrap();
        let emp = empirical_density(&cond, 100);
        // classes carry {2,3}, {23}, {5}, {3,5}, {2}: odd excluded are 3, 5, 23
        assert_eq!(emp.excluded, 3);
    }

    #[test]
    fn rank_cap() {
        let mut expr = ConditionExpr::True;
        let mut p = 3u64;
        let mut count = 0;
        while count < 26 {
            if crate::arith::is_prime(p) {
                expr = expr.and(ConditionExpr::sym(p as i64, 1).unwrap());
                count += 1;
            }
            p += 2;
        }
        assert!(matches!(exact_density(&expr), Err(Error::RankTooLarge(_))));
    }

    #[test]
    fn engine_consistency() {
        use crate::algebra::QuaternionAlgebra;
        use crate::outliers::is_outlier;
        // the symbol condition and the direct search agree at good primes
        for m in 2u64..=20 {
            if is_perfect_square(m).is_some() {
                continue;
            }
            let cond = outlier_condition(m).unwrap();
            let mut bad: Vec<u64> = vec![2];
            bad.extend(crate::arith::factorize(m).factors.iter().map(|&(p, _)| p));
            for b in 0..=isqrt(4 * m) {
                let d = (b * b) as i64 - (4 * m) as i64;
                bad.extend(crate::arith::factorize(d.unsigned_abs()).factors.iter().map(|&(p, _)| p));
            }
            for r in primes_up_to(10_000) {
                if bad.contains(&r) {
                    continue;
                }
                let alg = QuaternionAlgebra::a_r(r).unwrap();
                assert_eq!(
                    cond.eval_at_prime(r),
                    is_outlier(m, &alg).unwrap(),
                    "m = {m}, r = {r}"
                );
            }
        }
    }
}
