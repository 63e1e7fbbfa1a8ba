//! Exact integer arithmetic: primality, factorization, square roots,
//! squarefree kernels, Kronecker symbols, and Chinese remaindering.
//!
//! Everything here is deterministic and exact for inputs below 2^63.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;

/// Witnesses making Miller-Rabin deterministic over the full u64 range.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const TRIAL_LIMIT: u64 = 1_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Deterministic primality test, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Floyd cycle detection. `n` must be odd, composite, > 1.
/// Deterministic: polynomial offsets are tried in a fixed order.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && n % 2 == 1 && !is_prime(n));
    for c in 1..n {
        let step = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = step(x);
            y = step(step(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("composite input always splits for some offset");
}

fn factor_into(n: u64, acc: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *acc.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, acc);
    factor_into(n / d, acc);
}

/// Prime factorization with factors in strictly increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Exponent of `p` in `value` (0 when `p` does not divide it).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

/// Factor `n >= 1`. Trial division below 10^6, then Pollard rho.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let value = n;
    let mut n = n;
    let mut map = BTreeMap::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p.saturating_mul(p) <= n {
        while n % p == 0 {
            *map.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if n > 1 {
        factor_into(n, &mut map);
    }
    Factorization {
        value,
        factors: map.into_iter().collect(),
    }
}

/// Exact floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let sq = |x: u64| x as u128 * x as u128;
    let mut x = (n as f64).sqrt() as u64;
    while sq(x) > n as u128 {
        x -= 1;
    }
    while sq(x + 1) <= n as u128 {
        x += 1;
    }
    x
}

/// `Some(k)` with `k * k == n`, if any.
pub fn is_perfect_square(n: u64) -> Option<u64> {
    let k = isqrt(n);
    (k * k == n).then_some(k)
}

/// Class of a nonzero rational integer in Q*/(Q*)^2: a sign together with
/// the set of primes dividing it to an odd power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<u64>,
}

impl SquareClass {
    /// The class of `n`, i.e. its squarefree kernel.
    pub fn from_integer(n: i64) -> Result<SquareClass, Error> {
        squarefree_kernel(n)
    }

    /// The trivial class (that of 1 and every positive square).
    pub fn one() -> SquareClass {
        SquareClass {
            negative: false,
            primes: Vec::new(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    /// The squarefree integer representing the class.
    pub fn representative(&self) -> i64 {
        let mut acc: i128 = if self.negative { -1 } else { 1 };
        for &p in &self.primes {
            acc *= p as i128;
        }
        i64::try_from(acc).expect("square-class representative overflows i64")
    }

    /// Product in Q*/(Q*)^2: signs multiply, prime sets take symmetric difference.
    pub fn product(&self, other: &SquareClass) -> SquareClass {
        let mut primes = Vec::with_capacity(self.primes.len() + other.primes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.primes.len() && j < other.primes.len() {
            match self.primes[i].cmp(&other.primes[j]) {
                std::cmp::Ordering::Less => {
                    primes.push(self.primes[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    primes.push(other.primes[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        primes.extend_from_slice(&self.primes[i..]);
        primes.extend_from_slice(&other.primes[j..]);
        SquareClass {
            negative: self.negative ^ other.negative,
            primes,
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// Squarefree kernel of a nonzero integer as a [`SquareClass`].
pub fn squarefree_kernel(n: i64) -> Result<SquareClass, Error> {
    if n == 0 {
        return Err(Error::ZeroSquareClass);
    }
    let f = factorize(n.unsigned_abs());
    Ok(SquareClass {
        negative: n < 0,
        primes: f
            .factors
            .iter()
            .filter(|&&(_, e)| e % 2 == 1)
            .map(|&(p, _)| p)
            .collect(),
    })
}

/// Kronecker symbol (a|n), the extension of the Jacobi symbol to all n.
///
/// Equals the Legendre symbol when n is an odd prime not dividing a, is
/// multiplicative in both arguments, and vanishes exactly when gcd(a,n) > 1.
/// Undefined at (0,0).
pub fn kronecker(a: i64, n: i64) -> i32 {
    assert!(a != 0 || n != 0, "kronecker(0, 0) is undefined");
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut n = n;
    let mut k = 1i32;
    // factors of 2 in n each contribute (a|2), which depends on a mod 8
    let v = n.trailing_zeros();
    n >>= v;
    if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
        k = -k;
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    // n odd positive from here; Jacobi loop with reciprocity
    a = a.rem_euclid(n);
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 && matches!(n % 8, 3 | 5) {
            k = -k;
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        let t = a;
        a = n % t;
        n = t;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Chinese remainder: the unique value in [0, prod of moduli) congruent to
/// every listed remainder. Moduli must be pairwise coprime with product < 2^63.
pub fn crt(residues: &[(i64, u64)]) -> Result<u64, Error> {
    let mut x: i128 = 0;
    let mut l: i128 = 1;
    for &(r, m) in residues {
        if m == 0 {
            return Err(Error::NonCoprimeModuli);
        }
        let m = m as i128;
        let (g, inv, _) = ext_gcd(l % m, m);
        if g != 1 {
            return Err(Error::NonCoprimeModuli);
        }
        let lm = l.checked_mul(m).ok_or(Error::InputTooLarge)?;
        if lm > i64::MAX as i128 {
            return Err(Error::InputTooLarge);
        }
        let t = ((r as i128 - x).rem_euclid(m) * inv.rem_euclid(m)).rem_euclid(m);
        x += l * t;
        l = lm;
    }
    Ok(x as u64)
}

/// All primes up to and including `n`, by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}
