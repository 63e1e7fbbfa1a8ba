//! Hilbert symbols and ramification: build algebras from symbols (a,b),
//! read off where they ramify, and apply the gate that rules outliers out.
//!
//! ```bash
//! cargo run --example hilbert_symbols
//! ```

use quatnorm::algebra::{
    eichler_gate, hilbert_symbol, local_divides, GateVerdict, QuaternionAlgebra,
};
use quatnorm::arith::factorize;
use quatnorm::padic::Place;

fn main() {
    for (a, b) in [(-1i64, -1i64), (-1, -67), (-58, -17), (2, 3), (-1, 3)] {
        match QuaternionAlgebra::from_symbol(a, b) {
            Ok(alg) => {
                let gate = eichler_gate(&alg.profile()).unwrap();
                println!(
                    "({a},{b}): {alg}  definite = {}, gate = {gate:?}",
                    alg.is_definite()
                );
            }
            Err(e) => println!("({a},{b}): {e}"),
        }
    }

    // the symbols at the places dividing 2ab multiply to +1 overall
    let (a, b) = (-58i64, -17i64);
    println!("\nlocal symbols of ({a},{b}):");
    let mut prod = hilbert_symbol(a, b, Place::Real);
    println!("  real: {prod:+}");
    let mut primes: Vec<u64> = vec![2];
    for x in [a, b] {
        primes.extend(factorize(x.unsigned_abs()).factors.iter().map(|&(p, _)| p));
    }
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let s = hilbert_symbol(a, b, Place::Finite(p));
        println!("  {p}: {s:+}");
        prod *= s;
    }
    println!("  product: {prod:+}");

    // local degrees of A_2 divide those of (-58,-17), so outliers transfer
    let a2 = QuaternionAlgebra::a_r(2).unwrap();
    let big = QuaternionAlgebra::from_symbol(-58, -17).unwrap();
    println!(
        "\nA_2 local degrees divide those of (-58,-17): {}",
        local_divides(&a2.profile(), &big.profile()).unwrap()
    );
    assert_eq!(
        eichler_gate(&a2.profile()).unwrap(),
        GateVerdict::PossiblyHasOutliers
    );
}
