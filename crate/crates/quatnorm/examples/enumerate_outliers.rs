//! Enumerate the complete outlier set of definite algebras: scan up to the
//! effective bound M = C^2/16, then close under squares of ramified primes.
//!
//! ```bash
//! cargo run --release --example enumerate_outliers
//! ```

use quatnorm::algebra::QuaternionAlgebra;
use quatnorm::outliers::{enumerate_base_outliers, enumerate_with_band};

fn main() {
    for r in [2u64, 3, 11, 67, 113] {
        let alg = QuaternionAlgebra::a_r(r).unwrap();
        let cls = enumerate_base_outliers(&alg).unwrap();
        println!(
            "A_{r:<3}  M = {:>5}  base = {:?}",
            cls.m_bound, cls.base_outliers
        );
    }

    // a composite ramified set; the base can be large
    let b = QuaternionAlgebra::from_symbol(-58, -17).unwrap();
    let cls = enumerate_base_outliers(&b).unwrap();
    println!(
        "\n{b}: C = {}, M = {}, {} base outliers",
        cls.c,
        cls.m_bound,
        cls.base_outliers.len()
    );
    println!("  base = {:?}", cls.base_outliers);
    println!("  every outlier is {}", cls.closure_rule);
    println!("  closure contains 2*17^2 = 578: {}", cls.closure_contains(578));
    println!("  closure contains 20: {}", cls.closure_contains(20));

    // belt-and-suspenders: re-scan (M, 4M] for A_23 and find nothing new
    let a23 = QuaternionAlgebra::a_r(23).unwrap();
    let cls = enumerate_with_band(&a23, Some(4)).unwrap();
    println!(
        "\nA_23: base = {:?}, band (M, {}] clean",
        cls.base_outliers,
        cls.verified_band.unwrap()
    );
}
