//! Decide whether single integers are norms of integral elements, and show
//! the checkable witnesses.
//!
//! ```bash
//! cargo run --example check_norm
//! ```

use quatnorm::algebra::QuaternionAlgebra;
use quatnorm::outliers::{is_norm_of_integer, NormWitness};

fn main() {
    let a67 = QuaternionAlgebra::a_r(67).unwrap();
    println!("algebra {a67}");
    for m in [1u64, 2, 3, 9, 12, 3 * 67, 3 * 67 * 67] {
        let (norm, witness) = is_norm_of_integer(m, &a67).unwrap();
        match witness {
            Some(NormWitness::RationalSquare { root, .. }) => {
                println!("  m = {m:6}: norm of the rational integer {root}");
            }
            Some(NormWitness::Quadratic(w)) => {
                println!("  m = {m:6}: norm of a root of t^2 + {}t + {m}  (d = {})", w.b, w.d);
            }
            None => {
                assert!(!norm);
                println!("  m = {m:6}: outlier (no b in [0, 2*sqrt(m)] works)");
            }
        }
    }

    // a witness pins down why each ramified place rejects the discriminant
    let b = QuaternionAlgebra::from_symbol(-58, -17).unwrap();
    println!("\nalgebra {b}");
    let (_, witness) = is_norm_of_integer(10, &b).unwrap();
    if let Some(NormWitness::Quadratic(w)) = witness {
        println!("  m = 10: witness b = {}, d = {}", w.b, w.d);
        for cert in &w.local_certs {
            println!(
                "    at {}: v = {}, square = {} ({:?})",
                cert.place, cert.valuation, cert.is_square, cert.reason
            );
        }
    }
}
