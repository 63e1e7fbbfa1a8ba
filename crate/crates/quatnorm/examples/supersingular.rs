//! Endomorphism degrees of supersingular elliptic curves: an integer m is a
//! degree of some endomorphism in characteristic p exactly when m is the
//! norm of an integral element of A_p.
//!
//! ```bash
//! cargo run --example supersingular
//! ```

use quatnorm::outliers::supersingular_report;

fn main() {
    for (m, p) in [(3u64, 67u64), (4, 67), (12, 67), (2, 113), (2, 109), (10, 7)] {
        let rep = supersingular_report(m, p).unwrap();
        println!("m = {m:>2}, p = {p:>3}: {}", rep.text);
    }
}
