//! Empirical prime scans against exact predictions: Chebotarev convergence
//! for fixed m, and the fraction of small r for which A_r has no outliers.
//!
//! ```bash
//! cargo run --release --example prime_scan
//! ```

use quatnorm::algebra::QuaternionAlgebra;
use quatnorm::density::{density_for_outlier, empirical_density, outlier_condition};
use quatnorm::outliers::enumerate_base_outliers;

fn main() {
    println!("fixed m, primes up to 100000:");
    for m in [2u64, 3, 6] {
        let cond = outlier_condition(m).unwrap();
        let emp = empirical_density(&cond, 100_000);
        let exact = density_for_outlier(m).unwrap();
        let (num, den) = exact.density();
        println!(
            "  m = {m}: outlier at {} of {} primes = {:.5}  (exact {num}/{den} = {:.5}, {} excluded)",
            emp.satisfied,
            emp.sample,
            emp.fraction(),
            exact.as_f64(),
            emp.excluded
        );
    }

    println!("\nbase sets of A_r for r up to 100:");
    let primes: Vec<u64> = quatnorm::arith::primes_up_to(100);
    let mut empty = 0;
    for &r in &primes {
        let cls = enumerate_base_outliers(&QuaternionAlgebra::a_r(r).unwrap()).unwrap();
        if cls.base_outliers.is_empty() {
            empty += 1;
        }
        println!("  r = {r:<3} base = {:?}", cls.base_outliers);
    }
    println!(
        "\n{} of {} primes have no outliers at all ({:.3})",
        empty,
        primes.len(),
        empty as f64 / primes.len() as f64
    );
}
