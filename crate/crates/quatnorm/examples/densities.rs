//! Exact Dirichlet densities of the primes r for which a given m is an
//! outlier for A_r, computed by GF(2) elimination over square classes.
//!
//! ```bash
//! cargo run --example densities
//! ```

use quatnorm::density::{
    density_for_outlier, discriminant_classes, exact_density, parse_condition,
};

fn main() {
    println!("m   rank  density   discriminant classes");
    for m in [2u64, 3, 5, 6, 7, 10, 11] {
        let classes = discriminant_classes(m).unwrap();
        let reps: Vec<i64> = classes.iter().map(|c| c.representative()).collect();
        let d = density_for_outlier(m).unwrap();
        let (num, den) = d.density();
        println!("{m:<3} {:>4}  {num}/{den:<7} {reps:?}", d.rank);
    }

    // boolean combinations work too; & binds tighter than |
    let text = "sym(-2)=1 & sym(-3)=1 & sym(-5)=1 & sym(-23)=1 \
                & (sym(-1)=-1 | (sym(-1)=1 & sym(11)=-1 & sym(7)=-1))";
    let expr = parse_condition(text).unwrap();
    let d = exact_density(&expr).unwrap();
    let (num, den) = d.density();
    println!("\ncompound condition:\n  {text}");
    println!(
        "  density {num}/{den} = {} of 2^{} sign assignments",
        d.satisfying, d.rank
    );
    let basis: Vec<i64> = d.basis.iter().map(|c| c.representative()).collect();
    println!("  independent classes {basis:?}");
}
