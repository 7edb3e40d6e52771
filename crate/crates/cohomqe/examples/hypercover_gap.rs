//! The exponential gap between the hypercover bound and the join value of
//! the middle Betti number of a projected full product.
//!
//! ```bash
//! cargo run --example hypercover_gap
//! ```

use cohomqe::compare::gap_report;

fn main() {
    println!("{:>3} | {:>24} | {:>5} | ratio", "n", "hypercover", "join");
    for n in 1..=30 {
        let r = gap_report(n);
        println!(
            "{:>3} | {:>24} | {:>5} | {}",
            r.n,
            r.hypercover_value.to_string(),
            r.join_value.to_string(),
            r.ratio
        );
    }
}
