//! Derived join parameters and size accounting.
//!
//! ```bash
//! cargo run --example join_parameters
//! ```

use cohomqe::formula::parse_formula;
use cohomqe::join::{build_join_formula, join_params, join_size_stats};

fn main() {
    // one free P^1 block, two bound P^1 blocks
    let psi = parse_formula(
        "(blocks (w 1) (x 1) (x 1))\n\
         (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))\n\
             (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))",
    )
    .unwrap();

    let params = join_params(psi.free_dims(), psi.bound_dims());
    println!("level |    N_i |    d_i |    m_i");
    println!("    0 |      - | {:>6} |      -", params.threshold(0));
    for j in 1..=params.bound_count() {
        println!(
            "{:>5} | {:>6} | {:>6} | {:>6}",
            j,
            params.copies(j),
            params.threshold(j),
            params.joined_dim(j)
        );
    }
    for j in 0..=params.bound_count() {
        println!("signature at level {j}: {}", params.signature(j).unwrap());
    }

    let stats = join_size_stats(&psi, &params).unwrap();
    println!("conjuncts:          {}", stats.conjunct_count);
    println!("atoms:              {}", stats.atom_count);
    println!("variables:          {}", stats.variable_count);
    println!("circuit size bound: {}", stats.circuit_size_bound);

    let joined = build_join_formula(&psi, &params).unwrap();
    println!(
        "join formula: {} blocks, {} atoms, quantifier-free",
        joined.blocks().len(),
        joined.atom_count()
    );

    // growth of the recurrences for a sentence with more bound blocks
    println!("\nsentence parameters for increasing quantifier depth (all blocks P^1):");
    for n in 1..=6 {
        let p = join_params(&[], &vec![1; n]);
        println!("  n = {n}: d_n = {}", p.threshold(n));
    }
}
