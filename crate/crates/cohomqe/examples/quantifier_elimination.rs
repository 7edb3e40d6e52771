//! Full quantifier-elimination pipeline: build the join formula, compute its
//! pseudo-Poincare polynomial exactly, and run the operator composite for two
//! different quantifier words.
//!
//! ```bash
//! cargo run --example quantifier_elimination
//! ```

use cohomqe::formula::parse_formula;
use cohomqe::join::{build_join_formula, join_params};
use cohomqe::motivic::{formula_to_pieces, pseudo_poincare_via_betti, BettiBudget};
use cohomqe::operators::{build_f_omega, QuantifierWord};

fn main() {
    let psi = parse_formula(
        "(blocks (w 1) (x 1) (x 1))\n\
         (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))\n\
             (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))",
    )
    .unwrap();

    let params = join_params(psi.free_dims(), psi.bound_dims());
    let joined = build_join_formula(&psi, &params).unwrap();
    println!(
        "join formula over blocks {} with {} atoms",
        joined.blocks(),
        joined.atom_count()
    );

    let pieces = formula_to_pieces(&joined, 4096).unwrap();
    println!(
        "realization decomposes into {} product pieces:",
        pieces.len()
    );
    for piece in &pieces {
        println!("  dimensions per block: {:?}", piece.proj_dims());
    }
    let q_join = pseudo_poincare_via_betti(&pieces, &BettiBudget::default()).unwrap();
    println!(
        "Q(join) has degree {} with leading coefficient {}",
        q_join.degree(),
        q_join.coeff(q_join.degree() as usize)
    );

    for word_text in ["EA", "AE"] {
        let word = QuantifierWord::parse(word_text).unwrap();
        let spec = build_f_omega(&params, &word).unwrap();
        println!("\nword {word_text}: operator = {spec}");
        let result = spec.apply(&q_join).unwrap();
        println!("word {word_text}: Q(quantified formula) = {result}");
    }
}
