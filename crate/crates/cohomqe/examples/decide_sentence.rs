//! Deciding sentences (formulas without free blocks): the pipeline value is
//! 1 for a true sentence and 0 for a false one.
//!
//! ```bash
//! cargo run --example decide_sentence
//! ```

use cohomqe::formula::parse_formula;
use cohomqe::join::{build_join_formula, join_params};
use cohomqe::motivic::{formula_to_pieces, pseudo_poincare_via_betti, BettiBudget};
use cohomqe::operators::{decide_sentence, QuantifierWord};

fn main() {
    let sentences = [
        // some point of P^1 lies on the hyperplane x_0 = 0
        "(blocks (x 1)) (prefix exists) (=0 x0_0)",
        // some point of P^1 has both coordinates zero: impossible
        "(blocks (x 1)) (prefix exists) (and (=0 x0_0) (=0 x0_1))",
        // every point of P^1 lies on a fixed hyperplane: false
        "(blocks (x 1)) (prefix forall) (=0 x0_0)",
        // every point of P^1 satisfies the trivial equation
        "(blocks (x 1)) (prefix forall) (=0 0)",
        // for every first point there is a second point on a fixed hyperplane
        "(blocks (x 1) (x 1)) (prefix forall exists) (=0 x1_0)",
        // there is a first point such that all second points are on one
        // hyperplane: false
        "(blocks (x 1) (x 1)) (prefix exists forall) (=0 x1_0)",
    ];
    for text in sentences {
        let formula = parse_formula(text).unwrap();
        let word = QuantifierWord(formula.prefix().unwrap().to_vec());
        let psi = formula.strip_prefix();
        let params = join_params(&[], psi.bound_dims());
        let joined = build_join_formula(&psi, &params).unwrap();
        let pieces = formula_to_pieces(&joined, 4096).unwrap();
        let q_join = pseudo_poincare_via_betti(&pieces, &BettiBudget::default()).unwrap();
        let truth = decide_sentence(&q_join, &params, &word).unwrap();
        println!("{text}\n  => {truth}");
    }
}
