//! Exact pseudo-Poincare and Poincare polynomials of linear-arrangement
//! realizations: the Grothendieck-class route against the Betti-number route,
//! including a union where the class route is not faithful.
//!
//! ```bash
//! cargo run --example pseudo_poincare
//! ```

use cohomqe::formula::parse_formula;
use cohomqe::motivic::{
    class_to_p, class_to_q, formula_to_pieces, pieces_class, poincare_via_betti,
    pseudo_poincare_via_betti, BettiBudget,
};

fn main() {
    let budget = BettiBudget::default();
    let class_faithful = [
        "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))",
        "(blocks (x 1) (x 1)) (and)",
        "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))",
    ];
    for text in class_faithful {
        let f = parse_formula(text).unwrap();
        let pieces = formula_to_pieces(&f, 4096).unwrap();
        let class = pieces_class(&pieces).unwrap();
        let q_class = class_to_q(&class).unwrap();
        let q_betti = pseudo_poincare_via_betti(&pieces, &budget).unwrap();
        let p_betti = poincare_via_betti(&pieces, &budget).unwrap();
        println!("{text}");
        println!("  class      = {}", class.poly_in_l);
        println!("  Q (class)  = {q_class}");
        println!("  Q (Betti)  = {q_betti}");
        println!("  P (Betti)  = {p_betti}");
        println!("  P (class)  = {}", class_to_p(&class).unwrap());
        assert_eq!(q_class, q_betti);
    }

    // the join of two points with itself: four lines in P^3 forming a cycle;
    // the cycle class lives in odd cohomology, so the class substitution does
    // not see the true Betti numbers
    let cycle = parse_formula(
        "(blocks (x 3)) (or (and (=0 x0_1) (=0 x0_3)) (and (=0 x0_1) (=0 x0_2)) \
         (and (=0 x0_0) (=0 x0_3)) (and (=0 x0_0) (=0 x0_2)))",
    )
    .unwrap();
    let pieces = formula_to_pieces(&cycle, 4096).unwrap();
    let class = pieces_class(&pieces).unwrap();
    let q_betti = pseudo_poincare_via_betti(&pieces, &budget).unwrap();
    let p_betti = poincare_via_betti(&pieces, &budget).unwrap();
    println!("\nfour lines in a cycle (a self-join of two points):");
    println!("  class                = {}", class.poly_in_l);
    println!("  Q via Betti numbers  = {q_betti}");
    println!("  P via Betti numbers  = {p_betti}");
    println!(
        "  the class substitution L -> T would give {}, which is not Q",
        class.poly_in_l
    );
}
