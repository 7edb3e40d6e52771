//! Desk-scale verification of the relative-join congruence and the
//! multi-join connectivity, with exact Betti numbers on both sides.
//!
//! ```bash
//! cargo run --release --example verify_theorems
//! ```

use cohomqe::compare::{verify_join_connectivity, verify_poincare_congruence};
use cohomqe::formula::parse_formula;
use cohomqe::motivic::BettiBudget;

fn main() {
    let budget = BettiBudget::default();

    println!("relative-join congruence mod T^p over P^1 x P^1:");
    let congruence_instances = [
        "(blocks (w 1) (x 1)) (and)",
        "(blocks (w 1) (x 1)) (or (and (=0 w0_0) (=0 x0_0)) (and (=0 w0_1) (=0 x0_1)))",
        "(blocks (w 1) (x 1)) (or (=0 w0_0) (and (=0 w0_1) (=0 x0_0)))",
    ];
    for text in congruence_instances {
        let psi = parse_formula(text).unwrap();
        for p in [2usize, 3, 5] {
            let report = verify_poincare_congruence(&psi, p, 4096, &budget).unwrap();
            println!(
                "  p={p}: {} vs {} -> {}",
                report.left,
                report.right,
                if report.holds { "holds" } else { "FAILS" }
            );
            assert!(report.holds);
        }
        println!("  instance: {text}\n");
    }

    println!("multi-join connectivity (Betti numbers match the ambient space below p):");
    let connectivity_instances = [
        ("2 points in P^1", "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))"),
        (
            "3 points in P^1",
            "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1) (=0 (+ x0_0 (* -1 x0_1))))",
        ),
        ("2 lines in P^2", "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))"),
    ];
    for (name, text) in connectivity_instances {
        let psi = parse_formula(text).unwrap();
        for p in 1..=4 {
            let report = verify_join_connectivity(&psi, p, 100_000, &budget).unwrap();
            println!(
                "  {name}, p={p}: b = {} -> {}",
                report.left,
                if report.holds { "holds" } else { "FAILS" }
            );
            assert!(report.holds);
        }
    }
}
