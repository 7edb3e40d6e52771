//! Finite-field point counting as an independent oracle: counts over several
//! primes against the class polynomial, and the class recovered from counts
//! alone by interpolation.
//!
//! ```bash
//! cargo run --example point_counting
//! ```

use num_bigint::BigInt;

use cohomqe::formula::parse_formula;
use cohomqe::motivic::{class_from_counts, count_points, formula_to_pieces, pieces_class};

fn main() {
    let texts = [
        "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))",
        "(blocks (x 1) (x 1)) (or (=0 x0_0) (=0 x1_1))",
        "(blocks (x 2)) (and)",
    ];
    for text in texts {
        let f = parse_formula(text).unwrap();
        let pieces = formula_to_pieces(&f, 4096).unwrap();
        let class = pieces_class(&pieces).unwrap();
        println!("{text}");
        println!("  class = {}", class.poly_in_l);
        for q in [2u64, 3, 5, 7, 11] {
            let counted = count_points(&f, q, 10_000_000, 2).unwrap();
            let predicted = class.poly_in_l.eval(&BigInt::from(q));
            println!("  |X(F_{q})| = {counted}, class({q}) = {predicted}");
            assert_eq!(counted, predicted);
        }
        let interpolated = class_from_counts(&f, &[2, 3, 5, 7, 11], 10_000_000, 2).unwrap();
        println!("  interpolated class = {}", interpolated.poly_in_l);
        assert_eq!(interpolated, class);
    }
}
