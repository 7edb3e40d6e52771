//! Explicit Betti-sum bounds and a desk-scale comparison with true Betti
//! numbers from the exact engine.
//!
//! ```bash
//! cargo run --example betti_bounds
//! ```

use num_bigint::BigUint;

use cohomqe::bounds::{
    affine_betti_bound, biprojective_bound, euler_bound, image_betti_bound, katz_a, katz_b,
    projective_betti_bound, BoundMethod,
};
use cohomqe::formula::parse_formula;
use cohomqe::motivic::{betti_numbers, formula_to_pieces, BettiBudget};

fn main() {
    const AS: BoundMethod = BoundMethod::AdolphsonSperber;
    println!("bound chain for N=1, r=1, d=1 (Adolphson-Sperber):");
    println!("  E(1,1,1) = {}", euler_bound(1, 1, 1, AS).unwrap());
    println!("  A(2,1,2) = {}", katz_a(2, 1, 2, AS).unwrap());
    println!("  B(1,1,1) = {}", katz_b(1, 1, 1, AS).unwrap());
    println!(
        "  affine(1,1,1) = {}, projective(1,1,1) = {}",
        affine_betti_bound(1, 1, 1, AS).unwrap(),
        projective_betti_bound(1, 1, 1, AS).unwrap()
    );
    println!(
        "  biprojective(1,1,1,1,1) = {}",
        biprojective_bound(1, 1, 1, 1, 1, AS).unwrap()
    );
    let (exact, ceiling) = image_betti_bound(0, 0, 1, 1, 1, 3, AS).unwrap();
    println!("  image bound at p=3: exact {exact}, ceiling {ceiling}");

    println!("\nmethod comparison for B(2,2,2):");
    for method in [AS, BoundMethod::Bombieri, BoundMethod::Char0OPTM] {
        println!("  {method}: {}", katz_b(2, 2, 2, method).unwrap());
    }

    // desk-scale sanity: true Betti sums of small projective arrangements
    // against the matching projective bound
    println!("\ntrue Betti sums against the projective bound:");
    let cases = [
        "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))",
        "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))",
        "(blocks (x 2)) (or (and (=0 x0_0) (=0 x0_1)) (=0 x0_2))",
    ];
    for text in cases {
        let f = parse_formula(text).unwrap();
        let pieces = formula_to_pieces(&f, 4096).unwrap();
        let dim = pieces.iter().map(|p| p.dim()).max().unwrap();
        let betti = betti_numbers(&pieces, 2 * dim, &BettiBudget::default()).unwrap();
        let total: u64 = betti.iter().sum();
        // the union of k pieces cut by r_i linear rows each is the zero set
        // of prod(r_i) products of linear forms of degree k
        let ambient = f.blocks().dim(0);
        let equations: usize = pieces.iter().map(|p| p.rank(0)).product();
        let degree = pieces.len();
        let bound = projective_betti_bound(ambient, equations, degree, AS).unwrap();
        println!("  {text}");
        println!(
            "    b = {betti:?}, sum = {total} <= projective({ambient},{equations},{degree}) = {bound}"
        );
        assert!(BigUint::from(total) <= bound);
    }
}
