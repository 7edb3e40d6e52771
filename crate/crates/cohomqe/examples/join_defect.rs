//! Low-degree Betti numbers of projection images through the join's
//! connectivity window.
//!
//! ```bash
//! cargo run --example join_defect
//! ```

use cohomqe::compare::{defect_window, defect_window_max, join_defect_betti};

fn main() {
    println!(
        "{:>3} {:>3} | {:>9} | betti below the threshold",
        "n", "r", "threshold"
    );
    for n in 2..=12usize {
        for r in 1..n {
            match join_defect_betti(n, n, r) {
                Ok(report) => {
                    println!(
                        "{:>3} {:>3} | {:>9} | {:?}",
                        n, r, report.threshold, report.betti
                    );
                    assert_eq!(
                        defect_window(report.threshold, n, r),
                        defect_window_max(n, r)
                    );
                }
                Err(_) => println!("{n:>3} {r:>3} |   (empty window)"),
            }
        }
    }
}
