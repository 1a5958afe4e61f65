//! The multiplicative case analysis closing the (0, 2) and (2, 2) columns.
//!
//! A rational point with x != 0 factors through a coprime decomposition
//! governed by delta = gcd considerations; each leaf of the resulting case
//! tree either ends in a 2-adic or mod-p contradiction or lands on a
//! quartic / elliptic quotient whose rank-0 point set pulls back. The
//! conclusion is the exact point set of the genus-2 curve.
//!
//!     cargo run --release --example case_analysis

use hyperdescent::section2::{build_case_tree, conclude_points, audit_report};

fn main() {
    for (p, ij) in [(3u64, (2u32, 2u32)), (7, (2, 2)), (5, (0, 2)), (13, (0, 2))] {
        let tree = build_case_tree(p, ij);
        println!("p = {p}, (i, j) = ({}, {})", ij.0, ij.1);
        for (hyps, leaf) in tree.leaves() {
            let path: Vec<String> = hyps.iter().map(|h| h.to_string()).collect();
            println!("    [{}] {}", path.join(", "), leaf.outcome);
        }
        match conclude_points(p, ij) {
            Ok(pts) => {
                let shown: Vec<String> = pts.iter().map(|pt| pt.to_string()).collect();
                println!("    conclusion: {{{}}}", shown.join(", "));
            }
            Err(e) => println!("    no conclusion: {e}"),
        }
        println!();
    }

    println!("full audit for p = 3, (i, j) = (2, 2):\n");
    println!("{}", audit_report(3, (2, 2)));
}
