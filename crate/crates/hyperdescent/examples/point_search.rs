//! Exhaustive rational point search on family curves.
//!
//! Every x = U/W with |U|, W <= height is tested exactly after a cheap
//! wrapped-residue square prefilter, so the printed list is the complete
//! set of rational points below the bound.
//!
//!     cargo run --release --example point_search

use hyperdescent::curve::{family_curve, search_points};

fn main() {
    let height = 2000;
    for (p, i, j) in [(3, 2, 2), (5, 2, 2), (17, 0, 1), (7, 2, 3), (13, 2, 1)] {
        let curve = family_curve(p, i, j);
        let pts = search_points(&curve, height);
        println!("p = {p}, (i, j) = ({i}, {j}):  {}", curve);
        for pt in &pts {
            assert!(curve.contains(pt));
            println!("    {pt}");
        }
        println!();
    }
    println!("every x = U/W with |U|, W <= {height} was tested");
}
