//! Class groups of real quadratic fields via reduced binary quadratic
//! forms and rho-cycles.
//!
//!     cargo run --release --example class_groups

use hyperdescent::quadfield::ClassGroup;

fn main() {
    println!("{:>6} {:>6} {:>4} {:>4}  {}", "d", "disc", "h", "h+", "narrow invariants / N(eps)");
    for d in [2u64, 5, 10, 13, 26, 29, 34, 37, 53, 58, 61, 74, 79, 82, 85, 101, 106, 122] {
        let cg = ClassGroup::compute(d).unwrap();
        let inv: Vec<String> = cg.narrow_invariants.iter().map(|n| n.to_string()).collect();
        println!(
            "{:>6} {:>6} {:>4} {:>4}  [{}]  N(eps) = {}",
            cg.d,
            cg.disc,
            cg.h,
            cg.h_plus,
            inv.join(", "),
            if cg.norm_minus_one { "-1" } else { "+1" },
        );
        // h+ = h exactly when the fundamental unit has norm -1
        assert_eq!(cg.h_plus == cg.h, cg.norm_minus_one);
    }
}
