//! Fundamental units of real quadratic fields by continued fractions, and
//! the local square audit of eps and 2 eps at the ramified prime.
//!
//! For p = 5 (mod 8) the fundamental unit of Q(sqrt p) has norm -1. The
//! audit classifies eps and 2 eps in the completion at (sqrt p): a unit
//! there is a square iff its residue is a square mod p. Where a residue
//! disagrees with the blanket expectation "both are nonsquares", the audit
//! reports the disagreement instead of smoothing it over.
//!
//!     cargo run --release --example fundamental_units

use hyperdescent::quadfield::{fundamental_unit, s_unit_square_basis, unit_square_audit};

fn main() {
    println!("fundamental units, d squarefree:");
    for d in [2u64, 3, 5, 10, 13, 26, 29, 53, 58, 61] {
        let eps = fundamental_unit(d).unwrap();
        println!("    Q(sqrt {d}): eps = {eps}, N(eps) = {}", eps.norm());
    }

    println!("\nS-unit square-class bases for S = {{2, p}}, p = 5 (mod 8):");
    for p in [5u64, 13, 29, 37, 53, 61] {
        for two_times in [false, true] {
            let su = s_unit_square_basis(p, two_times).unwrap();
            println!(
                "    d = {}: dim 4, eps = {}, h = {}, h+ = {} ({})",
                su.d, su.eps, su.class_number, su.narrow_class_number, su.class_condition
            );
            assert!(su.unit_norm_is_minus_one);
        }
    }

    println!("\nlocal square audit at the ramified prime of Q(sqrt p):");
    for p in [5u64, 13, 29, 37, 53, 61, 101, 109] {
        let audit = unit_square_audit(p).unwrap();
        println!(
            "    p = {p}: eps residue {} (square: {}), 2 eps residue {} (square: {})",
            audit.eps_residue,
            audit.eps_is_local_square,
            audit.two_eps_residue,
            audit.two_eps_is_local_square,
        );
        if let Some(msg) = &audit.disagreement {
            println!("        flagged: {msg}");
        }
    }
}
