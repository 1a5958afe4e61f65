//! Rank bounds on y^2 = x(x^2 + ax + b) by descent through the 2-isogeny.
//!
//! The bound is dim Sel_phi + dim Sel_phihat - 2, with each Selmer
//! dimension estimated from everywhere-locally-solvable torsors
//! w^2 = d u^4 + a u^2 v^2 + (b/d) v^4. At rank 0 the torsion subgroup,
//! pinned by the integral-point bound, is the whole Mordell-Weil group.
//!
//!     cargo run --release --example isogeny_rank_bound

use hyperdescent::elliptic::{rank_upper_bound, rational_points_rank0, EllCurve2T};

fn main() {
    // the congruent-number ladder: n is congruent iff y^2 = x^3 - n^2 x
    // has positive rank
    println!("congruent number curves y^2 = x(x^2 - n^2):");
    for n in [1i64, 2, 3, 5, 6, 7, 10] {
        let curve = EllCurve2T::new_int(0, -n * n);
        let cert = rank_upper_bound(&curve);
        println!(
            "    n = {n}: dim Sel_phi = {}, dim Sel_phihat = {}, rank <= {}, torsion {}",
            cert.dim_phi, cert.dim_phihat, cert.rank_bound, cert.torsion_structure
        );
        if cert.rank_bound == 0 {
            let pts = rational_points_rank0(&curve).unwrap();
            let shown: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
            println!("        full point set {{{}}}", shown.join(", "));
        }
    }

    // quotients showing up under the family's quartic substitutions
    println!("\nfamily quotient curves:");
    for (label, a, b) in [
        ("y^2 = x(x^2 + 3x + 2)", 3i64, 2i64),
        ("y^2 = x(x^2 - 13x + 36)", -13, 36),
        ("y^2 = x(x^2 + 12x + 32)", 12, 32),
        ("y^2 = x(x^2 - 3*9 x + 2*81)", -27, 162),
    ] {
        let curve = EllCurve2T::new_int(a, b);
        let cert = rank_upper_bound(&curve);
        println!(
            "    {label}: rank <= {}, torsion {}{}",
            cert.rank_bound,
            cert.torsion_structure,
            if cert.closure_widened { " (span widened)" } else { "" },
        );
    }
}
