//! Fake 2-descent on the Jacobian of y^2 = x(x^2 - p^j)(x^2 - 2p^j).
//!
//! The descent map lands in the square classes of the etale algebra
//! Q x Q(T2) x Q(T3) with T2^2 = p^j, T3^2 = 2 p^j. Inside the 11
//! dimensional group of classes unramified outside {2, p, infinity}, the
//! Selmer group is cut out by the norm condition and by local image
//! conditions at 2, p and the real place. For p = 13 (mod 16), j = 1 and
//! p = 5 (mod 16), j = 3 it collapses onto the two-torsion image, so the
//! rank is 0.
//!
//!     cargo run --release --example selmer_rank

use hyperdescent::selmer::{independence_audit, selmer_group};

fn main() {
    for (p, j) in [(13u64, 1u32), (29, 1), (61, 1), (5, 3), (37, 3), (53, 3)] {
        let cert = selmer_group(p, j).unwrap();
        println!("p = {p}, j = {j}");
        println!(
            "    kernel of the norm: dim {}, Selmer: dim {}, rank bound {}",
            cert.kernel_dim, cert.selmer_dim, cert.rank_bound
        );
        for img in &cert.local {
            println!(
                "    at {}: two-torsion image dim {}, full local image dim {} of {}",
                img.place, img.two_torsion_dim, img.dim, img.target_dim
            );
        }
        println!("    Selmer basis: {}", cert.selmer_basis.join(", "));
        assert!(cert.equals_two_torsion_image_span);

        let audit = independence_audit(p, j).unwrap();
        println!(
            "    independence audit: {} residue vectors, rank {} over F_2",
            audit.vector_count, audit.rank
        );
        assert!(audit.independent && audit.t1_matches_product && audit.t2_matches_product);
        println!();
    }

    // every recorded caveat stays visible in the certificate
    let cert = selmer_group(13, 1).unwrap();
    println!("notes carried by the p = 13 certificate:");
    for note in &cert.notes {
        println!("    - {note}");
    }
}
