//! Square classes in completions: Q_p, Q_2, R, and their quadratic etale
//! extensions Q_v[T]/(T^2 - c).
//!
//! Each factor carries an F_2 square-class group whose dimension depends
//! only on the shape (split, unramified, ramified, complex); the example
//! prints the dimension and classifies a few concrete elements.
//!
//!     cargo run --release --example local_squares

use hyperdescent::arith::{is_square_q2, is_square_qp, rat, rat_i};
use hyperdescent::localsq::{LocalFactor, Place};

fn main() {
    println!("squares in Q_p (p odd) and Q_2:");
    for (label, x) in [
        ("4", rat_i(4)),
        ("13", rat_i(13)),
        ("52", rat_i(52)),
        ("1/17", rat(1, 17)),
        ("-7", rat_i(-7)),
    ] {
        println!(
            "    {label:>5}: square in Q_13: {:5}  square in Q_2: {}",
            is_square_qp(&x, 13),
            is_square_q2(&x),
        );
    }

    println!("\netale factor dimensions over Q_2, Q_13 and R:");
    let cases = [
        (Place::Finite(2), None, "Q_2 itself"),
        (Place::Finite(2), Some(rat_i(17)), "T^2 = 17 splits over Q_2"),
        (Place::Finite(2), Some(rat_i(13)), "T^2 = 13 is unramified"),
        (Place::Finite(2), Some(rat_i(26)), "T^2 = 26 is ramified"),
        (Place::Finite(13), None, "Q_13 itself"),
        (Place::Finite(13), Some(rat_i(3)), "T^2 = 3 is the unramified field"),
        (Place::Finite(13), Some(rat_i(13)), "T^2 = 13 is ramified"),
        (Place::Infinity, None, "R itself"),
        (Place::Infinity, Some(rat_i(13)), "T^2 = 13 splits as R x R"),
        (Place::Infinity, Some(rat_i(-1)), "T^2 = -1 is C"),
    ];
    for (place, c, note) in cases {
        let f = LocalFactor::new(place, c);
        println!("    at {place}: dim {} ({note})", f.dim());
    }

    // sample classes: bit patterns separate inequivalent elements
    let q2 = LocalFactor::new(Place::Finite(2), None);
    println!("\nsquare classes in Q_2* / (Q_2*)^2 (3 bits):");
    for x in [1i64, 3, 5, 7, 2, 6, 10, 14] {
        println!("    {x:>3} -> {:03b}", q2.square_class(&rat_i(x), &rat_i(0)));
    }
}
