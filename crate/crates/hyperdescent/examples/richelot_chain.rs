//! The (2,2)-isogeny on Jacobians induced by a quadratic splitting.
//!
//! For the family splitting f = x (x^2 + A)(x^2 + 2A) the bracket
//! construction sends y^2 = f(x) to (a rescaling of) y^2 = x(x^2 - A')(x^2 - 2A'),
//! flipping the sign of the parameter. With (i, j) = (2, odd j) the image
//! rescales to the monic integral model y^2 = x(x^2 - p^j)(x^2 - 2p^j) used
//! by the descent.
//!
//!     cargo run --release --example richelot_chain

use hyperdescent::arith::int;
use hyperdescent::curve::{
    family_curve, family_richelot_image, reduced_richelot_image, richelot, search_points,
    QuadTriple,
};
use hyperdescent::poly::Poly;

fn main() {
    // the generic bracket curve of one explicit splitting
    let a = int(12);
    let t = QuadTriple::new(
        Poly::x(),
        Poly::from_coeffs(vec![a.clone(), int(0), int(1)]),
        Poly::from_coeffs(vec![2 * &a, int(0), int(1)]),
    );
    let (img, delta) = richelot(&t).unwrap();
    println!("splitting x (x^2 + 12)(x^2 + 24): Delta = {delta}");
    println!("bracket curve {img}");

    for (p, j) in [(13u64, 1u32), (29, 1), (5, 3), (37, 3)] {
        let source = family_curve(p, 2, j);
        let image = family_richelot_image(p, 2, j);
        let reduced = reduced_richelot_image(p, j);
        println!("\np = {p}, j = {j}");
        println!("    source  {source}");
        println!("    image   {image}");
        println!("    reduced {reduced}");
        // rational points transfer through the correspondence up to the
        // known kernel, so both sides keep the trivial set here
        let s = search_points(&source, 400);
        let r = search_points(&reduced, 400);
        println!("    points below height 400: source {}, reduced {}", s.len(), r.len());
    }
}
