//! Determination of rational points on the genus-2 family
//!
//! ```text
//!     C(p; i, j):  y^2 = x (x^2 + 2^i p^j) (x^2 + 2^{i+1} p^j)
//! ```
//!
//! for odd primes `p` and small exponents `i`, `j`. The machinery:
//!
//! * a Richelot correspondence sending `C(p; i, j)` to a curve built on
//!   `x (x^2 - 2^{i+2} p^j)(x^2 - 2^{i+3} p^j)`, which identifies the family
//!   members pairwise and cuts the `(i, j)` grid down to a few normal forms;
//! * an elementary multiplicative case analysis of `V^2 = U W (U^2 + A W^2)(U^2 + 2A W^2)`
//!   that funnels every rational point into one of a handful of elliptic
//!   quartics ([`section2`]);
//! * complete 2-isogeny descents on the resulting rank-0 elliptic curves
//!   ([`elliptic`]);
//! * and, for the congruence classes the elementary analysis cannot reach,
//!   a fake 2-descent on the Jacobian through the etale algebra
//!   `Q x Q(sqrt(p^j)) x Q(sqrt(2 p^j))` ([`selmer`]), with the real and
//!   p-adic square-class bookkeeping in [`localsq`] and the required
//!   real-quadratic invariants (fundamental units, class groups, S-units)
//!   computed from scratch in [`quadfield`].
//!
//! The [`report`] module ties the pieces into per-prime verdicts and the
//! binary exposes them as `verify` / `scan` subcommands.
//!
//! Everything is exact: `num::BigInt` / `BigRational` end to end, with `i128`
//! fast paths in the point searches. No floating point is used anywhere.

pub mod arith;
pub mod curve;
pub mod elliptic;
pub mod f2;
pub mod localsq;
pub mod poly;
pub mod quadfield;
pub mod report;
pub mod section2;
pub mod selmer;

pub use arith::{Int, Rat};
pub use curve::{CurvePoint, HyperCurve};
