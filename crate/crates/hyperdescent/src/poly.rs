//! Dense univariate polynomials over Q, exact throughout.
//!
//! Coefficients are stored ascending (`c[k]` multiplies x^k) with no trailing
//! zeros. Division, gcd, resultants and discriminants are all done over Q by
//! plain exact elimination; the matrices involved are tiny (degree <= 10).

use crate::arith::{int, int_sqrt_exact, rat_i, Int, Rat};
use num::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    c: Vec<Rat>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| match k {
                0 => format!("{}", a),
                1 => format!("{}*x", a),
                _ => format!("{}*x^{}", a, k),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn new(mut c: Vec<Rat>) -> Poly {
        while c.last().map_or(false, |a| a.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn constant(a: Rat) -> Poly {
        Poly::new(vec![a])
    }

    pub fn x() -> Poly {
        Poly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_int_coeffs(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&a| rat_i(a)).collect())
    }

    /// c[0] + c[1] x + ... with big-integer coefficients.
    pub fn from_coeffs(c: Vec<Int>) -> Poly {
        Poly::new(c.into_iter().map(Rat::from_integer).collect())
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.c.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial is given degree 0 by convention here,
    /// guarded by is_zero checks at call sites.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Evaluate at sqrt(c): returns (a, b) with f(sqrt(c)) = a + b sqrt(c).
    pub fn eval_at_sqrt(&self, c: &Rat) -> (Rat, Rat) {
        let (mut a, mut b) = (Rat::zero(), Rat::zero());
        for coeff in self.c.iter().rev() {
            // (a + bT) * T + coeff = (b c + coeff) + a T
            let na = &b * c + coeff;
            let nb = a;
            a = na;
            b = nb;
        }
        (a, b)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, a)| a * rat_i(i as i64 + 1))
                .collect(),
        )
    }

    pub fn add(&self, g: &Poly) -> Poly {
        let n = self.c.len().max(g.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + g.coeff(k)).collect())
    }

    pub fn sub(&self, g: &Poly) -> Poly {
        let n = self.c.len().max(g.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - g.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, g: &Poly) -> Poly {
        if self.is_zero() || g.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + g.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in g.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        Poly::new(self.c.iter().map(|a| a * s).collect())
    }

    /// x -> s*x substitution.
    pub fn compose_scale_x(&self, s: &Rat) -> Poly {
        let mut pw = Rat::one();
        Poly::new(
            self.c
                .iter()
                .map(|a| {
                    let out = a * &pw;
                    pw = &pw * s;
                    out
                })
                .collect(),
        )
    }

    /// x -> x + t substitution.
    pub fn compose_shift_x(&self, t: &Rat) -> Poly {
        let mut acc = Poly::zero();
        let shift = Poly::new(vec![t.clone(), Rat::one()]);
        for a in self.c.iter().rev() {
            acc = acc.mul(&shift).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Euclidean division: (q, r) with self = q g + r, deg r < deg g.
    pub fn divrem(&self, g: &Poly) -> (Poly, Poly) {
        assert!(!g.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let mut q = vec![Rat::zero(); self.c.len().saturating_sub(g.c.len()) + 1];
        let glead = g.leading();
        while !r.is_zero() && r.degree() >= g.degree() {
            let shift = r.degree() - g.degree();
            let factor = r.leading() / &glead;
            q[shift] = factor.clone();
            let mut sub = vec![Rat::zero(); shift];
            sub.extend(g.c.iter().map(|a| a * &factor));
            r = r.sub(&Poly::new(sub));
        }
        (Poly::new(q), r)
    }

    pub fn divides(&self, g: &Poly) -> bool {
        g.divrem(self).1.is_zero()
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, g: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), g.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lead = a.leading();
            a.scale(&(Rat::one() / lead))
        }
    }

    /// All rational roots, via the rational root theorem after clearing
    /// denominators, with multiplicity collapsed.
    pub fn rational_roots(&self) -> Vec<Rat> {
        if self.is_zero() {
            panic!("rational_roots of the zero polynomial");
        }
        // clear denominators
        let mut lcm = Int::one();
        for a in &self.c {
            lcm = num::integer::lcm(lcm, a.denom().clone());
        }
        let ints: Vec<Int> = self
            .c
            .iter()
            .map(|a| (a * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut roots = Vec::new();
        // strip powers of x
        let first_nonzero = ints.iter().position(|a| !a.is_zero()).unwrap();
        if first_nonzero > 0 {
            roots.push(Rat::zero());
        }
        let body = &ints[first_nonzero..];
        if body.len() > 1 {
            let a0 = crate::arith::Factorization::of(&body[0]).divisors();
            let an = crate::arith::Factorization::of(body.last().unwrap()).divisors();
            for p in &a0 {
                for q in &an {
                    for sign in [1i64, -1] {
                        let cand = Rat::new(p * int(sign), q.clone());
                        if self.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Resultant of self and g via the Sylvester matrix, exact over Q.
    pub fn resultant(&self, g: &Poly) -> Rat {
        if self.is_zero() || g.is_zero() {
            return Rat::zero();
        }
        let (m, n) = (self.degree(), g.degree());
        if m == 0 {
            return self.coeff(0).pow(n as i32);
        }
        if n == 0 {
            return g.coeff(0).pow(m as i32);
        }
        let size = m + n;
        let mut mat = vec![vec![Rat::zero(); size]; size];
        for row in 0..n {
            for (k, a) in self.c.iter().enumerate() {
                mat[row][row + m - k] = a.clone();
            }
        }
        for row in 0..m {
            for (k, a) in g.c.iter().enumerate() {
                mat[n + row][row + n - k] = a.clone();
            }
        }
        det(mat)
    }

    pub fn discriminant(&self) -> Rat {
        let n = self.degree();
        assert!(n >= 1, "discriminant needs degree >= 1");
        let res = self.resultant(&self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 0 {
            Rat::one()
        } else {
            -Rat::one()
        };
        sign * res / self.leading()
    }
}

/// Exact determinant by fraction-full Gaussian elimination (fine at this size).
fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut acc = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            acc = -acc;
        }
        let lead = m[col][col].clone();
        acc *= lead.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &lead;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    acc
}

/// Rational roots of a monic quadratic x^2 + bx + c, if the discriminant is
/// a square.
pub fn quadratic_roots(b: &Rat, c: &Rat) -> Option<(Rat, Rat)> {
    let disc = b * b - rat_i(4) * c;
    let s = crate::arith::rat_sqrt_exact(&disc)?;
    let half = Rat::new(int(1), int(2));
    Some(((&s - b) * &half, (-&s - b) * &half))
}

/// Integer square root helper on rationals with integral square.
pub fn rat_is_square(x: &Rat) -> bool {
    !x.is_negative()
        && int_sqrt_exact(x.numer()).is_some()
        && int_sqrt_exact(x.denom()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_poly(rng: &mut StdRng, deg: usize) -> Poly {
        Poly::new(
            (0..=deg)
                .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect(),
        )
    }

    #[test]
    fn evaluation_and_derivative() {
        let f = Poly::from_int_coeffs(&[0, 2, 0, 3, 0, 1]); // x^5 + 3x^3 + 2x
        assert_eq!(f.eval(&rat_i(2)), rat_i(32 + 24 + 4));
        assert_eq!(f.derivative(), Poly::from_int_coeffs(&[2, 0, 9, 0, 5]));
        let (a, b) = f.eval_at_sqrt(&rat_i(2)); // f(sqrt 2) = 4sqrt2 + 6sqrt2 + 2sqrt2
        assert_eq!((a, b), (rat_i(0), rat_i(12)));
        let (a, b) = Poly::from_int_coeffs(&[-5, 1]).eval_at_sqrt(&rat_i(13));
        assert_eq!((a, b), (rat_i(-5), rat_i(1)));
    }

    #[test]
    fn division_identity_on_random_inputs() {
        let mut rng = StdRng::seed_from_u64(0xd1f);
        for _ in 0..200 {
            let df = rng.gen_range(0..7);
            let dg = rng.gen_range(0..4);
            let f = rand_poly(&mut rng, df);
            let mut g = rand_poly(&mut rng, dg);
            if g.is_zero() {
                g = Poly::x();
            }
            let (q, r) = f.divrem(&g);
            assert_eq!(q.mul(&g).add(&r), f);
            assert!(r.is_zero() || r.degree() < g.degree());
        }
    }

    #[test]
    fn gcd_and_roots() {
        let f = Poly::from_int_coeffs(&[-1, 0, 1]).mul(&Poly::from_int_coeffs(&[2, 1]));
        let g = Poly::from_int_coeffs(&[-1, 1]).mul(&Poly::from_int_coeffs(&[3, 1]));
        assert_eq!(f.gcd(&g), Poly::from_int_coeffs(&[-1, 1]));

        let f = Poly::from_int_coeffs(&[0, 2, 0, 3, 0, 1]);
        assert_eq!(f.rational_roots(), vec![rat_i(0)]);
        // 2x^2 - x - 1 = (2x + 1)(x - 1)
        let f = Poly::from_int_coeffs(&[-1, -1, 2]);
        assert_eq!(f.rational_roots(), vec![rat(-1, 2), rat_i(1)]);
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let f = Poly::from_int_coeffs(&[-6, 11, -6, 1]);
        assert_eq!(f.rational_roots(), vec![rat_i(1), rat_i(2), rat_i(3)]);
    }

    #[test]
    fn resultants_and_discriminants() {
        let f = Poly::from_int_coeffs(&[-1, 0, 1]);
        let g = Poly::from_int_coeffs(&[-4, 0, 1]);
        assert_eq!(f.resultant(&g), rat_i(9));

        // disc(x^2 + bx + c) = b^2 - 4c
        let mut rng = StdRng::seed_from_u64(0xd15c);
        for _ in 0..50 {
            let b = rat(rng.gen_range(-9..9), rng.gen_range(1..3));
            let c = rat(rng.gen_range(-9..9), rng.gen_range(1..3));
            let f = Poly::new(vec![c.clone(), b.clone(), Rat::one()]);
            assert_eq!(f.discriminant(), &b * &b - rat_i(4) * &c);
        }
        // disc(x^3 + px + q) = -4p^3 - 27q^2
        for _ in 0..50 {
            let p = rat_i(rng.gen_range(-9..9));
            let q = rat_i(rng.gen_range(-9..9));
            let f = Poly::new(vec![q.clone(), p.clone(), Rat::zero(), Rat::one()]);
            assert_eq!(
                f.discriminant(),
                rat_i(-4) * &p * &p * &p - rat_i(27) * &q * &q
            );
        }
    }

    /// disc(x(x^2+A)(x^2+2A)) = 2^7 A^10: the quantity the integral-point
    /// filter divides against.
    #[test]
    fn family_quintic_discriminant() {
        for a in [1i64, 2, 12, 36, 9 * 4] {
            let aa = rat_i(a);
            let f = Poly::new(vec![
                Rat::zero(),
                rat_i(2) * &aa * &aa,
                Rat::zero(),
                rat_i(3) * &aa,
                Rat::zero(),
                Rat::one(),
            ]);
            assert_eq!(f.discriminant(), rat_i(128) * aa.pow(10));
        }
    }

    #[test]
    fn composition_substitutions() {
        let f = Poly::from_int_coeffs(&[1, 2, 3]);
        let g = f.compose_scale_x(&rat_i(2)); // f(2x) = 1 + 4x + 12x^2
        assert_eq!(g, Poly::from_int_coeffs(&[1, 4, 12]));
        let h = f.compose_shift_x(&rat_i(-1)); // f(x-1) = 3x^2 - 4x + 2
        assert_eq!(h, Poly::from_int_coeffs(&[2, -4, 3]));
        let mut rng = StdRng::seed_from_u64(0xc0);
        for _ in 0..100 {
            let f = rand_poly(&mut rng, 5);
            let t = rat(rng.gen_range(-5..5), rng.gen_range(1..3));
            let x = rat(rng.gen_range(-5..5), rng.gen_range(1..3));
            assert_eq!(f.compose_shift_x(&t).eval(&x), f.eval(&(&x + &t)));
            assert_eq!(f.compose_scale_x(&t).eval(&x), f.eval(&(&x * &t)));
        }
    }

    #[test]
    fn quadratic_root_finder() {
        assert_eq!(
            quadratic_roots(&rat_i(-3), &rat_i(2)),
            Some((rat_i(2), rat_i(1)))
        );
        assert_eq!(quadratic_roots(&rat_i(0), &rat_i(2)), None);
        assert_eq!(
            quadratic_roots(&rat_i(0), &rat(-1, 4)),
            Some((rat(1, 2), rat(-1, 2)))
        );
    }
}
