//! Real quadratic fields Q(sqrt(d)): fundamental units by continued
//! fractions, narrow class groups by reduction cycles of indefinite binary
//! quadratic forms, S-unit square-class bases for S = {2, p}, and the local
//! square audit of the fundamental unit at the ramified prime.
//!
//! Everything here is unconditional: units come with Pell certificates,
//! class data is cross-checkable against genus theory, and the S-unit bases
//! carry the exact hypotheses they were verified under.

use crate::arith::{
    int, inv_mod, is_prime_u64, is_square_rat, legendre_u64, rat_sqrt_exact, Int, Rat,
};
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadError {
    #[error("d must be squarefree and > 1, got {0}")]
    NotSquarefree(u64),
    #[error("discriminant {0} exceeds the supported enumeration range")]
    OutOfSupportedRange(u64),
    #[error("unsupported field for this construction: {0}")]
    UnsupportedField(String),
}

pub fn is_squarefree(d: u64) -> bool {
    d > 0 && crate::arith::factor_u64(d).iter().all(|&(_, e)| e == 1)
}

fn isqrt_u64(n: u64) -> u64 {
    n.isqrt()
}

/// An element (a + b sqrt(d)) / den of Q(sqrt(d)), den in {1, 2}; den = 2
/// only occurs for d = 1 (mod 4) with a, b of equal parity.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadElt {
    pub d: u64,
    pub a: Int,
    pub b: Int,
    pub den: u8,
}

impl fmt::Debug for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        } else {
            write!(f, "({} + {}*sqrt({}))/2", self.a, self.b, self.d)
        }
    }
}

impl fmt::Display for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl QuadElt {
    pub fn new(d: u64, a: Int, b: Int, den: u8) -> QuadElt {
        assert!(den == 1 || den == 2);
        let mut e = QuadElt { d, a, b, den };
        e.reduce_den();
        e
    }

    pub fn from_int(d: u64, a: i64) -> QuadElt {
        QuadElt::new(d, int(a), Int::zero(), 1)
    }

    pub fn sqrt_d(d: u64) -> QuadElt {
        QuadElt::new(d, Int::zero(), Int::one(), 1)
    }

    fn reduce_den(&mut self) {
        if self.den == 2 && self.a.is_even() && self.b.is_even() {
            self.a /= 2;
            self.b /= 2;
            self.den = 1;
        }
    }

    pub fn mul(&self, other: &QuadElt) -> QuadElt {
        assert_eq!(self.d, other.d);
        let d = Int::from(self.d);
        let a = &self.a * &other.a + &self.b * &other.b * &d;
        let b = &self.a * &other.b + &self.b * &other.a;
        let mut den = self.den as u32 * other.den as u32;
        let (mut a, mut b) = (a, b);
        while den % 2 == 0 && a.is_even() && b.is_even() {
            a /= 2;
            b /= 2;
            den /= 2;
        }
        assert!(den <= 2, "product left the half-integer lattice");
        QuadElt {
            d: self.d,
            a,
            b,
            den: den as u8,
        }
    }

    pub fn conj(&self) -> QuadElt {
        QuadElt {
            d: self.d,
            a: self.a.clone(),
            b: -self.b.clone(),
            den: self.den,
        }
    }

    pub fn norm(&self) -> Rat {
        let d = Int::from(self.d);
        Rat::new(
            &self.a * &self.a - &self.b * &self.b * d,
            int((self.den as i64) * (self.den as i64)),
        )
    }

    pub fn trace(&self) -> Rat {
        Rat::new(&self.a * 2, int(self.den as i64))
    }

    /// Coordinates (a/den, b/den) in the basis {1, sqrt(d)}.
    pub fn as_rat_coords(&self) -> (Rat, Rat) {
        let den = int(self.den as i64);
        (
            Rat::new(self.a.clone(), den.clone()),
            Rat::new(self.b.clone(), den),
        )
    }

    pub fn pow(&self, mut k: u64) -> QuadElt {
        let mut base = self.clone();
        let mut acc = QuadElt::from_int(self.d, 1);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact test: is this element a square in Q(sqrt(d))?
    ///
    /// For u = A + B sqrt(d) (rational A, B) and w = x + y sqrt(d), w^2 = u
    /// forces x^2 + d y^2 = A and 2xy = B; eliminating y gives
    /// x^2 = (A +- sqrt(A^2 - d B^2)) / 2, all checkable exactly over Q.
    pub fn is_square_in_field(&self) -> bool {
        let (a, b) = self.as_rat_coords();
        if b.is_zero() {
            // rational: square iff A or A/d is a rational square
            return is_square_rat(&a) || is_square_rat(&(&a / Rat::from_integer(Int::from(self.d))));
        }
        let disc = &a * &a - Rat::from_integer(Int::from(self.d)) * &b * &b;
        let Some(s) = rat_sqrt_exact(&disc) else {
            return false;
        };
        let half = Rat::new(Int::one(), int(2));
        for root in [(&a + &s) * &half, (&a - &s) * &half] {
            if let Some(x) = rat_sqrt_exact(&root) {
                if !x.is_zero() {
                    // y = B / (2x); confirm
                    let y = &b / (Rat::from_integer(int(2)) * &x);
                    if &x * &x + Rat::from_integer(Int::from(self.d)) * &y * &y == a {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// One step data of the continued fraction of (P0 + sqrt(d)) / Q0.
struct CfState {
    d: u64,
    s: u64,
    p: i64,
    q: i64,
}

impl CfState {
    fn next_digit(&mut self) -> u64 {
        let a = (self.p + self.s as i64).div_euclid(self.q);
        self.p = a * self.q - self.p;
        self.q = (self.d as i64 - self.p * self.p) / self.q;
        a as u64
    }
}

/// Fundamental unit of the maximal order of Q(sqrt(d)), normalized > 1.
///
/// Continued-fraction expansion of omega (= sqrt(d), or (1+sqrt(d))/2 when
/// d = 1 mod 4); with period l and convergents p_i/q_i the unit is
/// p_{l-1} - q_{l-1} * conj(omega), of norm (-1)^l.
pub fn fundamental_unit(d: u64) -> Result<QuadElt, QuadError> {
    if d < 2 || !is_squarefree(d) {
        return Err(QuadError::NotSquarefree(d));
    }
    let s = isqrt_u64(d);
    let half_basis = d % 4 == 1;
    let (p0, q0) = if half_basis { (1i64, 2i64) } else { (0, 1) };
    let mut st = CfState { d, s, p: p0, q: q0 };
    let a0 = st.next_digit();
    let (first_p, first_q) = (st.p, st.q);
    // convergents
    let (mut pm2, mut pm1) = (Int::one(), Int::from(a0));
    let (mut qm2, mut qm1) = (Int::zero(), Int::one());
    let mut l = 0u32;
    loop {
        l += 1;
        let a = st.next_digit();
        if (st.p, st.q) == (first_p, first_q) {
            // period complete; (pm1, qm1) = (p_{l-1}, q_{l-1}) before this digit
            let _ = a;
            break;
        }
        let p = Int::from(a) * &pm1 + &pm2;
        let q = Int::from(a) * &qm1 + &qm2;
        pm2 = std::mem::replace(&mut pm1, p);
        qm2 = std::mem::replace(&mut qm1, q);
        if l > 100_000 {
            return Err(QuadError::OutOfSupportedRange(d));
        }
    }
    // eps = p_{l-1} - q_{l-1} * omega_bar, omega_bar = (p0 - sqrt d)/q0
    let eps = if half_basis {
        QuadElt::new(d, &pm1 * 2 - &qm1, qm1.clone(), 2)
    } else {
        QuadElt::new(d, pm1.clone(), qm1.clone(), 1)
    };
    let n = eps.norm();
    assert!(n == Rat::one() || n == -Rat::one(), "unit certificate failed for d={}", d);
    assert!(
        n.to_integer() == int(if l % 2 == 0 { 1 } else { -1 }),
        "norm parity mismatch for d={}",
        d
    );
    assert!(eps.a.is_positive() && eps.b.is_positive());
    Ok(eps)
}

/// Does x^2 - d y^2 = +2 or -2 have an integer solution? (d = 2, 3 mod 4,
/// so Z[sqrt d] is the maximal order and this decides principality of the
/// ramified prime above 2.)
///
/// Scans the Q-sequence of the continued fraction of sqrt(d) over one
/// period: the values (-1)^{i+1} Q_{i+1} are exactly the integers of
/// magnitude < sqrt(d) primitively represented by the norm form.
pub fn represents_pm_two(d: u64) -> Result<bool, QuadError> {
    if !is_squarefree(d) || d % 4 == 1 {
        return Err(QuadError::UnsupportedField(format!(
            "norm-form +-2 scan needs d = 2, 3 mod 4, got {}",
            d
        )));
    }
    if d < 5 {
        // the Q-sequence criterion needs 2 < sqrt(d); settle tiny d directly
        return Ok(true); // 0^2 - 2*1^2 = -2 and 1^2 - 3*1^2 = -2
    }
    let s = isqrt_u64(d);
    let mut st = CfState { d, s, p: 0, q: 1 };
    let _ = st.next_digit();
    let (first_p, first_q) = (st.p, st.q);
    let mut found = st.q == 2;
    let mut i = 0u32;
    loop {
        let _ = st.next_digit();
        if (st.p, st.q) == (first_p, first_q) {
            break;
        }
        if st.q == 2 {
            found = true;
        }
        i += 1;
        if i > 100_000 {
            return Err(QuadError::OutOfSupportedRange(d));
        }
    }
    Ok(found)
}

// ---------------------------------------------------------------------------
// narrow class group via cycles of reduced indefinite forms
// ---------------------------------------------------------------------------

type Form = (i64, i64, i64);

fn disc_of(f: Form) -> i64 {
    f.1 * f.1 - 4 * f.0 * f.2
}

fn is_reduced(f: Form, d_disc: i64, s: i64) -> bool {
    let (a, b, _) = f;
    if b <= 0 || b > s {
        return false;
    }
    let t = 2 * a.abs();
    // sqrt(D) - b < 2|a| < sqrt(D) + b
    let lower = d_disc < (b + t) * (b + t);
    let upper = t <= b || (t - b) * (t - b) < d_disc;
    lower && upper
}

/// One reduction step; preserves the class, and maps reduced forms to
/// reduced forms cycling through the whole class.
fn rho(f: Form, d_disc: i64, s: i64) -> Form {
    let (_, b, c) = f;
    let cc = 2 * c.abs();
    let b_new = if c.abs() as i128 * c.abs() as i128 > d_disc as i128 {
        // normalization zone: pick b' in (-|c|, |c|]
        let mut r = (-b).rem_euclid(cc);
        if r > c.abs() {
            r -= cc;
        }
        r
    } else {
        s - (s + b).rem_euclid(cc)
    };
    let c_new = ((b_new as i128 * b_new as i128 - d_disc as i128) / (4 * c as i128)) as i64;
    (c, b_new, c_new)
}

fn reduce_form(mut f: Form, d_disc: i64, s: i64) -> Form {
    for _ in 0..10_000 {
        if is_reduced(f, d_disc, s) {
            return f;
        }
        f = rho(f, d_disc, s);
    }
    panic!("form reduction did not terminate for disc {}", d_disc);
}

/// The narrow class group of Q(sqrt d), with enough structure for the
/// descent bookkeeping: h+, wide h, invariant factors, and principality
/// tests for the ramified prime above 2.
pub struct ClassGroup {
    pub d: u64,
    pub disc: i64,
    pub h_plus: u64,
    pub h: u64,
    /// invariant factors of the narrow group, each dividing the next
    pub narrow_invariants: Vec<u64>,
    pub norm_minus_one: bool,
    cycle_of: HashMap<Form, usize>,
    reps_pos: Vec<Form>,
    principal: usize,
    neg_principal: usize,
    s: i64,
    element_orders: Vec<u64>,
}

impl ClassGroup {
    pub fn compute(d: u64) -> Result<ClassGroup, QuadError> {
        if d < 2 || !is_squarefree(d) {
            return Err(QuadError::NotSquarefree(d));
        }
        let disc: i64 = if d % 4 == 1 { d as i64 } else { 4 * d as i64 };
        if disc > 100_000 {
            return Err(QuadError::OutOfSupportedRange(d));
        }
        let s = isqrt_u64(disc as u64) as i64;

        // enumerate reduced forms
        let mut reduced: Vec<Form> = Vec::new();
        for b in 1..=s {
            if (disc - b * b) % 4 != 0 {
                continue;
            }
            let m = (disc - b * b) / 4; // = -ac > 0
            if m <= 0 {
                continue;
            }
            for a_abs in 1..=m {
                if m % a_abs != 0 {
                    continue;
                }
                for a in [a_abs, -a_abs] {
                    let c = -m / a;
                    let f = (a, b, c);
                    debug_assert_eq!(disc_of(f), disc);
                    if is_reduced(f, disc, s) {
                        reduced.push(f);
                    }
                }
            }
        }

        // partition into rho-cycles
        let mut cycle_of: HashMap<Form, usize> = HashMap::new();
        let mut reps_pos: Vec<Form> = Vec::new();
        for &f in &reduced {
            if cycle_of.contains_key(&f) {
                continue;
            }
            let cid = reps_pos.len();
            let mut g = f;
            let mut pos_rep = None;
            loop {
                cycle_of.insert(g, cid);
                if g.0 > 0 && pos_rep.is_none() {
                    pos_rep = Some(g);
                }
                g = rho(g, disc, s);
                debug_assert!(is_reduced(g, disc, s));
                if g == f {
                    break;
                }
            }
            reps_pos.push(pos_rep.expect("every cycle alternates leading signs"));
        }
        let h_plus = reps_pos.len() as u64;

        let b0 = if (s - disc).rem_euclid(2) == 0 { s } else { s - 1 };
        let principal_form = reduce_form((1, b0, (b0 * b0 - disc) / 4), disc, s);
        let neg_principal_form = reduce_form((-1, b0, (disc - b0 * b0) / 4), disc, s);
        let principal = cycle_of[&principal_form];
        let neg_principal = cycle_of[&neg_principal_form];
        let norm_minus_one = principal == neg_principal;
        let h = if norm_minus_one { h_plus } else { h_plus / 2 };

        let mut cg = ClassGroup {
            d,
            disc,
            h_plus,
            h,
            narrow_invariants: vec![],
            norm_minus_one,
            cycle_of,
            reps_pos,
            principal,
            neg_principal,
            s,
            element_orders: vec![],
        };
        cg.element_orders = (0..cg.h_plus as usize).map(|i| cg.order_of(i)).collect();
        cg.narrow_invariants = abelian_invariants(&cg.element_orders);
        Ok(cg)
    }

    pub fn class_of(&self, f: Form) -> usize {
        assert_eq!(disc_of(f), self.disc);
        self.cycle_of[&reduce_form(f, self.disc, self.s)]
    }

    pub fn principal_class(&self) -> usize {
        self.principal
    }

    /// Compose two narrow classes (Dirichlet composition on united forms).
    pub fn compose(&self, c1: usize, c2: usize) -> usize {
        let f1 = self.reps_pos[c1];
        let f2 = self.reps_pos[c2];
        let (a1, b1, _) = f1;
        // transport f2 to an equivalent form whose (positive) leading
        // coefficient is coprime to a1
        let mut target: Option<Form> = None;
        'outer: for r in 1..=24i64 {
            for x in -r..=r {
                for y in -r..=r {
                    if x.abs().max(y.abs()) != r {
                        continue;
                    }
                    if num::integer::gcd(x, y) != 1 {
                        continue;
                    }
                    let m = f2.0 * x * x + f2.1 * x * y + f2.2 * y * y;
                    if m <= 0 || num::integer::gcd(m, a1) != 1 {
                        continue;
                    }
                    // extend (x, y) to a unimodular matrix [[x, beta], [y, delta]]
                    let e = extended_gcd_i64(x, y);
                    let (beta, delta) = (-e.1 .1, e.1 .0); // x*delta - y*beta = 1
                    debug_assert_eq!(x * delta - y * beta, 1);
                    let b_new = 2 * f2.0 * x * beta + f2.1 * (x * delta + beta * y) + 2 * f2.2 * y * delta;
                    let c_new = f2.0 * beta * beta + f2.1 * beta * delta + f2.2 * delta * delta;
                    target = Some((m, b_new, c_new));
                    break 'outer;
                }
            }
        }
        let (a2, b2, _) = target.expect("no coprime representative found");
        // B = b1 mod 2a1, B = b2 mod 2a2 (both = disc mod 2)
        let m2 = a2; // modulus partner
        let k = ((b2 - b1).div_euclid(2)).rem_euclid(m2);
        let a1_inv = inv_mod(a1.rem_euclid(m2) as u64, m2 as u64) as i64;
        let kk = (k as i128 * a1_inv as i128).rem_euclid(m2 as i128) as i64;
        let big_a = a1 as i128 * a2 as i128;
        let big_b = (b1 as i128 + 2 * a1 as i128 * kk as i128).rem_euclid(2 * big_a);
        let num = big_b * big_b - self.disc as i128;
        debug_assert_eq!(num.rem_euclid(4 * big_a), 0);
        let big_c = num / (4 * big_a);
        // reduce with i128 arithmetic until coefficients are small
        let f = reduce_form_i128((big_a, big_b, big_c), self.disc, self.s);
        self.cycle_of[&f]
    }

    fn order_of(&self, c: usize) -> u64 {
        let mut acc = c;
        let mut k = 1u64;
        while acc != self.principal {
            acc = self.compose(acc, c);
            k += 1;
            assert!(k <= self.h_plus, "order exceeded group size");
        }
        k
    }

    /// Is the (wide) ideal class of a form trivial? (narrow class equal to
    /// the principal or to the sign-flipped principal class)
    pub fn is_wide_principal(&self, f: Form) -> bool {
        let c = self.class_of(f);
        c == self.principal || c == self.neg_principal
    }

    /// The ramified prime above 2 as a form, for d = 2, 3 mod 4.
    pub fn form_above_two(&self) -> Option<Form> {
        match self.d % 4 {
            2 => Some((2, 0, -(self.d as i64) / 2)),
            3 => Some((2, 2, (1 - self.d as i64) / 2)),
            _ => None,
        }
    }

    pub fn element_orders(&self) -> &[u64] {
        &self.element_orders
    }
}

fn reduce_form_i128(mut f: (i128, i128, i128), disc: i64, s: i64) -> Form {
    let d = disc as i128;
    for _ in 0..20_000 {
        if f.0.abs() < 1 << 40 && f.1.abs() < 1 << 40 && f.2.abs() < 1 << 40 {
            let small = (f.0 as i64, f.1 as i64, f.2 as i64);
            if is_reduced(small, disc, s) {
                return small;
            }
        }
        // same rho step in wide arithmetic
        let (_, b, c) = f;
        let cc = 2 * c.abs();
        let b_new = if c.abs() * c.abs() > d {
            let mut r = (-b).rem_euclid(cc);
            if r > c.abs() {
                r -= cc;
            }
            r
        } else {
            s as i128 - (s as i128 + b).rem_euclid(cc)
        };
        let c_new = (b_new * b_new - d) / (4 * c);
        f = (c, b_new, c_new);
    }
    panic!("wide form reduction did not terminate");
}

fn extended_gcd_i64(a: i64, b: i64) -> (i64, (i64, i64)) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    // sign-normalize so gcd > 0
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r, (old_s, old_t))
}

/// Invariant factors of a finite abelian group from its element orders.
///
/// For each prime q, #{x : x^{q^t} = e} = q^{sum_i min(t, lambda_i)}
/// recovers the q-group partition; factors are then aligned largest-first
/// and emitted in divisibility order.
fn abelian_invariants(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    if n == 1 {
        return vec![];
    }
    let primes: Vec<u64> = crate::arith::factor_u64(n).into_iter().map(|(p, _)| p).collect();
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    for &q in &primes {
        let mut exps: Vec<u32> = Vec::new(); // e_t = log_q n_t
        let mut t = 0u32;
        loop {
            let qt = q.pow(t);
            let count = orders.iter().filter(|&&o| qt % o == 0).count() as u64;
            let mut e = 0u32;
            let mut c = count;
            while c > 1 {
                assert_eq!(c % q, 0, "order statistics are not a q-group profile");
                c /= q;
                e += 1;
            }
            exps.push(e);
            if count == orders.iter().filter(|&&o| is_power_of(o, q)).count() as u64 {
                break;
            }
            t += 1;
            assert!(t < 64);
        }
        // m_t = e_t - e_{t-1} = number of cyclic factors of exponent >= t
        let mut lambdas: Vec<u32> = Vec::new();
        let m1 = if exps.len() > 1 { exps[1] - exps[0] } else { 0 };
        for i in 1..=m1 {
            let lam = (1..exps.len())
                .filter(|&t| exps[t] - exps[t - 1] >= i)
                .count() as u32;
            lambdas.push(lam);
        }
        lambdas.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(lambdas);
    }
    let width = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = vec![1u64; width];
    for (qi, lambdas) in per_prime.iter().enumerate() {
        for (k, &lam) in lambdas.iter().enumerate() {
            factors[k] *= primes[qi].pow(lam);
        }
    }
    factors.reverse(); // ascending, each divides the next
    factors
}

fn is_power_of(mut o: u64, q: u64) -> bool {
    while o % q == 0 {
        o /= q;
    }
    o == 1
}

// ---------------------------------------------------------------------------
// S-unit square classes and the unit square audit
// ---------------------------------------------------------------------------

/// Verified basis of K(S,2) = {x in K*/K*^2 : x is a unit outside S} for
/// K = Q(sqrt d) with d = p or 2p, S = {2, p}, p = 5 (mod 8).
pub struct SUnitBasis {
    pub d: u64,
    pub p: u64,
    /// [-1, eps, 2, sqrt(d)] as field elements
    pub basis: Vec<QuadElt>,
    pub eps: QuadElt,
    pub unit_norm_is_minus_one: bool,
    pub class_number: u64,
    pub narrow_class_number: u64,
    /// None when 2 is inert (d = p); Some(false) required when d = 2p
    pub ramified_two_principal: Option<bool>,
    /// the hypothesis that was checked to pin dim K(S,2) = 4
    pub class_condition: String,
}

pub fn s_unit_square_basis(p: u64, two_times: bool) -> Result<SUnitBasis, QuadError> {
    if !is_prime_u64(p) || p % 8 != 5 {
        return Err(QuadError::UnsupportedField(format!(
            "S-unit basis is established for primes p = 5 (mod 8); got {}",
            p
        )));
    }
    let d = if two_times { 2 * p } else { p };
    let eps = fundamental_unit(d)?;
    let n_minus = eps.norm() == -Rat::one();
    let cg = ClassGroup::compute(d)?;
    let (q2_principal, condition) = if two_times {
        let q2p = represents_pm_two(d)?;
        // cross-check through the form class group
        let via_forms = cg.is_wide_principal(cg.form_above_two().unwrap());
        assert_eq!(q2p, via_forms, "principality tests disagree for d={}", d);
        if q2p {
            return Err(QuadError::UnsupportedField(format!(
                "prime above 2 is principal in Q(sqrt {}); basis shape not established",
                d
            )));
        }
        if cg.h % 2 != 0 || (cg.h / 2) % 2 == 0 {
            return Err(QuadError::UnsupportedField(format!(
                "need v2(h) = 1 for d = {}, got h = {}",
                d, cg.h
            )));
        }
        (Some(false), format!("v2(h) = 1 (h = {}) and the prime above 2 is non-principal", cg.h))
    } else {
        if cg.h % 2 == 0 {
            return Err(QuadError::UnsupportedField(format!(
                "need odd class number for d = {}, got h = {}",
                d, cg.h
            )));
        }
        (None, format!("h = {} is odd and 2 is inert", cg.h))
    };
    if !n_minus {
        return Err(QuadError::UnsupportedField(format!(
            "fundamental unit of Q(sqrt {}) has norm +1; independence argument needs -1",
            d
        )));
    }
    let basis = vec![
        QuadElt::from_int(d, -1),
        eps.clone(),
        QuadElt::from_int(d, 2),
        QuadElt::sqrt_d(d),
    ];
    // verify independence modulo squares: no nonempty product is a square
    for mask in 1u32..16 {
        let mut prod = QuadElt::from_int(d, 1);
        for (i, e) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod = prod.mul(e);
            }
        }
        assert!(
            !prod.is_square_in_field(),
            "basis dependency modulo squares at mask {:04b} for d={}",
            mask,
            d
        );
    }
    Ok(SUnitBasis {
        d,
        p,
        basis,
        eps,
        unit_norm_is_minus_one: n_minus,
        class_number: cg.h,
        narrow_class_number: cg.h_plus,
        ramified_two_principal: q2_principal,
        class_condition: condition,
    })
}

/// Norms of the fundamental units of Q(sqrt p) and Q(sqrt 2p), each
/// reported as "is -1". For p = 5 (mod 8) both are expected to hold; a
/// false here is a bug or a genuine counterexample, so it is returned
/// rather than asserted.
pub fn verify_norm_minus_one(p: u64) -> Result<(bool, bool), QuadError> {
    if !is_prime_u64(p) || p % 8 != 5 {
        return Err(QuadError::UnsupportedField(format!(
            "norm check covers primes p = 5 (mod 8); got {}",
            p
        )));
    }
    let minus_one = -Rat::one();
    let n1 = fundamental_unit(p)?.norm() == minus_one;
    let n2 = fundamental_unit(2 * p)?.norm() == minus_one;
    Ok((n1, n2))
}

/// Local square audit of eps and 2*eps in the completion of Q(sqrt p) at
/// the ramified prime (sqrt p), for p = 5 (mod 8).
///
/// In a ramified quadratic extension of Q_p (p odd) a unit is a square
/// iff its residue is a square in F_p; that residue test is exact. The
/// other test recorded here classifies a unit by the multiplicative order
/// of its residue: order 4 implies nonsquare exactly when (p-1)/4 is odd.
/// It only applies when the order actually is 4, and for 2*eps it never
/// is; the per-prime outcome of both tests is reported, with any clash
/// against the expectation "both eps and 2*eps are nonsquares" flagged
/// rather than resolved.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UnitSquareAudit {
    pub p: u64,
    pub eps_residue: u64,
    pub two_eps_residue: u64,
    pub eps_residue_order: u64,
    pub two_eps_residue_order: u64,
    pub eps_is_local_square: bool,
    pub two_eps_is_local_square: bool,
    /// order-4 test verdicts: Some(is_square) when the test applies
    pub order_test_eps: Option<bool>,
    pub order_test_two_eps: Option<bool>,
    pub matches_nonsquare_claim: bool,
    pub disagreement: Option<String>,
}

pub fn multiplicative_order(a: u64, p: u64) -> u64 {
    assert!(a % p != 0);
    let mut k = 1;
    let mut x = a % p;
    while x != 1 {
        x = (x as u128 * a as u128 % p as u128) as u64;
        k += 1;
    }
    k
}

pub fn unit_square_audit(p: u64) -> Result<UnitSquareAudit, QuadError> {
    if !is_prime_u64(p) || p % 8 != 5 {
        return Err(QuadError::UnsupportedField(format!(
            "audit covers primes p = 5 (mod 8); got {}",
            p
        )));
    }
    let eps = fundamental_unit(p)?;
    // residue of (a + b sqrt p)/den mod the ramified prime: a/den in F_p
    let a = eps.a.mod_floor_u64(p);
    let den_inv = inv_mod(eps.den as u64, p);
    let r = (a as u128 * den_inv as u128 % p as u128) as u64;
    let r2 = (2 * r) % p;
    let eps_sq = legendre_u64(r, p) == 1;
    let two_eps_sq = legendre_u64(r2, p) == 1;
    let ord_e = multiplicative_order(r, p);
    let ord_2e = multiplicative_order(r2, p);
    let order_test = |ord: u64| -> Option<bool> {
        // an element of order 4 is a square iff 8 | p - 1
        (ord == 4).then(|| p % 8 == 1)
    };
    let matches = !eps_sq && !two_eps_sq;
    let disagreement = if matches {
        None
    } else {
        Some(format!(
            "2*eps reduces to {} = 2 * (4th root of unity) mod (sqrt {}), a quadratic residue: \
             the blanket nonsquare claim fails for 2*eps (chi(2)chi(i) = (-1)(-1) = +1 whenever \
             p = 5 mod 8); the order-4 criterion does not apply to it (order {})",
            r2, p, ord_2e
        ))
    };
    Ok(UnitSquareAudit {
        p,
        eps_residue: r,
        two_eps_residue: r2,
        eps_residue_order: ord_e,
        two_eps_residue_order: ord_2e,
        eps_is_local_square: eps_sq,
        two_eps_is_local_square: two_eps_sq,
        order_test_eps: order_test(ord_e),
        order_test_two_eps: order_test(ord_2e),
        matches_nonsquare_claim: matches,
        disagreement,
    })
}

trait ModU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModU64 for Int {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        self.mod_floor(&Int::from(m)).to_u64().unwrap()
    }
}
