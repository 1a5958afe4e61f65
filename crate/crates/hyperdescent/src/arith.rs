//! Exact integer and rational arithmetic primitives.
//!
//! Everything downstream works over `BigInt` / `BigRational`; this module
//! supplies the number-theoretic basics: Jacobi/Legendre symbols,
//! deterministic 64-bit primality, factorization with divisor enumeration,
//! exact integer square roots, square roots mod p^k (Tonelli-Shanks plus
//! Hensel lifting), and square tests in R, Q_p and Q_2.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand constructors used all over the crate.
pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(int(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

/// x^k for any integer k (x nonzero when k < 0).
pub fn rat_pow(x: &Rat, k: i64) -> Rat {
    let mut r = Rat::from_integer(Int::one());
    for _ in 0..k.unsigned_abs() {
        r = &r * x;
    }
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

fn mod_u32(x: &Int, m: u32) -> u32 {
    x.mod_floor(&Int::from(m)).to_u32().unwrap()
}

/// Jacobi symbol (a/n) for odd n > 0; 0 when gcd(a, n) > 1.
pub fn jacobi(a: &Int, n: &Int) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi: modulus must be odd positive");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            let r = mod_u32(&n, 8);
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if mod_u32(&a, 4) == 3 && mod_u32(&n, 4) == 3 {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol (a/p) for odd prime p.
pub fn legendre(a: &Int, p: u64) -> i32 {
    jacobi(a, &Int::from(p))
}

pub fn legendre_u64(a: u64, p: u64) -> i32 {
    legendre(&Int::from(a), p)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid; panics if gcd(a, m) != 1
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert!(old_r.abs() == 1, "inv_mod: not invertible");
    (old_s * old_r.signum()).rem_euclid(m as i128) as u64
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, valid for all n < 2^64 with this witness set.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p >= lo).collect()
}

fn small_primes() -> &'static [u64] {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    CACHE.get_or_init(|| primes_up_to(10_000))
}

/// Pollard rho (Brent variant) for a composite n with no factor below 10^4.
fn rho_factor(n: u64, seed: u64) -> u64 {
    let c = 1 + seed % (n - 1);
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    let mut saved = 2u64;
    let mut count = 0u64;
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = num::integer::gcd(x.abs_diff(y), n);
        count += 1;
        if count % 128 == 0 {
            saved = x;
        }
        if count > 1 << 24 {
            break;
        }
    }
    let _ = saved;
    if d != n && d != 1 {
        d
    } else {
        rho_factor(n, seed + 1)
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push((n, 1));
        return;
    }
    let d = rho_factor(n, 1);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut raw: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            raw.push((p, e));
        }
    }
    if n > 1 {
        factor_u64_into(n, &mut raw);
    }
    raw.sort();
    // merge repeated primes from the recursive splits
    let mut merged: Vec<(u64, u32)> = Vec::new();
    for (p, e) in raw {
        if let Some(last) = merged.last_mut() {
            if last.0 == p {
                last.1 += e;
                continue;
            }
        }
        merged.push((p, e));
    }
    merged
}

/// A signed integer in fully factored form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i32,
    pub pairs: Vec<(Int, u32)>,
}

impl Factorization {
    pub fn of(n: &Int) -> Factorization {
        assert!(!n.is_zero(), "factor of zero");
        let sign = if n.is_negative() { -1 } else { 1 };
        let mag = n.abs();
        let m = mag
            .to_u64()
            .unwrap_or_else(|| panic!("factorization restricted to |n| < 2^64, got {}", n));
        let pairs = factor_u64(m)
            .into_iter()
            .map(|(p, e)| (Int::from(p), e))
            .collect();
        Factorization { sign, pairs }
    }

    /// Factor a value that may exceed machine words but is (4096)-smooth up
    /// to a u64-sized cofactor, e.g. curve discriminants 2^7 (2^i p^j)^10.
    pub fn of_big(n: &Int) -> Factorization {
        assert!(!n.is_zero(), "factor of zero");
        let sign = if n.is_negative() { -1 } else { 1 };
        let mut mag = n.abs();
        let mut pairs: Vec<(Int, u32)> = Vec::new();
        for p in 2u64..4096 {
            if !is_prime_u64(p) {
                continue;
            }
            let pb = Int::from(p);
            let mut e = 0u32;
            loop {
                let (q, r) = mag.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                mag = q;
                e += 1;
            }
            if e > 0 {
                pairs.push((pb, e));
            }
            if mag.is_one() {
                break;
            }
        }
        if !mag.is_one() {
            let m = mag.to_u64().unwrap_or_else(|| {
                panic!("cofactor after small-prime stripping still exceeds 2^64")
            });
            for (p, e) in factor_u64(m) {
                pairs.push((Int::from(p), e));
            }
        }
        Factorization::from_pairs(sign, pairs)
    }

    /// Build from known prime-power data without factoring (used for values
    /// like 2^7 p^{10j} that overflow machine words).
    pub fn from_pairs(sign: i32, pairs: Vec<(Int, u32)>) -> Factorization {
        assert!(sign == 1 || sign == -1);
        let mut pairs: Vec<_> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        pairs.sort();
        Factorization { sign, pairs }
    }

    pub fn value(&self) -> Int {
        let mut v = int(self.sign as i64);
        for (p, e) in &self.pairs {
            v *= p.pow(*e);
        }
        v
    }

    /// Positive divisors, unsorted magnitude order not guaranteed.
    pub fn divisors(&self) -> Vec<Int> {
        let mut out = vec![Int::one()];
        for (p, e) in &self.pairs {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            let mut pk = Int::one();
            for _ in 0..=*e {
                for d in &out {
                    next.push(d * &pk);
                }
                pk *= p;
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All b >= 1 with b^2 dividing the value.
    pub fn square_divisor_roots(&self) -> Vec<Int> {
        let halved: Vec<(Int, u32)> = self
            .pairs
            .iter()
            .map(|(p, e)| (p.clone(), e / 2))
            .collect();
        Factorization::from_pairs(1, halved).divisors()
    }

    /// The squarefree kernel, carrying the sign.
    pub fn squarefree_part(&self) -> Int {
        let mut v = int(self.sign as i64);
        for (p, e) in &self.pairs {
            if e % 2 == 1 {
                v *= p;
            }
        }
        v
    }

    /// Signed squarefree divisors of the magnitude: {+-d : d squarefree, d | n}.
    pub fn signed_squarefree_divisors(&self) -> Vec<Int> {
        let sf: Vec<(Int, u32)> = self.pairs.iter().map(|(p, _)| (p.clone(), 1)).collect();
        let pos = Factorization::from_pairs(1, sf).divisors();
        let mut out = Vec::with_capacity(pos.len() * 2);
        for d in pos {
            out.push(d.clone());
            out.push(-d);
        }
        out.sort();
        out
    }
}

pub fn squarefree_part(n: &Int) -> Int {
    Factorization::of(n).squarefree_part()
}

/// Exact integer square root: Some(r) iff n = r^2 with r >= 0.
pub fn int_sqrt_exact(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    if n.is_zero() {
        return Some(Int::zero());
    }
    // cheap residue filter before the big-integer root
    let r64 = mod_u32(n, 64);
    if ![0, 1, 4, 9, 16, 17, 25, 33, 36, 41, 49, 57].contains(&r64) {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn is_square_int(n: &Int) -> bool {
    int_sqrt_exact(n).is_some()
}

/// Exact rational square root.
pub fn rat_sqrt_exact(x: &Rat) -> Option<Rat> {
    let n = int_sqrt_exact(x.numer())?;
    let d = int_sqrt_exact(x.denom())?;
    Some(Rat::new(n, d))
}

pub fn is_square_rat(x: &Rat) -> bool {
    rat_sqrt_exact(x).is_some()
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &Int, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = Int::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn vp_rat(x: &Rat, p: u64) -> i64 {
    assert!(!x.is_zero());
    vp_int(x.numer(), p) as i64 - vp_int(x.denom(), p) as i64
}

/// The unit part x / p^{v_p(x)} as a rational.
pub fn rat_unit_part(x: &Rat, p: u64) -> Rat {
    let v = vp_rat(x, p);
    let pw = Int::from(p).pow(v.unsigned_abs() as u32);
    if v >= 0 {
        x / Rat::from_integer(pw)
    } else {
        x * Rat::from_integer(pw)
    }
}

/// Reduce a p-integral rational mod p (denominator must be prime to p).
pub fn rat_mod_p(x: &Rat, p: u64) -> u64 {
    let pb = Int::from(p);
    let n = x.numer().mod_floor(&pb).to_u64().unwrap();
    let d = x.denom().mod_floor(&pb).to_u64().unwrap();
    assert!(d != 0, "rat_mod_p: denominator divisible by {}", p);
    mul_mod(n, inv_mod(d, p), p)
}

/// Reduce a 2-integral rational mod 2^k (k <= 32).
pub fn rat_mod_2k(x: &Rat, k: u32) -> u64 {
    let m = 1u64 << k;
    let mb = Int::from(m);
    let n = x.numer().mod_floor(&mb).to_u64().unwrap();
    let d = x.denom().mod_floor(&mb).to_u64().unwrap();
    assert!(d % 2 == 1, "rat_mod_2k: denominator is even");
    // inverse of odd d mod 2^k by Newton iteration
    let mut inv = 1u64;
    for _ in 0..6 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(d.wrapping_mul(inv)));
    }
    (n.wrapping_mul(inv)) & (m - 1)
}

/// Is x a square in Q_p (odd p)?
pub fn is_square_qp(x: &Rat, p: u64) -> bool {
    assert!(p % 2 == 1 && is_prime_u64(p));
    if x.is_zero() {
        return true;
    }
    if vp_rat(x, p) % 2 != 0 {
        return false;
    }
    // rat_mod_p folds the sign into the residue
    let r = rat_mod_p(&rat_unit_part(x, p), p);
    legendre_u64(r, p) == 1
}

/// Is x a square in Q_2? (Negative rationals can be: -7 = 1 mod 8.)
pub fn is_square_q2(x: &Rat) -> bool {
    if x.is_zero() {
        return true;
    }
    if vp_rat(x, 2) % 2 != 0 {
        return false;
    }
    let u = rat_unit_part(x, 2);
    rat_mod_2k(&u, 3) == 1
}

/// Is x a square in R?
pub fn is_square_real(x: &Rat) -> bool {
    !x.is_negative()
}

/// Tonelli-Shanks square root mod an odd prime. Returns r with r^2 = a (mod p).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // write p-1 = q 2^s with q odd
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // find a non-residue
    let mut z = 2;
    while legendre_u64(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Newton-lift a square root of a (p odd, a a unit mod p) to precision p^k.
pub fn sqrt_mod_pk(a: &Int, p: u64, k: u32) -> Option<Int> {
    let pb = Int::from(p);
    let a0 = a.mod_floor(&pb).to_u64().unwrap();
    if a0 == 0 {
        return None; // unit square roots only; strip valuation first
    }
    let mut r = Int::from(sqrt_mod_prime(a0, p)?);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let modulus = pb.pow(prec);
        // r <- r - (r^2 - a) / (2r)  (mod p^prec)
        let two_r_inv = mod_inverse(&(&r * 2), &modulus)?;
        let num = (&r * &r - a).mod_floor(&modulus);
        r = (&r - num * two_r_inv).mod_floor(&modulus);
    }
    Some(r)
}

/// Square root of a unit in Z_2 (a = 1 mod 8) to precision 2^k.
pub fn sqrt_mod_2k(a: &Int, k: u32) -> Option<Int> {
    let eight = int(8);
    if a.mod_floor(&eight) != Int::one() {
        return None;
    }
    // lift r^2 = a (mod 2^m): from mod 2^m to 2^{m+1}, adjust by 2^{m-1}
    let mut r = Int::one();
    for m in 3..k {
        let modulus = Int::one() << (m + 1) as usize;
        if (&r * &r - a).mod_floor(&modulus) != Int::zero() {
            r += Int::one() << (m - 1) as usize;
        }
    }
    let modulus = Int::one() << k as usize;
    debug_assert!((&r * &r - a).mod_floor(&modulus).is_zero());
    Some(r.mod_floor(&modulus))
}

pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn legendre_matches_exhaustive_square_table() {
        for &p in &[3u64, 5, 7, 11, 13, 17, 97] {
            let mut squares = vec![false; p as usize];
            for x in 0..p {
                squares[mul_mod(x, x, p) as usize] = true;
            }
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_u64(a, p), expect, "({}/{})", a, p);
            }
        }
    }

    #[test]
    fn legendre_spot_values() {
        assert_eq!(legendre(&int(2), 13), -1);
        assert_eq!(legendre(&int(-1), 13), 1);
        assert_eq!(legendre(&int(-2), 11), 1);
        assert_eq!(legendre(&int(-1), 7), -1);
        assert_eq!(legendre(&int(-2), 7), -1);
    }

    #[test]
    fn jacobi_is_multiplicative() {
        let mut rng = StdRng::seed_from_u64(0x6a63);
        for _ in 0..500 {
            let n = 2 * rng.gen_range(1..500i64) + 1;
            let a = rng.gen_range(-300..300i64);
            let b = rng.gen_range(-300..300i64);
            assert_eq!(
                jacobi(&int(a * b), &int(n)),
                jacobi(&int(a), &int(n)) * jacobi(&int(b), &int(n))
            );
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        let by_trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..2000 {
            assert_eq!(is_prime_u64(n), by_trial(n), "n={}", n);
        }
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(3215031751)); // strong pseudoprime to 2,3,5,7
        assert!(is_prime_u64(2305843009213693951)); // 2^61 - 1
    }

    #[test]
    fn factorization_known_values() {
        let f = Factorization::of(&int(46656));
        assert_eq!(f.pairs, vec![(int(2), 6), (int(3), 6)]);
        let f = Factorization::of(&int(63504));
        assert_eq!(f.pairs, vec![(int(2), 4), (int(3), 4), (int(7), 2)]);
        let f = Factorization::of(&int(-140625));
        assert_eq!(f.sign, -1);
        assert_eq!(f.pairs, vec![(int(3), 2), (int(5), 6)]);
    }

    #[test]
    fn factorization_reassembles_random_values() {
        let mut rng = StdRng::seed_from_u64(0xfac7);
        for _ in 0..300 {
            let n = rng.gen_range(1..1_000_000_000i64);
            let f = Factorization::of(&int(n));
            assert_eq!(f.value(), int(n));
            for (p, _) in &f.pairs {
                assert!(is_prime_u64(p.to_u64().unwrap()));
            }
        }
    }

    #[test]
    fn divisor_enumeration() {
        let f = Factorization::of(&int(360)); // 2^3 3^2 5
        let d = f.divisors();
        assert_eq!(d.len(), 24);
        assert!(d.contains(&int(45)));
        let roots = f.square_divisor_roots();
        assert_eq!(roots, vec![int(1), int(2), int(3), int(6)]);
        let sqf = f.signed_squarefree_divisors();
        assert_eq!(sqf.len(), 16);
        assert!(sqf.contains(&int(-30)) && sqf.contains(&int(30)));
        assert_eq!(squarefree_part(&int(360)), int(10));
        assert_eq!(squarefree_part(&int(-12)), int(-3));
    }

    #[test]
    fn integer_square_roots() {
        assert_eq!(int_sqrt_exact(&int(46656)), Some(int(216)));
        assert_eq!(int_sqrt_exact(&int(63504)), Some(int(252)));
        assert_eq!(int_sqrt_exact(&int(1380)), None); // f(6) for the p=13 member
        assert_eq!(int_sqrt_exact(&int(-4)), None);
        let mut rng = StdRng::seed_from_u64(0x5154);
        for _ in 0..500 {
            let r = Int::from(rng.gen_range(0..1u128 << 80));
            assert_eq!(int_sqrt_exact(&(&r * &r)), Some(r.clone()));
            if r > Int::zero() {
                assert_eq!(int_sqrt_exact(&(&r * &r + 1)), None);
            }
        }
        assert!(is_square_rat(&rat(49, 64)));
        assert!(!is_square_rat(&rat(49, 48)));
        assert_eq!(rat_sqrt_exact(&rat(225, 4)), Some(rat(15, 2)));
    }

    #[test]
    fn valuations_and_unit_parts() {
        assert_eq!(vp_int(&int(1380), 2), 2);
        assert_eq!(vp_int(&int(1380), 5), 1);
        assert_eq!(vp_rat(&rat(9, 50), 5), -2);
        assert_eq!(rat_unit_part(&rat(9, 50), 5), rat(9, 2));
        assert_eq!(rat_mod_p(&rat(9, 2), 5), 2); // 9 * inv(2) = 9*3 = 27 = 2 (mod 5)
        assert_eq!(rat_mod_2k(&rat(7, 3), 3), 5); // 7 * inv(3) = 7*3 = 21 = 5 (mod 8)
    }

    /// Oracle: a p-integral unit u is a square in Q_p iff some y < p^3 has
    /// y^2 = u (mod p^3); in Q_2 iff u = 1 (mod 8). Checked by brute force.
    #[test]
    fn local_square_tests_match_residue_search() {
        for &p in &[3u64, 5, 7, 13] {
            let p3 = (p * p * p) as i64;
            for u in 1..p3 {
                if u as u64 % p == 0 {
                    continue;
                }
                let brute = (0..p3).any(|y| (y * y - u).rem_euclid(p3) == 0);
                assert_eq!(is_square_qp(&rat_i(u), p), brute, "u={} p={}", u, p);
                let brute_neg = (0..p3).any(|y| (y * y + u).rem_euclid(p3) == 0);
                assert_eq!(is_square_qp(&rat_i(-u), p), brute_neg, "u={} p={}", -u, p);
                // odd valuation never a square
                assert!(!is_square_qp(&(rat_i(u) * rat_i(p as i64)), p));
                // even valuation reduces to the unit
                assert_eq!(
                    is_square_qp(&(rat_i(u) * rat_i((p * p) as i64)), p),
                    brute
                );
            }
        }
        for u in (1..128i64).step_by(2) {
            let brute = (0..256i64).any(|y| (y * y - u).rem_euclid(128) == 0);
            assert_eq!(is_square_q2(&rat_i(u)), brute, "u={}", u);
            let brute_neg = (0..256i64).any(|y| (y * y + u).rem_euclid(128) == 0);
            assert_eq!(is_square_q2(&rat_i(-u)), brute_neg, "u={}", -u);
            assert!(!is_square_q2(&rat_i(2 * u)));
            assert_eq!(is_square_q2(&rat_i(4 * u)), brute);
            assert!(!is_square_q2(&rat_i(-u * u)));
        }
        assert!(is_square_qp(&rat(1, 4), 7));
        assert!(is_square_q2(&rat(17, 9)));
        assert!(!is_square_real(&rat_i(-2)));
    }

    #[test]
    fn modular_square_roots_lift_correctly() {
        for &p in &[3u64, 5, 7, 11, 13, 29, 97] {
            for a in 0..p {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert_eq!(legendre_u64(a, p), -1),
                }
            }
        }
        let r = sqrt_mod_pk(&int(2), 7, 6).unwrap();
        let m = int(7).pow(6);
        assert!((&r * &r - int(2)).mod_floor(&m).is_zero());
        assert_eq!(sqrt_mod_pk(&int(3), 7, 6), None);

        let r = sqrt_mod_2k(&int(17), 10).unwrap();
        assert!((&r * &r - int(17)).mod_floor(&(Int::one() << 10)).is_zero());
        assert_eq!(sqrt_mod_2k(&int(3), 10), None);
    }

    #[test]
    fn prime_listing() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(100, 130), vec![101, 103, 107, 109, 113, 127]);
        assert_eq!(primes_up_to(1).len(), 0);
    }
}
