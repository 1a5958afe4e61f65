//! Square classes in completions of quadratic etale algebras.
//!
//! A factor is either Q itself or Q[T]/(T^2 - c); at a place v it becomes
//! R, C, R x R, Q_v, Q_v(sqrt c) or Q_v x Q_v, and this module computes the
//! class of a nonzero element in the F_2-vector space K_w^* / (K_w^*)^2 for
//! each completion, as a bitmask (unit-class coordinates first, valuation
//! parity last; split factors concatenate the two components, embedding
//! T |-> +sqrt(c) first).
//!
//! Dimensions: R: 1, C: 0, R x R: 2, Q_p: 2, Q_2: 3, quadratic field over
//! Q_p: 2, over Q_2: 4, Q_p x Q_p: 4, Q_2 x Q_2: 6.
//!
//! The 2-adic unit tests work modulo pi^(2e+1) with e the ramification
//! index of 2, which decides squareness exactly; odd-p unit tests reduce to
//! Legendre symbols in the residue field. Split factors over Q_p and Q_2
//! embed through an adaptively lifted square root of c, with the exactly
//! known valuation of the norm steering the precision.
//!
//! Over Q_2 the unramified quadratic extension must be handled in the
//! theta-basis of its maximal order Z_2[theta], theta = (1 + sqrt u)/2:
//! the index-2 subring Z_2[sqrt u] misreports valuations like
//! v(1 + sqrt u) = 1.

use crate::arith::{
    is_prime_u64, legendre_u64, rat_i, sqrt_mod_2k, sqrt_mod_pk, vp_rat, Int, Rat,
};
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{}", p),
        }
    }
}

/// Reduce a 2-integral rational mod 2^k, as an Int in [0, 2^k).
fn rat_mod_2k_int(x: &Rat, k: u32) -> Int {
    let m = Int::one() << k as usize;
    let n = x.numer().mod_floor(&m);
    let d = x.denom().mod_floor(&m);
    assert!(d.is_odd(), "denominator not a 2-adic unit");
    let inv = crate::arith::mod_inverse(&d, &m).unwrap();
    (n * inv).mod_floor(&m)
}

/// Reduce a p-integral rational mod p^k.
fn rat_mod_pk_int(x: &Rat, p: u64, k: u32) -> Int {
    let m = Int::from(p).pow(k);
    let n = x.numer().mod_floor(&m);
    let d = x.denom().mod_floor(&m);
    assert!(
        !(&d % Int::from(p)).is_zero(),
        "denominator not a p-adic unit"
    );
    let inv = crate::arith::mod_inverse(&d, &m).unwrap();
    (n * inv).mod_floor(&m)
}

fn power_rat(p: u64, v: i64) -> Rat {
    let pw = Rat::from_integer(Int::from(p).pow(v.unsigned_abs() as u32));
    if v >= 0 {
        pw
    } else {
        pw.recip()
    }
}

fn scale_pow2(x: &Rat, k: i64) -> Rat {
    x * power_rat(2, k)
}

fn rat_pow(x: &Rat, k: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= x;
    }
    if k >= 0 {
        acc
    } else {
        acc.recip()
    }
}

#[derive(Debug, Clone)]
enum Kind {
    RealLine,
    Complex,
    SplitReal,
    QpLine {
        p: u64,
    },
    Q2Line,
    /// Q_p(sqrt c), v_p(c) odd; uniformizer pi = T / p^((v_p(c)-1)/2)
    RamifiedOdd {
        p: u64,
        half_vc: u32,
        /// is the unit part of c a non-residue (pi^2 = p * unit)
        uc_nonsquare: bool,
    },
    /// Q_p(sqrt c), v_p(c) even, unit part a non-residue
    UnramifiedOdd {
        p: u64,
        half_vc: u32,
        u_res: u64,
    },
    /// Q_p x Q_p: c a square in Q_p
    SplitQp {
        p: u64,
        half_vc: i64,
        u: Rat,
    },
    Split2 {
        half_vc: i64,
        u: Rat,
    },
    /// Q_2(sqrt c), v_2(c) even, unit = 5 mod 8; O = Z_2[theta]
    Unramified2 {
        half_vc: i64,
        table: SquareTable,
    },
    /// Q_2(sqrt c), v_2(c) odd; T~ = T / 2^((v_2(c)-1)/2) is a uniformizer
    Ramified2Odd {
        half_vc: i64,
        table: SquareTable,
    },
    /// Q_2(sqrt c), v_2(c) even, unit = 3 mod 4; pi = 1 + T~
    Ramified2Unit {
        half_vc: i64,
        u: Rat,
        table: SquareTable,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TwoAdicShape {
    /// theta-coordinates, theta^2 = theta - n
    Unram { n_mod8: u64 },
    /// T~-coordinates, T~^2 = 2u
    RamOdd { u_mod8: u64 },
    /// T~-coordinates, T~^2 = u; residues identified by (+4, +4)
    RamUnit { u_mod8: u64 },
}

impl TwoAdicShape {
    /// Multiply in the order, on exact rational coordinates. Using an
    /// integer representative of the structure constant congruent to the
    /// true one mod 8 is sound: products only ever feed the residue maps.
    fn mul(&self, x: (&Rat, &Rat), y: (&Rat, &Rat)) -> (Rat, Rat) {
        match self {
            TwoAdicShape::Unram { n_mod8 } => {
                let n = rat_i(*n_mod8 as i64);
                (
                    x.0 * y.0 - x.1 * y.1 * &n,
                    x.0 * y.1 + x.1 * y.0 + x.1 * y.1,
                )
            }
            TwoAdicShape::RamOdd { u_mod8 } => {
                let t2 = rat_i(2 * *u_mod8 as i64);
                (x.0 * y.0 + x.1 * y.1 * &t2, x.0 * y.1 + x.1 * y.0)
            }
            TwoAdicShape::RamUnit { u_mod8 } => {
                let t2 = rat_i(*u_mod8 as i64);
                (x.0 * y.0 + x.1 * y.1 * &t2, x.0 * y.1 + x.1 * y.0)
            }
        }
    }

    fn is_unit_residue(&self, x: u64, y: u64) -> bool {
        match self {
            TwoAdicShape::Unram { .. } => x % 2 == 1 || y % 2 == 1,
            TwoAdicShape::RamOdd { .. } => x % 2 == 1,
            TwoAdicShape::RamUnit { .. } => (x + y) % 2 == 1,
        }
    }

    /// Residue datum of a unit, at the precision that decides squareness.
    fn residue(&self, s: &Rat, t: &Rat) -> (u64, u64) {
        let s8 = rat_mod_2k_int(s, 3).to_u64().unwrap();
        match self {
            TwoAdicShape::Unram { .. } => (s8, rat_mod_2k_int(t, 3).to_u64().unwrap()),
            TwoAdicShape::RamOdd { .. } => (s8, rat_mod_2k_int(t, 2).to_u64().unwrap()),
            TwoAdicShape::RamUnit { .. } => {
                canon_ram_unit(s8, rat_mod_2k_int(t, 3).to_u64().unwrap())
            }
        }
    }

    fn square_residue(&self, x: u64, y: u64) -> (u64, u64) {
        match self {
            TwoAdicShape::Unram { n_mod8 } => (
                (x * x + (8 - n_mod8 % 8) % 8 * (y * y)) % 8,
                (2 * x * y + y * y) % 8,
            ),
            TwoAdicShape::RamOdd { u_mod8 } => {
                ((x * x + 2 * u_mod8 * y * y) % 8, (2 * x * y) % 4)
            }
            TwoAdicShape::RamUnit { u_mod8 } => {
                canon_ram_unit((x * x + u_mod8 * y * y) % 8, (2 * x * y) % 8)
            }
        }
    }
}

/// Residues mod pi^5 in the unit-type ramified order are pairs mod 8 with
/// (s, t) identified with (s+4, t+4).
fn canon_ram_unit(s: u64, t: u64) -> (u64, u64) {
    std::cmp::min((s, t), ((s + 4) % 8, (t + 4) % 8))
}

/// Unit-square residues and a fixed generator basis of the 8-element unit
/// class group of a quadratic extension of Q_2.
#[derive(Debug, Clone)]
struct SquareTable {
    shape: TwoAdicShape,
    squares: HashSet<(u64, u64)>,
    gens: Vec<(Rat, Rat)>,
}

impl SquareTable {
    fn build(shape: TwoAdicShape) -> SquareTable {
        let mut squares = HashSet::new();
        for x in 0..8u64 {
            for y in 0..8u64 {
                if shape.is_unit_residue(x, y) {
                    squares.insert(shape.square_residue(x, y));
                }
            }
        }
        let mut table = SquareTable {
            shape,
            squares,
            gens: vec![],
        };
        // deterministic greedy generator scan
        'cand: for x in 0..8i64 {
            for y in 0..8i64 {
                if table.gens.len() == 3 {
                    break 'cand;
                }
                if !shape.is_unit_residue(x as u64, y as u64) {
                    continue;
                }
                let cand = (rat_i(x), rat_i(y));
                let mut independent = true;
                for mask in 0..1u64 << table.gens.len() {
                    if table.unit_is_square(&table.product(&cand, mask)) {
                        independent = false;
                        break;
                    }
                }
                if independent {
                    table.gens.push(cand);
                }
            }
        }
        assert_eq!(table.gens.len(), 3, "unit class group must be (Z/2)^3");
        table
    }

    fn product(&self, x: &(Rat, Rat), mask: u64) -> (Rat, Rat) {
        let mut acc = x.clone();
        for (i, g) in self.gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = self.shape.mul((&acc.0, &acc.1), (&g.0, &g.1));
            }
        }
        acc
    }

    fn unit_is_square(&self, x: &(Rat, Rat)) -> bool {
        self.squares.contains(&self.shape.residue(&x.0, &x.1))
    }

    /// Coordinates of a unit class in the generator basis.
    fn coords(&self, s: &Rat, t: &Rat) -> u64 {
        let x = (s.clone(), t.clone());
        for mask in 0..8u64 {
            if self.unit_is_square(&self.product(&x, mask)) {
                return mask;
            }
        }
        panic!("unit class outside the generated group");
    }
}

/// One factor of an etale algebra at one place.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    pub place: Place,
    /// None for the rational line factor, Some(c) for Q[T]/(T^2 - c)
    pub c: Option<Rat>,
    kind: Kind,
}

impl LocalFactor {
    pub fn new(place: Place, c: Option<Rat>) -> LocalFactor {
        let kind = match (&place, &c) {
            (Place::Infinity, None) => Kind::RealLine,
            (Place::Infinity, Some(c)) => {
                assert!(!c.is_zero());
                if c.is_negative() {
                    Kind::Complex
                } else {
                    Kind::SplitReal
                }
            }
            (Place::Finite(2), None) => Kind::Q2Line,
            (Place::Finite(p), None) => {
                assert!(is_prime_u64(*p));
                Kind::QpLine { p: *p }
            }
            (Place::Finite(2), Some(c)) => classify_2adic(c),
            (Place::Finite(p), Some(c)) => classify_odd(*p, c),
        };
        LocalFactor { place, c, kind }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Complex => 0,
            Kind::RealLine => 1,
            Kind::SplitReal
            | Kind::QpLine { .. }
            | Kind::RamifiedOdd { .. }
            | Kind::UnramifiedOdd { .. } => 2,
            Kind::Q2Line => 3,
            Kind::SplitQp { .. }
            | Kind::Unramified2 { .. }
            | Kind::Ramified2Odd { .. }
            | Kind::Ramified2Unit { .. } => 4,
            Kind::Split2 { .. } => 6,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(
            self.kind,
            Kind::SplitReal | Kind::SplitQp { .. } | Kind::Split2 { .. }
        )
    }

    pub fn is_square(&self, a: &Rat, b: &Rat) -> bool {
        self.square_class(a, b) == 0
    }

    /// Square class of the element a + bT (b must be zero on line factors).
    pub fn square_class(&self, a: &Rat, b: &Rat) -> u64 {
        match &self.kind {
            Kind::RealLine => {
                assert!(b.is_zero() && !a.is_zero());
                u64::from(a.is_negative())
            }
            Kind::Complex => 0,
            Kind::SplitReal => {
                let c = self.c.as_ref().unwrap();
                let plus = real_component_negative(a, b, c);
                let minus = real_component_negative(a, &-b, c);
                u64::from(plus) | u64::from(minus) << 1
            }
            Kind::QpLine { p } => {
                assert!(b.is_zero() && !a.is_zero());
                qp_class(a, *p)
            }
            Kind::Q2Line => {
                assert!(b.is_zero() && !a.is_zero());
                q2_class(a)
            }
            Kind::RamifiedOdd {
                p,
                half_vc,
                uc_nonsquare,
            } => {
                assert!(!(a.is_zero() && b.is_zero()));
                // v_K(a) is even, v_K(bT) odd: the minimum is unambiguous
                let va = if a.is_zero() {
                    i64::MAX
                } else {
                    2 * vp_rat(a, *p)
                };
                let vb = if b.is_zero() {
                    i64::MAX
                } else {
                    2 * vp_rat(b, *p) + 2 * *half_vc as i64 + 1
                };
                let v = va.min(vb);
                // unit part of x / pi^v: pi^2 = p * uc brings in a factor
                // uc^floor(v/2) next to the coordinate unit
                let res = if va < vb {
                    crate::arith::rat_mod_p(&crate::arith::rat_unit_part(a, *p), *p)
                } else {
                    crate::arith::rat_mod_p(&crate::arith::rat_unit_part(b, *p), *p)
                };
                let mut nonsq = legendre_u64(res, *p) != 1;
                if *uc_nonsquare && v.div_euclid(2).rem_euclid(2) == 1 {
                    nonsq = !nonsq;
                }
                u64::from(nonsq) | u64::from(v.rem_euclid(2) == 1) << 1
            }
            Kind::UnramifiedOdd { p, half_vc, u_res } => {
                assert!(!(a.is_zero() && b.is_zero()));
                let bt = b * Rat::from_integer(Int::from(*p).pow(*half_vc));
                let va = if a.is_zero() { i64::MAX } else { vp_rat(a, *p) };
                let vb = if bt.is_zero() { i64::MAX } else { vp_rat(&bt, *p) };
                let v = va.min(vb);
                let pv = power_rat(*p, v);
                let alpha = if a.is_zero() {
                    0
                } else {
                    crate::arith::rat_mod_p(&(a / &pv), *p)
                };
                let beta = if bt.is_zero() {
                    0
                } else {
                    crate::arith::rat_mod_p(&(bt / &pv), *p)
                };
                let nonsq = !fp2_is_square(alpha, beta, *u_res, *p);
                u64::from(nonsq) | u64::from(v.rem_euclid(2) == 1) << 1
            }
            Kind::SplitQp { p, half_vc, u } => {
                let (c1, c2) = split_p_classes(a, b, *p, *half_vc, u);
                c1 | c2 << 2
            }
            Kind::Split2 { half_vc, u } => {
                let (c1, c2) = split_2_classes(a, b, *half_vc, u);
                c1 | c2 << 3
            }
            Kind::Unramified2 { half_vc, table } => {
                let bt = scale_pow2(b, *half_vc);
                // theta-coordinates: a + bt*T~ = (a - bt) + (2 bt) theta
                let s = a - &bt;
                let t = rat_i(2) * &bt;
                assert!(!(s.is_zero() && t.is_zero()));
                let v = match (s.is_zero(), t.is_zero()) {
                    (true, false) => vp_rat(&t, 2),
                    (false, true) => vp_rat(&s, 2),
                    _ => vp_rat(&s, 2).min(vp_rat(&t, 2)),
                };
                let coords = table.coords(&scale_pow2(&s, -v), &scale_pow2(&t, -v));
                coords | u64::from(v.rem_euclid(2) == 1) << 3
            }
            Kind::Ramified2Odd { half_vc, table } => {
                let bt = scale_pow2(b, *half_vc);
                assert!(!(a.is_zero() && bt.is_zero()));
                let va = if a.is_zero() {
                    i64::MAX
                } else {
                    2 * vp_rat(a, 2)
                };
                let vb = if bt.is_zero() {
                    i64::MAX
                } else {
                    2 * vp_rat(&bt, 2) + 1
                };
                let v = va.min(vb);
                // T~^2 = 2u exactly, from the unit part of c; divide by the
                // fixed uniformizer power T~^v, not by a power of 2
                let two_u = self.c.as_ref().unwrap() * power_rat(2, -2 * half_vc);
                let (s, t) = if v % 2 == 0 {
                    let div = rat_pow(&two_u, v / 2);
                    (a / &div, &bt / &div)
                } else {
                    // (a + bt T~) / ((2u)^((v-1)/2) T~)
                    let div = rat_pow(&two_u, (v - 1).div_euclid(2));
                    (&bt / &div, a / (&div * &two_u))
                };
                debug_assert_eq!(vp_rat(&(&s * &s - &t * &t * &two_u), 2), 0);
                let coords = table.coords(&s, &t);
                coords | u64::from(v.rem_euclid(2) == 1) << 3
            }
            Kind::Ramified2Unit { half_vc, u, table } => {
                let bt = scale_pow2(b, *half_vc);
                assert!(!(a.is_zero() && bt.is_zero()));
                // v_K(x) = v_2(N(x)); peel powers of pi = 1 + T~ exactly,
                // using pi^{-1} = (1 - T~)/(1 - u)
                let norm = a * a - &bt * &bt * u;
                assert!(!norm.is_zero(), "zero divisor");
                let v = vp_rat(&norm, 2);
                let one_minus_u = rat_i(1) - u;
                let (mut s, mut t) = (a.clone(), bt);
                for _ in 0..v.max(0) {
                    // multiply by pi^{-1} = (1 - T~)/(1 - u)
                    let ns = (&s - &t * u) / &one_minus_u;
                    let nt = (&t - &s) / &one_minus_u;
                    s = ns;
                    t = nt;
                }
                for _ in 0..(-v).max(0) {
                    // multiply by pi = 1 + T~
                    let ns = &s + &t * u;
                    let nt = &t + &s;
                    s = ns;
                    t = nt;
                }
                debug_assert_eq!(vp_rat(&(&s * &s - &t * &t * u), 2), 0);
                let coords = table.coords(&s, &t);
                coords | u64::from(v.rem_euclid(2) == 1) << 3
            }
        }
    }
}

fn classify_odd(p: u64, c: &Rat) -> Kind {
    assert!(is_prime_u64(p) && p % 2 == 1 && !c.is_zero());
    let vc = vp_rat(c, p);
    if vc.rem_euclid(2) == 1 {
        let uc = crate::arith::rat_unit_part(c, p);
        Kind::RamifiedOdd {
            p,
            half_vc: ((vc - 1) / 2)
                .try_into()
                .expect("clear denominators of c first"),
            uc_nonsquare: legendre_u64(crate::arith::rat_mod_p(&uc, p), p) != 1,
        }
    } else {
        let u = crate::arith::rat_unit_part(c, p);
        let u_res = crate::arith::rat_mod_p(&u, p);
        if legendre_u64(u_res, p) == 1 {
            Kind::SplitQp {
                p,
                half_vc: vc / 2,
                u,
            }
        } else {
            Kind::UnramifiedOdd {
                p,
                half_vc: (vc / 2).try_into().expect("clear denominators of c first"),
                u_res,
            }
        }
    }
}

fn classify_2adic(c: &Rat) -> Kind {
    assert!(!c.is_zero());
    let vc = vp_rat(c, 2);
    let u = crate::arith::rat_unit_part(c, 2);
    let u_mod8 = crate::arith::rat_mod_2k(&u, 3);
    if vc.rem_euclid(2) == 1 {
        Kind::Ramified2Odd {
            half_vc: (vc - 1) / 2,
            table: SquareTable::build(TwoAdicShape::RamOdd { u_mod8 }),
        }
    } else {
        let half_vc = vc / 2;
        match u_mod8 {
            1 => Kind::Split2 { half_vc, u },
            5 => {
                let u_mod32 = crate::arith::rat_mod_2k(&u, 5);
                let n_mod8 = ((32 + 1 - u_mod32 as i64) as u64 % 32) / 4 % 8;
                Kind::Unramified2 {
                    half_vc,
                    table: SquareTable::build(TwoAdicShape::Unram { n_mod8 }),
                }
            }
            3 | 7 => Kind::Ramified2Unit {
                half_vc,
                u: u.clone(),
                table: SquareTable::build(TwoAdicShape::RamUnit { u_mod8 }),
            },
            _ => unreachable!("odd unit mod 8"),
        }
    }
}

/// Sign of a + b sqrt(c) at the real place, exactly (c > 0; when b != 0 and
/// a^2 = b^2 c the element is a zero divisor and we refuse).
fn real_component_negative(a: &Rat, b: &Rat, c: &Rat) -> bool {
    if b.is_zero() {
        assert!(!a.is_zero());
        return a.is_negative();
    }
    if a.is_zero() {
        return b.is_negative();
    }
    if a.is_negative() == b.is_negative() {
        return a.is_negative();
    }
    let lhs = a * a;
    let rhs = b * b * c;
    assert!(lhs != rhs, "zero divisor");
    if lhs > rhs {
        a.is_negative()
    } else {
        b.is_negative()
    }
}

/// Square class in Q_p^*: bit0 = unit part a non-residue, bit1 = odd valuation.
fn qp_class(x: &Rat, p: u64) -> u64 {
    let v = vp_rat(x, p);
    let r = crate::arith::rat_mod_p(&crate::arith::rat_unit_part(x, p), p);
    u64::from(legendre_u64(r, p) != 1) | u64::from(v.rem_euclid(2) == 1) << 1
}

/// Square class in Q_2^*: bits (coordinate of -1, coordinate of 5,
/// valuation parity); units: 1 -> 00, 7 -> 01, 5 -> 10, 3 -> 11.
fn q2_class(x: &Rat) -> u64 {
    let v = vp_rat(x, 2);
    let u = crate::arith::rat_unit_part(x, 2);
    let unit_bits = match crate::arith::rat_mod_2k(&u, 3) {
        1 => 0b00,
        7 => 0b01,
        5 => 0b10,
        3 => 0b11,
        _ => unreachable!(),
    };
    unit_bits | u64::from(v.rem_euclid(2) == 1) << 2
}

/// Is alpha + beta*t a square in F_{p^2} = F_p[t]/(t^2 - u)?
fn fp2_is_square(alpha: u64, beta: u64, u: u64, p: u64) -> bool {
    assert!(alpha != 0 || beta != 0);
    let mul = |xa: u64, xb: u64, ya: u64, yb: u64| -> (u64, u64) {
        let cross = xb as u128 * yb as u128 % p as u128 * (u % p) as u128;
        let a = ((xa as u128 * ya as u128 + cross) % p as u128) as u64;
        let b = ((xa as u128 * yb as u128 + xb as u128 * ya as u128) % p as u128) as u64;
        (a, b)
    };
    let mut e = (p as u128 * p as u128 - 1) / 2;
    let (mut ra, mut rb) = (1u64, 0u64);
    let (mut za, mut zb) = (alpha % p, beta % p);
    while e > 0 {
        if e & 1 == 1 {
            let (na, nb) = mul(ra, rb, za, zb);
            ra = na;
            rb = nb;
        }
        let (na, nb) = mul(za, zb, za, zb);
        za = na;
        zb = nb;
        e >>= 1;
    }
    (ra, rb) == (1, 0)
}

/// Classes of the two components of a + bT in Q_p x Q_p (c = p^{2m} u with
/// u a square unit). The valuation of the norm is known exactly and bounds
/// how deep the lifted root must be read.
fn split_p_classes(a: &Rat, b: &Rat, p: u64, half_vc: i64, u: &Rat) -> (u64, u64) {
    if b.is_zero() {
        assert!(!a.is_zero());
        let cls = qp_class(a, p);
        return (cls, cls);
    }
    let bq = b * power_rat(p, half_vc);
    let norm = a * a - &bq * &bq * u;
    assert!(!norm.is_zero(), "zero divisor");
    // make both coordinates p-integral by an even rescaling (a square)
    let va = if a.is_zero() { 0 } else { vp_rat(a, p) };
    let shift = va.min(vp_rat(&bq, p)).min(0);
    let sc = power_rat(p, -2 * shift);
    let (a, bq) = (a * &sc, &bq * &sc);
    let v_total = vp_rat(&norm, p) - 4 * shift;
    let mut k = v_total.max(0) as u32 + 6;
    loop {
        let upk = rat_mod_pk_int(u, p, k);
        let s0 = sqrt_mod_pk(&upk, p, k).expect("u is a p-adic square");
        let pk = Int::from(p).pow(k);
        let am = rat_mod_pk_int(&a, p, k);
        let bm = rat_mod_pk_int(&bq, p, k);
        let comp = |root: &Int| -> Option<(i64, u64)> {
            let x = (&am + &bm * root).mod_floor(&pk);
            if x.is_zero() {
                return None;
            }
            let v = crate::arith::vp_int(&x, p) as i64;
            if v as u32 + 1 > k {
                return None;
            }
            let unit = x / Int::from(p).pow(v as u32);
            let r = unit.mod_floor(&Int::from(p)).to_u64().unwrap();
            Some((
                v,
                u64::from(legendre_u64(r, p) != 1) | u64::from(v.rem_euclid(2) == 1) << 1,
            ))
        };
        let other = (&pk - &s0).mod_floor(&pk);
        if let (Some((v1, c1)), Some((v2, c2))) = (comp(&s0), comp(&other)) {
            assert_eq!(v1 + v2, v_total, "component valuations must add up");
            return (c1, c2);
        }
        k += 8;
        assert!(k < 512, "split component did not stabilize");
    }
}

fn split_2_classes(a: &Rat, b: &Rat, half_vc: i64, u: &Rat) -> (u64, u64) {
    if b.is_zero() {
        assert!(!a.is_zero());
        let cls = q2_class(a);
        return (cls, cls);
    }
    let bq = b * power_rat(2, half_vc);
    let norm = a * a - &bq * &bq * u;
    assert!(!norm.is_zero(), "zero divisor");
    let va = if a.is_zero() { 0 } else { vp_rat(a, 2) };
    let shift = va.min(vp_rat(&bq, 2)).min(0);
    let sc = power_rat(2, -2 * shift);
    let (a, bq) = (a * &sc, &bq * &sc);
    let v_total = vp_rat(&norm, 2) - 4 * shift;
    let mut k = v_total.max(0) as u32 + 8;
    loop {
        let u2k = rat_mod_2k_int(u, k);
        let s0 = sqrt_mod_2k(&u2k, k).expect("u is a 2-adic square");
        let m = Int::one() << k as usize;
        let am = rat_mod_2k_int(&a, k);
        let bm = rat_mod_2k_int(&bq, k);
        let comp = |root: &Int| -> Option<(i64, u64)> {
            let x = (&am + &bm * root).mod_floor(&m);
            if x.is_zero() {
                return None;
            }
            let v = crate::arith::vp_int(&x, 2) as i64;
            if v as u32 + 3 > k {
                return None;
            }
            let unit_bits = match ((x >> v as usize) % Int::from(8)).to_u64().unwrap() {
                1 => 0b00,
                7 => 0b01,
                5 => 0b10,
                3 => 0b11,
                _ => unreachable!(),
            };
            Some((v, unit_bits | u64::from(v.rem_euclid(2) == 1) << 2))
        };
        let other = (&m - &s0).mod_floor(&m);
        if let (Some((v1, c1)), Some((v2, c2))) = (comp(&s0), comp(&other)) {
            assert_eq!(v1 + v2, v_total, "component valuations must add up");
            return (c1, c2);
        }
        k += 16;
        assert!(k < 1024, "split component did not stabilize");
    }
}
