//! The genus-2 curve family y^2 = x(x^2 + 2^i p^j)(x^2 + 2^{i+1} p^j),
//! its normalizing isomorphisms, the Richelot construction on quadratic
//! splittings, rational point searches, and the integral-point filter
//! that applies on rank-0 Jacobians.

use crate::arith::{int, int_sqrt_exact, rat_i, Factorization, Int, Rat};
use crate::poly::Poly;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveTag {
    Family { p: u64, i: u32, j: u32 },
    RichelotImage,
    Custom,
}

/// A hyperelliptic model y^2 = f(x) with deg f in {5, 6} and f squarefree.
#[derive(Debug, Clone)]
pub struct HyperCurve {
    pub f: Poly,
    pub tag: CurveTag,
}

/// Affine point or the point at infinity. Odd-degree models have a single
/// point at infinity; for degree-6 models with square leading coefficient
/// the marker stands for the pair of points there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurvePoint {
    Affine(Rat, Rat),
    Infinity,
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurvePoint::Affine(x, y) => write!(f, "({}, {})", x, y),
            CurvePoint::Infinity => write!(f, "inf"),
        }
    }
}

impl PartialOrd for CurvePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurvePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => Ordering::Equal,
            (CurvePoint::Infinity, _) => Ordering::Greater,
            (_, CurvePoint::Infinity) => Ordering::Less,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => {
                x1.cmp(x2).then_with(|| y1.cmp(y2))
            }
        }
    }
}

impl HyperCurve {
    pub fn new(f: Poly, tag: CurveTag) -> HyperCurve {
        let d = f.degree();
        assert!(d == 5 || d == 6, "degree must be 5 or 6, got {}", d);
        assert!(
            !f.discriminant().is_zero(),
            "singular model: repeated roots"
        );
        HyperCurve { f, tag }
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => self.f.eval(x) == y * y,
        }
    }

    /// Canonical text form: ascending coefficient list of f.
    pub fn canonical_text(&self) -> String {
        let cs: Vec<String> = self.f.coeffs().iter().map(|c| c.to_string()).collect();
        format!("y^2 = [{}]", cs.join(", "))
    }
}

impl std::fmt::Display for HyperCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

/// x(x^2 + A)(x^2 + 2A) = x^5 + 3A x^3 + 2A^2 x
fn family_poly(a: &Int) -> Poly {
    Poly::from_coeffs(vec![
        int(0),
        2 * a * a,
        int(0),
        3 * a.clone(),
        int(0),
        int(1),
    ])
}

pub fn family_curve(p: u64, i: u32, j: u32) -> HyperCurve {
    assert!(crate::arith::is_prime_u64(p));
    assert!(i <= 3 && j <= 3, "normalize exponents first");
    let a = Int::from(2).pow(i) * Int::from(p).pow(j);
    HyperCurve::new(family_poly(&a), CurveTag::Family { p, i, j })
}

/// A coordinate change between family models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveMap {
    /// (x, y) -> (x/u^2, y/u^5)
    Linear { u: Rat },
    /// (x, y) -> (c/x, d y/x^3); swaps (0,0) and infinity
    Inversion { c: Rat, d: Rat },
}

impl CurveMap {
    pub fn apply(&self, pt: &CurvePoint) -> CurvePoint {
        match self {
            CurveMap::Linear { u } => match pt {
                CurvePoint::Infinity => CurvePoint::Infinity,
                CurvePoint::Affine(x, y) => {
                    let u2 = u * u;
                    CurvePoint::Affine(x / &u2, y / (&u2 * &u2 * u))
                }
            },
            CurveMap::Inversion { c, d } => match pt {
                CurvePoint::Infinity => CurvePoint::Affine(rat_i(0), rat_i(0)),
                CurvePoint::Affine(x, y) => {
                    if x.is_zero() {
                        CurvePoint::Infinity
                    } else {
                        CurvePoint::Affine(c / x, d * y / (x * x * x))
                    }
                }
            },
        }
    }
}

/// Result of pushing (i, j) into the canonical exponent set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedFamily {
    pub i: u32,
    pub j: u32,
    /// exponents of the linear step u = 2^{u2} p^{up}
    u2: i64,
    up: i64,
    /// x-inversion exponents (c2, cp, d2, dp) when the reduced i was odd
    inversion: Option<(u32, u32, u32, u32)>,
}

impl NormalizedFamily {
    /// The composed coordinate map from the (i, j) model to the canonical
    /// one, for a concrete prime.
    pub fn map(&self, p: u64) -> CurveMap {
        let pw = |b: i64, e: i64| -> Rat {
            let r = Rat::from_integer(Int::from(b).pow(e.unsigned_abs() as u32));
            if e >= 0 {
                r
            } else {
                r.recip()
            }
        };
        let u = pw(2, self.u2) * pw(p as i64, self.up);
        match self.inversion {
            None => CurveMap::Linear { u },
            Some((c2, cp, d2, dp)) => {
                // linear (x/u^2, y/u^5) followed by (c/x, d y/x^3)
                // composes to (c u^2/x, d u y/x^3)
                let c = pw(2, c2 as i64) * pw(p as i64, cp as i64);
                let d = pw(2, d2 as i64) * pw(p as i64, dp as i64);
                CurveMap::Inversion {
                    c: c * &u * &u,
                    d: d * &u,
                }
            }
        }
    }
}

/// Reduce arbitrary exponents to the canonical representatives
/// {(0,j), (2,j) : 0 <= j <= 3}: first i mod 4 and j mod 4 by the scalings
/// (x, y) -> (x/4, y/32) and (x/p^2, y/p^5), then, for odd i, the
/// x-inversion (x, y) -> (c/x, d y/x^3) with c = 2^i p^{(j+j')/2},
/// d = 2^{(3i-1)/2} p^{j' + (j+j')/4}, sending (i, j) to (i-1, j') where
/// j' = (4 - j) mod 4 for odd j and j' = j for even j.
pub fn normalize_family(i: i64, j: i64) -> NormalizedFamily {
    let ir = i.rem_euclid(4);
    let jr = j.rem_euclid(4);
    // each subtracted 4 contributes one factor to u (negative for additions)
    let u2 = (i - ir) / 4;
    let up = (j - jr) / 4;
    let (i_fin, j_fin, inversion) = if ir % 2 == 1 {
        let jp = if jr % 2 == 1 { (4 - jr) % 4 } else { jr };
        let c2 = ir as u32;
        let cp = ((jr + jp) / 2) as u32;
        let d2 = ((3 * ir - 1) / 2) as u32;
        let dp = (jp + (jr + jp) / 4) as u32;
        (ir - 1, jp, Some((c2, cp, d2, dp)))
    } else {
        (ir, jr, None)
    };
    NormalizedFamily {
        i: i_fin as u32,
        j: j_fin as u32,
        u2,
        up,
        inversion,
    }
}

/// A quadratic splitting f = G1 G2 G3, deg G_k <= 2.
#[derive(Debug, Clone)]
pub struct QuadTriple {
    pub g: [Poly; 3],
}

#[derive(Debug, thiserror::Error)]
pub enum RichelotError {
    #[error("degenerate kernel: det of the coefficient matrix vanishes")]
    DegenerateKernel,
}

impl QuadTriple {
    pub fn new(g1: Poly, g2: Poly, g3: Poly) -> QuadTriple {
        let t = QuadTriple { g: [g1, g2, g3] };
        let prod = t.product();
        let d = prod.degree();
        assert!(d == 5 || d == 6, "product must have degree 5 or 6");
        assert!(!prod.discriminant().is_zero(), "product must be squarefree");
        t
    }

    pub fn product(&self) -> Poly {
        self.g[0].mul(&self.g[1]).mul(&self.g[2])
    }

    /// det(g_{ik}) with G_i = g_{i0} x^2 + g_{i1} x + g_{i2}. The column
    /// order (descending degree) fixes the sign of Delta, hence of the
    /// bracket curve.
    pub fn delta(&self) -> Rat {
        let m: Vec<Vec<Rat>> = self
            .g
            .iter()
            .map(|gi| (0..3).map(|k| gi.coeff(2 - k)).collect())
            .collect();
        let det2 = |a: &Rat, b: &Rat, c: &Rat, d: &Rat| a * d - b * c;
        &m[0][0] * det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2])
            - &m[0][1] * det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2])
            + &m[0][2] * det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1])
    }
}

/// The bracket curve of a quadratic splitting: from y^2 = G1 G2 G3 to
/// Delta y^2 = H1 H2 H3 with H1 = G2'G3 - G2 G3' etc., returned as
/// y^2 = (1/Delta) H1 H2 H3 cleared to integral coefficients (a y-rescaling
/// by a square). The Jacobians of source and image are (2,2)-isogenous.
pub fn richelot(t: &QuadTriple) -> Result<(HyperCurve, Rat), RichelotError> {
    let delta = t.delta();
    if delta.is_zero() {
        return Err(RichelotError::DegenerateKernel);
    }
    let bracket = |a: &Poly, b: &Poly| a.derivative().mul(b).sub(&a.mul(&b.derivative()));
    let h1 = bracket(&t.g[1], &t.g[2]);
    let h2 = bracket(&t.g[2], &t.g[0]);
    let h3 = bracket(&t.g[0], &t.g[1]);
    let f = h1.mul(&h2).mul(&h3).scale(&delta.recip());
    // clear denominators by a square factor (y -> y/m)
    let mut m = Int::one();
    for c in f.coeffs() {
        m = m.lcm(c.denom());
    }
    let f = f.scale(&Rat::from_integer(&m * &m));
    Ok((HyperCurve::new(f, CurveTag::RichelotImage), delta))
}

/// For the family splitting (x, x^2 + A, x^2 + 2A) the bracket curve is
/// y^2 = 2x(x^2 - A)(x^2 - 2A); in the rescaled coordinates (X, Y) = (2x, 4y)
/// that raw model becomes Y^2 = X(X^2 - 4A)(X^2 - 8A).
pub fn family_richelot_image(p: u64, i: u32, j: u32) -> HyperCurve {
    let a = Int::from(2).pow(i) * Int::from(p).pow(j);
    let t = QuadTriple::new(
        Poly::x(),
        Poly::from_coeffs(vec![a.clone(), int(0), int(1)]),
        Poly::from_coeffs(vec![2 * &a, int(0), int(1)]),
    );
    let (raw, _) = richelot(&t).expect("family splitting is nondegenerate");
    // 16 Y^2 = 16 raw(X/2)
    let f = raw
        .f
        .compose_scale_x(&Rat::new(Int::one(), int(2)))
        .scale(&rat_i(16));
    HyperCurve::new(f, CurveTag::RichelotImage)
}

/// The model used downstream for i = 2, odd j: y^2 = x(x^2 - p^j)(x^2 - 2p^j),
/// reached from the bracket curve of C^(p;2,j) by (x, y) -> (x/4, y/32).
pub fn reduced_richelot_image(p: u64, j: u32) -> HyperCurve {
    assert!(j % 2 == 1, "the reduced model needs odd j");
    let img = family_richelot_image(p, 2, j);
    // x = 4X, y = 32Y on y^2 = x(x^2 - 16 p^j)(x^2 - 32 p^j)
    let f = img
        .f
        .compose_scale_x(&rat_i(4))
        .scale(&Rat::new(Int::one(), int(1024)));
    let direct = family_poly(&-Int::from(p).pow(j));
    assert_eq!(f, direct, "scaling chain must match the direct model");
    HyperCurve::new(f, CurveTag::RichelotImage)
}

const SQ_MOD_64: [bool; 64] = {
    let mut t = [false; 64];
    let mut i = 0;
    while i < 64 {
        t[(i * i) % 64] = true;
        i += 1;
    }
    t
};

fn sq_mod_table<const M: usize>() -> [bool; M] {
    let mut t = [false; M];
    for i in 0..M {
        t[(i * i) % M] = true;
    }
    t
}

/// All affine rational points with x = U/W, gcd(U, W) = 1, |U|, W <= bound,
/// plus the infinity marker, sorted. Clearing denominators, the search
/// tests V^2 = sum_k c_k U^k W^{6-k} for squareness, first by cheap wrapped
/// residues, then exactly.
pub fn search_points(curve: &HyperCurve, bound: u64) -> Vec<CurvePoint> {
    assert!(bound >= 1);
    let f = &curve.f;
    for c in f.coeffs() {
        assert!(c.is_integer(), "integral model required for the search");
    }
    let coeffs: Vec<Int> = (0..=6).map(|k| f.coeff(k).to_integer()).collect();
    let c64: Vec<u64> = coeffs
        .iter()
        .map(|c| {
            let m = c.mod_floor(&(Int::one() << 64));
            m.to_u64().unwrap()
        })
        .collect();
    let sq63 = sq_mod_table::<63>();
    let sq65 = sq_mod_table::<65>();
    let sq11 = sq_mod_table::<11>();

    let mut pts: Vec<CurvePoint> = (1..=bound as i64)
        .into_par_iter()
        .flat_map_iter(|w| {
            let coeffs = coeffs.clone();
            let c64 = c64.clone();
            (-(bound as i64)..=bound as i64).filter_map(move |u| {
                if u.gcd(&w) != 1 {
                    return None;
                }
                // N = sum c_k U^k W^{6-k} mod 2^64 by wrapped Horner in U,
                // then multiply the tail powers of W back in
                let uw = u as u64;
                let ww = w as u64;
                let mut n: u64 = 0;
                for k in (0..=6).rev() {
                    n = n.wrapping_mul(uw).wrapping_add(
                        c64[k].wrapping_mul(pow_wrap(ww, (6 - k) as u32)),
                    );
                }
                if !SQ_MOD_64[(n & 63) as usize]
                    || !sq63[(n % 63) as usize]
                    || !sq65[(n % 65) as usize]
                    || !sq11[(n % 11) as usize]
                {
                    return None;
                }
                // exact check
                let ub = Int::from(u);
                let wb = Int::from(w);
                let mut nb = Int::zero();
                for k in (0..=6).rev() {
                    nb = nb * &ub + &coeffs[k] * wb.pow((6 - k) as u32);
                }
                if nb.is_negative() {
                    return None;
                }
                let v = int_sqrt_exact(&nb)?;
                Some((u, w, v))
            })
        })
        .flat_map_iter(|(u, w, v)| {
            let x = Rat::new(Int::from(u), Int::from(w));
            let w3 = Rat::from_integer(Int::from(w).pow(3));
            let y = Rat::from_integer(v) / w3;
            if y.is_zero() {
                vec![CurvePoint::Affine(x, y)]
            } else {
                vec![
                    CurvePoint::Affine(x.clone(), y.clone()),
                    CurvePoint::Affine(x, -y),
                ]
            }
        })
        .collect();

    for p in &pts {
        debug_assert!(curve.contains(p));
    }
    if f.degree() == 5 || crate::arith::is_square_rat(&f.leading()) {
        pts.push(CurvePoint::Infinity);
    }
    pts.sort();
    pts.dedup();
    pts
}

fn pow_wrap(b: u64, e: u32) -> u64 {
    let mut r: u64 = 1;
    for _ in 0..e {
        r = r.wrapping_mul(b);
    }
    r
}

/// On a curve whose Jacobian has Mordell-Weil rank 0, every rational point
/// other than infinity is integral with y = 0 or y^2 | disc(f). This
/// returns that finite candidate set for an odd-degree integral model:
/// integer roots of f, plus all (a, +-b) with b > 0, b^2 | disc(f) and
/// f(a) = b^2. Integer roots of f - b^2 are found completely through
/// divisors of the constant term (whose factorization is inherited from
/// disc(f) when f(0) = 0, the case of every model built here), pruned by a
/// Lagrange-style root bound; a bounded direct scan guards the plumbing.
pub fn lutz_nagell_candidates(curve: &HyperCurve) -> Vec<CurvePoint> {
    let f = &curve.f;
    assert!(f.degree() == 5, "odd-degree integral model required");
    for c in f.coeffs() {
        assert!(c.is_integer(), "integral model required");
    }
    let lead = f.leading().to_integer();
    assert!(lead.is_one(), "monic model required");
    let disc = f.discriminant();
    let mut out: Vec<CurvePoint> = Vec::new();

    // y = 0: integer roots of f
    for r in f.rational_roots() {
        if r.is_integer() {
            out.push(CurvePoint::Affine(r, rat_i(0)));
        }
    }

    let f0 = f.coeff(0).to_integer();
    let disc_fac = Factorization::of_big(&disc.to_integer());
    let halved: Vec<(Int, u32)> = disc_fac
        .pairs
        .iter()
        .map(|(p, e)| (p.clone(), e / 2))
        .filter(|(_, e)| *e > 0)
        .collect();
    // exponent tuples of all b with b^2 | disc
    let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
    for (_, e) in &halved {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..=*e).map(move |k| {
                    let mut t2 = t.clone();
                    t2.push(k);
                    t2
                })
            })
            .collect();
    }

    let mut b_list: Vec<Int> = Vec::new();
    for t in &tuples {
        let b_pairs: Vec<(Int, u32)> = halved
            .iter()
            .zip(t)
            .map(|((p, _), k)| (p.clone(), *k))
            .collect();
        let b = Factorization::from_pairs(1, b_pairs.clone()).value();
        b_list.push(b.clone());
        let b2 = &b * &b;
        let g0 = &f0 - &b2;

        let mut cands: Vec<Int> = vec![Int::zero()];
        if !g0.is_zero() {
            let divs = if f0.is_zero() {
                // g0 = -b^2 with known factorization
                let sq: Vec<(Int, u32)> =
                    b_pairs.iter().map(|(p, k)| (p.clone(), 2 * k)).collect();
                Factorization::from_pairs(1, sq).divisors()
            } else {
                Factorization::of_big(&g0).divisors()
            };
            for d in divs {
                cands.push(d.clone());
                cands.push(-d);
            }
        }

        // |root| <= 2 max_k |c_k|^{1/(5-k)} for monic g = f - b^2
        let mut bound_bits: u64 = 1;
        for k in 0..5usize {
            let ck = if k == 0 {
                g0.clone()
            } else {
                f.coeff(k).to_integer()
            };
            if !ck.is_zero() {
                bound_bits = bound_bits.max(ck.bits().div_ceil((5 - k) as u64));
            }
        }
        let b2r = Rat::from_integer(b2);
        for a in cands {
            if a.bits() > bound_bits + 2 {
                continue;
            }
            let av = Rat::from_integer(a);
            if f.eval(&av) == b2r {
                let bb = Rat::from_integer(b.clone());
                out.push(CurvePoint::Affine(av.clone(), bb.clone()));
                out.push(CurvePoint::Affine(av, -bb));
            }
        }
    }

    // redundant direct scan over small |a| (the divisor path is complete;
    // this guards the plumbing)
    let b_set: std::collections::HashSet<Int> = b_list.into_iter().collect();
    for a in -2000i64..=2000 {
        let av = rat_i(a);
        let v = f.eval(&av).to_integer();
        if v.is_positive() {
            if let Some(s) = int_sqrt_exact(&v) {
                if b_set.contains(&s) {
                    let sv = Rat::from_integer(s);
                    out.push(CurvePoint::Affine(av.clone(), sv.clone()));
                    out.push(CurvePoint::Affine(av, -sv));
                }
            }
        }
    }

    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_pow};

    fn aff(x: i64, y: i64) -> CurvePoint {
        CurvePoint::Affine(rat_i(x), rat_i(y))
    }

    #[test]
    fn family_models_match_direct_substitution() {
        let c = family_curve(13, 2, 1);
        // x(x^2+52)(x^2+104) = x^5 + 156x^3 + 5408x
        assert_eq!(
            c.f,
            Poly::from_int_coeffs(&[0, 5408, 0, 156, 0, 1])
        );
        let c = family_curve(3, 2, 2);
        // x(x^2+36)(x^2+72): 3A = 108, 2A^2 = 2592
        assert_eq!(c.f, Poly::from_int_coeffs(&[0, 2592, 0, 108, 0, 1]));
        let c = family_curve(17, 0, 1);
        assert_eq!(c.f, Poly::from_int_coeffs(&[0, 578, 0, 51, 0, 1]));
    }

    /// The inversion (X, Y) = (c/x, d y/x^3) carries y^2 = f(x) to
    /// Y^2 = g(X) exactly when d^2 f(x) = x^6 g(c/x) as polynomials.
    fn check_inversion_transport(f: &Poly, g: &Poly, c: &Rat, d: &Rat) {
        let lhs = f.scale(&(d * d));
        let mut rhs = Poly::zero();
        for k in 0..=6usize {
            let gk = g.coeff(k);
            if gk.is_zero() {
                continue;
            }
            let mut term = vec![Rat::from_integer(Int::zero()); 7 - k];
            term[6 - k] = gk * rat_pow(c, k as i64);
            rhs = rhs.add(&Poly::new(term));
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalization_reaches_the_canonical_set_with_exact_maps() {
        // the six x-inversions, checked as exact equation transport
        for p in [3u64, 5, 17] {
            for (src, dst) in [
                ((1, 3), (0, 1)),
                ((1, 1), (0, 3)),
                ((1, 2), (0, 2)),
                ((3, 3), (2, 1)),
                ((3, 1), (2, 3)),
                ((3, 2), (2, 2)),
                ((1, 0), (0, 0)),
                ((3, 0), (2, 0)),
            ] {
                let n = normalize_family(src.0, src.1);
                assert_eq!((n.i, n.j), (dst.0 as u32, dst.1 as u32), "{:?}", src);
                let a_src = Int::from(2).pow(src.0 as u32) * Int::from(p).pow(src.1 as u32);
                let a_dst = Int::from(2).pow(n.i) * Int::from(p).pow(n.j);
                let f = super::family_poly(&a_src);
                let g = super::family_poly(&a_dst);
                match n.map(p) {
                    CurveMap::Inversion { c, d } => check_inversion_transport(&f, &g, &c, &d),
                    _ => panic!("odd i must invert"),
                }
            }
        }
        // footnote values for (1,3) -> (0,1): (2p^2/x, 2p^2 y/x^3)
        let n = normalize_family(1, 3);
        assert_eq!(
            n.map(17),
            CurveMap::Inversion {
                c: rat_i(2 * 17 * 17),
                d: rat_i(2 * 17 * 17)
            }
        );
        // (4, 0) -> (0, 0) by the pure scaling (x/4, y/32)
        let n = normalize_family(4, 0);
        assert_eq!((n.i, n.j), (0, 0));
        assert_eq!(n.map(5), CurveMap::Linear { u: rat_i(2) });
        // (2, 2) is already canonical
        let n = normalize_family(2, 2);
        assert_eq!((n.i, n.j), (2, 2));
        assert_eq!(n.map(5), CurveMap::Linear { u: rat_i(1) });
    }

    #[test]
    fn linear_reductions_transport_the_equation() {
        // C^(p; i+4, j) -> C^(p; i, j) via (x/4, y/32): f(x) = u^10 g(x/u^2)
        for (p, src, u) in [(5u64, (4i64, 0i64), 2i64), (7, (0, 4), 7), (3, (6, 5), 6)] {
            let n = normalize_family(src.0, src.1);
            let a_src = Int::from(2).pow(src.0 as u32) * Int::from(p).pow(src.1 as u32);
            let a_dst = Int::from(2).pow(n.i) * Int::from(p).pow(n.j);
            let f = super::family_poly(&a_src);
            let g = super::family_poly(&a_dst);
            match n.map(p) {
                CurveMap::Linear { u: uu } => {
                    assert_eq!(uu, rat_i(u));
                    let u2 = &uu * &uu;
                    let u10 = rat_pow(&u2, 5);
                    assert_eq!(g.compose_scale_x(&u2.recip()).scale(&u10), f);
                }
                _ => panic!("even i stays linear"),
            }
        }
    }

    #[test]
    fn normalized_maps_carry_points_to_points() {
        // carry search results from a non-canonical model to its target
        for (p, i, j) in [(17u64, 1i64, 3i64), (3, 3, 2), (5, 1, 2)] {
            let n = normalize_family(i, j);
            let a_src = Int::from(2).pow(i as u32) * Int::from(p).pow(j as u32);
            let src = HyperCurve::new(super::family_poly(&a_src), CurveTag::Custom);
            let dst = family_curve(p, n.i, n.j);
            let m = n.map(p);
            for pt in search_points(&src, 60) {
                let q = m.apply(&pt);
                assert!(dst.contains(&q), "{} -> {} not on target", pt, q);
            }
        }
    }

    #[test]
    fn richelot_brackets_match_hand_derivation() {
        // G1 = x, G2 = x^2 + A, G3 = x^2 + 2A: H1 = 2Ax, H2 = x^2 - 2A,
        // H3 = A - x^2, Delta = -A, image y^2 = 2x(x^2 - A)(x^2 - 2A)
        let a = int(52);
        let t = QuadTriple::new(
            Poly::x(),
            Poly::from_coeffs(vec![a.clone(), int(0), int(1)]),
            Poly::from_coeffs(vec![2 * &a, int(0), int(1)]),
        );
        assert_eq!(t.delta(), rat_i(-52));
        let (img, delta) = richelot(&t).unwrap();
        assert_eq!(delta, rat_i(-52));
        // 2x(x^2-A)(x^2-2A) = 2x^5 - 6A x^3 + 4A^2 x
        assert_eq!(
            img.f,
            Poly::from_int_coeffs(&[0, 4 * 52 * 52, 0, -6 * 52, 0, 2])
        );
        // scaled model
        let scaled = family_richelot_image(13, 2, 1);
        // x(x^2 - 208)(x^2 - 416)
        assert_eq!(
            scaled.f,
            Poly::from_int_coeffs(&[0, 2 * 208 * 208, 0, -3 * 208, 0, 1])
        );
        // degenerate kernel
        let bad = QuadTriple {
            g: [
                Poly::x(),
                Poly::from_int_coeffs(&[1, 0, 1]),
                Poly::from_int_coeffs(&[1, 0, 1]),
            ],
        };
        assert!(matches!(
            richelot(&bad),
            Err(RichelotError::DegenerateKernel)
        ));
    }

    #[test]
    fn richelot_twice_returns_to_the_original_model() {
        // the bracket curve of x(x^2-4A)(x^2-8A) is y^2 = 2x(x^2+4A)(x^2+8A),
        // and (x, y) = (2X, 8Y) carries it back to y^2 = X(X^2+A)(X^2+2A)
        for (p, i, j) in [(3u64, 2u32, 1u32), (13, 2, 1), (5, 2, 3), (17, 0, 1), (7, 1, 2)] {
            let a = Int::from(2).pow(i) * Int::from(p).pow(j);
            let img = family_richelot_image(p, i, j);
            let b = Int::from(-4) * &a;
            let t = QuadTriple::new(
                Poly::x(),
                Poly::from_coeffs(vec![b.clone(), int(0), int(1)]),
                Poly::from_coeffs(vec![2 * &b, int(0), int(1)]),
            );
            assert_eq!(t.product(), img.f);
            let (back, _) = richelot(&t).unwrap();
            // substitute x = 2X, y = 8Y
            let f = back
                .f
                .compose_scale_x(&rat_i(2))
                .scale(&Rat::new(Int::one(), int(64)));
            assert_eq!(f, super::family_poly(&a), "p={} i={} j={}", p, i, j);
        }
    }

    #[test]
    fn reduced_model_for_odd_j() {
        let c = reduced_richelot_image(13, 1);
        assert_eq!(c.f, Poly::from_int_coeffs(&[0, 338, 0, -39, 0, 1]));
        let c = reduced_richelot_image(5, 3);
        // x(x^2-125)(x^2-250)
        assert_eq!(
            c.f,
            Poly::from_int_coeffs(&[0, 2 * 125 * 125, 0, -3 * 125, 0, 1])
        );
        let c = reduced_richelot_image(29, 1);
        assert_eq!(c.f, Poly::from_int_coeffs(&[0, 2 * 29 * 29, 0, -87, 0, 1]));
    }

    #[test]
    fn point_search_finds_the_sporadic_points() {
        // C^(17;0,1): (8, +-252)
        let pts = search_points(&family_curve(17, 0, 1), 100);
        assert_eq!(
            pts,
            vec![aff(0, 0), aff(8, -252), aff(8, 252), CurvePoint::Infinity]
        );
        // C^(3;2,2): (6, +-216)
        let pts = search_points(&family_curve(3, 2, 2), 100);
        assert_eq!(
            pts,
            vec![aff(0, 0), aff(6, -216), aff(6, 216), CurvePoint::Infinity]
        );
        // C^(13;2,1): nothing beyond (0,0) and infinity
        let pts = search_points(&family_curve(13, 2, 1), 1000);
        assert_eq!(pts, vec![aff(0, 0), CurvePoint::Infinity]);
        // C^(3;2,3): (72, +-45360); C^(5;2,2): (5, +-375);
        // C^(17;2,2): (136, +-235824)
        let pts = search_points(&family_curve(3, 2, 3), 100);
        assert!(pts.contains(&aff(72, 45360)) && pts.contains(&aff(72, -45360)));
        let pts = search_points(&family_curve(5, 2, 2), 100);
        assert!(pts.contains(&aff(5, 375)));
        let pts = search_points(&family_curve(17, 2, 2), 200);
        assert!(pts.contains(&aff(136, 235824)));
        // C^(7;2,3): (98, +-115248)
        let pts = search_points(&family_curve(7, 2, 3), 100);
        assert!(pts.contains(&aff(98, 115248)));
    }

    #[test]
    fn integral_filter_contains_search_results_on_rank_zero_curves() {
        // C^(13;2,1) is rank 0: the filter must catch everything the
        // search sees except infinity
        let c = family_curve(13, 2, 1);
        let cand = lutz_nagell_candidates(&c);
        for pt in search_points(&c, 1000) {
            if pt != CurvePoint::Infinity {
                assert!(cand.contains(&pt), "{} missing", pt);
            }
        }
        assert!(cand.contains(&aff(0, 0)));

        // (3,2,2): (6, 216) appears since 216^2 | 2^7 36^10 and f(6) = 216^2
        let c = family_curve(3, 2, 2);
        let cand = lutz_nagell_candidates(&c);
        assert!(cand.contains(&aff(6, 216)) && cand.contains(&aff(6, -216)));

        // reduced model x(x^2-13)(x^2-26): y = 0 gives only a = 0 over Z
        let c = reduced_richelot_image(13, 1);
        let cand = lutz_nagell_candidates(&c);
        let zeros: Vec<_> = cand
            .iter()
            .filter(|p| matches!(p, CurvePoint::Affine(_, y) if y.is_zero()))
            .collect();
        assert_eq!(zeros, vec![&aff(0, 0)]);
    }

    #[test]
    fn canonical_text_roundtrip() {
        let c = family_curve(13, 2, 1);
        assert_eq!(c.canonical_text(), "y^2 = [0, 5408, 0, 156, 0, 1]");
        assert_eq!(format!("{}", aff(6, -216)), "(6, -216)");
        assert_eq!(format!("{}", CurvePoint::Infinity), "inf");
    }

    #[test]
    fn search_agrees_with_direct_rational_sweep() {
        // independent oracle: evaluate f at every grid point with exact
        // rational arithmetic, no clearing or residue filters
        let c = HyperCurve::new(Poly::from_int_coeffs(&[0, 4, 0, 5, 0, 1]), CurveTag::Custom);
        let got = search_points(&c, 25);
        let mut expect: Vec<CurvePoint> = vec![CurvePoint::Infinity];
        for w in 1i64..=25 {
            for u in -25i64..=25 {
                if u.gcd(&w) != 1 {
                    continue;
                }
                let x = rat(u, w);
                let v = c.f.eval(&x);
                if v.is_negative() {
                    continue;
                }
                if let Some(y) = crate::arith::rat_sqrt_exact(&v) {
                    expect.push(CurvePoint::Affine(x.clone(), y.clone()));
                    if !y.is_zero() {
                        expect.push(CurvePoint::Affine(x, -y));
                    }
                }
            }
        }
        expect.sort();
        expect.dedup();
        assert_eq!(got, expect);
    }
}
