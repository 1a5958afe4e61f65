//! Rank-0 certification of elliptic curves y^2 = x(x^2 + a x + b) by
//! descent along the 2-isogeny with kernel {(0,0), inf}, together with
//! integral torsion enumeration. The rank bound is
//! dim Sel^phi + dim Sel^phihat - 2, and when it is 0 the full point set
//! is the torsion subgroup.

use crate::arith::{int, legendre, rat_i, vp_int, Factorization, Int, Rat};
use crate::curve::CurvePoint;
use crate::poly::Poly;
use num::{Integer, One, Signed, ToPrimitive, Zero};

/// y^2 = x(x^2 + a x + b) with the rational 2-torsion point (0,0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllCurve2T {
    pub a: Rat,
    pub b: Rat,
}

impl EllCurve2T {
    pub fn new(a: Rat, b: Rat) -> EllCurve2T {
        assert!(!b.is_zero(), "b = 0 is singular");
        assert!(!(&a * &a - rat_i(4) * &b).is_zero(), "a^2 = 4b is singular");
        EllCurve2T { a, b }
    }

    pub fn new_int(a: i64, b: i64) -> EllCurve2T {
        EllCurve2T::new(rat_i(a), rat_i(b))
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// The 2-isogenous curve y^2 = x(x^2 - 2a x + (a^2 - 4b)).
    pub fn dual(&self) -> EllCurve2T {
        EllCurve2T::new(rat_i(-2) * &self.a, &self.a * &self.a - rat_i(4) * &self.b)
    }

    /// Smallest lambda >= 1 with (lambda^2 a, lambda^4 b) integral; the map
    /// (x, y) -> (lambda^2 x, lambda^3 y) carries this curve onto the model
    /// it returns.
    pub fn integral_model(&self) -> (EllCurve2T, Int) {
        let worst = self.a.denom().lcm(self.b.denom());
        let mut divs = Factorization::of_big(&worst).divisors();
        divs.sort();
        for lam in divs {
            let l2 = Rat::from_integer(&lam * &lam);
            let a2 = &self.a * &l2;
            let b2 = &self.b * &l2 * &l2;
            if a2.is_integer() && b2.is_integer() {
                return (EllCurve2T::new(a2, b2), lam);
            }
        }
        unreachable!("lcm of denominators always clears");
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                y * y == x * (x * x + &self.a * x + &self.b)
            }
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), -y),
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1) = match p {
            CurvePoint::Infinity => return q.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return p.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let lam = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return CurvePoint::Infinity;
            }
            // tangent: (3x^2 + 2a x + b) / 2y
            (rat_i(3) * x1 * x1 + rat_i(2) * &self.a * x1 + &self.b) / (rat_i(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lam * &lam - &self.a - x1 - x2;
        let y3 = lam * (x1 - &x3) - y1;
        CurvePoint::Affine(x3, y3)
    }

    pub fn mul(&self, n: u32, p: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        for _ in 0..n {
            acc = self.add(&acc, p);
        }
        acc
    }

    /// Order of a point if it divides 16, else None (beyond Mazur's bound
    /// for this shape, so the point is non-torsion).
    pub fn order_dividing_16(&self, p: &CurvePoint) -> Option<u32> {
        let mut acc = p.clone();
        for n in 1..=16u32 {
            if acc == CurvePoint::Infinity {
                return Some(n);
            }
            acc = self.add(&acc, p);
        }
        None
    }
}

/// Decide whether some t in Z_p makes g(t) a square in Q_p (0 counts).
/// Branch residues (mod p, or mod 8 for p = 2), decide each branch by the
/// fixed-unit-class or Hensel-root criteria, recurse with even-power
/// stripping otherwise.
fn value_hits_square(g: &Poly, p: u64, depth: u32) -> bool {
    assert!(depth < 64, "local solvability recursion exceeded bound");
    if g.is_zero() {
        return true;
    }
    // strip even part of the content
    let mut m = u32::MAX;
    for c in g.coeffs() {
        if !c.is_zero() {
            m = m.min(vp_int(&c.to_integer(), p));
        }
    }
    let g = if m >= 2 {
        let div = Rat::from_integer(Int::from(p).pow(2 * (m / 2)));
        g.scale(&div.recip())
    } else {
        g.clone()
    };
    let gp = g.derivative();
    let step = if p == 2 { 8u64 } else { p };
    let wv: u32 = if p == 2 { 3 } else { 1 };
    for r in 0..step {
        let rr = rat_i(r as i64);
        let val = g.eval(&rr).to_integer();
        if val.is_zero() {
            return true;
        }
        let lam = vp_int(&val, p);
        let dval = gp.eval(&rr).to_integer();
        let mu = if dval.is_zero() {
            u32::MAX / 4
        } else {
            vp_int(&dval, p)
        };
        if lam > 2 * mu {
            // Newton converges to a root of g near r: value 0
            return true;
        }
        // h(s) = g(r + step*s); perturbation valuation = min_{k>=1} v(h_k)
        let h = g.compose_shift_x(&rr).compose_scale_x(&rat_i(step as i64));
        let mut pert = u32::MAX / 4;
        for k in 1..h.coeffs().len() {
            let c = h.coeff(k);
            if !c.is_zero() {
                pert = pert.min(vp_int(&c.to_integer(), p));
            }
        }
        let unit = &val / Int::from(p).pow(lam);
        if pert >= lam + wv {
            // unit class of the value is constant on the branch
            let sq = lam % 2 == 0
                && if p == 2 {
                    unit.mod_floor(&int(8)).is_one()
                } else {
                    legendre(&unit, p) == 1
                };
            if sq {
                return true;
            }
            continue;
        }
        if pert > lam && lam % 2 == 1 {
            // valuation is constant and odd on the branch
            continue;
        }
        if value_hits_square(&h, p, depth + 1) {
            return true;
        }
    }
    false
}

/// A 2-covering w^2 = d u^4 + a u^2 v^2 + e v^4 with d e = b.
#[derive(Debug, Clone)]
pub struct Torsor {
    pub d: Int,
    pub a: Int,
    pub e: Int,
}

impl Torsor {
    fn poly_fwd(&self) -> Poly {
        Poly::from_coeffs(vec![
            self.e.clone(),
            Int::zero(),
            self.a.clone(),
            Int::zero(),
            self.d.clone(),
        ])
    }

    fn poly_rev(&self) -> Poly {
        Poly::from_coeffs(vec![
            self.d.clone(),
            Int::zero(),
            self.a.clone(),
            Int::zero(),
            self.e.clone(),
        ])
    }

    pub fn solvable_at(&self, p: u64) -> bool {
        value_hits_square(&self.poly_fwd(), p, 0) || value_hits_square(&self.poly_rev(), p, 0)
    }

    /// Real solvability: positive leading form, or an interior maximum
    /// of d s^2 + a s + e over s = (u/v)^2 >= 0.
    pub fn solvable_real(&self) -> bool {
        if self.d.is_positive() || self.e.is_positive() {
            return true;
        }
        self.a.is_positive() && &self.a * &self.a >= int(4) * &self.d * &self.e
    }

    /// Exhaustive residue search oracle: a primitive (u, v, w) mod p^k
    /// with w^2 = d u^4 + a u^2 v^2 + e v^4. Used to cross-check
    /// solvable_at; only feasible for small p^k.
    pub fn residue_solution_exists(&self, p: u64, k: u32) -> bool {
        let m = p.pow(k) as i64;
        let pp = p as i64;
        let reduce = |x: &Int| x.mod_floor(&Int::from(m)).to_i64().unwrap();
        let (d, a, e) = (reduce(&self.d), reduce(&self.a), reduce(&self.e));
        let mut squares = vec![false; m as usize];
        for w in 0..m {
            squares[((w * w) % m) as usize] = true;
        }
        for u in 0..m {
            for v in 0..m {
                if u % pp == 0 && v % pp == 0 {
                    continue;
                }
                let u2 = (u * u) % m;
                let v2 = (v * v) % m;
                let val = (d * u2 % m * u2 + a * u2 % m * v2 + e * v2 % m * v2).rem_euclid(m);
                if squares[val as usize] {
                    return true;
                }
            }
        }
        false
    }

    pub fn solvable_everywhere(&self, bad_primes: &[u64]) -> bool {
        if !self.solvable_real() {
            return false;
        }
        bad_primes.iter().all(|&p| self.solvable_at(p))
    }
}

fn squarefree_divisors(n: &Int) -> Vec<Int> {
    Factorization::of_big(n).signed_squarefree_divisors()
}

#[derive(Debug, Clone)]
pub struct RankCertificate {
    pub curve: EllCurve2T,
    /// everywhere-locally-solvable classes d for the descent via phi,
    /// closed under multiplication mod squares
    pub sel_phi: Vec<Int>,
    pub sel_phihat: Vec<Int>,
    pub dim_phi: u32,
    pub dim_phihat: u32,
    pub rank_bound: u32,
    /// set when local solvability alone did not return a subgroup and the
    /// span had to be widened (still a sound upper bound)
    pub closure_widened: bool,
    pub torsion: Vec<CurvePoint>,
    pub torsion_structure: String,
    /// full point list; present exactly when rank_bound = 0
    pub points: Option<Vec<CurvePoint>>,
}

fn f2_closure(classes: &[Int]) -> (Vec<Int>, bool) {
    let mut set: Vec<Int> = classes.to_vec();
    let mut widened = false;
    loop {
        let mut added = false;
        let snapshot = set.clone();
        for x in &snapshot {
            for y in &snapshot {
                let z = crate::arith::squarefree_part(&(x * y));
                if !set.contains(&z) {
                    set.push(z);
                    added = true;
                    widened = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    set.sort();
    (set, widened)
}

/// dim_2 of the phi-Selmer estimate: everywhere-locally-solvable torsors
/// w^2 = d u^4 + a u^2 v^2 + (b/d) v^4 over squarefree d | b.
fn selmer_phi_classes(a: &Int, b: &Int) -> (Vec<Int>, bool) {
    let mut bad: Vec<u64> = vec![2];
    let deps = b * (a * a - int(4) * b);
    for (p, _) in Factorization::of_big(&deps).pairs {
        let pv = p.to_u64().expect("bad prime fits u64");
        if pv % 2 == 1 && !bad.contains(&pv) {
            bad.push(pv);
        }
    }
    let mut classes = Vec::new();
    for d in squarefree_divisors(b) {
        let e = b / &d;
        let t = Torsor {
            d: d.clone(),
            a: a.clone(),
            e,
        };
        if t.solvable_everywhere(&bad) {
            classes.push(d);
        }
    }
    f2_closure(&classes)
}

pub fn rank_upper_bound(curve: &EllCurve2T) -> RankCertificate {
    assert!(curve.is_integral(), "descent needs an integral model");
    let a = curve.a.to_integer();
    let b = curve.b.to_integer();
    let (sel_phi, w1) = selmer_phi_classes(&a, &b);
    let dual = curve.dual();
    let (sel_phihat, w2) = selmer_phi_classes(&dual.a.to_integer(), &dual.b.to_integer());
    let dim_of = |s: &Vec<Int>| -> u32 {
        assert!(s.len().is_power_of_two(), "Selmer estimate must be a group");
        s.len().trailing_zeros()
    };
    let dim_phi = dim_of(&sel_phi);
    let dim_phihat = dim_of(&sel_phihat);
    let rank_bound = (dim_phi + dim_phihat).saturating_sub(2);
    let (torsion, torsion_structure) = torsion_group(curve);
    let points = if rank_bound == 0 {
        Some(torsion.clone())
    } else {
        None
    };
    RankCertificate {
        curve: curve.clone(),
        sel_phi,
        sel_phihat,
        dim_phi,
        dim_phihat,
        rank_bound,
        closure_widened: w1 || w2,
        torsion,
        torsion_structure,
        points,
    }
}

/// Torsion of an integral model by the integral-point bound: a torsion
/// point has y = 0 or y^2 | 64 disc(x^3 + ax^2 + bx) (the superset is
/// harmless since every candidate is certified by an order computation).
pub fn torsion_group(curve: &EllCurve2T) -> (Vec<CurvePoint>, String) {
    assert!(curve.is_integral());
    let a = curve.a.to_integer();
    let b = curve.b.to_integer();
    let f = Poly::from_coeffs(vec![Int::zero(), b.clone(), a.clone(), Int::one()]);
    let disc = &b * &b * (&a * &a - int(4) * &b);
    let mut pts = vec![CurvePoint::Infinity];
    for r in f.rational_roots() {
        if r.is_integer() {
            pts.push(CurvePoint::Affine(r, rat_i(0)));
        }
    }
    let bound = int(64) * disc.abs();
    for y in Factorization::of_big(&bound).square_divisor_roots() {
        let y2 = &y * &y;
        // integer roots of f - y^2 divide y^2 (constant term of f is 0)
        let mut cands = vec![Int::zero()];
        for d in Factorization::of_big(&y2).divisors() {
            cands.push(d.clone());
            cands.push(-d);
        }
        for x in cands {
            let xv = Rat::from_integer(x);
            if f.eval(&xv) == Rat::from_integer(y2.clone()) {
                let p1 = CurvePoint::Affine(xv.clone(), Rat::from_integer(y.clone()));
                if curve.order_dividing_16(&p1).is_some() && !pts.contains(&p1) {
                    pts.push(curve.neg(&p1));
                    pts.push(p1);
                }
            }
        }
    }
    pts.sort();
    pts.dedup();
    // structure: #E[2] distinguishes Z/n from Z/2 x Z/n
    let two_torsion = pts
        .iter()
        .filter(|p| matches!(p, CurvePoint::Affine(_, y) if y.is_zero()))
        .count()
        + 1;
    let max_order = pts
        .iter()
        .map(|p| curve.order_dividing_16(p).expect("torsion point has finite order"))
        .max()
        .unwrap();
    let n = pts.len();
    let structure = if n == 1 {
        "trivial".to_string()
    } else if two_torsion == 4 && n > max_order as usize {
        format!("Z/2 x Z/{}", max_order)
    } else {
        assert_eq!(n, max_order as usize, "torsion must be cyclic here");
        format!("Z/{}", max_order)
    };
    (pts, structure)
}

/// Full rational point set of a rank-0 curve, in the coordinates of the
/// given (possibly non-integral) model.
pub fn rational_points_rank0(curve: &EllCurve2T) -> Result<Vec<CurvePoint>, String> {
    let (model, lam) = curve.integral_model();
    let cert = rank_upper_bound(&model);
    if cert.rank_bound > 0 {
        return Err(format!(
            "rank bound positive ({}) - cannot conclude",
            cert.rank_bound
        ));
    }
    let l2 = Rat::from_integer(&lam * &lam);
    let l3 = Rat::from_integer(&lam * &lam * &lam);
    let mut pts: Vec<CurvePoint> = cert
        .torsion
        .iter()
        .map(|p| match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x / &l2, y / &l3),
        })
        .collect();
    pts.sort();
    for p in &pts {
        debug_assert!(curve.contains(p));
    }
    Ok(pts)
}

/// The quartic t^2 = e z^4 + k z^2 + 1 with its standard cubic model
/// y^2 = (x + k)(x^2 - 4e), reached by x = 2(t+1)/z^2,
/// y = (4(t+1) + 2k z^2)/z^3.
#[derive(Debug, Clone)]
pub struct QuarticModel {
    pub e: Rat,
    pub k: Rat,
}

impl QuarticModel {
    pub fn new(e: Rat, k: Rat) -> QuarticModel {
        assert!(!e.is_zero(), "degenerate quartic");
        assert!(&k * &k != rat_i(4) * &e, "singular quartic (k^2 = 4e)");
        QuarticModel { e, k }
    }

    pub fn on_quartic(&self, z: &Rat, t: &Rat) -> bool {
        let z2 = z * z;
        t * t == &self.e * &z2 * &z2 + &self.k * &z2 + rat_i(1)
    }

    /// Cubic coefficients (c2, c1, c0) of y^2 = x^3 + c2 x^2 + c1 x + c0.
    pub fn cubic(&self) -> (Rat, Rat, Rat) {
        (
            self.k.clone(),
            rat_i(-4) * &self.e,
            rat_i(-4) * &self.e * &self.k,
        )
    }

    /// The same curve with the 2-torsion root shifted to the origin:
    /// u = x + k gives y^2 = u(u^2 - 2k u + (k^2 - 4e)).
    pub fn curve(&self) -> EllCurve2T {
        EllCurve2T::new(rat_i(-2) * &self.k, &self.k * &self.k - rat_i(4) * &self.e)
    }

    /// (z, t) -> point on curve() coordinates (u = x_cubic + k).
    pub fn forward(&self, z: &Rat, t: &Rat) -> CurvePoint {
        debug_assert!(self.on_quartic(z, t));
        if z.is_zero() {
            return if t == &rat_i(1) {
                CurvePoint::Infinity
            } else {
                CurvePoint::Affine(rat_i(0), rat_i(0))
            };
        }
        let z2 = z * z;
        let x = rat_i(2) * (t + rat_i(1)) / &z2;
        let y = (rat_i(4) * (t + rat_i(1)) + rat_i(2) * &self.k * &z2) / (&z2 * z);
        CurvePoint::Affine(x + &self.k, y)
    }

    /// Inverse of forward where defined; the y = 0 points other than the
    /// origin pull back to the quartic's points at infinity.
    pub fn backward(&self, p: &CurvePoint) -> Option<(Rat, Rat)> {
        match p {
            CurvePoint::Infinity => Some((rat_i(0), rat_i(1))),
            CurvePoint::Affine(u, y) => {
                if u.is_zero() && y.is_zero() {
                    return Some((rat_i(0), rat_i(-1)));
                }
                if y.is_zero() {
                    return None;
                }
                let z = rat_i(2) * u / y;
                let x = u - &self.k;
                let t = &x * &z * &z / rat_i(2) - rat_i(1);
                debug_assert!(self.on_quartic(&z, &t));
                Some((z, t))
            }
        }
    }
}
