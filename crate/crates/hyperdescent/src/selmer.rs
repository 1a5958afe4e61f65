//! Fake 2-descent on the Jacobian of
//!
//! ```text
//!     D:  y^2 = x (x^2 - p^j) (x^2 - 2 p^j),    p = 5 (mod 8),  j in {1, 3},
//! ```
//!
//! the Richelot partner of the `x (x^2 + 2^i p^j)(x^2 + 2^{i+1} p^j)` curves
//! in the congruence classes the elementary case analysis ([`crate::section2`])
//! leaves open.
//!
//! Writing `f = x (x^2 - a)(x^2 - b)` with `a = p^j`, `b = 2 p^j`, the descent
//! works in the etale algebra `L = Q x Q(T2) x Q(T3)`, `T2^2 = a`,
//! `T3^2 = b`, sending a divisor class `[D - 2 inf]` to `x(D) - T` modulo
//! squares. Every such image lands in the S-unit part `L(S, 2)` for
//! `S = {2, p, inf}`, an 11-dimensional F_2 space assembled from the S-unit
//! lattices of `Q(sqrt p)` and `Q(sqrt 2p)` ([`crate::quadfield`]). The fake
//! Selmer group is the subgroup of `ker(N: L(S,2) -> Q(S,2))` satisfying the
//! local image condition at every place of S; the local square classes come
//! from [`crate::localsq`].
//!
//! In the covered congruence classes (`p = 13 mod 16` with `j = 1`,
//! `p = 5 mod 16` with `j = 3`) the Selmer group collapses onto the image of
//! the rational 2-torsion, which pins the Mordell-Weil rank at zero.

use crate::arith::{
    int, is_prime_u64, is_square_q2, rat_i, rat_sqrt_exact, vp_rat, Int, Rat,
};
use crate::f2;
use crate::localsq::{LocalFactor, Place};
use crate::quadfield::{s_unit_square_basis, unit_square_audit, SUnitBasis};
use num::{Signed, Zero};
use serde::Serialize;

/// Element of Q x Q(T2) x Q(T3); each quadratic component is stored as
/// coordinates (r, s) meaning r + s T.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElt {
    pub q: Rat,
    pub k2: (Rat, Rat),
    pub k3: (Rat, Rat),
}

impl AlgebraElt {
    pub fn one() -> AlgebraElt {
        AlgebraElt {
            q: rat_i(1),
            k2: (rat_i(1), Rat::zero()),
            k3: (rat_i(1), Rat::zero()),
        }
    }

    pub fn from_q(q: Rat) -> AlgebraElt {
        AlgebraElt {
            q,
            ..AlgebraElt::one()
        }
    }

    pub fn from_k2(r: Rat, s: Rat) -> AlgebraElt {
        AlgebraElt {
            k2: (r, s),
            ..AlgebraElt::one()
        }
    }

    pub fn from_k3(r: Rat, s: Rat) -> AlgebraElt {
        AlgebraElt {
            k3: (r, s),
            ..AlgebraElt::one()
        }
    }
}

/// The completion of L at one place, as three [`LocalFactor`]s with their
/// square-class bits concatenated (line factor first, then the T2 and T3
/// components).
#[derive(Clone, Debug)]
pub struct LocalAlgebra {
    pub place: Place,
    factors: [LocalFactor; 3],
    offsets: [usize; 3],
    pub dim: usize,
}

impl LocalAlgebra {
    fn new(place: Place, a: &Rat, b: &Rat) -> LocalAlgebra {
        let f1 = LocalFactor::new(place, None);
        let f2 = LocalFactor::new(place, Some(a.clone()));
        let f3 = LocalFactor::new(place, Some(b.clone()));
        let (d1, d2) = (f1.dim(), f2.dim());
        let offsets = [0, d1, d1 + d2];
        let dim = d1 + d2 + f3.dim();
        LocalAlgebra {
            place,
            factors: [f1, f2, f3],
            offsets,
            dim,
        }
    }

    /// Concatenated square class of an invertible element.
    pub fn class_of(&self, x: &AlgebraElt) -> u64 {
        let c1 = self.factors[0].square_class(&x.q, &Rat::zero());
        let c2 = self.factors[1].square_class(&x.k2.0, &x.k2.1);
        let c3 = self.factors[2].square_class(&x.k3.0, &x.k3.1);
        c1 | c2 << self.offsets[1] | c3 << self.offsets[2]
    }

    pub fn line(&self) -> &LocalFactor {
        &self.factors[0]
    }

    /// Does the k-th component (0 = line, 1 = T2, 2 = T3) split here?
    pub fn component_is_split(&self, k: usize) -> bool {
        self.factors[k].is_split()
    }
}

/// The etale algebra Q x Q(T2) x Q(T3) for one (p, j), together with its
/// S-unit square-class basis and the three completions at S = {2, p, inf}.
///
/// Global basis order (one bit each, 11 in total):
///
/// ```text
///     k1: -1, 2, p          (bits 0..3)
///     k2: -1, eps, 2, T2    (bits 3..7)
///     k3: -1, eps', 2, T3   (bits 7..11; T3/p instead of T3 when j = 3)
/// ```
///
/// where eps and eps' are the fundamental units of Q(sqrt p) and Q(sqrt 2p).
/// For j = 3 the last generator is T3/p so that it keeps even valuation at
/// p; its square is then 2p rather than 2p^3.
pub struct EtaleAlgebra {
    pub p: u64,
    pub j: u32,
    pub a: Rat,
    pub b: Rat,
    pub su_p: SUnitBasis,
    pub su_2p: SUnitBasis,
    basis: Vec<(String, AlgebraElt)>,
    locals: [LocalAlgebra; 3],
    res_cols: [Vec<u64>; 3],
}

impl EtaleAlgebra {
    pub fn new(p: u64, j: u32) -> Result<EtaleAlgebra, String> {
        if !is_prime_u64(p) || p % 8 != 5 {
            return Err(format!("p = {p}: need a prime p = 5 (mod 8)"));
        }
        if j != 1 && j != 3 {
            return Err(format!("j = {j}: only j = 1 and j = 3 are wired up"));
        }
        let su_p =
            s_unit_square_basis(p, false).map_err(|e| format!("S-units of Q(sqrt {p}): {e}"))?;
        let su_2p = s_unit_square_basis(p, true)
            .map_err(|e| format!("S-units of Q(sqrt {}): {e}", 2 * p))?;

        let a = Rat::from_integer(Int::from(p).pow(j));
        let b = &a + &a;
        // sqrt(p) = T2 / p^((j-1)/2) and sqrt(2p) = T3 / p^((j-1)/2), so the
        // fundamental units r + s sqrt(d) get their s rescaled.
        let scale = Rat::from_integer(Int::from(p).pow((j - 1) / 2));
        let (er, es) = su_p.eps.as_rat_coords();
        let (fr, fs) = su_2p.eps.as_rat_coords();
        let t3_s = if j == 1 {
            rat_i(1)
        } else {
            Rat::new(int(1), int(p as i64))
        };
        let t3_label = if j == 1 { "T3" } else { "T3/p" };

        let e = |s: &str, x: AlgebraElt| (s.to_string(), x);
        let basis = vec![
            e("-1", AlgebraElt::from_q(rat_i(-1))),
            e("2", AlgebraElt::from_q(rat_i(2))),
            e("p", AlgebraElt::from_q(rat_i(p as i64))),
            e("-1", AlgebraElt::from_k2(rat_i(-1), Rat::zero())),
            e("eps", AlgebraElt::from_k2(er, es / &scale)),
            e("2", AlgebraElt::from_k2(rat_i(2), Rat::zero())),
            e("T2", AlgebraElt::from_k2(Rat::zero(), rat_i(1))),
            e("-1", AlgebraElt::from_k3(rat_i(-1), Rat::zero())),
            e("eps'", AlgebraElt::from_k3(fr, fs / &scale)),
            e("2", AlgebraElt::from_k3(rat_i(2), Rat::zero())),
            e(t3_label, AlgebraElt::from_k3(Rat::zero(), t3_s)),
        ];

        let locals = [
            LocalAlgebra::new(Place::Finite(2), &a, &b),
            LocalAlgebra::new(Place::Finite(p), &a, &b),
            LocalAlgebra::new(Place::Infinity, &a, &b),
        ];
        let res_cols: [Vec<u64>; 3] = [0usize, 1, 2].map(|li| {
            basis
                .iter()
                .map(|(_, x)| locals[li].class_of(x))
                .collect()
        });

        Ok(EtaleAlgebra {
            p,
            j,
            a,
            b,
            su_p,
            su_2p,
            basis,
            locals,
            res_cols,
        })
    }

    pub fn basis(&self) -> &[(String, AlgebraElt)] {
        &self.basis
    }

    pub fn places(&self) -> [Place; 3] {
        [Place::Finite(2), Place::Finite(self.p), Place::Infinity]
    }

    fn place_index(&self, place: Place) -> usize {
        match place {
            Place::Finite(2) => 0,
            Place::Finite(q) if q == self.p => 1,
            Place::Infinity => 2,
            _ => panic!("place {place} is outside S = {{2, {}, inf}}", self.p),
        }
    }

    pub fn local(&self, place: Place) -> &LocalAlgebra {
        &self.locals[self.place_index(place)]
    }

    pub fn mul(&self, x: &AlgebraElt, y: &AlgebraElt) -> AlgebraElt {
        let quad = |u: &(Rat, Rat), v: &(Rat, Rat), c: &Rat| {
            (
                &u.0 * &v.0 + &u.1 * &v.1 * c,
                &u.0 * &v.1 + &u.1 * &v.0,
            )
        };
        AlgebraElt {
            q: &x.q * &y.q,
            k2: quad(&x.k2, &y.k2, &self.a),
            k3: quad(&x.k3, &y.k3, &self.b),
        }
    }

    /// Product of the component norms down to Q.
    pub fn norm(&self, x: &AlgebraElt) -> Rat {
        let nq = |u: &(Rat, Rat), c: &Rat| &u.0 * &u.0 - &u.1 * &u.1 * c;
        &x.q * nq(&x.k2, &self.a) * nq(&x.k3, &self.b)
    }

    /// f(x) = x (x^2 - a)(x^2 - b), which is also the norm of x - T.
    pub fn quintic_value(&self, x: &Rat) -> Rat {
        let sq = x * x;
        x * (&sq - &self.a) * (&sq - &self.b)
    }

    /// Image x0 - T of an affine point with x-coordinate x0, f(x0) != 0.
    pub fn delta_of_point(&self, x0: &Rat) -> AlgebraElt {
        AlgebraElt {
            q: x0.clone(),
            k2: (x0.clone(), rat_i(-1)),
            k3: (x0.clone(), rat_i(-1)),
        }
    }

    /// Multiply out the basis elements named by the coordinate bits.
    pub fn element_from_coords(&self, coords: u64) -> AlgebraElt {
        (0..self.basis.len())
            .filter(|i| coords >> i & 1 == 1)
            .fold(AlgebraElt::one(), |acc, i| self.mul(&acc, &self.basis[i].1))
    }

    /// Coordinates of the norm in Q(S, 2) over the basis {-1, 2, p}
    /// (bits 0, 1, 2). Errors if the norm leaves the S-unit lattice.
    pub fn norm_class_coords(&self, x: &AlgebraElt) -> Result<u64, String> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err("zero divisor has no norm class".to_string());
        }
        let neg = n.is_negative();
        let n_abs = n.abs();
        let v2 = vp_rat(&n_abs, 2);
        let vp = vp_rat(&n_abs, self.p);
        let residual = n_abs * rat_pow_i(2, -v2) * rat_pow_i(self.p, -vp);
        if rat_sqrt_exact(&residual).is_none() {
            return Err(format!("norm {n} is not in <-1, 2, {}> modulo squares", self.p));
        }
        Ok(u64::from(neg)
            | (v2.rem_euclid(2) as u64) << 1
            | (vp.rem_euclid(2) as u64) << 2)
    }

    /// Local square class of an element given by global coordinates.
    pub fn res(&self, place: Place, coords: u64) -> u64 {
        let cols = &self.res_cols[self.place_index(place)];
        (0..cols.len()).fold(0u64, |acc, i| {
            if coords >> i & 1 == 1 {
                acc ^ cols[i]
            } else {
                acc
            }
        })
    }

    /// Render global coordinates as a product per component, e.g.
    /// `(-p; T2; 2)`.
    pub fn coords_pretty(&self, coords: u64) -> String {
        let mut parts = Vec::new();
        for range in [0..3usize, 3..7, 7..11] {
            let mut neg = false;
            let mut syms: Vec<&str> = Vec::new();
            for i in range {
                if coords >> i & 1 == 1 {
                    if self.basis[i].0 == "-1" {
                        neg = true;
                    } else {
                        syms.push(&self.basis[i].0);
                    }
                }
            }
            let body = if syms.is_empty() {
                "1".to_string()
            } else {
                syms.join("*")
            };
            parts.push(if neg { format!("-{body}") } else { body });
        }
        format!("({}; {}; {})", parts[0], parts[1], parts[2])
    }
}

fn rat_pow_i(base: u64, e: i64) -> Rat {
    let pos = Rat::from_integer(Int::from(base).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        pos
    } else {
        pos.recip()
    }
}

/// Closed-form basis of ker(N: L(S,2) -> Q(S,2)), the same coordinate
/// pattern for every covered (p, j); the last generator reads T3/p when
/// j = 3.
pub fn kernel_closed_form() -> Vec<(&'static str, u64)> {
    vec![
        ("(1; 1; -1)", 1 << 7),
        ("(1; 1; 2)", 1 << 9),
        ("(1; -1; 1)", 1 << 3),
        ("(1; eps; eps')", 1 << 4 | 1 << 8),
        ("(1; 2; 1)", 1 << 5),
        ("(-1; eps; 1)", 1 << 0 | 1 << 4),
        ("(2; T2; T3)", 1 << 1 | 1 << 6 | 1 << 10),
        ("(-p; T2; 1)", 1 << 0 | 1 << 2 | 1 << 6),
    ]
}

/// Kernel of the norm map on L(S, 2) as 11-bit coordinate vectors.
///
/// The kernel must be 8-dimensional and agree with [`kernel_closed_form`];
/// any mismatch is a hard error, never a silently smaller group.
pub fn ker_norm_basis(alg: &EtaleAlgebra) -> Result<Vec<u64>, String> {
    let coords: Vec<u64> = alg
        .basis()
        .iter()
        .map(|(_, x)| alg.norm_class_coords(x))
        .collect::<Result<_, _>>()?;
    // one row per target bit of Q(S, 2)
    let rows: Vec<u64> = (0..3)
        .map(|t| (0..11).fold(0u64, |acc, i| acc | ((coords[i] >> t) & 1) << i))
        .collect();
    let kernel = f2::nullspace(&rows, 11);
    if kernel.len() != 8 {
        return Err(format!(
            "norm kernel has dimension {}, expected 8",
            kernel.len()
        ));
    }
    let reference = kernel_closed_form();
    for (label, v) in &reference {
        if !f2::in_span(&kernel, *v) {
            return Err(format!("closed-form kernel element {label} escapes the computed kernel"));
        }
    }
    let ref_vecs: Vec<u64> = reference.iter().map(|(_, v)| *v).collect();
    if f2::rank(&ref_vecs) != 8 {
        return Err("closed-form kernel list is dependent".to_string());
    }
    Ok(kernel)
}

/// dim J[2](Q_v) = (number of irreducible factors of f over Q_v) - 1.
pub fn two_torsion_dim(alg: &EtaleAlgebra, place: Place) -> usize {
    let local = alg.local(place);
    let quads = [1, 2]
        .iter()
        .map(|&k| if local.component_is_split(k) { 2 } else { 1 })
        .sum::<usize>();
    1 + quads - 1
}

/// The three rational 2-torsion divisors, named by the factor of f cutting
/// them out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoTorsionFactor {
    X,
    XSquaredMinusA,
    XSquaredMinusB,
}

/// Image of a 2-torsion divisor class: for the divisor cut out by a factor
/// h of f, the value is (-1)^(deg h) (h(T) - (f/h)(T)) componentwise. Each
/// component picks out the term not vanishing there.
pub fn delta_of_two_torsion(alg: &EtaleAlgebra, factor: TwoTorsionFactor) -> AlgebraElt {
    let (a, b) = (&alg.a, &alg.b);
    match factor {
        TwoTorsionFactor::X => AlgebraElt {
            q: a * b,
            k2: (Rat::zero(), rat_i(-1)),
            k3: (Rat::zero(), rat_i(-1)),
        },
        TwoTorsionFactor::XSquaredMinusA => AlgebraElt {
            q: -a.clone(),
            k2: (Rat::zero(), b - a),
            k3: (b - a, Rat::zero()),
        },
        TwoTorsionFactor::XSquaredMinusB => AlgebraElt {
            q: -b.clone(),
            k2: (a - b, Rat::zero()),
            k3: (Rat::zero(), a - b),
        },
    }
}

/// Global coordinates of the two rational 2-torsion images
///
/// ```text
///     t1 = delta(x-divisor)         ~ (2; -T2; -T3)
///     t2 = delta((x^2 - a)-divisor) ~ (-p; T2; 2 in k3)
/// ```
///
/// For j = 3 the k3 component of t1 rewrites through p = (T3/p)^2 / 2 as
/// -T3 = -2 (T3/p) times a square. The claimed coordinates are re-verified
/// against the direct square classes at all three places before being
/// returned.
pub fn torsion_image_coords(alg: &EtaleAlgebra) -> Result<(u64, u64), String> {
    let t1 = match alg.j {
        1 => 1 << 1 | 1 << 3 | 1 << 6 | 1 << 7 | 1 << 10,
        _ => 1 << 1 | 1 << 3 | 1 << 6 | 1 << 7 | 1 << 9 | 1 << 10,
    };
    let t2 = 1 << 0 | 1 << 2 | 1 << 6 | 1 << 9;
    let pairs = [
        (t1, TwoTorsionFactor::X, "t1"),
        (t2, TwoTorsionFactor::XSquaredMinusA, "t2"),
    ];
    for (coords, factor, name) in pairs {
        let elt = delta_of_two_torsion(alg, factor);
        for place in alg.places() {
            if alg.res(place, coords) != alg.local(place).class_of(&elt) {
                return Err(format!(
                    "torsion image {name}: closed-form coordinates disagree with the direct class at {place}"
                ));
            }
        }
    }
    Ok((t1, t2))
}

/// Image of J(Q_v)/2J(Q_v) in the local square-class group.
#[derive(Clone, Debug)]
pub struct LocalImage {
    pub place: Place,
    pub two_torsion_dim: usize,
    pub target_dim: usize,
    pub basis: Vec<u64>,
    pub provenance: Vec<String>,
}

/// Compute the local image at one place of S.
///
/// The dimension is pinned in advance: dim J[2](Q_v) plus 2 at v = 2,
/// minus 2 at the real place, unchanged at v = p. Generators are the
/// 2-torsion images followed by point classes x0 - T for integer x0 with
/// f(x0) a nonzero square in Q_v, scanned outward from 0. Falling short of
/// the target within |x0| <= 500 is a hard error.
pub fn local_image(alg: &EtaleAlgebra, place: Place) -> Result<LocalImage, String> {
    let local = alg.local(place);
    let tt = two_torsion_dim(alg, place);
    let shift = match place {
        Place::Finite(2) => 2i64,
        Place::Infinity => -2,
        _ => 0,
    };
    let target = (tt as i64 + shift) as usize;

    let mut basis: Vec<u64> = Vec::new();
    let mut provenance: Vec<String> = Vec::new();
    let torsion = [
        (TwoTorsionFactor::X, "x"),
        (TwoTorsionFactor::XSquaredMinusA, "x^2 - a"),
        (TwoTorsionFactor::XSquaredMinusB, "x^2 - b"),
    ];
    for (factor, name) in torsion {
        let val = delta_of_two_torsion(alg, factor);
        let n = alg.norm(&val);
        if !local.line().is_square(&n, &Rat::zero()) {
            return Err(format!(
                "2-torsion image of {name} has non-square norm at {place}"
            ));
        }
        let class = local.class_of(&val);
        if !f2::in_span(&basis, class) {
            basis.push(class);
            provenance.push(format!("2-torsion divisor cut by {name}"));
        }
    }

    if basis.len() < target {
        'scan: for mag in 1..=500i64 {
            for sign in [1i64, -1] {
                let x0 = rat_i(sign * mag);
                let fx = alg.quintic_value(&x0);
                if fx.is_zero() || !local.line().is_square(&fx, &Rat::zero()) {
                    continue;
                }
                let class = local.class_of(&alg.delta_of_point(&x0));
                if !f2::in_span(&basis, class) {
                    basis.push(class);
                    provenance.push(format!("point class at x = {}", sign * mag));
                    if basis.len() == target {
                        break 'scan;
                    }
                }
            }
        }
    }
    if basis.len() != target {
        return Err(format!(
            "local image at {place}: dimension {} after scanning |x| <= 500, target {target}",
            basis.len()
        ));
    }
    Ok(LocalImage {
        place,
        two_torsion_dim: tt,
        target_dim: target,
        basis,
        provenance,
    })
}

/// The congruence classes in which the descent is expected to pin the rank
/// at zero.
pub fn rank_zero_congruence(p: u64, j: u32) -> bool {
    (j == 1 && p % 16 == 13) || (j == 3 && p % 16 == 5)
}

/// The second tabulated dyadic point, indexed by p mod 32. The first is
/// always x = 6: f(6)/4 = 3 (36 - p^j)(18 - p^j) = 3 * 7 * 5 = 1 (mod 8)
/// whenever p^j = 5 (mod 8).
pub fn extra_dyadic_point_x(p: u64, j: u32) -> Option<i64> {
    match (j, p % 32) {
        (1, 13) => Some(5),
        (1, 29) => Some(13),
        (3, 5) => Some(13),
        (3, 21) => Some(5),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalImageSummary {
    pub place: String,
    pub two_torsion_dim: usize,
    pub target_dim: usize,
    pub dim: usize,
    pub generators: Vec<String>,
}

/// Everything the rank-zero verdict rests on, in re-checkable form.
#[derive(Clone, Debug, Serialize)]
pub struct SelmerCertificate {
    pub p: u64,
    pub j: u32,
    pub rank_zero_congruence: bool,
    pub kernel_dim: usize,
    pub local: Vec<LocalImageSummary>,
    pub selmer_dim: usize,
    pub selmer_basis: Vec<String>,
    pub selmer_basis_coords: Vec<u64>,
    pub contains_two_torsion_images: bool,
    pub equals_two_torsion_image_span: bool,
    pub rank_bound: usize,
    pub unit_conditions: Vec<String>,
    pub notes: Vec<String>,
}

/// Fake Selmer group of Jac(D) for y^2 = x (x^2 - p^j)(x^2 - 2 p^j).
///
/// Works for any prime p = 5 (mod 8) and j in {1, 3}; only in the
/// congruence classes flagged by [`rank_zero_congruence`] is the rank
/// bound expected to vanish. Every intermediate claim (kernel dimension,
/// closed-form coordinates, image dimensions, membership of the tabulated
/// dyadic points, torsion containment) is re-verified, and any failure
/// surfaces as an error rather than a smaller group.
pub fn selmer_group(p: u64, j: u32) -> Result<SelmerCertificate, String> {
    let alg = EtaleAlgebra::new(p, j)?;
    selmer_group_with(&alg)
}

/// [`selmer_group`] on an algebra built elsewhere (the pipeline constructs
/// them once per prime in a shared read-only pass).
pub fn selmer_group_with(alg: &EtaleAlgebra) -> Result<SelmerCertificate, String> {
    let (p, j) = (alg.p, alg.j);
    let kernel = ker_norm_basis(alg)?;
    let (t1, t2) = torsion_image_coords(alg)?;
    for (name, t) in [("t1", t1), ("t2", t2)] {
        if !f2::in_span(&kernel, t) {
            return Err(format!("torsion image {name} escapes the norm kernel"));
        }
    }
    if rat_sqrt_exact(&alg.a).is_some() || rat_sqrt_exact(&alg.b).is_some() {
        return Err("p^j or 2 p^j is a rational square, outside the family".to_string());
    }

    let mut rows: Vec<u64> = Vec::new();
    let mut summaries = Vec::new();
    for place in alg.places() {
        let img = local_image(alg, place)?;
        if place == Place::Finite(2) {
            // the tabulated dyadic point classes must land inside the
            // computed image; this cross-checks the dimension formula
            let mut xs = vec![6i64];
            xs.extend(extra_dyadic_point_x(p, j));
            for x0 in xs {
                let x = rat_i(x0);
                if !is_square_q2(&alg.quintic_value(&x)) {
                    return Err(format!("f({x0}) is not a 2-adic square for p = {p}, j = {j}"));
                }
                let class = alg.local(place).class_of(&alg.delta_of_point(&x));
                if !f2::in_span(&img.basis, class) {
                    return Err(format!(
                        "dyadic point class at x = {x0} escapes the computed local image"
                    ));
                }
            }
        }
        // conditions on the kernel: one row per functional annihilating
        // the local image
        let functionals = f2::nullspace(&img.basis, alg.local(place).dim);
        let res_k: Vec<u64> = kernel.iter().map(|&k| alg.res(place, k)).collect();
        for phi in functionals {
            rows.push(
                (0..kernel.len()).fold(0u64, |acc, k| acc | f2::dot(phi, res_k[k]) << k),
            );
        }
        summaries.push(LocalImageSummary {
            place: place.to_string(),
            two_torsion_dim: img.two_torsion_dim,
            target_dim: img.target_dim,
            dim: img.basis.len(),
            generators: img.provenance,
        });
    }

    let sel_y = f2::nullspace(&rows, kernel.len());
    let selmer: Vec<u64> = sel_y
        .iter()
        .map(|&y| {
            (0..kernel.len()).fold(
                0u64,
                |acc, k| if y >> k & 1 == 1 { acc ^ kernel[k] } else { acc },
            )
        })
        .collect();

    if !(f2::in_span(&selmer, t1) && f2::in_span(&selmer, t2)) {
        return Err(
            "computed Selmer group misses a rational 2-torsion image; local conditions are inconsistent"
                .to_string(),
        );
    }
    // a and b are rational non-squares, so J(Q)[2] has dimension exactly 2
    // and the bound is dim Sel - 2
    let rank_bound = selmer.len() - 2;

    let audit = unit_square_audit(p).map_err(|e| format!("unit residue audit: {e}"))?;
    let mut notes = vec![format!("eps' denotes the fundamental unit of Q(sqrt {})", 2 * p)];
    if j == 3 {
        notes.push(
            "the k3 S-unit lattice uses T3/p so its generator keeps even valuation at p"
                .to_string(),
        );
    }
    if let Some(d) = &audit.disagreement {
        notes.push(format!("unit residue audit: {d}"));
    }

    Ok(SelmerCertificate {
        p,
        j,
        rank_zero_congruence: rank_zero_congruence(p, j),
        kernel_dim: kernel.len(),
        local: summaries,
        selmer_dim: selmer.len(),
        selmer_basis: selmer.iter().map(|&v| alg.coords_pretty(v)).collect(),
        selmer_basis_coords: selmer.clone(),
        contains_two_torsion_images: true,
        equals_two_torsion_image_span: selmer.len() == 2,
        rank_bound,
        unit_conditions: vec![
            format!(
                "Q(sqrt {p}): N(eps) = -1 verified: {}; {}",
                alg.su_p.unit_norm_is_minus_one, alg.su_p.class_condition
            ),
            format!(
                "Q(sqrt {}): N(eps') = -1 verified: {}; {}",
                2 * p,
                alg.su_2p.unit_norm_is_minus_one,
                alg.su_2p.class_condition
            ),
        ],
        notes,
    })
}

/// Outcome of re-proving, by direct F_2 rank computation, that the local
/// residue vectors used to cut the Selmer group down to the torsion span
/// are independent.
#[derive(Clone, Debug, Serialize)]
pub struct IndependenceAudit {
    pub p: u64,
    pub j: u32,
    pub vector_count: usize,
    pub rank: usize,
    pub independent: bool,
    pub t1_matches_product: bool,
    pub t2_matches_product: bool,
    pub notes: Vec<String>,
}

/// Replays the elimination argument behind the rank-zero verdict.
///
/// The audit vectors live in the product of the three local square-class
/// groups (11 + 6 + 5 = 22 bits): six local classes d3..d8 (the dyadic
/// points x = 6 and the congruence-indexed one, the torsion images at p,
/// the torsion images at the real place) and the eight residues h1..h8 of
/// the closed-form kernel basis. Full rank 14 is the claim checked, along
/// with the two product identities
///
/// ```text
///     res_S(t1) = d1 + d5 + d7      res_S(t2) = d2 + d6 + d7 + d8.
/// ```
pub fn independence_audit(p: u64, j: u32) -> Result<IndependenceAudit, String> {
    if !rank_zero_congruence(p, j) {
        return Err(format!(
            "the audit table is indexed by p mod 32 inside the covered congruence classes; (p, j) = ({p}, {j}) is outside them"
        ));
    }
    let alg = EtaleAlgebra::new(p, j)?;
    ker_norm_basis(&alg)?;
    let (t1, t2) = torsion_image_coords(&alg)?;

    let dims: Vec<usize> = alg.places().iter().map(|&v| alg.local(v).dim).collect();
    let off = [0usize, dims[0], dims[0] + dims[1]];
    let res_s = |coords: u64| -> u64 {
        alg.res(Place::Finite(2), coords)
            | alg.res(Place::Finite(p), coords) << off[1]
            | alg.res(Place::Infinity, coords) << off[2]
    };

    let t1e = delta_of_two_torsion(&alg, TwoTorsionFactor::X);
    let t2e = delta_of_two_torsion(&alg, TwoTorsionFactor::XSquaredMinusA);
    let x6 = alg.delta_of_point(&rat_i(6));
    let x4v = extra_dyadic_point_x(p, j).expect("congruence checked above");
    if !is_square_q2(&alg.quintic_value(&rat_i(x4v))) {
        return Err(format!("x = {x4v} is not a 2-adic point for p = {p}, j = {j}"));
    }
    let x4 = alg.delta_of_point(&rat_i(x4v));

    let class2 = |e: &AlgebraElt| alg.local(Place::Finite(2)).class_of(e);
    let d1 = class2(&t1e);
    let d2 = class2(&t2e);
    let d3 = class2(&x6);
    let d4 = class2(&x4);
    let d5 = alg.local(Place::Finite(p)).class_of(&t1e) << off[1];
    let d6 = alg.local(Place::Finite(p)).class_of(&t2e) << off[1];
    let d7 = alg.local(Place::Infinity).class_of(&t1e) << off[2];
    let t1t2 = alg.mul(&t1e, &t2e);
    let d8 = alg.local(Place::Infinity).class_of(&t1t2) << off[2];
    // t1 t2 = (-2 p^(3j); -p^(2j); -p^j T3): signs (-; -, -; -, +)
    if d8 >> off[2] != 0b01111 {
        return Err("real class of t1*t2 does not match its sign pattern".to_string());
    }

    let hs: Vec<u64> = kernel_closed_form().iter().map(|(_, v)| res_s(*v)).collect();
    let mut vectors = vec![d3, d4, d5, d6, d7, d8];
    vectors.extend(hs);
    let rank = f2::rank(&vectors);
    let independent = rank == vectors.len();
    let t1_matches_product = res_s(t1) == d1 ^ d5 ^ d7;
    let t2_matches_product = res_s(t2) == d2 ^ d6 ^ d7 ^ d8;

    let audit = unit_square_audit(p).map_err(|e| format!("unit residue audit: {e}"))?;
    let mut notes = vec![
        "fourteen vectors are checked (six local classes d3..d8 and eight kernel residues h1..h8); a quoted count of nineteen matches no explicit list and is recorded as a discrepancy, not resolved"
            .to_string(),
    ];
    if let Some(d) = &audit.disagreement {
        notes.push(format!("unit residue audit: {d}"));
        notes.push(
            "independence does not lean on the 2*eps residue claim; the rank above is a direct F_2 computation"
                .to_string(),
        );
    }

    Ok(IndependenceAudit {
        p,
        j,
        vector_count: vectors.len(),
        rank,
        independent,
        t1_matches_product,
        t2_matches_product,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn norm_coordinates_of_the_global_basis() {
        // hand values over {-1, 2, p}: N(eps) = N(eps') = -1, N(T2) = -p^j,
        // N(T3) = -2 p^j and N(T3/p) = -2p; the -1s have norm 1 in the
        // quadratic components, the 2s norm 4.
        let want = [
            0b001, 0b010, 0b100, // k1: -1, 2, p
            0, 0b001, 0, 0b101, // k2: -1, eps, 2, T2
            0, 0b001, 0, 0b111, // k3: -1, eps', 2, T3 (or T3/p)
        ];
        for (p, j) in [(13u64, 1u32), (5, 3)] {
            let alg = EtaleAlgebra::new(p, j).unwrap();
            for (i, (label, elt)) in alg.basis().iter().enumerate() {
                assert_eq!(
                    alg.norm_class_coords(elt).unwrap(),
                    want[i],
                    "basis element {label} at (p, j) = ({p}, {j})"
                );
            }
        }
    }

    #[test]
    fn norm_kernel_is_eight_dimensional_and_matches_the_closed_form() {
        for (p, j) in [(13u64, 1u32), (29, 1), (5, 3), (37, 3)] {
            let alg = EtaleAlgebra::new(p, j).unwrap();
            let kernel = ker_norm_basis(&alg).unwrap();
            assert_eq!(kernel.len(), 8);
            for (label, v) in kernel_closed_form() {
                assert!(f2::in_span(&kernel, v), "{label} at (p, j) = ({p}, {j})");
                // membership in the kernel means the honest norm is a
                // rational square, e.g. N(2; T2; T3) = 2(-p^j)(-2p^j) = (2p^j)^2
                let n = alg.norm(&alg.element_from_coords(v));
                assert!(rat_sqrt_exact(&n).is_some(), "{label} has norm {n}");
            }
        }
    }

    #[test]
    fn two_torsion_dimension_by_place() {
        // x stays irreducible everywhere; x^2 - p^j and x^2 - 2p^j are
        // irreducible over Q_2 and Q_p and split over R: dims (2, 2, 4)
        for (p, j) in [(13u64, 1u32), (29, 1), (5, 3), (37, 3)] {
            let alg = EtaleAlgebra::new(p, j).unwrap();
            assert_eq!(two_torsion_dim(&alg, Place::Finite(2)), 2, "p = {p}");
            assert_eq!(two_torsion_dim(&alg, Place::Finite(p)), 2, "p = {p}");
            assert_eq!(two_torsion_dim(&alg, Place::Infinity), 4, "p = {p}");
        }
    }

    #[test]
    fn local_images_reach_the_dimension_formula() {
        // dim Im(delta_v) = dim J[2](Q_v) + 2 at v = 2, - 2 at the real
        // place, unchanged at v = p
        for (p, j) in [(13u64, 1u32), (29, 1), (5, 3)] {
            let alg = EtaleAlgebra::new(p, j).unwrap();
            let d2 = local_image(&alg, Place::Finite(2)).unwrap();
            let dp = local_image(&alg, Place::Finite(p)).unwrap();
            let di = local_image(&alg, Place::Infinity).unwrap();
            assert_eq!(
                (d2.basis.len(), dp.basis.len(), di.basis.len()),
                (4, 2, 2),
                "(p, j) = ({p}, {j})"
            );
            assert_eq!(f2::rank(&d2.basis), 4);
        }
    }

    #[test]
    fn dyadic_image_contains_the_tabulated_point_classes() {
        // p = 13: f(5) = -60 and f(6) = 1380, both 4 * (1 mod 8)
        let alg = EtaleAlgebra::new(13, 1).unwrap();
        let img = local_image(&alg, Place::Finite(2)).unwrap();
        for x0 in [5i64, 6] {
            assert!(is_square_q2(&alg.quintic_value(&rat_i(x0))));
            let class = alg
                .local(Place::Finite(2))
                .class_of(&alg.delta_of_point(&rat_i(x0)));
            assert!(f2::in_span(&img.basis, class), "x = {x0}");
        }
        assert_eq!(extra_dyadic_point_x(13, 1), Some(5));

        // p = 29: f(5) = 660 = 4 * (5 mod 8) is no longer a square, the
        // table swaps in x = 13 with f(13) = 202020 = 4 * (1 mod 8)
        let alg = EtaleAlgebra::new(29, 1).unwrap();
        assert!(!is_square_q2(&alg.quintic_value(&rat_i(5))));
        assert_eq!(extra_dyadic_point_x(29, 1), Some(13));
        let img = local_image(&alg, Place::Finite(2)).unwrap();
        let class = alg
            .local(Place::Finite(2))
            .class_of(&alg.delta_of_point(&rat_i(13)));
        assert!(f2::in_span(&img.basis, class));

        assert_eq!(extra_dyadic_point_x(5, 3), Some(13));
        assert_eq!(extra_dyadic_point_x(53, 3), Some(5)); // 53 = 21 mod 32
    }

    #[test]
    fn real_image_is_spanned_by_the_torsion_sign_patterns() {
        // delta(x-div) = (ab; -T2; -T3) has signs (+; -, +; -, +) = 0b01010;
        // multiplying by delta((x^2-a)-div) gives (-; -, -; -, +) = 0b01111
        let alg = EtaleAlgebra::new(13, 1).unwrap();
        let img = local_image(&alg, Place::Infinity).unwrap();
        assert!(f2::in_span(&img.basis, 0b01010));
        assert!(f2::in_span(&img.basis, 0b01111));
        assert_eq!(f2::rank(&img.basis), 2);
    }

    #[test]
    fn selmer_groups_collapse_onto_the_torsion_image() {
        for (p, j) in [(13u64, 1u32), (29, 1), (5, 3)] {
            let cert = selmer_group(p, j).unwrap();
            assert!(cert.rank_zero_congruence);
            assert_eq!(cert.kernel_dim, 8);
            assert_eq!(cert.selmer_dim, 2, "(p, j) = ({p}, {j})");
            assert_eq!(cert.rank_bound, 0);
            assert!(cert.contains_two_torsion_images);
            assert!(cert.equals_two_torsion_image_span);
            let dims: Vec<usize> = cert.local.iter().map(|l| l.dim).collect();
            assert_eq!(dims, [4, 2, 2]);
        }
    }

    #[test]
    fn independence_audit_certifies_full_rank() {
        for (p, j) in [(13u64, 1u32), (29, 1), (5, 3)] {
            let audit = independence_audit(p, j).unwrap();
            assert_eq!(audit.vector_count, 14);
            assert_eq!(audit.rank, 14, "(p, j) = ({p}, {j})");
            assert!(audit.independent);
            assert!(audit.t1_matches_product);
            assert!(audit.t2_matches_product);
            assert!(audit.notes.iter().any(|n| n.contains("nineteen")));
            // the 2*eps residue disagreement must surface, never vanish
            assert!(audit.notes.iter().any(|n| n.contains("2*eps")));
        }
        assert!(independence_audit(5, 1).is_err()); // outside the table
    }

    #[test]
    fn residue_classes_multiply_through_the_algebra() {
        // square classes are homomorphic through honest products of S-unit
        // basis elements, not just by linearity of the lookup
        let alg = EtaleAlgebra::new(13, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(0x5e13);
        for _ in 0..40 {
            let x = rng.gen_range(0u64..1 << 11);
            let y = rng.gen_range(0u64..1 << 11);
            let ex = alg.element_from_coords(x);
            let ey = alg.element_from_coords(y);
            let exy = alg.mul(&ex, &ey);
            for place in alg.places() {
                let local = alg.local(place);
                assert_eq!(local.class_of(&ex), alg.res(place, x));
                assert_eq!(
                    local.class_of(&exy),
                    local.class_of(&ex) ^ local.class_of(&ey)
                );
            }
        }
    }

    #[test]
    fn point_coboundaries_have_the_quintic_as_norm() {
        let alg = EtaleAlgebra::new(5, 3).unwrap();
        for x0 in -20i64..=20 {
            let x = rat_i(x0);
            let fx = alg.quintic_value(&x);
            if fx.is_zero() {
                continue;
            }
            assert_eq!(alg.norm(&alg.delta_of_point(&x)), fx);
        }
    }

    #[test]
    fn kernel_members_have_square_norms() {
        let alg = EtaleAlgebra::new(29, 1).unwrap();
        let kernel = ker_norm_basis(&alg).unwrap();
        let mut rng = StdRng::seed_from_u64(0x6e29);
        for _ in 0..20 {
            let mask = rng.gen_range(0u64..1 << 8);
            let coords = (0..8)
                .filter(|k| mask >> k & 1 == 1)
                .fold(0u64, |acc, k| acc ^ kernel[k]);
            let n = alg.norm(&alg.element_from_coords(coords));
            assert!(rat_sqrt_exact(&n).is_some(), "kernel member norm {n}");
        }
    }

    #[test]
    fn scaled_generator_keeps_the_odd_power_case_integral() {
        let alg = EtaleAlgebra::new(5, 3).unwrap();
        assert_eq!(alg.basis()[10].0, "T3/p");
        let (t1, _) = torsion_image_coords(&alg).unwrap();
        // -T3 = -2 (T3/p) times the square (p^2/2... ) picks up the k3 "2"
        assert_ne!(t1 & 1 << 9, 0);
        let alg = EtaleAlgebra::new(13, 1).unwrap();
        assert_eq!(alg.basis()[10].0, "T3");
        let (t1, _) = torsion_image_coords(&alg).unwrap();
        assert_eq!(t1 & 1 << 9, 0);
    }
}
