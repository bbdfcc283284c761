// SPDX-License-Identifier: Apache-2.0

//! Local solvability of `d w^2 = g(z)` over the reals and over Q_l.
//!
//! Over Q_l the question is whether `d·g(z)` is a square (or zero) for some
//! `z` in `Z_l ∪ 1/(lZ_l)`. Each patch is searched digit by digit. A node
//! fixes `z` modulo `l^k` and carries the shifted polynomial
//! `P(x) = d·g(z0 + l^k x) / l^c` with its content removed; the node is
//! closed as soon as the value class of `P` is constant on `Z_l`, or when
//! Hensel's lemma certifies a root of `g` near `z0`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, exact_sqrt, legendre_u64, unit_square_class, valuation, UnitClass};
use crate::error::SolveError;
use crate::family::HomogeneousSpace;
use crate::{Int, Rational};

/// Largest prime whose residues the digit search will enumerate.
pub const MAX_ENUMERATED_PRIME: u64 = 1 << 32;

/// Either the real place or a finite prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LocalPlace {
    Real,
    Prime(Int),
}

impl fmt::Display for LocalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalPlace::Real => f.write_str("inf"),
            LocalPlace::Prime(l) => l.fmt(f),
        }
    }
}

impl From<LocalPlace> for String {
    fn from(p: LocalPlace) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for LocalPlace {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        if s == "inf" {
            return Ok(LocalPlace::Real);
        }
        s.parse::<Int>()
            .map(LocalPlace::Prime)
            .map_err(|e| format!("bad place {s:?}: {e}"))
    }
}

/// Which affine chart of the quartic a certificate lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Patch {
    /// `z ∈ Z_l`, quartic `g`.
    Integral,
    /// `t = 1/z ∈ l Z_l`, reversed quartic `h(t) = t^4 g(1/t)`.
    Reciprocal,
}

/// Evidence attached to a solvable verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A rational point, valid at every place.
    Rational {
        #[serde(with = "rational_str")]
        z: Rational,
        #[serde(with = "rational_str")]
        w: Rational,
    },
    /// A real point with `z^2` equal to the given value, or a point at
    /// infinity when absent.
    Real {
        #[serde(with = "opt_rational_str")]
        z_squared: Option<Rational>,
    },
    /// `d·g(center)` (resp. `d·h(center)`) is a nonzero square in Q_l.
    UnitSquare {
        patch: Patch,
        #[serde(with = "int_str")]
        center: Int,
        precision: u32,
    },
    /// `v(g(center)) > 2 v(g'(center))` (resp. for `h`): an l-adic root, so `w = 0`.
    HenselRoot {
        patch: Patch,
        #[serde(with = "int_str")]
        center: Int,
        precision: u32,
    },
}

/// Solvability of one space at one place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalVerdict {
    pub place: LocalPlace,
    pub solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    /// Deepest digit level reached; for refutations, the exhausted depth.
    pub search_depth: u32,
}

/// Square class of a nonzero rational in Q_l.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QpSquareClass {
    pub odd_valuation: bool,
    pub unit: UnitClass,
}

impl QpSquareClass {
    pub fn is_square(&self) -> bool {
        !self.odd_valuation && self.unit.is_square()
    }
}

/// Valuation parity and unit class of `x ≠ 0` in Q_l.
pub fn square_class_qp(x: &Rational, l: &Int) -> Result<QpSquareClass, crate::error::ArithError> {
    let v = arith::padic_valuation(x, l)?;
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while num.is_multiple_of(l) {
        num /= l;
    }
    while den.is_multiple_of(l) {
        den /= l;
    }
    // num/den and num*den differ by the square den^2
    let unit = unit_square_class(&(num * den), l)?;
    Ok(QpSquareClass {
        odd_valuation: v.rem_euclid(2) == 1,
        unit,
    })
}

/// Is `x` a square in Q_l (zero counts)?
pub fn is_qp_square(x: &Rational, l: &Int) -> bool {
    x.is_zero() || square_class_qp(x, l).map(|c| c.is_square()).unwrap_or(false)
}

/// Decide `C(R) ≠ ∅` by sign analysis of `d·g` as a quadratic in `s = z^2 ≥ 0`.
pub fn real_solvable(space: &HomogeneousSpace) -> LocalVerdict {
    let a = &space.d * &space.u4;
    let b = &space.d * &space.u2;
    let c = &space.d * &space.u0;
    let verdict = |witness: Option<Witness>| LocalVerdict {
        place: LocalPlace::Real,
        solvable: witness.is_some(),
        witness,
        search_depth: 0,
    };
    if !c.is_negative() {
        return verdict(Some(Witness::Real {
            z_squared: Some(Rational::zero()),
        }));
    }
    if a.is_positive() {
        return verdict(Some(Witness::Real { z_squared: None }));
    }
    if a.is_zero() {
        // linear in s with negative value at 0
        if b.is_positive() {
            let s = Rational::new(-c, b);
            return verdict(Some(Witness::Real { z_squared: Some(s) }));
        }
        return verdict(None);
    }
    // a < 0 and c < 0: concave, need the vertex at s > 0 with nonnegative value
    let disc = &b * &b - Int::from(4) * &a * &c;
    if b.is_positive() && !disc.is_negative() {
        let vertex = Rational::new(-b, Int::from(2) * a);
        return verdict(Some(Witness::Real {
            z_squared: Some(vertex),
        }));
    }
    verdict(None)
}

/// Small rational points `z = a/b`, tried before any local search.
pub fn small_rational_point(space: &HomogeneousSpace) -> Option<Witness> {
    const CANDIDATES: [(i64, i64); 8] = [(0, 1), (1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)];
    for (a, b) in CANDIDATES {
        let (a, b) = (Int::from(a), Int::from(b));
        let a2 = &a * &a;
        let b2 = &b * &b;
        let homog = (&space.u4 * &a2 + &space.u2 * &b2) * &a2 + &space.u0 * &b2 * &b2;
        if let Some(root) = exact_sqrt(&(&space.d * &homog)) {
            let z = Rational::new(a, b);
            let w = Rational::new(root, &space.d * b2);
            debug_assert!(space.contains(&z, &w));
            return Some(Witness::Rational { z, w });
        }
    }
    None
}

/// Depth cap for the digit search at `l`.
pub fn depth_cap(space: &HomogeneousSpace, l: &Int) -> u32 {
    let disc = valuation(&space.discriminant(), l).unwrap_or(0);
    let lead = valuation(&(Int::from(4) * &space.u4 * &space.d), l).unwrap_or(0);
    disc + lead + 8
}

/// Decide `C(Q_l) ≠ ∅`.
pub fn padic_solvable(space: &HomogeneousSpace, l: &Int) -> Result<LocalVerdict, SolveError> {
    let place = LocalPlace::Prime(l.clone());
    if let Some(w) = small_rational_point(space) {
        return Ok(LocalVerdict {
            place,
            solvable: true,
            witness: Some(w),
            search_depth: 0,
        });
    }
    let l_small = l
        .to_u64()
        .filter(|&x| x < MAX_ENUMERATED_PRIME)
        .ok_or_else(|| SolveError::PrimeTooLarge(l.to_string()))?;
    let mut search = DigitSearch {
        space,
        l: l.clone(),
        l_small,
        precision: if l_small == 2 { 3 } else { 1 },
        cap: depth_cap(space, l),
        max_depth: 0,
    };
    for patch in [Patch::Integral, Patch::Reciprocal] {
        if let Some(w) = search.run(patch)? {
            return Ok(LocalVerdict {
                place,
                solvable: true,
                witness: Some(w),
                search_depth: search.max_depth,
            });
        }
    }
    Ok(LocalVerdict {
        place,
        solvable: false,
        witness: None,
        search_depth: search.max_depth,
    })
}

type Poly = [Int; 5];

fn eval(poly: &Poly, x: &Int) -> Int {
    poly.iter().rev().fold(Int::zero(), |acc, c| acc * x + c)
}

fn derivative_at(poly: &Poly, x: &Int) -> Int {
    poly.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Int::zero(), |acc, (j, c)| acc * x + c * Int::from(j))
}

/// Coefficients of `poly(r + scale·x)`.
fn shift_and_scale(poly: &Poly, r: &Int, scale: &Int) -> Poly {
    // Taylor shift by repeated synthetic division
    let mut c = poly.clone();
    for i in 0..4 {
        for j in (i..4).rev() {
            let t = &c[j + 1] * r;
            c[j] += t;
        }
    }
    let mut factor = Int::one();
    for coef in c.iter_mut() {
        *coef *= &factor;
        factor *= scale;
    }
    c
}

struct DigitSearch<'a> {
    space: &'a HomogeneousSpace,
    l: Int,
    l_small: u64,
    precision: u32,
    cap: u32,
    max_depth: u32,
}

struct Node {
    poly: Poly,
    /// Parity of the power of `l` divided out so far.
    parity: u32,
    center: Int,
    /// `center` is known modulo `l^depth`.
    depth: u32,
    modulus: Int,
}

impl DigitSearch<'_> {
    fn base_poly(&self, patch: Patch) -> Poly {
        match patch {
            Patch::Integral => self.space.coefficients(),
            Patch::Reciprocal => self.space.reversed_coefficients(),
        }
    }

    fn run(&mut self, patch: Patch) -> Result<Option<Witness>, SolveError> {
        let base = self.base_poly(patch);
        let d = &self.space.d;
        let scaled: Poly = std::array::from_fn(|j| d * &base[j]);
        let root = match patch {
            Patch::Integral => Node {
                poly: scaled,
                parity: 0,
                center: Int::zero(),
                depth: 0,
                modulus: Int::one(),
            },
            Patch::Reciprocal => Node {
                poly: shift_and_scale(&scaled, &Int::zero(), &self.l),
                parity: 0,
                center: Int::zero(),
                depth: 1,
                modulus: self.l.clone(),
            },
        };
        self.visit(patch, &base, root)
    }

    fn val(&self, x: &Int) -> Option<u32> {
        valuation(x, &self.l)
    }

    fn visit(&mut self, patch: Patch, base: &Poly, mut node: Node) -> Result<Option<Witness>, SolveError> {
        self.max_depth = self.max_depth.max(node.depth);
        if node.depth > self.cap {
            return Err(SolveError::Undecided {
                place: self.l.to_string(),
                depth: node.depth,
                cap: self.cap,
            });
        }

        // Hensel: a root of the original quartic near the center
        let g0 = eval(base, &node.center);
        let g1 = derivative_at(base, &node.center);
        match (self.val(&g0), self.val(&g1)) {
            (None, _) => return Ok(Some(self.hensel(patch, &node))),
            (Some(a), Some(b)) if a > 2 * b => return Ok(Some(self.hensel(patch, &node))),
            _ => {}
        }

        // strip content
        let content = node.poly.iter().filter_map(|c| self.val(c)).min();
        let Some(content) = content else {
            return Ok(Some(self.hensel(patch, &node)));
        };
        if content > 0 {
            let lc = num_traits::pow(self.l.clone(), content as usize);
            for c in node.poly.iter_mut() {
                *c /= &lc;
            }
            node.parity = (node.parity + content) % 2;
        }

        // constant class on the whole node?
        if let Some(v0) = self.val(&node.poly[0]) {
            let rest = node.poly[1..].iter().filter_map(|c| self.val(c)).min().unwrap_or(u32::MAX);
            if rest >= v0.saturating_add(self.precision) {
                let unit = &node.poly[0] / num_traits::pow(self.l.clone(), v0 as usize);
                let square = (node.parity + v0).is_multiple_of(2)
                    && unit_square_class(&unit, &self.l).expect("unit").is_square();
                return Ok(square.then(|| self.unit_square(patch, &node)));
            }
        }

        if self.l_small == 2 {
            for r in 0..2u32 {
                let child = self.child(&node, r as u64);
                if let Some(w) = self.visit(patch, base, child)? {
                    return Ok(Some(w));
                }
            }
            return Ok(None);
        }

        // odd l: residues where P is a unit are settled by one Legendre symbol
        let l = self.l_small;
        let reduced: Vec<u64> = node
            .poly
            .iter()
            .map(|c| c.mod_floor(&self.l).to_u64().expect("residue below l"))
            .collect();
        let mut roots = Vec::new();
        for r in 0..l {
            let value = reduced
                .iter()
                .rev()
                .fold(0u128, |acc, &c| (acc * r as u128 + c as u128) % l as u128) as u64;
            if value == 0 {
                roots.push(r);
            } else if node.parity == 0 && legendre_u64(value, l) == 1 {
                let center = &node.center + &node.modulus * Int::from(r);
                self.max_depth = self.max_depth.max(node.depth + 1);
                return Ok(Some(Witness::UnitSquare {
                    patch,
                    center,
                    precision: node.depth + 1,
                }));
            }
        }
        for r in roots {
            let child = self.child(&node, r);
            if let Some(w) = self.visit(patch, base, child)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn child(&self, node: &Node, r: u64) -> Node {
        let r = Int::from(r);
        Node {
            poly: shift_and_scale(&node.poly, &r, &self.l),
            parity: node.parity,
            center: &node.center + &node.modulus * &r,
            depth: node.depth + 1,
            modulus: &node.modulus * &self.l,
        }
    }

    fn hensel(&self, patch: Patch, node: &Node) -> Witness {
        Witness::HenselRoot {
            patch,
            center: node.center.clone(),
            precision: node.depth,
        }
    }

    fn unit_square(&self, patch: Patch, node: &Node) -> Witness {
        Witness::UnitSquare {
            patch,
            center: node.center.clone(),
            precision: node.depth,
        }
    }
}

/// Re-check a witness against the space from first principles.
pub fn witness_is_valid(space: &HomogeneousSpace, place: &LocalPlace, witness: &Witness) -> bool {
    match (witness, place) {
        (Witness::Rational { z, w }, _) => space.contains(z, w),
        (Witness::Real { z_squared }, LocalPlace::Real) => match z_squared {
            None => (&space.d * &space.u4).is_positive(),
            Some(s) => {
                if s.is_negative() {
                    return false;
                }
                let g = (Rational::from_integer(space.u4.clone()) * s
                    + Rational::from_integer(space.u2.clone()))
                    * s
                    + Rational::from_integer(space.u0.clone());
                !(g * Rational::from_integer(space.d.clone())).is_negative()
            }
        },
        (Witness::UnitSquare { patch, center, .. }, LocalPlace::Prime(l)) => {
            if *patch == Patch::Reciprocal && !center.is_multiple_of(l) {
                return false;
            }
            let value = match patch {
                Patch::Integral => space.eval(center),
                Patch::Reciprocal => space.eval_reversed(center),
            };
            let dv = &space.d * value;
            !dv.is_zero() && is_qp_square(&Rational::from_integer(dv), l)
        }
        (Witness::HenselRoot { patch, center, .. }, LocalPlace::Prime(l)) => {
            let poly = match patch {
                Patch::Integral => space.coefficients(),
                Patch::Reciprocal => space.reversed_coefficients(),
            };
            let g0 = eval(&poly, center);
            let g1 = derivative_at(&poly, center);
            match (valuation(&g0, l), valuation(&g1, l)) {
                (None, Some(_)) => true,
                (Some(a), Some(b)) => a > 2 * b,
                _ => false,
            }
        }
        _ => false,
    }
}

mod int_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Int;

    pub fn serialize<S: Serializer>(x: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod opt_rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|v| v.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{DescentKind, Epsilon, FamilyParams};

    fn params(eps: Epsilon, p: i64, q: i64, ds: &[i64]) -> FamilyParams {
        FamilyParams::from_i64(eps, p, q, ds).unwrap()
    }

    fn space(f: &FamilyParams, d: i64, kind: DescentKind) -> HomogeneousSpace {
        f.build_space(f.class_of_integer(&Int::from(d)).unwrap(), kind)
    }

    #[test]
    fn real_examples() {
        let f = params(Epsilon::Plus, 3, 5, &[7]);
        let g = params(Epsilon::Plus, 11, 13, &[5]);
        assert!(real_solvable(&space(&g, 5, DescentKind::Phi)).solvable);
        assert!(!real_solvable(&space(&g, -5, DescentKind::Phi)).solvable);
        let minus_pd = -(3 * 7);
        let s = space(&f, minus_pd, DescentKind::PhiHat);
        let v = real_solvable(&s);
        assert!(v.solvable);
        assert!(witness_is_valid(&s, &LocalPlace::Real, v.witness.as_ref().unwrap()));
        // (1, 0) is a rational point
        assert!(s.contains(&Rational::one(), &Rational::zero()));
        assert_eq!(
            small_rational_point(&s),
            Some(Witness::Rational {
                z: Rational::one(),
                w: Rational::zero()
            })
        );
    }

    #[test]
    fn real_sign_rules_hold_for_every_class() {
        let f = params(Epsilon::Plus, 5, 7, &[3, 11]);
        for c in f.enumerate_square_classes() {
            let d = f.class_value(c);
            let phi = real_solvable(&f.build_space(c, DescentKind::Phi));
            assert_eq!(phi.solvable, d.is_positive(), "C_{d}");
            let phi_hat = real_solvable(&f.build_space(c, DescentKind::PhiHat));
            assert!(phi_hat.solvable, "C'_{d}");
        }
    }

    #[test]
    fn two_adic_examples() {
        let two = Int::from(2);
        let f = params(Epsilon::Plus, 3, 5, &[7]);
        let v = padic_solvable(&space(&f, 2, DescentKind::Phi), &two).unwrap();
        assert!(!v.solvable);
        let g = params(Epsilon::Plus, 3, 5, &[7, 11]);
        let s = space(&g, 2, DescentKind::Phi);
        let v = padic_solvable(&s, &two).unwrap();
        assert!(v.solvable);
        assert!(witness_is_valid(&s, &v.place, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn forced_points_everywhere() {
        for (p, q, ds) in [(3i64, 5i64, vec![7i64]), (5, 7, vec![11, 13]), (17, 19, vec![3, 5])] {
            let f = params(Epsilon::Plus, p, q, &ds);
            let d = -(p * f.d().to_i64().unwrap());
            let s = space(&f, d, DescentKind::PhiHat);
            for place in f.places().into_iter().skip(1) {
                let l = f.place_prime(place).unwrap();
                let v = padic_solvable(&s, &l).unwrap();
                assert!(v.solvable);
                assert!(matches!(v.witness, Some(Witness::Rational { .. })));
            }
        }
    }

    #[test]
    fn qp_square_classes() {
        let two = Int::from(2);
        let c = square_class_qp(&Rational::from_integer(18.into()), &two).unwrap();
        assert!(c.odd_valuation);
        assert_eq!(c.unit, UnitClass::Two { residue_mod8: 1 });
        assert!(!c.is_square());
        assert!(is_qp_square(&Rational::from_integer(17.into()), &two));
        let c = square_class_qp(&Rational::from_integer(12.into()), &Int::from(3)).unwrap();
        assert!(c.odd_valuation);
        assert!(c.unit.is_square());
        assert!(!c.is_square());
        assert!(is_qp_square(&Rational::new(9.into(), 4.into()), &Int::from(3)));
        assert!(is_qp_square(&Rational::new(1.into(), 17.into()), &two));
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let poly: Poly = [3.into(), (-2).into(), 5.into(), 7.into(), (-11).into()];
        let shifted = shift_and_scale(&poly, &Int::from(4), &Int::from(3));
        for x in -5i64..5 {
            let x = Int::from(x);
            assert_eq!(eval(&shifted, &x), eval(&poly, &(Int::from(4) + Int::from(3) * &x)));
        }
        assert_eq!(derivative_at(&poly, &Int::from(2)), Int::from(-2 + 5 * 4 + 7 * 12 - 11 * 32));
    }

    #[test]
    fn witnesses_are_sound_over_a_family() {
        let f = params(Epsilon::Minus, 5, 7, &[3, 13]);
        for kind in [DescentKind::Phi, DescentKind::PhiHat] {
            for c in f.enumerate_square_classes() {
                let s = f.build_space(c, kind);
                for place in f.places().into_iter().skip(1) {
                    let l = f.place_prime(place).unwrap();
                    let v = padic_solvable(&s, &l).unwrap();
                    if let Some(w) = &v.witness {
                        assert!(witness_is_valid(&s, &v.place, w), "{s} at {l}: {w:?}");
                    }
                    assert!(v.search_depth <= depth_cap(&s, &l));
                }
            }
        }
    }
}
