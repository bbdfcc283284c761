// SPDX-License-Identifier: Apache-2.0

//! Closed-form local and membership criteria, evaluated independently of the
//! digit-search oracle so the two engines can referee each other.
//!
//! Rule ids have the shape `<kind><sign>:<class>:<place>`, e.g. `phi+:2:at2`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::jacobi;
use crate::error::SelmerError;
use crate::family::{DescentKind, Epsilon, FamilyParams, Place, SquareClass};
use crate::selmer::{compute_selmer, local_verdict};
use crate::theorems::{in_index_set, pi_prime};
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormVerdict {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solvable: Option<bool>,
    pub rule_id: String,
}

impl ClosedFormVerdict {
    pub fn not_applicable() -> Self {
        ClosedFormVerdict {
            applicable: false,
            solvable: None,
            rule_id: String::new(),
        }
    }

    fn rule(id: impl Into<String>, solvable: bool) -> Self {
        ClosedFormVerdict {
            applicable: true,
            solvable: Some(solvable),
            rule_id: id.into(),
        }
    }
}

/// A membership verdict from a closed-form criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub member: bool,
    pub rule_id: String,
}

pub(crate) fn sym(a: &Int, l: &Int) -> i32 {
    jacobi(&a.mod_floor(l), l) as i32
}

fn residue(x: &Int, m: i64) -> i64 {
    x.mod_floor(&Int::from(m)).to_i64().expect("small residue")
}

struct Ctx<'a> {
    f: &'a FamilyParams,
    class: SquareClass,
    value: Int,
}

impl Ctx<'_> {
    fn is(&self, m: Int) -> bool {
        self.f.class_of_integer(&m).ok() == Some(self.class)
    }

    fn is_d(&self, i: usize) -> bool {
        self.class == SquareClass::basis_element(SquareClass::d_index(i))
    }

    fn is_neg_d(&self, i: usize) -> bool {
        self.class
            == SquareClass::basis_element(SquareClass::d_index(i))
                ^ SquareClass::basis_element(SquareClass::MINUS_ONE)
    }

    fn p(&self) -> &Int {
        self.f.p()
    }

    fn q(&self) -> &Int {
        self.f.q()
    }

    fn big_d(&self) -> &Int {
        self.f.d()
    }

    fn p_mod(&self, m: i64) -> i64 {
        residue(self.p(), m)
    }
}

/// `(1 ± pD̂_i)(1 ± qD̂_i) ≡ 0 (mod 16)`, `+` for ε = +1.
fn product_mod16(f: &FamilyParams, i: usize, eps: Epsilon) -> bool {
    let s = Int::from(eps.sign());
    let dh = f.d_hat(i);
    let a = Int::from(1) + &s * f.p() * &dh;
    let b = Int::from(1) + &s * f.q() * &dh;
    residue(&(a * b), 16) == 0
}

/// The four alternatives for `C'_{D_i}(Q_2) ≠ ∅`.
fn phi_hat_di_at_two(f: &FamilyParams, i: usize, eps: Epsilon) -> bool {
    let di = residue(f.d_prime(i), 8);
    let p4 = residue(f.p(), 4);
    di == 1 || product_mod16(f, i, eps) || (di == 3 && p4 == 1) || (di == 7 && p4 == 3)
}

/// Every closed-form local rule that covers `(kind, d, place)`. Normally at
/// most one; several rules can overlap for `n = 1` and are all returned so
/// that disagreements between them surface.
pub fn closed_form_rules(
    f: &FamilyParams,
    kind: DescentKind,
    class: SquareClass,
    place: Place,
) -> Vec<ClosedFormVerdict> {
    let cx = Ctx {
        f,
        class,
        value: f.class_value(class),
    };
    let eps = f.epsilon();
    let mut out = Vec::new();
    let l = f.place_prime(place);
    let odd_l = l.clone().filter(|x| x.is_odd());
    match kind {
        DescentKind::Phi => phi_rules(&cx, eps, place, odd_l.as_ref(), &mut out),
        DescentKind::PhiHat => phi_hat_rules(&cx, eps, place, &mut out),
    }
    out
}

fn phi_rules(cx: &Ctx, eps: Epsilon, place: Place, l: Option<&Int>, out: &mut Vec<ClosedFormVerdict>) {
    let f = cx.f;
    let tag = match eps {
        Epsilon::Plus => "phi+",
        Epsilon::Minus => "phi-",
    };
    if eps == Epsilon::Plus && place == Place::Infinity {
        out.push(ClosedFormVerdict::rule("phi+:sign:inf", cx.value.is_positive()));
    }
    if place == Place::P && cx.class.has(SquareClass::P) {
        out.push(ClosedFormVerdict::rule(format!("{tag}:p|d:atp"), false));
    }
    if place == Place::Q && cx.class.has(SquareClass::Q) {
        out.push(ClosedFormVerdict::rule(format!("{tag}:q|d:atq"), false));
    }
    let big_d = cx.big_d();
    let p = cx.p();
    let two = Int::from(2);

    // d = 2, and d = -2 for ε = -1
    let mut twos: Vec<(Int, &str)> = vec![(two.clone(), "2")];
    if eps == Epsilon::Minus {
        twos.push((-two.clone(), "-2"));
    }
    for (d2, name) in twos {
        if !cx.is(d2.clone()) {
            continue;
        }
        match place {
            Place::Two => {
                let (val, target) = match (eps, name) {
                    (Epsilon::Plus, _) => (big_d * (big_d - &two * p - &two), 1),
                    (Epsilon::Minus, "2") => (big_d * (big_d + &two * p + &two), 1),
                    _ => (big_d * (-big_d + &two * p + &two), 3),
                };
                out.push(ClosedFormVerdict::rule(
                    format!("{tag}:{name}:at2"),
                    residue(&val, 16) == target,
                ));
            }
            Place::Infinity => {}
            _ => {
                let l = l.expect("odd place");
                out.push(ClosedFormVerdict::rule(format!("{tag}:{name}:atl"), sym(&d2, l) == 1));
            }
        }
    }

    // d = D_i, and d = -D_i for ε = -1
    for i in 0..f.n() {
        let di = f.d_prime(i);
        let dh = f.d_hat(i);
        let s = Int::from(eps.sign());
        let mut cases: Vec<(bool, Int, i64, &str)> = Vec::new();
        if cx.is_d(i) {
            cases.push((true, di.clone(), 1, "Di"));
        }
        if eps == Epsilon::Minus && cx.is_neg_d(i) {
            cases.push((false, -di.clone(), 3, "-Di"));
        }
        for (positive, d_val, mod4, name) in cases {
            match place {
                Place::Two => out.push(ClosedFormVerdict::rule(
                    format!("{tag}:{name}:at2"),
                    residue(di, 4) == mod4,
                )),
                Place::D(j) if j == i => {
                    // ε = +1 and -D_i use pD̂, qD̂; ε = -1 with D_i uses -pD̂, -qD̂
                    let sgn = if positive { s.clone() } else { -s.clone() };
                    let a = &sgn * cx.p() * &dh;
                    let b = &sgn * cx.q() * &dh;
                    out.push(ClosedFormVerdict::rule(
                        format!("{tag}:{name}:atDi"),
                        sym(&a, di) == 1 && sym(&b, di) == 1,
                    ));
                }
                Place::Infinity => {}
                _ => {
                    let l = l.expect("odd place");
                    out.push(ClosedFormVerdict::rule(
                        format!("{tag}:{name}:atl"),
                        sym(&d_val, l) == 1,
                    ));
                }
            }
        }
    }
}

fn phi_hat_rules(cx: &Ctx, eps: Epsilon, place: Place, out: &mut Vec<ClosedFormVerdict>) {
    let f = cx.f;
    let tag = match eps {
        Epsilon::Plus => "phihat+",
        Epsilon::Minus => "phihat-",
    };
    let (p, q, big_d) = (cx.p(), cx.q(), cx.big_d());
    let one = Int::from(1);

    match (eps, place) {
        (Epsilon::Plus, Place::Infinity) => out.push(ClosedFormVerdict::rule("phihat+:any:inf", true)),
        (Epsilon::Minus, Place::Infinity) => {
            out.push(ClosedFormVerdict::rule("phihat-:sign:inf", cx.value.is_positive()))
        }
        _ => {}
    }
    if place == Place::Two && cx.class.has(SquareClass::TWO) {
        out.push(ClosedFormVerdict::rule(format!("{tag}:2|d:at2"), false));
    }

    let s = Int::from(eps.sign());
    // ε = +1: {1, pq, -pD, -qD}; ε = -1: {1, pq, pD, qD}
    let forced = [one.clone(), p * q, -&s * p * big_d, -&s * q * big_d];
    if forced.iter().any(|m| cx.is(m.clone())) {
        out.push(ClosedFormVerdict::rule(format!("{tag}:forced:all"), true));
    }

    for i in 0..f.n() {
        if !cx.is_d(i) {
            continue;
        }
        let di = f.d_prime(i);
        let dh = f.d_hat(i);
        let v = match place {
            Place::Infinity => continue,
            Place::Two => ClosedFormVerdict::rule(format!("{tag}:Di:at2"), phi_hat_di_at_two(f, i, eps)),
            Place::P | Place::Q => ClosedFormVerdict::rule(format!("{tag}:Di:atpq"), true),
            Place::D(j) if j == i => {
                let a = -&s * p * &dh;
                let b = -&s * q * &dh;
                ClosedFormVerdict::rule(
                    format!("{tag}:Di:atDi"),
                    (1 - sym(&a, di)) * (1 - sym(&b, di)) == 0,
                )
            }
            Place::D(j) => {
                let dj = f.d_prime(j);
                ClosedFormVerdict::rule(
                    format!("{tag}:Di:atDj"),
                    (1 - sym(di, dj)) * (1 - sym(&(p * q * di), dj)) == 0,
                )
            }
        };
        out.push(v);
    }

    if eps == Epsilon::Plus && cx.is(-(p * q)) {
        let v = match place {
            Place::Infinity => None,
            Place::Two => {
                let dp = residue(&(big_d - p), 8);
                Some(ClosedFormVerdict::rule(
                    "phihat+:-pq:at2",
                    cx.p_mod(4) == 3 || dp == 0 || dp == 2,
                ))
            }
            Place::P | Place::Q => Some(ClosedFormVerdict::rule("phihat+:-pq:atpq", true)),
            Place::D(i) => {
                let di = f.d_prime(i);
                Some(ClosedFormVerdict::rule(
                    "phihat+:-pq:atDi",
                    (1 - sym(&Int::from(-1), di)) * (1 - sym(&-(p * q), di)) == 0,
                ))
            }
        };
        out.extend(v);
    }

    if eps == Epsilon::Minus && cx.is(big_d.clone()) {
        let v = match place {
            Place::Infinity => None,
            Place::Two => {
                let d8 = residue(big_d, 8);
                let p8 = cx.p_mod(8);
                Some(ClosedFormVerdict::rule(
                    "phihat-:D:at2",
                    d8 == 1 || p8 == 1 || p8 == 7 || (d8 == 3 && p8 == 5) || (d8 == 7 && p8 == 3),
                ))
            }
            Place::P | Place::Q => Some(ClosedFormVerdict::rule("phihat-:D:atpq", true)),
            Place::D(i) => {
                let di = f.d_prime(i);
                Some(ClosedFormVerdict::rule(
                    "phihat-:D:atDi",
                    (1 - sym(p, di)) * (1 - sym(q, di)) == 0,
                ))
            }
        };
        out.extend(v);
    }
}

/// The first applicable rule, or `applicable = false`.
pub fn closed_form_local(f: &FamilyParams, kind: DescentKind, class: SquareClass, place: Place) -> ClosedFormVerdict {
    closed_form_rules(f, kind, class, place)
        .into_iter()
        .next()
        .unwrap_or_else(ClosedFormVerdict::not_applicable)
}

/// `Σ (1 - (-1/D_i))(1 - (-pq/D_i))`.
pub fn alpha_minus_pq(f: &FamilyParams) -> u32 {
    let mpq = -(f.p() * f.q());
    f.d_primes()
        .map(|di| ((1 - sym(&Int::from(-1), di)) * (1 - sym(&mpq, di))) as u32)
        .sum()
}

/// `Σ (1 - (p/D_i))(1 - (q/D_i))`.
pub fn beta_minus_d(f: &FamilyParams) -> u32 {
    f.d_primes()
        .map(|di| ((1 - sym(f.p(), di)) * (1 - sym(f.q(), di))) as u32)
        .sum()
}

/// Every membership criterion covering `d`.
pub fn membership_rules(f: &FamilyParams, kind: DescentKind, class: SquareClass) -> Vec<MembershipVerdict> {
    let cx = Ctx {
        f,
        class,
        value: f.class_value(class),
    };
    let eps = f.epsilon();
    let (p, q, big_d) = (f.p(), f.q(), f.d());
    let mut out = Vec::new();
    let mut push = |id: &str, member: bool| {
        out.push(MembershipVerdict {
            member,
            rule_id: id.to_string(),
        })
    };
    let all_d_mod8 = |allowed: &[i64]| f.d_primes().all(|di| allowed.contains(&residue(di, 8)));
    // (D_j/D_i) = (p/D_i) = (q/D_i) = 1 for all j ≠ i
    let symbols_one = |i: usize| {
        let di = f.d_prime(i);
        sym(p, di) == 1
            && sym(q, di) == 1
            && (0..f.n()).filter(|&j| j != i).all(|j| sym(f.d_prime(j), di) == 1)
    };

    match (eps, kind) {
        (Epsilon::Plus, DescentKind::Phi) => {
            if cx.value.is_negative() || class.has(SquareClass::P) || class.has(SquareClass::Q) {
                push("phi+:excluded", false);
            }
            if cx.is(Int::from(2)) {
                push("phi+:2", cx.p_mod(8) == 7 && all_d_mod8(&[1, 7]));
            }
            for i in 0..f.n() {
                if cx.is_d(i) {
                    push("phi+:Di", residue(f.d_prime(i), 4) == 1 && symbols_one(i));
                }
            }
        }
        (Epsilon::Minus, DescentKind::Phi) => {
            if class.has(SquareClass::P) || class.has(SquareClass::Q) || cx.is(Int::from(-1)) {
                push("phi-:excluded", false);
            }
            if cx.is(Int::from(2)) {
                push("phi-:2", cx.p_mod(8) == 7 && all_d_mod8(&[1, 7]));
            }
            if cx.is(Int::from(-2)) {
                push("phi-:-2", cx.p_mod(8) == 1 && all_d_mod8(&[1, 3]));
            }
            for i in 0..f.n() {
                if cx.is_d(i) {
                    push("phi-:Di", residue(f.d_prime(i), 4) == 1 && symbols_one(i));
                }
                if cx.is_neg_d(i) {
                    push("phi-:-Di", residue(f.d_prime(i), 4) == 3 && symbols_one(i));
                }
            }
        }
        (Epsilon::Plus, DescentKind::PhiHat) => {
            let forced = [Int::from(1), p * q, -(p * big_d), -(q * big_d)];
            if forced.iter().any(|m| cx.is(m.clone())) {
                push("phihat+:forced", true);
            }
            if class.has(SquareClass::TWO) {
                push("phihat+:even", false);
            }
            if cx.is(-(p * q)) {
                let dp = residue(&(big_d - p), 8);
                let local2 = cx.p_mod(4) == 3 || dp == 0 || dp == 2;
                push("phihat+:-pq", alpha_minus_pq(f) == 0 && local2);
            }
            if cx.is(-big_d.clone()) {
                let d8 = residue(big_d, 8);
                let p8 = cx.p_mod(8);
                let cond = d8 == 7 || p8 == 1 || p8 == 7 || (d8 == 1 && p8 == 3) || (d8 == 5 && p8 == 5);
                push("phihat+:-D", beta_minus_d(f) == 0 && cond);
            }
            for i in 0..f.n() {
                if cx.is_d(i) {
                    push(
                        "phihat+:Di",
                        pi_prime(f, i, Epsilon::Plus) == 0 && in_index_set(f, i, Epsilon::Plus),
                    );
                }
            }
        }
        (Epsilon::Minus, DescentKind::PhiHat) => {
            let forced = [Int::from(1), p * q, p * big_d, q * big_d];
            if forced.iter().any(|m| cx.is(m.clone())) {
                push("phihat-:forced", true);
            }
            if class.has(SquareClass::TWO) || cx.value.is_negative() {
                push("phihat-:excluded", false);
            }
            for i in 0..f.n() {
                if cx.is_d(i) {
                    push(
                        "phihat-:Di",
                        pi_prime(f, i, Epsilon::Minus) == 0 && in_index_set(f, i, Epsilon::Minus),
                    );
                }
            }
        }
    }
    out
}

/// The first membership criterion covering `d`, if any.
pub fn membership_closed_form(f: &FamilyParams, kind: DescentKind, class: SquareClass) -> Option<bool> {
    membership_rules(f, kind, class).first().map(|m| m.member)
}

/// One disagreement between a closed-form rule and the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub params: FamilyParams,
    pub kind: DescentKind,
    pub d: crate::json::JsonInt,
    /// Place label, or `"S"` for a membership criterion.
    pub place: String,
    pub rule_id: String,
    pub closed_form: bool,
    pub oracle: bool,
}

/// Engine comparison over every class, kind and place of one instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub local_checks: usize,
    pub membership_checks: usize,
    pub discrepancies: Vec<Discrepancy>,
    /// Applicable-rule counts by rule id.
    pub coverage: BTreeMap<String, usize>,
}

impl AuditReport {
    pub fn merge(&mut self, other: AuditReport) {
        self.local_checks += other.local_checks;
        self.membership_checks += other.membership_checks;
        self.discrepancies.extend(other.discrepancies);
        for (k, v) in other.coverage {
            *self.coverage.entry(k).or_default() += v;
        }
    }
}

/// Compare every applicable closed-form verdict with the oracle.
pub fn audit(f: &FamilyParams) -> Result<AuditReport, SelmerError> {
    use rayon::prelude::*;

    let mut report = AuditReport::default();
    for kind in [DescentKind::Phi, DescentKind::PhiHat] {
        let classes = f.enumerate_square_classes();
        let per_class: Vec<Result<AuditReport, SelmerError>> = classes
            .par_iter()
            .map(|&c| audit_class_local(f, kind, c))
            .collect();
        for r in per_class {
            report.merge(r?);
        }
        let group = compute_selmer(f, kind)?;
        for &c in &classes {
            for m in membership_rules(f, kind, c) {
                report.membership_checks += 1;
                *report.coverage.entry(m.rule_id.clone()).or_default() += 1;
                let oracle = group.contains(c);
                if m.member != oracle {
                    report.discrepancies.push(Discrepancy {
                        params: f.clone(),
                        kind,
                        d: f.class_value(c).into(),
                        place: "S".into(),
                        rule_id: m.rule_id,
                        closed_form: m.member,
                        oracle,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn audit_class_local(f: &FamilyParams, kind: DescentKind, c: SquareClass) -> Result<AuditReport, SelmerError> {
    let mut report = AuditReport::default();
    let space = f.build_space(c, kind);
    for place in f.places() {
        let rules = closed_form_rules(f, kind, c, place);
        if rules.is_empty() {
            continue;
        }
        let oracle = local_verdict(f, &space, place)?.solvable;
        for r in rules {
            report.local_checks += 1;
            *report.coverage.entry(r.rule_id.clone()).or_default() += 1;
            let closed = r.solvable.expect("applicable rule has a verdict");
            if closed != oracle {
                report.discrepancies.push(Discrepancy {
                    params: f.clone(),
                    kind,
                    d: f.class_value(c).into(),
                    place: f.place_label(place),
                    rule_id: r.rule_id,
                    closed_form: closed,
                    oracle,
                });
            }
        }
    }
    Ok(report)
}
