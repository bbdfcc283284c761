// SPDX-License-Identifier: Apache-2.0

//! The curve families, the square-class group Q(S,2) and the descent
//! quartics built from them.
//!
//! For `E: y^2 = x(x + εpD)(x + εqD)` and `E': y^2 = x^3 - 2ε(p+q)Dx^2 + 4D^2x`
//! a class `d` lies in the φ-Selmer group when
//! `C_d: d w^2 = d^2 - 2ε(p+q)Dd z^2 + 4D^2 z^4` has points at every place of
//! `S = {∞, 2, p, q, D_1, ..., D_n}`, and in the φ̂-Selmer group when
//! `C'_d: d w^2 = d^2 + ε(p+q)Dd z^2 + pqD^2 z^4` does.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_twin_pair, PrimeOdd};
use crate::error::ParamError;
use crate::json::JsonInt;
use crate::Int;

/// Largest supported number of prime factors of `D`; square classes are
/// packed into a `u64` over a basis of `n + 4` elements.
pub const MAX_PRIMES: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }
}

impl From<Epsilon> for i8 {
    fn from(e: Epsilon) -> i8 {
        e.sign() as i8
    }
}

impl TryFrom<i8> for Epsilon {
    type Error = ParamError;
    fn try_from(v: i8) -> Result<Self, ParamError> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            other => Err(ParamError::BadEpsilon(other.to_string())),
        }
    }
}

impl std::str::FromStr for Epsilon {
    type Err = ParamError;
    fn from_str(s: &str) -> Result<Self, ParamError> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Epsilon::Plus),
            "-1" | "-" | "minus" => Ok(Epsilon::Minus),
            other => Err(ParamError::BadEpsilon(other.to_string())),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
        })
    }
}

/// Which isogeny's Selmer group: φ on `E` (spaces `C_d`) or φ̂ on `E'` (spaces `C'_d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentKind {
    Phi,
    PhiHat,
}

impl fmt::Display for DescentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DescentKind::Phi => "phi",
            DescentKind::PhiHat => "phi_hat",
        })
    }
}

impl std::str::FromStr for DescentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "phi" => Ok(DescentKind::Phi),
            "phi_hat" | "phihat" | "phi-hat" => Ok(DescentKind::PhiHat),
            other => Err(format!("unknown kind {other:?}, expected phi or phi_hat")),
        }
    }
}

/// A place of `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Two,
    P,
    Q,
    /// `D_{i+1}`, by zero-based index into the prime list.
    D(usize),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Two => f.write_str("2"),
            Place::P => f.write_str("p"),
            Place::Q => f.write_str("q"),
            Place::D(i) => write!(f, "D{}", i + 1),
        }
    }
}

/// Element of Q(S,2) as an exponent vector over `(-1, 2, p, q, D_1, ..., D_n)`.
/// Bit `k` is the exponent of the `k`-th basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SquareClass(u64);

impl SquareClass {
    pub const IDENTITY: SquareClass = SquareClass(0);
    pub const MINUS_ONE: usize = 0;
    pub const TWO: usize = 1;
    pub const P: usize = 2;
    pub const Q: usize = 3;

    pub fn from_bits(bits: u64) -> Self {
        SquareClass(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn basis_element(index: usize) -> Self {
        SquareClass(1 << index)
    }

    pub fn d_index(i: usize) -> usize {
        4 + i
    }

    pub fn has(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl BitXor for SquareClass {
    type Output = SquareClass;
    fn bitxor(self, rhs: SquareClass) -> SquareClass {
        SquareClass(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for SquareClass {
    fn bitxor_assign(&mut self, rhs: SquareClass) {
        self.0 ^= rhs.0;
    }
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    epsilon: Epsilon,
    p: JsonInt,
    q: JsonInt,
    #[serde(rename = "D")]
    d: Vec<JsonInt>,
}

/// Validated `(ε, p, q, D_1, ..., D_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct FamilyParams {
    epsilon: Epsilon,
    p: PrimeOdd,
    q: PrimeOdd,
    d_primes: Vec<PrimeOdd>,
    d: Int,
}

impl TryFrom<RawParams> for FamilyParams {
    type Error = ParamError;
    fn try_from(raw: RawParams) -> Result<Self, ParamError> {
        FamilyParams::new(
            raw.epsilon,
            raw.p.0,
            raw.q.0,
            raw.d.into_iter().map(|x| x.0).collect(),
        )
    }
}

impl From<FamilyParams> for RawParams {
    fn from(f: FamilyParams) -> RawParams {
        RawParams {
            epsilon: f.epsilon,
            p: JsonInt(f.p.into_inner()),
            q: JsonInt(f.q.into_inner()),
            d: f.d_primes.into_iter().map(|x| JsonInt(x.into_inner())).collect(),
        }
    }
}

impl FamilyParams {
    /// Validate a parameter tuple.
    pub fn new(epsilon: Epsilon, p: Int, q: Int, d_primes: Vec<Int>) -> Result<Self, ParamError> {
        if !is_twin_pair(&p, &q) {
            return Err(ParamError::NotTwin {
                p: p.to_string(),
                q: q.to_string(),
            });
        }
        if d_primes.is_empty() {
            return Err(ParamError::EmptyD);
        }
        if d_primes.len() > MAX_PRIMES {
            return Err(ParamError::TooManyPrimes(d_primes.len()));
        }
        let mut checked: Vec<PrimeOdd> = Vec::with_capacity(d_primes.len());
        for di in d_primes {
            if di == BigInt::from(2) || di == p || di == q {
                return Err(ParamError::ForbiddenPrime(di.to_string()));
            }
            let prime = PrimeOdd::new(di)?;
            if checked.contains(&prime) {
                return Err(ParamError::RepeatedPrime(prime.to_string()));
            }
            checked.push(prime);
        }
        let d = checked.iter().fold(Int::one(), |acc, x| acc * x.value());
        Ok(FamilyParams {
            epsilon,
            p: PrimeOdd::new(p)?,
            q: PrimeOdd::new(q)?,
            d_primes: checked,
            d,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(epsilon: Epsilon, p: i64, q: i64, d_primes: &[i64]) -> Result<Self, ParamError> {
        Self::new(
            epsilon,
            p.into(),
            q.into(),
            d_primes.iter().map(|&x| x.into()).collect(),
        )
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn p(&self) -> &Int {
        self.p.value()
    }

    pub fn q(&self) -> &Int {
        self.q.value()
    }

    pub fn d_primes(&self) -> impl ExactSizeIterator<Item = &Int> + '_ {
        self.d_primes.iter().map(|x| x.value())
    }

    pub fn d_prime(&self, i: usize) -> &Int {
        self.d_primes[i].value()
    }

    /// Number of prime factors of `D`.
    pub fn n(&self) -> usize {
        self.d_primes.len()
    }

    /// `D = D_1 ... D_n`.
    pub fn d(&self) -> &Int {
        &self.d
    }

    /// `D / D_i`.
    pub fn d_hat(&self, i: usize) -> Int {
        &self.d / self.d_prime(i)
    }

    /// Dimension of Q(S,2) over F_2.
    pub fn rank(&self) -> usize {
        self.n() + 4
    }

    /// `(-1, 2, p, q, D_1, ..., D_n)`.
    pub fn basis(&self) -> Vec<Int> {
        let mut out = vec![Int::from(-1), Int::from(2), self.p().clone(), self.q().clone()];
        out.extend(self.d_primes().cloned());
        out
    }

    /// Places of `S` in evaluation order: ∞, 2, p, q, then `D_i` by increasing value.
    pub fn places(&self) -> Vec<Place> {
        let mut ds: Vec<usize> = (0..self.n()).collect();
        ds.sort_by(|&a, &b| self.d_prime(a).cmp(self.d_prime(b)));
        let mut out = vec![Place::Infinity, Place::Two, Place::P, Place::Q];
        out.extend(ds.into_iter().map(Place::D));
        out
    }

    /// The rational prime of a finite place.
    pub fn place_prime(&self, place: Place) -> Option<Int> {
        match place {
            Place::Infinity => None,
            Place::Two => Some(Int::from(2)),
            Place::P => Some(self.p().clone()),
            Place::Q => Some(self.q().clone()),
            Place::D(i) => Some(self.d_prime(i).clone()),
        }
    }

    /// Place of `S` lying over the given rational prime, if any.
    pub fn place_of_prime(&self, l: &Int) -> Option<Place> {
        if *l == Int::from(2) {
            Some(Place::Two)
        } else if l == self.p() {
            Some(Place::P)
        } else if l == self.q() {
            Some(Place::Q)
        } else {
            self.d_primes().position(|x| x == l).map(Place::D)
        }
    }

    /// `"inf"` or the decimal prime.
    pub fn place_label(&self, place: Place) -> String {
        match self.place_prime(place) {
            None => "inf".to_string(),
            Some(l) => l.to_string(),
        }
    }

    /// The signed squarefree integer a class stands for.
    pub fn class_value(&self, class: SquareClass) -> Int {
        let basis = self.basis();
        let mut acc = Int::one();
        for (k, b) in basis.iter().enumerate() {
            if class.has(k) {
                acc *= b;
            }
        }
        acc
    }

    /// Canonical rendering, e.g. `-21`.
    pub fn render(&self, class: SquareClass) -> String {
        self.class_value(class).to_string()
    }

    /// Class of an integer supported on `S` (exponents are taken mod 2).
    pub fn class_of_integer(&self, m: &Int) -> Result<SquareClass, ParamError> {
        if m.is_zero() {
            return Err(ParamError::OutsideS("0".into()));
        }
        let mut bits = 0u64;
        if m.is_negative() {
            bits |= 1;
        }
        let mut rest = m.abs();
        for (k, b) in self.basis().iter().enumerate().skip(1) {
            let mut parity = 0;
            loop {
                let (quo, rem) = rest.div_rem(b);
                if !rem.is_zero() {
                    break;
                }
                rest = quo;
                parity ^= 1;
            }
            bits |= parity << k;
        }
        if !rest.is_one() {
            return Err(ParamError::OutsideS(m.to_string()));
        }
        Ok(SquareClass(bits))
    }

    /// All `2^(n+4)` classes, in bit order.
    pub fn enumerate_square_classes(&self) -> Vec<SquareClass> {
        (0..1u64 << self.rank()).map(SquareClass).collect()
    }

    /// The descent quartic attached to `d`.
    pub fn build_space(&self, d: SquareClass, kind: DescentKind) -> HomogeneousSpace {
        self.build_space_for_value(self.class_value(d), kind)
    }

    /// Same as [`build_space`](Self::build_space) for an explicit representative.
    pub fn build_space_for_value(&self, d: Int, kind: DescentKind) -> HomogeneousSpace {
        let eps = Int::from(self.epsilon.sign());
        let big_d = &self.d;
        let p_plus_q = self.p() + self.q();
        let (u4, u2) = match kind {
            DescentKind::Phi => (
                Int::from(4) * big_d * big_d,
                Int::from(-2) * &eps * &p_plus_q * big_d * &d,
            ),
            DescentKind::PhiHat => (
                self.p() * self.q() * big_d * big_d,
                &eps * &p_plus_q * big_d * &d,
            ),
        };
        let u0 = &d * &d;
        HomogeneousSpace { d, u4, u2, u0, kind }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.d_primes().map(|x| x.to_string()).collect();
        write!(
            f,
            "eps={} p={} q={} D={}",
            self.epsilon,
            self.p(),
            self.q(),
            ds.join("*")
        )
    }
}

/// `d w^2 = u4 z^4 + u2 z^2 + u0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousSpace {
    pub d: Int,
    pub u4: Int,
    pub u2: Int,
    pub u0: Int,
    pub kind: DescentKind,
}

impl HomogeneousSpace {
    /// `g(z)`.
    pub fn eval(&self, z: &Int) -> Int {
        let s = z * z;
        (&self.u4 * &s + &self.u2) * &s + &self.u0
    }

    /// The reversed quartic `h(t) = t^4 g(1/t) = u0 t^4 + u2 t^2 + u4`.
    pub fn eval_reversed(&self, t: &Int) -> Int {
        let s = t * t;
        (&self.u0 * &s + &self.u2) * &s + &self.u4
    }

    /// Coefficients of `g`, constant term first, degree 4.
    pub fn coefficients(&self) -> [Int; 5] {
        [
            self.u0.clone(),
            Int::zero(),
            self.u2.clone(),
            Int::zero(),
            self.u4.clone(),
        ]
    }

    /// Coefficients of `h`, constant term first.
    pub fn reversed_coefficients(&self) -> [Int; 5] {
        [
            self.u4.clone(),
            Int::zero(),
            self.u2.clone(),
            Int::zero(),
            self.u0.clone(),
        ]
    }

    /// Discriminant of `g` as a quartic: `16 u4 u0 (u2^2 - 4 u4 u0)^2`.
    pub fn discriminant(&self) -> Int {
        let inner = &self.u2 * &self.u2 - Int::from(4) * &self.u4 * &self.u0;
        Int::from(16) * &self.u4 * &self.u0 * &inner * &inner
    }

    /// Whether `(z, w)` satisfies `d w^2 = g(z)` exactly.
    pub fn contains(&self, z: &crate::Rational, w: &crate::Rational) -> bool {
        let z2 = z * z;
        let rhs = (crate::Rational::from_integer(self.u4.clone()) * &z2
            + crate::Rational::from_integer(self.u2.clone()))
            * &z2
            + crate::Rational::from_integer(self.u0.clone());
        crate::Rational::from_integer(self.d.clone()) * w * w == rhs
    }

    /// `d` as a machine word when it fits; used by rule tables.
    pub fn d_i64(&self) -> Option<i64> {
        self.d.to_i64()
    }
}

impl fmt::Display for HomogeneousSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            DescentKind::Phi => "C",
            DescentKind::PhiHat => "C'",
        };
        write!(
            f,
            "{name}_{{{}}}: {} w^2 = {} + {} z^2 + {} z^4",
            self.d, self.d, self.u0, self.u2, self.u4
        )
    }
}
