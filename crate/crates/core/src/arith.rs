// SPDX-License-Identifier: Apache-2.0

//! Exact integer kernel: primality, Legendre symbols, valuations, CRT and
//! the square-class test for l-adic units.
//!
//! Everything here is generic over the integer type so the same routines
//! run on machine integers (`i64`, `i128`) and on [`BigInt`].

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ArithError;

/// Integer types the kernel accepts.
pub trait IntLike:
    Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Into<BigInt>
{
}

impl<T> IntLike for T where
    T: Integer
        + Signed
        + Clone
        + FromPrimitive
        + ToPrimitive
        + fmt::Debug
        + fmt::Display
        + Into<BigInt>
{
}

fn lit<T: IntLike>(v: i64) -> T {
    T::from_i64(v).expect("small literal fits every integer type")
}

/// An odd prime, checked on construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeOdd<T = BigInt>(T);

impl<T: IntLike> PrimeOdd<T> {
    pub fn new(value: T) -> Result<Self, ArithError> {
        if value < lit(3) || value.is_even() || !is_prime(&value) {
            return Err(ArithError::NotOddPrime(value.to_string()));
        }
        Ok(PrimeOdd(value))
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    pub fn into_inner(self) -> T {
        self.0
    }
}

impl<T: fmt::Display> fmt::Display for PrimeOdd<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi<T: IntLike>(a: &T, n: &T) -> i8 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs an odd positive modulus");
    let two: T = lit(2);
    let four: T = lit(4);
    let eight: T = lit(8);
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a = a / two.clone();
            let r = n.mod_floor(&eight);
            if r == lit(3) || r == lit(5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == lit(3) && n.mod_floor(&four) == lit(3) {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Legendre symbol `(a/l)`; negative `a` is reduced mod `l` first.
pub fn legendre_symbol<T: IntLike>(a: &T, l: &PrimeOdd<T>) -> i8 {
    jacobi(a, l.value())
}

/// Legendre symbol on machine words, for the hot loops of the local solver.
pub fn legendre_u64(a: u64, l: u64) -> i8 {
    debug_assert!(l % 2 == 1);
    let mut a = a % l;
    let mut n = l;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Exponent of `l` in a nonzero integer; `None` for zero.
pub fn valuation<T: IntLike>(x: &T, l: &T) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(l);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// `v_l(x)` for a nonzero rational `x`.
pub fn padic_valuation<T: IntLike>(x: &Ratio<T>, l: &T) -> Result<i64, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let num = valuation(x.numer(), l).expect("nonzero numerator") as i64;
    let den = valuation(x.denom(), l).expect("nonzero denominator") as i64;
    Ok(num - den)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES[..12] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // these twelve bases are exact below 3.3e24
    'witness: for &a in &SMALL_PRIMES[..12] {
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

fn is_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in SMALL_PRIMES.iter() {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return *n == a;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u8), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality: exact below 2^64, 40 Miller-Rabin rounds above.
pub fn is_prime<T: IntLike>(n: &T) -> bool {
    if !n.is_positive() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let big: BigInt = n.clone().into();
    is_prime_big(big.magnitude())
}

pub fn is_twin_pair<T: IntLike>(p: &T, q: &T) -> bool {
    p.is_odd() && *q == p.clone() + lit(2) && is_prime(p) && is_prime(q)
}

/// Solve a system of congruences `x ≡ r_i (mod m_i)`.
///
/// Moduli need not be coprime; an inconsistent system gives `None`.
/// The answer is `(r, m)` with `0 <= r < m`.
pub fn crt_solve<T: IntLike>(congruences: &[(T, T)]) -> Option<(T, T)> {
    let mut acc_r = T::zero();
    let mut acc_m = T::one();
    for (r, m) in congruences {
        assert!(m.is_positive(), "moduli must be positive");
        let r = r.mod_floor(m);
        let g = acc_m.extended_gcd(m);
        let diff = r - acc_r.clone();
        if !diff.is_multiple_of(&g.gcd) {
            return None;
        }
        let m_over_g = m.clone() / g.gcd.clone();
        // acc_m * k ≡ diff (mod m)  =>  k ≡ (diff/g) * inv(acc_m/g) (mod m/g)
        let k = ((diff / g.gcd.clone()) * g.x).mod_floor(&m_over_g);
        let new_m = acc_m.clone() * m_over_g;
        acc_r = (acc_r + acc_m * k).mod_floor(&new_m);
        acc_m = new_m;
    }
    Some((acc_r, acc_m))
}

/// Square class of an l-adic unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitClass {
    /// Odd `l`: the class is decided by the Legendre symbol.
    Odd { square: bool },
    /// `l = 2`: the class is the residue mod 8.
    Two { residue_mod8: u8 },
}

impl UnitClass {
    pub fn is_square(&self) -> bool {
        match *self {
            UnitClass::Odd { square } => square,
            UnitClass::Two { residue_mod8 } => residue_mod8 == 1,
        }
    }
}

pub fn unit_square_class<T: IntLike>(u: &T, l: &T) -> Result<UnitClass, ArithError> {
    if u.is_zero() || u.is_multiple_of(l) {
        return Err(ArithError::NotUnit {
            value: u.to_string(),
            prime: l.to_string(),
        });
    }
    if *l == lit(2) {
        let r = u.mod_floor(&lit(8)).to_u8().expect("residue below 8");
        Ok(UnitClass::Two { residue_mod8: r })
    } else {
        Ok(UnitClass::Odd {
            square: jacobi(u, l) == 1,
        })
    }
}

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Integer square root if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn legendre_examples() {
        let seven = PrimeOdd::new(7i64).unwrap();
        assert_eq!(legendre_symbol(&2, &seven), 1);
        assert_eq!(legendre_symbol(&14, &seven), 0);
        assert_eq!(legendre_symbol(&3, &seven), -1);
        // negative arguments go through (-1/l)
        assert_eq!(legendre_symbol(&-1, &seven), -1);
        assert_eq!(legendre_symbol(&-3, &seven), 1);
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for l in [3u64, 5, 7, 11, 13, 61, 97] {
            let squares: Vec<u64> = (1..l).map(|x| x * x % l).collect();
            let p = PrimeOdd::new(l as i64).unwrap();
            for a in -(l as i64)..(2 * l as i64) {
                let r = a.rem_euclid(l as i64) as u64;
                let expect = if r == 0 {
                    0
                } else if squares.contains(&r) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol(&a, &p), expect, "({a}/{l})");
                assert_eq!(legendre_u64(r, l), expect);
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&Ratio::from_integer(8i64), &2).unwrap(), 3);
        assert_eq!(padic_valuation(&Ratio::new(7i64, 4), &2).unwrap(), -2);
        assert_eq!(padic_valuation(&Ratio::from_integer(big(45)), &big(3)).unwrap(), 2);
        assert!(matches!(
            padic_valuation(&Ratio::from_integer(0i64), &5),
            Err(ArithError::ZeroValuation)
        ));
    }

    #[test]
    fn twin_pairs() {
        assert!(is_twin_pair(&3, &5));
        assert!(!is_twin_pair(&5, &9));
        assert!(!is_twin_pair(&7, &11));
        assert!(is_twin_pair(&big(1_000_000_007 - 2), &big(1_000_000_007)) == is_prime(&big(1_000_000_005)));
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_solve(&[(1i64, 4), (2, 3)]), Some((5, 12)));
        assert_eq!(crt_solve(&[(0i64, 2), (1, 2)]), None);
        assert_eq!(crt_solve(&[(1i64, 8), (1, 3), (1, 5)]), Some((1, 120)));
        // non-coprime but consistent
        assert_eq!(crt_solve(&[(3i64, 4), (1, 6)]), Some((7, 12)));
    }

    #[test]
    fn unit_class_examples() {
        assert_eq!(unit_square_class(&17, &2).unwrap(), UnitClass::Two { residue_mod8: 1 });
        assert!(unit_square_class(&17, &2).unwrap().is_square());
        let five = unit_square_class(&5, &2).unwrap();
        assert_eq!(five, UnitClass::Two { residue_mod8: 5 });
        assert!(!five.is_square());
        assert!(unit_square_class(&3, &11).unwrap().is_square());
        assert!(unit_square_class(&22, &11).is_err());
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "{n}");
        }
        // Mersenne prime above 2^64 and a composite neighbour
        let m127 = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 + 2)));
        assert!(is_prime(&18446744073709551557u64.to_i128().unwrap()));
    }

    #[test]
    fn generic_over_integer_types() {
        for a in -50i64..50 {
            for &l in &[3i64, 5, 7, 101] {
                let lb = big(l);
                assert_eq!(jacobi(&a, &l), jacobi(&big(a), &lb));
                assert_eq!(jacobi(&(a as i128), &(l as i128)), jacobi(&a, &l));
            }
        }
    }
}
