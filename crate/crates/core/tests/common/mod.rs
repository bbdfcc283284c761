// SPDX-License-Identifier: Apache-2.0

//! Test-only helpers: a seeded instance generator and a brute-force local
//! solvability oracle that shares no code with the crate's digit search.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twin_selmer::{Epsilon, FamilyParams, HomogeneousSpace};

/// Deepest refinement level before a disk is declared inconclusive.
pub const MAX_LEVEL: u32 = 40;
/// Abort if the number of live disks grows past this.
pub const MAX_DISKS: usize = 200_000;

fn small_primes(bound: u64) -> Vec<u64> {
    (2..bound).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

/// `count` valid parameter sets with both signs, `1 <= n <= 3` and all primes below 300.
pub fn random_instances(seed: u64, count: usize) -> Vec<FamilyParams> {
    let primes = small_primes(300);
    let twins: Vec<(u64, u64)> = primes.windows(2).filter(|w| w[1] == w[0] + 2).map(|w| (w[0], w[1])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let &(p, q) = twins.choose(&mut rng).unwrap();
        let pool: Vec<u64> = primes.iter().copied().filter(|&l| l != 2 && l != p && l != q).collect();
        let n = rng.gen_range(1..=3);
        let mut ds: Vec<i64> = pool.choose_multiple(&mut rng, n).map(|&l| l as i64).collect();
        ds.sort();
        let eps = if rng.gen_bool(0.5) { Epsilon::Plus } else { Epsilon::Minus };
        out.push(FamilyParams::from_i64(eps, p as i64, q as i64, &ds).unwrap());
    }
    out
}

fn vl(x: &BigInt, l: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (quot, r) = x.div_rem(l);
        if !r.is_zero() {
            return Some(v);
        }
        x = quot;
        v += 1;
    }
}

fn unit_part(x: &BigInt, l: &BigInt, v: u32) -> BigInt {
    x / l.pow(v)
}

fn unit_is_square(u: &BigInt, l: &BigInt) -> bool {
    if l == &BigInt::from(2) {
        u.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        let e = (l - 1u32) / 2u32;
        u.mod_floor(l).modpow(&e, l).is_one()
    }
}

fn horner(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

fn deriv(c: &[BigInt]) -> Vec<BigInt> {
    c.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect()
}

/// Outcome of the exhaustive search on one patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Brute {
    Square,
    NoSquare,
    Inconclusive,
}

/// Does `F(z)` take a square value (or zero) for some `z` in `Z_l`?
/// `coeffs` is constant term first.
pub fn brute_patch(coeffs: &[BigInt], l: &BigInt) -> Brute {
    let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() {
        return Brute::Square;
    }
    let c = vl(&content, l).unwrap();
    let scale = l.pow(c);
    let f: Vec<BigInt> = coeffs.iter().map(|a| a / &scale).collect();
    let df = deriv(&f);
    let prec = if l == &BigInt::from(2) { 3 } else { 1 };
    let lu = l.to_u64_digits().1.first().copied().unwrap_or(0);

    // disks z = r + l^k Z_l
    let mut live: Vec<BigInt> = vec![BigInt::zero()];
    let mut modulus = BigInt::one();
    let mut level = 0u32;
    while !live.is_empty() {
        if level >= MAX_LEVEL {
            return Brute::Inconclusive;
        }
        let mut next = Vec::new();
        for r in &live {
            for j in 0..lu {
                let z = r + &modulus * BigInt::from(j);
                let val = horner(&f, &z);
                let Some(v) = vl(&val, l) else {
                    return Brute::Square;
                };
                if v + prec <= level + 1 {
                    if (v + c).is_multiple_of(2) && unit_is_square(&unit_part(&val, l, v), l) {
                        return Brute::Square;
                    }
                    continue;
                }
                // a simple root of f nearby gives w = 0
                if vl(&horner(&df, &z), l).is_some_and(|w| v > 2 * w) {
                    return Brute::Square;
                }
                next.push(z);
            }
        }
        if next.len() > MAX_DISKS {
            return Brute::Inconclusive;
        }
        live = next;
        modulus *= l;
        level += 1;
    }
    Brute::NoSquare
}

/// Exhaustive local solvability of `d w^2 = g(z)` over `Q_l`, or `None` when undecided.
pub fn brute_solvable(space: &HomogeneousSpace, l: &BigInt) -> Option<bool> {
    let d = &space.d;
    let integral = [d * &space.u0, BigInt::zero(), d * &space.u2, BigInt::zero(), d * &space.u4];
    let l2 = l * l;
    let reciprocal = [d * &space.u4, BigInt::zero(), d * &space.u2 * &l2, BigInt::zero(), d * &space.u0 * &l2 * &l2];
    let mut undecided = false;
    for poly in [&integral, &reciprocal] {
        match brute_patch(poly, l) {
            Brute::Square => return Some(true),
            Brute::NoSquare => {}
            Brute::Inconclusive => undecided = true,
        }
    }
    if undecided {
        None
    } else {
        Some(false)
    }
}

/// Real solvability by sampling sign changes at the vertex and the ends.
pub fn brute_real(space: &HomogeneousSpace) -> bool {
    let sign = |x: &BigInt| x.signum();
    let target = sign(&space.d);
    if sign(&space.u4) == target || sign(&space.u0) == target {
        return true;
    }
    // g(z) = u4 y^2 + u2 y + u0 on y = z^2 >= 0, extremum at y = -u2 / (2 u4)
    let y_num = -&space.u2;
    let y_den: BigInt = &space.u4 * 2;
    if (y_num.is_positive() && y_den.is_positive()) || (y_num.is_negative() && y_den.is_negative()) {
        // 4 u4 (g at vertex) = 4 u4 u0 - u2^2
        let four_u4_g: BigInt = &space.u4 * &space.u0 * 4 - &space.u2 * &space.u2;
        let g_sign = sign(&four_u4_g) * sign(&space.u4);
        return g_sign == target || g_sign.is_zero();
    }
    false
}
