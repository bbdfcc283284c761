// SPDX-License-Identifier: Apache-2.0

//! Smallest-first construction of parameter sets satisfying a statement's
//! hypotheses, and of instances with large Selmer groups.
//!
//! Candidates are ordered by twin pair, then lexicographically by the
//! increasing list `D_1 < ... < D_n`. Primes are added one at a time and a
//! prefix is abandoned as soon as a per-prime or pairwise condition fails.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::error::SelmerError;
use crate::family::{DescentKind, Epsilon, FamilyParams};
use crate::selmer::compute_selmer;
use crate::theorems::{hypotheses_hold, prefix_hypotheses, TheoremId};
use crate::Int;

/// Twin pairs `(p, p + 2)` with `p + 2 <= bound`, ascending.
pub fn twin_pairs(bound: u64) -> Vec<(u64, u64)> {
    let primes = primes_up_to(bound);
    primes
        .windows(2)
        .filter(|w| w[1] == w[0] + 2)
        .map(|w| (w[0], w[1]))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub bound: u64,
    pub time_budget: Option<Duration>,
    /// Emit progress lines on stderr.
    pub progress: bool,
}

impl SearchOptions {
    pub fn new(bound: u64) -> Self {
        SearchOptions {
            bound,
            time_budget: None,
            progress: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanEnd {
    Stopped,
    Exhausted,
    OutOfTime,
}

struct Scanner<'a> {
    eps: Epsilon,
    id: TheoremId,
    n: usize,
    opts: &'a SearchOptions,
    deadline: Option<Instant>,
    tested: u64,
}

impl Scanner<'_> {
    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn run(&mut self, visit: &mut dyn FnMut(FamilyParams, u64) -> ControlFlow<()>) -> ScanEnd {
        let primes = primes_up_to(self.opts.bound);
        for (p, q) in twin_pairs(self.opts.bound) {
            let pool: Vec<u64> = primes.iter().copied().filter(|&l| l != 2 && l != p && l != q).collect();
            let mut prefix = Vec::with_capacity(self.n);
            match self.extend(p, q, &pool, 0, &mut prefix, visit) {
                ControlFlow::Break(end) => return end,
                ControlFlow::Continue(()) => {}
            }
        }
        ScanEnd::Exhausted
    }

    fn extend(
        &mut self,
        p: u64,
        q: u64,
        pool: &[u64],
        start: usize,
        prefix: &mut Vec<u64>,
        visit: &mut dyn FnMut(FamilyParams, u64) -> ControlFlow<()>,
    ) -> ControlFlow<ScanEnd> {
        for idx in start..pool.len() {
            if self.out_of_time() {
                return ControlFlow::Break(ScanEnd::OutOfTime);
            }
            prefix.push(pool[idx]);
            self.tested += 1;
            let f = params_of(self.eps, p, q, prefix);
            if prefix_hypotheses(&f, self.id) {
                if prefix.len() == self.n {
                    if hypotheses_hold(&f, self.id) {
                        if self.opts.progress {
                            eprintln!(
                                "search: {} candidates tested, n = {}, hit {f}",
                                self.tested,
                                prefix.len()
                            );
                        }
                        if visit(f, self.tested).is_break() {
                            return ControlFlow::Break(ScanEnd::Stopped);
                        }
                    }
                } else {
                    self.extend(p, q, pool, idx + 1, prefix, visit)?;
                }
            }
            prefix.pop();
            if self.opts.progress && self.tested.is_multiple_of(100_000) {
                eprintln!("search: {} candidates tested, current n = {}", self.tested, prefix.len());
            }
        }
        ControlFlow::Continue(())
    }
}

fn params_of(eps: Epsilon, p: u64, q: u64, ds: &[u64]) -> FamilyParams {
    FamilyParams::new(
        eps,
        Int::from(p),
        Int::from(q),
        ds.iter().map(|&d| Int::from(d)).collect(),
    )
    .expect("scan only produces valid parameters")
}

/// Visit every admissible parameter set in scan order until `visit` breaks.
pub fn scan_families(
    eps: Epsilon,
    id: TheoremId,
    n: usize,
    opts: &SearchOptions,
    visit: &mut dyn FnMut(FamilyParams, u64) -> ControlFlow<()>,
) -> ScanEnd {
    if n == 0 {
        return ScanEnd::Exhausted;
    }
    let mut s = Scanner {
        eps,
        id,
        n,
        opts,
        deadline: opts.time_budget.map(|b| Instant::now() + b),
        tested: 0,
    };
    s.run(visit)
}

/// The first parameter set, in scan order, satisfying the hypotheses of `id`.
pub fn find_family(eps: Epsilon, id: TheoremId, n: usize, bound: u64) -> Option<FamilyParams> {
    find_families(eps, id, n, &SearchOptions::new(bound), 1).into_iter().next()
}

/// Up to `limit` parameter sets in scan order.
pub fn find_families(eps: Epsilon, id: TheoremId, n: usize, opts: &SearchOptions, limit: usize) -> Vec<FamilyParams> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    scan_families(eps, id, n, opts, &mut |f, _| {
        out.push(f);
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Which hypotheses and how many primes to stack for a target dimension.
pub fn large_selmer_strategy(eps: Epsilon, kind: DescentKind, k: usize) -> (TheoremId, usize) {
    match (eps, kind) {
        // |S^φ̂| = 2^(n+3)
        (Epsilon::Plus, DescentKind::PhiHat) => (TheoremId::T1_4Ex, k.saturating_sub(3).max(1)),
        // |S^φ| >= 2^n
        (Epsilon::Plus, DescentKind::Phi) => (TheoremId::T1_2A, k.max(1)),
        (Epsilon::Minus, DescentKind::Phi) => (TheoremId::T1_7A, k.max(1)),
        // |S^φ̂| = 2^(n+2)
        (Epsilon::Minus, DescentKind::PhiHat) => (TheoremId::T1_9Ex, k.saturating_sub(2).max(1)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargeSelmer {
    pub params: FamilyParams,
    pub kind: DescentKind,
    pub target: usize,
    pub dim2: usize,
    pub candidates_tested: u64,
}

/// Find an instance whose oracle-computed Selmer group has dimension at least `k`.
pub fn demonstrate_large_selmer(
    eps: Epsilon,
    kind: DescentKind,
    k: usize,
    opts: &SearchOptions,
) -> Result<Option<LargeSelmer>, SelmerError> {
    let (id, n) = large_selmer_strategy(eps, kind, k);
    let mut found = None;
    let mut err = None;
    let end = scan_families(eps, id, n, opts, &mut |f, tested| match compute_selmer(&f, kind) {
        Ok(g) if g.dim2 >= k => {
            found = Some(LargeSelmer {
                params: f,
                kind,
                target: k,
                dim2: g.dim2,
                candidates_tested: tested,
            });
            ControlFlow::Break(())
        }
        Ok(_) => ControlFlow::Continue(()),
        Err(e) => {
            err = Some(e);
            ControlFlow::Break(())
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if opts.progress && found.is_none() {
        let why = match end {
            ScanEnd::OutOfTime => "time budget exhausted",
            _ => "no candidate under the bound",
        };
        eprintln!("search: gave up ({why})");
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::{rho_plus, verify_theorem, Verdict};

    #[test]
    fn twin_pairs_small() {
        assert_eq!(twin_pairs(20), vec![(3, 5), (5, 7), (11, 13), (17, 19)]);
        assert!(twin_pairs(4).is_empty());
    }

    #[test]
    fn find_family_examples() {
        let f = find_family(Epsilon::Plus, TheoremId::T1_2B, 1, 100).unwrap();
        assert_eq!((f.p().clone(), f.q().clone()), (Int::from(3), Int::from(5)));
        assert!(f.d() <= &Int::from(61));
        assert_ne!(verify_theorem(&f, TheoremId::T1_2B).unwrap().verdict, Verdict::NotApplicable);

        let hits = find_families(Epsilon::Plus, TheoremId::T1_4Ex, 1, &SearchOptions::new(100), 50);
        assert!(hits.iter().any(|f| f.d() == &Int::from(41) && f.p() == &Int::from(3)));

        assert!(find_family(Epsilon::Plus, TheoremId::T1_2C, 1, 10).is_none());
    }

    #[test]
    fn scan_is_deterministic() {
        let opts = SearchOptions::new(200);
        let a = find_families(Epsilon::Minus, TheoremId::T1_7A, 2, &opts, 5);
        let b = find_families(Epsilon::Minus, TheoremId::T1_7A, 2, &opts, 5);
        assert_eq!(a.len(), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn stacking_keeps_witnesses() {
        // each extension of a 1.2A-admissible list stays admissible and ρ⁺ grows by one
        let f = find_family(Epsilon::Plus, TheoremId::T1_2A, 3, 2000).unwrap();
        let ds: Vec<Int> = f.d_primes().cloned().collect();
        for m in 1..=ds.len() {
            let g = FamilyParams::new(Epsilon::Plus, f.p().clone(), f.q().clone(), ds[..m].to_vec()).unwrap();
            assert_eq!(rho_plus(&g), m);
        }
    }

    #[test]
    fn small_large_selmer_targets() {
        let opts = SearchOptions::new(200);
        let hit = demonstrate_large_selmer(Epsilon::Plus, DescentKind::Phi, 1, &opts).unwrap().unwrap();
        assert!(hit.dim2 >= 1);
        let hit = demonstrate_large_selmer(Epsilon::Plus, DescentKind::Phi, 0, &opts).unwrap().unwrap();
        assert_eq!(hit.target, 0);
    }
}
