// SPDX-License-Identifier: Apache-2.0

//! Selmer groups by filtering all of Q(S,2) through the local oracle.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{SelmerError, SolveError};
use crate::family::{DescentKind, FamilyParams, HomogeneousSpace, Place, SquareClass};
use crate::localsolve::{padic_solvable, real_solvable, LocalVerdict};

/// Default cap on `n`; the class group has `2^(n+4)` elements.
pub const DEFAULT_MAX_N: usize = 20;

/// Verdicts for one class, in place order, ending at the first failing place.
pub type ClassVerdicts = Vec<(Place, LocalVerdict)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelmerGroup {
    pub kind: DescentKind,
    pub params: FamilyParams,
    pub elements: BTreeSet<SquareClass>,
    /// Reduced echelon basis over F_2.
    pub basis: Vec<SquareClass>,
    pub dim2: usize,
    pub verdict_table: BTreeMap<SquareClass, ClassVerdicts>,
}

impl SelmerGroup {
    pub fn contains(&self, class: SquareClass) -> bool {
        self.elements.contains(&class)
    }

    /// Elements as signed squarefree integers, ascending.
    pub fn element_values(&self) -> Vec<crate::Int> {
        let mut v: Vec<_> = self.elements.iter().map(|&c| self.params.class_value(c)).collect();
        v.sort();
        v
    }

    /// The place that rules a non-element out.
    pub fn refuting_place(&self, class: SquareClass) -> Option<Place> {
        self.verdict_table
            .get(&class)?
            .iter()
            .find(|(_, v)| !v.solvable)
            .map(|(p, _)| *p)
    }
}

/// Local verdict for one space at one place of `S`.
pub fn local_verdict(
    params: &FamilyParams,
    space: &HomogeneousSpace,
    place: Place,
) -> Result<LocalVerdict, SolveError> {
    match params.place_prime(place) {
        None => Ok(real_solvable(space)),
        Some(l) => padic_solvable(space, &l),
    }
}

/// Run the oracle over the places of `S` in order, stopping at the first refutation.
pub fn class_verdicts(
    params: &FamilyParams,
    class: SquareClass,
    kind: DescentKind,
) -> Result<ClassVerdicts, SolveError> {
    let space = params.build_space(class, kind);
    let mut out = Vec::new();
    for place in params.places() {
        let v = local_verdict(params, &space, place)?;
        let stop = !v.solvable;
        out.push((place, v));
        if stop {
            break;
        }
    }
    Ok(out)
}

pub fn compute_selmer(params: &FamilyParams, kind: DescentKind) -> Result<SelmerGroup, SelmerError> {
    compute_selmer_capped(params, kind, DEFAULT_MAX_N)
}

pub fn compute_selmer_capped(
    params: &FamilyParams,
    kind: DescentKind,
    max_n: usize,
) -> Result<SelmerGroup, SelmerError> {
    if params.n() > max_n {
        return Err(SelmerError::TooLarge { n: params.n(), cap: max_n });
    }
    let classes = params.enumerate_square_classes();
    let results: Vec<Result<ClassVerdicts, SolveError>> = classes
        .par_iter()
        .map(|&c| class_verdicts(params, c, kind))
        .collect();

    let mut elements = BTreeSet::new();
    let mut verdict_table = BTreeMap::new();
    for (class, res) in classes.into_iter().zip(results) {
        let verdicts = res?;
        if verdicts.iter().all(|(_, v)| v.solvable) {
            elements.insert(class);
        }
        verdict_table.insert(class, verdicts);
    }
    if !check_group_closure(&elements) {
        return Err(SelmerError::NotAGroup { kind: kind.to_string() });
    }
    let basis = f2_basis(&elements);
    let dim2 = basis.len();
    if elements.len() != 1usize << dim2 {
        return Err(SelmerError::NotAGroup { kind: kind.to_string() });
    }
    Ok(SelmerGroup {
        kind,
        params: params.clone(),
        elements,
        basis,
        dim2,
        verdict_table,
    })
}

pub fn selmer_dim(group: &SelmerGroup) -> usize {
    let n = group.elements.len();
    debug_assert!(n.is_power_of_two());
    n.trailing_zeros() as usize
}

/// Identity present and closed under multiplication (XOR of exponent vectors).
pub fn check_group_closure(elements: &BTreeSet<SquareClass>) -> bool {
    elements.contains(&SquareClass::IDENTITY)
        && elements
            .iter()
            .all(|&a| elements.iter().all(|&b| elements.contains(&(a ^ b))))
}

/// Reduced row echelon basis of the span, sorted by leading bit.
pub fn f2_basis<'a>(elements: impl IntoIterator<Item = &'a SquareClass>) -> Vec<SquareClass> {
    let mut rows: Vec<u64> = Vec::new();
    for e in elements {
        let mut v = e.bits();
        for &r in &rows {
            let lead = 63 - r.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= r;
            }
        }
        if v != 0 {
            let lead = 63 - v.leading_zeros();
            for r in rows.iter_mut() {
                if *r >> lead & 1 == 1 {
                    *r ^= v;
                }
            }
            rows.push(v);
        }
    }
    rows.sort();
    rows.into_iter().map(SquareClass::from_bits).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Epsilon;
    use crate::Int;

    fn classes(bits: &[u64]) -> BTreeSet<SquareClass> {
        bits.iter().map(|&b| SquareClass::from_bits(b)).collect()
    }

    #[test]
    fn closure_examples() {
        assert!(check_group_closure(&classes(&[0])));
        assert!(check_group_closure(&classes(&[0, 0b01, 0b10, 0b11])));
        assert!(!check_group_closure(&classes(&[0, 0b01, 0b10])));
        assert!(!check_group_closure(&classes(&[0b01])));
    }

    #[test]
    fn basis_spans_and_is_reduced() {
        let set = classes(&[0, 0b0110, 0b1010, 0b1100]);
        let b = f2_basis(&set);
        assert_eq!(b, vec![SquareClass::from_bits(0b0110), SquareClass::from_bits(0b1010)]);
        let mut span = BTreeSet::from([SquareClass::IDENTITY]);
        for x in &b {
            let shifted: Vec<_> = span.iter().map(|&s| s ^ *x).collect();
            span.extend(shifted);
        }
        assert_eq!(span, set);
    }

    #[test]
    fn golden_phi_61() {
        let f = FamilyParams::from_i64(Epsilon::Plus, 3, 5, &[61]).unwrap();
        let g = compute_selmer(&f, DescentKind::Phi).unwrap();
        assert_eq!(g.element_values(), vec![Int::from(1), Int::from(61)]);
        assert_eq!(g.dim2, 1);
        assert_eq!(selmer_dim(&g), 1);
        for (&c, verdicts) in &g.verdict_table {
            if !g.contains(c) {
                assert!(g.refuting_place(c).is_some());
                assert!(!verdicts.last().unwrap().1.solvable);
            }
        }
    }

    #[test]
    fn golden_phi_hat_sizes() {
        let f = FamilyParams::from_i64(Epsilon::Plus, 3, 5, &[41]).unwrap();
        assert_eq!(compute_selmer(&f, DescentKind::PhiHat).unwrap().elements.len(), 16);
        let f = FamilyParams::from_i64(Epsilon::Minus, 3, 5, &[41]).unwrap();
        assert_eq!(compute_selmer(&f, DescentKind::PhiHat).unwrap().elements.len(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let f = FamilyParams::from_i64(Epsilon::Plus, 3, 5, &[7, 11]).unwrap();
        assert!(matches!(
            compute_selmer_capped(&f, DescentKind::Phi, 1),
            Err(SelmerError::TooLarge { n: 2, cap: 1 })
        ));
    }
}
