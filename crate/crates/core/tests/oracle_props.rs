// SPDX-License-Identifier: Apache-2.0

//! Property tests of the local oracle and Selmer computation against the
//! brute-force search in `common`.

mod common;

use proptest::prelude::*;
use twin_selmer::localsolve::{padic_solvable, real_solvable, witness_is_valid, LocalPlace};
use twin_selmer::selmer::compute_selmer;
use twin_selmer::theorems::rho;
use twin_selmer::{DescentKind, Epsilon, FamilyParams, SquareClass};

const TWINS: [(i64, i64); 6] = [(3, 5), (5, 7), (11, 13), (17, 19), (29, 31), (41, 43)];
const POOL: [i64; 12] = [3, 7, 11, 13, 17, 23, 37, 41, 53, 61, 73, 97];

fn family() -> impl Strategy<Value = FamilyParams> {
    (0..TWINS.len(), proptest::sample::subsequence(POOL.to_vec(), 1..=3), any::<bool>()).prop_filter_map(
        "D primes must avoid p and q",
        |(t, ds, plus)| {
            let (p, q) = TWINS[t];
            let eps = if plus { Epsilon::Plus } else { Epsilon::Minus };
            FamilyParams::from_i64(eps, p, q, &ds).ok()
        },
    )
}

fn kind() -> impl Strategy<Value = DescentKind> {
    prop_oneof![Just(DescentKind::Phi), Just(DescentKind::PhiHat)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dfs_matches_brute_force(f in family(), bits in any::<u64>(), k in kind()) {
        let class = SquareClass::from_bits(bits & ((1 << f.rank()) - 1));
        let space = f.build_space(class, k);
        for place in f.places() {
            let Some(l) = f.place_prime(place) else {
                prop_assert_eq!(real_solvable(&space).solvable, common::brute_real(&space));
                continue;
            };
            let v = padic_solvable(&space, &l).unwrap();
            prop_assert_eq!(Some(v.solvable), common::brute_solvable(&space, &l), "l = {}", l);
            if let Some(w) = &v.witness {
                prop_assert!(witness_is_valid(&space, &LocalPlace::Prime(l.clone()), w));
            }
        }
    }

    #[test]
    fn selmer_groups_are_groups_with_floor(f in family()) {
        let phi = compute_selmer(&f, DescentKind::Phi).unwrap();
        let hat = compute_selmer(&f, DescentKind::PhiHat).unwrap();
        prop_assert_eq!(phi.elements.len(), 1 << phi.dim2);
        prop_assert_eq!(hat.elements.len(), 1 << hat.dim2);
        prop_assert!(phi.dim2 >= rho(&f, f.epsilon()));
        prop_assert!(phi.dim2 + hat.dim2 >= 2);
        prop_assert!(phi.contains(SquareClass::IDENTITY));
        let pq = f.class_of_integer(&(f.p() * f.q())).unwrap();
        prop_assert!(hat.contains(pq));
    }
}
