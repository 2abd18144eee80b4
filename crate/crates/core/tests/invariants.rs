mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::ba::{independent_def, set};
use finmodel::boolean_algebra::{is_independent_mod_ideal, PrincipalIdeal, Subalgebra};
use finmodel::structure::{ElemId, FiniteStructure, Vocabulary};

fn partial_binop(n: u32, table: &[(u32, u32, u32)]) -> FiniteStructure {
    let mut m = FiniteStructure::with_universe(Vocabulary::new().partial_function("f", 2), 0..n);
    for (a, b, v) in table {
        m.define_by_name("f", &[a % n, b % n], v % n).unwrap();
    }
    m
}

proptest! {
    #[test]
    fn closure_is_extensive_monotone_idempotent(
        table in prop::collection::vec((0u32..8, 0u32..8, 0u32..8), 0..12),
        x in prop::collection::btree_set(0u32..8, 0..4),
        extra in prop::collection::btree_set(0u32..8, 0..3),
    ) {
        let m = partial_binop(8, &table);
        let cx = m.closure(&x, 64).unwrap();
        prop_assert!(x.is_subset(&cx));
        prop_assert_eq!(m.closure(&cx, 64).unwrap(), cx.clone());
        let y: BTreeSet<ElemId> = x.union(&extra).copied().collect();
        prop_assert!(cx.is_subset(&m.closure(&y, 64).unwrap()));
    }

    #[test]
    fn independence_is_downward_closed_and_matches_definition(
        n in 1usize..9,
        ys in prop::collection::vec(1u64..256, 1..4),
        xs in prop::collection::vec(0u64..256, 0..3),
        d in 0u64..256,
    ) {
        let full = (1u64 << n) - 1;
        let ys: Vec<u64> = ys.iter().map(|y| y & full).collect();
        let xs: Vec<u64> = xs.iter().map(|x| x & full).collect();
        let d = d & full;
        let ideal = PrincipalIdeal::new(set(n, d));
        let ys_s: Vec<_> = ys.iter().map(|y| set(n, *y)).collect();
        let xs_s: Vec<_> = xs.iter().map(|x| set(n, *x)).collect();
        let whole = is_independent_mod_ideal(n, &ys_s, &xs_s, &ideal);
        prop_assert_eq!(whole, independent_def(n, &ys, &xs, d));
        if whole {
            prop_assert!(is_independent_mod_ideal(n, &ys_s[..ys_s.len() - 1], &xs_s, &ideal));
        }
    }

    #[test]
    fn generated_subalgebra_contains_its_generators(
        n in 1usize..12,
        gens in prop::collection::vec(0u64..4096, 0..4),
    ) {
        let full = (1u64 << n) - 1;
        let gs: Vec<_> = gens.iter().map(|g| set(n, g & full)).collect();
        let s = Subalgebra::generated_by(n, &gs);
        prop_assert!(gs.iter().all(|g| s.contains(g)));
        prop_assert!(s.cell_count() <= 1 << gs.len());
    }
}
