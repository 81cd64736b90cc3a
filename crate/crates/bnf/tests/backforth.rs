use bnf::backforth::*;
use bnf::bouquet::{desk_pair, desk_params};
use bnf::structures::{materialize, Encoding, ExtMode, FiniteStructure, TruncationParams};
use bnf::verify::{bf_unrestricted, grid_signature};
use bnf::BnfError;
use proptest::prelude::*;

fn g(n: usize, p: &[u32], e: &[(u32, u32)]) -> FiniteStructure {
    FiniteStructure::from_named(
        grid_signature(),
        n,
        &[("P", p.iter().map(|&x| vec![x]).collect()), ("E", e.iter().map(|&(a, b)| vec![a, b]).collect())],
    )
    .unwrap()
}

fn full(structs: Vec<FiniteStructure>) -> BfTable {
    BfTable::with_structures(structs, BfConfig { max_cells: None, ..BfConfig::default() }).unwrap()
}

#[test]
fn edge_versus_no_edge() {
    // A single directed edge against two isolated points.
    let t = full(vec![g(2, &[], &[(0, 1)]), g(2, &[], &[])]);
    assert!(t.leq_structures(0, 1, 0).unwrap());
    // "any two distinct points are joined" holds only in the first,
    // "no edges" only in the second.
    assert!(!t.leq_structures(0, 1, 1).unwrap());
    assert!(!t.leq_structures(1, 0, 1).unwrap());
    // Pointed at the source, the edge embeds into nothing of the other side.
    assert!(t.leq(&BfQuery::new(1, vec![0], 0, vec![0], 1)).unwrap() == false);
}

#[test]
fn level_zero_uses_visible_symbols() {
    let t = full(vec![g(1, &[0], &[]), g(1, &[], &[])]);
    assert!(!t.leq(&BfQuery::new(0, vec![0], 1, vec![0], 0)).unwrap());
    assert!(t.leq(&BfQuery::new(0, vec![], 1, vec![], 0)).unwrap());
}

#[test]
fn tuple_length_mismatch_is_an_error() {
    let t = full(vec![g(1, &[], &[])]);
    assert!(matches!(t.leq(&BfQuery::new(0, vec![0], 0, vec![], 1)), Err(BnfError::TupleLength { .. })));
    assert!(t.leq(&BfQuery::new(0, vec![], 3, vec![], 1)).is_err());
}

#[test]
fn max_cells_reports_partial_table() {
    let t = full(vec![g(2, &[0], &[(0, 1)]), g(2, &[], &[])]);
    assert!(matches!(build_table(&t, 1, 1, Some(3)), Err(BnfError::Resource(_))));
    let m = build_table(&t, 1, 1, None).unwrap();
    assert_eq!(m.cells.len(), 4 + 4 * 4);
}

#[test]
fn representatives_agree_with_full_domain_on_desk_pair() {
    let (la, lb) = desk_pair().unwrap();
    let p = desk_params();
    let (a, b) = (materialize(&la, &p, Encoding::Predicate).unwrap(), materialize(&lb, &p, Encoding::Predicate).unwrap());
    let f = full(vec![a.clone(), b.clone()]);
    let r = BfTable::with_structures(
        vec![a, b],
        BfConfig { max_cells: None, ..BfConfig::from_params(&TruncationParams { ext_mode: ExtMode::Representatives, ..p }) },
    )
    .unwrap();
    let mut verdicts = Vec::new();
    for level in 0..=2 {
        for (x, y) in [(0, 1), (1, 0)] {
            let (vf, vr) = (f.leq_structures(x, y, level).unwrap(), r.leq_structures(x, y, level).unwrap());
            assert_eq!(vf, vr, "level {level} {x}->{y}");
            verdicts.push(vf);
        }
    }
    // A <=_1 B but not conversely (the Sigma_1 separating sentence), and
    // neither direction survives level 2.
    assert_eq!(verdicts, vec![true, true, true, false, false, false]);
}

fn arb_struct() -> impl Strategy<Value = FiniteStructure> {
    (0usize..4).prop_flat_map(|n| {
        let m = n.max(1) as u32;
        (Just(n), proptest::collection::vec(0..m, 0..3), proptest::collection::vec((0..m, 0..m), 0..5))
    })
    .prop_map(|(n, p, e)| {
        let p: Vec<u32> = p.into_iter().filter(|&x| (x as usize) < n).collect();
        let e: Vec<(u32, u32)> = e.into_iter().filter(|&(a, b)| (a as usize) < n && (b as usize) < n).collect();
        g(n, &p, &e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn preorder_and_monotone(a in arb_struct(), b in arb_struct(), c in arb_struct()) {
        let t = full(vec![a.clone(), b.clone(), c.clone()]);
        for n in 0..=2 {
            prop_assert!(t.leq_structures(0, 0, n).unwrap());
            let ab = t.leq_structures(0, 1, n).unwrap();
            let bc = t.leq_structures(1, 2, n).unwrap();
            if ab && bc {
                prop_assert!(t.leq_structures(0, 2, n).unwrap());
            }
            if n > 0 && ab {
                prop_assert!(t.leq_structures(0, 1, n - 1).unwrap());
            }
        }
        for n in 0..=2 {
            let fast = t.leq_structures(0, 1, n).unwrap();
            let slow = bf_unrestricted(&[a.clone(), b.clone()], n, 0, &[], 1, &[], 3).unwrap();
            prop_assert_eq!(fast, slow);
        }
    }
}
