use bnf::structures::*;
use bnf::symmetry::{automorphisms, isomorphism, stabilizer_orbits};
use bnf::verify::{grid_signature, iso};
use bnf::BnfError;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn small(n: usize, p: &[u32], e: &[(u32, u32)]) -> FiniteStructure {
    FiniteStructure::from_named(
        grid_signature(),
        n,
        &[("P", p.iter().map(|&x| vec![x]).collect()), ("E", e.iter().map(|&(a, b)| vec![a, b]).collect())],
    )
    .unwrap()
}

#[test]
fn rejects_bad_input() {
    assert!(Signature::new([("R", 1), ("R", 2)]).is_err());
    let r = FiniteStructure::from_named(grid_signature(), 2, &[("E", vec![vec![0, 5]])]);
    assert!(matches!(r, Err(BnfError::Element { .. }) | Err(BnfError::Structure(_))));
    assert!(FiniteStructure::from_named(grid_signature(), 2, &[("E", vec![vec![0]])]).is_err());
}

#[test]
fn json_round_trip() {
    let s = small(3, &[1], &[(0, 1), (2, 2)]);
    let text = serde_json::to_string(&s).unwrap();
    let back: FiniteStructure = serde_json::from_str(&text).unwrap();
    assert_eq!(s, back);
}

#[test]
fn induced_and_reduct() {
    let s = small(4, &[0, 3], &[(0, 1), (1, 2), (2, 3)]);
    let sub = s.induced(&[1, 2]).unwrap();
    assert_eq!(sub.domain_size(), 2);
    assert!(sub.holds(1, &[0, 1]));
    assert_eq!(sub.tuples(0).len(), 0);
    let only_p = s.reduct(&Signature::new([("P", 1)]).unwrap()).unwrap();
    assert_eq!(only_p.signature().len(), 1);
}

#[test]
fn automorphism_counts() {
    let cycle = small(4, &[], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert_eq!(automorphisms(&cycle, 1000).len(), 4);
    let empty = small(3, &[], &[]);
    assert_eq!(automorphisms(&empty, 1000).len(), 6);
    let orbits = stabilizer_orbits(&cycle, &[0]);
    let sizes: BTreeSet<usize> = orbits.iter().map(|o| o.len()).collect();
    assert!(sizes.contains(&1));
}

#[test]
fn labeled_materialization_respects_multiplicity() {
    let mut ls = LabeledStructure::new((0..3).collect(), None).unwrap();
    ls.insert("p", [1].into(), Multiplicity::Finite(2)).unwrap();
    ls.insert("q", [0, 2].into(), Multiplicity::Infinite).unwrap();
    let p = TruncationParams { copies: 3, label_bound: 3, horizon: 1, ext_mode: ExtMode::FullDomain };
    let m = materialize(&ls, &p, Encoding::Predicate).unwrap();
    assert_eq!(m.domain_size(), 5);
    let back = decode_label_multiset(&m, Encoding::Predicate).unwrap();
    assert_eq!(back[&BTreeSet::from([1])], 2);
    assert_eq!(back[&BTreeSet::from([0, 2])], 3);
}

#[test]
fn graph_encodings_preserve_label_isomorphism() {
    let mut a = LabeledStructure::new((0..3).collect(), None).unwrap();
    a.insert("x", [0, 2].into(), Multiplicity::Finite(1)).unwrap();
    a.insert("y", [1].into(), Multiplicity::Finite(1)).unwrap();
    let mut b = LabeledStructure::new((0..3).collect(), None).unwrap();
    b.insert("u", [1].into(), Multiplicity::Finite(1)).unwrap();
    b.insert("v", [0, 2].into(), Multiplicity::Finite(1)).unwrap();
    let mut c = LabeledStructure::new((0..3).collect(), None).unwrap();
    c.insert("u", [1].into(), Multiplicity::Finite(1)).unwrap();
    c.insert("v", [0].into(), Multiplicity::Finite(1)).unwrap();
    let p = TruncationParams { copies: 1, label_bound: 3, horizon: 1, ext_mode: ExtMode::FullDomain };
    for enc in [Encoding::Predicate, Encoding::Graph, Encoding::MarkedGraph] {
        let (ma, mb, mc) = (materialize(&a, &p, enc).unwrap(), materialize(&b, &p, enc).unwrap(), materialize(&c, &p, enc).unwrap());
        assert!(iso(&ma, &mb).is_iso(), "{enc:?}");
        assert!(!iso(&ma, &mc).is_iso(), "{enc:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn renumbering_is_isomorphic(n in 1usize..5, edges in proptest::collection::vec((0u32..5, 0u32..5), 0..8), seed in 0u64..1000) {
        let edges: Vec<(u32, u32)> = edges.into_iter().filter(|&(a, b)| (a as usize) < n && (b as usize) < n).collect();
        let s = small(n, &[0], &edges);
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let r = s.renumber(&perm).unwrap();
        prop_assert!(iso(&s, &r).is_iso());
        prop_assert!(isomorphism(&s, &r).is_some());
    }
}
