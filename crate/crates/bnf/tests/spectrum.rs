use bnf::bouquet::EnumTape;
use bnf::jumpinv::{Pack, SOracle};
use bnf::spectrum::*;
use bnf::BnfError;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

fn tape(events: &[(u32, u64)]) -> EnumTape {
    EnumTape { i: 0, j: 0, events: events.to_vec(), unbounded: false, period: 1 }
}

fn set(xs: &[u32]) -> Set {
    xs.iter().copied().collect()
}

fn input(x: &[u32], wk: &[(u32, u64)], m: u32) -> SortInput {
    let mut inp = SortInput { k: 0, x: set(x), wk: tape(wk), horizon: 0, m };
    inp.horizon = stabilization_stage(&inp.wk).max(inp.x.len() as u32) + 1;
    inp
}

#[test]
fn empty_wk_fires_only_at_empty_set() {
    let (sched, trace) = build_schedule(&input(&[2], &[], 3)).unwrap();
    let fam = sched.family();
    assert_eq!(fam["a[{2},0]"], set(&[2]));
    assert_eq!(fam["a[{},0]"], set(&[2]));
    assert!(check_single_witness(&sched, &trace).pass);
    assert!(check_r_trace(&trace, &set(&[2])).pass);
}

#[test]
fn guard_and_horizon_errors() {
    let bad = input(&[1], &[(1, 1)], 2);
    assert!(matches!(build_schedule(&bad), Err(BnfError::Guard(_))));
    let mut short = input(&[0, 3], &[(2, 1)], 2);
    short.horizon = 1;
    assert!(matches!(build_schedule(&short), Err(BnfError::Horizon(_))));
}

#[test]
fn figure_one_three_routes() {
    let pack = Pack::desk_predicate().unwrap();
    let oracle = SOracle::desk_predicate().unwrap();
    let sched = WitnessSchedule::figure_one();
    let sort = materialize_sort(&sched, &oracle).unwrap();
    let ex = extract_agreeing(&sort, &pack, &sched).unwrap();
    let (name, _) = &sort.points[0];
    assert!(!ex.sets[name].contains(&1));
    assert!(ex.sets[name].contains(&2));
    assert_eq!(ex.witnesses[name][&2], vec![3]);
    assert_eq!(oracle.membership_reads(), 0);
}

#[test]
fn five_pairs_check_family() {
    let pack = Pack::desk_predicate().unwrap();
    let oracle = SOracle::desk_predicate().unwrap();
    let pairs: Vec<(Vec<u32>, Vec<(u32, u64)>)> = vec![
        (vec![2], vec![]),
        (vec![0, 2], vec![(1, 0)]),
        (vec![1, 3], vec![(2, 1)]),
        (vec![0, 1, 3], vec![(1, 0), (3, 1)]),
        (vec![2, 3], vec![(1, 1), (2, 0)]),
    ];
    let t = Instant::now();
    for (x, wk) in pairs {
        let inp = input(&x, &wk, 2);
        let (sort, sched, trace) = build_sort(&inp, &oracle).unwrap();
        assert!(check_single_witness(&sched, &trace).pass);
        let r = check_r_trace(&trace, &inp.x);
        assert!(r.pass, "{}", r.detail);
        let ex = extract_agreeing(&sort, &pack, &sched).unwrap();
        let rep = check_family(&ex.family(), &w_final(&inp.wk), inp.m);
        assert!(rep.pass, "{x:?} {wk:?}: {rep:?}");
        assert!(!trace.json_lines(&sched).is_empty());
    }
    eprintln!("five pairs in {:?}", t.elapsed());
}

#[test]
fn random_schedules_routes_agree() {
    let pack = Pack::desk_predicate().unwrap();
    let oracle = SOracle::desk_predicate().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let sched = WitnessSchedule::random(&mut rng, 3, 3, 4);
        let sort = materialize_sort(&sched, &oracle).unwrap();
        let ex = extract_agreeing(&sort, &pack, &sched).unwrap();
        assert_eq!(ex.sets, sched.family());
    }
}

#[test]
fn unfriendly_matches_table() {
    let oracle = SOracle::desk_predicate().unwrap();
    let tables: Vec<BTreeMap<u32, bool>> = vec![
        (0..4).map(|k| (k, k % 2 == 0)).collect(),
        (0..4).map(|k| (k, true)).collect(),
        (0..4).map(|k| (k, false)).collect(),
        (0..4).map(|k| (k, k == 3)).collect(),
    ];
    for table in tables {
        let t = Instant::now();
        let ix = UnfriendlyIndices::from_table(&table, 2, &oracle).unwrap();
        let m = build_unfriendly(&ix, &oracle).unwrap();
        let v = unfriendly_verdicts(&m, 1).unwrap();
        assert_eq!(v, table);
        eprintln!("table {table:?} size {} in {:?}", m.structure.domain_size(), t.elapsed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn laws_hold_on_random_tapes(xs in proptest::collection::btree_set(0u32..5, 1..4),
                                 ev in proptest::collection::vec((1u32..4, 0u64..5), 0..3)) {
        let mut ev = ev;
        ev.sort();
        let wk = tape(&ev);
        prop_assume!(xs.iter().any(|e| !w_final(&wk).contains(e)));
        let inp = input(&xs.iter().copied().collect::<Vec<_>>(), &ev, 2);
        let (sched, trace) = build_schedule(&inp).unwrap();
        prop_assert!(check_single_witness(&sched, &trace).pass);
        let r = check_r_trace(&trace, &inp.x);
        prop_assert!(r.pass, "{}", r.detail);
    }
}
