use bnf::backforth::{BfConfig, BfQuery, BfTable, for_each_tuple};
use bnf::formulas::*;
use bnf::structures::{ExtMode, FiniteStructure};
use bnf::verify::{grid_signature, iso};
use std::time::Instant;

fn corpus() -> Vec<FiniteStructure> {
    let s = grid_signature();
    vec![
        FiniteStructure::from_named(s.clone(), 0, &[]).unwrap(),
        FiniteStructure::from_named(s.clone(), 1, &[("P", vec![vec![0]])]).unwrap(),
        FiniteStructure::from_named(s.clone(), 3, &[("P", vec![vec![0]]), ("E", vec![vec![0, 1], vec![1, 2]])]).unwrap(),
        FiniteStructure::from_named(s.clone(), 3, &[("E", vec![vec![0, 1], vec![1, 2], vec![2, 0]])]).unwrap(),
        FiniteStructure::from_named(s, 4, &[("P", vec![vec![1]]), ("E", vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 2]])]).unwrap(),
    ]
}

#[test]
fn type_formulas_match_bf() {
    let c = corpus();
    let t0 = Instant::now();
    let mut ts = TypeSynth::new(c.clone()).unwrap();
    let table = BfTable::with_structures(c.clone(), BfConfig { max_cells: None, ..BfConfig::default().with_mode(ExtMode::FullDomain) }).unwrap();
    for n in 1..=3 {
        let t = Instant::now();
        for i in 0..c.len() {
            for len in 0..=1 {
                let mut tuples = Vec::new();
                for_each_tuple(c[i].domain_size(), len, |a| tuples.push(a.to_vec()));
                for a in tuples {
                    let phi = ts.type_formula(i, &a, n).unwrap();
                    assert!(phi.rank().in_pi(n), "rank {}", phi.rank());
                    let mut ev: Vec<_> = c.iter().map(Evaluator::new).collect();
                    for j in 0..c.len() {
                        let mut bs = Vec::new();
                        for_each_tuple(c[j].domain_size(), len, |b| bs.push(b.to_vec()));
                        for b in bs {
                            let want = table.leq(&BfQuery::new(i, a.clone(), j, b.clone(), n)).unwrap();
                            assert_eq!(ev[j].eval(&phi, &b).unwrap(), want, "n={n} i={i} a={a:?} j={j} b={b:?}");
                        }
                    }
                }
            }
        }
        eprintln!("n={n} {:?}", t.elapsed());
    }
    eprintln!("total {:?}", t0.elapsed());
}

#[test]
fn separating_and_scott() {
    let c = corpus();
    let t0 = Instant::now();
    for n in 1..=2 {
        for a in 0..c.len() {
            for b in 0..c.len() {
                let table = BfTable::with_structures([c[a].clone(), c[b].clone()], BfConfig { max_cells: None, ..BfConfig::default() }).unwrap();
                let leq = table.leq_structures(0, 1, n).unwrap();
                match synth_separating(&c[a], &c[b], n) {
                    Ok(f) => {
                        assert!(!leq);
                        assert!(f.rank().in_pi(n));
                        assert!(evaluate(&f, &c[a], &[]).unwrap());
                        assert!(!evaluate(&f, &c[b], &[]).unwrap());
                    }
                    Err(e) => assert!(leq, "{e}"),
                }
            }
        }
    }
    eprintln!("sep {:?}", t0.elapsed());
    for (i, s) in c.iter().enumerate() {
        let t = Instant::now();
        let (chi, lvl) = (1..=3).find_map(|n| synth_scott(s, n).ok().map(|f| (f, n))).unwrap();
        eprintln!("scott {i} level {lvl} rank {} size {} {:?}", chi.rank(), chi.dag_size(), t.elapsed());
        for other in &c {
            assert_eq!(evaluate(&chi, other, &[]).unwrap(), iso(s, other).is_iso());
        }
    }
    eprintln!("scott total {:?}", t0.elapsed());
}

use proptest::prelude::*;

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0u32..3).prop_map(|v| Formula::atom("P", vec![v])),
        (0u32..3, 0u32..3).prop_map(|(a, b)| Formula::atom("E", vec![a, b])),
        (0u32..3, 0u32..3).prop_map(|(a, b)| Formula::neq(a, b)),
        Just(Formula::top()),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::or),
            (0u32..3, inner.clone()).prop_map(|(v, b)| Formula::exists(vec![v], b)),
            (0u32..3, inner.clone()).prop_map(|(v, b)| Formula::forall(vec![v], b)),
            inner.prop_map(|f| f.negate()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn sexp_round_trip(f in arb_formula()) {
        let text = to_sexp(&f);
        let back = parse(&text).unwrap();
        prop_assert_eq!(to_sexp(&back), text);
        let c = corpus();
        for s in &c[1..] {
            let env = vec![0u32; 3];
            prop_assert_eq!(evaluate(&f, s, &env).unwrap(), evaluate(&back, s, &env).unwrap());
        }
    }

    #[test]
    fn negation_flips_truth_and_rank(f in arb_formula()) {
        let c = corpus();
        let env = vec![0u32; 3];
        for s in &c[1..] {
            prop_assert_eq!(evaluate(&f, s, &env).unwrap(), !evaluate(&f.negate(), s, &env).unwrap());
        }
        let (r, n) = (f.rank(), f.negate().rank());
        prop_assert_eq!((r.sigma, r.pi), (n.pi, n.sigma));
    }
}

#[test]
fn parse_errors_carry_position() {
    for bad in ["(and (P x0)", "(exists x0 (P x0))", "(P x0) trailing", "(let ((%0 (P x0))) %1)"] {
        assert!(matches!(parse(bad), Err(bnf::BnfError::Parse { .. })), "{bad}");
    }
}

#[test]
fn rank_examples() {
    let p = parse("(forall (x0) (exists (x1) (E x0 x1)))").unwrap();
    assert!(p.rank().is_pi(2));
    assert!(p.rank().in_sigma(3) && !p.rank().in_sigma(2));
    let q = parse("(and (exists (x0) (P x0)) (forall (x0) (P x0)))").unwrap();
    assert_eq!((q.rank().sigma, q.rank().pi), (2, 2));
}
