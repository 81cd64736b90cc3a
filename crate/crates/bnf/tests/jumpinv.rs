use bnf::formulas::{evaluate, synth_scott};
use bnf::jumpinv::*;
use bnf::structures::FiniteStructure;
use bnf::symmetry::isomorphism;
use bnf::verify::iso;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn same_graph(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    a == b
}

#[test]
fn desk_packs_validate() {
    let p = Pack::desk().unwrap();
    assert_eq!(p.n, 1);
    assert!(p.signature().index_of("N").is_some());
    let q = Pack::desk_predicate().unwrap();
    assert_eq!(q.n, 0);
    assert!(q.scott_a.is_some() && q.scott_b.is_some());
    eprintln!("desk sizes {} {} predicate {} {}", p.a.domain_size(), p.b.domain_size(), q.a.domain_size(), q.b.domain_size());
}

#[test]
fn empty_and_single_edge() {
    let p = Pack::desk().unwrap();
    let s = inv(&graph(0, &[]).unwrap(), &p).unwrap();
    assert_eq!(s.structure.domain_size(), 0);
    assert!(s.parts.is_empty());
    let e = inv(&graph(2, &[(0, 1)]).unwrap(), &p).unwrap();
    let part = e.part(0, 1).unwrap();
    assert!(iso(&e.structure.induced(&part.e).unwrap().reduct(p.signature()).unwrap(), &p.a).is_iso());
    assert!(iso(&e.structure.induced(&part.f).unwrap().reduct(p.signature()).unwrap(), &p.b).is_iso());
    let ne = inv(&graph(2, &[]).unwrap(), &p).unwrap();
    let part = ne.part(0, 1).unwrap();
    assert!(iso(&ne.structure.induced(&part.e).unwrap().reduct(p.signature()).unwrap(), &p.b).is_iso());
}

#[test]
fn functoriality_small() {
    let p = Pack::desk().unwrap();
    let gs = all_graphs(4);
    assert_eq!(gs.len(), 76);
    let t = Instant::now();
    let stars: Vec<_> = gs.iter().map(|g| inv(g, &p).unwrap().structure).collect();
    let mut bad = 0;
    for i in 0..gs.len() {
        for j in i..gs.len() {
            if gs[i].domain_size() != gs[j].domain_size() { continue; }
            let l = isomorphism(&gs[i], &gs[j]).is_some();
            let r = iso(&stars[i], &stars[j]).is_iso();
            if l != r { bad += 1; }
        }
    }
    eprintln!("functoriality {:?}", t.elapsed());
    assert_eq!(bad, 0);
}

#[test]
fn round_trip_and_transfer() {
    let p = Pack::desk().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = Instant::now();
    for _ in 0..10 {
        let n = 1 + (rand::Rng::gen_range(&mut rng, 0..6));
        let g = random_graph(&mut rng, n, 0.5);
        let s = inv(&g, &p).unwrap();
        assert!(same_graph(&decode(&s.structure, &p, DecodeRoute::Both).unwrap(), &g));
        for (name, phi) in battery() {
            let star = transform_sentence(&phi, &p, Polarity::Auto).unwrap();
            assert_eq!(evaluate(&phi, &g, &[]).unwrap(), evaluate(&star, &s.structure, &[]).unwrap(), "{name}");
        }
    }
    eprintln!("roundtrip {:?}", t.elapsed());
}

#[test]
fn scott_star_small() {
    let p = Pack::desk_predicate().unwrap();
    let g = graph(3, &[(0, 1)]).unwrap();
    let t = Instant::now();
    let sg = synth_scott(&g, 1).unwrap();
    eprintln!("scott g rank {} size {}", sg.rank(), sg.dag_size());
    let ss = scott_star(&sg, &p).unwrap();
    eprintln!("scott star rank {} size {} {:?}", ss.rank(), ss.dag_size(), t.elapsed());
    for h in all_graphs(3).into_iter().filter(|h| h.domain_size() == 3) {
        let v = evaluate(&ss, &inv(&h, &p).unwrap().structure, &[]).unwrap();
        assert_eq!(v, isomorphism(&g, &h).is_some());
    }
    eprintln!("scott eval {:?}", t.elapsed());
}

#[test]
fn indices_never_read_membership() {
    let p = Pack::desk_predicate().unwrap();
    let o = SOracle::desk_predicate().unwrap();
    o.check_family(&p).unwrap();
    let before = o.membership_reads();
    let g = graph(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let ip = IndexedPresentation::from_graph(&g, &o).unwrap();
    let s = inv_from_indices(&ip, &o).unwrap();
    assert_eq!(o.membership_reads(), before);
    ip.check_complementary(&o).unwrap();
    assert_eq!(decode(&s.structure, &p, DecodeRoute::Both).unwrap(), g);
}

#[test]
fn lift_one_level() {
    let p = Pack::desk_predicate().unwrap();
    let t = Instant::now();
    let params = bnf::structures::TruncationParams { copies: 1, ..bnf::bouquet::desk_params() };
    let l = lift(&p, &bnf::bouquet::desk_tapes(), &params).unwrap();
    eprintln!("lift n={} sizes {} {} {:?}", l.pack.n, l.pack.a.domain_size(), l.pack.b.domain_size(), t.elapsed());
    assert_eq!(l.pack.n, p.n + 1);
}
