//! Witness schedules, sort structures and family extraction.
//!
//! Run with `cargo run --example spectrum`.

use bnf::bouquet::EnumTape;
use bnf::jumpinv::{Pack, SOracle};
use bnf::spectrum::*;

fn main() -> bnf::Result<()> {
    let pack = Pack::desk_predicate()?;
    let oracle = SOracle::desk_predicate()?;

    // The standard single-point picture.
    let sched = WitnessSchedule::figure_one();
    let sort = materialize_sort(&sched, &oracle)?;
    let ex = extract_agreeing(&sort, &pack, &sched)?;
    for (name, set) in &ex.sets {
        println!("{name}: codes {set:?}, witnesses {:?}", ex.witnesses[name]);
    }

    // A full sort for X = {0, 2} and W_k enumerating 0 at stage 1.
    let wk = EnumTape::finite(1, 0, vec![(1, 0)]);
    let input = SortInput { k: 1, x: [0, 2].into_iter().collect(), wk, horizon: 4, m: 2 };
    let (sort, sched, trace) = build_sort(&input, &oracle)?;
    for line in trace.json_lines(&sched).lines().take(4) {
        println!("{line}");
    }
    let ex = extract_agreeing(&sort, &pack, &sched)?;
    let rep = check_family(&ex.family(), &w_final(&input.wk), input.m);
    println!("family check pass {}: {} sets, missing {:?}", rep.pass, rep.extracted, rep.missing);
    println!("membership reads: {}", oracle.membership_reads());
    Ok(())
}
