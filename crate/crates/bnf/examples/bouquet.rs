//! Staged bouquet structures from enumeration tapes.
//!
//! Run with `cargo run --example bouquet`.

use bnf::bouquet::{build, check_claims, desk_params, desk_tapes, final_description, EnumTape};
use bnf::structures::TruncationParams;

fn main() -> bnf::Result<()> {
    let params = desk_params();
    let tapes = desk_tapes();
    let suite = build(&tapes, params.horizon, &params)?;
    let fin = final_description(&suite)?;
    for (name, ms) in fin.structures() {
        println!("{name}: {} distinct label sets", ms.len());
    }
    println!("sizes: {:?}", fin.sizes);
    let rep = check_claims(&suite, &params)?;
    println!("claims pass: {}, separating rank {}", rep.pass(), rep.separating_rank);

    // An unbounded tape next to a finite one, under the default budget.
    let params = TruncationParams::default();
    let tapes = vec![EnumTape::unbounded(0, 0, vec![(1, 0), (2, 1)]), EnumTape::finite(1, 0, vec![(3, 0)])];
    let suite = build(&tapes, 40, &params)?;
    let rep = check_claims(&suite, &params)?;
    for (n, v) in [("1", &rep.claim1), ("2", &rep.claim2), ("3", &rep.claim3), ("4", &rep.claim4)] {
        println!("claim {n}: {} {}", v.pass, v.detail);
    }
    Ok(())
}
