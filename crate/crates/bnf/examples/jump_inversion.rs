//! Graph to star structure and back, plus sentence transfer.
//!
//! Run with `cargo run --example jump_inversion`.

use bnf::formulas::evaluate;
use bnf::jumpinv::{battery, decode, graph, inv, transform_sentence, DecodeRoute, Pack, Polarity};

fn main() -> bnf::Result<()> {
    let pack = Pack::desk()?;
    let g = graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1)])?;
    let star = inv(&g, &pack)?;
    println!("inv(path3): {} elements, {} parts", star.structure.domain_size(), star.parts.len());
    let back = decode(&star.structure, &pack, DecodeRoute::Both)?;
    println!("decodes to the input: {}", back == g);

    for (name, phi) in battery() {
        let t = transform_sentence(&phi, &pack, Polarity::Auto)?;
        let (l, r) = (evaluate(&phi, &g, &[])?, evaluate(&t, &star.structure, &[])?);
        println!("{name:>32}: {} -> {}  graph {l}, star {r}", phi.rank(), t.rank());
    }
    Ok(())
}
