//! Back-and-forth preorder on a handful of small graphs.
//!
//! Run with `cargo run --example back_and_forth`.

use bnf::backforth::{BfConfig, BfQuery, BfTable};
use bnf::jumpinv::graph;

fn main() -> bnf::Result<()> {
    let structs = vec![
        ("edge", graph(2, &[(0, 1), (1, 0)])?),
        ("two points", graph(2, &[])?),
        ("path3", graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1)])?),
        ("triangle", graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])?),
    ];
    let table = BfTable::with_structures(structs.iter().map(|(_, s)| s.clone()), BfConfig::default())?;

    for level in 0..=2 {
        println!("level {level}: row <=_{level} column");
        for (i, (a, _)) in structs.iter().enumerate() {
            let row: Vec<&str> = (0..structs.len())
                .map(|j| if table.leq_structures(i, j, level).unwrap() { "x" } else { "." })
                .collect();
            println!("  {a:>10}  {}", row.join(" "));
        }
    }

    // Tuples: the middle of path3 against an endpoint.
    let q = BfQuery::new(2, vec![1], 2, vec![0], 1);
    println!("(path3, middle) <=_1 (path3, end): {}", table.leq(&q)?);
    let q = BfQuery::new(2, vec![0], 2, vec![1], 1);
    println!("(path3, end) <=_1 (path3, middle): {}", table.leq(&q)?);
    println!("{:?}", table.stats());
    Ok(())
}
