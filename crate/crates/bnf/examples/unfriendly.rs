//! A structure whose first-level back-and-forth relations encode a table.
//!
//! Run with `cargo run --example unfriendly`.

use bnf::jumpinv::SOracle;
use bnf::spectrum::{build_unfriendly, unfriendly_verdicts, UnfriendlyIndices};
use std::collections::BTreeMap;

fn main() -> bnf::Result<()> {
    let oracle = SOracle::desk_predicate()?;
    let table: BTreeMap<u32, bool> = (0..6).map(|k| (k, k % 3 != 1)).collect();
    let ix = UnfriendlyIndices::from_table(&table, 2, &oracle)?;
    let m = build_unfriendly(&ix, &oracle)?;
    println!("structure has {} elements", m.structure.domain_size());
    let verdicts = unfriendly_verdicts(&m, 1)?;
    for (k, u) in &table {
        println!("k={k}: U(k)={u}  (M, a*) >=_1 (M, a_k): {}", verdicts[k]);
    }
    println!("table recovered: {}", verdicts == table);
    Ok(())
}
