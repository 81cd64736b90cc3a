//! Type formulas, separating sentences and Scott sentences.
//!
//! Run with `cargo run --example synthesis`.

use bnf::formulas::evaluate;
use bnf::formulas::to_sexp;
use bnf::formulas::synth::{synth_scott, synth_separating, synth_type_formula};
use bnf::jumpinv::graph;

fn main() -> bnf::Result<()> {
    let path = graph(3, &[(0, 1), (1, 0), (1, 2), (2, 1)])?;
    let star = graph(4, &[(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)])?;
    let corpus = vec![path.clone(), star.clone()];

    let phi = synth_type_formula(&corpus, 0, &[1], 2)?;
    println!("Pi_2 type of the path middle: rank {}, {} dag nodes", phi.rank(), phi.dag_size());
    for (k, s) in corpus.iter().enumerate() {
        for v in 0..s.domain_size() as u32 {
            println!("  structure {k} vertex {v}: {}", evaluate(&phi, s, &[v])?);
        }
    }

    let sep = synth_separating(&path, &star, 1)?;
    println!("separating sentence, rank {}: {}", sep.rank(), to_sexp(&sep));
    println!("  path {}, star {}", evaluate(&sep, &path, &[])?, evaluate(&sep, &star, &[])?);

    let scott = synth_scott(&path, 2)?;
    println!("Scott sentence of path3: rank {}, {} dag nodes", scott.rank(), scott.dag_size());
    let renumbered = path.renumber(&[2, 0, 1])?;
    println!("  renumbered copy {}, star {}", evaluate(&scott, &renumbered, &[])?, evaluate(&scott, &star, &[])?);
    Ok(())
}
