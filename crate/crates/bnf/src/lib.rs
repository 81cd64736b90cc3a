//! Back-and-forth relations, formula synthesis and the structure
//! constructions built on them, all over explicit finite structures.

pub mod backforth;
pub mod bouquet;
pub mod cli;
pub mod error;
pub mod formulas;
pub mod jumpinv;
pub mod spectrum;
pub mod structures;
pub mod suites;
pub mod symmetry;
pub mod verify;

pub use error::{BnfError, Result};
