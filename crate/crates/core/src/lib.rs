//! Provable upper bounds on the output size of conjunctive join queries,
//! computed from per-attribute degree sequences and max tuple multiplicities.

pub mod bind;
pub mod bound;
pub mod classic;
pub mod cover;
pub mod degree;
pub mod dsb;
pub mod error;
pub mod eval;
pub mod fdsb;
pub mod oracle;
pub mod query;
pub mod rational;
pub mod simplex;
pub mod stats;
pub mod tensor;
pub mod worst_case;

pub use error::{Error, Result};
