//! Restricted set-partition counting sequences in exact and modular
//! arithmetic, with recurrence and period witnesses.

pub mod arith;
pub mod cex;
pub mod error;
pub mod hiprec;
pub mod modeng;
pub mod oeisio;
pub mod oracle;
pub mod seqcore;
pub mod sizeset;
pub mod witness;
pub mod zmod;

pub use error::{Error, Result};
pub use seqcore::{eval_exact, eval_exact_range, Family, KMode, SequenceSpec};
pub use sizeset::SizeSet;
