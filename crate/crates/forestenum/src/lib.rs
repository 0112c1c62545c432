//! Constant-delay enumeration of MSO query answers over forests compressed
//! by forest straight-line programs (f-SLPs).
//!
//! The pipeline: a forest is compressed into an [`fslp::Fslp`]; a query given
//! as a nondeterministic stepwise tree automaton ([`automata::Nsta`]) is
//! determinized lazily into a bottom-up automaton; configuration sets and a
//! product DAG are built in time linear in the f-SLP ([`mso::ProductIndex`]);
//! answers are then enumerated as sets of preorder numbers with output-linear
//! delay ([`mso::SelectEnumerator`]). Relabelling a vertex costs time
//! proportional to the f-SLP height ([`updates`]).

pub mod automata;
pub mod error;
pub mod fixtures;
pub mod forest;
pub mod fslp;
pub mod gen;
pub mod mso;
pub mod num;
pub mod oracle;
pub mod pathenum;
pub mod updates;

pub use error::{Error, Result};
pub use num::Num;
