//! Tree automata: nondeterministic stepwise automata (the query language),
//! their lazy determinization into bottom-up automata over forest-algebra
//! expressions, the type-checking automaton and the multi-variable reduction.

pub mod btau;
pub mod multivar;
pub mod nsta;
pub mod subset;

pub use btau::BTau;
pub use nsta::Nsta;
pub use subset::{SubsetDbuta, SubsetState};

use crate::error::{Error, Result};
use crate::forest::{Expr, ExprNode, Symbol};

/// A state of a deterministic bottom-up automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

/// The two binary operations of the forest algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// Horizontal concatenation `⊖`.
    Hc,
    /// Vertical concatenation `⊘`.
    Vc,
}

/// A deterministic bottom-up automaton over forest-algebra expressions
/// whose leaves carry a selection bit. Implementations may materialize
/// states lazily behind interior synchronization.
pub trait Dbuta: Send + Sync {
    /// State of a leaf `a` (`ctx = false`) or `a(∗)` (`ctx = true`).
    fn leaf(&self, a: Symbol, ctx: bool, selected: bool) -> StateId;
    fn step(&self, op: Op, left: StateId, right: StateId) -> StateId;
    fn is_final(&self, q: StateId) -> bool;
    /// Whether `a` belongs to the automaton's alphabet.
    fn knows(&self, a: Symbol) -> bool;
    /// Number of states materialized so far.
    fn state_count(&self) -> usize;
}

/// Runs `b` on `e` where leaf `i` (left to right) is selected iff
/// `selected[i]`.
pub fn dbuta_run<D: Dbuta + ?Sized>(b: &D, e: &Expr, selected: &[bool]) -> Result<StateId> {
    if selected.len() != e.leaf_count() {
        return Err(Error::Invalid(format!(
            "{} selection bits for {} leaves",
            selected.len(),
            e.leaf_count()
        )));
    }
    let mut states = Vec::with_capacity(e.len());
    let mut leaf = 0;
    for n in e.nodes() {
        let q = match *n {
            ExprNode::Leaf(a) | ExprNode::LeafCtx(a) => {
                let q = b.leaf(a, matches!(n, ExprNode::LeafCtx(_)), selected[leaf]);
                leaf += 1;
                q
            }
            ExprNode::Hc(l, r) => b.step(Op::Hc, states[l], states[r]),
            ExprNode::Vc(l, r) => b.step(Op::Vc, states[l], states[r]),
        };
        states.push(q);
    }
    states.pop().ok_or_else(|| Error::InvalidExpression("empty expression".into()))
}
