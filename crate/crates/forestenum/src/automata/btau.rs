//! The type-checking automaton: accepts exactly the valid expressions and
//! evaluates each to its type.

use super::{Dbuta, Op, StateId};
use crate::forest::{Symbol, Ty};

/// Bottom-up automaton with states `0` (forest), `1` (context) and
/// [`BTau::FAILURE`].
#[derive(Clone, Copy, Debug, Default)]
pub struct BTau;

impl BTau {
    pub const FOREST: StateId = StateId(0);
    pub const CONTEXT: StateId = StateId(1);
    pub const FAILURE: StateId = StateId(2);

    /// The type a non-failure state stands for.
    pub fn ty(q: StateId) -> Option<Ty> {
        match q {
            Self::FOREST => Some(Ty::Forest),
            Self::CONTEXT => Some(Ty::Context),
            _ => None,
        }
    }
}

impl Dbuta for BTau {
    fn leaf(&self, _: Symbol, ctx: bool, _: bool) -> StateId {
        if ctx {
            Self::CONTEXT
        } else {
            Self::FOREST
        }
    }

    fn step(&self, op: Op, l: StateId, r: StateId) -> StateId {
        match (op, l.0, r.0) {
            (Op::Hc, 0, 0) => Self::FOREST,
            (Op::Hc, 0, 1) | (Op::Hc, 1, 0) => Self::CONTEXT,
            (Op::Vc, 1, 0) => Self::FOREST,
            (Op::Vc, 1, 1) => Self::CONTEXT,
            _ => Self::FAILURE,
        }
    }

    fn is_final(&self, q: StateId) -> bool {
        q != Self::FAILURE
    }

    fn knows(&self, _: Symbol) -> bool {
        true
    }

    fn state_count(&self) -> usize {
        3
    }
}
