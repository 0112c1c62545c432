//! Lazy determinization of an nSTA into a bottom-up automaton over
//! forest-algebra expressions.
//!
//! A forest state is the set of pairs `⟨p1, p2⟩` such that the forest has a
//! `(p1, p2)`-run. A context state is a set of quadruples
//! `⟨p1, p2, p3, p4⟩`: the context has a `(p1, p2)`-run whenever the forest
//! plugged into the hole has a `(p3, p4)`-run. Pairs are packed into `u16`
//! and quadruples into `u32` (one byte per state), kept sorted and
//! deduplicated so that equal sets intern to the same id.

use std::collections::HashMap;
use std::sync::Mutex;

use super::{Dbuta, Nsta, Op, StateId};
use crate::forest::Symbol;

/// A state of [`SubsetDbuta`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SubsetState {
    /// The sink reached by ill-typed combinations.
    Failure,
    /// A set of pairs `p1 << 8 | p2`.
    Pairs(Vec<u16>),
    /// A set of quadruples `p1 << 24 | p2 << 16 | p3 << 8 | p4`.
    Quads(Vec<u32>),
}

fn pair(p1: u32, p2: u32) -> u16 {
    (p1 << 8 | p2) as u16
}

fn unpair(x: u16) -> (u32, u32) {
    (u32::from(x >> 8), u32::from(x & 0xff))
}

fn quad(p1: u32, p2: u32, p3: u32, p4: u32) -> u32 {
    p1 << 24 | p2 << 16 | p3 << 8 | p4
}

fn unquad(x: u32) -> (u32, u32, u32, u32) {
    (x >> 24, x >> 16 & 0xff, x >> 8 & 0xff, x & 0xff)
}

fn canon<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v.dedup();
    v
}

impl SubsetState {
    /// Pairs as `(p1, p2)`; empty for other states.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        match self {
            SubsetState::Pairs(v) => v.iter().map(|&x| unpair(x)).collect(),
            _ => Vec::new(),
        }
    }

    /// Quadruples; empty for other states.
    pub fn quads(&self) -> Vec<(u32, u32, u32, u32)> {
        match self {
            SubsetState::Quads(v) => v.iter().map(|&x| unquad(x)).collect(),
            _ => Vec::new(),
        }
    }
}

/// Groups a sorted pair set by first component: `out[p1]` lists the `p2`.
fn by_first(ps: &[u16], m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); m];
    for &x in ps {
        let (a, b) = unpair(x);
        out[a as usize].push(b);
    }
    out
}

/// Membership table for a pair set.
fn pair_table(ps: &[u16], m: usize) -> Vec<bool> {
    let mut t = vec![false; m * m];
    for &x in ps {
        let (a, b) = unpair(x);
        t[a as usize * m + b as usize] = true;
    }
    t
}

fn delta2(m: usize, op: Op, l: &SubsetState, r: &SubsetState) -> SubsetState {
    use SubsetState::*;
    match (op, l, r) {
        (Op::Hc, Pairs(p1), Pairs(p2)) => {
            let next = by_first(p2, m);
            let mut out = Vec::new();
            for &x in p1 {
                let (a, b) = unpair(x);
                out.extend(next[b as usize].iter().map(|&c| pair(a, c)));
            }
            Pairs(canon(out))
        }
        (Op::Hc, Pairs(p1), Quads(q2)) => {
            let mut prev = vec![Vec::new(); m];
            for &x in p1 {
                let (a, b) = unpair(x);
                prev[b as usize].push(a);
            }
            let mut out = Vec::new();
            for &x in q2 {
                let (b, c, s, t) = unquad(x);
                out.extend(prev[b as usize].iter().map(|&a| quad(a, c, s, t)));
            }
            Quads(canon(out))
        }
        (Op::Hc, Quads(q1), Pairs(p2)) => {
            let next = by_first(p2, m);
            let mut out = Vec::new();
            for &x in q1 {
                let (a, b, s, t) = unquad(x);
                out.extend(next[b as usize].iter().map(|&c| quad(a, c, s, t)));
            }
            Quads(canon(out))
        }
        (Op::Vc, Quads(q1), Pairs(p2)) => {
            let t = pair_table(p2, m);
            let out = q1
                .iter()
                .filter_map(|&x| {
                    let (a, b, s, u) = unquad(x);
                    t[s as usize * m + u as usize].then(|| pair(a, b))
                })
                .collect();
            Pairs(canon(out))
        }
        (Op::Vc, Quads(q1), Quads(q2)) => {
            let mut next: HashMap<u16, Vec<u16>> = HashMap::new();
            for &x in q2 {
                let (s, u, v, w) = unquad(x);
                next.entry(pair(s, u)).or_default().push(pair(v, w));
            }
            let mut out = Vec::new();
            for &x in q1 {
                let (a, b, s, u) = unquad(x);
                if let Some(inner) = next.get(&pair(s, u)) {
                    out.extend(inner.iter().map(|&y| {
                        let (v, w) = unpair(y);
                        quad(a, b, v, w)
                    }));
                }
            }
            Quads(canon(out))
        }
        _ => Failure,
    }
}

#[derive(Default)]
struct Tables {
    states: Vec<SubsetState>,
    ids: HashMap<SubsetState, StateId>,
    leaves: HashMap<(Symbol, bool, bool), StateId>,
    steps: HashMap<(Op, StateId, StateId), StateId>,
}

impl Tables {
    fn intern(&mut self, s: SubsetState) -> StateId {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = StateId(u32::try_from(self.states.len()).expect("state count fits u32"));
        self.states.push(s.clone());
        self.ids.insert(s, id);
        id
    }
}

/// The determinized automaton. Transitions are computed on first use and
/// memoized; results do not depend on the order in which states are
/// discovered except for the numbering of ids.
pub struct SubsetDbuta {
    nsta: Nsta,
    tables: Mutex<Tables>,
    final_pair: u16,
}

impl SubsetDbuta {
    /// The failure state always has id 0.
    pub const FAILURE: StateId = StateId(0);

    pub fn new(nsta: Nsta) -> SubsetDbuta {
        let mut t = Tables::default();
        t.intern(SubsetState::Failure);
        let final_pair = pair(nsta.init(), nsta.fin());
        SubsetDbuta { nsta, tables: Mutex::new(t), final_pair }
    }

    pub fn nsta(&self) -> &Nsta {
        &self.nsta
    }

    /// The subset a state id stands for.
    pub fn state(&self, q: StateId) -> SubsetState {
        self.lock().states[q.0 as usize].clone()
    }

    /// `2^{m²} + 2^{m⁴} + 1`, saturating at `u128::MAX`.
    pub fn state_bound(&self) -> u128 {
        let m = self.nsta.states();
        let pow = |e: u32| if e >= 128 { u128::MAX } else { 1u128 << e };
        pow(m * m).saturating_add(pow(m.saturating_pow(4))).saturating_add(1)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Tables> {
        self.tables.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn leaf_state(&self, a: Symbol, ctx: bool, selected: bool) -> SubsetState {
        let iota = self.nsta.iota(a, selected);
        if iota.is_empty() {
            return if ctx { SubsetState::Quads(Vec::new()) } else { SubsetState::Pairs(Vec::new()) };
        }
        if ctx {
            let mut out = Vec::new();
            for &(p1, p4, p2) in self.nsta.transitions() {
                out.extend(iota.iter().map(|&p3| quad(p1, p2, p3, p4)));
            }
            SubsetState::Quads(canon(out))
        } else {
            let out = self
                .nsta
                .transitions()
                .iter()
                .filter(|&&(_, q, _)| iota.binary_search(&q).is_ok())
                .map(|&(p1, _, p2)| pair(p1, p2))
                .collect();
            SubsetState::Pairs(canon(out))
        }
    }
}

impl Dbuta for SubsetDbuta {
    fn leaf(&self, a: Symbol, ctx: bool, selected: bool) -> StateId {
        if let Some(&q) = self.lock().leaves.get(&(a, ctx, selected)) {
            return q;
        }
        let s = self.leaf_state(a, ctx, selected);
        let mut t = self.lock();
        let q = t.intern(s);
        t.leaves.insert((a, ctx, selected), q);
        q
    }

    fn step(&self, op: Op, left: StateId, right: StateId) -> StateId {
        let (l, r) = {
            let t = self.lock();
            if let Some(&q) = t.steps.get(&(op, left, right)) {
                return q;
            }
            (t.states[left.0 as usize].clone(), t.states[right.0 as usize].clone())
        };
        let s = delta2(self.nsta.states() as usize, op, &l, &r);
        let mut t = self.lock();
        let q = t.intern(s);
        t.steps.insert((op, left, right), q);
        debug_assert!((t.states.len() as u128) <= self.state_bound());
        q
    }

    fn is_final(&self, q: StateId) -> bool {
        match &self.lock().states[q.0 as usize] {
            SubsetState::Pairs(v) => v.binary_search(&self.final_pair).is_ok(),
            _ => false,
        }
    }

    fn knows(&self, a: Symbol) -> bool {
        self.nsta.knows(a)
    }

    fn state_count(&self) -> usize {
        self.lock().states.len()
    }
}

#[cfg(test)]
mod tests {
    use super::super::dbuta_run;
    use super::super::nsta::library::select_one_any;
    use super::*;
    use crate::forest::{eval_expr, parse_term, Alphabet, Expr};

    #[test]
    fn undefined_combinations_fail() {
        let b = SubsetDbuta::new(select_one_any());
        let a = Symbol(0);
        let f = b.leaf(a, false, false);
        let c = b.leaf(a, true, false);
        assert_eq!(b.step(Op::Vc, f, f), SubsetDbuta::FAILURE);
        assert_eq!(b.step(Op::Vc, f, c), SubsetDbuta::FAILURE);
        assert_eq!(b.step(Op::Hc, c, c), SubsetDbuta::FAILURE);
        assert_eq!(b.step(Op::Hc, SubsetDbuta::FAILURE, f), SubsetDbuta::FAILURE);
        assert!(!b.is_final(SubsetDbuta::FAILURE));
    }

    #[test]
    fn trivial_automaton_reaches_few_states() {
        let b = SubsetDbuta::new(Nsta::new(1, 0, 0).unwrap());
        let a = Symbol(0);
        let mut frontier = vec![b.leaf(a, false, false), b.leaf(a, true, false), b.leaf(a, false, true)];
        frontier.push(b.leaf(a, true, true));
        loop {
            let before = b.state_count();
            let n = before as u32;
            for l in 0..n {
                for r in 0..n {
                    b.step(Op::Hc, StateId(l), StateId(r));
                    b.step(Op::Vc, StateId(l), StateId(r));
                }
            }
            if b.state_count() == before {
                break;
            }
        }
        assert!(b.state_count() <= 3, "{} states", b.state_count());
        assert_eq!(b.state_bound(), 2 + 2 + 1);
    }

    #[test]
    fn interning_is_canonical() {
        let b = SubsetDbuta::new(select_one_any());
        let a = Symbol(3);
        let x = b.leaf(a, false, true);
        let y = b.step(Op::Hc, b.leaf(a, false, false), x);
        let z = b.step(Op::Hc, x, b.leaf(a, false, false));
        assert_eq!(y, z);
        assert_eq!(b.state(y), b.state(x));
    }

    #[test]
    fn agrees_with_runs_on_a_small_expression() {
        let mut al = Alphabet::new();
        let a = al.intern("a");
        let e = Expr::hc(Expr::vc(Expr::leaf_ctx(a), Expr::leaf(a)), Expr::leaf(a));
        let f = eval_expr(&e).unwrap();
        assert_eq!(f.forest(), &parse_term("a(a)a", &mut al).unwrap());
        let n = select_one_any();
        let b = SubsetDbuta::new(n.clone());
        for mask in 0..8u32 {
            let sel: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let verts: Vec<usize> = (0..3).filter(|&i| sel[i]).collect();
            let q = dbuta_run(&b, &e, &sel).unwrap();
            // Leaf order equals preorder here.
            assert_eq!(b.is_final(q), n.accepts(f.forest(), &verts), "mask {mask}");
        }
    }
}
