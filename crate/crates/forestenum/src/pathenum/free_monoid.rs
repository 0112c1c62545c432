//! Path enumeration when edges carry words of length at most one and the
//! morphism of a path is the concatenation of its labels. Each answer is
//! produced in time linear in its length.
//!
//! A contracted chain is kept symbolically: the redirected edge remembers
//! the label `x` of the original edge and the chain's first vertex `u`, and
//! ε-edges on chains and right spines are skipped through precomputed
//! shortcuts. The prefix of the current path lives in a grow-only trie of
//! non-empty labels, so pushing an edge is constant work.

use crate::error::{Error, Result};

/// A DAG whose edges carry a symbol or ε (`None`).
#[derive(Clone, Debug)]
pub struct LabelledDag<L> {
    edges: Vec<Vec<(usize, Option<L>)>>,
    targets: Vec<bool>,
}

impl<L> Default for LabelledDag<L> {
    fn default() -> Self {
        LabelledDag { edges: Vec::new(), targets: Vec::new() }
    }
}

impl<L: Clone> LabelledDag<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, is_target: bool) -> usize {
        self.edges.push(Vec::new());
        self.targets.push(is_target);
        self.edges.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: Option<L>) -> Result<()> {
        if u >= self.len() || v >= self.len() {
            return Err(Error::Invalid(format!("edge {u} -> {v} names a missing vertex")));
        }
        self.edges[u].push((v, label));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn out_edges(&self, v: usize) -> &[(usize, Option<L>)] {
        &self.edges[v]
    }

    pub fn is_target(&self, v: usize) -> bool {
        self.targets[v]
    }

    fn bottom_up_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut pending: Vec<usize> = self.edges.iter().map(Vec::len).collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, es) in self.edges.iter().enumerate() {
            for (v, _) in es {
                preds[*v].push(u);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| pending[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &u in &preds[v] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(u);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::Cycle)
        }
    }
}

/// Label of a normalized edge: an optional symbol followed by the labels of
/// the contracted chain starting at `chain` (if any).
#[derive(Clone, Debug, PartialEq)]
struct EdgeLabel<L> {
    head: Option<L>,
    chain: Option<usize>,
}

#[derive(Clone, Debug)]
enum Entry {
    Pruned,
    At(usize),
    /// Outdegree one; the chain from this vertex ends at binary vertex `b`.
    Via(usize),
}

#[derive(Clone, Debug)]
struct Chain<L> {
    label: Option<L>,
    /// Successor on the chain if it also has outdegree one.
    next: Option<usize>,
    /// First vertex on the chain from here whose edge label is non-empty.
    skip: Option<usize>,
}

#[derive(Clone, Debug)]
enum BKind<L> {
    Leaf { origin: usize },
    Inner { left: (usize, EdgeLabel<L>), right: (usize, EdgeLabel<L>) },
}

/// Normalized index for free-monoid path enumeration.
#[derive(Clone, Debug)]
pub struct FmIndex<L> {
    entries: Vec<Option<Entry>>,
    chains: Vec<Option<Chain<L>>>,
    bin: Vec<BKind<L>>,
    omega: Vec<usize>,
    /// First vertex on the right spine from here whose right edge label is
    /// non-empty, or the spine's leaf.
    right_skip: Vec<usize>,
}

impl<L: Clone> FmIndex<L> {
    fn nonempty(&self, e: &EdgeLabel<L>) -> bool {
        e.head.is_some() || e.chain.is_some_and(|u| self.chains[u].as_ref().is_some_and(|c| c.skip.is_some()))
    }

    fn push_leaf(&mut self, origin: usize) -> usize {
        let id = self.bin.len();
        self.bin.push(BKind::Leaf { origin });
        self.omega.push(id);
        self.right_skip.push(id);
        id
    }

    fn push_inner(&mut self, left: (usize, EdgeLabel<L>), right: (usize, EdgeLabel<L>)) -> usize {
        let id = self.bin.len();
        let omega = self.omega[right.0];
        let skip = if self.nonempty(&right.1) { id } else { self.right_skip[right.0] };
        self.bin.push(BKind::Inner { left, right });
        self.omega.push(omega);
        self.right_skip.push(skip);
        id
    }

    fn add_vertex(&mut self, u: usize, is_target: bool, edges: &[(usize, Option<L>)]) {
        let mut out: Vec<(usize, EdgeLabel<L>)> = Vec::new();
        for (v, x) in edges {
            match self.entries[*v].as_ref().expect("bottom-up order") {
                Entry::Pruned => {}
                Entry::At(b) => out.push((*b, EdgeLabel { head: x.clone(), chain: None })),
                Entry::Via(b) => out.push((*b, EdgeLabel { head: x.clone(), chain: Some(*v) })),
            }
        }
        let entry = if is_target && out.is_empty() {
            Entry::At(self.push_leaf(u))
        } else {
            if is_target {
                let leaf = self.push_leaf(u);
                out.push((leaf, EdgeLabel { head: None, chain: None }));
            }
            match out.len() {
                0 => Entry::Pruned,
                1 => {
                    let (b, e) = out.pop().expect("one edge");
                    let next = e.chain;
                    let skip = if e.head.is_some() {
                        Some(u)
                    } else {
                        next.and_then(|n| self.chains[n].as_ref().and_then(|c| c.skip))
                    };
                    self.chains[u] = Some(Chain { label: e.head, next, skip });
                    Entry::Via(b)
                }
                d => {
                    let last = out.pop().expect("d >= 2");
                    let prev = out.pop().expect("d >= 2");
                    let mut top = self.push_inner(prev, last);
                    for _ in 0..d - 2 {
                        let left = out.pop().expect("spine");
                        top = self.push_inner(left, (top, EdgeLabel { head: None, chain: None }));
                    }
                    Entry::At(top)
                }
            }
        };
        self.entries[u] = Some(entry);
    }

    /// Appends the word denoted by an edge label to `out`.
    fn expand(&self, e: &EdgeLabel<L>, out: &mut Vec<L>) {
        if let Some(x) = &e.head {
            out.push(x.clone());
        }
        let mut w = e.chain.and_then(|u| self.chains[u].as_ref().and_then(|c| c.skip));
        while let Some(v) = w {
            let c = self.chains[v].as_ref().expect("chain vertex");
            out.push(c.label.clone().expect("skip targets carry a label"));
            w = c.next.and_then(|n| self.chains[n].as_ref().and_then(|c| c.skip));
        }
    }

    /// Opens an enumeration of all paths from `s` to a target.
    pub fn open_session(&self, s: usize) -> Result<FmSession<'_, L>> {
        let entry = self
            .entries
            .get(s)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Invalid(format!("vertex {s} is not indexed")))?;
        let mut sess = FmSession { idx: self, trie: vec![None], cursor: None, last_steps: 0, max_steps: 0 };
        let (v, gamma) = match entry {
            Entry::Pruned => return Ok(sess),
            Entry::At(b) => (*b, 0),
            Entry::Via(b) => {
                let e = EdgeLabel { head: None, chain: Some(s) };
                let g = if self.nonempty(&e) { sess.push(0, e) } else { 0 };
                (*b, g)
            }
        };
        sess.cursor = Some(FmCursor { v, gamma, stack: Vec::new(), print: true });
        Ok(sess)
    }
}

/// Builds the free-monoid index for `dag`.
pub fn preprocess_free<L: Clone>(dag: &LabelledDag<L>) -> Result<FmIndex<L>> {
    let order = dag.bottom_up_order()?;
    let n = dag.len();
    let mut idx = FmIndex {
        entries: vec![None; n],
        chains: vec![None; n],
        bin: Vec::new(),
        omega: Vec::new(),
        right_skip: Vec::new(),
    };
    for u in order {
        idx.add_vertex(u, dag.is_target(u), dag.out_edges(u));
    }
    Ok(idx)
}

#[derive(Clone, Debug)]
struct FmCursor {
    v: usize,
    gamma: usize,
    stack: Vec<(usize, usize)>,
    print: bool,
}

/// A running free-monoid path enumeration.
#[derive(Clone, Debug)]
pub struct FmSession<'a, L> {
    idx: &'a FmIndex<L>,
    /// Trie of non-empty edge labels; node 0 is the empty word.
    trie: Vec<Option<(usize, EdgeLabel<L>)>>,
    cursor: Option<FmCursor>,
    last_steps: u64,
    max_steps: u64,
}

impl<L: Clone> FmSession<'_, L> {
    fn push(&mut self, parent: usize, e: EdgeLabel<L>) -> usize {
        self.trie.push(Some((parent, e)));
        self.trie.len() - 1
    }

    /// Work units (loop iterations plus emitted symbols) of the last call.
    pub fn last_steps(&self) -> u64 {
        self.last_steps
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    fn emit(&self, v: usize, gamma: usize) -> (usize, Vec<L>) {
        let idx = self.idx;
        let mut labels = Vec::new();
        let mut t = gamma;
        while let Some((p, e)) = &self.trie[t] {
            labels.push(e);
            t = *p;
        }
        let mut word = Vec::new();
        for e in labels.into_iter().rev() {
            idx.expand(e, &mut word);
        }
        let mut w = idx.right_skip[v];
        while let BKind::Inner { right, .. } = &idx.bin[w] {
            idx.expand(&right.1, &mut word);
            w = idx.right_skip[right.0];
        }
        let BKind::Leaf { origin } = idx.bin[idx.omega[v]] else { unreachable!("omega is a leaf") };
        (origin, word)
    }

    /// The next `(target, word)` pair, or `None` at the end.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<(usize, Vec<L>)> {
        let mut cur = self.cursor.take()?;
        let idx = self.idx;
        let mut steps = 0u64;
        let mut finished = false;
        let out = loop {
            steps += 1;
            let out = cur.print.then(|| self.emit(cur.v, cur.gamma));
            cur.print = true;
            match &idx.bin[cur.v] {
                BKind::Inner { left, right } => {
                    if matches!(idx.bin[right.0], BKind::Inner { .. }) {
                        let g = if idx.nonempty(&right.1) { self.push(cur.gamma, right.1.clone()) } else { cur.gamma };
                        cur.stack.push((right.0, g));
                    }
                    if idx.nonempty(&left.1) {
                        cur.gamma = self.push(cur.gamma, left.1.clone());
                    }
                    cur.v = left.0;
                }
                BKind::Leaf { .. } => match cur.stack.pop() {
                    Some((w, g)) => {
                        cur.v = w;
                        cur.gamma = g;
                        cur.print = false;
                    }
                    None => finished = true,
                },
            }
            if out.is_some() || finished {
                break out;
            }
        };
        if !finished {
            self.cursor = Some(cur);
        }
        let total = steps + out.as_ref().map_or(0, |(_, w)| w.len() as u64);
        self.last_steps = total;
        self.max_steps = self.max_steps.max(total);
        out
    }
}

impl<L: Clone> Iterator for FmSession<'_, L> {
    type Item = (usize, Vec<L>);

    fn next(&mut self) -> Option<Self::Item> {
        FmSession::next(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(d: &LabelledDag<char>, s: usize) -> Vec<(usize, Vec<char>)> {
        let mut out = Vec::new();
        let mut stack = vec![(s, Vec::new())];
        while let Some((v, w)) = stack.pop() {
            if d.is_target(v) {
                out.push((v, w.clone()));
            }
            for (t, x) in d.out_edges(v) {
                let mut w2 = w.clone();
                w2.extend(x.iter().copied());
                stack.push((*t, w2));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn chains_with_epsilon_runs() {
        let mut d = LabelledDag::new();
        let v: Vec<usize> = (0..9).map(|i| d.add_vertex(i == 8 || i == 5)).collect();
        d.add_edge(v[0], v[1], None).unwrap();
        d.add_edge(v[1], v[2], Some('a')).unwrap();
        d.add_edge(v[2], v[3], None).unwrap();
        d.add_edge(v[3], v[4], None).unwrap();
        d.add_edge(v[4], v[5], Some('b')).unwrap();
        d.add_edge(v[5], v[6], None).unwrap();
        d.add_edge(v[5], v[7], Some('c')).unwrap();
        d.add_edge(v[6], v[8], Some('d')).unwrap();
        d.add_edge(v[7], v[8], None).unwrap();
        d.add_edge(v[0], v[8], None).unwrap();
        let idx = preprocess_free(&d).unwrap();
        for s in 0..9 {
            let mut got: Vec<_> = idx.open_session(s).unwrap().collect();
            got.sort();
            assert_eq!(got, naive(&d, s), "source {s}");
        }
    }
}
