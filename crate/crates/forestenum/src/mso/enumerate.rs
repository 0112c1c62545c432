//! Witness-tree enumeration.
//!
//! A witness tree alternates unary nodes, labelled by active configurations,
//! and useful configurations below them. A unary node's child is drawn from
//! a path session over the product DAG that stays open (frozen) while the
//! node is part of the current tree. A useful configuration of an inner
//! f-SLP node is binary: its children come from its `succ^a` list. Trees
//! are produced in lexicographic order: the last node in preorder that has
//! a further choice advances, every node after it is rebuilt with minimal
//! choices.

use super::ProductIndex;
use crate::error::{Error, Result};
use crate::forest::Ty;
use crate::fslp::{Dir, Fslp, NodeId, Pod, PreorderEffect};
use crate::num::Num;
use crate::pathenum::PathSession;

enum Kind<'a> {
    Unary {
        session: PathSession<'a, PreorderEffect>,
        /// The child currently chosen: a useful configuration and the
        /// morphism of the product path leading to it.
        current: (u32, PreorderEffect),
        ahead: Option<(usize, PreorderEffect)>,
    },
    /// A useful configuration; `choice` indexes its `succ^a` list.
    Useful { pid: u32, choice: u32 },
}

struct WNode<'a> {
    kind: Kind<'a>,
    parent: Option<u32>,
    /// Whether this node is the left child of a binary node.
    is_left: bool,
    /// Composed effect from the witness root to this node.
    acc: PreorderEffect,
    /// Last non-maximal node strictly before this one in preorder.
    prev_nonmax: Option<u32>,
}

enum Pending {
    Unary { pid: u32, parent: Option<u32>, is_left: bool, acc: PreorderEffect },
    Useful { pid: u32, parent: u32, acc: PreorderEffect },
}

/// Streams `select(A, ⟦A⟧)` as sets of preorder numbers.
pub struct SelectEnumerator<'a> {
    idx: &'a ProductIndex,
    roots: Vec<u32>,
    next_root: usize,
    pending_empty: bool,
    nodes: Vec<WNode<'a>>,
    last_nonmax: Option<u32>,
    steps: u64,
    last_steps: u64,
    max_steps: u64,
    max_tree_ratio: f64,
}

impl<'a> SelectEnumerator<'a> {
    /// Opens the enumeration for forest node `a` of `g`, which `idx` must
    /// have been built for.
    pub fn new(idx: &'a ProductIndex, g: &Fslp, a: NodeId) -> Result<Self> {
        if a.index() >= idx.node_count() || a.index() >= g.len() {
            return Err(Error::Invalid(format!("unknown node {}", a.0)));
        }
        if g.ty(a) != Ty::Forest {
            return Err(Error::Invalid(format!("node {} denotes a context, not a forest", a.0)));
        }
        let roots = idx.active(a).filter(|&p| idx.product_vertex(p).is_final).collect();
        Ok(SelectEnumerator {
            idx,
            roots,
            next_root: 0,
            pending_empty: idx.empty_is_answer(a),
            nodes: Vec::new(),
            last_nonmax: None,
            steps: 0,
            last_steps: 0,
            max_steps: 0,
            max_tree_ratio: 0.0,
        })
    }

    /// Work units spent on the most recent answer: tree nodes built,
    /// ancestors visited, path-session loop iterations and emitted numbers.
    pub fn last_steps(&self) -> u64 {
        self.last_steps
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    /// Size of the current witness tree.
    pub fn tree_size(&self) -> usize {
        self.nodes.len()
    }

    /// Largest `|W| / (4|S| − 2)` seen so far.
    pub fn max_tree_ratio(&self) -> f64 {
        self.max_tree_ratio
    }

    fn is_maximal(&self, n: &WNode<'_>) -> bool {
        match &n.kind {
            Kind::Unary { ahead, .. } => ahead.is_none(),
            Kind::Useful { pid, choice } => {
                let len = self.idx.succ(*pid).len() as u32;
                len == 0 || choice + 1 == len
            }
        }
    }

    fn push_node(&mut self, n: WNode<'a>) -> u32 {
        let id = self.nodes.len() as u32;
        let nonmax = !self.is_maximal(&n);
        self.nodes.push(WNode { prev_nonmax: self.last_nonmax, ..n });
        if nonmax {
            self.last_nonmax = Some(id);
        }
        self.steps += 1;
        id
    }

    fn children_of_useful(&self, id: u32, stack: &mut Vec<Pending>) {
        let n = &self.nodes[id as usize];
        let Kind::Useful { pid, choice } = n.kind else { unreachable!("useful node") };
        let Some(&(p1, p2)) = self.idx.succ(pid).get(choice as usize) else { return };
        let v = self.idx.product_vertex(pid).node;
        let eff = |d| self.idx.edge_effect(v, d).expect("inner node");
        stack.push(Pending::Unary { pid: p2, parent: Some(id), is_left: false, acc: n.acc.then_unchecked(eff(Dir::Right)) });
        stack.push(Pending::Unary { pid: p1, parent: Some(id), is_left: true, acc: n.acc.then_unchecked(eff(Dir::Left)) });
    }

    /// Completes the tree with minimal choices below the pending slots.
    fn complete(&mut self, mut stack: Vec<Pending>) {
        while let Some(p) = stack.pop() {
            match p {
                Pending::Unary { pid, parent, is_left, acc } => {
                    let mut session = self.idx.paths().open_session(pid as usize).expect("indexed vertex");
                    let first = session.next().expect("active configurations reach a useful one");
                    self.steps += session.last_steps();
                    let ahead = session.next();
                    self.steps += session.last_steps() + 1;
                    let child_acc = acc.then_unchecked(&first.1);
                    let id = self.push_node(WNode {
                        kind: Kind::Unary { session, current: (first.0 as u32, first.1), ahead },
                        parent,
                        is_left,
                        acc,
                        prev_nonmax: None,
                    });
                    stack.push(Pending::Useful { pid: first.0 as u32, parent: id, acc: child_acc });
                }
                Pending::Useful { pid, parent, acc } => {
                    let id = self.push_node(WNode {
                        kind: Kind::Useful { pid, choice: 0 },
                        parent: Some(parent),
                        is_left: false,
                        acc,
                        prev_nonmax: None,
                    });
                    self.children_of_useful(id, &mut stack);
                }
            }
        }
    }

    /// Advances node `i` to its next choice and rebuilds everything after it.
    fn advance(&mut self, i: u32) {
        self.nodes.truncate(i as usize + 1);
        let mut stack = Vec::new();
        // Right children of binary ancestors whose left subtree holds node
        // `i`; the nearest one is completed first.
        let mut j = i;
        let mut later = Vec::new();
        while let Some(p) = self.nodes[j as usize].parent {
            self.steps += 1;
            if self.nodes[j as usize].is_left {
                later.push(p);
            }
            j = p;
        }
        for &p in later.iter().rev() {
            let n = &self.nodes[p as usize];
            let Kind::Useful { pid, choice } = n.kind else { unreachable!("binary parent") };
            let (_, p2) = self.idx.succ(pid)[choice as usize];
            let v = self.idx.product_vertex(pid).node;
            let acc = n.acc.then_unchecked(self.idx.edge_effect(v, Dir::Right).expect("inner node"));
            stack.push(Pending::Unary { pid: p2, parent: Some(p), is_left: false, acc });
        }
        let node = &mut self.nodes[i as usize];
        let prev = node.prev_nonmax;
        match &mut node.kind {
            Kind::Unary { session, current, ahead } => {
                let (t, m) = ahead.take().expect("non-maximal unary node");
                *ahead = session.next();
                self.steps += session.last_steps() + 1;
                *current = (t as u32, m);
                let child_acc = node.acc.then_unchecked(&current.1);
                stack.push(Pending::Useful { pid: t as u32, parent: i, acc: child_acc });
            }
            Kind::Useful { choice, .. } => *choice += 1,
        }
        if matches!(self.nodes[i as usize].kind, Kind::Useful { .. }) {
            self.children_of_useful(i, &mut stack);
        }
        self.last_nonmax = if self.is_maximal(&self.nodes[i as usize]) { prev } else { Some(i) };
        self.complete(stack);
    }

    fn emit(&mut self) -> Vec<Num> {
        let mut out = Vec::new();
        for n in &self.nodes {
            if let Kind::Useful { pid, .. } = n.kind {
                if self.idx.succ(pid).is_empty() {
                    let pod = n.acc.apply(&Pod::root(Ty::Forest)).expect("forest-rooted effect");
                    out.push(pod.x().clone());
                }
            }
        }
        self.steps += out.len() as u64;
        let bound = 4 * out.len() - 2;
        assert!(self.nodes.len() <= bound, "witness tree with {} nodes for {} leaves", self.nodes.len(), out.len());
        self.max_tree_ratio = self.max_tree_ratio.max(self.nodes.len() as f64 / bound as f64);
        out
    }

    fn finish_answer(&mut self, out: Vec<Num>) -> Vec<Num> {
        self.last_steps = self.steps;
        self.max_steps = self.max_steps.max(self.steps);
        self.steps = 0;
        out
    }

    /// The next answer, or `None` once all answers have been produced.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<Vec<Num>> {
        self.steps = 0;
        if self.pending_empty {
            self.pending_empty = false;
            self.steps = 1;
            return Some(self.finish_answer(Vec::new()));
        }
        if !self.nodes.is_empty() {
            if let Some(i) = self.last_nonmax {
                self.advance(i);
                let out = self.emit();
                return Some(self.finish_answer(out));
            }
            self.nodes.clear();
        }
        let &root = self.roots.get(self.next_root)?;
        self.next_root += 1;
        self.last_nonmax = None;
        self.complete(vec![Pending::Unary {
            pid: root,
            parent: None,
            is_left: false,
            acc: PreorderEffect::identity(Ty::Forest),
        }]);
        let out = self.emit();
        Some(self.finish_answer(out))
    }
}

impl Iterator for SelectEnumerator<'_> {
    type Item = Vec<Num>;

    fn next(&mut self) -> Option<Vec<Num>> {
        SelectEnumerator::next(self)
    }
}

/// Collects every answer for node `a`.
pub fn enumerate_select(idx: &ProductIndex, g: &Fslp, a: NodeId) -> Result<Vec<Vec<Num>>> {
    Ok(SelectEnumerator::new(idx, g, a)?.collect())
}
