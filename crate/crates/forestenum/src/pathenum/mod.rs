//! Constant-delay enumeration of all paths from a source vertex to the
//! target vertices of a DAG whose edges are decorated with morphisms of a
//! category. Each answer is the endpoint of a path together with the
//! composition of the morphisms along it.
//!
//! Preprocessing normalizes the DAG into a binary one:
//! non-targets from which no target is reachable are pruned, targets with
//! successors get a cloned leaf behind an identity edge, chains of
//! outdegree-1 vertices are contracted into single composed edges, and
//! vertices of higher outdegree are binarized by a right spine of identity
//! edges. Every inner vertex then knows its rightmost leaf `ω_r` and the
//! morphism `γ_r` of the path to it.
//!
//! Vertices are processed one at a time in bottom-up order, so the same
//! routine both builds an index from scratch and extends it with new
//! sources later ([`EnumIndex::add_vertex`]).

pub mod free_monoid;

use std::fmt;

use crate::error::{Error, Result};
use crate::forest::Ty;
use crate::fslp::effect::PreorderEffect;

/// A morphism of a small category. Composition is diagrammatic.
pub trait Morphism: Clone + PartialEq + fmt::Debug {
    type Object: Copy + Eq + fmt::Debug;

    fn source(&self) -> Self::Object;
    fn target(&self) -> Self::Object;
    fn identity(obj: Self::Object) -> Self;
    /// `self` followed by `next`. Callers guarantee the objects meet.
    fn then(&self, next: &Self) -> Self;
}

impl Morphism for PreorderEffect {
    type Object = Ty;

    fn source(&self) -> Ty {
        PreorderEffect::source(self)
    }

    fn target(&self) -> Ty {
        PreorderEffect::target(self)
    }

    fn identity(obj: Ty) -> Self {
        PreorderEffect::identity(obj)
    }

    fn then(&self, next: &Self) -> Self {
        self.then_unchecked(next)
    }
}

/// The monoid `(ℕ, +)` viewed as a one-object category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub u64);

impl Morphism for Weight {
    type Object = ();

    fn source(&self) {}

    fn target(&self) {}

    fn identity(_: ()) -> Self {
        Weight(0)
    }

    fn then(&self, next: &Self) -> Self {
        Weight(self.0 + next.0)
    }
}

/// A DAG with ordered out-edges decorated by morphisms, objects on the
/// vertices and a set of target vertices.
#[derive(Clone, Debug)]
pub struct DecoratedDag<M: Morphism> {
    objects: Vec<M::Object>,
    edges: Vec<Vec<(usize, M)>>,
    targets: Vec<bool>,
}

impl<M: Morphism> Default for DecoratedDag<M> {
    fn default() -> Self {
        DecoratedDag { objects: Vec::new(), edges: Vec::new(), targets: Vec::new() }
    }
}

impl<M: Morphism> DecoratedDag<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, obj: M::Object, is_target: bool) -> usize {
        self.objects.push(obj);
        self.edges.push(Vec::new());
        self.targets.push(is_target);
        self.objects.len() - 1
    }

    /// Appends an edge `u → v` after all existing out-edges of `u`.
    pub fn add_edge(&mut self, u: usize, v: usize, m: M) -> Result<()> {
        if u >= self.len() || v >= self.len() {
            return Err(Error::Invalid(format!("edge {u} -> {v} names a missing vertex")));
        }
        if m.source() != self.objects[u] || m.target() != self.objects[v] {
            return Err(Error::Incompatible(format!("edge {u} -> {v} does not match the vertex objects")));
        }
        self.edges[u].push((v, m));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object(&self, v: usize) -> M::Object {
        self.objects[v]
    }

    pub fn out_edges(&self, v: usize) -> &[(usize, M)] {
        &self.edges[v]
    }

    pub fn is_target(&self, v: usize) -> bool {
        self.targets[v]
    }

    /// Vertices ordered so that every edge points to an earlier vertex.
    pub fn bottom_up_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut pending: Vec<usize> = self.edges.iter().map(Vec::len).collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, es) in self.edges.iter().enumerate() {
            for &(v, _) in es {
                preds[v].push(u);
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

#[derive(Clone, Debug, PartialEq)]
enum Entry<M> {
    /// No target is reachable.
    Pruned,
    /// The vertex survives as binary vertex `b`.
    At(u32),
    /// Outdegree one: enumeration delegates to binary vertex `b` after the
    /// composed morphism of the contracted chain.
    Via(u32, M),
}

#[derive(Clone, Debug, PartialEq)]
enum BKind<M> {
    Leaf { origin: usize },
    Inner { left: (u32, M), right: (u32, M) },
}

#[derive(Clone, Debug, PartialEq)]
struct BVertex<M: Morphism> {
    kind: BKind<M>,
    obj: M::Object,
    omega: u32,
    gamma_r: M,
}

/// The normalized binary DAG plus the table of removed vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumIndex<M: Morphism> {
    entries: Vec<Option<Entry<M>>>,
    bin: Vec<BVertex<M>>,
}

impl<M: Morphism> Default for EnumIndex<M> {
    fn default() -> Self {
        EnumIndex { entries: Vec::new(), bin: Vec::new() }
    }
}

impl<M: Morphism> EnumIndex<M> {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_leaf(&mut self, origin: usize, obj: M::Object) -> u32 {
        let id = self.bin.len() as u32;
        self.bin.push(BVertex { kind: BKind::Leaf { origin }, obj, omega: id, gamma_r: M::identity(obj) });
        id
    }

    fn push_inner(&mut self, obj: M::Object, left: (u32, M), right: (u32, M)) -> u32 {
        let r = &self.bin[right.0 as usize];
        let omega = r.omega;
        let gamma_r = right.1.then(&r.gamma_r);
        self.bin.push(BVertex { kind: BKind::Inner { left, right }, obj, omega, gamma_r });
        (self.bin.len() - 1) as u32
    }

    /// Processes vertex `u` given its ordered out-edges. Every successor
    /// must have been added before.
    pub fn add_vertex(&mut self, u: usize, obj: M::Object, is_target: bool, edges: &[(usize, M)]) -> Result<()> {
        if self.entries.get(u).is_some_and(Option::is_some) {
            return Err(Error::Invalid(format!("vertex {u} added twice")));
        }
        let mut out: Vec<(u32, M)> = Vec::with_capacity(edges.len() + 1);
        for (v, m) in edges {
            match self.entries.get(*v).and_then(Option::as_ref) {
                None => return Err(Error::Invalid(format!("successor {v} of {u} not yet added"))),
                Some(Entry::Pruned) => {}
                Some(Entry::At(b)) => out.push((*b, m.clone())),
                Some(Entry::Via(b, g)) => out.push((*b, m.then(g))),
            }
        }
        let entry = if is_target && out.is_empty() {
            Entry::At(self.push_leaf(u, obj))
        } else {
            if is_target {
                let leaf = self.push_leaf(u, obj);
                out.push((leaf, M::identity(obj)));
            }
            match out.len() {
                0 => Entry::Pruned,
                1 => {
                    let (b, m) = out.pop().expect("one edge");
                    Entry::Via(b, m)
                }
                d => {
                    // Right spine u_1 .. u_{d-1}, built from the bottom.
                    let last = out.pop().expect("d >= 2");
                    let prev = out.pop().expect("d >= 2");
                    let mut top = self.push_inner(obj, prev, last);
                    for k in (0..d - 2).rev() {
                        let left = out.pop().expect("k < d - 2");
                        debug_assert_eq!(out.len(), k);
                        top = self.push_inner(obj, left, (top, M::identity(obj)));
                    }
                    Entry::At(top)
                }
            }
        };
        if self.entries.len() <= u {
            self.entries.resize(u + 1, None);
        }
        self.entries[u] = Some(entry);
        Ok(())
    }

    /// Number of vertices in the normalized binary DAG.
    pub fn binary_len(&self) -> usize {
        self.bin.len()
    }

    /// Whether `u` has been processed.
    pub fn contains(&self, u: usize) -> bool {
        self.entries.get(u).is_some_and(Option::is_some)
    }

    /// Whether some target is reachable from `u`.
    pub fn is_productive(&self, u: usize) -> bool {
        !matches!(self.entries.get(u), Some(Some(Entry::Pruned)) | None | Some(None))
    }

    /// Opens an enumeration of all paths from `s` to a target.
    pub fn open_session(&self, s: usize) -> Result<PathSession<'_, M>> {
        let entry = self
            .entries
            .get(s)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Invalid(format!("vertex {s} is not indexed")))?;
        let (v, gamma) = match entry {
            Entry::Pruned => return Ok(PathSession::new(self, None)),
            Entry::At(b) => (*b, M::identity(self.bin[*b as usize].obj)),
            Entry::Via(b, m) => (*b, m.clone()),
        };
        Ok(PathSession::new(self, Some(Cursor { v, gamma, stack: Vec::new(), print: true })))
    }
}

/// Builds the index for all vertices of `dag`.
pub fn preprocess<M: Morphism>(dag: &DecoratedDag<M>) -> Result<EnumIndex<M>> {
    let order = dag.bottom_up_order()?;
    let mut idx = EnumIndex::new();
    idx.entries.resize(dag.len(), None);
    for u in order {
        idx.add_vertex(u, dag.object(u), dag.is_target(u), dag.out_edges(u))?;
    }
    Ok(idx)
}

/// A running path enumeration. Each call to [`PathSession::next`] performs
/// a bounded number of loop iterations, reported by
/// [`PathSession::last_steps`].
#[derive(Clone, Debug)]
pub struct PathSession<'a, M: Morphism> {
    idx: &'a EnumIndex<M>,
    cursor: Option<Cursor<M>>,
    last_steps: u64,
    max_steps: u64,
}

#[derive(Clone, Debug)]
struct Cursor<M> {
    v: u32,
    gamma: M,
    stack: Vec<(u32, M)>,
    print: bool,
}

impl<'a, M: Morphism> PathSession<'a, M> {
    fn new(idx: &'a EnumIndex<M>, cursor: Option<Cursor<M>>) -> Self {
        PathSession { idx, cursor, last_steps: 0, max_steps: 0 }
    }

    /// Loop iterations spent by the most recent call to `next`.
    pub fn last_steps(&self) -> u64 {
        self.last_steps
    }

    /// Largest value of [`PathSession::last_steps`] so far.
    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn is_done(&self) -> bool {
        self.cursor.is_none()
    }

    /// The next `(target, morphism)` pair, or `None` at the end.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<(usize, M)> {
        let Some(cur) = self.cursor.as_mut() else {
            self.last_steps = 0;
            return None;
        };
        let bin = &self.idx.bin;
        let mut steps = 0;
        let mut finished = false;
        let out = loop {
            steps += 1;
            let node = &bin[cur.v as usize];
            let out = cur.print.then(|| {
                let BKind::Leaf { origin } = bin[node.omega as usize].kind else {
                    unreachable!("omega is a leaf")
                };
                (origin, cur.gamma.then(&node.gamma_r))
            });
            cur.print = true;
            match &node.kind {
                BKind::Inner { left, right } => {
                    if matches!(bin[right.0 as usize].kind, BKind::Inner { .. }) {
                        cur.stack.push((right.0, cur.gamma.then(&right.1)));
                    }
                    cur.gamma = cur.gamma.then(&left.1);
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
        if finished {
            self.cursor = None;
        }
        self.last_steps = steps;
        self.max_steps = self.max_steps.max(steps);
        out
    }
}

impl<M: Morphism> Iterator for PathSession<'_, M> {
    type Item = (usize, M);

    fn next(&mut self) -> Option<Self::Item> {
        PathSession::next(self)
    }
}

/// Enumerates all paths from `s` in `dag` to its targets.
pub fn enumerate_paths<M: Morphism>(dag: &DecoratedDag<M>, s: usize) -> Result<Vec<(usize, M)>> {
    let idx = preprocess(dag)?;
    let session = idx.open_session(s)?;
    Ok(session.collect())
}
