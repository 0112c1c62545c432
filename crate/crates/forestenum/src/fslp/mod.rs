//! Forest straight-line programs: DAG-compressed forest-algebra expressions.
//!
//! Every node has one of four forms (`a`, `a(∗)`, `B ⊖ C`, `B ⊘ C`) and may
//! only refer to nodes defined before it, so node ids are a bottom-up order.
//! Type, leaf size `s`, left size `ℓ`, vertex count `N` and height are
//! maintained as nodes are pushed.

pub mod compress;
pub mod effect;
pub mod text;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forest::{eval_expr, Expr, ExprNode, Symbol, Ty, Value};
use crate::num::Num;

pub use compress::{balanced_expr, compress_forest};
pub use effect::{Pod, PreorderEffect, Shape};
pub use text::{parse_fslp, serialize_fslp};

/// Default cap on the number of vertices materialized by [`Fslp::unfold`].
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "FORESTENUM_BUDGET";

/// The materialization budget: `FORESTENUM_BUDGET` if set and valid,
/// otherwise [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Index of an f-SLP node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Definition of one f-SLP node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeDef {
    Leaf(Symbol),
    LeafCtx(Symbol),
    Hc(NodeId, NodeId),
    Vc(NodeId, NodeId),
}

impl NodeDef {
    pub fn children(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            NodeDef::Hc(a, b) | NodeDef::Vc(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn child(&self, d: Dir) -> Option<NodeId> {
        self.children().map(|(a, b)| match d {
            Dir::Left => a,
            Dir::Right => b,
        })
    }

    pub fn symbol(&self) -> Option<Symbol> {
        match *self {
            NodeDef::Leaf(a) | NodeDef::LeafCtx(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_none()
    }
}

/// Child direction in the derivation DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Left,
    Right,
}

/// Per-node statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexStats {
    pub ty: Ty,
    /// Number of vertices of the value, not counting the hole.
    pub s: Num,
    /// Preorder number of the hole (contexts only).
    pub left: Option<Num>,
    /// Number of vertices of the value including the hole.
    pub n: Num,
    pub height: u32,
}

/// An f-SLP. Nodes are append-only; an optional root designates the forest
/// the program describes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fslp {
    nodes: Vec<NodeDef>,
    stats: Vec<VertexStats>,
    root: Option<NodeId>,
}

fn node_stats(def: &NodeDef, stats: &[VertexStats]) -> Result<VertexStats> {
    let leaf = |ty: Ty| VertexStats {
        ty,
        s: Num::ONE,
        left: (ty == Ty::Context).then_some(Num::ONE),
        n: if ty == Ty::Context { Num::from(2u64) } else { Num::ONE },
        height: 0,
    };
    let (a, b, hc) = match *def {
        NodeDef::Leaf(_) => return Ok(leaf(Ty::Forest)),
        NodeDef::LeafCtx(_) => return Ok(leaf(Ty::Context)),
        NodeDef::Hc(a, b) => (a, b, true),
        NodeDef::Vc(a, b) => (a, b, false),
    };
    let (sa, sb) = match (stats.get(a.index()), stats.get(b.index())) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::MalformedSlp(format!(
                "node {} refers to an undefined node",
                stats.len()
            )))
        }
    };
    let ty = if hc { Ty::hc(sa.ty, sb.ty) } else { Ty::vc(sa.ty, sb.ty) };
    let ty = ty.ok_or_else(|| {
        Error::MalformedSlp(format!(
            "node {}: {} of types {} and {} is ill-typed",
            stats.len(),
            if hc { "horizontal concatenation" } else { "vertical concatenation" },
            sa.ty.bit(),
            sb.ty.bit()
        ))
    })?;
    let s = &sa.s + &sb.s;
    let left = match (hc, sa.ty, sb.ty) {
        (true, Ty::Forest, Ty::Context) => Some(&sa.s + sb.left.as_ref().expect("context")),
        (true, Ty::Context, Ty::Forest) => sa.left.clone(),
        (false, _, Ty::Context) => {
            Some(sa.left.as_ref().expect("context") + sb.left.as_ref().expect("context"))
        }
        _ => None,
    };
    let n = if ty == Ty::Context { &s + 1 } else { s.clone() };
    Ok(VertexStats { ty, s, left, n, height: 1 + sa.height.max(sb.height) })
}

/// Recomputes statistics for every node from scratch.
pub fn compute_stats(g: &Fslp) -> Result<Vec<VertexStats>> {
    let mut out = Vec::with_capacity(g.len());
    for def in &g.nodes {
        let st = node_stats(def, &out)?;
        out.push(st);
    }
    Ok(out)
}

impl Fslp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a node after checking references and typing.
    pub fn push(&mut self, def: NodeDef) -> Result<NodeId> {
        let st = node_stats(&def, &self.stats)?;
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(def);
        self.stats.push(st);
        Ok(id)
    }

    /// Builds an f-SLP from a node list (bottom-up order) and optional root.
    pub fn from_nodes(defs: impl IntoIterator<Item = NodeDef>, root: Option<NodeId>) -> Result<Self> {
        let mut g = Fslp::new();
        for d in defs {
            g.push(d)?;
        }
        if let Some(r) = root {
            g.set_root(r)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Drops every node from `len` on; the root is cleared if dropped.
    pub(crate) fn truncate(&mut self, len: usize) {
        self.nodes.truncate(len);
        self.stats.truncate(len);
        if self.root.is_some_and(|r| r.index() >= len) {
            self.root = None;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeDef] {
        &self.nodes
    }

    pub fn def(&self, v: NodeId) -> &NodeDef {
        &self.nodes[v.index()]
    }

    pub fn stats(&self, v: NodeId) -> &VertexStats {
        &self.stats[v.index()]
    }

    pub fn all_stats(&self) -> &[VertexStats] {
        &self.stats
    }

    pub fn ty(&self, v: NodeId) -> Ty {
        self.stats[v.index()].ty
    }

    pub fn height(&self, v: NodeId) -> u32 {
        self.stats[v.index()].height
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn set_root(&mut self, r: NodeId) -> Result<()> {
        self.check(r)?;
        self.root = Some(r);
        Ok(())
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// The root if set, otherwise the last node.
    pub fn default_vertex(&self) -> Option<NodeId> {
        self.root.or_else(|| self.len().checked_sub(1).map(|i| NodeId(i as u32)))
    }

    pub fn check(&self, v: NodeId) -> Result<()> {
        if v.index() < self.len() {
            Ok(())
        } else {
            Err(Error::MalformedSlp(format!("no node {}", v.0)))
        }
    }

    /// Effect of the edge from `v` to its `d` child; `None` for leaves.
    pub fn edge_effect(&self, v: NodeId, d: Dir) -> Option<PreorderEffect> {
        let def = self.def(v);
        let (a, b) = def.children()?;
        let (sa, sb) = (self.stats(a), self.stats(b));
        let z = Num::ZERO;
        let (shape, c, dd) = match (def, sa.ty, sb.ty, d) {
            (NodeDef::Hc(..), Ty::Forest, Ty::Forest, Dir::Left) => (Shape::M00, z.clone(), z),
            (NodeDef::Hc(..), Ty::Forest, Ty::Forest, Dir::Right) => (Shape::M00, sa.s.clone(), z),
            (NodeDef::Hc(..), Ty::Forest, Ty::Context, Dir::Left) => (Shape::M10a, z.clone(), z),
            (NodeDef::Hc(..), Ty::Forest, Ty::Context, Dir::Right) => {
                (Shape::M11a, sa.s.clone(), z)
            }
            (NodeDef::Hc(..), Ty::Context, Ty::Forest, Dir::Left) => (Shape::M11a, z.clone(), z),
            (NodeDef::Hc(..), Ty::Context, Ty::Forest, Dir::Right) => {
                (Shape::M10b, sa.s.clone(), z)
            }
            (NodeDef::Vc(..), Ty::Context, Ty::Forest, Dir::Left) => {
                (Shape::M01, z, sb.s.clone())
            }
            (NodeDef::Vc(..), Ty::Context, _, Dir::Right) => {
                let l = sa.left.clone().expect("context");
                let shape = if sb.ty == Ty::Forest { Shape::M00 } else { Shape::M11a };
                (shape, l, z)
            }
            (NodeDef::Vc(..), Ty::Context, Ty::Context, Dir::Left) => {
                (Shape::M11a, z, sb.s.clone())
            }
            _ => unreachable!("typing is checked on push"),
        };
        Some(PreorderEffect::new(shape, c, dd))
    }

    /// Nodes visited by `path` starting at `a`, including both ends.
    pub fn path_nodes(&self, a: NodeId, path: &[Dir]) -> Result<Vec<NodeId>> {
        self.check(a)?;
        let mut out = vec![a];
        let mut v = a;
        for (i, &d) in path.iter().enumerate() {
            v = self
                .def(v)
                .child(d)
                .ok_or_else(|| Error::InvalidPath(format!("step {i} leaves a leaf")))?;
            out.push(v);
        }
        Ok(out)
    }

    /// Composed preorder effect of a path starting at `a`.
    pub fn path_effect(&self, a: NodeId, path: &[Dir]) -> Result<PreorderEffect> {
        self.check(a)?;
        let mut acc = PreorderEffect::identity(self.ty(a));
        let mut v = a;
        for (i, &d) in path.iter().enumerate() {
            let e = self
                .edge_effect(v, d)
                .ok_or_else(|| Error::InvalidPath(format!("step {i} leaves a leaf")))?;
            acc = acc.then_unchecked(&e);
            v = self.def(v).child(d).expect("internal node");
        }
        Ok(acc)
    }

    /// Preorder number of the leaf reached from `a` by `path`.
    pub fn path_preorder(&self, a: NodeId, path: &[Dir]) -> Result<Num> {
        let nodes = self.path_nodes(a, path)?;
        if !self.def(*nodes.last().expect("non-empty")).is_leaf() {
            return Err(Error::InvalidPath("path does not end at a leaf".into()));
        }
        let e = self.path_effect(a, path)?;
        Ok(match e.apply(&Pod::root(self.ty(a)))? {
            Pod::Forest(x) | Pod::Context(x, _) => x,
        })
    }

    /// The unique path from `a` to the leaf producing the vertex with
    /// preorder number `m` in the value of `a`.
    pub fn preorder_to_path(&self, a: NodeId, m: &Num) -> Result<Vec<Dir>> {
        self.check(a)?;
        if m >= &self.stats(a).s {
            return Err(Error::OutOfRange { index: m.to_string(), size: self.stats(a).s.to_string() });
        }
        let mut path = Vec::new();
        let mut v = a;
        let mut m = m.clone();
        // Size of the forest replacing the hole, for context vertices.
        let mut p = Num::ZERO;
        while let Some((b1, b2)) = self.def(v).children() {
            let (s1, s2) = (&self.stats(b1).s, &self.stats(b2).s);
            let (t1, t2) = (self.ty(b1), self.ty(b2));
            let go_left = match (self.def(v), t1, t2) {
                (NodeDef::Hc(..), Ty::Forest, Ty::Forest) => {
                    if &m < s1 {
                        true
                    } else {
                        m = &m - s1;
                        false
                    }
                }
                (NodeDef::Hc(..), Ty::Forest, Ty::Context) => {
                    if &m < s1 {
                        true
                    } else {
                        m = &m - s1;
                        false
                    }
                }
                (NodeDef::Hc(..), Ty::Context, Ty::Forest) => {
                    let bound = s1 + &p;
                    if m < bound {
                        true
                    } else {
                        m = &m - &bound;
                        false
                    }
                }
                (NodeDef::Vc(..), _, _) => {
                    let l1 = self.stats(b1).left.as_ref().expect("context");
                    let inner = if t2 == Ty::Context { s2 + &p } else { s2.clone() };
                    if &m < l1 || m >= l1 + &inner {
                        p = inner;
                        true
                    } else {
                        m = &m - l1;
                        false
                    }
                }
                _ => unreachable!("typing is checked on push"),
            };
            if go_left {
                if t1 == Ty::Forest {
                    p = Num::ZERO;
                }
                path.push(Dir::Left);
                v = b1;
            } else {
                if t2 == Ty::Forest {
                    p = Num::ZERO;
                }
                path.push(Dir::Right);
                v = b2;
            }
        }
        debug_assert!(m.is_zero());
        Ok(path)
    }

    fn budget_check(&self, a: NodeId, budget: u64) -> Result<()> {
        let n = &self.stats(a).n;
        if n > &Num::from(budget) {
            return Err(Error::BudgetExceeded { needed: n.to_string(), budget });
        }
        Ok(())
    }

    /// The expression tree obtained by unfolding the DAG below `a`.
    pub fn unfold(&self, a: NodeId, budget: u64) -> Result<Expr> {
        self.check(a)?;
        self.budget_check(a, budget)?;
        let mut out: Vec<ExprNode> = Vec::new();
        let mut done: Vec<usize> = Vec::new();
        let mut stack = vec![(a, false)];
        while let Some((v, expanded)) = stack.pop() {
            match *self.def(v) {
                NodeDef::Leaf(s) => {
                    out.push(ExprNode::Leaf(s));
                    done.push(out.len() - 1);
                }
                NodeDef::LeafCtx(s) => {
                    out.push(ExprNode::LeafCtx(s));
                    done.push(out.len() - 1);
                }
                NodeDef::Hc(l, r) | NodeDef::Vc(l, r) => {
                    if expanded {
                        let rb = done.pop().expect("right subtree");
                        let la = done.pop().expect("left subtree");
                        out.push(if matches!(self.def(v), NodeDef::Hc(..)) {
                            ExprNode::Hc(la, rb)
                        } else {
                            ExprNode::Vc(la, rb)
                        });
                        done.push(out.len() - 1);
                    } else {
                        stack.push((v, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
        Ok(Expr::from_postorder(out))
    }

    /// The forest or context denoted by `a`.
    pub fn evaluate(&self, a: NodeId, budget: u64) -> Result<Value> {
        eval_expr(&self.unfold(a, budget)?)
    }

    /// Marks nodes reachable from any of `roots`.
    pub fn reachable(&self, roots: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        for r in roots {
            seen[r.index()] = true;
        }
        for i in (0..self.len()).rev() {
            if seen[i] {
                if let Some((a, b)) = self.nodes[i].children() {
                    seen[a.index()] = true;
                    seen[b.index()] = true;
                }
            }
        }
        seen
    }

    /// Copy keeping only nodes reachable from `keep`; returns the old-to-new
    /// id map. The root is kept if it is reachable.
    pub fn retain_reachable(&self, keep: &[NodeId]) -> (Fslp, Vec<Option<NodeId>>) {
        let mut roots = keep.to_vec();
        roots.extend(self.root);
        let seen = self.reachable(&roots);
        let mut map = vec![None; self.len()];
        let mut g = Fslp::new();
        for i in 0..self.len() {
            if !seen[i] {
                continue;
            }
            let m = |x: NodeId| map[x.index()].expect("children kept");
            let def = match self.nodes[i] {
                NodeDef::Hc(a, b) => NodeDef::Hc(m(a), m(b)),
                NodeDef::Vc(a, b) => NodeDef::Vc(m(a), m(b)),
                leaf => leaf,
            };
            map[i] = Some(g.push(def).expect("valid subprogram"));
        }
        g.root = self.root.and_then(|r| map[r.index()]);
        (g, map)
    }
}

/// Builds an f-SLP with structural sharing: identical definitions get the
/// same node.
#[derive(Debug, Default)]
pub struct SlpBuilder {
    g: Fslp,
    memo: HashMap<NodeDef, NodeId>,
}

impl SlpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, def: NodeDef) -> Result<NodeId> {
        if let Some(&id) = self.memo.get(&def) {
            return Ok(id);
        }
        let id = self.g.push(def)?;
        self.memo.insert(def, id);
        Ok(id)
    }

    pub fn finish(mut self, root: Option<NodeId>) -> Fslp {
        self.g.root = root;
        self.g
    }
}

/// Folds an expression into a minimal DAG by hash-consing; node ids follow
/// the first occurrence in postorder.
pub fn fold_expr(e: &Expr) -> Result<Fslp> {
    if e.is_empty() {
        return Err(Error::InvalidExpression("empty expression".into()));
    }
    let mut b = SlpBuilder::new();
    let mut ids: Vec<NodeId> = Vec::with_capacity(e.len());
    for n in e.nodes() {
        let def = match *n {
            ExprNode::Leaf(a) => NodeDef::Leaf(a),
            ExprNode::LeafCtx(a) => NodeDef::LeafCtx(a),
            ExprNode::Hc(x, y) => NodeDef::Hc(ids[x], ids[y]),
            ExprNode::Vc(x, y) => NodeDef::Vc(ids[x], ids[y]),
        };
        let id = b.intern(def).map_err(|err| match err {
            Error::MalformedSlp(m) => Error::InvalidExpression(m),
            other => other,
        })?;
        ids.push(id);
    }
    let root = *ids.last().expect("non-empty");
    Ok(b.finish(Some(root)))
}
