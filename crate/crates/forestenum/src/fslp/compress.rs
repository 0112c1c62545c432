//! Balanced compression of an explicit forest.
//!
//! Sibling sequences are split where the prefix weight first reaches half
//! of the total. A tree is cut at the deepest vertex `u` on its heavy path
//! whose child forest still holds at least half of the tree, giving
//! `(tree with u's children replaced by ∗) ⊘ (children of u)`. Contexts are
//! cut the same way along the path to the hole. Each piece is at most about
//! half of its parent after a constant number of levels, so the expression
//! height is logarithmic; hash-consing then shares repeated pieces.

use super::{Fslp, NodeDef, NodeId, SlpBuilder};
use crate::error::{Error, Result};
use crate::forest::{Expr, Forest, Symbol};

trait Sink {
    type H;
    fn leaf(&mut self, a: Symbol) -> Result<Self::H>;
    fn leaf_ctx(&mut self, a: Symbol) -> Result<Self::H>;
    fn hc(&mut self, l: Self::H, r: Self::H) -> Result<Self::H>;
    fn vc(&mut self, l: Self::H, r: Self::H) -> Result<Self::H>;
}

struct ExprSink;

impl Sink for ExprSink {
    type H = Expr;
    fn leaf(&mut self, a: Symbol) -> Result<Expr> {
        Ok(Expr::leaf(a))
    }
    fn leaf_ctx(&mut self, a: Symbol) -> Result<Expr> {
        Ok(Expr::leaf_ctx(a))
    }
    fn hc(&mut self, l: Expr, r: Expr) -> Result<Expr> {
        Ok(Expr::hc(l, r))
    }
    fn vc(&mut self, l: Expr, r: Expr) -> Result<Expr> {
        Ok(Expr::vc(l, r))
    }
}

impl Sink for SlpBuilder {
    type H = NodeId;
    fn leaf(&mut self, a: Symbol) -> Result<NodeId> {
        self.intern(NodeDef::Leaf(a))
    }
    fn leaf_ctx(&mut self, a: Symbol) -> Result<NodeId> {
        self.intern(NodeDef::LeafCtx(a))
    }
    fn hc(&mut self, l: NodeId, r: NodeId) -> Result<NodeId> {
        self.intern(NodeDef::Hc(l, r))
    }
    fn vc(&mut self, l: NodeId, r: NodeId) -> Result<NodeId> {
        self.intern(NodeDef::Vc(l, r))
    }
}

struct Balancer<'f, S> {
    f: &'f Forest,
    sink: S,
}

impl<S: Sink> Balancer<'_, S> {
    /// Size of the subtree at `v` when everything strictly below `p` is cut.
    fn ctx_size(&self, v: usize, p: usize) -> usize {
        self.f.subtree_size(v) - self.f.subtree_size(p) + 1
    }

    fn tree(&mut self, v: usize) -> Result<S::H> {
        let f = self.f;
        if f.children(v).is_empty() {
            return self.sink.leaf(f.label(v));
        }
        let n = f.subtree_size(v);
        let mut u = v;
        loop {
            let h = *f
                .children(u)
                .iter()
                .max_by_key(|&&c| (f.subtree_size(c), std::cmp::Reverse(c)))
                .expect("inner vertex");
            if 2 * (f.subtree_size(h) - 1) >= n {
                u = h;
            } else {
                break;
            }
        }
        let top = self.tree_ctx(v, u)?;
        let bottom = self.forest(f.children(u))?;
        self.sink.vc(top, bottom)
    }

    fn tree_ctx(&mut self, v: usize, p: usize) -> Result<S::H> {
        let f = self.f;
        if v == p {
            return self.sink.leaf_ctx(f.label(v));
        }
        let n = self.ctx_size(v, p);
        let mut u = v;
        loop {
            let next = *f
                .children(u)
                .iter()
                .find(|&&c| f.is_ancestor(c, p))
                .expect("p lies below u");
            if next != p && 2 * (self.ctx_size(next, p) - 1) >= n {
                u = next;
            } else {
                break;
            }
        }
        let top = self.tree_ctx(v, u)?;
        let bottom = self.forest_ctx(f.children(u), p)?;
        self.sink.vc(top, bottom)
    }

    fn split_point(weights: impl Iterator<Item = usize> + Clone, k: usize) -> usize {
        let total: usize = weights.clone().sum();
        let mut acc = 0;
        for (j, w) in weights.enumerate() {
            acc += w;
            if 2 * acc >= total {
                return (j + 1).clamp(1, k - 1);
            }
        }
        k - 1
    }

    fn forest(&mut self, roots: &[usize]) -> Result<S::H> {
        if roots.len() == 1 {
            return self.tree(roots[0]);
        }
        let f = self.f;
        let j = Self::split_point(roots.iter().map(|&r| f.subtree_size(r)), roots.len());
        let l = self.forest(&roots[..j])?;
        let r = self.forest(&roots[j..])?;
        self.sink.hc(l, r)
    }

    fn forest_ctx(&mut self, roots: &[usize], p: usize) -> Result<S::H> {
        let f = self.f;
        if roots.len() == 1 {
            return self.tree_ctx(roots[0], p);
        }
        let weight = |r: usize| if f.is_ancestor(r, p) { self.ctx_size(r, p) } else { f.subtree_size(r) };
        let j = Self::split_point(roots.iter().map(|&r| weight(r)), roots.len());
        let (ls, rs) = roots.split_at(j);
        let hole_left = ls.iter().any(|&r| f.is_ancestor(r, p));
        let l = if hole_left { self.forest_ctx(ls, p)? } else { self.forest(ls)? };
        let r = if hole_left { self.forest(rs)? } else { self.forest_ctx(rs, p)? };
        self.sink.hc(l, r)
    }
}

/// A balanced expression for a non-empty forest.
pub fn balanced_expr(f: &Forest) -> Result<Expr> {
    if f.is_empty() {
        return Err(Error::InvalidExpression("the empty forest has no expression".into()));
    }
    Balancer { f, sink: ExprSink }.forest(f.roots())
}

/// Compresses a non-empty forest into an f-SLP whose root denotes it.
/// The result equals folding [`balanced_expr`] but never materializes the
/// expression tree.
pub fn compress_forest(f: &Forest) -> Result<Fslp> {
    if f.is_empty() {
        return Err(Error::InvalidExpression("the empty forest has no expression".into()));
    }
    let mut b = Balancer { f, sink: SlpBuilder::new() };
    let root = b.forest(f.roots())?;
    Ok(b.sink.finish(Some(root)))
}
