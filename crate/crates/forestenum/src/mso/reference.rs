//! Reference enumeration on an explicit expression tree: configuration sets
//! per node, the configuration forest and recursive expansion of witness
//! trees. Used to cross-check the compressed engine.

use std::collections::BTreeSet;

use crate::automata::{Dbuta, Op, StateId};
use crate::error::{Error, Result};
use crate::forest::{Expr, ExprNode};

/// Configuration sets of one expression node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeConf {
    pub empty: StateId,
    pub active: BTreeSet<StateId>,
    pub useful: BTreeSet<StateId>,
}

struct Tree<'e> {
    e: &'e Expr,
    conf: Vec<TreeConf>,
    /// Leaf rank (left to right) of each leaf node.
    rank: Vec<usize>,
    ops: Vec<Option<Op>>,
}

impl Tree<'_> {
    fn children(&self, v: usize) -> Option<(usize, usize)> {
        match self.e.nodes()[v] {
            ExprNode::Hc(l, r) | ExprNode::Vc(l, r) => Some((l, r)),
            _ => None,
        }
    }

    /// Useful configurations reachable from `(v, q)` in the configuration
    /// forest, in depth-first order.
    fn succ_u(&self, b: &dyn Dbuta, v: usize, q: StateId) -> Vec<(usize, StateId)> {
        let mut out = Vec::new();
        let mut stack = vec![(v, q)];
        while let Some((u, p)) = stack.pop() {
            if self.conf[u].useful.contains(&p) {
                out.push((u, p));
            }
            if let Some((l, r)) = self.children(u) {
                let op = self.ops[u].expect("inner");
                for &q1 in &self.conf[l].active {
                    if b.step(op, q1, self.conf[r].empty) == p {
                        stack.push((l, q1));
                    }
                }
                for &q2 in &self.conf[r].active {
                    if b.step(op, self.conf[l].empty, q2) == p {
                        stack.push((r, q2));
                    }
                }
            }
        }
        out
    }

    fn sets_a(&self, b: &dyn Dbuta, v: usize, q: StateId, budget: &mut u64) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for (u, p) in self.succ_u(b, v, q) {
            out.extend(self.sets_u(b, u, p, budget)?);
        }
        Ok(out)
    }

    fn sets_u(&self, b: &dyn Dbuta, v: usize, q: StateId, budget: &mut u64) -> Result<Vec<Vec<usize>>> {
        let Some((l, r)) = self.children(v) else {
            return Ok(vec![vec![self.rank[v]]]);
        };
        let op = self.ops[v].expect("inner");
        let mut out = Vec::new();
        for &q1 in &self.conf[l].active {
            for &q2 in &self.conf[r].active {
                if b.step(op, q1, q2) != q {
                    continue;
                }
                let left = self.sets_a(b, l, q1, budget)?;
                let right = self.sets_a(b, r, q2, budget)?;
                for s1 in &left {
                    for s2 in &right {
                        let cost = (s1.len() + s2.len()) as u64;
                        *budget = budget
                            .checked_sub(cost)
                            .ok_or_else(|| Error::BudgetExceeded { needed: "more".into(), budget: 0 })?;
                        out.push(s1.iter().chain(s2).copied().collect());
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Configuration sets of every node of `e`, indexed like `e.nodes()`.
pub fn tree_conf_sets(e: &Expr, b: &dyn Dbuta) -> Vec<TreeConf> {
    let mut conf: Vec<TreeConf> = Vec::with_capacity(e.len());
    for n in e.nodes() {
        let c = match *n {
            ExprNode::Leaf(a) | ExprNode::LeafCtx(a) => {
                let ctx = matches!(n, ExprNode::LeafCtx(_));
                let sel = b.leaf(a, ctx, true);
                TreeConf { empty: b.leaf(a, ctx, false), active: [sel].into(), useful: [sel].into() }
            }
            ExprNode::Hc(l, r) | ExprNode::Vc(l, r) => {
                let op = if matches!(n, ExprNode::Hc(..)) { Op::Hc } else { Op::Vc };
                let (cl, cr) = (&conf[l], &conf[r]);
                let mut active = BTreeSet::new();
                let mut useful = BTreeSet::new();
                for &q1 in &cl.active {
                    active.insert(b.step(op, q1, cr.empty));
                    for &q2 in &cr.active {
                        useful.insert(b.step(op, q1, q2));
                    }
                }
                for &q2 in &cr.active {
                    active.insert(b.step(op, cl.empty, q2));
                }
                active.extend(useful.iter().copied());
                TreeConf { empty: b.step(op, cl.empty, cr.empty), active, useful }
            }
        };
        conf.push(c);
    }
    conf
}

/// All answers of `b` on `e` as sets of leaf ranks (leaves numbered left to
/// right), the empty set first if it is an answer. `budget` bounds the total
/// number of emitted elements.
pub fn enumerate_select_uncompressed(e: &Expr, b: &dyn Dbuta, budget: u64) -> Result<Vec<Vec<usize>>> {
    if e.is_empty() {
        return Err(Error::InvalidExpression("empty expression".into()));
    }
    let conf = tree_conf_sets(e, b);
    let mut rank = vec![0; e.len()];
    let mut ops = vec![None; e.len()];
    let mut k = 0;
    for (i, n) in e.nodes().iter().enumerate() {
        match n {
            ExprNode::Leaf(_) | ExprNode::LeafCtx(_) => {
                rank[i] = k;
                k += 1;
            }
            ExprNode::Hc(..) => ops[i] = Some(Op::Hc),
            ExprNode::Vc(..) => ops[i] = Some(Op::Vc),
        }
    }
    let t = Tree { e, conf, rank, ops };
    let root = e.root();
    let mut out = Vec::new();
    if b.is_final(t.conf[root].empty) {
        out.push(Vec::new());
    }
    let mut left = budget;
    for &q in &t.conf[root].active {
        if b.is_final(q) {
            out.extend(t.sets_a(b, root, q, &mut left).map_err(|_| Error::BudgetExceeded {
                needed: format!("more than {budget}"),
                budget,
            })?);
        }
    }
    Ok(out)
}
