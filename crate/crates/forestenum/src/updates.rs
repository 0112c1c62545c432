//! Keeping the enumeration data structure current while the f-SLP grows.
//!
//! Nodes are only ever appended, so extending the structure means indexing
//! the new nodes; old rows are untouched and enumerators opened earlier
//! keep working on them. Relabelling a vertex copies the f-SLP path leading
//! to it, which costs one new node per level.

use crate::automata::{Dbuta, Nsta, StateId, SubsetDbuta};
use crate::error::{Error, Result};
use crate::forest::{Symbol, Ty};
use crate::fslp::{Dir, Fslp, NodeDef, NodeId};
use crate::mso::{enumerate_select, ProductIndex, SelectEnumerator};
use crate::num::Num;

/// An f-SLP together with the lazily determinized query automaton and the
/// product index built for them.
pub struct EnumDataStructure {
    fslp: Fslp,
    dbuta: SubsetDbuta,
    index: ProductIndex,
}

/// Outcome of a relabelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabel {
    /// Root of the relabelled copy.
    pub node: NodeId,
    /// Number of nodes appended.
    pub added: usize,
    /// Automaton steps spent maintaining the index.
    pub work: u64,
}

impl EnumDataStructure {
    pub fn build(fslp: Fslp, nsta: Nsta) -> Result<Self> {
        let dbuta = SubsetDbuta::new(nsta);
        let index = ProductIndex::build(&fslp, &dbuta)?;
        Ok(EnumDataStructure { fslp, dbuta, index })
    }

    pub fn fslp(&self) -> &Fslp {
        &self.fslp
    }

    pub fn dbuta(&self) -> &SubsetDbuta {
        &self.dbuta
    }

    pub fn index(&self) -> &ProductIndex {
        &self.index
    }

    pub fn enumerate(&self, a: NodeId) -> Result<SelectEnumerator<'_>> {
        SelectEnumerator::new(&self.index, &self.fslp, a)
    }

    pub fn answers(&self, a: NodeId) -> Result<Vec<Vec<Num>>> {
        enumerate_select(&self.index, &self.fslp, a)
    }

    /// Appends `defs`, which may refer to existing nodes and to earlier
    /// entries of `defs`, and indexes them. On error nothing changes.
    pub fn extend(&mut self, defs: &[NodeDef]) -> Result<Vec<NodeId>> {
        self.extend_counted(defs).map(|(ids, _)| ids)
    }

    /// Adds a node `Â` whose value is the value of `a` with vertex `k`
    /// relabelled to `symbol`.
    pub fn relabel(&mut self, a: NodeId, k: &Num, symbol: Symbol) -> Result<Relabel> {
        self.fslp.check(a)?;
        if self.fslp.ty(a) != Ty::Forest {
            return Err(Error::Invalid(format!("node {} denotes a context, not a forest", a.0)));
        }
        let path = self.fslp.preorder_to_path(a, k)?;
        let nodes = self.fslp.path_nodes(a, &path)?;
        let leaf = *nodes.last().expect("path has an end");
        let mut defs = Vec::with_capacity(nodes.len());
        defs.push(match *self.fslp.def(leaf) {
            NodeDef::Leaf(_) => NodeDef::Leaf(symbol),
            NodeDef::LeafCtx(_) => NodeDef::LeafCtx(symbol),
            _ => unreachable!("paths from preorder_to_path end at leaves"),
        });
        let base = self.fslp.len() as u32;
        for (i, &d) in path.iter().enumerate().rev() {
            let below = NodeId(base + defs.len() as u32 - 1);
            let (l, r) = self.fslp.def(nodes[i]).children().expect("inner node");
            let (l, r) = match d {
                Dir::Left => (below, r),
                Dir::Right => (l, below),
            };
            defs.push(match self.fslp.def(nodes[i]) {
                NodeDef::Hc(..) => NodeDef::Hc(l, r),
                _ => NodeDef::Vc(l, r),
            });
        }
        let added = defs.len();
        debug_assert!(added as u32 <= self.fslp.height(a) + 1);
        let (ids, work) = self.extend_counted(&defs)?;
        Ok(Relabel { node: *ids.last().expect("non-empty"), added, work })
    }

    fn extend_counted(&mut self, defs: &[NodeDef]) -> Result<(Vec<NodeId>, u64)> {
        if let Some(s) = defs.iter().filter_map(NodeDef::symbol).find(|&s| !self.dbuta.knows(s)) {
            return Err(Error::AlphabetMismatch(format!("symbol {} is unknown to the automaton", s.0)));
        }
        let old = self.fslp.len();
        let mut ids = Vec::with_capacity(defs.len());
        for d in defs {
            match self.fslp.push(*d) {
                Ok(id) => ids.push(id),
                Err(e) => {
                    self.fslp.truncate(old);
                    return Err(e);
                }
            }
        }
        let work = self.index.extend_to(&self.fslp, &self.dbuta)?;
        Ok((ids, work))
    }

    /// A structure built from scratch for the current f-SLP.
    pub fn rebuilt(&self) -> Result<EnumDataStructure> {
        EnumDataStructure::build(self.fslp.clone(), self.dbuta.nsta().clone())
    }

    /// Whether `self` equals a from-scratch rebuild, including the
    /// numbering of automaton states.
    pub fn matches_rebuild(&self) -> Result<bool> {
        let fresh = self.rebuilt()?;
        let n = self.dbuta.state_count();
        let same_states = n == fresh.dbuta.state_count()
            && (0..n as u32).all(|q| {
                let q = StateId(q);
                self.dbuta.state(q) == fresh.dbuta.state(q)
            });
        Ok(same_states && self.fslp == fresh.fslp && self.index == fresh.index)
    }

    /// Drops nodes unreachable from `keep` and the root, then rebuilds.
    /// Returns the old-to-new node map.
    pub fn gc(&mut self, keep: &[NodeId]) -> Result<Vec<Option<NodeId>>> {
        let (g, map) = self.fslp.retain_reachable(keep);
        *self = EnumDataStructure::build(g, self.dbuta.nsta().clone())?;
        Ok(map)
    }
}
