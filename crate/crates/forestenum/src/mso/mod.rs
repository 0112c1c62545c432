//! Enumeration of the answers of a vertex-selecting query over a forest
//! compressed by an f-SLP.
//!
//! For every f-SLP node `v` the index records the configurations `(v, q)`:
//! the unique state reached with no vertex selected (`Conf^∅`), the states
//! reachable with a non-empty selection (`Conf^a`) and those among them
//! whose selection meets both children (`Conf^u`). Active configurations
//! form the product DAG: `(u, p)` has an edge to `(v, q)` when `v` is a child
//! of `u` and selecting nothing in the sibling turns `q` into `p`. Each edge
//! carries the preorder effect of the f-SLP edge, so a path from `(A, q)` to
//! a useful configuration tells where in `⟦A⟧` that configuration sits.
//! Nodes are processed one at a time, children first; appending nodes to
//! the f-SLP only appends to the index.

mod enumerate;
mod reference;

pub use enumerate::{enumerate_select, SelectEnumerator};
pub use reference::{enumerate_select_uncompressed, tree_conf_sets, TreeConf};

use crate::automata::{Dbuta, Op, StateId};
use crate::error::{Error, Result};
use crate::fslp::{Dir, Fslp, NodeDef, NodeId, PreorderEffect};
use crate::pathenum::EnumIndex;

/// Product out-edges and `succ^a` pairs of one reached state.
type StateEdges = (Vec<(Dir, u32)>, Vec<(u32, u32)>);

/// Configurations of one f-SLP node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeConf {
    /// The state of the node's value with nothing selected.
    pub empty: StateId,
    /// Whether [`NodeConf::empty`] is final.
    pub empty_final: bool,
    /// Id of the first product vertex of this node. Its active states,
    /// sorted by id, occupy the product ids `first_pid..first_pid + len`.
    pub first_pid: u32,
}

/// One active configuration, i.e. one vertex of the product DAG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductVertex {
    pub node: NodeId,
    pub state: StateId,
    pub useful: bool,
    pub is_final: bool,
    /// Range of this configuration's `succ^a` list in [`ProductIndex::succ`].
    pub succ: (u32, u32),
}

/// The enumeration data structure for one f-SLP and one automaton.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductIndex {
    nodes: Vec<NodeConf>,
    pvs: Vec<ProductVertex>,
    /// Pairs of product ids `(left child, right child)`, grouped per useful
    /// configuration, each group sorted by `(left state, right state)`.
    succ: Vec<(u32, u32)>,
    effects: Vec<Option<[PreorderEffect; 2]>>,
    edge_lists: Vec<Vec<(Dir, u32)>>,
    paths: EnumIndex<PreorderEffect>,
}

impl Default for ProductIndex {
    fn default() -> Self {
        ProductIndex {
            nodes: Vec::new(),
            pvs: Vec::new(),
            succ: Vec::new(),
            effects: Vec::new(),
            edge_lists: Vec::new(),
            paths: EnumIndex::new(),
        }
    }
}

impl ProductIndex {
    /// Builds the index for every node of `g`.
    pub fn build(g: &Fslp, b: &dyn Dbuta) -> Result<ProductIndex> {
        let mut idx = ProductIndex::default();
        idx.extend_to(g, b)?;
        Ok(idx)
    }

    /// Processes the nodes of `g` that are not indexed yet. `g` must extend
    /// the f-SLP the index was built for. Returns the number of automaton
    /// steps taken.
    pub fn extend_to(&mut self, g: &Fslp, b: &dyn Dbuta) -> Result<u64> {
        let mut work = 0;
        for i in self.nodes.len()..g.len() {
            work += self.add_node(g, NodeId(i as u32), b)?;
        }
        Ok(work)
    }

    /// Number of indexed f-SLP nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, v: NodeId) -> &NodeConf {
        &self.nodes[v.index()]
    }

    pub fn product_len(&self) -> usize {
        self.pvs.len()
    }

    pub fn product_vertex(&self, pid: u32) -> &ProductVertex {
        &self.pvs[pid as usize]
    }

    /// Product ids of the active configurations of `v`.
    pub fn active(&self, v: NodeId) -> std::ops::Range<u32> {
        let start = self.nodes[v.index()].first_pid;
        let end = self.nodes.get(v.index() + 1).map_or(self.pvs.len() as u32, |n| n.first_pid);
        start..end
    }

    /// Product id of `(v, q)` if it is active.
    pub fn pid(&self, v: NodeId, q: StateId) -> Option<u32> {
        let r = self.active(v);
        let slice = &self.pvs[r.start as usize..r.end as usize];
        slice.binary_search_by_key(&q, |p| p.state).ok().map(|i| r.start + i as u32)
    }

    /// The ordered `succ^a` list of a useful configuration.
    pub fn succ(&self, pid: u32) -> &[(u32, u32)] {
        let (s, e) = self.pvs[pid as usize].succ;
        &self.succ[s as usize..e as usize]
    }

    /// Preorder effects of the two out-edges of an inner node.
    pub fn edge_effect(&self, v: NodeId, d: Dir) -> Option<&PreorderEffect> {
        self.effects[v.index()].as_ref().map(|e| &e[d as usize])
    }

    /// Path enumeration index over the product DAG with the useful
    /// configurations as targets.
    pub fn paths(&self) -> &EnumIndex<PreorderEffect> {
        &self.paths
    }

    /// Whether the empty selection is an answer for `a`.
    pub fn empty_is_answer(&self, a: NodeId) -> bool {
        self.nodes[a.index()].empty_final
    }

    /// Product out-edges of an active configuration, in the order given to
    /// the path index: left edges by child state, then right edges.
    pub fn product_edges(&self, pid: u32) -> &[(Dir, u32)] {
        &self.edge_lists[pid as usize]
    }

    fn add_node(&mut self, g: &Fslp, v: NodeId, b: &dyn Dbuta) -> Result<u64> {
        debug_assert_eq!(v.index(), self.nodes.len());
        let first_pid = self.pvs.len() as u32;
        let def = *g.def(v);
        let ty = g.ty(v);
        match def {
            NodeDef::Leaf(a) | NodeDef::LeafCtx(a) => {
                if !b.knows(a) {
                    return Err(Error::AlphabetMismatch(format!(
                        "node {} carries a label outside the automaton's alphabet",
                        v.0
                    )));
                }
                let ctx = matches!(def, NodeDef::LeafCtx(_));
                let empty = b.leaf(a, ctx, false);
                let sel = b.leaf(a, ctx, true);
                self.nodes.push(NodeConf { empty, empty_final: b.is_final(empty), first_pid });
                self.effects.push(None);
                let n = self.succ.len() as u32;
                self.pvs.push(ProductVertex { node: v, state: sel, useful: true, is_final: b.is_final(sel), succ: (n, n) });
                self.edge_lists.push(Vec::new());
                self.paths.add_vertex(first_pid as usize, ty, true, &[])?;
                Ok(2)
            }
            NodeDef::Hc(l, r) | NodeDef::Vc(l, r) => {
                let op = if matches!(def, NodeDef::Hc(..)) { Op::Hc } else { Op::Vc };
                let el = g.edge_effect(v, Dir::Left).expect("inner node");
                let er = g.edge_effect(v, Dir::Right).expect("inner node");
                let (e1, e2) = (self.nodes[l.index()].empty, self.nodes[r.index()].empty);
                let empty = b.step(op, e1, e2);
                // Per reached state: product out-edges and succ^a pairs.
                let mut per_state: std::collections::BTreeMap<StateId, StateEdges> = Default::default();
                let (al, ar) = (self.active(l), self.active(r));
                let (al_len, ar_len) = (al.len(), ar.len());
                for p1 in al.clone() {
                    let q = b.step(op, self.pvs[p1 as usize].state, e2);
                    per_state.entry(q).or_default().0.push((Dir::Left, p1));
                }
                for p2 in ar.clone() {
                    let q = b.step(op, e1, self.pvs[p2 as usize].state);
                    per_state.entry(q).or_default().0.push((Dir::Right, p2));
                }
                for p1 in al {
                    for p2 in ar.clone() {
                        let q = b.step(op, self.pvs[p1 as usize].state, self.pvs[p2 as usize].state);
                        per_state.entry(q).or_default().1.push((p1, p2));
                    }
                }
                self.nodes.push(NodeConf { empty, empty_final: b.is_final(empty), first_pid });
                let effects = [el, er];
                for (q, (edges, succ)) in per_state {
                    let pid = self.pvs.len() as u32;
                    let s = self.succ.len() as u32;
                    self.succ.extend_from_slice(&succ);
                    self.pvs.push(ProductVertex {
                        node: v,
                        state: q,
                        useful: !succ.is_empty(),
                        is_final: b.is_final(q),
                        succ: (s, self.succ.len() as u32),
                    });
                    let pe: Vec<(usize, PreorderEffect)> =
                        edges.iter().map(|&(d, t)| (t as usize, effects[d as usize].clone())).collect();
                    self.paths.add_vertex(pid as usize, ty, !succ.is_empty(), &pe)?;
                    self.edge_lists.push(edges);
                }
                self.effects.push(Some(effects));
                let (nl, nr) = (al_len as u64, ar_len as u64);
                Ok(1 + nl + nr + nl * nr)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::automata::nsta::library;
    use crate::automata::{Nsta, SubsetDbuta};
    use crate::fixtures;
    use crate::forest::{leaf_preorders, parse_term, Alphabet, Forest, Symbol, Ty};
    use crate::fslp::{compress_forest, fold_expr};
    use crate::gen;
    use crate::oracle::{brute_nsta_accepts, brute_select, OracleBudget};

    fn answers(idx: &ProductIndex, g: &Fslp, a: NodeId) -> Vec<Vec<usize>> {
        let mut fam: Vec<Vec<usize>> = enumerate_select(idx, g, a)
            .unwrap()
            .into_iter()
            .map(|s| {
                let mut s: Vec<usize> = s.iter().map(|m| m.to_usize().unwrap()).collect();
                let n = s.len();
                s.sort_unstable();
                s.dedup();
                assert_eq!(s.len(), n, "repeated preorder number in one answer");
                s
            })
            .collect();
        let n = fam.len();
        fam.sort();
        fam.dedup();
        assert_eq!(fam.len(), n, "answer emitted twice");
        fam
    }

    #[test]
    fn single_leaf_configurations() {
        let a = Symbol(0);
        let g = Fslp::from_nodes([NodeDef::Leaf(a)], Some(NodeId(0))).unwrap();
        let b = SubsetDbuta::new(library::select_one_any());
        let idx = ProductIndex::build(&g, &b).unwrap();
        assert_eq!(idx.node(NodeId(0)).empty, b.leaf(a, false, false));
        assert_eq!(idx.active(NodeId(0)), 0..1);
        let pv = idx.product_vertex(0);
        assert_eq!(pv.state, b.leaf(a, false, true));
        assert!(pv.useful && pv.is_final);
        assert_eq!(answers(&idx, &g, NodeId(0)), vec![vec![0]]);
    }

    #[test]
    fn accept_nothing_yields_no_answer() {
        let mut al = Alphabet::new();
        let f = fixtures::fig1(&mut al);
        let g = compress_forest(&f).unwrap();
        let mut none = Nsta::new(1, 0, 0).unwrap();
        none.add_default_iota(false, &[0]).unwrap();
        none.add_default_iota(true, &[0]).unwrap();
        let b = SubsetDbuta::new(none);
        let idx = ProductIndex::build(&g, &b).unwrap();
        let root = g.root().unwrap();
        assert!(!idx.empty_is_answer(root));
        assert!(answers(&idx, &g, root).is_empty());
        assert!(idx.active(root).all(|p| !b.is_final(idx.product_vertex(p).state)));
    }

    #[test]
    fn bit_blind_automaton_has_every_answer() {
        let mut al = Alphabet::new();
        let f = parse_term("a(bc)", &mut al).unwrap();
        let g = compress_forest(&f).unwrap();
        let mut all = Nsta::new(1, 0, 0).unwrap();
        all.add_default_iota(false, &[0]).unwrap();
        all.add_default_iota(true, &[0]).unwrap();
        all.add_transition(0, 0, 0).unwrap();
        let b = SubsetDbuta::new(all);
        let idx = ProductIndex::build(&g, &b).unwrap();
        for v in g.ids() {
            let st = b.state(idx.node(v).empty);
            assert!(!st.pairs().is_empty() || !st.quads().is_empty(), "node {}", v.0);
        }
        let root = g.root().unwrap();
        assert!(idx.empty_is_answer(root));
        assert_eq!(answers(&idx, &g, root).len(), 8);
        let first = SelectEnumerator::new(&idx, &g, root).unwrap().next().unwrap();
        assert!(first.is_empty());
    }

    #[test]
    fn wide_word_streams_singletons() {
        let a = Symbol(0);
        let (g, top) = fixtures::power_word(a, 20);
        let b = SubsetDbuta::new(library::select_one_any());
        let idx = ProductIndex::build(&g, &b).unwrap();
        let mut it = SelectEnumerator::new(&idx, &g, top).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..1000 {
            let s = it.next().unwrap();
            assert_eq!(s.len(), 1);
            assert!(seen.insert(s[0].clone()));
        }
        assert!(it.max_steps() < 500, "{}", it.max_steps());
    }

    #[test]
    fn context_and_unknown_nodes_are_rejected() {
        let a = Symbol(0);
        let g = Fslp::from_nodes([NodeDef::LeafCtx(a)], None).unwrap();
        let b = SubsetDbuta::new(library::select_one_any());
        let idx = ProductIndex::build(&g, &b).unwrap();
        assert!(SelectEnumerator::new(&idx, &g, NodeId(0)).is_err());
        assert!(SelectEnumerator::new(&idx, &g, NodeId(5)).is_err());
        let only_a = library::select_one_labelled(&[a], a);
        let g2 = Fslp::from_nodes([NodeDef::Leaf(Symbol(3))], None).unwrap();
        assert!(matches!(
            ProductIndex::build(&g2, &SubsetDbuta::new(only_a)),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn random_instances_match_the_subset_oracle() {
        let syms = [Symbol(0), Symbol(1)];
        let mut rng = gen::rng(11);
        for case in 0..150 {
            let n = 1 + case % 10;
            let f: Forest = gen::random_forest(&mut rng, n, &syms);
            let a = gen::random_nsta(&mut rng, 1 + (case % 3) as u32, &syms, 0.45);
            let g = compress_forest(&f).unwrap();
            let b = SubsetDbuta::new(a.clone());
            let idx = ProductIndex::build(&g, &b).unwrap();
            let root = g.root().unwrap();
            let expected = brute_select(&a, &f, &OracleBudget::default()).unwrap();
            assert_eq!(answers(&idx, &g, root), expected, "case {case}");
            assert_eq!(idx.empty_is_answer(root), brute_nsta_accepts(&a, &f, &vec![false; n]));
        }
    }

    #[test]
    fn compressed_and_tree_level_enumeration_agree() {
        let syms = [Symbol(0), Symbol(1), Symbol(2)];
        let mut rng = gen::rng(5);
        for case in 0..100 {
            let e = gen::random_expr(&mut rng, 1 + case % 9, Ty::Forest, &syms);
            let a = gen::random_nsta(&mut rng, 2 + (case % 2) as u32, &syms, 0.5);
            let b = SubsetDbuta::new(a);
            let g = fold_expr(&e).unwrap();
            let idx = ProductIndex::build(&g, &b).unwrap();
            let po = leaf_preorders(&e).unwrap();
            let mut expected: Vec<Vec<usize>> = enumerate_select_uncompressed(&e, &b, 1 << 20)
                .unwrap()
                .into_iter()
                .map(|s| {
                    let mut s: Vec<usize> = s.into_iter().map(|i| po[i]).collect();
                    s.sort_unstable();
                    s
                })
                .collect();
            expected.sort();
            assert_eq!(answers(&idx, &g, g.root().unwrap()), expected, "case {case}");
        }
    }

    #[test]
    fn configurations_match_the_unfolded_expression() {
        let syms = [Symbol(0), Symbol(1)];
        let mut rng = gen::rng(3);
        for case in 0..60 {
            let ty = if case % 2 == 0 { Ty::Forest } else { Ty::Context };
            let e = gen::random_expr(&mut rng, 1 + case % 8, ty, &syms);
            let b = SubsetDbuta::new(gen::random_nsta(&mut rng, 3, &syms, 0.4));
            let g = fold_expr(&e).unwrap();
            let idx = ProductIndex::build(&g, &b).unwrap();
            for v in g.ids() {
                let ev = g.unfold(v, 1 << 16).unwrap();
                let tc = tree_conf_sets(&ev, &b).pop().unwrap();
                assert_eq!(idx.node(v).empty, tc.empty);
                let active: BTreeSet<StateId> = idx.active(v).map(|p| idx.product_vertex(p).state).collect();
                let useful: BTreeSet<StateId> =
                    idx.active(v).filter(|&p| idx.product_vertex(p).useful).map(|p| idx.product_vertex(p).state).collect();
                assert_eq!(active, tc.active, "case {case}");
                assert_eq!(useful, tc.useful, "case {case}");
            }
        }
    }

    #[test]
    fn product_edges_and_succ_lists_match_a_pair_scan() {
        let syms = [Symbol(0), Symbol(1)];
        let mut rng = gen::rng(21);
        for _ in 0..40 {
            let f = gen::random_forest(&mut rng, 8, &syms);
            let b = SubsetDbuta::new(gen::random_nsta(&mut rng, 3, &syms, 0.4));
            let g = compress_forest(&f).unwrap();
            let idx = ProductIndex::build(&g, &b).unwrap();
            for v in g.ids() {
                let Some((l, r)) = g.def(v).children() else { continue };
                let op = if matches!(g.def(v), NodeDef::Hc(..)) { Op::Hc } else { Op::Vc };
                let (el, er) = (idx.node(l).empty, idx.node(r).empty);
                for pid in idx.active(v) {
                    let q = idx.product_vertex(pid).state;
                    let mut edges = Vec::new();
                    for p1 in idx.active(l) {
                        if b.step(op, idx.product_vertex(p1).state, er) == q {
                            edges.push((Dir::Left, p1));
                        }
                    }
                    for p2 in idx.active(r) {
                        if b.step(op, el, idx.product_vertex(p2).state) == q {
                            edges.push((Dir::Right, p2));
                        }
                    }
                    assert_eq!(idx.product_edges(pid), edges.as_slice());
                    let mut pairs = Vec::new();
                    for p1 in idx.active(l) {
                        for p2 in idx.active(r) {
                            let (s1, s2) = (idx.product_vertex(p1).state, idx.product_vertex(p2).state);
                            if b.step(op, s1, s2) == q {
                                pairs.push((s1, s2, p1, p2));
                            }
                        }
                    }
                    pairs.sort();
                    let want: Vec<(u32, u32)> = pairs.iter().map(|&(_, _, p1, p2)| (p1, p2)).collect();
                    assert_eq!(idx.succ(pid), want.as_slice());
                }
            }
        }
    }
}
