//! Small worked instances shared by tests, the acceptance suite and the
//! benchmark command.

use crate::forest::{parse_term, Alphabet, Forest, Symbol};
use crate::fslp::{Fslp, NodeDef, NodeId};
use crate::pathenum::free_monoid::LabelledDag;
use crate::pathenum::{DecoratedDag, Weight};

/// A forest of two trees and four more roots with ten vertices.
pub const FIG1_TERM: &str = "a(ba(a))bcb(c(ab))";

/// A single tree of 17 vertices whose vertex 14 is labelled `b`.
pub const FIG3_TERM: &str = "a(b(ab)c(a(bc)b(ab))c(b(a)bc(a)))";

/// Preorder number of the vertex singled out in [`FIG3_TERM`].
pub const FIG3_VERTEX: u64 = 14;

pub fn fig1(al: &mut Alphabet) -> Forest {
    parse_term(FIG1_TERM, al).expect("fixture parses")
}

pub fn fig3(al: &mut Alphabet) -> Forest {
    parse_term(FIG3_TERM, al).expect("fixture parses")
}

/// Source vertex of [`fig2_dag`].
pub const FIG2_SOURCE: usize = 3;

/// A binary weighted DAG on vertices `0..14` whose leaves are 11, 12 and
/// 13. Vertex pairs joined twice carry one left and one right edge.
pub fn fig2_dag() -> DecoratedDag<Weight> {
    let mut d = DecoratedDag::new();
    for v in 0..14 {
        d.add_vertex((), matches!(v, 11..=13));
    }
    let edges = [
        (3, 5, 0),
        (3, 6, 8),
        (5, 7, 4),
        (5, 7, 3),
        (7, 9, 8),
        (7, 9, 2),
        (9, 12, 1),
        (9, 11, 5),
        (6, 8, 2),
        (6, 8, 7),
        (8, 10, 0),
        (8, 10, 2),
        (10, 12, 3),
        (10, 13, 1),
    ];
    for (u, v, w) in edges {
        d.add_edge(u, v, Weight(w)).expect("vertices exist");
    }
    d
}

/// The sixteen `(target, weight)` pairs of the paths from
/// [`FIG2_SOURCE`], sorted.
pub fn fig2_expected() -> Vec<(usize, u64)> {
    let mut v = vec![
        (11, 16),
        (11, 10),
        (11, 17),
        (11, 11),
        (12, 12),
        (12, 6),
        (12, 13),
        (12, 7),
        (12, 13),
        (12, 18),
        (12, 15),
        (12, 20),
        (13, 11),
        (13, 16),
        (13, 13),
        (13, 18),
    ];
    v.sort_unstable();
    v
}

/// The family `{ℓⁿ} ∪ {ℓⁱr : i < n}`: a left spine `s_0 … s_n` whose
/// vertices each also have a right edge to a leaf `t_i`. Returns the DAG
/// and `s_0`.
pub fn spine_dag(n: usize) -> (DecoratedDag<Weight>, usize) {
    let mut d = DecoratedDag::new();
    let s: Vec<usize> = (0..=n).map(|i| d.add_vertex((), i == n)).collect();
    let t: Vec<usize> = (0..n).map(|_| d.add_vertex((), true)).collect();
    for i in 0..n {
        d.add_edge(s[i], s[i + 1], Weight(1)).expect("vertices exist");
        d.add_edge(s[i], t[i], Weight(0)).expect("vertices exist");
    }
    (d, s[0])
}

/// A marker of the annotation transducer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    X,
    Y,
}

/// Output word letter: 1-based input position and marker.
pub type Mark = (usize, Marker);

/// Product of `word` with a three-state annotation transducer over
/// `{a, b}`: state 0 reads anything unmarked and moves to 1 on a
/// `y`-marked `b`; state 1 reads anything unmarked or `x`-marked and is
/// accepting; a `y`-marked letter moves 1 to the accepting state 2, which
/// reads nothing further. Returns the DAG, its source and its sink.
pub fn transducer_dag(word: &str) -> (LabelledDag<Mark>, usize, usize) {
    let n = word.len();
    let mut d = LabelledDag::new();
    let id = |i: usize, q: usize| i * 3 + q;
    for _ in 0..=n {
        for _ in 0..3 {
            d.add_vertex(false);
        }
    }
    let sink = d.add_vertex(true);
    for (i, c) in word.chars().enumerate() {
        let pos = i + 1;
        let e = |d: &mut LabelledDag<Mark>, p, q, l| d.add_edge(id(i, p), id(pos, q), l).expect("vertices exist");
        e(&mut d, 0, 0, None);
        if c == 'b' {
            e(&mut d, 0, 1, Some((pos, Marker::Y)));
        }
        e(&mut d, 1, 1, None);
        e(&mut d, 1, 1, Some((pos, Marker::X)));
        e(&mut d, 1, 2, Some((pos, Marker::Y)));
    }
    for q in [1, 2] {
        d.add_edge(id(n, q), sink, None).expect("vertices exist");
    }
    (d, id(0, 0), sink)
}

/// The f-SLP `A_k` with `A_0 = a` and `A_{i+1} = A_i ⊖ A_i`, whose value is
/// `a^(2^k)`. Returns the f-SLP and `A_k`.
pub fn power_word(a: Symbol, k: u32) -> (Fslp, NodeId) {
    let mut g = Fslp::new();
    let mut v = g.push(NodeDef::Leaf(a)).expect("leaf");
    for _ in 0..k {
        v = g.push(NodeDef::Hc(v, v)).expect("forest children");
    }
    g.set_root(v).expect("node exists");
    (g, v)
}

/// A chain f-SLP of `n + 1` nodes: `C_0 = a`, `C_{i+1} = b∗ ⊘ C_i` with a
/// shared `b∗` leaf, denoting the path `b(b(…a))` of depth `n`.
pub fn chain(a: Symbol, b: Symbol, n: usize) -> (Fslp, NodeId) {
    let mut g = Fslp::new();
    let mut v = g.push(NodeDef::Leaf(a)).expect("leaf");
    let bc = g.push(NodeDef::LeafCtx(b)).expect("leaf");
    for _ in 0..n {
        v = g.push(NodeDef::Vc(bc, v)).expect("context over forest");
    }
    g.set_root(v).expect("node exists");
    (g, v)
}
