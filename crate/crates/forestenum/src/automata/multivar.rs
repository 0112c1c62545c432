//! Reduction of `k`-ary queries to unary ones.
//!
//! Every vertex labelled `a` is replaced by the sibling run
//! `a@1 a@2 … a@k`, where `a@k` keeps the original children. A vertex with
//! preorder number `p` thus turns into the vertices `k·p, …, k·p + k − 1`,
//! and a set `S'` of preorder numbers in the transformed forest decodes to
//! the tuple `(S_0, …, S_{k−1})` with `S_i = {⌊m/k⌋ : m ∈ S', m mod k = i}`.
//! Component `S_i` corresponds to labels `a@(i+1)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forest::{Alphabet, Symbol};
use crate::fslp::{Fslp, NodeDef, NodeId};
use crate::num::Num;

/// Per symbol the reduction adds at most `MULTIVAR_NODES_PER_SYMBOL · k`
/// nodes beyond the copied inner nodes.
pub const MULTIVAR_NODES_PER_SYMBOL: usize = 3;

/// Name of the `i`-th copy (1-based) of label `name`.
pub fn copy_name(name: &str, i: usize) -> String {
    format!("{name}@{i}")
}

/// Maps answers of the reduced query back to tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultivarDecoder {
    k: u64,
}

impl MultivarDecoder {
    pub fn arity(&self) -> usize {
        self.k as usize
    }

    pub fn decode(&self, s: &[Num]) -> Vec<Vec<Num>> {
        let mut out = vec![Vec::new(); self.k as usize];
        for m in s {
            let (q, r) = m.div_rem_u64(self.k);
            out[r as usize].push(q);
        }
        for v in &mut out {
            v.sort();
        }
        out
    }
}

/// The reduced f-SLP, the image of every old node and the decoder.
#[derive(Clone, Debug)]
pub struct MultivarReduction {
    pub fslp: Fslp,
    pub map: Vec<NodeId>,
    pub decoder: MultivarDecoder,
}

struct Chains<'a> {
    g: Fslp,
    alphabet: &'a mut Alphabet,
    k: usize,
    forest: HashMap<Symbol, NodeId>,
    context: HashMap<Symbol, NodeId>,
    copies: HashMap<Symbol, Vec<NodeId>>,
}

impl Chains<'_> {
    fn copies(&mut self, a: Symbol) -> Result<Vec<NodeId>> {
        if let Some(c) = self.copies.get(&a) {
            return Ok(c.clone());
        }
        let base = self.alphabet.name(a).to_owned();
        let mut c = Vec::with_capacity(self.k);
        for i in 1..=self.k {
            let s = self.alphabet.intern(&copy_name(&base, i));
            c.push(self.g.push(NodeDef::Leaf(s))?);
        }
        self.copies.insert(a, c.clone());
        Ok(c)
    }

    /// Balanced `⊖` over `parts`.
    fn concat(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.len() == 1 {
            return Ok(parts[0]);
        }
        let (l, r) = parts.split_at(parts.len() / 2);
        let l = self.concat(l)?;
        let r = self.concat(r)?;
        self.g.push(NodeDef::Hc(l, r))
    }

    fn forest(&mut self, a: Symbol) -> Result<NodeId> {
        if let Some(&v) = self.forest.get(&a) {
            return Ok(v);
        }
        let c = self.copies(a)?;
        let v = self.concat(&c)?;
        self.forest.insert(a, v);
        Ok(v)
    }

    fn context(&mut self, a: Symbol) -> Result<NodeId> {
        if let Some(&v) = self.context.get(&a) {
            return Ok(v);
        }
        let mut c = self.copies(a)?;
        let last = self.alphabet.intern(&copy_name(self.alphabet.name(a), self.k));
        *c.last_mut().expect("k ≥ 2") = self.g.push(NodeDef::LeafCtx(last))?;
        let v = self.concat(&c)?;
        self.context.insert(a, v);
        Ok(v)
    }
}

/// Applies the reduction to every node of `g`; new labels `a@i` are interned
/// into `alphabet`.
pub fn multivar_reduce(g: &Fslp, k: usize, alphabet: &mut Alphabet) -> Result<MultivarReduction> {
    if k < 2 {
        return Err(Error::Invalid(format!("arity must be at least 2, got {k}")));
    }
    let mut ch = Chains {
        g: Fslp::new(),
        alphabet,
        k,
        forest: HashMap::new(),
        context: HashMap::new(),
        copies: HashMap::new(),
    };
    let mut map = Vec::with_capacity(g.len());
    for def in g.nodes() {
        let v = match *def {
            NodeDef::Leaf(a) => ch.forest(a)?,
            NodeDef::LeafCtx(a) => ch.context(a)?,
            NodeDef::Hc(l, r) => ch.g.push(NodeDef::Hc(map[l.index()], map[r.index()]))?,
            NodeDef::Vc(l, r) => ch.g.push(NodeDef::Vc(map[l.index()], map[r.index()]))?,
        };
        map.push(v);
    }
    let mut out = ch.g;
    if let Some(r) = g.root() {
        out.set_root(map[r.index()])?;
    }
    Ok(MultivarReduction { fslp: out, map, decoder: MultivarDecoder { k: k as u64 } })
}
