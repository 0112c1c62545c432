//! Nondeterministic stepwise tree automata.
//!
//! An automaton `(Q, δ, ι, q0, qf)` has transitions `δ ⊆ Q³` and an
//! initialization map `ι: Σ × {0,1} → 2^Q`. A run assigns each vertex `v`
//! three states `(ρ0, ρ1, ρf)(v) ∈ δ`: the state before `v`, the state
//! reached after `v`'s children (or an `ι` state at a leaf) and the state
//! after `v`. Siblings chain `ρf` into `ρ0`; the first child of `u` starts
//! in `ι(λ(u))`. A forest is accepted if a run leads from `q0` before the
//! first root to `qf` after the last root.
//!
//! Text format:
//!
//! ```text
//! nsta v1
//! states 2
//! iota a 1 1        # ι(a, 1) ∋ 1
//! iota * 0 0        # default for labels without their own entry
//! trans 0 1 1
//! init 0
//! final 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forest::{Alphabet, Forest, Symbol};
use crate::fslp::text::{tokenize, write_token};

/// Maximum number of states (states are packed into bytes).
pub const MAX_STATES: u32 = 256;

/// A nondeterministic stepwise tree automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nsta {
    m: u32,
    delta: Vec<(u32, u32, u32)>,
    iota: BTreeMap<(Symbol, bool), Vec<u32>>,
    default_iota: Option<[Vec<u32>; 2]>,
    init: u32,
    fin: u32,
}

/// A relation on at most 256 states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Rel {
    rows: Vec<[u64; 4]>,
}

impl Rel {
    pub(crate) fn empty(m: usize) -> Rel {
        Rel { rows: vec![[0; 4]; m] }
    }

    pub(crate) fn identity(m: usize) -> Rel {
        let mut r = Rel::empty(m);
        for i in 0..m {
            r.set(i, i);
        }
        r
    }

    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn compose(&self, other: &Rel) -> Rel {
        let m = self.rows.len();
        let mut out = Rel::empty(m);
        for i in 0..m {
            for k in 0..m {
                if self.get(i, k) {
                    for w in 0..4 {
                        out.rows[i][w] |= other.rows[k][w];
                    }
                }
            }
        }
        out
    }
}

impl Nsta {
    /// Builds an automaton; states are `0..m`.
    pub fn new(m: u32, init: u32, fin: u32) -> Result<Nsta> {
        if m == 0 || m > MAX_STATES {
            return Err(Error::Invalid(format!("state count {m} outside 1..={MAX_STATES}")));
        }
        if init >= m || fin >= m {
            return Err(Error::Invalid("initial or final state out of range".into()));
        }
        Ok(Nsta { m, delta: Vec::new(), iota: BTreeMap::new(), default_iota: None, init, fin })
    }

    fn check_state(&self, q: u32) -> Result<()> {
        if q < self.m {
            Ok(())
        } else {
            Err(Error::Invalid(format!("state {q} out of range (automaton has {} states)", self.m)))
        }
    }

    pub fn add_transition(&mut self, p: u32, q: u32, r: u32) -> Result<()> {
        for s in [p, q, r] {
            self.check_state(s)?;
        }
        if let Err(pos) = self.delta.binary_search(&(p, q, r)) {
            self.delta.insert(pos, (p, q, r));
        }
        Ok(())
    }

    /// Adds `states` to `ι(a, bit)`.
    pub fn add_iota(&mut self, a: Symbol, bit: bool, states: &[u32]) -> Result<()> {
        for &q in states {
            self.check_state(q)?;
        }
        let e = self.iota.entry((a, bit)).or_default();
        e.extend_from_slice(states);
        e.sort_unstable();
        e.dedup();
        self.iota.entry((a, !bit)).or_default();
        Ok(())
    }

    /// Adds `states` to the default `ι` used for labels without entries.
    pub fn add_default_iota(&mut self, bit: bool, states: &[u32]) -> Result<()> {
        for &q in states {
            self.check_state(q)?;
        }
        let d = self.default_iota.get_or_insert_with(Default::default);
        let e = &mut d[usize::from(bit)];
        e.extend_from_slice(states);
        e.sort_unstable();
        e.dedup();
        Ok(())
    }

    pub fn states(&self) -> u32 {
        self.m
    }

    pub fn init(&self) -> u32 {
        self.init
    }

    pub fn fin(&self) -> u32 {
        self.fin
    }

    pub fn transitions(&self) -> &[(u32, u32, u32)] {
        &self.delta
    }

    /// `ι(a, bit)`.
    pub fn iota(&self, a: Symbol, bit: bool) -> &[u32] {
        if let Some(v) = self.iota.get(&(a, bit)) {
            return v;
        }
        match &self.default_iota {
            Some(d) => &d[usize::from(bit)],
            None => &[],
        }
    }

    /// Whether `a` has its own `ι` entry or a default exists.
    pub fn knows(&self, a: Symbol) -> bool {
        self.default_iota.is_some() || self.iota.contains_key(&(a, false))
    }

    /// Labels with explicit `ι` entries.
    pub fn labels(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.iota.keys().map(|&(a, _)| a).collect();
        v.dedup();
        v
    }

    /// Relation `{(p, p') : (p, r, p') ∈ δ for some r ∈ mid}`.
    fn wrap(&self, mid: &[bool]) -> Rel {
        let mut r = Rel::empty(self.m as usize);
        for &(p, q, pf) in &self.delta {
            if mid[q as usize] {
                r.set(p as usize, pf as usize);
            }
        }
        r
    }

    /// Whether the forest with selected vertices `selected` (preorder
    /// numbers) is accepted.
    pub fn accepts(&self, f: &Forest, selected: &[usize]) -> bool {
        let m = self.m as usize;
        let mut sel = vec![false; f.len()];
        for &v in selected {
            if v < f.len() {
                sel[v] = true;
            }
        }
        // Reachability relation of each subtree, computed children first.
        let mut rel: Vec<Option<Rel>> = vec![None; f.len()];
        for v in (0..f.len()).rev() {
            let start = self.iota(f.label(v), sel[v]);
            let mut mid = vec![false; m];
            let mut inner = Rel::identity(m);
            for &c in f.children(v) {
                inner = inner.compose(rel[c].as_ref().expect("children first"));
            }
            for &q in start {
                for (q2, slot) in mid.iter_mut().enumerate() {
                    if inner.get(q as usize, q2) {
                        *slot = true;
                    }
                }
            }
            for &c in f.children(v) {
                rel[c] = None;
            }
            rel[v] = Some(self.wrap(&mid));
        }
        let mut total = Rel::identity(m);
        for &r in f.roots() {
            total = total.compose(rel[r].as_ref().expect("computed"));
        }
        total.get(self.init as usize, self.fin as usize)
    }
}

/// Convenience wrapper for [`Nsta::accepts`].
pub fn nsta_accepts(a: &Nsta, f: &Forest, selected: &[usize]) -> bool {
    a.accepts(f, selected)
}

fn ferr(line: usize, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

/// Parses the `nsta v1` format. The label `*` in an `iota` line sets the
/// default for labels without an entry of their own.
pub fn parse_nsta(text: &str, alphabet: &mut Alphabet) -> Result<Nsta> {
    let mut header = false;
    let mut m: Option<u32> = None;
    let mut init = None;
    let mut fin = None;
    let mut trans = Vec::new();
    let mut iotas: Vec<(usize, Option<Symbol>, bool, Vec<u32>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        if !header {
            if toks != ["nsta", "v1"] {
                return Err(ferr(lineno, "expected header `nsta v1`"));
            }
            header = true;
            continue;
        }
        let num = |s: &str| -> Result<u32> {
            s.parse().map_err(|_| ferr(lineno, format!("`{s}` is not a state")))
        };
        match (toks[0].as_str(), toks.len()) {
            ("states", 2) => {
                if m.is_some() {
                    return Err(ferr(lineno, "state count given twice"));
                }
                m = Some(num(&toks[1])?);
            }
            ("init", 2) => init = Some((lineno, num(&toks[1])?)),
            ("final", 2) => fin = Some((lineno, num(&toks[1])?)),
            ("trans", 4) => trans.push((lineno, num(&toks[1])?, num(&toks[2])?, num(&toks[3])?)),
            ("iota", n) if n >= 3 => {
                let bit = match toks[2].as_str() {
                    "0" => false,
                    "1" => true,
                    b => return Err(ferr(lineno, format!("selection bit must be 0 or 1, got `{b}`"))),
                };
                let sym = (toks[1] != "*").then(|| alphabet.intern(&toks[1]));
                let qs = toks[3..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                iotas.push((lineno, sym, bit, qs));
            }
            (d, _) => return Err(ferr(lineno, format!("malformed `{d}` line"))),
        }
    }
    if !header {
        return Err(ferr(1, "expected header `nsta v1`"));
    }
    let m = m.ok_or_else(|| ferr(0, "missing `states` line"))?;
    let (il, q0) = init.ok_or_else(|| ferr(0, "missing `init` line"))?;
    let (fl, qf) = fin.ok_or_else(|| ferr(0, "missing `final` line"))?;
    let mut a = Nsta::new(m, 0, 0).map_err(|e| ferr(0, e.to_string()))?;
    a.check_state(q0).map_err(|e| ferr(il, e.to_string()))?;
    a.check_state(qf).map_err(|e| ferr(fl, e.to_string()))?;
    a.init = q0;
    a.fin = qf;
    for (l, p, q, r) in trans {
        a.add_transition(p, q, r).map_err(|e| ferr(l, e.to_string()))?;
    }
    for (l, sym, bit, qs) in iotas {
        match sym {
            Some(s) => a.add_iota(s, bit, &qs),
            None => a.add_default_iota(bit, &qs),
        }
        .map_err(|e| ferr(l, e.to_string()))?;
    }
    Ok(a)
}

/// Writes the `nsta v1` text of `a`.
pub fn serialize_nsta(a: &Nsta, alphabet: &Alphabet) -> String {
    let mut out = format!("nsta v1\nstates {}\n", a.m);
    if let Some(d) = &a.default_iota {
        for bit in [false, true] {
            let _ = write!(out, "iota * {}", u8::from(bit));
            for q in &d[usize::from(bit)] {
                let _ = write!(out, " {q}");
            }
            out.push('\n');
        }
    }
    for (&(s, bit), qs) in &a.iota {
        out.push_str("iota ");
        write_token(&mut out, alphabet.name(s));
        let _ = write!(out, " {}", u8::from(bit));
        for q in qs {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
    }
    for &(p, q, r) in &a.delta {
        let _ = writeln!(out, "trans {p} {q} {r}");
    }
    let _ = writeln!(out, "init {}\nfinal {}", a.init, a.fin);
    out
}

/// Automata used in tests, examples and benchmarks.
pub mod library {
    use super::*;

    /// Selects exactly one vertex, labelled `target`, anywhere in the
    /// forest. Every label in `labels` is part of the alphabet.
    pub fn select_one_labelled(labels: &[Symbol], target: Symbol) -> Nsta {
        // 0: nothing selected yet, 1: selected vertex seen.
        let mut a = Nsta::new(2, 0, 1).expect("valid");
        for &s in labels {
            a.add_iota(s, false, &[0]).expect("valid");
            if s == target {
                a.add_iota(s, true, &[1]).expect("valid");
            }
        }
        add_counting_transitions(&mut a);
        a
    }

    /// Selects exactly one vertex, with any label.
    pub fn select_one_any() -> Nsta {
        let mut a = Nsta::new(2, 0, 1).expect("valid");
        a.add_default_iota(false, &[0]).expect("valid");
        a.add_default_iota(true, &[1]).expect("valid");
        add_counting_transitions(&mut a);
        a
    }

    /// Selects any set of vertices carrying `target` (including ∅).
    pub fn select_all_labelled(labels: &[Symbol], target: Symbol) -> Nsta {
        let mut a = Nsta::new(1, 0, 0).expect("valid");
        for &s in labels {
            a.add_iota(s, false, &[0]).expect("valid");
            if s == target {
                a.add_iota(s, true, &[0]).expect("valid");
            }
        }
        a.add_transition(0, 0, 0).expect("valid");
        a
    }

    /// Accepts exactly one selection: the set of all vertices carrying
    /// `target`.
    pub fn select_exactly_labelled(labels: &[Symbol], target: Symbol) -> Nsta {
        let mut a = Nsta::new(1, 0, 0).expect("valid");
        for &s in labels {
            a.add_iota(s, s == target, &[0]).expect("valid");
        }
        a.add_transition(0, 0, 0).expect("valid");
        a
    }

    /// Transitions of a one-bit counter: the state after a vertex records
    /// whether a selected vertex appeared in the prefix, its subtree
    /// included; at most one selection is allowed.
    fn add_counting_transitions(a: &mut Nsta) {
        for (p, q, r) in [(0, 0, 0), (0, 1, 1), (1, 0, 1)] {
            a.add_transition(p, q, r).expect("valid");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;
    use crate::forest::parse_term;

    #[test]
    fn selects_b_vertices_of_running_example() {
        let mut al = Alphabet::new();
        let f = parse_term("a(ba(a))bcb(c(ab))", &mut al).unwrap();
        let labels: Vec<Symbol> = al.symbols().collect();
        let a = select_one_labelled(&labels, al.get("b").unwrap());
        let hits: Vec<usize> = (0..f.len()).filter(|&v| a.accepts(&f, &[v])).collect();
        assert_eq!(hits, vec![1, 4, 6, 9]);
        assert!(!a.accepts(&f, &[]));
        assert!(!a.accepts(&f, &[1, 4]));
    }

    #[test]
    fn empty_forest_accepts_iff_initial_is_final() {
        let f = Forest::default();
        assert!(select_all_labelled(&[], Symbol(0)).accepts(&f, &[]));
        assert!(!select_one_any().accepts(&f, &[]));
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let mut al = Alphabet::new();
        let text = "nsta v1\nstates 2\niota * 0 0\niota * 1 1\niota b 1 1\ntrans 0 0 0\ntrans 0 1 1\ntrans 1 0 1\ninit 0\nfinal 1\n";
        let a = parse_nsta(text, &mut al).unwrap();
        let again = serialize_nsta(&a, &al);
        assert_eq!(parse_nsta(&again, &mut al).unwrap(), a);
        assert_eq!(serialize_nsta(&parse_nsta(&again, &mut al).unwrap(), &al), again);
        assert!(a.knows(al.intern("zzz")));
        for (bad, line) in [
            ("nsta v2\n", 1),
            ("nsta v1\nstates 2\ntrans 0 0 5\ninit 0\nfinal 1\n", 3),
            ("nsta v1\nstates 2\niota a 2 0\ninit 0\nfinal 1\n", 3),
            ("nsta v1\nstates 2\ninit 7\nfinal 1\n", 3),
        ] {
            match parse_nsta(bad, &mut al) {
                Err(Error::Format { line: l, .. }) => assert_eq!(l, line, "{bad:?}"),
                other => panic!("{bad:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn relation_composition() {
        let mut r = Rel::empty(3);
        r.set(0, 1);
        let mut s = Rel::empty(3);
        s.set(1, 2);
        let t = r.compose(&s);
        assert!(t.get(0, 2));
        assert!(!t.get(0, 1));
    }
}
