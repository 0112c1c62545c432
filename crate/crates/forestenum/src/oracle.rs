//! Brute-force reference implementations.
//!
//! Nothing here touches configuration sets, product DAGs or relation
//! composition: acceptance is decided by guessing runs vertex by vertex,
//! answer families by sweeping all subsets, and paths by plain DFS.

use std::collections::HashSet;

use crate::automata::{dbuta_run, Dbuta, Nsta};
use crate::error::{Error, Result};
use crate::forest::{Expr, Forest};
use crate::pathenum::{DecoratedDag, Morphism};

/// Limits checked before any exponential loop starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest forest (or leaf count) a subset sweep accepts.
    pub max_vertices: usize,
    /// Largest number of subsets a sweep may visit.
    pub max_subsets: u64,
    /// Largest number of paths a DFS may produce.
    pub max_paths: u64,
    /// Largest automaton the run guesser accepts.
    pub max_states: u32,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 16, max_subsets: 1 << 16, max_paths: 100_000, max_states: 256 }
    }
}

impl OracleBudget {
    fn check_subsets(&self, n: usize) -> Result<()> {
        if n > self.max_vertices || n >= 64 || (1u64 << n) > self.max_subsets {
            return Err(Error::OracleBudget(format!(
                "{n} vertices exceed the subset budget ({} vertices, {} subsets)",
                self.max_vertices, self.max_subsets
            )));
        }
        Ok(())
    }
}

/// How a subset sweep is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    /// Split the subset space across the rayon pool. Without the `parallel`
    /// feature this runs sequentially.
    #[default]
    Parallel,
    Sequential,
}

fn sweep(n: usize, exec: Exec, keep: impl Fn(u64) -> bool + Sync) -> Vec<u64> {
    let total = 1u64 << n;
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return (0..total).into_par_iter().filter(|&m| keep(m)).collect();
    }
    let _ = exec;
    (0..total).filter(|&m| keep(m)).collect()
}

fn mask_to_set(m: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| m >> i & 1 == 1).collect()
}

fn sort_family(mut fam: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    fam.sort();
    fam
}

/// Whether `a` has an accepting run on `f` annotated with `selected`,
/// decided by guessing the state triple of every vertex in preorder.
pub fn brute_nsta_accepts(a: &Nsta, f: &Forest, selected: &[bool]) -> bool {
    Guesser::new(a, f, selected).accepts()
}

struct Guesser<'a> {
    a: &'a Nsta,
    f: &'a Forest,
    sel: &'a [bool],
    /// Previous sibling (or previous root) of each vertex.
    prev: Vec<Option<usize>>,
    is_last: Vec<bool>,
    rho: Vec<(u32, u32, u32)>,
    dead: HashSet<Vec<u32>>,
}

impl<'a> Guesser<'a> {
    fn new(a: &'a Nsta, f: &'a Forest, sel: &'a [bool]) -> Self {
        let n = f.len();
        let mut prev = vec![None; n];
        let mut is_last = vec![false; n];
        let mut mark = |list: &[usize]| {
            for (i, &v) in list.iter().enumerate() {
                prev[v] = i.checked_sub(1).map(|j| list[j]);
            }
            if let Some(&v) = list.last() {
                is_last[v] = true;
            }
        };
        mark(f.roots());
        for v in 0..n {
            mark(f.children(v));
        }
        Guesser { a, f, sel, prev, is_last, rho: vec![(0, 0, 0); n], dead: HashSet::new() }
    }

    fn accepts(&mut self) -> bool {
        if self.f.is_empty() {
            return self.a.init() == self.a.fin();
        }
        self.place(0)
    }

    fn ancestors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut u = self.f.parent(v);
        while let Some(p) = u {
            out.push(p);
            u = self.f.parent(p);
        }
        out
    }

    /// Everything the runs on vertices `v..` can depend on: the start
    /// state forced on `v` and the states fixed on its ancestors.
    fn key(&self, v: usize) -> Vec<u32> {
        let mut k = vec![v as u32];
        if let Some(p) = self.prev[v] {
            k.push(self.rho[p].2);
        } else {
            k.push(u32::MAX);
        }
        for u in self.ancestors(v) {
            k.push(self.rho[u].1);
            k.push(self.rho[u].2);
        }
        k
    }

    fn place(&mut self, v: usize) -> bool {
        if v == self.f.len() {
            return true;
        }
        let key = self.key(v);
        if self.dead.contains(&key) {
            return false;
        }
        let label = self.f.label(v);
        let leaf = self.f.children(v).is_empty();
        let parent = self.f.parent(v);
        for &(p, q, r) in self.a.transitions() {
            let start_ok = match (self.prev[v], parent) {
                (Some(s), _) => p == self.rho[s].2,
                (None, None) => p == self.a.init(),
                (None, Some(u)) => self.a.iota(self.f.label(u), self.sel[u]).contains(&p),
            };
            if !start_ok {
                continue;
            }
            if leaf && !self.a.iota(label, self.sel[v]).contains(&q) {
                continue;
            }
            if self.is_last[v] {
                let want = parent.map_or(self.a.fin(), |u| self.rho[u].1);
                if r != want {
                    continue;
                }
            }
            self.rho[v] = (p, q, r);
            if self.place(v + 1) {
                return true;
            }
        }
        self.dead.insert(key);
        false
    }
}

/// `select(a, f)`: every vertex set whose annotation `a` accepts, each
/// sorted, the family sorted.
pub fn brute_select(a: &Nsta, f: &Forest, budget: &OracleBudget) -> Result<Vec<Vec<usize>>> {
    brute_select_with(a, f, budget, Exec::default())
}

pub fn brute_select_with(a: &Nsta, f: &Forest, budget: &OracleBudget, exec: Exec) -> Result<Vec<Vec<usize>>> {
    let n = f.len();
    budget.check_subsets(n)?;
    if a.states() > budget.max_states {
        return Err(Error::OracleBudget(format!("{} states exceed {}", a.states(), budget.max_states)));
    }
    let masks = sweep(n, exec, |m| {
        let sel: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
        brute_nsta_accepts(a, f, &sel)
    });
    Ok(sort_family(masks.into_iter().map(|m| mask_to_set(m, n)).collect()))
}

/// `select(b, e)` as sets of leaf ranks (left to right).
pub fn brute_dbuta_select(b: &dyn Dbuta, e: &Expr, budget: &OracleBudget) -> Result<Vec<Vec<usize>>> {
    let n = e.leaf_count();
    budget.check_subsets(n)?;
    let mut fam = Vec::new();
    for m in 0..1u64 << n {
        let sel: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
        if b.is_final(dbuta_run(b, e, &sel)?) {
            fam.push(mask_to_set(m, n));
        }
    }
    Ok(sort_family(fam))
}

/// All paths from `s` to a target as `(target, composed morphism)`, in
/// depth-first order, left edges first.
pub fn brute_paths<M: Morphism>(d: &DecoratedDag<M>, s: usize, budget: &OracleBudget) -> Result<Vec<(usize, M)>> {
    if s >= d.len() {
        return Err(Error::Invalid(format!("unknown vertex {s}")));
    }
    let mut out = Vec::new();
    let mut stack = vec![(s, M::identity(d.object(s)))];
    let mut visited = 0u64;
    while let Some((v, m)) = stack.pop() {
        visited += 1;
        if visited > budget.max_paths.saturating_mul(d.len().max(1) as u64) {
            return Err(Error::OracleBudget(format!("more than {} path prefixes", budget.max_paths)));
        }
        if d.is_target(v) {
            if out.len() as u64 == budget.max_paths {
                return Err(Error::OracleBudget(format!("more than {} paths", budget.max_paths)));
            }
            out.push((v, m.clone()));
        }
        for (t, e) in d.out_edges(v).iter().rev() {
            stack.push((*t, m.then(e)));
        }
    }
    Ok(out)
}
