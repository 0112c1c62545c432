//! Seeded random instances for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::Nsta;
use crate::forest::{Expr, Forest, Symbol, Ty};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A forest with `n` vertices: each vertex after the first attaches at a
/// uniformly chosen depth between 0 and one below its predecessor.
pub fn random_forest(rng: &mut GenRng, n: usize, symbols: &[Symbol]) -> Forest {
    let mut depths = Vec::with_capacity(n);
    let mut d = 0usize;
    for i in 0..n {
        if i > 0 {
            d = rng.gen_range(0..=d + 1);
        }
        depths.push(d);
    }
    let labels = (0..n).map(|_| *symbols.choose(rng).expect("non-empty alphabet")).collect();
    Forest::from_depths(labels, &depths).expect("depth sequence is valid")
}

/// An nSTA with `m` states over `symbols`: every transition and every
/// initial-state entry is present with probability `density`.
pub fn random_nsta(rng: &mut GenRng, m: u32, symbols: &[Symbol], density: f64) -> Nsta {
    let mut a = Nsta::new(m, rng.gen_range(0..m), rng.gen_range(0..m)).expect("valid state count");
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                if rng.gen_bool(density) {
                    a.add_transition(p, q, r).expect("states in range");
                }
            }
        }
    }
    for &s in symbols {
        for bit in [false, true] {
            let states: Vec<u32> = (0..m).filter(|_| rng.gen_bool(density)).collect();
            a.add_iota(s, bit, &states).expect("states in range");
        }
    }
    a
}

/// A valid expression of type `ty` with exactly `leaves` leaves
/// (`leaves ≥ 1`).
pub fn random_expr(rng: &mut GenRng, leaves: usize, ty: Ty, symbols: &[Symbol]) -> Expr {
    assert!(leaves >= 1, "expressions have at least one leaf");
    let s = *symbols.choose(rng).expect("non-empty alphabet");
    if leaves == 1 {
        return match ty {
            Ty::Forest => Expr::leaf(s),
            Ty::Context => Expr::leaf_ctx(s),
        };
    }
    let k = rng.gen_range(1..leaves);
    let (lt, rt, hc) = match (ty, rng.gen_range(0..2)) {
        (Ty::Forest, 0) => (Ty::Forest, Ty::Forest, true),
        (Ty::Forest, _) => (Ty::Context, Ty::Forest, false),
        (Ty::Context, 0) => {
            if rng.gen_bool(0.5) {
                (Ty::Forest, Ty::Context, true)
            } else {
                (Ty::Context, Ty::Forest, true)
            }
        }
        (Ty::Context, _) => (Ty::Context, Ty::Context, false),
    };
    let l = random_expr(rng, k, lt, symbols);
    let r = random_expr(rng, leaves - k, rt, symbols);
    if hc {
        Expr::hc(l, r)
    } else {
        Expr::vc(l, r)
    }
}
