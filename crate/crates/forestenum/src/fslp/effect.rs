//! Preorder effects: the affine maps that carry preorder data from a vertex
//! to one of its children.
//!
//! Preorder data of a forest is a single offset `x`; that of a context is a
//! pair `(x, y)` where `y` is the size of whatever will fill the hole. Every
//! effect has the form
//!
//! ```text
//! x' = x + α·y + c        y' = β·y + d
//! ```
//!
//! and falls into one of seven shapes, see [`Shape`]. Composition is
//! diagrammatic: `f.compose(g)` first applies `f`, then `g`.

use std::fmt;

use crate::error::{Error, Result};
use crate::forest::Ty;
use crate::num::Num;

/// The shapes of preorder effects. The edge effects of an f-SLP produce the
/// first six directly; `M11b` and `M11c` also arise from composition
/// (`M10b` then `M01`, and `M10a` then `M01`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `x ↦ x + c`
    M00,
    /// `x ↦ (x + c, d)`
    M01,
    /// `(x, y) ↦ x + c`
    M10a,
    /// `(x, y) ↦ x + y + c`
    M10b,
    /// `(x, y) ↦ (x + c, y + d)`
    M11a,
    /// `(x, y) ↦ (x + y + c, d)`
    M11b,
    /// `(x, y) ↦ (x + c, d)`
    M11c,
}

impl Shape {
    pub fn source(self) -> Ty {
        match self {
            Shape::M00 | Shape::M01 => Ty::Forest,
            _ => Ty::Context,
        }
    }

    pub fn target(self) -> Ty {
        match self {
            Shape::M00 | Shape::M10a | Shape::M10b => Ty::Forest,
            _ => Ty::Context,
        }
    }

    fn alpha(self) -> bool {
        matches!(self, Shape::M10b | Shape::M11b)
    }

    fn beta(self) -> bool {
        self == Shape::M11a
    }

    fn from_parts(source: Ty, target: Ty, alpha: bool, beta: bool) -> Shape {
        match (source, target) {
            (Ty::Forest, Ty::Forest) => Shape::M00,
            (Ty::Forest, Ty::Context) => Shape::M01,
            (Ty::Context, Ty::Forest) if alpha => Shape::M10b,
            (Ty::Context, Ty::Forest) => Shape::M10a,
            (Ty::Context, Ty::Context) if alpha => Shape::M11b,
            (Ty::Context, Ty::Context) if beta => Shape::M11a,
            (Ty::Context, Ty::Context) => Shape::M11c,
        }
    }
}

/// Preorder data of a forest (`x`) or a context (`x`, `y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pod {
    Forest(Num),
    Context(Num, Num),
}

impl Pod {
    /// Preorder data of a root: every offset is zero.
    pub fn root(ty: Ty) -> Pod {
        match ty {
            Ty::Forest => Pod::Forest(Num::ZERO),
            Ty::Context => Pod::Context(Num::ZERO, Num::ZERO),
        }
    }

    pub fn x(&self) -> &Num {
        match self {
            Pod::Forest(x) | Pod::Context(x, _) => x,
        }
    }
}

/// An affine preorder effect. Unused constants are kept at zero so that
/// structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreorderEffect {
    pub shape: Shape,
    pub c: Num,
    pub d: Num,
}

impl PreorderEffect {
    pub fn new(shape: Shape, c: Num, d: Num) -> Self {
        let d = if shape.target() == Ty::Context { d } else { Num::ZERO };
        PreorderEffect { shape, c, d }
    }

    pub fn identity(ty: Ty) -> Self {
        match ty {
            Ty::Forest => PreorderEffect::new(Shape::M00, Num::ZERO, Num::ZERO),
            Ty::Context => PreorderEffect::new(Shape::M11a, Num::ZERO, Num::ZERO),
        }
    }

    pub fn source(&self) -> Ty {
        self.shape.source()
    }

    pub fn target(&self) -> Ty {
        self.shape.target()
    }

    /// `self` followed by `next`, or an error if the types do not meet.
    pub fn compose(&self, next: &PreorderEffect) -> Result<PreorderEffect> {
        if self.target() != next.source() {
            return Err(Error::Incompatible(format!(
                "{:?} ends at type {} but {:?} starts at type {}",
                self.shape,
                self.target().bit(),
                next.shape,
                next.source().bit()
            )));
        }
        Ok(self.then_unchecked(next))
    }

    /// Composition without the type check (debug-asserted).
    pub fn then_unchecked(&self, next: &PreorderEffect) -> PreorderEffect {
        debug_assert_eq!(self.target(), next.source());
        // x1 = x + a1 y + c1, y1 = b1 y + d1; x2 = x1 + a2 y1 + c2, y2 = b2 y1 + d2.
        let (a1, b1) = (self.shape.alpha(), self.shape.beta());
        let (a2, b2) = (next.shape.alpha(), next.shape.beta());
        let mid_ctx = self.target() == Ty::Context;
        let mut c = &self.c + &next.c;
        if mid_ctx && a2 {
            c = c + &self.d;
        }
        let alpha = a1 || (mid_ctx && a2 && b1);
        let beta = b1 && b2;
        let d = if b2 { &self.d + &next.d } else { next.d.clone() };
        let shape = Shape::from_parts(self.source(), next.target(), alpha, beta);
        PreorderEffect::new(shape, c, d)
    }

    pub fn apply(&self, pod: &Pod) -> Result<Pod> {
        let (x, y) = match (pod, self.source()) {
            (Pod::Forest(x), Ty::Forest) => (x, &Num::ZERO),
            (Pod::Context(x, y), Ty::Context) => (x, y),
            _ => return Err(Error::Incompatible("preorder data of the wrong type".into())),
        };
        let mut nx = x + &self.c;
        if self.shape.alpha() {
            nx = nx + y;
        }
        Ok(match self.target() {
            Ty::Forest => Pod::Forest(nx),
            Ty::Context => {
                let ny = if self.shape.beta() { y + &self.d } else { self.d.clone() };
                Pod::Context(nx, ny)
            }
        })
    }
}

impl fmt::Debug for PreorderEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, d) = (&self.c, &self.d);
        match self.shape {
            Shape::M00 => write!(f, "x -> x+{c}"),
            Shape::M01 => write!(f, "x -> (x+{c}, {d})"),
            Shape::M10a => write!(f, "(x,y) -> x+{c}"),
            Shape::M10b => write!(f, "(x,y) -> x+y+{c}"),
            Shape::M11a => write!(f, "(x,y) -> (x+{c}, y+{d})"),
            Shape::M11b => write!(f, "(x,y) -> (x+y+{c}, {d})"),
            Shape::M11c => write!(f, "(x,y) -> (x+{c}, {d})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(shape: Shape, c: u64, d: u64) -> PreorderEffect {
        PreorderEffect::new(shape, Num::from(c), Num::from(d))
    }

    fn all() -> Vec<PreorderEffect> {
        let mut v = Vec::new();
        for s in [
            Shape::M00,
            Shape::M01,
            Shape::M10a,
            Shape::M10b,
            Shape::M11a,
            Shape::M11b,
            Shape::M11c,
        ] {
            for (c, d) in [(0, 0), (1, 0), (0, 2), (3, 5)] {
                v.push(e(s, c, d));
            }
        }
        v
    }

    fn pods(ty: Ty) -> Vec<Pod> {
        match ty {
            Ty::Forest => (0..4u64).map(|x| Pod::Forest(x.into())).collect(),
            Ty::Context => (0..3u64)
                .flat_map(|x| (0..3u64).map(move |y| Pod::Context(x.into(), y.into())))
                .collect(),
        }
    }

    #[test]
    fn composition_agrees_with_sequential_application() {
        for f in all() {
            for g in all() {
                if f.target() != g.source() {
                    assert!(f.compose(&g).is_err());
                    continue;
                }
                let h = f.compose(&g).unwrap();
                for p in pods(f.source()) {
                    let seq = g.apply(&f.apply(&p).unwrap()).unwrap();
                    assert_eq!(h.apply(&p).unwrap(), seq, "{f:?} then {g:?}");
                }
            }
        }
    }

    #[test]
    fn composition_is_associative() {
        for f in all() {
            for g in all().into_iter().filter(|g| g.source() == f.target()) {
                for h in all().into_iter().filter(|h| h.source() == g.target()) {
                    let l = f.compose(&g).unwrap().compose(&h).unwrap();
                    let r = f.compose(&g.compose(&h).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn identities_are_neutral() {
        for f in all() {
            let l = PreorderEffect::identity(f.source()).compose(&f).unwrap();
            let r = f.compose(&PreorderEffect::identity(f.target())).unwrap();
            assert_eq!(l, f);
            assert_eq!(r, f);
        }
    }

    #[test]
    fn left_forest_then_left_context_is_seventh_shape() {
        let h = e(Shape::M10a, 2, 0).compose(&e(Shape::M01, 1, 7)).unwrap();
        assert_eq!(h.shape, Shape::M11c);
        let p = Pod::Context(Num::from(10u64), Num::from(4u64));
        assert_eq!(h.apply(&p).unwrap(), Pod::Context(Num::from(13u64), Num::from(7u64)));
    }

    #[test]
    fn m11b_arises_only_by_composition() {
        let h = e(Shape::M10b, 2, 0).compose(&e(Shape::M01, 1, 7)).unwrap();
        assert_eq!(h.shape, Shape::M11b);
        assert_eq!(h.c, Num::from(3u64));
        assert_eq!(h.d, Num::from(7u64));
    }
}
