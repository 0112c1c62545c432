//! Forests, forest contexts, the term syntax and the forest algebra.
//!
//! Vertices of a [`Forest`] are numbered in preorder, so a vertex id *is* its
//! preorder number. Labels are interned [`Symbol`]s; the [`Alphabet`] that
//! owns the names travels separately.
//!
//! Term syntax: `Forest := Tree*`, `Tree := LABEL ['(' Forest ')']`, with
//! whitespace and commas as optional separators. An unquoted label is a
//! letter followed by any number of digits, `_`, `@`, `'` or `.`, so `ab`
//! denotes two vertices while `a1` and `a@2` are single labels. Any other
//! name can be written in double quotes.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// An interned label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    /// The hole `*` of a forest context. Never produced by interning.
    pub const HOLE: Symbol = Symbol(u32::MAX);
}

/// Bidirectional map between label names and symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(&s) = self.ids.get(name) {
            return s;
        }
        let s = Symbol(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), s);
        s
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, s: Symbol) -> &str {
        if s == Symbol::HOLE {
            "*"
        } else {
            &self.names[s.0 as usize]
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }
}

/// An ordered forest with vertices numbered in preorder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Forest {
    labels: Vec<Symbol>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    size: Vec<usize>,
}

impl Forest {
    /// Builds a forest from labels and parent pointers given in preorder.
    pub fn from_preorder(labels: Vec<Symbol>, parent: Vec<Option<usize>>) -> Result<Self> {
        if labels.len() != parent.len() {
            return Err(Error::Invalid("labels and parents differ in length".into()));
        }
        let n = labels.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        // Open path from the last root down to the previous vertex.
        let mut open: Vec<usize> = Vec::new();
        for (v, &p) in parent.iter().enumerate() {
            match p {
                None => {
                    open.clear();
                    roots.push(v);
                }
                Some(p) => {
                    while open.last().is_some_and(|&t| t != p) {
                        open.pop();
                    }
                    if open.is_empty() {
                        return Err(Error::Invalid(format!(
                            "parent {p} of vertex {v} violates preorder"
                        )));
                    }
                    children[p].push(v);
                }
            }
            open.push(v);
        }
        let mut size = vec![1usize; n];
        for v in (0..n).rev() {
            if let Some(p) = parent[v] {
                size[p] += size[v];
            }
        }
        Ok(Forest { labels, parent, children, roots, size })
    }

    /// Builds a forest from labels and depths given in preorder.
    pub fn from_depths(labels: Vec<Symbol>, depths: &[usize]) -> Result<Self> {
        let mut parent = Vec::with_capacity(depths.len());
        let mut path: Vec<usize> = Vec::new();
        for (v, &d) in depths.iter().enumerate() {
            if d > path.len() {
                return Err(Error::Invalid(format!("depth jump at vertex {v}")));
            }
            path.truncate(d);
            parent.push(path.last().copied());
            path.push(v);
        }
        Forest::from_preorder(labels, parent)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> Symbol {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Number of vertices in the subtree rooted at `v`.
    pub fn subtree_size(&self, v: usize) -> usize {
        self.size[v]
    }

    /// Whether `a` is an ancestor of `v` or equal to it.
    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        a <= v && v < a + self.size[a]
    }

    /// Vertices carrying `s`, in preorder.
    pub fn vertices_labelled(&self, s: Symbol) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.labels[v] == s).collect()
    }

    /// Copy of the forest with vertex `v` relabelled.
    pub fn relabelled(&self, v: usize, s: Symbol) -> Forest {
        let mut f = self.clone();
        f.labels[v] = s;
        f
    }

    /// Depth of every vertex, roots at depth 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.len()];
        for v in 0..self.len() {
            if let Some(p) = self.parent[v] {
                d[v] = d[p] + 1;
            }
        }
        d
    }
}

/// A forest with exactly one vertex labelled by the hole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestContext {
    pub forest: Forest,
    pub hole: usize,
}

/// Result of evaluating an expression or f-SLP vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Forest(Forest),
    Context(ForestContext),
}

impl Value {
    /// The underlying forest; for a context the hole is a vertex.
    pub fn forest(&self) -> &Forest {
        match self {
            Value::Forest(f) => f,
            Value::Context(c) => &c.forest,
        }
    }
}

fn is_label_start(c: char) -> bool {
    c.is_alphabetic()
}

fn is_label_continue(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '_' | '@' | '\'' | '.')
}

fn needs_quotes(name: &str) -> bool {
    let mut it = name.chars();
    match it.next() {
        Some(c) if is_label_start(c) => !it.all(is_label_continue),
        _ => true,
    }
}

fn write_label(out: &mut String, name: &str) {
    if needs_quotes(name) {
        out.push('"');
        for c in name.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
    } else {
        out.push_str(name);
    }
}

/// Parses the term syntax into a forest, interning labels into `alphabet`.
pub fn parse_term(text: &str, alphabet: &mut Alphabet) -> Result<Forest> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut labels = Vec::new();
    let mut parent = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut last: Option<usize> = None;
    let mut i = 0;
    let err = |offset: usize, expected: &str| Error::Parse { offset, expected: expected.to_owned() };
    while i < bytes.len() {
        let (off, c) = bytes[i];
        if c.is_whitespace() || c == ',' {
            i += 1;
        } else if c == '(' {
            let v = last.ok_or_else(|| err(off, "label before '('"))?;
            open.push(v);
            last = None;
            i += 1;
        } else if c == ')' {
            if open.pop().is_none() {
                return Err(err(off, "label, '(' or end of input"));
            }
            last = None;
            i += 1;
        } else if c == '"' {
            let mut name = String::new();
            i += 1;
            loop {
                let &(o, d) = bytes.get(i).ok_or_else(|| err(text.len(), "closing '\"'"))?;
                i += 1;
                match d {
                    '"' => break,
                    '\\' => {
                        let &(_, e) = bytes.get(i).ok_or_else(|| err(o, "escaped character"))?;
                        name.push(e);
                        i += 1;
                    }
                    _ => name.push(d),
                }
            }
            if name.is_empty() {
                return Err(err(off, "non-empty label"));
            }
            labels.push(alphabet.intern(&name));
            parent.push(open.last().copied());
            last = Some(labels.len() - 1);
        } else if is_label_start(c) {
            let start = off;
            i += 1;
            while i < bytes.len() && is_label_continue(bytes[i].1) {
                i += 1;
            }
            let end = bytes.get(i).map_or(text.len(), |b| b.0);
            labels.push(alphabet.intern(&text[start..end]));
            parent.push(open.last().copied());
            last = Some(labels.len() - 1);
        } else {
            return Err(err(off, "label, '(', ')' or separator"));
        }
    }
    if !open.is_empty() {
        return Err(err(text.len(), "')'"));
    }
    Forest::from_preorder(labels, parent)
}

fn serialize_into(out: &mut String, f: &Forest, alphabet: &Alphabet) {
    // Iterative traversal: (vertex, closing) pairs.
    let mut stack: Vec<(usize, bool)> = f.roots().iter().rev().map(|&r| (r, false)).collect();
    while let Some((v, closing)) = stack.pop() {
        if closing {
            out.push(')');
            continue;
        }
        if f.label(v) == Symbol::HOLE {
            out.push('*');
        } else {
            write_label(out, alphabet.name(f.label(v)));
        }
        let ch = f.children(v);
        if !ch.is_empty() {
            out.push('(');
            stack.push((v, true));
            stack.extend(ch.iter().rev().map(|&c| (c, false)));
        }
    }
}

/// Canonical term syntax of a forest (no separators unless needed).
pub fn serialize_term(f: &Forest, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    serialize_into(&mut out, f, alphabet);
    out
}

/// Term syntax of an evaluation result; the hole prints as `*`.
pub fn serialize_value(v: &Value, alphabet: &Alphabet) -> String {
    serialize_term(v.forest(), alphabet)
}

/// Type of an expression: forests have type 0, contexts type 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Forest,
    Context,
}

impl Ty {
    pub fn bit(self) -> u8 {
        match self {
            Ty::Forest => 0,
            Ty::Context => 1,
        }
    }

    /// Type of `l ⊖ r`, if defined.
    pub fn hc(l: Ty, r: Ty) -> Option<Ty> {
        match (l, r) {
            (Ty::Forest, Ty::Forest) => Some(Ty::Forest),
            (Ty::Context, Ty::Context) => None,
            _ => Some(Ty::Context),
        }
    }

    /// Type of `l ⊘ r`, if defined.
    pub fn vc(l: Ty, r: Ty) -> Option<Ty> {
        (l == Ty::Context).then_some(r)
    }
}

/// One node of an [`Expr`]; children are indices into the node array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExprNode {
    Leaf(Symbol),
    LeafCtx(Symbol),
    Hc(usize, usize),
    Vc(usize, usize),
}

/// A forest-algebra expression stored in postorder; the root is the last
/// node and leaves appear in left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    nodes: Vec<ExprNode>,
}

impl Expr {
    pub fn leaf(s: Symbol) -> Expr {
        Expr { nodes: vec![ExprNode::Leaf(s)] }
    }

    pub fn leaf_ctx(s: Symbol) -> Expr {
        Expr { nodes: vec![ExprNode::LeafCtx(s)] }
    }

    fn join(l: Expr, r: Expr, hc: bool) -> Expr {
        let off = l.nodes.len();
        let mut nodes = l.nodes;
        nodes.reserve(r.nodes.len() + 1);
        nodes.extend(r.nodes.into_iter().map(|n| match n {
            ExprNode::Hc(a, b) => ExprNode::Hc(a + off, b + off),
            ExprNode::Vc(a, b) => ExprNode::Vc(a + off, b + off),
            leaf => leaf,
        }));
        let (a, b) = (off - 1, nodes.len() - 1);
        nodes.push(if hc { ExprNode::Hc(a, b) } else { ExprNode::Vc(a, b) });
        Expr { nodes }
    }

    /// `l ⊖ r` (not type-checked).
    pub fn hc(l: Expr, r: Expr) -> Expr {
        Expr::join(l, r, true)
    }

    /// `l ⊘ r` (not type-checked).
    pub fn vc(l: Expr, r: Expr) -> Expr {
        Expr::join(l, r, false)
    }

    /// Wraps a node array that is already in postorder with valid indices.
    pub(crate) fn from_postorder(nodes: Vec<ExprNode>) -> Expr {
        Expr { nodes }
    }

    pub fn nodes(&self) -> &[ExprNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of leaves (= vertices of the value, not counting the hole).
    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, ExprNode::Leaf(_) | ExprNode::LeafCtx(_)))
            .count()
    }

    /// Node index of every leaf, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i], ExprNode::Leaf(_) | ExprNode::LeafCtx(_)))
            .collect()
    }

    /// Height of the expression tree (a single leaf has height 0).
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let ExprNode::Hc(a, b) | ExprNode::Vc(a, b) = *n {
                h[i] = 1 + h[a].max(h[b]);
            }
        }
        h.last().copied().unwrap_or(0)
    }

    /// Types of all nodes, or `None` if some node is ill-typed.
    pub fn node_types(&self) -> Option<Vec<Ty>> {
        let mut t = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let ty = match *n {
                ExprNode::Leaf(_) => Ty::Forest,
                ExprNode::LeafCtx(_) => Ty::Context,
                ExprNode::Hc(a, b) => Ty::hc(t[a], t[b])?,
                ExprNode::Vc(a, b) => Ty::vc(t[a], t[b])?,
            };
            t.push(ty);
        }
        Some(t)
    }

    /// Renders the expression with `+` for `⊖`, `.` for `⊘` and `a*` for `a(∗)`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let mut parts: Vec<String> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match *n {
                ExprNode::Leaf(a) => alphabet.name(a).to_owned(),
                ExprNode::LeafCtx(a) => format!("{}*", alphabet.name(a)),
                ExprNode::Hc(a, b) => format!("({} + {})", parts[a], parts[b]),
                ExprNode::Vc(a, b) => format!("({} . {})", parts[a], parts[b]),
            };
            parts.push(s);
        }
        parts.pop().unwrap_or_default()
    }
}

/// Type of the whole expression, or `None` if it is invalid.
pub fn type_of(e: &Expr) -> Option<Ty> {
    e.node_types().map(|t| t[e.root()])
}

const HOLE_MARK: usize = usize::MAX;

/// Evaluates a valid expression and reports, for every leaf (left to right),
/// the preorder number of the vertex it creates. The construction splices
/// child lists directly and is independent of the preorder arithmetic used by
/// [`leaf_preorders`].
pub fn eval_with_leaf_map(e: &Expr) -> Result<(Value, Vec<usize>)> {
    if e.is_empty() {
        return Err(Error::InvalidExpression("empty expression".into()));
    }
    type_of(e).ok_or_else(|| Error::InvalidExpression("ill-typed expression".into()))?;
    let mut label: Vec<Symbol> = Vec::new();
    let mut kids: Vec<Vec<usize>> = Vec::new();
    // Per node: (roots, parent of the hole).
    let mut frag: Vec<(Vec<usize>, Option<usize>)> = Vec::with_capacity(e.len());
    for n in e.nodes() {
        let f = match *n {
            ExprNode::Leaf(a) => {
                label.push(a);
                kids.push(Vec::new());
                (vec![label.len() - 1], None)
            }
            ExprNode::LeafCtx(a) => {
                label.push(a);
                kids.push(vec![HOLE_MARK]);
                let v = label.len() - 1;
                (vec![v], Some(v))
            }
            ExprNode::Hc(a, b) => {
                let (mut ra, ha) = std::mem::take(&mut frag[a]);
                let (rb, hb) = std::mem::take(&mut frag[b]);
                ra.extend(rb);
                (ra, ha.or(hb))
            }
            ExprNode::Vc(a, b) => {
                let (ra, ha) = std::mem::take(&mut frag[a]);
                let (rb, hb) = std::mem::take(&mut frag[b]);
                let p = ha.expect("type-checked context");
                let pos = kids[p].iter().position(|&c| c == HOLE_MARK).expect("hole present");
                kids[p].splice(pos..=pos, rb);
                (ra, hb)
            }
        };
        frag.push(f);
    }
    let (roots, hole_parent) = frag.pop().expect("non-empty");
    let leaves = label.len();
    let mut pre = vec![usize::MAX; leaves];
    let mut out_labels = Vec::new();
    let mut out_parent = Vec::new();
    let mut hole = None;
    let mut stack: Vec<(usize, Option<usize>)> = roots.iter().rev().map(|&r| (r, None)).collect();
    while let Some((v, p)) = stack.pop() {
        let id = out_labels.len();
        out_parent.push(p);
        if v == HOLE_MARK {
            out_labels.push(Symbol::HOLE);
            hole = Some(id);
            continue;
        }
        out_labels.push(label[v]);
        pre[v] = id;
        stack.extend(kids[v].iter().rev().map(|&c| (c, Some(id))));
    }
    let forest = Forest::from_preorder(out_labels, out_parent)?;
    let value = match hole_parent {
        None => Value::Forest(forest),
        Some(_) => Value::Context(ForestContext { forest, hole: hole.expect("hole emitted") }),
    };
    Ok((value, pre))
}

/// Evaluates a valid expression to a forest or forest context.
pub fn eval_expr(e: &Expr) -> Result<Value> {
    eval_with_leaf_map(e).map(|(v, _)| v)
}

/// Preorder number of every leaf (left to right), computed top-down from the
/// sizes `s` and `ℓ` of the subexpressions.
pub fn leaf_preorders(e: &Expr) -> Result<Vec<usize>> {
    let ty = e
        .node_types()
        .ok_or_else(|| Error::InvalidExpression("ill-typed expression".into()))?;
    let n = e.len();
    let mut s = vec![0usize; n];
    let mut l = vec![0usize; n];
    for (i, node) in e.nodes().iter().enumerate() {
        match *node {
            ExprNode::Leaf(_) => s[i] = 1,
            ExprNode::LeafCtx(_) => {
                s[i] = 1;
                l[i] = 1;
            }
            ExprNode::Hc(a, b) => {
                s[i] = s[a] + s[b];
                l[i] = match (ty[a], ty[b]) {
                    (Ty::Forest, Ty::Context) => s[a] + l[b],
                    (Ty::Context, Ty::Forest) => l[a],
                    _ => 0,
                };
            }
            ExprNode::Vc(a, b) => {
                s[i] = s[a] + s[b];
                if ty[b] == Ty::Context {
                    l[i] = l[a] + l[b];
                }
            }
        }
    }
    // pod[i] = (x, y); y only meaningful for contexts.
    let mut pod = vec![(0usize, 0usize); n];
    let mut out = Vec::new();
    for i in (0..n).rev() {
        let (x, y) = pod[i];
        match e.nodes()[i] {
            ExprNode::Leaf(_) | ExprNode::LeafCtx(_) => out.push(x),
            ExprNode::Hc(a, b) => match (ty[a], ty[b]) {
                (Ty::Context, Ty::Forest) => {
                    pod[a] = (x, y);
                    pod[b] = (x + s[a] + y, 0);
                }
                _ => {
                    pod[a] = (x, 0);
                    pod[b] = (x + s[a], y);
                }
            },
            ExprNode::Vc(a, b) => {
                pod[a] = (x, y + s[b]);
                pod[b] = (x + l[a], y);
            }
        }
    }
    out.reverse();
    Ok(out)
}

/// Renders a forest as an indented outline, one vertex per line.
pub fn outline(f: &Forest, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    let depths = f.depths();
    for (v, &d) in depths.iter().enumerate() {
        let _ = writeln!(out, "{}{} [{}]", "  ".repeat(d), alphabet.name(f.label(v)), v);
    }
    out
}
