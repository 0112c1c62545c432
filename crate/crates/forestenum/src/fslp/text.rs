//! Line-oriented text format for f-SLPs.
//!
//! ```text
//! fslp v1
//! # comment
//! node 0 leaf a
//! node 1 leafctx b
//! node 2 hc 0 1
//! node 3 vc 1 0
//! root 3
//! ```
//!
//! Ids in the input may be any distinct non-negative integers as long as
//! every node is defined before use; the serializer always writes the dense
//! ids `0, 1, 2, ...`, so serializing a parsed canonical file reproduces it
//! byte for byte.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Fslp, NodeDef, NodeId};
use crate::error::{Error, Result};
use crate::forest::Alphabet;

/// Splits a line into whitespace-separated tokens; double quotes group a
/// token and `\` escapes inside quotes. A `#` outside quotes starts a comment.
pub(crate) fn tokenize(line: &str, lineno: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    None => {
                        return Err(Error::Format { line: lineno, message: "unterminated quote".into() })
                    }
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e) => tok.push(e),
                        None => {
                            return Err(Error::Format { line: lineno, message: "dangling escape".into() })
                        }
                    },
                    Some(d) => tok.push(d),
                }
            }
            out.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_whitespace() {
                    break;
                }
                tok.push(d);
                chars.next();
            }
            out.push(tok);
        }
    }
    Ok(out)
}

/// Writes a token, quoting it if it would not survive [`tokenize`].
pub(crate) fn write_token(out: &mut String, tok: &str) {
    let plain = !tok.is_empty()
        && !tok.starts_with('#')
        && !tok.chars().any(|c| c.is_whitespace() || c == '"' || c == '\\');
    if plain {
        out.push_str(tok);
    } else {
        out.push('"');
        for c in tok.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
    }
}

fn ferr(line: usize, message: impl Into<String>) -> Error {
    Error::Format { line, message: message.into() }
}

/// Parses the `fslp v1` format, interning labels into `alphabet`.
pub fn parse_fslp(text: &str, alphabet: &mut Alphabet) -> Result<Fslp> {
    let mut g = Fslp::new();
    let mut ids: HashMap<u64, NodeId> = HashMap::new();
    let mut header = false;
    let mut root = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        if !header {
            if toks != ["fslp", "v1"] {
                return Err(ferr(lineno, "expected header `fslp v1`"));
            }
            header = true;
            continue;
        }
        let num = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| ferr(lineno, format!("`{s}` is not a node id")))
        };
        let lookup = |s: &str, ids: &HashMap<u64, NodeId>| -> Result<NodeId> {
            let n = num(s)?;
            ids.get(&n).copied().ok_or_else(|| ferr(lineno, format!("node {n} used before definition")))
        };
        match toks[0].as_str() {
            "node" => {
                if toks.len() < 4 {
                    return Err(ferr(lineno, "incomplete node line"));
                }
                let id = num(&toks[1])?;
                if ids.contains_key(&id) {
                    return Err(ferr(lineno, format!("node {id} defined twice")));
                }
                let def = match (toks[2].as_str(), toks.len()) {
                    ("leaf", 4) => NodeDef::Leaf(alphabet.intern(&toks[3])),
                    ("leafctx", 4) => NodeDef::LeafCtx(alphabet.intern(&toks[3])),
                    ("hc", 5) => NodeDef::Hc(lookup(&toks[3], &ids)?, lookup(&toks[4], &ids)?),
                    ("vc", 5) => NodeDef::Vc(lookup(&toks[3], &ids)?, lookup(&toks[4], &ids)?),
                    (k, _) => return Err(ferr(lineno, format!("bad node form `{k}`"))),
                };
                let nid = g.push(def).map_err(|e| ferr(lineno, e.to_string()))?;
                ids.insert(id, nid);
            }
            "root" => {
                if toks.len() != 2 {
                    return Err(ferr(lineno, "expected `root <id>`"));
                }
                if root.is_some() {
                    return Err(ferr(lineno, "root given twice"));
                }
                root = Some(lookup(&toks[1], &ids)?);
            }
            other => return Err(ferr(lineno, format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(ferr(1, "expected header `fslp v1`"));
    }
    if let Some(r) = root {
        g.set_root(r)?;
    }
    Ok(g)
}

/// Writes the canonical `fslp v1` text of `g`.
pub fn serialize_fslp(g: &Fslp, alphabet: &Alphabet) -> String {
    let mut out = String::from("fslp v1\n");
    for (i, def) in g.nodes().iter().enumerate() {
        let _ = write!(out, "node {i} ");
        match *def {
            NodeDef::Leaf(a) => {
                out.push_str("leaf ");
                write_token(&mut out, alphabet.name(a));
            }
            NodeDef::LeafCtx(a) => {
                out.push_str("leafctx ");
                write_token(&mut out, alphabet.name(a));
            }
            NodeDef::Hc(a, b) => {
                let _ = write!(out, "hc {} {}", a.0, b.0);
            }
            NodeDef::Vc(a, b) => {
                let _ = write!(out, "vc {} {}", a.0, b.0);
            }
        }
        out.push('\n');
    }
    if let Some(r) = g.root() {
        let _ = writeln!(out, "root {}", r.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "fslp v1\nnode 0 leaf a\nnode 1 leafctx b\nnode 2 vc 1 0\nnode 3 hc 2 0\nroot 3\n";

    #[test]
    fn canonical_text_roundtrips_bytewise() {
        let mut al = Alphabet::new();
        let g = parse_fslp(SAMPLE, &mut al).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(serialize_fslp(&g, &al), SAMPLE);
    }

    #[test]
    fn sparse_ids_comments_and_quotes() {
        let mut al = Alphabet::new();
        let text = "# leading comment\nfslp v1\n\nnode 10 leaf \"x y\" # trailing\nnode 4 leafctx b\nnode 7 vc 4 10\n";
        let g = parse_fslp(text, &mut al).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.root(), None);
        let canon = serialize_fslp(&g, &al);
        assert_eq!(canon, "fslp v1\nnode 0 leaf \"x y\"\nnode 1 leafctx b\nnode 2 vc 1 0\n");
        let h = parse_fslp(&canon, &mut al).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn errors_report_lines() {
        let mut al = Alphabet::new();
        let cases = [
            ("fslp v2\n", 1),
            ("fslp v1\nnode 0 hc 1 1\n", 2),
            ("fslp v1\nnode 0 leaf a\nnode 0 leaf b\n", 3),
            ("fslp v1\nnode 0 leafctx a\nnode 1 hc 0 0\n", 3),
            ("fslp v1\nnode 0 leaf a\nroot 5\n", 3),
            ("fslp v1\nedge 0 1\n", 2),
        ];
        for (text, line) in cases {
            match parse_fslp(text, &mut al) {
                Err(Error::Format { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
