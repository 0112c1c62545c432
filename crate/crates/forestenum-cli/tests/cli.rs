use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SELECT_ONE: &str = "nsta v1\nstates 2\niota * 0 0\niota * 1 1\ntrans 0 0 0\ntrans 0 1 1\ntrans 1 0 1\ninit 0\nfinal 1\n";
const REJECT_ALL: &str = "nsta v1\nstates 1\niota * 0 0\niota * 1 0\ninit 0\nfinal 0\n";
const ONLY_EMPTY: &str = "nsta v1\nstates 1\niota * 0 0\ntrans 0 0 0\ninit 0\nfinal 0\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forestenum"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn compress(dir: &TempDir, term: &str) -> PathBuf {
    let t = file(dir, "in.term", term);
    let out = dir.path().join("out.fslp");
    ok(&["compress", s(&t), "-o", s(&out)]);
    out
}

fn family(text: &str) -> BTreeSet<String> {
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.last(), Some(&"EOE"));
    let body = &lines[..lines.len() - 1];
    let set: BTreeSet<String> = body.iter().map(|l| l.to_string()).collect();
    assert_eq!(set.len(), body.len(), "duplicate answer");
    set
}

#[test]
fn compress_reports_size_and_roundtrips() {
    let dir = TempDir::new().unwrap();
    let g = compress(&dir, "a(ba(a))bcb(c(ab))\n");
    let stats = ok(&["stats", s(&g)]);
    let root: &str = stats.lines().last().unwrap().strip_prefix("# root ").unwrap();
    let row = stats.lines().find(|l| l.split(' ').next() == Some(root)).unwrap();
    assert_eq!(row.split(' ').nth(2), Some("10"));
    assert_eq!(ok(&["decompress", s(&g)]).trim(), "a(ba(a))bcb(c(ab))");
}

#[test]
fn single_leaf_and_long_word() {
    let dir = TempDir::new().unwrap();
    let g = compress(&dir, "a");
    assert_eq!(ok(&["stats", s(&g)]).lines().nth(1), Some("0 0 1 - 0"));
    let g = compress(&dir, &"a".repeat(1024));
    let nodes = fs::read_to_string(&g).unwrap().lines().filter(|l| l.starts_with("node")).count();
    assert!(nodes <= 40, "{nodes} nodes");
    assert_eq!(ok(&["decompress", s(&g)]).trim(), "a".repeat(1024));
}

#[test]
fn enumerate_edge_queries() {
    let dir = TempDir::new().unwrap();
    let g = compress(&dir, "a(b)c");
    let q = file(&dir, "none.nsta", REJECT_ALL);
    assert_eq!(ok(&["enumerate", s(&g), s(&q)]), "EOE\n");
    let q = file(&dir, "empty.nsta", ONLY_EMPTY);
    assert_eq!(ok(&["enumerate", s(&g), s(&q)]), "-\nEOE\n");
    assert_eq!(ok(&["enumerate", s(&g), s(&q), "--format", "json"]).replace('\n', ""), "[[]]");
}

#[test]
fn enumerate_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let term = file(&dir, "f.term", "a(ba(a))bcb(c(ab))");
    let g = dir.path().join("f.fslp");
    ok(&["compress", s(&term), "-o", s(&g)]);
    let q = file(&dir, "q.nsta", SELECT_ONE);
    let fast = ok(&["enumerate", s(&g), s(&q)]);
    let slow = ok(&["oracle", s(&term), s(&q)]);
    assert_eq!(family(&fast), family(&slow));
    assert_eq!(family(&fast).len(), 10);
    assert_eq!(fast, ok(&["enumerate", s(&g), s(&q)]), "output is deterministic");
    let limited = ok(&["enumerate", s(&g), s(&q), "--limit", "3"]);
    assert_eq!(limited.lines().count(), 4);
}

#[test]
fn enumerate_rejects_context_vertex() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "g.fslp", "fslp v1\nnode 0 leafctx a\nnode 1 leaf b\nnode 2 vc 0 1\n");
    let q = file(&dir, "q.nsta", SELECT_ONE);
    let out = run(&["enumerate", s(&g), s(&q), "--vertex", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("type 1"));
    let out = run(&["enumerate", s(&g), s(&q), "--vertex", "9"]);
    assert!(!out.status.success());
}

#[test]
fn relabel_out_of_range_names_the_range() {
    let dir = TempDir::new().unwrap();
    let g = compress(&dir, "a(ba(a))bcb(c(ab))");
    let out = run(&["relabel", s(&g), "--preorder", "10", "--symbol", "d"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[0, 10)"));
}

#[test]
fn relabel_changes_one_label() {
    let dir = TempDir::new().unwrap();
    let before = "a(b(ab)c(a(bc)b(ab))c(b(a)bc(a)))";
    let g = compress(&dir, before);
    let out_path = dir.path().join("r.fslp");
    let out = run(&["relabel", s(&g), "--preorder", "14", "--symbol", "d", "-o", s(&out_path)]);
    assert!(out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr).to_string();
    let words: Vec<&str> = msg.split_whitespace().collect();
    let added: u32 = words[1].parse().unwrap();
    let height: u32 = words[4].trim_end_matches(')').parse().unwrap();
    assert!(added <= height + 1, "{msg}");
    let after = ok(&["decompress", s(&out_path)]);
    assert_eq!(after.trim(), "a(b(ab)c(a(bc)b(ab))c(b(a)dc(a)))");
    let gc_path = dir.path().join("gc.fslp");
    ok(&["relabel", s(&g), "--preorder", "14", "--symbol", "d", "--gc", "-o", s(&gc_path)]);
    assert_eq!(ok(&["decompress", s(&gc_path)]), after);
}

#[test]
fn validate_rejects_ill_typed_programs() {
    let dir = TempDir::new().unwrap();
    let good = file(&dir, "g.fslp", "fslp v1\nnode 0 leafctx a\nnode 1 leaf b\nnode 2 vc 0 1\n");
    assert!(ok(&["validate", s(&good)]).starts_with("valid"));
    let bad = file(&dir, "b.fslp", "fslp v1\nnode 0 leafctx a\nnode 1 leaf b\nnode 2 vc 1 0\n");
    let out = run(&["validate", s(&bad)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

fn bench_value(out: &str, key: &str) -> u64 {
    out.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
}

#[test]
fn bench_families_run() {
    let small = ok(&["bench", "--family", "fig2", "--size", "1000", "--limit", "2000"]);
    let large = ok(&["bench", "--family", "fig2", "--size", "10000", "--limit", "20000"]);
    assert_eq!(bench_value(&small, "answers "), 1001);
    assert_eq!(bench_value(&small, "max_steps "), bench_value(&large, "max_steps "));
    let wide = ok(&["bench", "--family", "wide", "--size", "16", "--limit", "100"]);
    assert_eq!(bench_value(&wide, "answers "), 100);
    ok(&["bench", "--family", "chain", "--size", "100"]);
    let r1 = ok(&["bench", "--family", "random", "--size", "8", "--seed", "4"]);
    let r2 = ok(&["bench", "--family", "random", "--size", "8", "--seed", "4"]);
    assert_eq!(bench_value(&r1, "answers "), bench_value(&r2, "answers "));
    assert!(!run(&["bench", "--family", "tree"]).status.success());
}
