use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use forestenum::automata::nsta::{library, parse_nsta};
use forestenum::automata::{BTau, Dbuta, Nsta, Op, StateId, SubsetDbuta};
use forestenum::fixtures;
use forestenum::forest::{parse_term, serialize_value, Alphabet, Forest, Symbol, Ty};
use forestenum::fslp::{compress_forest, default_budget, parse_fslp, serialize_fslp, Fslp, NodeDef, NodeId};
use forestenum::gen;
use forestenum::mso::{ProductIndex, SelectEnumerator};
use forestenum::oracle::{brute_select, OracleBudget};
use forestenum::pathenum::preprocess;
use forestenum::updates::EnumDataStructure;
use forestenum::{Error, Num};

#[derive(Parser)]
#[command(name = "forestenum", version, about = "Enumerate MSO query answers over compressed forests")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lines,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Chain,
    Wide,
    Fig2,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a forest given in term syntax into an f-SLP.
    Compress {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the value of an f-SLP node in term syntax.
    Decompress {
        input: PathBuf,
        #[arg(long)]
        vertex: Option<u32>,
        /// Largest number of vertices to materialize.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print per-node statistics.
    Stats { input: PathBuf },
    /// Enumerate the vertex sets selected by a query.
    Enumerate {
        fslp: PathBuf,
        query: PathBuf,
        #[arg(long)]
        vertex: Option<u32>,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, value_enum, default_value = "lines")]
        format: Format,
        /// Report the work spent on every answer on standard error.
        #[arg(long)]
        instrument: bool,
    },
    /// Relabel one vertex of a forest node; appends the copied path.
    Relabel {
        input: PathBuf,
        #[arg(long)]
        vertex: Option<u32>,
        #[arg(long)]
        preorder: String,
        #[arg(long)]
        symbol: String,
        /// Query whose index is maintained; any symbol is accepted without one.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Drop nodes no longer reachable from the new root.
        #[arg(long)]
        gc: bool,
    },
    /// Run a generated instance family and report timings and step counts.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        size: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Answer a query by trying every vertex subset.
    Oracle { input: PathBuf, query: PathBuf },
    /// Type-check an f-SLP.
    Validate { input: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Term files may carry `#` comment lines.
fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn load_fslp(path: &Path, al: &mut Alphabet) -> Result<Fslp> {
    parse_fslp(&read(path)?, al).with_context(|| format!("in {}", path.display()))
}

fn load_forest(path: &Path, al: &mut Alphabet) -> Result<Forest> {
    let text = read(path)?;
    if text.trim_start().starts_with("fslp") {
        let g = parse_fslp(&text, al).with_context(|| format!("in {}", path.display()))?;
        let v = pick_vertex(&g, None)?;
        return Ok(g.evaluate(v, default_budget())?.forest().clone());
    }
    parse_term(strip_comments(&text).trim(), al).with_context(|| format!("in {}", path.display()))
}

fn load_query(path: &Path, al: &mut Alphabet) -> Result<Nsta> {
    parse_nsta(&read(path)?, al).with_context(|| format!("in {}", path.display()))
}

fn pick_vertex(g: &Fslp, vertex: Option<u32>) -> Result<NodeId> {
    let v = match vertex {
        Some(v) => NodeId(v),
        None => g.default_vertex().ok_or_else(|| anyhow!("the f-SLP has no nodes"))?,
    };
    g.check(v).map_err(|_| anyhow!("unknown vertex {}", v.0))?;
    Ok(v)
}

fn forest_vertex(g: &Fslp, vertex: Option<u32>) -> Result<NodeId> {
    let v = pick_vertex(g, vertex)?;
    if g.ty(v) != Ty::Forest {
        bail!("vertex {} denotes a forest context (type 1); pick a forest vertex", v.0);
    }
    Ok(v)
}

struct AnswerWriter<W: Write> {
    out: W,
    format: Format,
    count: u64,
}

impl<W: Write> AnswerWriter<W> {
    fn new(mut out: W, format: Format) -> Result<Self> {
        if let Format::Json = format {
            write!(out, "[")?;
        }
        Ok(AnswerWriter { out, format, count: 0 })
    }

    fn answer<T: std::fmt::Display>(&mut self, set: &[T]) -> Result<()> {
        match self.format {
            Format::Lines => {
                if set.is_empty() {
                    writeln!(self.out, "-")?;
                } else {
                    let line: Vec<String> = set.iter().map(|x| x.to_string()).collect();
                    writeln!(self.out, "{}", line.join(" "))?;
                }
            }
            Format::Json => {
                let items: Vec<String> = set.iter().map(|x| x.to_string()).collect();
                let sep = if self.count == 0 { "" } else { "," };
                write!(self.out, "{sep}\n[{}]", items.join(","))?;
            }
        }
        self.count += 1;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        match self.format {
            Format::Lines => writeln!(self.out, "EOE")?,
            Format::Json => writeln!(self.out, "{}]", if self.count == 0 { "" } else { "\n" })?,
        }
        self.out.flush()?;
        Ok(())
    }
}

fn cmd_compress(input: &Path, output: Option<&Path>) -> Result<()> {
    let mut al = Alphabet::new();
    let f = load_forest(input, &mut al)?;
    if f.is_empty() {
        bail!("the forest is empty; f-SLPs describe non-empty forests");
    }
    let g = compress_forest(&f)?;
    let root = g.root().expect("compress sets a root");
    write_out(output, &serialize_fslp(&g, &al))?;
    eprintln!("nodes {} size {} height {}", g.len(), g.stats(root).s, g.height(root));
    Ok(())
}

fn cmd_decompress(input: &Path, vertex: Option<u32>, budget: Option<u64>) -> Result<()> {
    let mut al = Alphabet::new();
    let g = load_fslp(input, &mut al)?;
    let v = pick_vertex(&g, vertex)?;
    let value = g.evaluate(v, budget.unwrap_or_else(default_budget))?;
    println!("{}", serialize_value(&value, &al));
    Ok(())
}

fn cmd_stats(input: &Path) -> Result<()> {
    let mut al = Alphabet::new();
    let g = load_fslp(input, &mut al)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "# id type size left height")?;
    for v in g.ids() {
        let st = g.stats(v);
        let left = st.left.as_ref().map_or("-".to_string(), Num::to_string);
        writeln!(out, "{} {} {} {} {}", v.0, st.ty.bit(), st.s, left, st.height)?;
    }
    if let Some(r) = g.root() {
        writeln!(out, "# root {}", r.0)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_enumerate(
    fslp: &Path,
    query: &Path,
    vertex: Option<u32>,
    limit: Option<u64>,
    format: Format,
    instrument: bool,
) -> Result<()> {
    let mut al = Alphabet::new();
    let g = load_fslp(fslp, &mut al)?;
    let a = load_query(query, &mut al)?;
    let v = forest_vertex(&g, vertex)?;
    let b = SubsetDbuta::new(a);
    let idx = ProductIndex::build(&g, &b)?;
    let mut it = SelectEnumerator::new(&idx, &g, v)?;
    let mut w = AnswerWriter::new(BufWriter::new(io::stdout().lock()), format)?;
    let mut n = 0u64;
    while limit.is_none_or(|l| n < l) {
        let Some(mut set) = it.next() else { break };
        set.sort_unstable();
        if instrument {
            eprintln!("answer {n} size {} steps {}", set.len(), it.last_steps());
        }
        w.answer(&set)?;
        n += 1;
    }
    w.finish()?;
    if instrument {
        eprintln!("answers {n} max_steps {} max_tree_ratio {:.3}", it.max_steps(), it.max_tree_ratio());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_relabel(
    input: &Path,
    vertex: Option<u32>,
    preorder: &str,
    symbol: &str,
    query: Option<&Path>,
    output: Option<&Path>,
    gc: bool,
) -> Result<()> {
    let mut al = Alphabet::new();
    let g = load_fslp(input, &mut al)?;
    let nsta = match query {
        Some(q) => load_query(q, &mut al)?,
        None => library::select_one_any(),
    };
    let v = forest_vertex(&g, vertex)?;
    let k: Num = preorder
        .parse::<num_bigint::BigUint>()
        .map_err(|_| anyhow!("`{preorder}` is not a preorder number"))?
        .into();
    let s = al.intern(symbol);
    let height = g.height(v);
    let mut eds = EnumDataStructure::build(g, nsta)?;
    let r = match eds.relabel(v, &k, s) {
        Err(Error::OutOfRange { index, size }) => {
            bail!("preorder number {index} is out of range; valid range is [0, {size})")
        }
        other => other?,
    };
    assert!(r.added as u32 <= height + 1);
    let mut root = r.node;
    if gc {
        let map = eds.gc(&[r.node])?;
        root = map[r.node.index()].expect("kept node");
    }
    let mut out = eds.fslp().clone();
    out.set_root(root)?;
    write_out(output, &serialize_fslp(&out, &al))?;
    eprintln!("added {} nodes (height {}) new root {}", r.added, height, root.0);
    Ok(())
}

fn time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64() * 1e3)
}

fn report_enumeration(idx: &ProductIndex, g: &Fslp, v: NodeId, limit: u64) -> Result<()> {
    let mut it = SelectEnumerator::new(idx, g, v)?;
    let (count, ms) = time(|| {
        let mut n = 0u64;
        while n < limit && it.next().is_some() {
            n += 1;
        }
        n
    });
    println!("answers {count}");
    println!("max_steps {}", it.max_steps());
    println!("enumerate_ms {ms:.3}");
    if ms > 0.0 {
        println!("answers_per_s {:.0}", count as f64 / ms * 1e3);
    }
    Ok(())
}

fn cmd_bench(family: Family, size: u64, seed: u64, limit: u64) -> Result<()> {
    match family {
        Family::Chain => {
            let (g, v) = fixtures::chain(Symbol(0), Symbol(1), size as usize);
            let a = library::select_one_labelled(&[Symbol(0), Symbol(1)], Symbol(1));
            let mut best = f64::INFINITY;
            let mut idx = None;
            for _ in 0..5 {
                let b = SubsetDbuta::new(a.clone());
                let (i, ms) = time(|| ProductIndex::build(&g, &b));
                best = best.min(ms);
                idx = Some(i?);
            }
            println!("family chain size {size} fslp_nodes {}", g.len());
            println!("preprocess_ms {best:.3}");
            report_enumeration(&idx.expect("built"), &g, v, limit)?;
        }
        Family::Wide => {
            if size > 62 {
                bail!("wide family takes the exponent k as size; k ≤ 62");
            }
            let (g, v) = fixtures::power_word(Symbol(0), size as u32);
            let b = SubsetDbuta::new(library::select_one_any());
            let (idx, ms) = time(|| ProductIndex::build(&g, &b));
            println!("family wide size {size} fslp_nodes {} forest_vertices {}", g.len(), g.stats(v).s);
            println!("preprocess_ms {ms:.3}");
            report_enumeration(&idx?, &g, v, limit)?;
        }
        Family::Fig2 => {
            let (d, s) = fixtures::spine_dag(size as usize);
            let (idx, ms) = time(|| preprocess(&d));
            let idx = idx?;
            let mut sess = idx.open_session(s)?;
            let mut n = 0u64;
            while n < limit && sess.next().is_some() {
                n += 1;
            }
            println!("family fig2 size {size} dag_vertices {}", d.len());
            println!("preprocess_ms {ms:.3}");
            println!("answers {n}");
            println!("max_steps {}", sess.max_steps());
        }
        Family::Random => {
            let syms = [Symbol(0), Symbol(1), Symbol(2)];
            let mut rng = gen::rng(seed);
            let f = gen::random_forest(&mut rng, size.max(1) as usize, &syms);
            let a = gen::random_nsta(&mut rng, 3, &syms, 0.4);
            let g = compress_forest(&f)?;
            let v = g.root().expect("compress sets a root");
            let b = SubsetDbuta::new(a);
            let (idx, ms) = time(|| ProductIndex::build(&g, &b));
            println!("family random size {size} seed {seed} fslp_nodes {}", g.len());
            println!("preprocess_ms {ms:.3}");
            println!("dbuta_states {}", b.state_count());
            report_enumeration(&idx?, &g, v, limit)?;
        }
    }
    Ok(())
}

fn cmd_oracle(input: &Path, query: &Path) -> Result<()> {
    let mut al = Alphabet::new();
    let f = load_forest(input, &mut al)?;
    let a = load_query(query, &mut al)?;
    let fam = brute_select(&a, &f, &OracleBudget::default())?;
    let mut w = AnswerWriter::new(BufWriter::new(io::stdout().lock()), Format::Lines)?;
    for s in &fam {
        w.answer(s)?;
    }
    w.finish()
}

fn cmd_validate(input: &Path) -> Result<()> {
    let mut al = Alphabet::new();
    let g = load_fslp(input, &mut al)?;
    let b = BTau;
    let mut states: Vec<StateId> = Vec::with_capacity(g.len());
    for v in g.ids() {
        let q = match *g.def(v) {
            NodeDef::Leaf(a) => b.leaf(a, false, false),
            NodeDef::LeafCtx(a) => b.leaf(a, true, false),
            NodeDef::Hc(l, r) => b.step(Op::Hc, states[l.index()], states[r.index()]),
            NodeDef::Vc(l, r) => b.step(Op::Vc, states[l.index()], states[r.index()]),
        };
        match BTau::ty(q) {
            Some(t) if t == g.ty(v) => states.push(q),
            _ => bail!("node {} is ill-typed", v.0),
        }
    }
    let v = pick_vertex(&g, None)?;
    println!("valid: {} nodes, vertex {} has type {}", g.len(), v.0, g.ty(v).bit());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Compress { input, output } => cmd_compress(&input, output.as_deref()),
        Cmd::Decompress { input, vertex, budget } => cmd_decompress(&input, vertex, budget),
        Cmd::Stats { input } => cmd_stats(&input),
        Cmd::Enumerate { fslp, query, vertex, limit, format, instrument } => {
            cmd_enumerate(&fslp, &query, vertex, limit, format, instrument)
        }
        Cmd::Relabel { input, vertex, preorder, symbol, query, output, gc } => {
            cmd_relabel(&input, vertex, &preorder, &symbol, query.as_deref(), output.as_deref(), gc)
        }
        Cmd::Bench { family, size, seed, limit } => cmd_bench(family, size, seed, limit),
        Cmd::Oracle { input, query } => cmd_oracle(&input, &query),
        Cmd::Validate { input } => cmd_validate(&input),
    }
}
