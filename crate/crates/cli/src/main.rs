mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treegrade::construction::{construct, ConstructionConfig, ConstructionState, ConstructionTrace};
use treegrade::embedding::{coordinate_trees, default_embeddings, measure_embedding, replace_pieces};
use treegrade::generators::{gen_random_tree_graded, generate, GeneratorSpec};
use treegrade::io::{self, TreeGradedDoc};
use treegrade::rbp::{attach_basepoint, complete_certificates, thicken, tree_graded_certificate, verify_rbp, RbpStructure};
use treegrade::treegraded::{
    auto_selection, build_tree_graded, collapse, measure_distortion, verify_tree_graded, TreeGradedReport, TreeGradedSpace,
};
use treegrade::{MetricGraph, PairSelection};

/// Exit status for I/O, schema and pipeline errors.
const ERROR_EXIT: u8 = 3;
/// Pairs sampled when an instance exceeds the exhaustive limit and no
/// `--pairs` is given.
const DEFAULT_SAMPLE: usize = 20_000;

#[derive(Parser)]
#[command(name = "treegrade", version, about = "Relative bottleneck verification and tree-graded reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the relative bottleneck property for every selected pair of pieces.
    Verify(VerifyArgs),
    /// Build the tree-graded space T(X) and write it with the construction trace.
    Build(BuildArgs),
    /// Build T(X) and measure the collapse map against the additive bound.
    Distort(BuildArgs),
    /// Replace pieces by products of trees and measure the coordinate collapses.
    Embed(EmbedArgs),
    /// Generate an input family from a JSON spec.
    Gen(GenArgs),
    /// Check the midpoint bottleneck property of a graph.
    Bp(BpArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the main graph artifact as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Worker threads (output does not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Sampling {
    /// `all` or `sample:K`.
    #[arg(long)]
    pairs: Option<PairSelection>,
    /// Seed for `sample:K` (required when sampling).
    #[arg(long)]
    seed: Option<u64>,
}

impl Sampling {
    fn selection(&self) -> Result<Option<PairSelection>> {
        match (&self.pairs, self.seed) {
            (Some(PairSelection::Sample { k, .. }), Some(seed)) => Ok(Some(PairSelection::Sample { k: *k, seed })),
            (Some(PairSelection::Sample { .. }), None) => bail!("--pairs sample:K needs --seed"),
            (Some(PairSelection::All), _) => Ok(Some(PairSelection::All)),
            (None, _) => Ok(None),
        }
    }

    fn selection_or_auto(&self, n: usize) -> Result<PairSelection> {
        Ok(self.selection()?.unwrap_or_else(|| auto_selection(n, DEFAULT_SAMPLE, self.seed.unwrap_or(0))))
    }
}

#[derive(Args)]
struct Input {
    /// Graph document.
    #[arg(long)]
    input: PathBuf,
    /// Decomposition document.
    #[arg(long)]
    pieces: PathBuf,
    /// Bottleneck constant; defaults to the decomposition's `constant`.
    #[arg(long = "M")]
    m: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: Input,
    /// Stratum width (default 160 M).
    #[arg(long = "R")]
    r: Option<u32>,
    /// Thickening width and cut-check radius (default 15 M).
    #[arg(long)]
    b: Option<u32>,
    /// Thicken the input first; the cut check is then not repeated.
    #[arg(long)]
    thicken: bool,
    /// Skip the small-cut precondition check.
    #[arg(long)]
    no_cut_check: bool,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EmbedArgs {
    /// A tree-graded space document; otherwise T(X) is built from --input/--pieces.
    #[arg(long, conflicts_with_all = ["input", "pieces"])]
    tree_graded: Option<PathBuf>,
    #[arg(long, requires = "pieces")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    pieces: Option<PathBuf>,
    #[arg(long = "M")]
    m: Option<u32>,
    #[arg(long = "R")]
    r: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    no_cut_check: bool,
    /// Tabulated piece embeddings; pieces without one use the bundled library.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec as JSON, or `@path` to read it from a file.
    #[arg(long)]
    spec: String,
    /// Where the decomposition document goes (graph families only).
    #[arg(long)]
    pieces_out: Option<PathBuf>,
    /// Write the decomposition with tree-graded certificates (N_1 pieces, M = 2).
    #[arg(long)]
    certify: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BpArgs {
    #[arg(long)]
    input: PathBuf,
    /// Ball radius around the midpoint.
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Verify(a) => cmd_verify(a),
        Command::Build(a) => cmd_build(a),
        Command::Distort(a) => cmd_distort(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bp(a) => cmd_bp(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn set_threads(o: &Output) -> Result<()> {
    if let Some(n) = o.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring threads")?;
    }
    Ok(())
}

fn emit<T: Serialize>(o: &Output, report: &T, text: impl FnOnce() -> String) -> Result<()> {
    let body = match o.format {
        Format::Json => io::to_json(report),
        Format::Text => text(),
    };
    match &o.out {
        Some(p) => write(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<MetricGraph> {
    io::read_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_structure(input: &Input) -> Result<RbpStructure> {
    load_structure_from(&input.input, &input.pieces, input.m)
}

fn load_structure_from(graph: &Path, pieces: &Path, m: Option<u32>) -> Result<RbpStructure> {
    let g = load_graph(graph)?;
    let loaded = io::read_pieces(&read(pieces)?, &g).with_context(|| format!("in {}", pieces.display()))?;
    let m = m
        .or(loaded.constant)
        .ok_or_else(|| anyhow!("no bottleneck constant: pass --M or set `constant` in {}", pieces.display()))?;
    if m == 0 {
        bail!("--M must be positive");
    }
    loaded.into_structure(g, m).with_context(|| format!("in {}", pieces.display()))
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    set_threads(&a.output)?;
    let s = load_structure(&a.input)?;
    let pairs = a.sampling.selection()?.unwrap_or(PairSelection::All);
    let report = verify_rbp(&s, &pairs);
    if let Some(p) = &a.output.dot {
        write(p, &io::to_dot(&s.graph, "input", Some(s.decomposition.pieces())))?;
    }
    emit(&a.output, &report, || render::verification(&report))?;
    Ok(if report.refuted > 0 {
        1
    } else if report.unknown > 0 {
        2
    } else {
        0
    })
}

#[derive(Serialize)]
struct Thickened {
    b: u32,
    m_in: u32,
    m_out: u32,
    vertices: usize,
}

#[derive(Serialize)]
struct BuildReport {
    format: &'static str,
    version: u32,
    /// A pendant basepoint had to be attached to the base piece.
    basepoint_attached: bool,
    thickened: Option<Thickened>,
    cut_check: Option<u32>,
    structure_check: TreeGradedReport,
    tree_graded: TreeGradedDoc,
    trace: ConstructionTrace,
}

struct Built {
    state: ConstructionState,
    space: TreeGradedSpace,
    attached: bool,
    thickened: Option<Thickened>,
    cut_check: Option<u32>,
}

fn build_pipeline(s: RbpStructure, r: Option<u32>, b: Option<u32>, thicken_first: bool, no_cut_check: bool) -> Result<Built> {
    let b = b.unwrap_or(15 * s.m());
    let (mut s, thickened) = if thicken_first {
        let th = thicken(&s, b).context("thickening")?;
        let info = Thickened { b, m_in: th.m_in, m_out: th.structure.m(), vertices: th.structure.graph.vertex_count() };
        (th.structure, Some(info))
    } else {
        (s, None)
    };
    let attached = s.private_base_vertex().is_none() && s.basepoint.is_none();
    if attached {
        s = attach_basepoint(&s);
    }
    let missing = complete_certificates(&mut s);
    if !missing.is_empty() {
        bail!("no verified bottleneck chain for piece pairs {missing:?}; run `verify` for witnesses");
    }
    let cut_check = (!thicken_first && !no_cut_check).then_some(b);
    let state = construct(&s, &ConstructionConfig { r, cut_check, checks: true }).context("construction")?;
    let space = build_tree_graded(&state).context("assembling T(X)")?;
    Ok(Built { state, space, attached, thickened, cut_check })
}

fn build_from_args(a: &BuildArgs) -> Result<Built> {
    let s = load_structure(&a.input)?;
    build_pipeline(s, a.r, a.b, a.thicken, a.no_cut_check)
}

fn cmd_build(a: BuildArgs) -> Result<u8> {
    set_threads(&a.output)?;
    let built = build_from_args(&a)?;
    if let Some(p) = &a.output.dot {
        write(p, &io::to_dot(&built.space.realized, "tree_graded", Some(&built.space.pieces)))?;
    }
    let report = BuildReport {
        format: "treegrade-build",
        version: io::VERSION,
        basepoint_attached: built.attached,
        thickened: built.thickened,
        cut_check: built.cut_check,
        structure_check: verify_tree_graded(&built.space),
        tree_graded: io::tree_graded_doc(&built.space),
        trace: built.state.trace.clone(),
    };
    emit(&a.output, &report, || render::build(&built.state, &built.space, built.attached))?;
    Ok(0)
}

fn cmd_distort(a: BuildArgs) -> Result<u8> {
    set_threads(&a.output)?;
    let built = build_from_args(&a)?;
    let phi = collapse(&built.space, &built.state).context("collapse map")?;
    let pairs = a.sampling.selection_or_auto(built.space.vertex_count())?;
    let report = measure_distortion(&built.space, &phi, built.state.graph(), built.state.m(), &pairs);
    if let Some(p) = &a.output.dot {
        write(p, &io::to_dot(&built.space.realized, "tree_graded", Some(&built.space.pieces)))?;
    }
    emit(&a.output, &report, || render::distortion(&report))?;
    Ok(u8::from(report.lipschitz_violations > 0 || !report.bound_satisfied))
}

fn cmd_embed(a: EmbedArgs) -> Result<u8> {
    set_threads(&a.output)?;
    let t = match (&a.tree_graded, &a.input, &a.pieces) {
        (Some(p), _, _) => io::read_tree_graded(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        (None, Some(g), Some(d)) => {
            let s = load_structure_from(g, d, a.m)?;
            build_pipeline(s, a.r, a.b, false, a.no_cut_check)?.space
        }
        _ => bail!("pass --tree-graded, or --input with --pieces"),
    };
    let mut embeds = default_embeddings_or_table(&t, a.embeddings.as_deref())?;
    let l = embeds.iter().map(|e| e.coordinates()).max().unwrap_or(1);
    embeds = embeds.into_iter().map(|e| e.padded(l)).collect();
    let ps = replace_pieces(&t, &embeds).context("replacing pieces")?;
    let coords = coordinate_trees(&ps).context("coordinate trees")?;
    let pairs = a.sampling.selection_or_auto(ps.space.vertex_count())?;
    let composite = a.sampling.selection_or_auto(t.vertex_count())?;
    let report = measure_embedding(&t, &ps, &coords, &pairs, &composite);
    if let Some(p) = &a.output.dot {
        let dot: String = coords
            .iter()
            .enumerate()
            .map(|(j, c)| io::to_dot(&c.tree.realized, &format!("coordinate_{j}"), Some(&c.tree.pieces)))
            .collect();
        write(p, &dot)?;
    }
    emit(&a.output, &report, || render::embedding(&report))?;
    Ok(u8::from(!report.passed()))
}

/// Bundled embeddings, overridden per piece by a tabulated document.
fn default_embeddings_or_table(
    t: &TreeGradedSpace,
    table: Option<&Path>,
) -> Result<Vec<treegrade::embedding::PieceTreeEmbedding>> {
    let piece_graph = |i: usize| (i < t.piece_count()).then(|| t.realized.induced_subgraph(&t.pieces[i]).0);
    let tabulated = match table {
        Some(p) => io::read_embeddings(&read(p)?, piece_graph).with_context(|| format!("in {}", p.display()))?,
        None => Vec::new(),
    };
    let mut out = Vec::with_capacity(t.piece_count());
    let bundled = if tabulated.len() < t.piece_count() { Some(default_embeddings(t)) } else { None };
    for i in 0..t.piece_count() {
        if let Some(e) = tabulated.iter().find(|e| e.piece == i) {
            out.push(e.clone());
            continue;
        }
        match &bundled {
            Some(Ok(all)) => out.push(all[i].clone()),
            Some(Err(e)) => bail!("piece {i} has no tabulated embedding and the bundled library failed: {e}"),
            None => unreachable!(),
        }
    }
    Ok(out)
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    set_threads(&a.output)?;
    let text = match a.spec.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => a.spec.clone(),
    };
    let spec: GeneratorSpec = serde_json::from_str(&text).context("parsing --spec")?;
    if let GeneratorSpec::RandomTreeGraded { pieces, min_size, max_size, max_arc, seed } = spec {
        if pieces == 0 || min_size < 3 || min_size > max_size || max_arc == 0 {
            bail!("random_tree_graded needs pieces >= 1, 3 <= min_size <= max_size and max_arc >= 1");
        }
        let t = gen_random_tree_graded(pieces, min_size, max_size, max_arc, seed);
        if let Some(p) = &a.output.dot {
            write(p, &io::to_dot(&t.realized, "generated", Some(&t.pieces)))?;
        }
        let doc = io::tree_graded_doc(&t);
        emit(&a.output, &doc, || render::tree_graded(&t))?;
        return Ok(0);
    }
    let inst = generate(&spec).ok_or_else(|| anyhow!("spec does not produce a graph"))?;
    if let Some(p) = &a.output.dot {
        write(p, &io::to_dot(&inst.graph, "generated", Some(inst.decomposition.pieces())))?;
    }
    if let Some(p) = &a.pieces_out {
        let text = if a.certify {
            let s = tree_graded_certificate(&inst.graph, inst.decomposition.pieces(), inst.decomposition.base())
                .context("certifying generated decomposition")?;
            io::write_structure(&s)
        } else {
            io::to_json(&io::pieces_doc(&inst.decomposition))
        };
        write(p, &text)?;
    }
    let doc = io::GraphDoc::from_graph(&inst.graph);
    emit(&a.output, &doc, || render::graph(&inst.graph))?;
    Ok(0)
}

fn cmd_bp(a: BpArgs) -> Result<u8> {
    set_threads(&a.output)?;
    if a.delta.is_nan() || a.delta <= 0.0 {
        bail!("--delta must be positive");
    }
    let g = load_graph(&a.input)?;
    let pairs = a.sampling.selection()?.unwrap_or(PairSelection::All);
    let report = g.check_manning_bp(a.delta, &pairs);
    if let Some(p) = &a.output.dot {
        write(p, &io::to_dot(&g, "input", None))?;
    }
    emit(&a.output, &report, || render::manning(&report))?;
    Ok(u8::from(!report.passed))
}
