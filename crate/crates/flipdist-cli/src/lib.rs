//! Command implementations behind the `flipdist` binary.
//!
//! Exit codes: 0 success, 1 domain error (an invariant or replay failed,
//! budget exceeded), 2 usage or parse error.

pub mod render;

use clap::{Args, Parser, Subcommand};
use flipdist::formats::{parse_edges, parse_points, serialize_points};
use flipdist::reduction::io::{read_instance_with, write_instance, write_params, Overrides};
use flipdist::reduction::{assemble_cached, run_checks, CubicGraph, ReductionConfig, ReductionInstance};
use flipdist::{
    build_double_chain, enumerate_flip_graph, flip_distance, label_sequence, parse_sequence,
    serialize_flip_graph, serialize_sequence, serialize_triangulation, stabbed_triangles, DoubleChain,
    Distance, FlipSequence, Frame, Point, PointSet, Triangulation,
};
use render::{render_svg, RenderOptions};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, missing or unreadable files.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    /// A validation report with at least one failed check.
    #[error("{0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Report(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "flipdist", version, about = "Flip distance tools for planar triangulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Exact search.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Replay a flip sequence from T1 and check that it ends at T2.
    Verify(VerifyArgs),
    /// Turn a vertex cover into a flip sequence.
    #[command(subcommand)]
    Compile(CompileCommand),
    /// Turn a flip sequence into a vertex cover.
    #[command(subcommand)]
    Extract(ExtractCommand),
    /// Check every invariant of a reduction instance.
    Validate(ValidateArgs),
    /// Draw points and triangulations as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Double chain with its two fan triangulations.
    DoubleChain(GenChainArgs),
    /// Reduction instance for a cubic graph.
    Reduction(GenReductionArgs),
}

#[derive(Debug, Args)]
pub struct GenChainArgs {
    /// Points per chain (at least 2).
    #[arg(long)]
    pub n: usize,
    /// Point file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Fan triangulation from the first upper point.
    #[arg(long)]
    pub t1: PathBuf,
    /// Fan triangulation from the first lower point.
    #[arg(long)]
    pub t2: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenReductionArgs {
    /// Graph file: `n m`, then `m` lines `u v`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Written files are `<prefix>points.txt`, `t1.txt`, `t2.txt`,
    /// `params.txt` and `instance.txt`.
    #[arg(long)]
    pub out_prefix: String,
    /// Chain size override `d,w` for small test instances (skips the
    /// parameter inequalities).
    #[arg(long, value_parser = parse_pair)]
    pub small: Option<(usize, usize)>,
    /// Cover size whose flip budget is recorded in the params file.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum SolveCommand {
    /// Exact flip distance within a budget.
    Distance(SolveDistanceArgs),
    /// Export the whole flip graph of a small point set.
    FlipGraph(FlipGraphArgs),
}

#[derive(Debug, Args)]
pub struct SolveDistanceArgs {
    /// Point file: `n`, then `n` lines `x y`.
    #[arg(long)]
    pub points: PathBuf,
    /// Start triangulation: edge count, then lines `a b`.
    #[arg(long)]
    pub t1: PathBuf,
    /// Target triangulation.
    #[arg(long)]
    pub t2: PathBuf,
    /// Largest distance searched for; exit code 1 when exceeded.
    #[arg(long)]
    pub budget: usize,
    /// Write a shortest flip sequence here.
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlipGraphArgs {
    /// Point file.
    #[arg(long)]
    pub points: PathBuf,
    /// Node table followed by the adjacency list.
    #[arg(long)]
    pub out: PathBuf,
    /// Fail instead of enumerating more triangulations than this.
    #[arg(long, default_value_t = 200_000)]
    pub max_nodes: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Point file.
    #[arg(long, required_unless_present = "instance")]
    pub points: Option<PathBuf>,
    /// Start triangulation.
    #[arg(long, required_unless_present = "instance")]
    pub t1: Option<PathBuf>,
    /// Target triangulation.
    #[arg(long, required_unless_present = "instance")]
    pub t2: Option<PathBuf>,
    /// Reduction instance prefix, instead of the three files above (its
    /// general position is covered by the instance certificate).
    #[arg(long, conflicts_with_all = ["points", "t1", "t2"])]
    pub instance: Option<String>,
    /// Flip sequence: lines `remove a b insert c d`.
    #[arg(long)]
    pub sequence: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CompileCommand {
    CoverToFlips(CoverToFlipsArgs),
}

#[derive(Debug, Args)]
pub struct CoverToFlipsArgs {
    /// Instance prefix as written by `gen reduction`.
    #[arg(long)]
    pub instance: String,
    /// Comma-separated vertices, e.g. `0,1,2`.
    #[arg(long)]
    pub cover: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExtractCommand {
    FlipsToCover(FlipsToCoverArgs),
}

#[derive(Debug, Args)]
pub struct FlipsToCoverArgs {
    /// Instance prefix as written by `gen reduction`.
    #[arg(long)]
    pub instance: String,
    /// Flip sequence from T1 to T2.
    #[arg(long)]
    pub sequence: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Instance prefix as written by `gen reduction`.
    #[arg(long)]
    pub instance: String,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Point file.
    #[arg(long)]
    pub points: PathBuf,
    /// Drawn solid.
    #[arg(long)]
    pub t1: Option<PathBuf>,
    /// Drawn dashed.
    #[arg(long)]
    pub t2: Option<PathBuf>,
    /// Label the triangles of T1 stabbed by a double chain of this size,
    /// laid out as `gen double-chain` writes it.
    #[arg(long)]
    pub chain: Option<usize>,
    /// SVG file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Image width in pixels.
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `d,w`")?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_points(path: &Path) -> Result<Arc<PointSet>> {
    let pts = parse_points(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    PointSet::new(pts)
        .map(Arc::new)
        .map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_triangulation(path: &Path, ps: &Arc<PointSet>) -> Result<Triangulation> {
    let edges = parse_edges(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if let Some(e) = edges.iter().find(|e| e.b >= ps.len()) {
        return Err(usage(format!("{}: edge {e} refers to a missing point", path.display())));
    }
    Triangulation::from_edges(ps.clone(), edges).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_sequence(path: &Path) -> Result<FlipSequence> {
    parse_sequence(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub const INSTANCE_FILES: [&str; 5] = ["points.txt", "t1.txt", "t2.txt", "params.txt", "instance.txt"];

fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

/// Loads `<prefix>instance.txt` with points and triangulations taken from
/// their own files, so edits to those files are what gets checked.
pub fn load_instance(prefix: &str) -> Result<ReductionInstance> {
    let missing: Vec<String> = INSTANCE_FILES
        .iter()
        .map(|n| prefixed(prefix, n))
        .filter(|p| prefix.is_empty() || !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(usage(format!("missing files: {}", missing.join(", "))));
    }
    let parse_err = |name: &str, e: flipdist::FormatError| usage(format!("{prefix}{name}: {e}"));
    let overrides = Overrides {
        points: Some(parse_points(&read(&prefixed(prefix, "points.txt"))?).map_err(|e| parse_err("points.txt", e))?),
        t1: Some(parse_edges(&read(&prefixed(prefix, "t1.txt"))?).map_err(|e| parse_err("t1.txt", e))?),
        t2: Some(parse_edges(&read(&prefixed(prefix, "t2.txt"))?).map_err(|e| parse_err("t2.txt", e))?),
    };
    read_instance_with(&read(&prefixed(prefix, "instance.txt"))?, overrides).map_err(|e| match e {
        flipdist::ReductionError::Format(_) | flipdist::ReductionError::Parse { .. } => usage(e),
        other => domain(other),
    })
}

fn parse_cover(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| usage(format!("bad cover vertex {t:?}"))))
        .collect()
}

/// Double chain frame used by `gen double-chain` and `render --chain`.
fn chain_frame() -> Frame {
    Frame::default()
}

/// Rebuilds the double-chain structure over points laid out by `gen double-chain`.
fn chain_over(ps: &Arc<PointSet>, n: usize) -> Result<DoubleChain> {
    if ps.len() < 2 * n || n < 2 {
        return Err(usage(format!("--chain {n} needs at least {} points", 2 * n)));
    }
    let mid = |i: usize| -> Point {
        let (l, u) = (ps.point(i), ps.point(n + i));
        let half = flipdist::Rational::new(1.into(), 2.into());
        Point::new((&l.x + &u.x) * &half, (&l.y + &u.y) * &half)
    };
    DoubleChain::new(ps.clone(), (n..2 * n).collect(), (0..n).collect(), (mid(0), mid(n - 1))).map_err(domain)
}

/// Runs one command and returns what it prints on stdout.
pub fn run(cli: Cli) -> Result<String> {
    let mut out = String::new();
    match cli.command {
        Command::Gen(GenCommand::DoubleChain(a)) => {
            let (ps, d) = build_double_chain(a.n, &chain_frame()).map_err(usage)?;
            let (t1, t2) = d.fan_triangulations().map_err(domain)?;
            write(&a.out, &serialize_points(ps.points()))?;
            write(&a.t1, &serialize_triangulation(&t1))?;
            write(&a.t2, &serialize_triangulation(&t2))?;
            let s1 = label_sequence(&d, &t1).map_err(domain)?;
            let s2 = label_sequence(&d, &t2).map_err(domain)?;
            let _ = writeln!(out, "points {}", ps.len());
            let _ = writeln!(out, "t1 {s1}");
            let _ = writeln!(out, "t2 {s2}");
        }
        Command::Gen(GenCommand::Reduction(a)) => {
            let graph: CubicGraph = read(&a.graph)?
                .parse()
                .map_err(|e| usage(format!("{}: {e}", a.graph.display())))?;
            let config = match a.small {
                Some((d, w)) => ReductionConfig::small(d, w),
                None => ReductionConfig::default(),
            };
            let inst = assemble_cached(&graph, &config).map_err(domain)?;
            let p = &a.out_prefix;
            write(&prefixed(p, "points.txt"), &serialize_points(inst.point_set.points()))?;
            write(&prefixed(p, "t1.txt"), &serialize_triangulation(&inst.t1))?;
            write(&prefixed(p, "t2.txt"), &serialize_triangulation(&inst.t2))?;
            write(&prefixed(p, "params.txt"), &write_params(&inst, a.k))?;
            write(&prefixed(p, "instance.txt"), &write_instance(&inst))?;
            out.push_str(&write_params(&inst, a.k));
        }
        Command::Solve(SolveCommand::Distance(a)) => {
            let ps = load_points(&a.points)?;
            let t1 = load_triangulation(&a.t1, &ps)?;
            let t2 = load_triangulation(&a.t2, &ps)?;
            let r = flip_distance(&t1, &t2, a.budget).map_err(domain)?;
            match (r.distance, r.witness) {
                (Distance::Exact(k), Some(w)) => {
                    if let Some(path) = &a.emit_witness {
                        write(path, &serialize_sequence(&w))?;
                    }
                    let _ = writeln!(out, "distance {k}");
                    let _ = writeln!(out, "nodes_expanded {}", r.nodes_expanded);
                }
                _ => {
                    return Err(domain(format!(
                        "exceeded: distance is larger than {} ({} nodes expanded)",
                        a.budget, r.nodes_expanded
                    )))
                }
            }
        }
        Command::Solve(SolveCommand::FlipGraph(a)) => {
            let ps = load_points(&a.points)?;
            let g = enumerate_flip_graph(ps, a.max_nodes).map_err(domain)?;
            write(&a.out, &serialize_flip_graph(&g))?;
            let _ = writeln!(out, "nodes {}", g.nodes.len());
            let _ = writeln!(out, "edges {}", g.adjacency.len());
        }
        Command::Verify(a) => {
            let (t1, t2) = match (&a.instance, &a.points, &a.t1, &a.t2) {
                (Some(prefix), ..) => {
                    let inst = load_instance(prefix)?;
                    (inst.t1, inst.t2)
                }
                (None, Some(p), Some(t1), Some(t2)) => {
                    let ps = load_points(p)?;
                    (load_triangulation(t1, &ps)?, load_triangulation(t2, &ps)?)
                }
                _ => return Err(usage("give --instance or all of --points, --t1, --t2")),
            };
            let seq = load_sequence(&a.sequence)?;
            let end = seq.replay(&t1).map_err(domain)?;
            if end != t2 {
                return Err(domain(format!(
                    "sequence of length {} ends {} edges away from T2",
                    seq.len(),
                    end.symmetric_difference(&t2) / 2
                )));
            }
            let _ = writeln!(out, "valid {}", seq.len());
        }
        Command::Compile(CompileCommand::CoverToFlips(a)) => {
            let inst = load_instance(&a.instance)?;
            let cover = parse_cover(&a.cover)?;
            let seq = flipdist::cover_to_flips(&inst, &cover).map_err(domain)?;
            let text = serialize_sequence(&seq);
            match &a.out {
                Some(path) => {
                    write(path, &text)?;
                    let _ = writeln!(out, "length {}", seq.len());
                    let _ = writeln!(out, "bound {}", inst.delta_bound(cover.len()));
                }
                None => out = text,
            }
        }
        Command::Extract(ExtractCommand::FlipsToCover(a)) => {
            let inst = load_instance(&a.instance)?;
            let seq = load_sequence(&a.sequence)?;
            let cover = flipdist::flips_to_cover(&inst, &seq).map_err(domain)?;
            let list: Vec<String> = cover.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", list.join(","));
        }
        Command::Validate(a) => {
            // an instance that no longer loads (say T1 stopped being a
            // triangulation) is reported, not raised
            let inst = match load_instance(&a.instance) {
                Ok(inst) => inst,
                Err(CliError::Domain(m)) => return Err(CliError::Report(format!("FAIL load: {m}\n"))),
                Err(e) => return Err(e),
            };
            let report = run_checks(&inst);
            out = report.to_string();
            if !report.passed() {
                return Err(CliError::Report(out));
            }
        }
        Command::Render(a) => {
            let ps = load_points(&a.points)?;
            let t1 = a.t1.as_deref().map(|p| load_triangulation(p, &ps)).transpose()?;
            let t2 = a.t2.as_deref().map(|p| load_triangulation(p, &ps)).transpose()?;
            let labels = match (a.chain, &t1) {
                (Some(n), Some(t)) => {
                    let d = chain_over(&ps, n)?;
                    stabbed_triangles(&d, t)
                        .map_err(domain)?
                        .into_iter()
                        .map(|(tri, b)| (tri, b.to_string()))
                        .collect()
                }
                (Some(_), None) => return Err(usage("--chain needs --t1")),
                _ => Vec::new(),
            };
            let opts = RenderOptions {
                width: a.width,
                ..RenderOptions::default()
            };
            let scene = render_svg(&ps, t1.as_ref(), t2.as_ref(), &labels, &opts);
            write(&a.out, &scene.to_svg(opts.point_radius))?;
            let _ = writeln!(out, "wrote {}", a.out.display());
        }
    }
    Ok(out)
}
