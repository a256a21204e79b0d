mod cmd_germs;
mod cmd_hypgraph;
mod cmd_logscale;
mod cmd_selfsim;
mod cmd_smale;
mod report;
mod sources;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{CmdResult, Failure, Format};

#[derive(Parser, Debug)]
#[command(name = "hypgrpd", version, about = "Hyperbolic groupoids, log-scales and self-similar actions")]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled computations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// δ of a log-scale, optionally compared with a second one.
    LogscaleDelta(cmd_logscale::DeltaArgs),
    /// Metric of a log-scale, or the log-scale of a metric.
    LogscaleMetric(cmd_logscale::MetricArgs),
    /// Paste local log-scales into a global one.
    Paste(cmd_logscale::PasteArgs),
    /// Four-point δ of a graph.
    Delta(cmd_hypgraph::DeltaArgs),
    /// Thin-triangle δ of a graph.
    ThinDelta(cmd_hypgraph::ThinArgs),
    /// Busemann estimate along a ray.
    Busemann(cmd_hypgraph::BusemannArgs),
    /// Convergence criterion for directed paths.
    Criterion(cmd_hypgraph::CriterionArgs),
    /// Level graph of a cocycle graph.
    LevelGraph(cmd_hypgraph::LevelArgs),
    /// Action of a group element on a word.
    Act(cmd_selfsim::ActArgs),
    /// Section of a group element at a word.
    Section(cmd_selfsim::SectionArgs),
    /// Nucleus of a contracting recursion.
    Nucleus(cmd_selfsim::NucleusArgs),
    /// Schreier graph on words of a given length.
    Schreier(cmd_selfsim::SchreierArgs),
    /// Cayley ball of a groupoid of germs.
    Cayley(cmd_germs::CayleyArgs),
    /// Tree of preimages of a point.
    PreimageTree(cmd_germs::PreimageArgs),
    /// Scale at which two rays separate.
    BoundaryScale(cmd_germs::BoundaryArgs),
    /// Orbital graph of a quadratic affine action.
    RotationGraph(cmd_germs::RotationArgs),
    /// Splice a pair of sequences and check the bracket axioms.
    SpliceCheck(cmd_smale::SpliceArgs),
    /// Fried log-scale of two sequences.
    Fried(cmd_smale::FriedArgs),
    /// Dual subshift of finite type.
    DualSft(cmd_smale::DualArgs),
    /// Check the duality certificates up to a horizon.
    DualityWitness(cmd_smale::DualityArgs),
    /// Gluing graph of the limit space at a level.
    LimitSpace(cmd_smale::LimitArgs),
    /// Graph of a recursion up to a word length.
    GammaGraph(cmd_smale::GammaArgs),
    /// Vershik successors of a path.
    Vershik(cmd_smale::VershikArgs),
    /// Iterate the substitution.
    Substitution(cmd_smale::SubstitutionArgs),
    /// Tile lengths from the substitution matrix.
    TileLengths(cmd_smale::TileArgs),
    /// Tile itinerary along a leaf.
    Itinerary(cmd_smale::ItineraryArgs),
}

fn dispatch(cmd: &Cmd, seed: u64) -> CmdResult {
    match cmd {
        Cmd::LogscaleDelta(a) => cmd_logscale::delta(a, seed),
        Cmd::LogscaleMetric(a) => cmd_logscale::metric(a, seed),
        Cmd::Paste(a) => cmd_logscale::paste(a, seed),
        Cmd::Delta(a) => cmd_hypgraph::delta(a, seed),
        Cmd::ThinDelta(a) => cmd_hypgraph::thin(a, seed),
        Cmd::Busemann(a) => cmd_hypgraph::busemann(a, seed),
        Cmd::Criterion(a) => cmd_hypgraph::criterion(a, seed),
        Cmd::LevelGraph(a) => cmd_hypgraph::level(a, seed),
        Cmd::Act(a) => cmd_selfsim::act(a, seed),
        Cmd::Section(a) => cmd_selfsim::section(a, seed),
        Cmd::Nucleus(a) => cmd_selfsim::nucleus(a, seed),
        Cmd::Schreier(a) => cmd_selfsim::schreier(a, seed),
        Cmd::Cayley(a) => cmd_germs::cayley(a, seed),
        Cmd::PreimageTree(a) => cmd_germs::preimage_tree(a, seed),
        Cmd::BoundaryScale(a) => cmd_germs::boundary(a, seed),
        Cmd::RotationGraph(a) => cmd_germs::rotation(a, seed),
        Cmd::SpliceCheck(a) => cmd_smale::splice_check(a, seed),
        Cmd::Fried(a) => cmd_smale::fried(a, seed),
        Cmd::DualSft(a) => cmd_smale::dual(a, seed),
        Cmd::DualityWitness(a) => cmd_smale::duality(a, seed),
        Cmd::LimitSpace(a) => cmd_smale::limit_space(a, seed),
        Cmd::GammaGraph(a) => cmd_smale::gamma(a, seed),
        Cmd::Vershik(a) => cmd_smale::vershik(a, seed),
        Cmd::Substitution(a) => cmd_smale::substitution(a, seed),
        Cmd::TileLengths(a) => cmd_smale::tiles(a, seed),
        Cmd::Itinerary(a) => cmd_smale::itinerary(a, seed),
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HYPGRPD_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::input(format!("HYPGRPD_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::input(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    init_threads()?;
    let rep = dispatch(&cli.cmd, cli.seed)?;
    let text = rep.render(cli.format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
        }
    }
    Ok(rep.status.code())
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(std::env::args_os());
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
