//! `lam`: command-line front end for the laminations library.

#[macro_use]
mod outcome;
mod combinatorics;
mod fixtures;
mod input;
mod numerics;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use outcome::{code_of, Sink};

#[derive(Parser, Debug)]
#[command(name = "lam", version, about = "Rational laminations, puzzle towers, tuning and rays")]
struct Cli {
    /// Print machine-readable JSON instead of the human report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a lamination or tower document.
    Verify(DocArgs),
    /// List the puzzle pieces of one level of a tower.
    Pieces {
        #[command(flatten)]
        doc: DocArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Reduce a tower to its mapping schema and classify it.
    Schema(DocArgs),
    /// List the external markings of a schema.
    Markings(DocArgs),
    /// Tune a base tower by laminations in its critical gaps.
    Tune {
        /// Base tower document.
        base: PathBuf,
        /// Schema lamination document.
        target: PathBuf,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Push a lamination through the internal angles of a base tower's gaps.
    Straighten {
        /// Base tower document.
        base: PathBuf,
        /// Lamination or tower document; its deepest level is used.
        lamination: PathBuf,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace one external ray of a polynomial.
    Trace {
        /// Polynomial document.
        polynomial: PathBuf,
        /// Exact angle `p/q`.
        #[arg(long)]
        angle: String,
        #[command(flatten)]
        ray: RayArgs,
        /// Write the ray samples as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group angles by where their rays land.
    Sample {
        /// Polynomial document.
        polynomial: PathBuf,
        /// Lamination or tower document, or a list of `p/q`.
        #[arg(long)]
        angles: PathBuf,
        /// Landing points closer than this are identified.
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[command(flatten)]
        ray: RayArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a lamination or tower as an SVG chord diagram.
    RenderLam {
        file: PathBuf,
        /// Draw this level of a tower instead of the deepest.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long, default_value_t = 1.0)]
        stroke: f64,
        #[arg(long)]
        no_fill: bool,
        /// Label every support angle.
        #[arg(long)]
        labels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the filled Julia set of every fiber as a PNG.
    RenderJulia(JuliaArgs),
    /// The built-in examples.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Args, Debug)]
struct DocArgs {
    file: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Deepest tower level the codings and the tuning may build.
    #[arg(long, default_value_t = 12)]
    budget: usize,
    /// Coding documents fixing the root of each gap.
    #[arg(long)]
    codings: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RayArgs {
    /// Fiber the ray starts in; defaults to the first vertex.
    #[arg(long)]
    vertex: Option<String>,
    /// Newton tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Continuation steps per unit of potential halving.
    #[arg(long, default_value_t = 8)]
    steps: usize,
    /// Maximum number of potential levels.
    #[arg(long, default_value_t = 400)]
    levels: usize,
}

#[derive(Args, Debug)]
struct JuliaArgs {
    /// Polynomial document.
    polynomial: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Viewport center as `re,im`.
    #[arg(long, default_value = "0,0", value_parser = input::parse_complex)]
    center: Complex64,
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    /// Panel side in pixels.
    #[arg(long, default_value_t = 512)]
    pixels: u32,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = ColoringArg::Smooth)]
    coloring: ColoringArg,
    /// Draw the ray of this angle; repeatable.
    #[arg(long)]
    ray: Vec<String>,
    /// Draw a ray exported by `trace --out`; repeatable.
    #[arg(long)]
    overlay: Vec<PathBuf>,
    /// Fiber for `--ray` and `--overlay`; defaults to the first vertex.
    #[arg(long)]
    vertex: Option<String>,
    /// Worker threads; falls back to the THREADS environment variable.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ColoringArg {
    Smooth,
    Binary,
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    /// Names and summaries.
    List,
    /// Print one example as a document.
    Emit {
        name: String,
        #[arg(long, value_enum, default_value_t = fixtures::Kind::Tower)]
        kind: fixtures::Kind,
        /// Tower depth; defaults to the fixture's own.
        #[arg(long)]
        depth: Option<usize>,
        /// Multiplier `re,im` for the `f-mu` family.
        #[arg(long, value_parser = input::parse_complex)]
        mu: Option<Complex64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Worker count from THREADS, if set to a positive integer.
fn env_threads() -> Option<usize> {
    std::env::var("THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let sink = |out: Option<PathBuf>| Sink { json: cli.json, out };
    match cli.command {
        Command::Verify(d) => combinatorics::verify(&d.file, &sink(d.out)),
        Command::Pieces { doc, depth } => combinatorics::pieces(&doc.file, depth, &sink(doc.out)),
        Command::Schema(d) => combinatorics::schema(&d.file, &sink(d.out)),
        Command::Markings(d) => combinatorics::markings(&d.file, &sink(d.out)),
        Command::Tune { base, target, system, out } => {
            combinatorics::tune(&base, &target, system.budget, system.codings.as_deref(), &sink(out))
        }
        Command::Straighten { base, lamination, system, out } => {
            combinatorics::straighten(&base, &lamination, system.budget, system.codings.as_deref(), &sink(out))
        }
        Command::Trace { polynomial, angle, ray, out } => {
            numerics::trace(&polynomial, &angle, &ray, out.as_deref(), cli.json)
        }
        Command::Sample { polynomial, angles, eps, ray, out } => {
            numerics::sample(&polynomial, &angles, eps, &ray, &sink(out))
        }
        Command::RenderLam { file, depth, size, stroke, no_fill, labels, out } => {
            let style = laminations::render::SvgStyle { size, stroke_width: stroke, fill: !no_fill, labels };
            combinatorics::render_lam(&file, depth, &style, out.as_deref())
        }
        Command::RenderJulia(args) => numerics::render_julia(&args, args.threads.or_else(env_threads)),
        Command::Fixtures { action: FixtureAction::List } => fixtures::list(cli.json),
        Command::Fixtures { action: FixtureAction::Emit { name, kind, depth, mu, out } } => {
            fixtures::emit(&name, kind, depth, mu, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = env_threads() {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code_of(&err))
        }
    }
}
