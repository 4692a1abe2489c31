use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use h2curl::cli::{self, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "h2curl",
    about = "H²(curl)-conforming finite elements in 2D: element verification and quad-curl experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Write the report/CSV to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Render markdown tables instead of CSV.
    #[arg(long, global = true)]
    markdown: bool,
    /// Worker threads for assembly and error norms (assembled values are
    /// identical for any thread count). Defaults to H2CURL_THREADS or 1.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Rect,
    Tri,
}

impl From<ShapeArg> for cli::Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Rect => cli::Shape::Rect,
            ShapeArg::Tri => cli::Shape::Tri,
        }
    }
}

#[derive(Args)]
struct ElementArgs {
    /// Cell shape.
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// Element order (>= 3 on rectangles, >= 4 on triangles).
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check element dimensions, duality, edge-trace determination, and the
    /// published lowest-order basis tables.
    VerifyElement(ElementArgs),
    /// Interpolation convergence study on uniform meshes of the unit square.
    InterpStudy {
        #[command(flatten)]
        element: ElementArgs,
        /// Comma-separated subdivision counts, e.g. 4,8,16,32.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Mixed-solver convergence study for the manufactured solution.
    SolveExample1 {
        #[command(flatten)]
        element: ElementArgs,
        /// Comma-separated subdivision counts, e.g. 16,24,32.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Quad-curl solve on graded L-shape triangulations with successive
    /// differences between refinement levels.
    SolveLshape {
        /// Element order (triangles, >= 4).
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Grading parameter in (0, 0.5]; 0.5 is uniform refinement.
        #[arg(long)]
        kappa: f64,
        /// Number of nested refinement levels to solve.
        #[arg(long)]
        levels: usize,
    },
    /// Closed-form space sizes M1/Δ1/M2/Δ2 over a range of orders.
    DofTable {
        /// Order range in the comparison-table convention, e.g. 2..5.
        #[arg(long, value_parser = parse_range)]
        k: (usize, usize),
        /// Mesh subdivision count.
        #[arg(long)]
        n: usize,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo = a.parse().map_err(|e| format!("{e}"))?;
        let hi = b.parse().map_err(|e| format!("{e}"))?;
        Ok((lo, hi))
    } else {
        let k = s.parse().map_err(|e| format!("{e}"))?;
        Ok((k, k))
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let threads = args
        .threads
        .or_else(|| {
            std::env::var("H2CURL_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();

    let command = match args.command {
        Cmd::VerifyElement(e) => Command::VerifyElement {
            shape: e.shape.into(),
            k: e.k,
        },
        Cmd::InterpStudy { element, n } => Command::InterpStudy {
            shape: element.shape.into(),
            k: element.k,
            ns: n,
        },
        Cmd::SolveExample1 { element, n } => Command::SolveExample1 {
            shape: element.shape.into(),
            k: element.k,
            ns: n,
        },
        Cmd::SolveLshape { k, kappa, levels } => Command::SolveLshape { k, kappa, levels },
        Cmd::DofTable { k, n } => Command::DofTable {
            k_min: k.0,
            k_max: k.1,
            n,
        },
    };
    let config = RunConfig {
        command,
        markdown: args.markdown,
    };
    match cli::run(&config) {
        Ok(out) => {
            if let Some(path) = args.output {
                if let Err(e) = std::fs::write(&path, &out.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
