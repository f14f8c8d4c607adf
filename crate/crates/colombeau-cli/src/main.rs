//! Entry point: flag parsing, configuration layering, and exit codes.
//! Exit 0 means a decided result, 1 an error, 2 an undecidable decision.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use colombeau_cli::commands::{self, MemberArgs};
use colombeau_cli::config::{ConfigOverlay, Format};
use colombeau_cli::demos::DemoName;
use colombeau_cli::error::CliResult;
use colombeau_cli::report;
use colombeau_cli::verify::SuiteName;

#[derive(Parser)]
#[command(
    name = "colombeau",
    version,
    about = "Decisions, norms, and metrics for nets of smooth functions on an epsilon grid"
)]
struct Cli {
    /// Grid base; epsilon values are base^-k.
    #[arg(long, global = true)]
    grid_base: Option<f64>,

    /// Smallest exponent k of the grid.
    #[arg(long, global = true)]
    k_min: Option<u32>,

    /// Largest exponent k of the grid.
    #[arg(long, global = true)]
    k_max: Option<u32>,

    /// Largest integer exponent probed by positivity and exterior
    /// witness searches.
    #[arg(long, global = true)]
    mmax: Option<i32>,

    /// Seed for every randomized component.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// JSON config file; environment variables and flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function at a point and report per-epsilon values.
    Eval {
        /// Component expressions.
        #[arg(required = true)]
        exprs: Vec<String>,
        /// Evaluation point: comma-separated exact-net coordinates.
        #[arg(long)]
        at: String,
    },
    /// Compute the order-m norm of a function over a box set.
    Norm {
        #[arg(required = true)]
        exprs: Vec<String>,
        /// Box set JSON; defaults to [-2, 2] per dimension.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 0)]
        order: usize,
    },
    /// Compute the truncated sharp metrics between two functions.
    Metric {
        f: String,
        g: String,
        /// Requested truncation order of the metric sums.
        #[arg(long, default_value_t = 20)]
        trunc: usize,
        /// Support witness JSON; defaults to [-2, 2] per dimension.
        #[arg(long)]
        set: Option<String>,
    },
    /// Decide a membership: points in sets, or functions in balls.
    Member {
        #[arg(long)]
        internal: bool,
        #[arg(long)]
        exterior: bool,
        #[arg(long)]
        strongly: bool,
        #[arg(long)]
        ball: bool,
        #[arg(long)]
        cset: bool,
        #[arg(long)]
        uset: bool,
        /// Point for the set-membership modes.
        #[arg(long)]
        point: Option<String>,
        /// Box set JSON: the set itself, or the support witness for the
        /// function modes.
        #[arg(long)]
        set: Option<String>,
        /// Center function for the ball, cset, and uset modes.
        #[arg(long)]
        f: Option<String>,
        /// Candidate function for the ball, cset, and uset modes.
        #[arg(long)]
        g: Option<String>,
        /// Norm order for the function modes.
        #[arg(long, default_value_t = 0)]
        order: usize,
        /// Radius: an exact net for ball and uset, a real for cset.
        #[arg(long)]
        radius: Option<String>,
    },
    /// Report extreme values of a scalar function over a box set.
    Extreme {
        expr: String,
        #[arg(long)]
        set: Option<String>,
    },
    /// Verify compact support of a function against a witness set.
    VerifySupport {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Run a built-in demonstration with assertions.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
    /// Run a randomized property suite and report per-property results.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
        /// Suite seed; defaults to the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> CliResult<i32> {
    let mut overlay = ConfigOverlay::default();
    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("COLOMBEAU_CONFIG").map(PathBuf::from));
    if let Some(path) = config_path {
        overlay = overlay.merge(ConfigOverlay::from_file(&path)?);
    }
    overlay = overlay.merge(ConfigOverlay::from_env()?);
    overlay = overlay.merge(ConfigOverlay {
        grid_base: cli.grid_base,
        k_min: cli.k_min,
        k_max: cli.k_max,
        mmax: cli.mmax,
        seed: cli.seed,
        format: cli.format,
    });
    let cfg = overlay.resolve()?;

    let rendered = match &cli.command {
        Command::Eval { exprs, at } => commands::cmd_eval(exprs, at, &cfg)?,
        Command::Norm { exprs, set, order } => {
            commands::cmd_norm(exprs, set.as_deref(), *order, &cfg)?
        }
        Command::Metric { f, g, trunc, set } => {
            commands::cmd_metric(f, g, *trunc, set.as_deref(), &cfg)?
        }
        Command::Member {
            internal,
            exterior,
            strongly,
            ball,
            cset,
            uset,
            point,
            set,
            f,
            g,
            order,
            radius,
        } => commands::cmd_member(
            &MemberArgs {
                internal: *internal,
                exterior: *exterior,
                strongly: *strongly,
                ball: *ball,
                cset: *cset,
                uset: *uset,
                point: point.clone(),
                set: set.clone(),
                f: f.clone(),
                g: g.clone(),
                order: *order,
                radius: radius.clone(),
            },
            &cfg,
        )?,
        Command::Extreme { expr, set } => commands::cmd_extreme(expr, set.as_deref(), &cfg)?,
        Command::VerifySupport { exprs, set, order, budget } => {
            commands::cmd_verify_support(exprs, set, *order, *budget, &cfg)?
        }
        Command::Demo { name } => commands::cmd_demo(*name, &cfg)?,
        Command::Verify { suite, seed } => commands::cmd_verify(*suite, *seed, &cfg)?,
    };
    report::print(&rendered.json, cfg.format);
    Ok(rendered.exit)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(report::EXIT_ERROR);
        }
    }
}
