//! The `difq` command line: argument handling, dispatch and exit codes.
//!
//! Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or
//! input error, 3 numeric non-convergence.

mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{parse_config, KNOWN_KEYS};
pub use output::write_atomic;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Version of the report.json layout.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }
}

macro_rules! classify {
    ($t:ty, $($pat:pat),+) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                match e {
                    $($pat => CliError::NoConvergence(e.to_string()),)+
                    _ => CliError::Usage(e.to_string()),
                }
            }
        }
    };
}

classify!(
    crate::numdiff::NumError,
    crate::numdiff::NumError::NoConvergence { .. }
);
classify!(
    crate::riemann::RiemannError,
    crate::riemann::RiemannError::NoConvergence { .. },
    crate::riemann::RiemannError::Num(crate::numdiff::NumError::NoConvergence { .. })
);
classify!(
    crate::funcgrid::GridError,
    crate::funcgrid::GridError::NoConvergence { .. },
    crate::funcgrid::GridError::Num(crate::numdiff::NumError::NoConvergence { .. })
);
classify!(
    crate::sharplab::SharpError,
    crate::sharplab::SharpError::NoConvergence { .. },
    crate::sharplab::SharpError::ResidualTooLarge { .. }
);

impl From<crate::axioms::AxiomError> for CliError {
    fn from(e: crate::axioms::AxiomError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::expr::ExprError> for CliError {
    fn from(e: crate::expr::ExprError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::symcalc::SymError> for CliError {
    fn from(e: crate::symcalc::SymError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "difq",
    version,
    about = "Difference quotients, variations and their checks"
)]
struct Cli {
    /// Seed for every randomized suite.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// key=value file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// First difference quotient f^[1](x, u, t).
    Difq {
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        dir: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Variation along one or more directions.
    Var {
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        at: Option<String>,
        /// Repeat for higher order.
        #[arg(long)]
        dir: Vec<String>,
        #[arg(long)]
        t0: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Integral of a curve in x1 over [a, b] by refined midpoint sums.
    Integrate {
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        trials: Option<String>,
    },
    /// Numeric demonstrations on grid functions.
    Demo {
        #[arg(value_enum)]
        kind: DemoKind,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eta0: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long = "quad-nodes")]
        quad_nodes: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Rings,
    Division,
    Calculus,
    Integrals,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    Sharp,
    Shift,
    FixedPoint,
}

/// Merged options: config values overridden by flags.
#[derive(Debug, Clone, Default)]
pub(crate) struct Opts {
    map: BTreeMap<String, String>,
    dirs: Vec<String>,
}

fn put(m: &mut BTreeMap<String, String>, k: &str, v: &Option<String>) {
    if let Some(v) = v {
        m.insert(k.to_string(), v.clone());
    }
}

/// Runs the command line `args` (first item is the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut map = match &cli.config {
        Some(p) => config::load_config(p)?,
        None => BTreeMap::new(),
    };
    put(&mut map, "seed", &cli.seed);
    put(&mut map, "out", &cli.out);
    let mut dirs = Vec::new();
    let verb = match &cli.cmd {
        Cmd::Difq { expr, at, dir, t } => {
            put(&mut map, "expr", expr);
            put(&mut map, "at", at);
            put(&mut map, "dir", dir);
            put(&mut map, "t", t);
            "difq"
        }
        Cmd::Var {
            expr,
            at,
            dir,
            t0,
            tol,
        } => {
            put(&mut map, "expr", expr);
            put(&mut map, "at", at);
            put(&mut map, "t0", t0);
            put(&mut map, "tol", tol);
            dirs = dir.clone();
            "var"
        }
        Cmd::Integrate { expr, a, b, tol } => {
            put(&mut map, "expr", expr);
            put(&mut map, "a", a);
            put(&mut map, "b", b);
            put(&mut map, "tol", tol);
            "integrate"
        }
        Cmd::Verify { ring, trials, .. } => {
            put(&mut map, "ring", ring);
            put(&mut map, "trials", trials);
            "verify"
        }
        Cmd::Demo {
            eps,
            eta0,
            xi,
            n,
            steps,
            quad_nodes,
            tol,
            ..
        } => {
            put(&mut map, "eps", eps);
            put(&mut map, "eta0", eta0);
            put(&mut map, "xi", xi);
            put(&mut map, "n", n);
            put(&mut map, "steps", steps);
            put(&mut map, "quad-nodes", quad_nodes);
            put(&mut map, "tol", tol);
            "demo"
        }
    };
    if dirs.is_empty() {
        if let Some(d) = map.get("dir") {
            dirs = d.split(';').map(str::to_string).collect();
        }
    }
    let opts = Opts { map, dirs };
    let ctx = commands::Ctx::new(verb, opts)?;
    match cli.cmd {
        Cmd::Difq { .. } => commands::difq(&ctx, out),
        Cmd::Var { .. } => commands::var(&ctx, out),
        Cmd::Integrate { .. } => commands::integrate(&ctx, out),
        Cmd::Verify { suite, .. } => commands::verify(&ctx, suite, out),
        Cmd::Demo { kind, .. } => commands::demo(&ctx, kind, out),
    }
}
