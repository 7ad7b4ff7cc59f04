use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "latfree",
    version,
    about = "Exact computations in free vector lattices and free Banach lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Ambient space: `fvl:N` or `seq:P:M` (P = 1, 2, inf or a rational > 1).
    #[arg(long, global = true)]
    pub space: Option<String>,

    /// Lattice-linear expression in t1, t2, ...; repeat for commands taking two.
    #[arg(long = "expr", global = true, allow_hyphen_values = true)]
    pub exprs: Vec<String>,

    /// Evaluation point, comma separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Option<String>,

    /// Number of variables for `eval` (defaults to the length of --at).
    #[arg(long, global = true)]
    pub arity: Option<usize>,

    /// Vectors x1;x2;... feeding t1, t2, ... (default: the unit vectors).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub vectors: Option<String>,

    /// Images y1;y2;... of the unit vectors under the map (`extend`, `audit`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub map: Option<String>,

    /// Norm on the target lattice: 1, 2, inf or a rational > 1.
    #[arg(long, global = true, default_value = "inf")]
    pub target: String,

    /// Cap on the number of points in a norming tuple (default: twice the cell count)
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<usize>,

    #[arg(long, global = true, default_value_t = 8)]
    pub restarts: usize,

    #[arg(long, global = true, env = "LATFREE_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Step size at which the heuristic search stops.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Method::Auto)]
    pub method: Method,

    /// Random seminorms checked by `audit` besides the evaluations at ±e_j.
    #[arg(long, global = true, default_value_t = 50)]
    pub family: usize,

    /// Comma separated criterion numbers for `selftest` (default: all).
    #[arg(long, global = true)]
    pub criteria: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evaluate an expression at a point.
    Eval,
    /// Decide whether two expressions define the same element.
    Equiv,
    /// Certified bounds for the free Banach lattice norm.
    Norm,
    /// Apply the lattice homomorphism extending a map.
    Extend,
    /// Check a certificate against admissible seminorms and a map.
    Audit,
    /// Run the acceptance suite.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Equiv => "equiv",
            Command::Norm => "norm",
            Command::Extend => "extend",
            Command::Audit => "audit",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact LP on fvl, seq:1 and seq:inf; bounds elsewhere.
    Auto,
    Exact,
    Bounds,
}
