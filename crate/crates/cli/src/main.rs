//! `gw`: batch certificates for Grothendieck weights.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{CliError, Format};

#[derive(Parser, Debug)]
#[command(name = "gw", version, about = "Exact Grothendieck weights on permutohedral and matroidal fans")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fan checks and built-in fans.
    #[command(subcommand)]
    Fan(FanCommand),
    /// Matroid invariants.
    Matroid(MatroidArgs),
    /// Weight balancing, products and polytope weights.
    #[command(subcommand)]
    Weight(WeightCommand),
    /// Characteristic-class weights of a matroid.
    Class(ClassArgs),
    /// Run a named identity check.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct FanSource {
    /// Fan JSON file.
    pub path: Option<PathBuf>,
    /// The permutohedral fan on [N].
    #[arg(long, value_name = "N")]
    pub braid: Option<usize>,
    /// The fan of projective space of dimension D.
    #[arg(long, value_name = "D")]
    pub projective: Option<usize>,
    /// The simplicial fan with a cone of multiplicity two.
    #[arg(long)]
    pub non_unimodular_example: bool,
}

#[derive(Subcommand, Debug)]
pub enum FanCommand {
    /// Unimodularity and the pairwise index condition.
    Check(FanSource),
    /// Print a fan as JSON.
    Show(FanSource),
}

#[derive(Args, Debug, Clone, Default)]
pub struct MatroidSource {
    /// Uniform matroid, as R,N.
    #[arg(long, value_name = "R,N")]
    pub uniform: Option<String>,
    /// Named matroid: fano, nonfano, vamos, k4, k3, u<r><n>.
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
    /// Graph edge list: JSON [[a,b], ...] or lines "a b".
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Matroid JSON file.
    #[arg(long, value_name = "FILE")]
    pub matroid: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Summary,
    CharPoly,
    ReducedCharPoly,
    Beta,
    Tutte,
    RankGenerating,
    Independence,
    Flats,
    Bases,
    Flags,
}

#[derive(Args, Debug)]
pub struct MatroidArgs {
    #[command(flatten)]
    pub source: MatroidSource,
    /// A catalog name, as a shorthand for --catalog.
    pub name: Option<String>,
    #[arg(long, value_enum, default_value_t = Invariant::Summary)]
    pub invariant: Invariant,
}

#[derive(Args, Debug, Clone, Default)]
pub struct WeightBuilder {
    /// Weight JSON file(s).
    #[arg(long = "file", value_name = "FILE")]
    pub files: Vec<PathBuf>,
    /// Weight of Δ_I for I given as a comma list; repeatable.
    #[arg(long = "delta", value_name = "I")]
    pub deltas: Vec<String>,
    /// The constant weight 1 on the permutohedral fan.
    #[arg(long)]
    pub ones: bool,
    /// Ground set size for --delta and --ones.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum WeightCommand {
    /// Check the balancing condition (braid or matroid domain).
    Balance(WeightBuilder),
    /// Product of two braid weights (two --delta or two --file).
    Product {
        #[command(flatten)]
        weights: WeightBuilder,
        /// Generic vector, comma separated; default 2,4,...,2^n.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Lattice-point weight of a generalized permutohedron: the Minkowski
    /// sum of the given Δ_I, or a polytope JSON file.
    Polytope {
        #[arg(long = "delta", value_name = "I")]
        deltas: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Polytope JSON file {n, z: {"1,3": value, ...}}.
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Mcy,
    Csm,
    Taut,
    Sub,
    Quot,
}

#[derive(Args, Debug)]
pub struct ClassArgs {
    #[arg(value_enum)]
    pub kind: ClassKind,
    #[command(flatten)]
    pub source: MatroidSource,
    /// Flag length for csm (default: all k, one weight each).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    BalanceBraid,
    BalanceMatroid,
    ProductOracle,
    TutteIdentity,
    PointedConvolution,
    PsiFormula,
    AijSymmetry,
    CsmBalancing,
    P2Example,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub identity: Identity,
    #[command(flatten)]
    pub source: MatroidSource,
    /// Element i (default: every element).
    #[arg(long)]
    pub i: Option<usize>,
    /// Element j (default: every element other than i).
    #[arg(long)]
    pub j: Option<usize>,
    /// Ground set size for balance-braid and product-oracle.
    #[arg(long)]
    pub n: Option<usize>,
    /// Flag length for csm-balancing (default: every k).
    #[arg(long)]
    pub k: Option<usize>,
    /// Generic vector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli.command).and_then(|out| out.emit(cli.format, cli.out.as_deref())) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<gw_core::Error> for CliError {
    fn from(e: gw_core::Error) -> Self {
        CliError::Core(e)
    }
}
