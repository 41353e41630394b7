use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fusionforge_core::permutation::DEFAULT_SECTOR_CAP;
use fusionforge_core::DEFAULT_TOLERANCE;

#[derive(Debug, Parser)]
#[command(name = "fusionforge", version, about = "Fusion rules of group-graded extensions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Rounding tolerance for integer-valued formulas, in (0, 1e-2].
    #[arg(long, global = true, env = "FUSIONFORGE_TOLERANCE", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Seed for idempotent extraction.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "FUSIONFORGE_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Spell labels in text output with ASCII aliases (tau, 1, x).
    #[arg(long, global = true)]
    pub ascii: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    /// Compact product list, e.g. "(1,τ)(1,τ) = 3(2,𝟙𝟙)+…".
    #[value(alias = "products")]
    AppendixStyle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fusion ring of a modular category from its S-matrix.
    Verlinde(CategoryArg),
    /// Genus-g fusion coefficient.
    Genus(GenusArgs),
    /// Pointed extension from metric group, Lagrangian and action data.
    #[command(name = "extension-pointed", visible_alias = "pointed")]
    Pointed(PointedArgs),
    /// Cyclic permutation extension C≀ℤ/n.
    #[command(name = "extension-permutation", visible_alias = "permutation")]
    Permutation(PermutationArgs),
    /// Run the idempotent recovery algorithm on an algebra spec.
    EngineRun(EngineArgs),
    /// Check the fusion ring axioms of a ring document.
    Verify(VerifyArgs),
    /// List built-in categories, or print one.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
pub struct CategoryArg {
    /// Catalog name, path to a modular data JSON file, or - for stdin.
    #[arg(long, short = 'c')]
    pub category: String,
}

#[derive(Debug, Args)]
pub struct GenusArgs {
    #[command(flatten)]
    pub category: CategoryArg,
    #[arg(short = 'g', long = "genus", default_value_t = 0)]
    pub g: u32,
    /// Incoming labels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub insertions: Vec<String>,
    /// Outgoing labels, comma separated; dualized before summing.
    #[arg(long, value_delimiter = ',')]
    pub outgoing: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PointedArgs {
    /// Pointed input JSON file, or - for stdin.
    #[arg(long, short = 'i')]
    pub input: String,
    /// Also run the recovery algorithm and compare.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct PermutationArgs {
    #[command(flatten)]
    pub category: CategoryArg,
    #[arg(long, short = 'n')]
    pub n: usize,
    /// Largest allowed sector rank.
    #[arg(long, default_value_t = DEFAULT_SECTOR_CAP)]
    pub sector_cap: usize,
    /// Also run the recovery algorithm and compare.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct EngineSource {
    /// Graded algebra spec JSON file, or - for stdin.
    #[arg(long)]
    pub spec: Option<String>,
    /// Pointed input JSON file.
    #[arg(long)]
    pub pointed: Option<String>,
    /// Catalog name or modular data file; with --n the permutation spec.
    #[arg(long, short = 'c')]
    pub category: Option<String>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub source: EngineSource,
    #[arg(long, short = 'n', requires = "category")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SECTOR_CAP)]
    pub sector_cap: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fusion ring or graded fusion ring JSON file, or - for stdin.
    #[arg(long, short = 'r')]
    pub ring: String,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    pub name: Option<String>,
}
