use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mrdlab_core::families::NszVariant;

pub const DEFAULT_BUDGET: u128 = 10_000_000_000;

#[derive(Debug, Parser)]
#[command(name = "mrdlab", version, about = "Exact experiments with 2-dimensional MRD codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write the result envelope here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Directory for cached field moduli.
    #[arg(long, global = true, env = "MRDLAB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Include wall-clock timing in the envelope.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field descriptor, automorphism count and norm-fiber sizes.
    Field(FieldArgs),
    /// MRD, scatteredness, standard form and idealizers of one code.
    Check(CheckArgs),
    /// Decide equivalence of two codes.
    Equiv(EquivArgs),
    /// Classify the (h, s) family at t = 3 or 4.
    Census(CensusArgs),
    /// Intersection dimensions and projection in PG(7, q^8).
    Geometry(GeometryArgs),
    /// Determinant identities on random (h, k).
    Det(DetArgs),
    /// Re-check a stored witness file.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long)]
    pub t: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VariantArg {
    Eq5,
    Sec4,
}

impl From<VariantArg> for NszVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Eq5 => NszVariant::Eq5,
            VariantArg::Sec4 => NszVariant::Sec4,
        }
    }
}

/// One code, by family and parameters.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct CodeArgs {
    /// G, H2, Z6, K, LZ, LMTZ, NSZ, H_std or BZZ.
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i64>,
    /// Index of h in the canonically ordered fiber of -1 under the norm to F_(q^t).
    #[arg(long)]
    pub h_index: Option<usize>,
    /// F_p coordinates of the parameter, low to high, separated by ':'.
    #[arg(long)]
    pub h_coords: Option<String>,
    /// Canonical index of the parameter (η, ζ or δ).
    #[arg(long)]
    pub param_index: Option<u64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Reject K instances that are not MRD.
    #[arg(long)]
    pub assert_mrd: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub code: CodeArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EquivArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// First code as key=value pairs, e.g. family=NSZ,s=1,h-index=3,variant=SEC4.
    #[arg(long)]
    pub a: String,
    /// Second code, same syntax.
    #[arg(long)]
    pub b: String,
    /// Also write the witness file here when one is found.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CensusArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value = "sec4")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where a disagreement reproducer is written.
    #[arg(long, default_value = "census-reproducer.json")]
    pub reproducer: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Single instance; without it every h and s is swept.
    #[arg(long)]
    pub h_index: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i64>,
    /// Dimension sweep rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DetArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub file: PathBuf,
}
