//! `raycut` command-line tool.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid data.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] raycut::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_io() => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "raycut", version, about = "Seeded 3D segmentation on a spherical ray graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment a volume from a seed point.
    Segment(SegmentArgs),
    /// Compare predicted masks with reference masks.
    Eval(EvalArgs),
    /// Write a synthetic test volume.
    Phantom(PhantomArgs),
    /// Serve the HTTP API for a volume.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CostArg {
    /// Cumulative region cost with an automatic threshold.
    Region,
    /// Plain absolute deviation from the seed mean.
    Deviation,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub input: String,
    /// Seed as x,y,z voxel indices (world millimetres with --seed-mm).
    #[arg(long, allow_hyphen_values = true)]
    pub seed: String,
    #[arg(long)]
    pub seed_mm: bool,
    #[arg(long, default_value_t = 3)]
    pub subdiv: u32,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 50.0)]
    pub radius_mm: f64,
    #[arg(long, default_value_t = 1)]
    pub delta_r: usize,
    #[arg(long, default_value_t = 3)]
    pub mean_window: usize,
    #[arg(long, value_enum, default_value_t = CostArg::Region)]
    pub cost: CostArg,
    /// Fixed region threshold (deviation units) instead of the automatic one.
    #[arg(long, conflicts_with = "cost")]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out_mask: String,
    #[arg(long)]
    pub out_mesh: Option<String>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, requires = "truth", conflicts_with = "manifest")]
    pub pred: Option<String>,
    #[arg(long, requires = "pred")]
    pub truth: Option<String>,
    /// File of `id,pred,truth` lines; paths relative to the manifest.
    #[arg(long, required_unless_present = "pred")]
    pub manifest: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum PhantomKind {
    Sphere,
    Ellipsoid,
    Shifted,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, value_enum)]
    pub kind: PhantomKind,
    #[arg(long)]
    pub out: String,
    /// Also write the analytic ground-truth mask.
    #[arg(long)]
    pub out_truth: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Gaussian noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Voxels per side of the cubic grid.
    #[arg(long, default_value_t = 96)]
    pub size: usize,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Sphere radius in mm (sphere and shifted kinds).
    #[arg(long, default_value_t = 20.0)]
    pub radius: f64,
    /// Ellipsoid semi-axes a,b,c in mm.
    #[arg(long, default_value = "25,20,15")]
    pub semi_axes: String,
    /// Centre offset a,b,c in mm for the shifted kind.
    #[arg(long, default_value = "6,-4,3", allow_hyphen_values = true)]
    pub offset_mm: String,
    #[arg(long, default_value_t = 200.0)]
    pub inside: f64,
    #[arg(long, default_value_t = 50.0)]
    pub outside: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Segment(a) => commands::segment(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Phantom(a) => commands::phantom(&a),
        Command::Serve(a) => commands::serve(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
