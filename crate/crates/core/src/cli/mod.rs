//! The `cosmo` command line: one subcommand per experiment, each writing a
//! run directory with `summary.json`, CSV tables, and images or volumes.

mod commands;
mod expr;
mod session;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use expr::{parse_activation, ParseError};
pub use session::CliError;

pub const DEFAULT_ACTIVATION: &str = "cosmo(raised_cosine(T=5,beta=0.05),zeta=1.5)";

#[derive(Parser, Debug)]
#[command(name = "cosmo", version, about = "Fit and analyse complex-modulated coordinate networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Fit an image and report reconstruction PSNR/SSIM.
    Fit(FitArgs),
    /// Fit a photon-noise measurement and compare against the clean image.
    Denoise(DenoiseArgs),
    /// Fit a block-averaged image and evaluate on the full-resolution grid.
    Superres(SuperresArgs),
    /// Fit a randomly subsampled image and evaluate on every pixel.
    Inpaint(InpaintArgs),
    /// Fit a 3-D occupancy volume and report IoU.
    Occupancy(OccupancyArgs),
    /// Chebyshev coefficients, decay tables, parity and coverage reports.
    Cheb(ChebArgs),
    /// Per-layer DFT profiles of a fitted network, or polynomial spectrum broadening.
    Spectrum(SpectrumArgs),
    /// Grid over width, depth and learning rate.
    Sweep(SweepArgs),
    /// Re-run the command recorded in a `summary.json`.
    Replay(ReplayArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OutArgs {
    /// Run directory (default `$COSMO_OUT/<command>-seed<seed>`, or `runs/…`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write into a non-empty run directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Synthetic {
    /// Random-phase 1/f texture, three channels.
    Texture,
    /// Radial chirp, one channel.
    Chirp,
    /// Flat mid-grey, three channels.
    Constant,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SourceArgs {
    /// Input image (binary PPM, P6).
    #[arg(long, conflicts_with = "synthetic")]
    pub image: Option<PathBuf>,
    /// Generated input instead of a file.
    #[arg(long, value_enum)]
    pub synthetic: Option<Synthetic>,
    /// Side length of a generated image.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    /// Seed of the generated texture (independent of `--seed`).
    #[arg(long, default_value_t = 0)]
    pub image_seed: u64,
    /// Chirp rate `a` in `cos(π·a·r²)`.
    #[arg(long, default_value_t = 12.0)]
    pub chirp_rate: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    /// Linear layers including the output layer.
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    #[arg(long, default_value = DEFAULT_ACTIVATION)]
    pub activation: String,
    /// Keep T and zeta at the values in `--activation` instead of learning them.
    #[arg(long)]
    pub freeze_activation: bool,
    /// Real weights and biases.
    #[arg(long)]
    pub real_weights: bool,
    /// Sine-network initialization with this omega0.
    #[arg(long)]
    pub siren_init: Option<f64>,
    /// Bounds `lo,hi` of the learnable T.
    #[arg(long, default_value = "0,10")]
    pub t_bounds: String,
    /// Bounds `lo,hi` of the learnable zeta.
    #[arg(long, default_value = "0,3")]
    pub zeta_bounds: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Final learning rate as a fraction of `--lr`.
    #[arg(long, default_value_t = 0.01)]
    pub decay: f64,
    #[arg(long, default_value_t = 1)]
    pub log_every: usize,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct DenoiseArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Mean photon count at unit intensity.
    #[arg(long, default_value_t = 30.0)]
    pub photons: f64,
    /// Mean readout count.
    #[arg(long, default_value_t = 2.0)]
    pub readout: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SuperresArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Downsampling factor (2, 4 or 6).
    #[arg(long, default_value_t = 4)]
    pub factor: usize,
    /// Accept factors other than 2, 4 and 6.
    #[arg(long)]
    pub allow_any: bool,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct InpaintArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Fraction of observed pixels.
    #[arg(long, default_value_t = 0.2)]
    pub fraction: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Sphere,
    Torus,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OccupancyArgs {
    #[arg(long, value_enum, default_value_t = ShapeKind::Sphere, conflicts_with = "volume")]
    pub shape: ShapeKind,
    /// Ground-truth volume file instead of an analytic shape.
    #[arg(long)]
    pub volume: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.5)]
    pub major: f64,
    #[arg(long, default_value_t = 0.2)]
    pub minor: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    None,
    Parity,
    Coverage,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ChebArgs {
    #[arg(long, default_value = "raised_cosine(T=1,beta=0.05)")]
    pub activation: String,
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    #[arg(long, default_value_t = 50)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Report::None)]
    pub report: Report,
    /// Further activations for the `decay.csv` columns.
    #[arg(long)]
    pub compare: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumArgs {
    /// Polynomial broadening of a pure cosine instead of layer spectra.
    #[arg(long)]
    pub blueshift: bool,
    /// Polynomial degree K for `--blueshift`.
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    pub widths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub depths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub lrs: Vec<f64>,
    #[arg(long, default_value = DEFAULT_ACTIVATION)]
    pub activation: String,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub decay: f64,
    /// Cells trained concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A `summary.json` written by an earlier run.
    #[arg(long)]
    pub summary: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code: 0 success, 2 usage or input error, 3 numerical failure.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::run(cli.command) {
        Ok(dir) => {
            println!("{}", dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs an already-parsed command, returning the run directory.
pub fn run(command: Command) -> Result<PathBuf, CliError> {
    commands::run(command)
}
