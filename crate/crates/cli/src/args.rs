use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use magloc_core::synth::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "magloc",
    version,
    about = "Two-anchor AC magnetic localization: simulate, calibrate, track, evaluate"
)]
#[command(after_help = crate::EXIT_CODE_HELP)]
pub struct Cli {
    /// Config file; output reports with embedded `# cfg:` lines also work.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path, `-` for standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<String>,
    /// Allow overwriting an existing config when calibrating.
    #[arg(long, global = true)]
    pub force: bool,
    /// Replace the noise section with a named preset.
    #[arg(long, global = true, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a magnetometer stream for a trajectory.
    Simulate(SimulateArgs),
    /// Estimate K for both anchors from a capture at (D/2, 0) and write the config.
    Calibrate(InputArgs),
    /// Localize every window of a sample stream.
    Track(InputArgs),
    /// Static-dwell accuracy over the evaluation grid.
    EvalGrid(EvalGridArgs),
    /// Maximum sensors a shared link can carry.
    Capacity(CapacityArgs),
    /// Print the effective configuration in canonical form.
    ShowConfig,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("trajectory").required(true).args(["at", "linear", "circle", "waypoints"])))]
pub struct SimulateArgs {
    /// Static point.
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Constant-speed segment.
    #[arg(long, value_name = "X0,Y0,X1,Y1", allow_hyphen_values = true)]
    pub linear: Option<String>,
    /// Circle with angular rate in rad/s and optional start phase.
    #[arg(long, value_name = "CX,CY,R,RATE[,PHASE]", allow_hyphen_values = true)]
    pub circle: Option<String>,
    /// Timestamped waypoints, linearly interpolated.
    #[arg(long, value_name = "T:X:Y;T:X:Y;...")]
    pub waypoints: Option<String>,
    /// Seconds; defaults to `sim.duration`.
    #[arg(long)]
    pub duration: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Sample CSV, `-` for standard input; defaults to `paths.input`.
    #[arg(value_name = "INPUT")]
    pub input: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalGridArgs {
    /// Also write truth/estimate scatter data here.
    #[arg(long, value_name = "PATH")]
    pub scatter: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Link throughput, bytes/s.
    #[arg(long)]
    pub throughput: f64,
    /// Per-sensor update rate, Hz.
    #[arg(long)]
    pub rate: f64,
    /// Payload per update, bytes.
    #[arg(long)]
    pub bytes: f64,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    Preset::parse(s).ok_or_else(|| format!("unknown preset `{s}` (metal, wood, acrylic, noiseless)"))
}
