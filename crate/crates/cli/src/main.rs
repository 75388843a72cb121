//! `chua`: command-line access to simulation, analysis and sweeps.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::{Failure, Session};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CHUA_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "chua", version, about = "Chua circuit with a diode-pair nonlinearity: simulate, analyze, sweep")]
pub struct Cli {
    /// Directory for output files [default: $CHUA_OUT_DIR, else the current directory]
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for sweeps and maps; 0 uses all cores
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Validate the configuration, print it, and exit without computing
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Skip SVG rendering
    #[arg(long, global = true)]
    pub no_svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate one trajectory; writes simulate.csv and an x-y projection
    Simulate(TrajectoryArgs),
    /// Crossings of the plane y = 0; writes poincare.csv
    Poincare(PoincareArgs),
    /// Lyapunov spectrum by the tangent-flow method; writes lyapunov.json
    Lyapunov(LyapunovArgs),
    /// Bifurcation diagram by continuation; writes bifurcate.csv
    Bifurcate(BifurcateArgs),
    /// Parameter-plane classification map; writes map.csv
    Map(MapArgs),
    /// Frequency response G(jw); writes nyquist.csv
    Nyquist(NyquistArgs),
    /// Describing function N(X) and its locus -1/N(X); writes df.csv
    Df(DfArgs),
    /// Real-axis interception points of the frequency response
    Intercepts(InterceptsArgs),
    /// Limit cycles predicted by harmonic balance
    Cycles(ParamsOnlyArgs),
    /// Dimensionless parameters from circuit element values
    Fromcircuit(FromCircuitArgs),
    /// Analytic region label of a parameter point
    Regions(ParamsOnlyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g0: Option<f64>,
    /// Slope at the origin, g0 + I0 (alternative to --g0)
    #[arg(long = "g0-plus-i0", allow_negative_numbers = true, conflicts_with = "g0")]
    pub g0_plus_i0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub i0: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct InitialArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct IntegratorArgs {
    /// rk45 (adaptive) or rk4 (fixed step)
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Step size for rk4
    #[arg(long)]
    pub step: Option<f64>,
    /// Time discarded before recording
    #[arg(long)]
    pub transient: Option<f64>,
    /// Time recorded after the transient
    #[arg(long = "t")]
    pub t_sample: Option<f64>,
    /// State norm treated as divergence
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct TrajectoryArgs {
    /// JSON file with fields params, initial, integrator
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub initial: InitialArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug, Clone)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub run: TrajectoryArgs,
    /// Stop after this many crossings
    #[arg(long)]
    pub max_crossings: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub run: TrajectoryArgs,
    /// Seed for a random initial tangent frame (identity frame when absent)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct BifurcateArgs {
    /// JSON file mirroring the bifurcation spec fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Swept parameter: g0, g0_plus_i0, alpha, beta or i0
    #[arg(long)]
    pub swept: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long = "n")]
    pub n_points: Option<usize>,
    /// Comma-separated passes: forward_inherit, backward_inherit, cold_start
    #[arg(long)]
    pub modes: Option<String>,
    #[command(flatten)]
    pub initial: InitialArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// JSON file mirroring the grid spec fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub x_param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_hi: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub y_param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_hi: Option<f64>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// analytic or numeric
    #[arg(long)]
    pub backend: Option<String>,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug, Clone)]
pub struct NyquistArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Largest |omega| sampled
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Samples per half axis
    #[arg(long = "n")]
    pub n_points: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct DfArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub g0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub i0: Option<f64>,
    /// Largest amplitude X
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Number of amplitudes from 0 to xmax
    #[arg(long = "n")]
    pub n_points: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct InterceptsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ParamsOnlyArgs {
    /// JSON file with a params field
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FromCircuitArgs {
    /// JSON circuit description
    #[arg(long)]
    pub config: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let session = match Session::new(&cli) {
        Ok(s) => s,
        Err(f) => return report(f),
    };
    match commands::run(&cli.command, &session) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Failure::Numerical(e) => {
            eprintln!("{}", output::diagnostic_json(&e));
            ExitCode::from(2)
        }
    }
}
