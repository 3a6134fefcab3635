//! `mdc`: spectra, decay, stability and gate-fidelity calculations for
//! molecular ensemble qubits in dipolar crystals.

// `!(x >= 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod context;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mdc_core::rotor::{FieldPointKind, StateLabel};

use context::{parse_label, PhysArgs};

#[derive(Debug, Parser)]
#[command(name = "mdc", version, about = "Molecular dipolar crystal qubit calculator")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $MDC_OUT_DIR, then ./mdc-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for data-parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-molecule rotor spectra and qubit-pair parameters.
    #[command(subcommand)]
    Rotor(RotorCmd),
    /// Exciton band J(k) and E(k).
    Band(BandArgs),
    /// Phonon branches f(q) with the coupling function g(q) and J(q).
    Phonon(BandArgs),
    /// Exciton-phonon coupling M(q, k = 0) along the zone.
    Coupling(CouplingArgs),
    /// Decay rates, regime classification and lifetime of the k = 0 exciton.
    Lifetime(LifetimeArgs),
    /// Trapped crystals: equilibrium, normal modes and Lindemann profiles.
    #[command(subcommand)]
    Trap(TrapCmd),
    /// Zig-zag, tunneling, temperature and Lindemann checks.
    Stability(StabilityArgs),
    /// Gate fidelity of the configured crystal and cavity.
    Fidelity(FidelityArgs),
    /// Worked examples with fixed inputs.
    CaseStudy {
        #[arg(value_enum)]
        preset: Preset,
    },
    /// Lists the data products and the commands emitting them.
    Manifest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Cabr,
}

#[derive(Debug, Subcommand)]
pub enum RotorCmd {
    /// Energies and induced dipoles of the lowest levels versus field.
    Scan(ScanArgs),
    /// κ, ε and dipoles of one qubit pair.
    Pair(PairArgs),
    /// Bracketed search for a sweet (ε = 0) or magic (ε + κ = 0) field.
    Find(FindArgs),
    /// Spectrum with spin-rotation coupling.
    Spin(SpinArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 6.0)]
    pub to: f64,
    #[arg(long, default_value_t = 121)]
    pub steps: usize,
    /// Largest |M_N| included.
    #[arg(long, default_value_t = 2)]
    pub m_max: u32,
    /// Highest N label written.
    #[arg(long, default_value_t = 3)]
    pub n_show: u32,
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, value_parser = parse_label)]
    pub g: Option<StateLabel>,
    #[arg(long, value_parser = parse_label)]
    pub e: Option<StateLabel>,
    #[arg(long = "Eb")]
    pub e_b: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[arg(long, value_parser = parse_label)]
    pub g: Option<StateLabel>,
    #[arg(long, value_parser = parse_label)]
    pub e: Option<StateLabel>,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Field bracket lo,hi [B/μ0].
    #[arg(long, value_parser = parse_pair)]
    pub bracket: (f64, f64),
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Sweet,
    Magic,
}

impl From<KindArg> for FieldPointKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sweet => FieldPointKind::Sweet,
            KindArg::Magic => FieldPointKind::Magic,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    #[arg(long = "Eb", default_value_t = 3.05)]
    pub e_b: f64,
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: Option<u8>,
    /// 1D: samples on [0, π]. 2D: samples per path segment.
    #[arg(long)]
    pub points: Option<usize>,
    /// 2D lattice-sum radius.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CouplingArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: Option<u8>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Debug, Args)]
pub struct LifetimeArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: Option<u8>,
    /// P_c threshold between weak and strong coupling.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Also write P_e(t) at these times [ħ/U_dd].
    #[arg(long, value_delimiter = ',')]
    pub times: Vec<f64>,
    /// Zone grid for 2D integrals and P_e(t).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Debug, Subcommand)]
pub enum TrapCmd {
    /// Equilibrium positions and density profile.
    Solve(SolveArgs),
    /// Exciton and phonon spectra with asymptotic overlays.
    Spectra(SpectraArgs),
    /// Local Lindemann parameter F(ξ, τ) and the homogeneous F_h(τ).
    Lindemann(LindemannArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Trap stiffness mν²a0⁵/C3; 1 measures lengths in (C3/mν²)^{1/5}.
    #[arg(long, default_value_t = 1.0)]
    pub stiffness: f64,
    /// Also tabulate L and n(0) for these molecule numbers.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Debug, Args)]
pub struct LindemannArgs {
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    /// Temperatures τ of the profiles.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,5")]
    pub taus: Vec<f64>,
    /// Upper end and sample count of the F_h(τ) curve.
    #[arg(long, default_value_t = 10.0)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Use the Lindemann profile of a trapped crystal with this many
    /// molecules instead of the homogeneous estimate.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
}

/// Splits "a,b" into two floats.
fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Exit statuses.
const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_REGIME: u8 = 3;

fn exit_code_for(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().filter_map(|e| e.downcast_ref::<mdc_core::Error>()).any(mdc_core::Error::is_numerical);
    if numerical {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::Regime(msg)) => {
            eprintln!("regime violation: {msg}");
            ExitCode::from(EXIT_REGIME)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
