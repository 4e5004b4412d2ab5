use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grushin::analysis::GramianKind;
use grushin::wave::{DampingSign, ModalCoordinates};
use grushin::C64;

#[derive(Debug, Parser)]
#[command(name = "grushin", version, about = "Analyse linear control systems through bordered (Grushin) problems")]
pub struct Cli {
    /// Classification threshold for margins, Gramian eigenvalues and frame bounds.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for randomized test vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invert the bordered matrix at lambda and recover the resolvent.
    Schur(PointArgs),
    /// Transfer function H(lambda).
    Transfer(PointArgs),
    /// Hautus margin over a frequency grid.
    Hautus(HautusArgs),
    /// Controllability or observability Gramian.
    Gramian(GramianArgs),
    /// Certified lower bound for the bordered operator of a collocated system.
    Certify(CertifyArgs),
    /// Trace formula and zero/pole counts inside a contour.
    Trace(TraceArgs),
    /// Spectral projection onto the eigenvalues inside a contour.
    Project(ProjectArgs),
    /// Nested bordered problem built from coupling matrices.
    Iterate(IterateArgs),
    /// Moment weights and frame bounds of the modal exponential family.
    Riesz(RieszArgs),
    /// Margin and decay of the truncated damped wave equation.
    Wave(WaveArgs),
    /// Time-stepping with exact one-step propagators.
    Simulate(SimulateArgs),
    /// Re-emit a system file in canonical form.
    Normalize(InputArgs),
    /// Run a list of invocations read from a JSON file.
    Batch(BatchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Schur(_) => "schur",
            Command::Transfer(_) => "transfer",
            Command::Hautus(_) => "hautus",
            Command::Gramian(_) => "gramian",
            Command::Certify(_) => "certify",
            Command::Trace(_) => "trace",
            Command::Project(_) => "project",
            Command::Iterate(_) => "iterate",
            Command::Riesz(_) => "riesz",
            Command::Wave(_) => "wave",
            Command::Simulate(_) => "simulate",
            Command::Normalize(_) => "normalize",
            Command::Batch(_) => "batch",
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// System description (JSON).
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Spectral parameter as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: C64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: f64,
    #[arg(long)]
    pub omega_steps: usize,
}

#[derive(Debug, Args)]
pub struct HautusArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Positive modal weights w1,w2,... for the weighted test.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Write omega,margin rows to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Observability,
    Controllability,
}

impl From<KindArg> for GramianKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Observability => GramianKind::Observability,
            KindArg::Controllability => GramianKind::Controllability,
        }
    }
}

#[derive(Debug, Args)]
pub struct GramianArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "observability")]
    pub kind: KindArg,
    /// Horizon; defaults to 2 pi over the smallest eigenvalue gap.
    #[arg(long)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Random test vectors used to probe the bound.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    /// Center as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub contour_center: C64,
    #[arg(long)]
    pub contour_radius: f64,
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub contour: ContourArgs,
    /// Polynomial weight as a JSON list of [re, im] coefficients, lowest degree first.
    #[arg(long, default_value = "[[1.0, 0.0]]")]
    pub g: String,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub contour: ContourArgs,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// JSON file with `n_minus` and `n_plus`; identity couplings when omitted.
    #[arg(long)]
    pub couplings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoordinatesArg {
    Energy,
    Displacement,
}

impl From<CoordinatesArg> for ModalCoordinates {
    fn from(c: CoordinatesArg) -> Self {
        match c {
            CoordinatesArg::Energy => ModalCoordinates::Energy,
            CoordinatesArg::Displacement => ModalCoordinates::Displacement,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DampingArg {
    Dissipative,
    AntiDissipative,
}

impl From<DampingArg> for DampingSign {
    fn from(d: DampingArg) -> Self {
        match d {
            DampingArg::Dissipative => DampingSign::Dissipative,
            DampingArg::AntiDissipative => DampingSign::AntiDissipative,
        }
    }
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[arg(long)]
    pub modes: usize,
    /// Defaults to 0.5 .. N + 0.5 with 100 N steps.
    #[arg(long, allow_hyphen_values = true, requires_all = ["omega_max", "omega_steps"])]
    pub omega_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["omega_min", "omega_steps"])]
    pub omega_max: Option<f64>,
    #[arg(long, requires_all = ["omega_min", "omega_max"])]
    pub omega_steps: Option<usize>,
    #[arg(long, value_enum, default_value = "energy")]
    pub coordinates: CoordinatesArg,
    #[arg(long, value_enum, default_value = "dissipative")]
    pub damping: DampingArg,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long)]
    pub dt: f64,
    /// Initial state as a JSON list of [re, im]; random unit vector when omitted.
    #[arg(long)]
    pub z0: Option<String>,
    /// Constant input as a JSON list of [re, im]; zero when omitted.
    #[arg(long)]
    pub u: Option<String>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// JSON array of argument lists, e.g. [["transfer", "--input", "s2.json", "--lambda", "1,0"]].
    #[arg(long)]
    pub file: PathBuf,
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| {
        p.parse::<f64>()
            .map_err(|e| format!("`{p}`: {e}"))
            .and_then(|x| if x.is_finite() { Ok(x) } else { Err(format!("`{p}` is not finite")) })
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(parse(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected RE,IM, got `{s}`")),
    }
}
