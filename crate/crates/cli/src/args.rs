use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dtn", version, args_override_self = true, about = "Singular Dirichlet-to-Neumann trace forms on the disc, square and ball")]
pub struct Cli {
    /// key=value file of defaults; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate Dirichlet eigenvalues with multiplicities.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Sweep one eigenvalue branch of the trace form in z.
    #[command(args_override_self = true)]
    Branch(BranchArgs),
    /// Residues at the catalog poles.
    #[command(args_override_self = true)]
    Laurent(LaurentArgs),
    /// Certify positivity preservation on both sides of each eigenvalue.
    #[command(args_override_self = true)]
    Positivity(PositivityArgs),
    /// Compare the Robin and Neumann trace forms.
    #[command(args_override_self = true)]
    Robin(RobinArgs),
    /// Run the finite-dimensional model suite.
    #[command(args_override_self = true)]
    Model(ModelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the extension of --out, default csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Output {
    pub fn format(&self) -> Format {
        match (self.format, &self.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct Domain {
    /// disc, square or ball.
    #[arg(long)]
    pub domain: String,
    /// Boundary quadrature resolution (domain default when absent).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Relative series truncation tolerance, in (0, 1e-4].
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct Range {
    #[arg(long, allow_negative_numbers = true)]
    pub z_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z_max: f64,
    /// Number of sample points, at least 2.
    #[arg(long, default_value_t = 200)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub domain: Domain,
    #[arg(long)]
    pub e_max: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BranchArgs {
    #[command(flatten)]
    pub domain: Domain,
    /// Angular family (disc k, ball n) or, on the square, the index of the
    /// Galerkin eigenvalue counted from 0.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub range: Range,
    /// Galerkin basis size on the square.
    #[arg(long, default_value_t = 12)]
    pub basis: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LaurentArgs {
    #[command(flatten)]
    pub domain: Domain,
    #[arg(long)]
    pub e_max: f64,
    /// Restrict to one angular family.
    #[arg(long)]
    pub k: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PositivityArgs {
    #[command(flatten)]
    pub domain: Domain,
    #[arg(long)]
    pub e_max: f64,
    /// Random probes per side.
    #[arg(long, default_value_t = 50)]
    pub draws: usize,
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RobinArgs {
    #[command(flatten)]
    pub domain: Domain,
    /// Constant Robin coefficients, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub range: Range,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Dimension of the state space.
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Dimension of the trace space (random in 1..n when absent).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    /// Model JSON file {n, m, E, J}; runs the suite on it instead of random models.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}
