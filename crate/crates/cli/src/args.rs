//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "meanrefine", version, about = "Mean-based refinements of the Cauchy-Bunyakovskii inequality")]
pub struct Cli {
    /// Worker threads for sampling sweeps (results do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Replace every chain's upper member by middle·(1 - 1e-3).
    #[arg(long, global = true, hide = true)]
    pub perturb_upper: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate means and check the mean axioms.
    #[command(subcommand)]
    Means(MeansCommand),
    /// Power-mean envelopes of the Radó family.
    #[command(subcommand, name = "mean-theory")]
    MeanTheory(MeanTheoryCommand),
    /// Refinement chains for sums and integrals.
    #[command(subcommand)]
    Refine(RefineCommand),
    /// Iterative two-sided bounds on ∫fg.
    Iterate(IterateArgs),
    /// Turán-type chain for the gamma function (CSV by default).
    #[command(name = "gamma-table")]
    GammaTable(GammaTableArgs),
    /// Two-sided bounds on the complete elliptic integral K.
    Elliptic(EllipticArgs),
    /// Upper bound on the minimum of θ₃(·, q).
    #[command(name = "theta-bound")]
    ThetaBound(ThetaBoundArgs),
    /// Support sizes of a vector and its discrete Fourier transform.
    Uncertainty(UncertaintyArgs),
    /// The complexified AM-GM inequality.
    #[command(subcommand)]
    Complexify(ComplexifyCommand),
    /// Mean refinement of the reverse inequality for the Lorentz form.
    Aczel(AczelArgs),
    /// Refinement chain for Jackson q-integrals on (0, 1].
    Jackson(JacksonArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeansCommand {
    /// Evaluate M(x, y).
    Eval(MeanEvalArgs),
    /// Sample the intermediacy, reflexivity, homogeneity and monotonicity axioms.
    Axioms(AxiomsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct MeanEvalArgs {
    /// Mean in text form, e.g. power:0.5, rado:-1, compl(power:2).
    #[arg(long)]
    pub mean: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct AxiomsArgs {
    #[arg(long)]
    pub mean: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum MeanTheoryCommand {
    /// Sharp power-mean orders bracketing R_α.
    Envelope(EnvelopeArgs),
    /// Sample the envelope inequalities.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EnvelopeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum RefineCommand {
    /// Chain for two nonnegative sequences read from CSV.
    Discrete(DiscreteArgs),
    /// Chain for two nonnegative functions on [a, b].
    Integral(IntegralArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DiscreteArgs {
    #[arg(long)]
    pub mean: String,
    /// Two-column CSV file (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegralArgs {
    #[arg(long)]
    pub mean: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Use Jackson q-integrals on (0, 1] instead of Riemann integrals.
    #[arg(long)]
    pub q: Option<f64>,
    /// Add the max-min gap identity record.
    #[arg(long)]
    pub identity: bool,
    /// Max-min chain for functions of either sign, with direction verdict.
    #[arg(long)]
    pub signed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct IterateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Drive the iteration with the Radó mean R_β and its complement instead.
    #[arg(long, allow_hyphen_values = true, value_name = "BETA")]
    pub rado: Option<f64>,
    /// Also write the (n, L, G, A) table to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaTableArgs {
    /// Comma-separated arguments a.
    #[arg(long, default_value = "3,5,7,10,20,30")]
    pub a: String,
    /// Emit the JSON envelope instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EllipticArgs {
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 2)]
    pub level: u8,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaBoundArgs {
    #[arg(long)]
    pub q: f64,
    /// Report only base-10 logarithms.
    #[arg(long)]
    pub log: bool,
    /// Add a fixed-point evaluation of log₁₀ m(q) (precision from MEANREFINE_PRECISION_BITS).
    #[arg(long, env = "MEANREFINE_EXTENDED")]
    pub extended: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct UncertaintyArgs {
    /// Comma-separated entries; complex entries as 1+2i.
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
}

#[derive(Debug, Subcommand)]
pub enum ComplexifyCommand {
    /// Sample the separating curve |s+1|⁴ = 16|s|².
    Curve(CurveArgs),
    /// Which side of the curve s = re + i·im lies on.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    /// Points per branch.
    #[arg(long, default_value_t = 720)]
    pub samples: usize,
    /// CSV destination; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub im: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct AczelArgs {
    #[arg(long)]
    pub mean: String,
    /// x0,x1,…,xn with x0² ≥ Σ xk².
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Args, Serialize)]
pub struct JacksonArgs {
    #[arg(long)]
    pub mean: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 1e-15)]
    pub tail_tol: f64,
}
