use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod io;
mod ring;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "ringcodes",
    version,
    about = "Codes over the tower ring R^{s,m} and their audits"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every sampled statistic; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add `generated_at_unix` to JSON printed on stdout.
    #[arg(long, global = true)]
    pub timestamps: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every audit at (m, s) and print the report.
    Verify(VerifyArgs),
    /// Build a code from a component spec.
    Build(BuildArgs),
    /// Build the blockwise dual of a code and check orthogonality.
    Dual(CodeInput),
    /// Gray generator matrix of a code.
    Gray(CodeInput),
    /// Simplex and MacDonald generators and weight statistics.
    Family(FamilyArgs),
    /// Check invariance under every d-th cyclic shift.
    QcCheck(QcArgs),
    /// Evaluate the simplex and MacDonald length formulas.
    AuditLengths(LengthArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub s: u32,
    /// Length of the default all-blocks code (ignored with --spec).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Component spec for the code-level audits.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Random non-idempotents per length for the τ converse.
    #[arg(long, default_value_t = 10)]
    pub lemma_random: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub u: usize,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Where to write the code file; the summary goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also compute minimum Hamming and Gray weights.
    #[arg(long)]
    pub weights: bool,
    /// Enumerate when the code has at most this many words, else sample.
    #[arg(long, default_value_t = ringcodes::code::DEFAULT_WEIGHT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 1 << 16)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct CodeInput {
    /// Code file written by `build`.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub code: Option<PathBuf>,
    /// Component spec, as an alternative to --code.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random pairs for the duality check when it is not exhaustive.
    #[arg(long, default_value_t = 256)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    pub kind: FamilyKind,
    /// z4, z16, …; a<k> for A_k; r<m> for R^{s,m}. Append @z16 etc. to pick s.
    #[arg(long)]
    pub ring: String,
    #[arg(long = "type", value_enum)]
    pub kind_type: FamilyTypeArg,
    #[arg(long)]
    pub k: usize,
    /// MacDonald puncturing dimension.
    #[arg(long)]
    pub u: Option<usize>,
    /// Weight statistics of the non-zero codewords.
    #[arg(long)]
    pub stats: bool,
    /// Emit the first N columns.
    #[arg(long, default_value_t = 0)]
    pub columns: u64,
    /// Exhaustive statistics when columns × messages stays below this.
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Simplex,
    Macdonald,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTypeArg {
    Alpha,
    Beta,
}

#[derive(Args, Debug)]
pub struct QcArgs {
    /// Generator file (see schemas/qc_input.schema.json).
    #[arg(long, conflicts_with = "code", required_unless_present = "code")]
    pub input: Option<PathBuf>,
    /// Code file written by `build`.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub d: usize,
    /// Span the x^(jd) multiples of the generators before checking.
    #[arg(long)]
    pub orbit: bool,
    /// Accept arbitrary τ inputs (checked for idempotency).
    #[arg(long)]
    pub allow_custom_tau: bool,
    /// Also check word by word when the code has at most this many words.
    #[arg(long, default_value_t = 1 << 12)]
    pub enumerate_limit: u64,
}

#[derive(Args, Debug)]
pub struct LengthArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub u: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
    pool.install(|| match cli.command {
        Command::Verify(a) => commands::verify(&g, &a),
        Command::Build(a) => commands::build(&g, &a),
        Command::Dual(a) => commands::dual(&g, &a),
        Command::Gray(a) => commands::gray(&g, &a),
        Command::Family(a) => commands::family(&g, &a),
        Command::QcCheck(a) => commands::qc_check(&g, &a),
        Command::AuditLengths(a) => commands::audit_lengths(&g, &a),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
