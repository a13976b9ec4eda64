use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "luce", version, about = "Luce permutations, top-k/bottom-k laws and chamber walks")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Run every sweep and Monte Carlo loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    /// RNG seed; defaults to a time-derived value that is logged to stderr.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Where to write the run manifest (default: $LUCE_OUTPUT_DIR or the
    /// working directory).
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Do not write a run manifest.
    #[arg(long, global = true, conflicts_with = "manifest")]
    pub no_manifest: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability of one permutation under the Luce model.
    Pmf(PmfArgs),
    /// Draw permutations from the Luce model.
    Sample(SampleArgs),
    /// Distances between the first k draws and i.i.d. draws.
    Topk(TopkArgs),
    /// Limiting law of the last card for an infinite weight sequence.
    BottomTable(BottomTableArgs),
    /// Classify an infinite weight sequence by the convergence criterion.
    ConvergeTest(ConvergeArgs),
    /// Chamber walks on the Boolean and braid arrangements.
    #[command(subcommand)]
    Arrangement(ArrangementCommand),
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// Weight spec: a list, a JSON object, a family such as `zipf:n=5,s=1`,
    /// or a file holding one of these.
    #[arg(long, value_name = "SPEC")]
    pub weights: String,

    /// Rescale the weights to sum to one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub weights: WeightArgs,

    /// Permutation in one-line notation, e.g. `3,2,1`.
    #[arg(long)]
    pub sigma: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Urn,
    Exponential,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub weights: WeightArgs,

    #[arg(long, default_value_t = 1)]
    pub n_samples: usize,

    #[arg(long, value_enum, default_value_t = SamplerArg::Urn)]
    pub sampler: SamplerArg,
}

#[derive(Debug, Args)]
pub struct TopkArgs {
    #[command(flatten)]
    pub weights: WeightArgs,

    #[arg(long)]
    pub k: usize,

    /// Emit the full distance report (includes the d∞ bound, which needs
    /// every weight at most 1/2).
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// One of linear, constant, log, log-loglog.
    #[arg(long)]
    pub family: String,

    /// β for the `log` family.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BottomTableArgs {
    #[command(flatten)]
    pub family: FamilyArgs,

    #[arg(long, default_value_t = 10)]
    pub max_label: usize,

    /// Absolute tolerance per probability.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Braid,
    Boolean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Move card i to the top with probability θᵢ (braid; needs --weights).
    Tsetlin,
    /// Inverse riffle shuffle (braid; needs --n).
    Riffle,
    /// Set a uniform coordinate to a uniform sign (Boolean; needs --d).
    Ehrenfest,
    /// Edge-driven two-coloring of a graph (Boolean; needs --graph).
    Coloring,
    /// Face weights read from a JSON file (needs --faces).
    Table,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,

    #[arg(long, value_enum)]
    pub model: ModelArg,

    #[arg(long, value_name = "SPEC")]
    pub weights: Option<String>,

    #[arg(long)]
    pub normalize: bool,

    /// Deck size for the riffle model.
    #[arg(long)]
    pub n: Option<usize>,

    /// Dimension for the Ehrenfest model.
    #[arg(long)]
    pub d: Option<usize>,

    /// Edge list, one `u v` pair per line.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    /// Face table: {"kind": "braid", "n": 3, "faces": [{"face": "1/2 3", "weight": 0.5}, ..]}.
    #[arg(long, value_name = "FILE")]
    pub faces: Option<PathBuf>,

    /// Starting chamber (default: identity deck or all `+`).
    #[arg(long)]
    pub start: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum ArrangementCommand {
    /// Run the walk and print every visited chamber.
    Sim {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        steps: usize,
    },
    /// Stationary distribution: exact dense solve, or estimated from urn draws.
    Stationary {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        exact: bool,
        /// Draws for the estimate when --exact is absent.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Exact stationary draws by projecting onto faces drawn without replacement.
    SampleBd {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        samples: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pmf(_) => "pmf",
            Command::Sample(_) => "sample",
            Command::Topk(_) => "topk",
            Command::BottomTable(_) => "bottom-table",
            Command::ConvergeTest(_) => "converge-test",
            Command::Arrangement(ArrangementCommand::Sim { .. }) => "arrangement-sim",
            Command::Arrangement(ArrangementCommand::Stationary { .. }) => "arrangement-stationary",
            Command::Arrangement(ArrangementCommand::SampleBd { .. }) => "arrangement-sample-bd",
        }
    }
}
