use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

mod commands;
mod manifest;

#[derive(Debug, Parser)]
#[command(
    name = "pvoc",
    version,
    about = "Overlapping community detection by permanence-based vertex replication"
)]
struct Cli {
    /// Worker threads for the parallel stages (default: available parallelism).
    #[arg(long, global = true, env = "PVOC_THREADS")]
    threads: Option<usize>,

    /// Where to write the run manifest (default depends on the command).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect overlapping communities: disjoint detection, then vertex replication.
    Detect(DetectArgs),
    /// Score a detected cover against ground truth.
    Eval(EvalArgs),
    /// Average scores over random ground-truth subnetworks.
    Bench(BenchArgs),
    /// Overlap-stripping study or external-degree profile.
    Study(StudyArgs),
    /// Dump per-vertex permanence.
    Perm(PermArgs),
}

/// Where the disjoint partition comes from: `louvain` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisjointSource {
    Louvain,
    File(PathBuf),
}

impl std::str::FromStr for DisjointSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "louvain" => Ok(DisjointSource::Louvain),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(DisjointSource::File(path.into())),
                _ => Err(format!("expected `louvain` or `file:<path>`, got `{s}`")),
            },
        }
    }
}

impl std::fmt::Display for DisjointSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DisjointSource::Louvain => f.write_str("louvain"),
            DisjointSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Edge list of the input graph.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "louvain")]
    pub disjoint: DisjointSource,
    #[arg(long, default_value_t = 0.05)]
    pub theta: f64,
    /// Louvain visiting-order seed (0 = ascending order).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output cover file.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional decision log, one trial move per line.
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub detected: PathBuf,
    /// Layout of the detected file: snap or lfr.
    #[arg(long, default_value = "snap")]
    pub detected_format: pvoc::io::FileFormat,
    #[arg(long)]
    pub truth: PathBuf,
    /// Layout of the ground-truth file: lfr or snap.
    #[arg(long)]
    pub truth_format: pvoc::io::FileFormat,
    /// Comma separated subset of onmi,omega,f1,nmi.
    #[arg(long, default_value = "onmi,omega,f1")]
    pub metrics: pvoc::MetricSet,
    /// Edge list defining the vertex universe; otherwise the union of the
    /// vertices named in both files.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Also write the report as a tab-separated table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "snap")]
    pub truth_format: pvoc::io::FileFormat,
    /// Number of sampled subnetworks.
    #[arg(long, default_value_t = 500)]
    pub samples: u64,
    /// Sample `i` is drawn with seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub theta: f64,
    /// Further covers (SNAP layout) of the whole graph to score on the same samples.
    #[arg(long, value_delimiter = ',')]
    pub compare: Vec<PathBuf>,
    /// Write the tables here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["strip", "profile"])))]
pub struct StudyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "lfr")]
    pub truth_format: pvoc::io::FileFormat,
    #[arg(long, default_value = "louvain")]
    pub disjoint: DisjointSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Remove overlapping vertices and compare the rest by NMI.
    #[arg(long)]
    pub strip: bool,
    /// External degree by number of ground-truth memberships.
    #[arg(long)]
    pub profile: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PermArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "louvain")]
    pub disjoint: DisjointSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let argv: Vec<String> = std::env::args().collect();
    let result = match &cli.command {
        Command::Detect(args) => commands::detect(args, cli.manifest.as_deref(), &argv),
        Command::Eval(args) => commands::eval(args, cli.manifest.as_deref(), &argv),
        Command::Bench(args) => commands::bench(args, cli.manifest.as_deref(), &argv),
        Command::Study(args) => commands::study(args, cli.manifest.as_deref(), &argv),
        Command::Perm(args) => commands::perm(args, cli.manifest.as_deref(), &argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
