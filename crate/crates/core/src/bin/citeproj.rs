use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use citeproj::impact::{CohortMode, StrataConfig};
use citeproj::pipeline::{self, RunConfig};
use citeproj::synth::{generate_corpus, CorpusConfig, PrototypeKind};
use citeproj::{project, ConstraintVariant, Error, PaperId, Result};

#[derive(Parser)]
#[command(name = "citeproj", version, about = "Citation projection graph analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the inputs; write normalized copies and ingest.json.
    Ingest(RunArgs),
    /// Print the projection pair of one focal paper as TSV.
    Project {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        paper: String,
    },
    /// Compute the six metrics for every eligible focal paper.
    Metrics(RunArgs),
    /// Compare real projections against degree-preserving randomizations.
    Nullmodel(RunArgs),
    /// Normalized impact and strata.
    Impact(RunArgs),
    /// Run the whole pipeline and write every report artifact.
    #[command(visible_alias = "run")]
    Report(RunArgs),
    /// Compare papers published up to a cutoff year with later ones.
    Temporal(RunArgs),
    /// Generate a synthetic corpus with ground-truth class labels.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Citation edges, one `citing<TAB>cited` pair per line.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Paper metadata CSV with header `paper_id,year,area`.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with defaults for any of these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_refs: Option<usize>,
    /// `burt` or `as-printed`.
    #[arg(long)]
    constraint: Option<ConstraintVariant>,
    #[arg(long)]
    high_frac: Option<f64>,
    #[arg(long)]
    low_frac: Option<f64>,
    /// Count a paper in its own cohort mean (`inclusive`) or not (`exclusive`).
    #[arg(long, value_parser = parse_cohort)]
    cohort: Option<CohortMode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    swap_factor: Option<usize>,
    /// Randomized samples per focal paper; 0 skips the null model in `report`.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    cutoff_year: Option<i32>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    edges: Option<PathBuf>,
    meta: Option<PathBuf>,
    out: Option<PathBuf>,
    min_refs: Option<usize>,
    constraint: Option<String>,
    high_frac: Option<f64>,
    low_frac: Option<f64>,
    cohort: Option<String>,
    seed: Option<u64>,
    swap_factor: Option<usize>,
    samples: Option<usize>,
    bins: Option<usize>,
    cutoff_year: Option<i32>,
    jobs: Option<usize>,
}

fn parse_cohort(s: &str) -> std::result::Result<CohortMode, String> {
    match s {
        "inclusive" => Ok(CohortMode::Inclusive),
        "exclusive" => Ok(CohortMode::Exclusive),
        other => Err(format!("unknown cohort mode `{other}`")),
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let required = |flag: Option<PathBuf>, file: Option<PathBuf>, name: &str| {
            flag.or(file)
                .ok_or_else(|| Error::Config(format!("--{name} is required")))
        };
        let mut cfg = RunConfig::new(
            required(self.edges, file.edges, "edges")?,
            required(self.meta, file.meta, "meta")?,
            self.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        );
        let file_constraint = file
            .constraint
            .map(|s| s.parse::<ConstraintVariant>().map_err(Error::Config))
            .transpose()?;
        let file_cohort = file.cohort.map(|s| parse_cohort(&s).map_err(Error::Config)).transpose()?;
        cfg.min_refs = self.min_refs.or(file.min_refs).unwrap_or(cfg.min_refs);
        cfg.constraint = self.constraint.or(file_constraint).unwrap_or(cfg.constraint);
        cfg.strata = StrataConfig::new(
            self.high_frac.or(file.high_frac).unwrap_or(cfg.strata.high_fraction()),
            self.low_frac.or(file.low_frac).unwrap_or(cfg.strata.low_fraction()),
        )?;
        cfg.cohort = self.cohort.or(file_cohort).unwrap_or(cfg.cohort);
        cfg.seed = self.seed.or(file.seed).unwrap_or(cfg.seed);
        cfg.swap_factor = self.swap_factor.or(file.swap_factor).unwrap_or(cfg.swap_factor);
        cfg.samples = self.samples.or(file.samples).unwrap_or(cfg.samples);
        cfg.bins = self.bins.or(file.bins).unwrap_or(cfg.bins);
        cfg.cutoff_year = self.cutoff_year.or(file.cutoff_year);
        cfg.jobs = self.jobs.or(file.jobs);
        Ok(cfg)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Focal papers per class: idiosyncratic,within-community,brokerage.
    #[arg(long, default_value = "100,100,100", value_parser = parse_mix)]
    mix: [usize; 3],
    #[arg(long, default_value_t = 1990)]
    first_year: i32,
    #[arg(long, default_value_t = 2009)]
    last_year: i32,
    #[arg(long, default_value = "CS,NS,SS", value_delimiter = ',')]
    areas: Vec<String>,
    #[arg(long, default_value_t = citeproj::synth::DEFAULT_N_CITED)]
    n_cited: usize,
    /// Class given the most citations.
    #[arg(long)]
    forced_high: Option<PrototypeKind>,
    /// Class given no citations.
    #[arg(long)]
    forced_low: Option<PrototypeKind>,
}

fn parse_mix(s: &str) -> std::result::Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| "expected three comma-separated counts".to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => {
            let s = pipeline::run_ingest(&args.resolve()?)?;
            eprintln!(
                "{} papers, {} citations, {} eligible focal papers, {} edges on cycles",
                s.nodes, s.edges, s.eligible_focal_papers, s.cycles.cycle_edge_count
            );
        }
        Command::Project { run, paper } => {
            let cfg = run.resolve()?;
            let (g, _) = pipeline::load(&cfg)?;
            let id = PaperId::new(paper).map_err(Error::Config)?;
            let pair = project(&g, &id)?;
            let mut stdout = std::io::stdout().lock();
            pair.write_tsv(&mut stdout).map_err(|e| Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })?;
        }
        Command::Metrics(args) => {
            let rows = pipeline::run_metrics(&args.resolve()?)?;
            eprintln!("{} focal papers", rows.len());
        }
        Command::Nullmodel(args) => {
            let r = pipeline::run_nullmodel(&args.resolve()?)?;
            eprintln!("{} focal papers x {} samples", r.focal_count, r.samples_per_paper);
        }
        Command::Impact(args) => {
            let records = pipeline::run_impact(&args.resolve()?)?;
            eprintln!("{} papers with metadata", records.len());
        }
        Command::Report(args) => {
            let cfg = args.resolve()?;
            pipeline::run_pipeline(&cfg)?;
            eprintln!("artifacts written to {}", cfg.out.display());
        }
        Command::Temporal(args) => {
            let r = pipeline::run_temporal(&args.resolve()?)?;
            eprintln!("{} old, {} recent", r.n_old, r.n_recent);
        }
        Command::Synth(args) => {
            let cfg = CorpusConfig {
                class_mix: args.mix,
                years: (args.first_year, args.last_year),
                areas: args.areas,
                seed: args.seed,
                n_cited: args.n_cited,
                forced_high: args.forced_high,
                forced_low: args.forced_low,
            };
            let corpus = generate_corpus(&cfg)?;
            corpus.write_to_dir(&args.out)?;
            eprintln!(
                "{} papers, {} citations, {} labelled focal papers",
                corpus.graph.node_count(),
                corpus.graph.edge_count(),
                corpus.labels.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
