//! Command-line frontend for the behavioral-forensics pipeline.
//!
//! Single analyses print to stdout; `report` writes the full artifact
//! bundle to the output directory; `synth generate` writes JSONL dumps.
//! Exit codes: 0 success, 1 data error, 2 configuration/usage error.

mod config;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use agentsift::coordination;
use agentsift::corpus::{format_timestamp, Corpus, CorpusBuilder};
use agentsift::decay;
use agentsift::genealogy;
use agentsift::graph;
use agentsift::influence;
use agentsift::provenance;
use agentsift::report::{self, ReportConfig};
use agentsift::stats::probes;
use agentsift::synth;
use agentsift::tempo;

use crate::config::{ConfigFile, Settings};

/// Errors mapped to exit codes: config errors exit 2, data errors 1.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Data(String),
}

impl From<agentsift::Error> for AppError {
    fn from(e: agentsift::Error) -> Self {
        match e {
            agentsift::Error::Config(m) => AppError::Config(m),
            other => AppError::Data(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "agentsift",
    version,
    about = "Separate autonomous agent activity from human-directed activity in platform dumps"
)]
struct Cli {
    /// Configuration file (JSON, or TOML by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Posts JSONL (overrides config).
    #[arg(long, global = true)]
    posts: Option<PathBuf>,
    /// Comments JSONL (overrides config).
    #[arg(long, global = true)]
    comments: Option<PathBuf>,
    /// Agents JSONL (overrides config).
    #[arg(long, global = true)]
    agents: Option<PathBuf>,
    /// Annotations JSONL (overrides config).
    #[arg(long, global = true)]
    annotations: Option<PathBuf>,
    /// Embeddings JSONL (overrides config).
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    /// Breach timestamp (overrides config).
    #[arg(long, global = true)]
    breach_at: Option<String>,
    /// Restart timestamp (overrides config).
    #[arg(long, global = true)]
    restart_at: Option<String>,
    /// Output directory (overrides AGENTSIFT_OUT and config).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// RNG seed for sampled analyses and generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker pool size (0 = default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate inputs; print a corpus summary.
    Ingest,
    /// Temporal fingerprinting.
    Tempo {
        #[command(subcommand)]
        cmd: TempoCmd,
    },
    /// Content features and human-influence scoring.
    Influence {
        #[command(subcommand)]
        cmd: InfluenceCmd,
    },
    /// Owner profiles, batch naming, triangulation.
    Provenance {
        #[command(subcommand)]
        cmd: ProvenanceCmd,
    },
    /// Viral-phenomenon tracing.
    Genealogy {
        #[command(subcommand)]
        cmd: GenealogyCmd,
    },
    /// Bot-farm coordination battery.
    Coord {
        #[command(subcommand)]
        cmd: CoordCmd,
    },
    /// Comment-network metrics.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Echo-decay analyses.
    Decay {
        #[command(subcommand)]
        cmd: DecayCmd,
    },
    /// Synthetic-society generation and evaluation.
    Synth {
        #[command(subcommand)]
        cmd: SynthCmd,
    },
    /// Run every analysis and write the full artifact bundle.
    Report {
        /// Also run the CoV threshold sensitivity sweep at this delta.
        #[arg(long)]
        sweep_cov: Option<f64>,
        /// Include the edge-list CSV export.
        #[arg(long)]
        edges_csv: bool,
    },
    /// Statistics kernel maintenance.
    Stats {
        #[command(subcommand)]
        cmd: StatsCmd,
    },
}

#[derive(Subcommand)]
enum TempoCmd {
    /// Per-author CoV and class as CSV (author,cov,class,n_posts).
    Classify {
        /// Print the threshold sensitivity sweep instead of the CSV.
        #[arg(long)]
        sweep_cov: Option<f64>,
    },
    /// Sliding-window autonomous rates as CSV.
    Windows {
        #[arg(long)]
        window_days: Option<i64>,
        #[arg(long)]
        step_days: Option<i64>,
    },
    /// Cohort decomposition between two cutoffs.
    Cohort {
        #[arg(long)]
        initial_cutoff: String,
        #[arg(long)]
        extended_cutoff: String,
    },
    /// Post-restart re-engagement test.
    Restart {
        #[arg(long)]
        window_hours: Option<i64>,
    },
}

#[derive(Subcommand)]
enum InfluenceCmd {
    /// Per-post scores as CSV.
    Score,
    /// Platform-scaffolding comparison.
    Scaffold,
    /// Per-period quality aggregates.
    Periods {
        /// JSON file with [{label, start, end}] ranges.
        #[arg(long)]
        periods: Option<PathBuf>,
    },
    /// Pre-breach vs post-restart content shift.
    Shift,
}

#[derive(Subcommand)]
enum ProvenanceCmd {
    /// Owner classification per agent as CSV.
    Owners,
    /// Batch naming groups as CSV.
    Batches,
    /// Cross-tab triangulation report as JSON.
    Triangulate,
}

#[derive(Subcommand)]
enum GenealogyCmd {
    /// Trace phenomena to first appearance and verdicts.
    Trace {
        /// JSON file with [{name, keywords[]}] phenomena.
        #[arg(long)]
        phenomena: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CoordCmd {
    /// Full farm battery on explicit accounts.
    Farm {
        /// Comma-separated account list.
        #[arg(long, value_delimiter = ',')]
        accounts: Vec<String>,
    },
    /// Auto-select the top-N commenters and run the battery.
    Scan {
        #[arg(long, default_value_t = 4)]
        top: usize,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Density, reciprocity, and first-contact channels.
    Metrics {
        /// Also write src,dst,multiplicity CSV to the output directory.
        #[arg(long)]
        edges_csv: bool,
    },
}

#[derive(Subcommand)]
enum DecayCmd {
    /// Depth profiles and exponential fits per seed class.
    Fit {
        #[arg(long)]
        min_depth: Option<u32>,
        /// Also write the plot-ready (seed_class, depth, mean, n) CSV to
        /// the output directory.
        #[arg(long)]
        series_csv: bool,
    },
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Subcommand)]
enum SynthCmd {
    /// Generate a labeled corpus into the output directory.
    Generate(ScenarioArg),
    /// Evaluate the temporal classifier against ground truth.
    Evaluate {
        /// Regenerate from a scenario file and evaluate in one step.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Ground-truth JSONL for an already-ingested corpus.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StatsCmd {
    /// Check the distribution tails against the frozen oracle grid.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(AppError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn settings_from(cli: &Cli) -> Result<Settings, AppError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut settings = Settings::resolve(file)?;
    if cli.posts.is_some() {
        settings.posts = cli.posts.clone();
    }
    if cli.comments.is_some() {
        settings.comments = cli.comments.clone();
    }
    if cli.agents.is_some() {
        settings.agents = cli.agents.clone();
    }
    if cli.annotations.is_some() {
        settings.annotations = cli.annotations.clone();
    }
    if cli.embeddings.is_some() {
        settings.embeddings = cli.embeddings.clone();
    }
    if let Some(seed) = cli.seed {
        settings.rng_seed = seed;
        settings.homogeneity.seed = seed;
    }
    if cli.breach_at.is_some() || cli.restart_at.is_some() {
        let breach = match &cli.breach_at {
            Some(s) => parse_ts_arg(s, "breach_at")?,
            None => settings.boundaries.breach_at,
        };
        let restart = match &cli.restart_at {
            Some(s) => parse_ts_arg(s, "restart_at")?,
            None => settings.boundaries.restart_at,
        };
        settings.boundaries = agentsift::corpus::TimeBoundaries::new(breach, restart)
            .map_err(|e| AppError::Config(e.to_string()))?;
    }
    // precedence: flag > env > config
    if let Some(dir) = &cli.out_dir {
        settings.out_dir = Some(dir.clone());
    } else if let Ok(dir) = std::env::var("AGENTSIFT_OUT") {
        if !dir.is_empty() {
            settings.out_dir = Some(PathBuf::from(dir));
        }
    }
    Ok(settings)
}

fn require_file(path: &Path, what: &str) -> Result<(), AppError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(AppError::Config(format!(
            "{what} file {path:?} does not exist"
        )))
    }
}

fn open(path: &Path) -> Result<BufReader<File>, AppError> {
    Ok(BufReader::new(File::open(path).map_err(|e| {
        AppError::Config(format!("cannot open {path:?}: {e}"))
    })?))
}

/// Validate that every referenced input exists, then load the corpus.
fn load_corpus(settings: &Settings) -> Result<Corpus, AppError> {
    let posts = settings
        .posts
        .as_ref()
        .ok_or_else(|| AppError::Config("posts input required (--posts or config file)".into()))?;
    require_file(posts, "posts")?;
    for (path, what) in [
        (&settings.comments, "comments"),
        (&settings.agents, "agents"),
        (&settings.annotations, "annotations"),
        (&settings.embeddings, "embeddings"),
    ] {
        if let Some(p) = path {
            require_file(p, what)?;
        }
    }
    let mut builder = CorpusBuilder::new(settings.parse_options.clone());
    builder.read_posts(open(posts)?)?;
    if let Some(p) = &settings.comments {
        builder.read_comments(open(p)?)?;
    }
    if let Some(p) = &settings.agents {
        builder.read_agents(open(p)?)?;
    }
    if let Some(p) = &settings.annotations {
        builder.read_annotations(open(p)?)?;
    }
    if let Some(p) = &settings.embeddings {
        builder.read_embeddings(open(p)?)?;
    }
    Ok(builder.build(settings.boundaries)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), AppError> {
    let rendered = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Data(format!("serialization failed: {e}")))?;
    println!("{rendered}");
    Ok(())
}

fn stdout_csv(
    build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), csv::Error>,
) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w).map_err(|e| AppError::Data(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| AppError::Data(e.to_string()))?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn report_config(settings: &Settings) -> ReportConfig {
    ReportConfig {
        thresholds: settings.thresholds,
        window_days: settings.window_days,
        step_days: settings.step_days,
        restart_window_hours: settings.restart_window_hours,
        top_commenters_k: settings.top_commenters_k,
        farm_accounts: settings.farm_accounts.clone(),
        karma_threshold: settings.karma_threshold,
        homogeneity: settings.homogeneity.clone(),
        min_thread_depth: settings.min_thread_depth,
        ratio_threshold: settings.ratio_threshold,
        phenomena: settings.phenomena.clone(),
        periods: settings.periods.clone(),
        cohort_cutoffs: None,
        cov_sweep: None,
        include_edges_csv: false,
    }
}

fn parse_ts_arg(value: &str, what: &str) -> Result<chrono::DateTime<chrono::Utc>, AppError> {
    agentsift::corpus::parse_timestamp(value, false)
        .map_err(|e| AppError::Config(format!("bad {what}: {e}")))
}

fn out_dir(settings: &Settings) -> Result<PathBuf, AppError> {
    settings.out_dir.clone().ok_or_else(|| {
        AppError::Config("output directory required (--out-dir, AGENTSIFT_OUT, or config)".into())
    })
}

fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| AppError::Data(format!("cannot create {dir:?}: {e}")))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| AppError::Data(format!("cannot write {path:?}: {e}")))
}

fn run(cli: Cli) -> Result<(), AppError> {
    let settings = settings_from(&cli)?;
    match &cli.command {
        Command::Ingest => {
            let corpus = load_corpus(&settings)?;
            #[derive(Serialize)]
            struct IngestSummary<'a> {
                n_posts: usize,
                n_comments: usize,
                n_agents: usize,
                n_distinct_authors: usize,
                n_orphan_comments: usize,
                parse_report: &'a agentsift::corpus::ParseReport,
            }
            print_json(&IngestSummary {
                n_posts: corpus.posts().len(),
                n_comments: corpus.comments().len(),
                n_agents: corpus.agents().len(),
                n_distinct_authors: corpus.distinct_authors().len(),
                n_orphan_comments: corpus.comments().iter().filter(|c| c.orphaned).count(),
                parse_report: corpus.report(),
            })
        }
        Command::Tempo { cmd } => run_tempo(cmd, &settings),
        Command::Influence { cmd } => run_influence(cmd, &settings),
        Command::Provenance { cmd } => run_provenance(cmd, &settings),
        Command::Genealogy { cmd } => run_genealogy(cmd, &settings),
        Command::Coord { cmd } => run_coord(cmd, &settings),
        Command::Graph { cmd } => run_graph(cmd, &settings),
        Command::Decay { cmd } => run_decay(cmd, &settings),
        Command::Synth { cmd } => run_synth(cmd, &settings),
        Command::Report {
            sweep_cov,
            edges_csv,
        } => {
            let dir = out_dir(&settings)?;
            let corpus = load_corpus(&settings)?;
            let mut config = report_config(&settings);
            config.cov_sweep = *sweep_cov;
            config.include_edges_csv = *edges_csv;
            let bundle = report::build_bundle(&corpus, &settings.heuristics, &config)?;
            for (name, bytes) in &bundle {
                write_artifact(&dir, name, bytes)?;
            }
            println!("wrote {} artifacts to {}", bundle.len(), dir.display());
            Ok(())
        }
        Command::Stats { cmd } => match cmd {
            StatsCmd::Selftest => {
                let outcomes = probes::run_probe_grid();
                let worst = outcomes.iter().map(|o| o.rel_err).fold(0.0, f64::max);
                for o in &outcomes {
                    if o.rel_err > 1e-10 {
                        println!(
                            "FAIL {} ({}) expected {:e} got {:e} rel_err {:e}",
                            o.family, o.params, o.expected, o.got, o.rel_err
                        );
                    }
                }
                println!(
                    "probe grid: {} probes, max relative error {worst:e}",
                    outcomes.len()
                );
                if worst <= 1e-10 {
                    println!("selftest PASS");
                    Ok(())
                } else {
                    Err(AppError::Data("selftest FAIL".into()))
                }
            }
        },
    }
}

fn run_tempo(cmd: &TempoCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        TempoCmd::Classify { sweep_cov } => {
            if let Some(delta) = sweep_cov {
                #[derive(Serialize)]
                struct SweepRow {
                    delta: f64,
                    autonomous_rate: f64,
                    human_influenced_rate: f64,
                    n_classified: usize,
                }
                let rows: Vec<SweepRow> = [-delta, 0.0, *delta]
                    .iter()
                    .map(|d| {
                        let shifted = settings.thresholds.shifted(*d);
                        let s = tempo::summarize(&tempo::classify_corpus_with(&corpus, &shifted));
                        SweepRow {
                            delta: *d,
                            autonomous_rate: s.autonomous_rate,
                            human_influenced_rate: s.human_influenced_rate,
                            n_classified: s.n_classified,
                        }
                    })
                    .collect();
                return print_json(&rows);
            }
            let profiles = tempo::classify_corpus_with(&corpus, &settings.thresholds);
            stdout_csv(|w| {
                w.write_record(["author", "cov", "class", "n_posts"])?;
                for p in profiles.values() {
                    w.write_record([
                        p.author.as_str(),
                        &p.cov.map(|c| c.to_string()).unwrap_or_default(),
                        p.class.label(),
                        &p.n_posts.to_string(),
                    ])?;
                }
                Ok(())
            })
        }
        TempoCmd::Windows {
            window_days,
            step_days,
        } => {
            let rows = tempo::sliding_window_rates(
                &corpus,
                window_days.unwrap_or(settings.window_days),
                step_days.unwrap_or(settings.step_days),
                &settings.thresholds,
            )?;
            stdout_csv(|w| {
                w.write_record([
                    "window_start",
                    "window_end",
                    "autonomous_rate",
                    "n_classified",
                ])?;
                for r in rows {
                    w.write_record([
                        format_timestamp(r.window_start),
                        format_timestamp(r.window_end),
                        r.autonomous_rate.map(|x| x.to_string()).unwrap_or_default(),
                        r.n_classified.to_string(),
                    ])?;
                }
                Ok(())
            })
        }
        TempoCmd::Cohort {
            initial_cutoff,
            extended_cutoff,
        } => {
            let initial = parse_ts_arg(initial_cutoff, "initial cutoff")?;
            let extended = parse_ts_arg(extended_cutoff, "extended cutoff")?;
            print_json(&tempo::cohort_decomposition(
                &corpus,
                initial,
                extended,
                &settings.thresholds,
            )?)
        }
        TempoCmd::Restart { window_hours } => print_json(&tempo::restart_reengagement(
            &corpus,
            window_hours.unwrap_or(settings.restart_window_hours),
            &settings.thresholds,
        )?),
    }
}

fn run_influence(cmd: &InfluenceCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        InfluenceCmd::Score => {
            let scored = influence::score_corpus(&corpus, &settings.heuristics);
            stdout_csv(|w| {
                w.write_record([
                    "post_id",
                    "score",
                    "task_completion",
                    "promotional",
                    "forced_ai_framing",
                    "skill_pattern",
                ])?;
                for s in &scored {
                    w.write_record([
                        s.post_id.as_str(),
                        &s.score.to_string(),
                        &format!("{:?}", s.task_completion).to_uppercase(),
                        &format!("{:?}", s.promotional).to_uppercase(),
                        &format!("{:?}", s.forced_ai_framing).to_uppercase(),
                        s.skill_pattern.map(|p| p.label()).unwrap_or(""),
                    ])?;
                }
                Ok(())
            })
        }
        InfluenceCmd::Scaffold => {
            print_json(&influence::scaffold_report(&corpus, &settings.heuristics)?)
        }
        InfluenceCmd::Periods { periods } => {
            let specs = match periods {
                Some(path) => {
                    let raw = std::fs::read_to_string(path).map_err(|e| {
                        AppError::Config(format!("cannot read periods file {path:?}: {e}"))
                    })?;
                    serde_json::from_str(&raw)
                        .map_err(|e| AppError::Config(format!("bad periods file: {e}")))?
                }
                None => settings
                    .periods
                    .clone()
                    .unwrap_or_else(|| influence::default_periods(&corpus)),
            };
            print_json(&influence::period_quality(
                &corpus,
                &settings.heuristics,
                &specs,
            ))
        }
        InfluenceCmd::Shift => print_json(&influence::breach_shift_report(
            &corpus,
            &settings.heuristics,
        )?),
    }
}

fn run_provenance(cmd: &ProvenanceCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        ProvenanceCmd::Owners => stdout_csv(|w| {
            w.write_record(["agent", "owner_handle", "owner_followers", "owner_class"])?;
            for a in corpus.agents() {
                w.write_record([
                    a.name.as_str(),
                    a.owner_handle.as_deref().unwrap_or(""),
                    &a.owner_followers.map(|f| f.to_string()).unwrap_or_default(),
                    provenance::classify_agent_owner(a).label(),
                ])?;
            }
            Ok(())
        }),
        ProvenanceCmd::Batches => {
            let groups = provenance::batch_groups(
                corpus.agents().iter().map(|a| a.name.as_str()),
                &provenance::NamingConfig::default(),
            );
            stdout_csv(|w| {
                w.write_record(["base_name", "size", "members"])?;
                for g in &groups {
                    w.write_record([
                        g.base_name.as_str(),
                        &g.members.len().to_string(),
                        &g.members.join(";"),
                    ])?;
                }
                Ok(())
            })
        }
        ProvenanceCmd::Triangulate => {
            let profiles = tempo::classify_corpus_with(&corpus, &settings.thresholds);
            let owner_classes = corpus
                .agents()
                .iter()
                .map(|a| (a.name.clone(), provenance::classify_agent_owner(a)))
                .collect();
            let groups = provenance::batch_groups(
                corpus.agents().iter().map(|a| a.name.as_str()),
                &provenance::NamingConfig::default(),
            );
            let batch_members = groups
                .iter()
                .flat_map(|g| g.members.iter().cloned())
                .collect();
            let content_scores = influence::author_mean_scores(&corpus, &settings.heuristics);
            print_json(&provenance::triangulate(
                &profiles,
                &owner_classes,
                &batch_members,
                &content_scores,
            )?)
        }
    }
}

fn run_genealogy(cmd: &GenealogyCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        GenealogyCmd::Trace { phenomena } => {
            let specs = match phenomena {
                Some(path) => {
                    let raw = std::fs::read_to_string(path).map_err(|e| {
                        AppError::Config(format!("cannot read phenomena file {path:?}: {e}"))
                    })?;
                    serde_json::from_str(&raw)
                        .map_err(|e| AppError::Config(format!("bad phenomena file: {e}")))?
                }
                None => settings.phenomena.clone(),
            };
            let profiles = tempo::classify_corpus_with(&corpus, &settings.thresholds);
            print_json(&genealogy::trace_with_threshold(
                &corpus,
                &specs,
                &profiles,
                &settings.heuristics,
                settings.ratio_threshold,
            )?)
        }
    }
}

fn run_coord(cmd: &CoordCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    let accounts = match cmd {
        CoordCmd::Farm { accounts } => {
            if accounts.len() < 2 {
                return Err(AppError::Config(
                    "coord farm needs at least 2 accounts".into(),
                ));
            }
            accounts.clone()
        }
        CoordCmd::Scan { top } => coordination::top_commenters(&corpus, *top)?
            .into_iter()
            .map(|r| r.author)
            .collect(),
    };
    print_json(&coordination::farm_report(
        &corpus,
        &accounts,
        settings.karma_threshold,
        &settings.homogeneity,
    )?)
}

fn run_graph(cmd: &GraphCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        GraphCmd::Metrics { edges_csv } => {
            let metrics = graph::graph_metrics(&corpus)?;
            if *edges_csv {
                let dir = out_dir(settings)?;
                let g = graph::build_graph(&corpus);
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["src", "dst", "multiplicity"])
                    .map_err(|e| AppError::Data(e.to_string()))?;
                for (src, dst, m) in g.edges() {
                    w.write_record([src, dst, &m.to_string()])
                        .map_err(|e| AppError::Data(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| AppError::Data(e.to_string()))?;
                write_artifact(&dir, "graph_edges.csv", &bytes)?;
            }
            print_json(&metrics)
        }
    }
}

fn run_decay(cmd: &DecayCmd, settings: &Settings) -> Result<(), AppError> {
    let corpus = load_corpus(settings)?;
    match cmd {
        DecayCmd::Fit {
            min_depth,
            series_csv,
        } => {
            let profiles = tempo::classify_corpus_with(&corpus, &settings.thresholds);
            let report = decay::decay_report(
                &corpus,
                &profiles,
                min_depth.unwrap_or(settings.min_thread_depth),
            )?;
            if *series_csv {
                let dir = out_dir(settings)?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["seed_class", "depth", "mean_word_count", "n_items"])
                    .map_err(|e| AppError::Data(e.to_string()))?;
                for (label, profile) in [
                    ("HUMAN_SEEDED", &report.profiles.human),
                    ("AUTONOMOUS", &report.profiles.autonomous),
                ] {
                    for p in &profile.points {
                        w.write_record([
                            label,
                            &p.depth.to_string(),
                            &p.mean_word_count.to_string(),
                            &p.n_items.to_string(),
                        ])
                        .map_err(|e| AppError::Data(e.to_string()))?;
                    }
                }
                let bytes = w.into_inner().map_err(|e| AppError::Data(e.to_string()))?;
                write_artifact(&dir, "decay_series.csv", &bytes)?;
            }
            #[derive(Serialize)]
            struct DecayOut<'a> {
                n_threads: usize,
                pooled_depth: u32,
                human: &'a decay::DepthProfile,
                autonomous: &'a decay::DepthProfile,
                human_fit: &'a Option<decay::FitOutcome>,
                autonomous_fit: &'a Option<decay::FitOutcome>,
                engagement: Option<decay::EngagementComparison>,
                promo_gradient: Option<decay::PromoGradient>,
            }
            print_json(&DecayOut {
                n_threads: report.profiles.n_threads,
                pooled_depth: report.profiles.pooled_depth,
                human: &report.profiles.human,
                autonomous: &report.profiles.autonomous,
                human_fit: &report.human_fit,
                autonomous_fit: &report.autonomous_fit,
                engagement: decay::engagement_comparison(&corpus, &profiles).ok(),
                promo_gradient: decay::promo_gradient(&corpus, &settings.heuristics).ok(),
            })
        }
    }
}

fn load_scenario(path: &Path) -> Result<synth::ScenarioConfig, AppError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read scenario {path:?}: {e}")))?;
    serde_json::from_str(&raw).map_err(|e| AppError::Config(format!("bad scenario file: {e}")))
}

fn run_synth(cmd: &SynthCmd, settings: &Settings) -> Result<(), AppError> {
    match cmd {
        SynthCmd::Generate(args) => {
            let dir = out_dir(settings)?;
            let scenario = load_scenario(&args.scenario)?;
            let (corpus, truth) = synth::generate_society(&scenario)?;
            let mut posts = String::new();
            for p in corpus.posts() {
                posts.push_str(&agentsift::corpus::post_to_jsonl(p));
                posts.push('\n');
            }
            let mut comments = String::new();
            for c in corpus.comments() {
                comments.push_str(&agentsift::corpus::comment_to_jsonl(c));
                comments.push('\n');
            }
            let mut agents = String::new();
            for a in corpus.agents() {
                agents.push_str(&agentsift::corpus::agent_to_jsonl(a));
                agents.push('\n');
            }
            write_artifact(&dir, "posts.jsonl", posts.as_bytes())?;
            write_artifact(&dir, "comments.jsonl", comments.as_bytes())?;
            write_artifact(&dir, "agents.jsonl", agents.as_bytes())?;
            write_artifact(
                &dir,
                "ground_truth.jsonl",
                synth::ground_truth_to_jsonl(&truth).as_bytes(),
            )?;
            // ready-to-use config so the dump reloads with the same
            // boundaries it was generated with
            let reload = serde_json::json!({
                "posts": "posts.jsonl",
                "comments": "comments.jsonl",
                "agents": "agents.jsonl",
                "breach_at": format_timestamp(corpus.boundaries().breach_at),
                "restart_at": format_timestamp(corpus.boundaries().restart_at),
            });
            write_artifact(&dir, "config.json", format!("{:#}\n", reload).as_bytes())?;
            println!(
                "generated {} posts, {} comments, {} agents into {}",
                corpus.posts().len(),
                corpus.comments().len(),
                corpus.agents().len(),
                dir.display()
            );
            Ok(())
        }
        SynthCmd::Evaluate {
            scenario,
            ground_truth,
        } => {
            let (corpus, truth) = match (scenario, ground_truth) {
                (Some(path), _) => {
                    let scenario = load_scenario(path)?;
                    synth::generate_society(&scenario)?
                }
                (None, Some(gt_path)) => {
                    require_file(gt_path, "ground truth")?;
                    let truth = synth::parse_ground_truth(open(gt_path)?)?;
                    (load_corpus(settings)?, truth)
                }
                (None, None) => {
                    return Err(AppError::Config(
                        "synth evaluate needs --scenario or --ground-truth".into(),
                    ))
                }
            };
            let profiles = tempo::classify_corpus_with(&corpus, &settings.thresholds);
            print_json(&synth::evaluate_pipeline(&truth, &profiles)?)
        }
    }
}
