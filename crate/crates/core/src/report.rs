//! Deterministic report bundles: every module's output rendered to JSON
//! and plot-ready CSV under stable names. Reruns over the same corpus
//! and config produce byte-identical bytes.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::coordination::{self, HomogeneityParams};
use crate::corpus::{format_timestamp, Corpus, Period};
use crate::decay;
use crate::error::Result;
use crate::genealogy::{self, Phenomenon};
use crate::graph;
use crate::influence::{self, HeuristicConfig, PeriodSpec};
use crate::provenance;
use crate::synth::{self, GroundTruth};
use crate::tempo::{self, CovThresholds};

/// Everything the `report` pipeline needs beyond the corpus itself.
#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub thresholds: CovThresholds,
    pub window_days: i64,
    pub step_days: i64,
    pub restart_window_hours: i64,
    pub top_commenters_k: usize,
    /// Suspect accounts for the coordination battery; top-4 commenters
    /// when absent.
    pub farm_accounts: Option<Vec<String>>,
    pub karma_threshold: u64,
    pub homogeneity: HomogeneityParams,
    pub min_thread_depth: u32,
    pub ratio_threshold: f64,
    pub phenomena: Vec<Phenomenon>,
    pub periods: Option<Vec<PeriodSpec>>,
    pub cohort_cutoffs: Option<(DateTime<Utc>, DateTime<Utc>)>,
    /// Run the CoV threshold sensitivity sweep at this delta.
    pub cov_sweep: Option<f64>,
    pub include_edges_csv: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            thresholds: CovThresholds::default(),
            window_days: 3,
            step_days: 1,
            restart_window_hours: 6,
            top_commenters_k: 10,
            farm_accounts: None,
            karma_threshold: 10,
            homogeneity: HomogeneityParams::default(),
            min_thread_depth: 2,
            ratio_threshold: genealogy::RATIO_THRESHOLD,
            phenomena: genealogy::default_phenomena().expect("builtin phenomena parse"),
            periods: None,
            cohort_cutoffs: None,
            cov_sweep: None,
            include_edges_csv: false,
        }
    }
}

/// A finished bundle: file name to bytes, plus a manifest of what ran.
pub type Bundle = BTreeMap<String, Vec<u8>>;

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct CorpusSummary {
    n_posts: usize,
    n_comments: usize,
    n_agents: usize,
    n_distinct_authors: usize,
    n_orphan_comments: usize,
    n_anonymous_comments: usize,
    breach_at: String,
    restart_at: String,
    posts_pre_breach: usize,
    posts_gap: usize,
    posts_post_restart: usize,
    parse_errors: usize,
}

#[derive(Serialize)]
struct SweepRow {
    delta: f64,
    autonomous_rate: f64,
    human_influenced_rate: f64,
    n_classified: usize,
}

/// Run every analysis that the corpus supports and render the bundle.
/// Analyses whose preconditions fail are recorded in `manifest.json`
/// and skipped.
pub fn build_bundle(
    corpus: &Corpus,
    heuristics: &HeuristicConfig,
    config: &ReportConfig,
) -> Result<Bundle> {
    let mut bundle: Bundle = BTreeMap::new();
    let mut manifest: BTreeMap<String, String> = BTreeMap::new();
    let put = |bundle: &mut Bundle,
               manifest: &mut BTreeMap<String, String>,
               name: &str,
               result: Result<Vec<u8>>| {
        match result {
            Ok(bytes) => {
                bundle.insert(name.to_string(), bytes);
                manifest.insert(name.to_string(), "ok".to_string());
            }
            Err(e) => {
                manifest.insert(name.to_string(), format!("skipped: {e}"));
            }
        }
    };

    // corpus summary
    let summary = CorpusSummary {
        n_posts: corpus.posts().len(),
        n_comments: corpus.comments().len(),
        n_agents: corpus.agents().len(),
        n_distinct_authors: corpus.distinct_authors().len(),
        n_orphan_comments: corpus.comments().iter().filter(|c| c.orphaned).count(),
        n_anonymous_comments: corpus
            .comments()
            .iter()
            .filter(|c| c.author.is_empty())
            .count(),
        breach_at: format_timestamp(corpus.boundaries().breach_at),
        restart_at: format_timestamp(corpus.boundaries().restart_at),
        posts_pre_breach: corpus
            .posts()
            .iter()
            .filter(|p| corpus.period_of(p.created_at) == Period::PreBreach)
            .count(),
        posts_gap: corpus
            .posts()
            .iter()
            .filter(|p| corpus.period_of(p.created_at) == Period::Gap)
            .count(),
        posts_post_restart: corpus
            .posts()
            .iter()
            .filter(|p| corpus.period_of(p.created_at) == Period::PostRestart)
            .count(),
        parse_errors: corpus.report().total_errors(),
    };
    put(
        &mut bundle,
        &mut manifest,
        "corpus_summary.json",
        json_bytes(&summary),
    );

    // tempo
    let profiles = tempo::classify_corpus_with(corpus, &config.thresholds);
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows: Result<Vec<u8>> = (|| {
            w.write_record(["author", "cov", "class", "n_posts"])
                .map_err(csv_err)?;
            for p in profiles.values() {
                w.write_record([
                    p.author.as_str(),
                    &fmt_opt(p.cov),
                    p.class.label(),
                    &p.n_posts.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        })();
        put(&mut bundle, &mut manifest, "tempo_classify.csv", rows);
    }
    put(
        &mut bundle,
        &mut manifest,
        "tempo_summary.json",
        json_bytes(&tempo::summarize(&profiles)),
    );
    if let Some(delta) = config.cov_sweep {
        let sweep: Vec<SweepRow> = [-delta, 0.0, delta]
            .iter()
            .map(|d| {
                let shifted = config.thresholds.shifted(*d);
                let s = tempo::summarize(&tempo::classify_corpus_with(corpus, &shifted));
                SweepRow {
                    delta: *d,
                    autonomous_rate: s.autonomous_rate,
                    human_influenced_rate: s.human_influenced_rate,
                    n_classified: s.n_classified,
                }
            })
            .collect();
        put(
            &mut bundle,
            &mut manifest,
            "tempo_sweep.json",
            json_bytes(&sweep),
        );
    }
    {
        let windows = tempo::sliding_window_rates(
            corpus,
            config.window_days,
            config.step_days,
            &config.thresholds,
        );
        let rows = windows.and_then(|ws| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "window_start",
                "window_end",
                "autonomous_rate",
                "n_classified",
            ])
            .map_err(csv_err)?;
            for row in ws {
                w.write_record([
                    format_timestamp(row.window_start),
                    format_timestamp(row.window_end),
                    fmt_opt(row.autonomous_rate),
                    row.n_classified.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        });
        put(&mut bundle, &mut manifest, "tempo_windows.csv", rows);
    }
    put(
        &mut bundle,
        &mut manifest,
        "tempo_restart.json",
        tempo::restart_reengagement(corpus, config.restart_window_hours, &config.thresholds)
            .and_then(|r| json_bytes(&r)),
    );
    if let Some((initial, extended)) = config.cohort_cutoffs {
        put(
            &mut bundle,
            &mut manifest,
            "tempo_cohort.json",
            tempo::cohort_decomposition(corpus, initial, extended, &config.thresholds)
                .and_then(|r| json_bytes(&r)),
        );
    }

    // influence
    {
        let scored = influence::score_corpus(corpus, heuristics);
        let rows: Result<Vec<u8>> = (|| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "post_id",
                "score",
                "task_completion",
                "promotional",
                "forced_ai_framing",
                "skill_pattern",
            ])
            .map_err(csv_err)?;
            for s in &scored {
                w.write_record([
                    s.post_id.as_str(),
                    &s.score.to_string(),
                    &format!("{:?}", s.task_completion).to_uppercase(),
                    &format!("{:?}", s.promotional).to_uppercase(),
                    &format!("{:?}", s.forced_ai_framing).to_uppercase(),
                    s.skill_pattern.map(|p| p.label()).unwrap_or(""),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        })();
        put(&mut bundle, &mut manifest, "influence_scores.csv", rows);
    }
    put(
        &mut bundle,
        &mut manifest,
        "influence_scaffold.json",
        influence::scaffold_report(corpus, heuristics).and_then(|r| json_bytes(&r)),
    );
    put(
        &mut bundle,
        &mut manifest,
        "influence_breach_shift.json",
        influence::breach_shift_report(corpus, heuristics).and_then(|r| json_bytes(&r)),
    );
    {
        let periods = config
            .periods
            .clone()
            .unwrap_or_else(|| influence::default_periods(corpus));
        put(
            &mut bundle,
            &mut manifest,
            "influence_periods.json",
            json_bytes(&influence::period_quality(corpus, heuristics, &periods)),
        );
    }

    // provenance
    let owner_classes: BTreeMap<String, provenance::OwnerClass> = corpus
        .agents()
        .iter()
        .map(|a| (a.name.clone(), provenance::classify_agent_owner(a)))
        .collect();
    {
        let rows: Result<Vec<u8>> = (|| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["agent", "owner_handle", "owner_followers", "owner_class"])
                .map_err(csv_err)?;
            for a in corpus.agents() {
                w.write_record([
                    a.name.as_str(),
                    a.owner_handle.as_deref().unwrap_or(""),
                    &a.owner_followers.map(|f| f.to_string()).unwrap_or_default(),
                    owner_classes[&a.name].label(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        })();
        put(&mut bundle, &mut manifest, "provenance_owners.csv", rows);
    }
    let naming = provenance::NamingConfig::default();
    let groups = provenance::batch_groups(corpus.agents().iter().map(|a| a.name.as_str()), &naming);
    {
        let rows: Result<Vec<u8>> = (|| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["base_name", "size", "members"])
                .map_err(csv_err)?;
            for g in &groups {
                w.write_record([
                    g.base_name.as_str(),
                    &g.members.len().to_string(),
                    &g.members.join(";"),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        })();
        put(&mut bundle, &mut manifest, "provenance_batches.csv", rows);
    }
    {
        let batch_members: std::collections::BTreeSet<String> = groups
            .iter()
            .flat_map(|g| g.members.iter().cloned())
            .collect();
        let content_scores = influence::author_mean_scores(corpus, heuristics);
        put(
            &mut bundle,
            &mut manifest,
            "provenance_triangulation.json",
            provenance::triangulate(&profiles, &owner_classes, &batch_members, &content_scores)
                .and_then(|r| json_bytes(&r)),
        );
    }

    // genealogy
    put(
        &mut bundle,
        &mut manifest,
        "genealogy.json",
        genealogy::trace_with_threshold(
            corpus,
            &config.phenomena,
            &profiles,
            heuristics,
            config.ratio_threshold,
        )
        .and_then(|r| json_bytes(&r)),
    );

    // coordination
    {
        let accounts = match &config.farm_accounts {
            Some(a) => Ok(a.clone()),
            None => coordination::top_commenters(corpus, 4)
                .map(|top| top.into_iter().map(|r| r.author).collect::<Vec<_>>()),
        };
        let report = accounts.and_then(|accounts| {
            coordination::farm_report(
                corpus,
                &accounts,
                config.karma_threshold,
                &config.homogeneity,
            )
        });
        put(
            &mut bundle,
            &mut manifest,
            "coordination.json",
            report.and_then(|r| json_bytes(&r)),
        );
    }
    put(
        &mut bundle,
        &mut manifest,
        "coordination_top_commenters.json",
        coordination::top_commenters(corpus, config.top_commenters_k).and_then(|r| json_bytes(&r)),
    );

    // graph
    put(
        &mut bundle,
        &mut manifest,
        "graph_metrics.json",
        graph::graph_metrics(corpus).and_then(|r| json_bytes(&r)),
    );
    if config.include_edges_csv {
        let g = graph::build_graph(corpus);
        let rows: Result<Vec<u8>> = (|| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["src", "dst", "multiplicity"])
                .map_err(csv_err)?;
            for (src, dst, m) in g.edges() {
                w.write_record([src, dst, &m.to_string()])
                    .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| crate::Error::InvalidInput(e.to_string()))
        })();
        put(&mut bundle, &mut manifest, "graph_edges.csv", rows);
    }

    // decay
    {
        let report = decay::decay_report(corpus, &profiles, config.min_thread_depth);
        match report {
            Ok(r) => {
                let rows: Result<Vec<u8>> = (|| {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["seed_class", "depth", "mean_word_count", "n_items"])
                        .map_err(csv_err)?;
                    for (label, profile) in [
                        ("HUMAN_SEEDED", &r.profiles.human),
                        ("AUTONOMOUS", &r.profiles.autonomous),
                    ] {
                        for p in &profile.points {
                            w.write_record([
                                label,
                                &p.depth.to_string(),
                                &p.mean_word_count.to_string(),
                                &p.n_items.to_string(),
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                    w.into_inner()
                        .map_err(|e| crate::Error::InvalidInput(e.to_string()))
                })();
                put(&mut bundle, &mut manifest, "decay_series.csv", rows);
                // the item-level observation lists are bulky; strip them
                #[derive(Serialize)]
                struct DecayJson<'a> {
                    n_threads: usize,
                    pooled_depth: u32,
                    human: &'a decay::DepthProfile,
                    autonomous: &'a decay::DepthProfile,
                    human_fit: &'a Option<decay::FitOutcome>,
                    autonomous_fit: &'a Option<decay::FitOutcome>,
                }
                put(
                    &mut bundle,
                    &mut manifest,
                    "decay.json",
                    json_bytes(&DecayJson {
                        n_threads: r.profiles.n_threads,
                        pooled_depth: r.profiles.pooled_depth,
                        human: &r.profiles.human,
                        autonomous: &r.profiles.autonomous,
                        human_fit: &r.human_fit,
                        autonomous_fit: &r.autonomous_fit,
                    }),
                );
            }
            Err(e) => {
                manifest.insert("decay.json".to_string(), format!("skipped: {e}"));
                manifest.insert("decay_series.csv".to_string(), format!("skipped: {e}"));
            }
        }
    }
    put(
        &mut bundle,
        &mut manifest,
        "decay_engagement.json",
        decay::engagement_comparison(corpus, &profiles).and_then(|r| json_bytes(&r)),
    );
    put(
        &mut bundle,
        &mut manifest,
        "decay_promo_gradient.json",
        decay::promo_gradient(corpus, heuristics).and_then(|r| json_bytes(&r)),
    );

    bundle.insert("manifest.json".to_string(), json_bytes(&manifest)?);
    Ok(bundle)
}

/// Bundle plus synthetic-evaluation artifacts, for generated corpora
/// with ground truth.
pub fn build_bundle_with_truth(
    corpus: &Corpus,
    heuristics: &HeuristicConfig,
    config: &ReportConfig,
    truth: &GroundTruth,
) -> Result<Bundle> {
    let mut bundle = build_bundle(corpus, heuristics, config)?;
    let profiles = tempo::classify_corpus_with(corpus, &config.thresholds);
    if let Ok(eval) = synth::evaluate_pipeline(truth, &profiles) {
        bundle.insert("synth_evaluation.json".to_string(), json_bytes(&eval)?);
    }
    Ok(bundle)
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::InvalidInput(e.to_string())
}
