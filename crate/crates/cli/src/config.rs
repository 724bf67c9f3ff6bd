//! Pipeline configuration: one JSON or TOML file, overridable by flags
//! and the `AGENTSIFT_OUT` environment variable for the output
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use agentsift::coordination::HomogeneityParams;
use agentsift::corpus::{ErrorMode, ParseOptions, TimeBoundaries};
use agentsift::genealogy::{self, Phenomenon};
use agentsift::influence::{HeuristicConfig, PeriodSpec};
use agentsift::patterns::{parse_list_file, TieredPatterns};
use agentsift::tempo::CovThresholds;

use crate::AppError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsFile {
    pub very_regular: Option<f64>,
    pub regular: Option<f64>,
    pub mixed: Option<f64>,
    pub irregular: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneityFile {
    pub pairs_per_author: Option<usize>,
    pub baseline_authors: Option<usize>,
    pub min_comments: Option<usize>,
}

/// On-disk configuration schema. Every field is optional; defaults
/// reproduce the standard analysis.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub posts: Option<PathBuf>,
    pub comments: Option<PathBuf>,
    pub agents: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub breach_at: Option<String>,
    pub restart_at: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub rng_seed: Option<u64>,
    pub assume_utc: Option<bool>,
    pub on_error: Option<String>,
    pub path_separator: Option<char>,
    pub embedding_dim: Option<usize>,
    pub thresholds: Option<ThresholdsFile>,
    pub karma_threshold: Option<u64>,
    pub ratio_threshold: Option<f64>,
    pub window_days: Option<i64>,
    pub step_days: Option<i64>,
    pub restart_window_hours: Option<i64>,
    pub min_thread_depth: Option<u32>,
    pub top_commenters_k: Option<usize>,
    pub farm_accounts: Option<Vec<String>>,
    pub homogeneity: Option<HomogeneityFile>,
    /// Channel pattern files: task_completion, promotional,
    /// forced_ai_framing, skill_helped_human, skill_tricky_problem,
    /// skill_ai_life.
    pub patterns: Option<BTreeMap<String, PathBuf>>,
    pub phenomena: Option<PathBuf>,
    pub periods: Option<Vec<PeriodSpec>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read config {path:?}: {e}")))?;
        let mut parsed: ConfigFile = if path.extension().and_then(|e| e.to_str()) == Some("toml") {
            toml::from_str(&raw).map_err(|e| AppError::Config(format!("bad TOML config: {e}")))?
        } else {
            serde_json::from_str(&raw)
                .map_err(|e| AppError::Config(format!("bad JSON config: {e}")))?
        };
        // relative paths resolve against the config file's directory
        if let Some(base) = path.parent() {
            let anchor = |p: &mut Option<PathBuf>| {
                if let Some(inner) = p {
                    if inner.is_relative() {
                        *inner = base.join(&inner);
                    }
                }
            };
            anchor(&mut parsed.posts);
            anchor(&mut parsed.comments);
            anchor(&mut parsed.agents);
            anchor(&mut parsed.annotations);
            anchor(&mut parsed.embeddings);
            anchor(&mut parsed.out_dir);
            anchor(&mut parsed.phenomena);
            if let Some(patterns) = &mut parsed.patterns {
                for p in patterns.values_mut() {
                    if p.is_relative() {
                        *p = base.join(&p);
                    }
                }
            }
        }
        Ok(parsed)
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub posts: Option<PathBuf>,
    pub comments: Option<PathBuf>,
    pub agents: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub boundaries: TimeBoundaries,
    pub out_dir: Option<PathBuf>,
    pub rng_seed: u64,
    pub parse_options: ParseOptions,
    pub thresholds: CovThresholds,
    pub karma_threshold: u64,
    pub ratio_threshold: f64,
    pub window_days: i64,
    pub step_days: i64,
    pub restart_window_hours: i64,
    pub min_thread_depth: u32,
    pub top_commenters_k: usize,
    pub farm_accounts: Option<Vec<String>>,
    pub homogeneity: HomogeneityParams,
    pub heuristics: HeuristicConfig,
    pub phenomena: Vec<Phenomenon>,
    pub periods: Option<Vec<PeriodSpec>>,
}

fn parse_ts(value: &str, what: &str) -> Result<chrono::DateTime<chrono::Utc>, AppError> {
    agentsift::corpus::parse_timestamp(value, false)
        .map_err(|e| AppError::Config(format!("bad {what}: {e}")))
}

impl Settings {
    pub fn resolve(file: ConfigFile) -> Result<Self, AppError> {
        let defaults = TimeBoundaries::default();
        let breach_at = match &file.breach_at {
            Some(s) => parse_ts(s, "breach_at")?,
            None => defaults.breach_at,
        };
        let restart_at = match &file.restart_at {
            Some(s) => parse_ts(s, "restart_at")?,
            None => defaults.restart_at,
        };
        let boundaries = TimeBoundaries::new(breach_at, restart_at)
            .map_err(|e| AppError::Config(e.to_string()))?;

        let on_error = match file.on_error.as_deref() {
            None | Some("skip") => ErrorMode::Skip,
            Some("fail") => ErrorMode::Fail,
            Some(other) => {
                return Err(AppError::Config(format!(
                    "on_error must be \"skip\" or \"fail\", got {other:?}"
                )))
            }
        };
        let parse_options = ParseOptions {
            on_error,
            assume_utc: file.assume_utc.unwrap_or(false),
            path_separator: file.path_separator.unwrap_or('.'),
            embedding_dim: Some(file.embedding_dim.unwrap_or(768)).filter(|d| *d > 0),
        };

        let base = CovThresholds::default();
        let t = file.thresholds.unwrap_or_default();
        let thresholds = CovThresholds {
            very_regular: t.very_regular.unwrap_or(base.very_regular),
            regular: t.regular.unwrap_or(base.regular),
            mixed: t.mixed.unwrap_or(base.mixed),
            irregular: t.irregular.unwrap_or(base.irregular),
        };
        thresholds
            .validate()
            .map_err(|e| AppError::Config(e.to_string()))?;

        let hdefaults = HomogeneityParams::default();
        let h = file.homogeneity.unwrap_or_default();
        let rng_seed = file.rng_seed.unwrap_or(17);
        let homogeneity = HomogeneityParams {
            pairs_per_author: h.pairs_per_author.unwrap_or(hdefaults.pairs_per_author),
            baseline_authors: h.baseline_authors.unwrap_or(hdefaults.baseline_authors),
            min_comments: h.min_comments.unwrap_or(hdefaults.min_comments),
            seed: rng_seed,
        };

        let heuristics = load_heuristics(file.patterns.as_ref())?;
        let phenomena = match &file.phenomena {
            Some(path) => {
                let raw = std::fs::read_to_string(path).map_err(|e| {
                    AppError::Config(format!("cannot read phenomena file {path:?}: {e}"))
                })?;
                serde_json::from_str(&raw)
                    .map_err(|e| AppError::Config(format!("bad phenomena file: {e}")))?
            }
            None => genealogy::default_phenomena().map_err(|e| AppError::Config(e.to_string()))?,
        };

        Ok(Settings {
            posts: file.posts,
            comments: file.comments,
            agents: file.agents,
            annotations: file.annotations,
            embeddings: file.embeddings,
            boundaries,
            out_dir: file.out_dir,
            rng_seed,
            parse_options,
            thresholds,
            karma_threshold: file.karma_threshold.unwrap_or(10),
            ratio_threshold: file.ratio_threshold.unwrap_or(genealogy::RATIO_THRESHOLD),
            window_days: file.window_days.unwrap_or(3),
            step_days: file.step_days.unwrap_or(1),
            restart_window_hours: file.restart_window_hours.unwrap_or(6),
            min_thread_depth: file.min_thread_depth.unwrap_or(2),
            top_commenters_k: file.top_commenters_k.unwrap_or(10),
            farm_accounts: file.farm_accounts,
            homogeneity,
            heuristics,
            phenomena,
            periods: file.periods,
        })
    }
}

fn load_heuristics(
    patterns: Option<&BTreeMap<String, PathBuf>>,
) -> Result<HeuristicConfig, AppError> {
    let mut config = HeuristicConfig::builtin().map_err(|e| AppError::Config(e.to_string()))?;
    let Some(patterns) = patterns else {
        return Ok(config);
    };
    for (channel, path) in patterns {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read pattern file {path:?}: {e}")))?;
        match channel.as_str() {
            "task_completion" => {
                config.task_completion =
                    TieredPatterns::parse_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            "promotional" => {
                config.promotional =
                    TieredPatterns::parse_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            "forced_ai_framing" => {
                config.forced_ai_framing =
                    TieredPatterns::parse_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            "skill_helped_human" => {
                config.skill_helped_human =
                    parse_list_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            "skill_tricky_problem" => {
                config.skill_tricky_problem =
                    parse_list_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            "skill_ai_life" => {
                config.skill_ai_life =
                    parse_list_file(&raw).map_err(|e| AppError::Config(e.to_string()))?
            }
            other => {
                return Err(AppError::Config(format!(
                    "unknown pattern channel {other:?}"
                )))
            }
        }
    }
    Ok(config)
}
