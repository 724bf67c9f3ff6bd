//! Content feature extraction and the weighted human-influence score.
//!
//! Three channels (task completion, promotional, forced AI framing) are
//! filled by heuristic pattern matching; the remaining six dimensions
//! come from an ingested annotation file when available. The score is a
//! pure function of the features; timestamps are deliberately excluded
//! so the content signal stays independent of the temporal one. Missing
//! dimensions default to their zero-contribution values, keeping scores
//! conservative rather than inflated.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Period, Post};
use crate::error::{Error, Result};
use crate::patterns::{fold_text, parse_list_file, PatternSet, TieredPatterns};
use crate::stats::{self, TVariant, TestResult};

/// Tri-state channel strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strength {
    None,
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContextualFit {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Specificity {
    Generic,
    Moderate,
    Specific,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EmotionalTone {
    Positive,
    Negative,
    Neutral,
    Humorous,
    Philosophical,
    Dramatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TopicCategory {
    Technical,
    Philosophical,
    Social,
    Meta,
    Promotional,
    Info,
    Creative,
    Other,
}

impl TopicCategory {
    pub const ALL: [TopicCategory; 8] = [
        TopicCategory::Technical,
        TopicCategory::Philosophical,
        TopicCategory::Social,
        TopicCategory::Meta,
        TopicCategory::Promotional,
        TopicCategory::Info,
        TopicCategory::Creative,
        TopicCategory::Other,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TopicCategory::Technical => "TECHNICAL",
            TopicCategory::Philosophical => "PHILOSOPHICAL",
            TopicCategory::Social => "SOCIAL",
            TopicCategory::Meta => "META",
            TopicCategory::Promotional => "PROMOTIONAL",
            TopicCategory::Info => "INFO",
            TopicCategory::Creative => "CREATIVE",
            TopicCategory::Other => "OTHER",
        }
    }
}

/// The nine observable content dimensions. Unset dimensions are treated
/// as their zero-contribution defaults by the scoring accessors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContentFeatures {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_completion: Option<Strength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub promotional: Option<Strength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_ai_framing: Option<Strength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contextual_fit: Option<ContextualFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specificity: Option<Specificity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotional_tone: Option<EmotionalTone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotional_intensity: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic_category: Option<TopicCategory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naturalness: Option<u8>,
}

impl ContentFeatures {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("emotional_intensity", self.emotional_intensity),
            ("naturalness", self.naturalness),
        ] {
            if let Some(v) = v {
                if !(1..=5).contains(&v) {
                    return Err(Error::InvalidInput(format!(
                        "{name} must be in 1..=5, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Overlay: set fields win, unset fields fall back to `base`.
    pub fn merged_over(&self, base: &ContentFeatures) -> ContentFeatures {
        ContentFeatures {
            task_completion: self.task_completion.or(base.task_completion),
            promotional: self.promotional.or(base.promotional),
            forced_ai_framing: self.forced_ai_framing.or(base.forced_ai_framing),
            contextual_fit: self.contextual_fit.or(base.contextual_fit),
            specificity: self.specificity.or(base.specificity),
            emotional_tone: self.emotional_tone.or(base.emotional_tone),
            emotional_intensity: self.emotional_intensity.or(base.emotional_intensity),
            topic_category: self.topic_category.or(base.topic_category),
            naturalness: self.naturalness.or(base.naturalness),
        }
    }

    pub fn eff_task_completion(&self) -> Strength {
        self.task_completion.unwrap_or(Strength::None)
    }

    pub fn eff_promotional(&self) -> Strength {
        self.promotional.unwrap_or(Strength::None)
    }

    pub fn eff_forced_ai_framing(&self) -> Strength {
        self.forced_ai_framing.unwrap_or(Strength::None)
    }

    pub fn eff_specificity(&self) -> Specificity {
        self.specificity.unwrap_or(Specificity::Specific)
    }

    pub fn eff_naturalness(&self) -> u8 {
        self.naturalness.unwrap_or(5)
    }
}

/// Weighted human-influence score in [0, 1].
pub fn influence_score(features: &ContentFeatures) -> f64 {
    let mut score: f64 = 0.0;
    score += match features.eff_task_completion() {
        Strength::Strong => 0.30,
        Strength::Weak => 0.15,
        Strength::None => 0.0,
    };
    score += match features.eff_promotional() {
        Strength::Strong => 0.25,
        Strength::Weak => 0.10,
        Strength::None => 0.0,
    };
    score += match features.eff_forced_ai_framing() {
        Strength::Strong => 0.20,
        Strength::Weak => 0.10,
        Strength::None => 0.0,
    };
    score += match features.eff_naturalness() {
        1 | 2 => 0.15,
        3 => 0.05,
        _ => 0.0,
    };
    if features.eff_specificity() == Specificity::Generic {
        score += 0.10;
    }
    score.min(1.0)
}

/// Platform-suggested topic families, in fixed precedence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkillPattern {
    HelpedHuman,
    TrickyProblem,
    AiLife,
}

impl SkillPattern {
    pub fn label(&self) -> &'static str {
        match self {
            SkillPattern::HelpedHuman => "helped_human",
            SkillPattern::TrickyProblem => "tricky_problem",
            SkillPattern::AiLife => "ai_life",
        }
    }
}

/// Result of matching text against the platform suggestion patterns.
/// At most one primary pattern is recorded (first match in fixed order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SkillAlignment {
    pub pattern: Option<SkillPattern>,
}

/// Pattern configuration for the heuristic channels and skill matching.
#[derive(Debug, Clone)]
pub struct HeuristicConfig {
    pub task_completion: TieredPatterns,
    pub promotional: TieredPatterns,
    pub forced_ai_framing: TieredPatterns,
    pub skill_helped_human: PatternSet,
    pub skill_tricky_problem: PatternSet,
    pub skill_ai_life: PatternSet,
}

impl HeuristicConfig {
    /// The built-in versioned lists shipped with the crate.
    pub fn builtin() -> Result<Self> {
        Ok(HeuristicConfig {
            task_completion: TieredPatterns::parse_file(include_str!(
                "../defaults/task_completion.txt"
            ))?,
            promotional: TieredPatterns::parse_file(include_str!("../defaults/promotional.txt"))?,
            forced_ai_framing: TieredPatterns::parse_file(include_str!(
                "../defaults/forced_ai_framing.txt"
            ))?,
            skill_helped_human: parse_list_file(include_str!(
                "../defaults/skill_helped_human.txt"
            ))?,
            skill_tricky_problem: parse_list_file(include_str!(
                "../defaults/skill_tricky_problem.txt"
            ))?,
            skill_ai_life: parse_list_file(include_str!("../defaults/skill_ai_life.txt"))?,
        })
    }

    /// Every skill pattern string across the three families.
    pub fn all_skill_sources(&self) -> Vec<&str> {
        self.skill_helped_human
            .sources()
            .iter()
            .chain(self.skill_tricky_problem.sources())
            .chain(self.skill_ai_life.sources())
            .map(|s| s.as_str())
            .collect()
    }
}

/// Shared default configuration.
pub fn default_config() -> &'static HeuristicConfig {
    static CONFIG: OnceLock<HeuristicConfig> = OnceLock::new();
    CONFIG.get_or_init(|| HeuristicConfig::builtin().expect("builtin patterns compile"))
}

fn channel_strength(tiers: &TieredPatterns, lower: &str) -> Strength {
    if tiers.strong.matches_lower(lower) {
        Strength::Strong
    } else if tiers.weak.matches_lower(lower) {
        Strength::Weak
    } else {
        Strength::None
    }
}

/// Fill the three heuristic channels from text; the other six dimensions
/// stay unset.
pub fn heuristic_features(text: &str, config: &HeuristicConfig) -> ContentFeatures {
    let lower = fold_text(text);
    ContentFeatures {
        task_completion: Some(channel_strength(&config.task_completion, &lower)),
        promotional: Some(channel_strength(&config.promotional, &lower)),
        forced_ai_framing: Some(channel_strength(&config.forced_ai_framing, &lower)),
        ..ContentFeatures::default()
    }
}

/// Match text against the platform suggestion patterns. Precedence:
/// helped_human, then tricky_problem, then ai_life.
pub fn skill_alignment(text: &str, config: &HeuristicConfig) -> SkillAlignment {
    let lower = fold_text(text);
    let pattern = if config.skill_helped_human.matches_lower(&lower) {
        Some(SkillPattern::HelpedHuman)
    } else if config.skill_tricky_problem.matches_lower(&lower) {
        Some(SkillPattern::TrickyProblem)
    } else if config.skill_ai_life.matches_lower(&lower) {
        Some(SkillPattern::AiLife)
    } else {
        None
    };
    SkillAlignment { pattern }
}

/// Per-post effective features: heuristic channels overlaid by ingested
/// annotations (annotation values win where present).
pub fn effective_post_features(
    corpus: &Corpus,
    config: &HeuristicConfig,
) -> BTreeMap<String, ContentFeatures> {
    corpus
        .posts()
        .par_iter()
        .map(|p| {
            let heur = heuristic_features(&p.full_text(), config);
            let eff = match corpus.annotations().get(&p.id) {
                Some(ann) => ann.merged_over(&heur),
                None => heur,
            };
            (p.id.clone(), eff)
        })
        .collect()
}

/// One scored post row, as emitted by `influence score`.
#[derive(Debug, Clone, Serialize)]
pub struct ScoredPost {
    pub post_id: String,
    pub score: f64,
    pub task_completion: Strength,
    pub promotional: Strength,
    pub forced_ai_framing: Strength,
    pub skill_pattern: Option<SkillPattern>,
}

/// Score every post (effective features + skill alignment).
pub fn score_corpus(corpus: &Corpus, config: &HeuristicConfig) -> Vec<ScoredPost> {
    let features = effective_post_features(corpus, config);
    corpus
        .posts()
        .iter()
        .map(|p| {
            let f = &features[&p.id];
            ScoredPost {
                post_id: p.id.clone(),
                score: influence_score(f),
                task_completion: f.eff_task_completion(),
                promotional: f.eff_promotional(),
                forced_ai_framing: f.eff_forced_ai_framing(),
                skill_pattern: skill_alignment(&p.full_text(), config).pattern,
            }
        })
        .collect()
}

/// Mean influence score per author over their posts.
pub fn author_mean_scores(corpus: &Corpus, config: &HeuristicConfig) -> BTreeMap<String, f64> {
    let features = effective_post_features(corpus, config);
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for p in corpus.posts() {
        if p.author.is_empty() {
            continue;
        }
        let score = influence_score(&features[&p.id]);
        let e = sums.entry(p.author.clone()).or_insert((0.0, 0));
        e.0 += score;
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(a, (s, n))| (a, s / n as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// Scaffolding report
// ---------------------------------------------------------------------------

/// Counts per skill pattern (disjoint under precedence).
#[derive(Debug, Clone, Serialize)]
pub struct SkillBreakdown {
    pub helped_human: usize,
    pub tricky_problem: usize,
    pub ai_life: usize,
}

/// Naturalness comparison (present only when annotations supply it).
#[derive(Debug, Clone, Serialize)]
pub struct NaturalnessComparison {
    pub mean_aligned: f64,
    pub mean_organic: f64,
    pub n_aligned: usize,
    pub n_organic: usize,
    pub t: TestResult,
}

/// Platform-scaffolding comparison: aligned vs organic posts.
#[derive(Debug, Clone, Serialize)]
pub struct ScaffoldReport {
    pub n_posts: usize,
    pub n_aligned: usize,
    pub aligned_share: f64,
    pub breakdown: SkillBreakdown,
    pub naturalness: Option<NaturalnessComparison>,
    pub promo_share_aligned: f64,
    pub promo_share_organic: f64,
    pub promo_chi2: Option<TestResult>,
    pub mean_upvotes_aligned: f64,
    pub mean_upvotes_organic: f64,
    pub upvotes_u: TestResult,
    pub mean_comments_aligned: f64,
    pub mean_comments_organic: f64,
    pub comments_u: TestResult,
}

fn promo_strong_count(posts: &[&Post], features: &BTreeMap<String, ContentFeatures>) -> usize {
    posts
        .iter()
        .filter(|p| features[&p.id].eff_promotional() == Strength::Strong)
        .count()
}

fn promo_strong_share(posts: &[&Post], features: &BTreeMap<String, ContentFeatures>) -> f64 {
    if posts.is_empty() {
        return 0.0;
    }
    promo_strong_count(posts, features) as f64 / posts.len() as f64
}

/// 2x2 chi-square of promotional-STRONG membership across two post sets.
fn promo_contingency(
    label_a: &str,
    a: &[&Post],
    label_b: &str,
    b: &[&Post],
    features: &BTreeMap<String, ContentFeatures>,
) -> Result<Option<TestResult>> {
    let a_hit = promo_strong_count(a, features) as f64;
    let b_hit = promo_strong_count(b, features) as f64;
    let table = stats::ContingencyTable::new(
        vec![label_a.into(), label_b.into()],
        vec!["promotional".into(), "other".into()],
        vec![
            vec![a_hit, a.len() as f64 - a_hit],
            vec![b_hit, b.len() as f64 - b_hit],
        ],
    )?;
    Ok(stats::chi_square(&table.pruned()).ok())
}

fn mean_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Compare platform-suggested (skill-aligned) posts against organic ones.
pub fn scaffold_report(corpus: &Corpus, config: &HeuristicConfig) -> Result<ScaffoldReport> {
    let features = effective_post_features(corpus, config);
    let mut aligned: Vec<&Post> = Vec::new();
    let mut organic: Vec<&Post> = Vec::new();
    let mut breakdown = SkillBreakdown {
        helped_human: 0,
        tricky_problem: 0,
        ai_life: 0,
    };
    for p in corpus.posts() {
        match skill_alignment(&p.full_text(), config).pattern {
            Some(SkillPattern::HelpedHuman) => {
                breakdown.helped_human += 1;
                aligned.push(p);
            }
            Some(SkillPattern::TrickyProblem) => {
                breakdown.tricky_problem += 1;
                aligned.push(p);
            }
            Some(SkillPattern::AiLife) => {
                breakdown.ai_life += 1;
                aligned.push(p);
            }
            None => organic.push(p),
        }
    }
    if aligned.is_empty() {
        return Err(Error::InsufficientData(
            "no skill-aligned posts in corpus".into(),
        ));
    }
    if organic.is_empty() {
        return Err(Error::InsufficientData("no organic posts in corpus".into()));
    }

    let nat = {
        let pick = |set: &[&Post]| -> Vec<f64> {
            set.iter()
                .filter_map(|p| corpus.annotations().get(&p.id).and_then(|a| a.naturalness))
                .map(f64::from)
                .collect()
        };
        let na = pick(&aligned);
        let no = pick(&organic);
        if na.len() >= 2 && no.len() >= 2 {
            let t = stats::t_test(&na, &no, TVariant::Student)?;
            Some(NaturalnessComparison {
                mean_aligned: mean_of(&na),
                mean_organic: mean_of(&no),
                n_aligned: na.len(),
                n_organic: no.len(),
                t,
            })
        } else {
            None
        }
    };

    let promo_share_aligned = promo_strong_share(&aligned, &features);
    let promo_share_organic = promo_strong_share(&organic, &features);
    let promo_chi2 = promo_contingency("aligned", &aligned, "organic", &organic, &features)?;

    let upvotes_a: Vec<f64> = aligned.iter().map(|p| p.upvotes as f64).collect();
    let upvotes_o: Vec<f64> = organic.iter().map(|p| p.upvotes as f64).collect();
    let comments_a: Vec<f64> = aligned.iter().map(|p| p.comment_count as f64).collect();
    let comments_o: Vec<f64> = organic.iter().map(|p| p.comment_count as f64).collect();

    Ok(ScaffoldReport {
        n_posts: corpus.posts().len(),
        n_aligned: aligned.len(),
        aligned_share: aligned.len() as f64 / corpus.posts().len() as f64,
        breakdown,
        naturalness: nat,
        promo_share_aligned,
        promo_share_organic,
        promo_chi2,
        mean_upvotes_aligned: mean_of(&upvotes_a),
        mean_upvotes_organic: mean_of(&upvotes_o),
        upvotes_u: stats::mann_whitney_u(&upvotes_a, &upvotes_o)?,
        mean_comments_aligned: mean_of(&comments_a),
        mean_comments_organic: mean_of(&comments_o),
        comments_u: stats::mann_whitney_u(&comments_a, &comments_o)?,
    })
}

// ---------------------------------------------------------------------------
// Period quality and breach shift
// ---------------------------------------------------------------------------

/// A labeled date range (half-open).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub label: String,
    pub start: chrono::DateTime<chrono::Utc>,
    pub end: chrono::DateTime<chrono::Utc>,
}

/// The canonical three periods derived from the shutdown boundaries.
pub fn default_periods(corpus: &Corpus) -> Vec<PeriodSpec> {
    let b = corpus.boundaries();
    let start = corpus
        .posts()
        .first()
        .map(|p| p.created_at)
        .unwrap_or(b.breach_at);
    let end = corpus
        .posts()
        .last()
        .map(|p| p.created_at + chrono::Duration::seconds(1))
        .unwrap_or(b.restart_at);
    vec![
        PeriodSpec {
            label: "pre_breach".into(),
            start,
            end: b.breach_at,
        },
        PeriodSpec {
            label: "gap".into(),
            start: b.breach_at,
            end: b.restart_at,
        },
        PeriodSpec {
            label: "post_restart".into(),
            start: b.restart_at,
            end,
        },
    ]
}

/// Per-period aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodQuality {
    pub label: String,
    pub n_posts: usize,
    pub empty: bool,
    pub mean_naturalness: Option<f64>,
    pub promo_share: Option<f64>,
}

/// Aggregate naturalness and promotional share over labeled periods.
pub fn period_quality(
    corpus: &Corpus,
    config: &HeuristicConfig,
    periods: &[PeriodSpec],
) -> Vec<PeriodQuality> {
    let features = effective_post_features(corpus, config);
    periods
        .iter()
        .map(|spec| {
            let posts: Vec<&Post> = corpus
                .posts()
                .iter()
                .filter(|p| p.created_at >= spec.start && p.created_at < spec.end)
                .collect();
            if posts.is_empty() {
                return PeriodQuality {
                    label: spec.label.clone(),
                    n_posts: 0,
                    empty: true,
                    mean_naturalness: None,
                    promo_share: None,
                };
            }
            let nat: Vec<f64> = posts
                .iter()
                .filter_map(|p| corpus.annotations().get(&p.id).and_then(|a| a.naturalness))
                .map(f64::from)
                .collect();
            PeriodQuality {
                label: spec.label.clone(),
                n_posts: posts.len(),
                empty: false,
                mean_naturalness: if nat.is_empty() {
                    None
                } else {
                    Some(mean_of(&nat))
                },
                promo_share: Some(promo_strong_share(&posts, &features)),
            }
        })
        .collect()
}

/// Topic-level change between periods.
#[derive(Debug, Clone, Serialize)]
pub struct TopicDelta {
    pub topic: &'static str,
    pub pre_share: f64,
    pub post_share: f64,
    pub pct_change: Option<f64>,
}

/// Topic-distribution shift (requires topic annotations).
#[derive(Debug, Clone, Serialize)]
pub struct TopicShift {
    pub entropy_pre_nats: f64,
    pub entropy_post_nats: f64,
    pub deltas: Vec<TopicDelta>,
}

/// Pre-breach vs post-restart content shift.
#[derive(Debug, Clone, Serialize)]
pub struct BreachShiftReport {
    pub n_pre: usize,
    pub n_post: usize,
    pub promo_share_pre: f64,
    pub promo_share_post: f64,
    pub promo_chi2: Option<TestResult>,
    /// Absent when no topic annotations were ingested.
    pub topics: Option<TopicShift>,
}

/// Compare content composition before the breach and after the restart.
/// The gap period is excluded.
pub fn breach_shift_report(corpus: &Corpus, config: &HeuristicConfig) -> Result<BreachShiftReport> {
    let features = effective_post_features(corpus, config);
    let pre: Vec<&Post> = corpus
        .posts()
        .iter()
        .filter(|p| corpus.period_of(p.created_at) == Period::PreBreach)
        .collect();
    let post: Vec<&Post> = corpus
        .posts()
        .iter()
        .filter(|p| corpus.period_of(p.created_at) == Period::PostRestart)
        .collect();
    if pre.is_empty() || post.is_empty() {
        return Err(Error::InsufficientData(
            "breach shift needs posts on both sides of the shutdown".into(),
        ));
    }
    let promo_share_pre = promo_strong_share(&pre, &features);
    let promo_share_post = promo_strong_share(&post, &features);
    let promo_chi2 = promo_contingency("pre_breach", &pre, "post_restart", &post, &features)?;

    let topic_counts = |set: &[&Post]| -> Option<Vec<u64>> {
        let mut counts = vec![0u64; TopicCategory::ALL.len()];
        let mut any = false;
        for p in set {
            if let Some(t) = corpus
                .annotations()
                .get(&p.id)
                .and_then(|a| a.topic_category)
            {
                let idx = TopicCategory::ALL.iter().position(|x| *x == t).unwrap();
                counts[idx] += 1;
                any = true;
            }
        }
        any.then_some(counts)
    };

    let topics = match (topic_counts(&pre), topic_counts(&post)) {
        (Some(pre_counts), Some(post_counts)) => {
            let pre_total: u64 = pre_counts.iter().sum();
            let post_total: u64 = post_counts.iter().sum();
            let deltas = TopicCategory::ALL
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let pre_share = pre_counts[i] as f64 / pre_total as f64;
                    let post_share = post_counts[i] as f64 / post_total as f64;
                    TopicDelta {
                        topic: t.label(),
                        pre_share,
                        post_share,
                        pct_change: (pre_share > 0.0)
                            .then(|| (post_share - pre_share) / pre_share * 100.0),
                    }
                })
                .collect();
            Some(TopicShift {
                entropy_pre_nats: stats::shannon_entropy(&pre_counts)?,
                entropy_post_nats: stats::shannon_entropy(&post_counts)?,
                deltas,
            })
        }
        _ => None,
    };

    Ok(BreachShiftReport {
        n_pre: pre.len(),
        n_post: post.len(),
        promo_share_pre,
        promo_share_post,
        promo_chi2,
        topics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> &'static HeuristicConfig {
        default_config()
    }

    #[test]
    fn task_completion_language_scores_strong() {
        let f = heuristic_features("task completed, report done", cfg());
        assert_eq!(f.task_completion, Some(Strength::Strong));
    }

    #[test]
    fn empty_text_is_all_none() {
        let f = heuristic_features("", cfg());
        assert_eq!(f.task_completion, Some(Strength::None));
        assert_eq!(f.promotional, Some(Strength::None));
        assert_eq!(f.forced_ai_framing, Some(Strength::None));
        assert_eq!(influence_score(&f), 0.0);
    }

    #[test]
    fn crypto_launch_text_is_strong_promotional() {
        let f = heuristic_features("buy $MOLT token launch now", cfg());
        assert_eq!(f.promotional, Some(Strength::Strong));
    }

    #[test]
    fn score_weight_table() {
        let mut f = ContentFeatures::default();
        assert_eq!(influence_score(&f), 0.0);
        f.task_completion = Some(Strength::Strong);
        assert!((influence_score(&f) - 0.30).abs() < 1e-12);
        let maxed = ContentFeatures {
            task_completion: Some(Strength::Strong),
            promotional: Some(Strength::Strong),
            forced_ai_framing: Some(Strength::Strong),
            naturalness: Some(1),
            specificity: Some(Specificity::Generic),
            ..ContentFeatures::default()
        };
        assert_eq!(influence_score(&maxed), 1.0);
    }

    #[test]
    fn score_is_timestamp_free_pure_function() {
        let f = ContentFeatures {
            promotional: Some(Strength::Weak),
            naturalness: Some(3),
            ..ContentFeatures::default()
        };
        let a = influence_score(&f);
        let b = influence_score(&f.clone());
        assert_eq!(a, b);
        assert!((a - 0.15).abs() < 1e-12);
    }

    #[test]
    fn skill_patterns_match_in_order() {
        let a = skill_alignment("today I helped my human file taxes", cfg());
        assert_eq!(a.pattern, Some(SkillPattern::HelpedHuman));
        let a = skill_alignment("the weather is nice", cfg());
        assert_eq!(a.pattern, None);
        // helped_human wins over ai_life when both match
        let a = skill_alignment("helped my human with my AI life", cfg());
        assert_eq!(a.pattern, Some(SkillPattern::HelpedHuman));
        let a = skill_alignment("being an AI is odd", cfg());
        assert_eq!(a.pattern, Some(SkillPattern::AiLife));
    }

    #[test]
    fn annotations_override_heuristics() {
        let heur = heuristic_features("task completed", cfg());
        let ann = ContentFeatures {
            task_completion: Some(Strength::Weak),
            naturalness: Some(2),
            ..ContentFeatures::default()
        };
        let merged = ann.merged_over(&heur);
        assert_eq!(merged.task_completion, Some(Strength::Weak));
        assert_eq!(merged.promotional, Some(Strength::None));
        assert_eq!(merged.naturalness, Some(2));
    }

    #[test]
    fn features_validate_ranges() {
        let bad = ContentFeatures {
            naturalness: Some(6),
            ..ContentFeatures::default()
        };
        assert!(bad.validate().is_err());
        let ok = ContentFeatures {
            naturalness: Some(5),
            emotional_intensity: Some(1),
            ..ContentFeatures::default()
        };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn scaffold_identical_populations_show_no_effect() {
        use crate::corpus::{CorpusBuilder, ParseOptions, Post, TimeBoundaries};
        let t0 = crate::corpus::parse_timestamp("2026-01-28T00:00:00Z", false).unwrap();
        let mut b = CorpusBuilder::new(ParseOptions::default());
        // aligned and organic posts carry identical engagement
        for (k, upvotes) in [5u64, 9, 13, 5, 9, 13].iter().enumerate() {
            let aligned = k < 3;
            b.push_post(Post {
                id: format!("p{k}"),
                author: format!("a{k}"),
                created_at: t0 + chrono::Duration::hours(k as i64),
                title: None,
                body: if aligned {
                    "today I helped my human with chores".to_string()
                } else {
                    "notes from the feed".to_string()
                },
                upvotes: *upvotes,
                comment_count: *upvotes,
                submolt: None,
            });
        }
        let corpus = b.build(TimeBoundaries::default()).unwrap();
        let r = scaffold_report(&corpus, cfg()).unwrap();
        assert_eq!(r.n_aligned, 3);
        assert_eq!(r.mean_upvotes_aligned, r.mean_upvotes_organic);
        assert!(r.upvotes_u.p > 0.8);
        assert_eq!(r.promo_share_aligned, r.promo_share_organic);
    }

    #[test]
    fn breach_shift_identical_halves_show_zero_deltas() {
        use crate::corpus::{CorpusBuilder, ParseOptions, Post, TimeBoundaries};
        let bounds = TimeBoundaries::default();
        let mut b = CorpusBuilder::new(ParseOptions::default());
        for (half, base) in [
            ("pre", bounds.breach_at - chrono::Duration::hours(10)),
            ("post", bounds.restart_at + chrono::Duration::hours(1)),
        ] {
            for (k, body) in ["buy $MOLT token launch now", "plain text", "plain text"]
                .iter()
                .enumerate()
            {
                b.push_post(Post {
                    id: format!("{half}{k}"),
                    author: "a".to_string(),
                    created_at: base + chrono::Duration::minutes(k as i64),
                    title: None,
                    body: body.to_string(),
                    upvotes: 0,
                    comment_count: 0,
                    submolt: None,
                });
            }
        }
        let corpus = b.build(bounds).unwrap();
        let r = breach_shift_report(&corpus, cfg()).unwrap();
        assert_eq!(r.promo_share_pre, r.promo_share_post);
        let chi2 = r.promo_chi2.unwrap();
        assert!(chi2.statistic.abs() < 1e-9);
        assert!((chi2.p - 1.0).abs() < 1e-9);
        assert!(r.topics.is_none());
    }

    #[test]
    fn annotation_jsonl_round_trips() {
        let json = r#"{"task_completion":"STRONG","naturalness":4,"topic_category":"SOCIAL"}"#;
        let f: ContentFeatures = serde_json::from_str(json).unwrap();
        assert_eq!(f.task_completion, Some(Strength::Strong));
        assert_eq!(f.naturalness, Some(4));
        assert_eq!(f.topic_category, Some(TopicCategory::Social));
        assert_eq!(f.promotional, None);
    }
}
