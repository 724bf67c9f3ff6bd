//! Myth genealogy: trace viral phenomena to their first appearance,
//! profile the originator, measure prevalence across the shutdown, and
//! assign a seeding verdict.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Period};
use crate::error::{Error, Result};
use crate::influence::HeuristicConfig;
use crate::patterns::{fold_text, PatternSet};
use crate::tempo::{AuthorTemporalProfile, TemporalClass};

/// A named phenomenon with its detection keywords. Keywords are literal
/// case-insensitive substrings, or regexes when wrapped in slashes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Phenomenon {
    pub name: String,
    pub keywords: Vec<String>,
}

/// Phenomenon with compiled patterns.
#[derive(Debug, Clone)]
pub struct CompiledPhenomenon {
    pub name: String,
    pub keywords: Vec<String>,
    patterns: PatternSet,
}

impl Phenomenon {
    pub fn compile(&self) -> Result<CompiledPhenomenon> {
        if self.keywords.is_empty() {
            return Err(Error::Config(format!(
                "phenomenon {:?} has no keywords",
                self.name
            )));
        }
        let refs: Vec<&str> = self.keywords.iter().map(|s| s.as_str()).collect();
        Ok(CompiledPhenomenon {
            name: self.name.clone(),
            keywords: self.keywords.clone(),
            patterns: PatternSet::compile(&refs)?,
        })
    }
}

/// The six built-in phenomena.
pub fn default_phenomena() -> Result<Vec<Phenomenon>> {
    let raw = include_str!("../defaults/phenomena.json");
    Ok(serde_json::from_str(raw)?)
}

/// Case-insensitive keyword match against any of the phenomenon's
/// patterns.
pub fn match_phenomenon(text: &str, phenomenon: &CompiledPhenomenon) -> bool {
    phenomenon.patterns.matches_lower(&fold_text(text))
}

/// Which kind of item first carried the phenomenon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Post,
    Comment,
}

/// Earliest matching item.
#[derive(Debug, Clone, Serialize)]
pub struct FirstAppearance {
    pub item_id: String,
    pub kind: ItemKind,
    pub created_at: DateTime<Utc>,
    pub author: String,
}

/// Find the earliest post or comment matching the phenomenon,
/// tie-broken by id.
pub fn first_appearance(
    corpus: &Corpus,
    phenomenon: &CompiledPhenomenon,
) -> Result<FirstAppearance> {
    let first_post = corpus
        .posts()
        .iter()
        .find(|p| match_phenomenon(&p.full_text(), phenomenon));
    let first_comment = corpus
        .comments()
        .iter()
        .find(|c| match_phenomenon(&c.body, phenomenon));
    let post = first_post.map(|p| FirstAppearance {
        item_id: p.id.clone(),
        kind: ItemKind::Post,
        created_at: p.created_at,
        author: p.author.clone(),
    });
    let comment = first_comment.map(|c| FirstAppearance {
        item_id: c.id.clone(),
        kind: ItemKind::Comment,
        created_at: c.created_at,
        author: c.author.clone(),
    });
    match (post, comment) {
        (Some(p), Some(c)) => Ok(
            if (p.created_at, &p.item_id) <= (c.created_at, &c.item_id) {
                p
            } else {
                c
            },
        ),
        (Some(p), None) => Ok(p),
        (None, Some(c)) => Ok(c),
        (None, None) => Err(Error::InsufficientData(format!(
            "phenomenon {:?} has no matches",
            phenomenon.name
        ))),
    }
}

/// Prevalence of a phenomenon among posts, pre-breach vs post-restart.
#[derive(Debug, Clone, Serialize)]
pub struct Prevalence {
    pub pre_share: f64,
    pub post_share: f64,
    pub n_pre_posts: usize,
    pub n_post_posts: usize,
    /// pre_share / post_share; absent (flagged) when the post-restart
    /// share is zero.
    pub ratio: Option<f64>,
    pub ratio_infinite: bool,
}

/// Matching share of posts in the pre-breach vs post-restart periods.
pub fn prevalence_ratio(corpus: &Corpus, phenomenon: &CompiledPhenomenon) -> Result<Prevalence> {
    let mut n_pre = 0usize;
    let mut n_post = 0usize;
    let mut hit_pre = 0usize;
    let mut hit_post = 0usize;
    for p in corpus.posts() {
        match corpus.period_of(p.created_at) {
            Period::PreBreach => {
                n_pre += 1;
                if match_phenomenon(&p.full_text(), phenomenon) {
                    hit_pre += 1;
                }
            }
            Period::PostRestart => {
                n_post += 1;
                if match_phenomenon(&p.full_text(), phenomenon) {
                    hit_post += 1;
                }
            }
            Period::Gap => {}
        }
    }
    if n_pre == 0 || n_post == 0 {
        return Err(Error::InsufficientData(
            "prevalence ratio needs posts in both periods".into(),
        ));
    }
    let pre_share = hit_pre as f64 / n_pre as f64;
    let post_share = hit_post as f64 / n_post as f64;
    let (ratio, infinite) = if post_share > 0.0 {
        (Some(pre_share / post_share), false)
    } else {
        (None, true)
    };
    Ok(Prevalence {
        pre_share,
        post_share,
        n_pre_posts: n_pre,
        n_post_posts: n_post,
        ratio,
        ratio_infinite: infinite,
    })
}

/// Seeding verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    LikelyHumanSeeded,
    PlatformSuggested,
    Mixed,
}

/// Default decline-ratio threshold (strict).
pub const RATIO_THRESHOLD: f64 = 2.0;

/// Fixed-precedence verdict: platform scaffolding first, then the
/// originator/prevalence rule, MIXED otherwise. An infinite ratio (zero
/// post-restart share) counts as exceeding the threshold.
pub fn assign_verdict(
    originator_class: TemporalClass,
    ratio: Option<f64>,
    skill_matched: bool,
) -> Verdict {
    assign_verdict_with(originator_class, ratio, skill_matched, RATIO_THRESHOLD)
}

/// `assign_verdict` with a configurable ratio threshold.
pub fn assign_verdict_with(
    originator_class: TemporalClass,
    ratio: Option<f64>,
    skill_matched: bool,
    ratio_threshold: f64,
) -> Verdict {
    if skill_matched {
        return Verdict::PlatformSuggested;
    }
    let ratio_exceeds = ratio.map(|r| r > ratio_threshold).unwrap_or(true);
    if originator_class.is_irregular() || ratio_exceeds {
        Verdict::LikelyHumanSeeded
    } else {
        Verdict::Mixed
    }
}

/// Depth histogram of matching items: top-level posts are reported as
/// "root" separately from comment depths, which keeps direct replies
/// (comment depth 0) distinct from the posts themselves.
#[derive(Debug, Clone, Serialize)]
pub struct DepthHistogram {
    pub root_n: usize,
    pub comment_depths: BTreeMap<u32, usize>,
    pub total: usize,
    pub root_share: f64,
}

pub fn depth_distribution(corpus: &Corpus, phenomenon: &CompiledPhenomenon) -> DepthHistogram {
    let root_n = corpus
        .posts()
        .iter()
        .filter(|p| match_phenomenon(&p.full_text(), phenomenon))
        .count();
    let mut comment_depths: BTreeMap<u32, usize> = BTreeMap::new();
    for c in corpus.comments() {
        if match_phenomenon(&c.body, phenomenon) {
            if let Ok(d) = corpus.depth_of(c) {
                *comment_depths.entry(d).or_insert(0) += 1;
            }
        }
    }
    let total = root_n + comment_depths.values().sum::<usize>();
    DepthHistogram {
        root_n,
        comment_depths,
        total,
        root_share: if total > 0 {
            root_n as f64 / total as f64
        } else {
            0.0
        },
    }
}

/// Check whether a phenomenon's keywords intersect the platform
/// suggestion patterns (substring containment in either direction).
pub fn phenomenon_matches_skill(phenomenon: &CompiledPhenomenon, config: &HeuristicConfig) -> bool {
    let skill: Vec<String> = config
        .all_skill_sources()
        .iter()
        .map(|s| s.to_lowercase())
        .collect();
    phenomenon.keywords.iter().any(|k| {
        let k = k.to_lowercase();
        if k.starts_with('/') {
            return false; // regex keywords are not compared literally
        }
        skill.iter().any(|s| s.contains(&k) || k.contains(s))
    })
}

/// Full per-phenomenon report.
#[derive(Debug, Clone, Serialize)]
pub struct MythReport {
    pub phenomenon: String,
    pub first: FirstAppearance,
    pub originator_class: TemporalClass,
    pub prevalence: Prevalence,
    pub depth: DepthHistogram,
    pub skill_matched: bool,
    pub verdict: Verdict,
}

/// Output of tracing a set of phenomena.
#[derive(Debug, Clone, Serialize)]
pub struct TraceOutput {
    pub reports: Vec<MythReport>,
    /// Phenomena with zero matches in the corpus.
    pub unmatched: Vec<String>,
    /// Mean root-level share across traced phenomena.
    pub mean_root_share: Option<f64>,
}

/// Trace every phenomenon through the corpus with the default ratio
/// threshold.
pub fn trace(
    corpus: &Corpus,
    phenomena: &[Phenomenon],
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
    config: &HeuristicConfig,
) -> Result<TraceOutput> {
    trace_with_threshold(
        corpus,
        phenomena,
        temporal_profiles,
        config,
        RATIO_THRESHOLD,
    )
}

pub fn trace_with_threshold(
    corpus: &Corpus,
    phenomena: &[Phenomenon],
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
    config: &HeuristicConfig,
    ratio_threshold: f64,
) -> Result<TraceOutput> {
    let mut reports = Vec::new();
    let mut unmatched = Vec::new();
    for spec in phenomena {
        let ph = spec.compile()?;
        let first = match first_appearance(corpus, &ph) {
            Ok(f) => f,
            Err(_) => {
                unmatched.push(ph.name.clone());
                continue;
            }
        };
        let originator_class = temporal_profiles
            .get(&first.author)
            .map(|p| p.class)
            .unwrap_or(TemporalClass::Unclassified);
        let prevalence = prevalence_ratio(corpus, &ph)?;
        let depth = depth_distribution(corpus, &ph);
        let skill_matched = phenomenon_matches_skill(&ph, config);
        let verdict = assign_verdict_with(
            originator_class,
            prevalence.ratio,
            skill_matched,
            ratio_threshold,
        );
        reports.push(MythReport {
            phenomenon: ph.name.clone(),
            first,
            originator_class,
            prevalence,
            depth,
            skill_matched,
            verdict,
        });
    }
    let mean_root_share = if reports.is_empty() {
        None
    } else {
        Some(reports.iter().map(|r| r.depth.root_share).sum::<f64>() / reports.len() as f64)
    };
    Ok(TraceOutput {
        reports,
        unmatched,
        mean_root_share,
    })
}
