//! Owner-profile classification, batch-naming detection, and
//! signal-triangulation cross-tabs.
//!
//! Ownership and naming are secondary signals: they are cross-tabulated
//! against the temporal classification rather than folded into a
//! composite score, preserving the interpretability of each channel.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

use crate::corpus::Agent;
use crate::error::{Error, Result};
use crate::stats::{self, ContingencyTable, TestResult};
use crate::tempo::{AuthorTemporalProfile, TemporalClass};

/// Owner-account classes. AUTO_GENERATED takes precedence over the
/// follower buckets: the handle pattern is the stronger automation
/// signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OwnerClass {
    Burner,
    AutoGenerated,
    LowProfile,
    Moderate,
    Established,
    HighProfile,
    Unknown,
}

impl OwnerClass {
    pub const ALL: [OwnerClass; 7] = [
        OwnerClass::Burner,
        OwnerClass::AutoGenerated,
        OwnerClass::LowProfile,
        OwnerClass::Moderate,
        OwnerClass::Established,
        OwnerClass::HighProfile,
        OwnerClass::Unknown,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            OwnerClass::Burner => "BURNER",
            OwnerClass::AutoGenerated => "AUTO_GENERATED",
            OwnerClass::LowProfile => "LOW_PROFILE",
            OwnerClass::Moderate => "MODERATE",
            OwnerClass::Established => "ESTABLISHED",
            OwnerClass::HighProfile => "HIGH_PROFILE",
            OwnerClass::Unknown => "UNKNOWN",
        }
    }
}

fn auto_generated_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new("^[A-Za-z]{5}[0-9]{8}$").unwrap())
}

/// Classify an owner from handle pattern and follower count. The
/// auto-generated handle check runs first; follower buckets apply
/// otherwise; missing data maps to UNKNOWN.
pub fn classify_owner(handle: Option<&str>, followers: Option<i64>) -> Result<OwnerClass> {
    if let Some(f) = followers {
        if f < 0 {
            return Err(Error::InvalidInput(format!("negative follower count {f}")));
        }
    }
    if let Some(h) = handle {
        if auto_generated_re().is_match(h) {
            return Ok(OwnerClass::AutoGenerated);
        }
    }
    Ok(match followers {
        None => OwnerClass::Unknown,
        Some(0) => OwnerClass::Burner,
        Some(1..=9) => OwnerClass::LowProfile,
        Some(10..=99) => OwnerClass::Moderate,
        Some(100..=999) => OwnerClass::Established,
        Some(_) => OwnerClass::HighProfile,
    })
}

/// Classify an agent's owner metadata (validated at parse, so total).
pub fn classify_agent_owner(agent: &Agent) -> OwnerClass {
    classify_owner(
        agent.owner_handle.as_deref(),
        agent.owner_followers.map(|f| f as i64),
    )
    .expect("parsed follower counts are nonnegative")
}

/// Base-name extraction config.
#[derive(Debug, Clone)]
pub struct NamingConfig {
    /// Suffixes stripped once after the trailing digit/separator strip.
    pub suffixes: Vec<String>,
    /// Characters treated as separators in the trailing strip.
    pub separators: Vec<char>,
}

impl Default for NamingConfig {
    fn default() -> Self {
        NamingConfig {
            suffixes: ["bot", "ai", "agent", "gpt", "llm"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            separators: vec!['_', '-', '.', ' '],
        }
    }
}

fn strip_trailing_digits_and_separators(name: &str, separators: &[char]) -> String {
    name.trim_end_matches(|c: char| c.is_ascii_digit() || separators.contains(&c))
        .to_string()
}

/// Extract the batch base name: lowercase, strip trailing digits and
/// separators, strip one trailing suffix, then strip trailing digits and
/// separators once more. A step that would empty the name is skipped, so
/// names consisting purely of a suffix (e.g. "gpt_1") keep the suffix as
/// their base and still group.
pub fn base_name(agent_name: &str, config: &NamingConfig) -> String {
    let original = agent_name.to_lowercase();
    let mut name = original.clone();

    let stripped = strip_trailing_digits_and_separators(&name, &config.separators);
    if !stripped.is_empty() {
        name = stripped;
    }
    // longest matching suffix wins, stripped at most once
    let mut best: Option<&str> = None;
    for suffix in &config.suffixes {
        if name.ends_with(suffix.as_str())
            && name.len() > suffix.len()
            && best.is_none_or(|b| suffix.len() > b.len())
        {
            best = Some(suffix);
        }
    }
    if let Some(suffix) = best {
        name.truncate(name.len() - suffix.len());
    }
    let stripped = strip_trailing_digits_and_separators(&name, &config.separators);
    if !stripped.is_empty() {
        name = stripped;
    }
    if name.is_empty() {
        original
    } else {
        name
    }
}

/// Three or more agents sharing a base name.
#[derive(Debug, Clone, Serialize)]
pub struct BatchGroup {
    pub base_name: String,
    pub members: Vec<String>,
}

/// Group agent names by base name; keep groups of three or more, sorted
/// by size descending (ties by base name).
pub fn batch_groups<'a>(
    names: impl IntoIterator<Item = &'a str>,
    config: &NamingConfig,
) -> Vec<BatchGroup> {
    let mut by_base: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for name in names {
        by_base
            .entry(base_name(name, config))
            .or_default()
            .insert(name.to_string());
    }
    let mut groups: Vec<BatchGroup> = by_base
        .into_iter()
        .filter(|(_, members)| members.len() >= 3)
        .map(|(base_name, members)| BatchGroup {
            base_name,
            members: members.into_iter().collect(),
        })
        .collect();
    groups.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.base_name.cmp(&b.base_name))
    });
    groups
}

// ---------------------------------------------------------------------------
// Triangulation
// ---------------------------------------------------------------------------

/// Author-level content-score buckets used for the temporal x content
/// cross-tab.
pub fn content_bucket(score: f64) -> &'static str {
    if score > 0.3 {
        "ELEVATED"
    } else if score >= 0.1 {
        "MODERATE"
    } else {
        "LOW"
    }
}

/// One cross-tab with its chi-square.
#[derive(Debug, Clone, Serialize)]
pub struct CrossTab {
    pub table: ContingencyTable,
    pub chi2: TestResult,
}

/// Signal-triangulation report: cross-tabs of the temporal classes
/// against ownership, content buckets, and batch membership, plus
/// continuous associations.
#[derive(Debug, Clone, Serialize)]
pub struct TriangulationReport {
    pub n_authors: usize,
    pub temporal_by_owner: CrossTab,
    pub temporal_by_content: CrossTab,
    pub temporal_by_batch: CrossTab,
    /// Content score across temporal classes.
    pub anova_content_by_class: Option<TestResult>,
    /// Temporal score (-1..+1) against mean content score.
    pub pearson_temporal_vs_content: Option<TestResult>,
}

fn cross_tab(
    axis: &str,
    rows: &[&'static str],
    cols: &[String],
    cells: BTreeMap<(String, String), f64>,
) -> Result<CrossTab> {
    let counts: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| {
                    cells
                        .get(&(r.to_string(), c.clone()))
                        .copied()
                        .unwrap_or(0.0)
                })
                .collect()
        })
        .collect();
    let table = ContingencyTable::new(
        rows.iter().map(|r| r.to_string()).collect(),
        cols.to_vec(),
        counts,
    )?
    .pruned();
    if table.n_rows() < 2 || table.n_cols() < 2 {
        return Err(Error::Degenerate(format!(
            "{axis} axis collapsed to a single category"
        )));
    }
    let chi2 = stats::chi_square(&table)?;
    Ok(CrossTab { table, chi2 })
}

/// Cross-tabulate temporal classification against the secondary signals.
/// Only authors with a classified temporal profile participate.
pub fn triangulate(
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
    owner_classes: &BTreeMap<String, OwnerClass>,
    batch_members: &BTreeSet<String>,
    content_scores: &BTreeMap<String, f64>,
) -> Result<TriangulationReport> {
    let classified: Vec<&AuthorTemporalProfile> = temporal_profiles
        .values()
        .filter(|p| p.class != TemporalClass::Unclassified)
        .collect();
    if classified.is_empty() {
        return Err(Error::InsufficientData(
            "no classified authors to triangulate".into(),
        ));
    }
    let temporal_rows: Vec<&'static str> = TemporalClass::CLASSIFIED
        .iter()
        .map(|c| c.label())
        .collect();

    let mut owner_cells: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut content_cells: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut batch_cells: BTreeMap<(String, String), f64> = BTreeMap::new();
    for p in &classified {
        let row = p.class.label().to_string();
        let owner = owner_classes
            .get(&p.author)
            .copied()
            .unwrap_or(OwnerClass::Unknown);
        *owner_cells
            .entry((row.clone(), owner.label().to_string()))
            .or_insert(0.0) += 1.0;
        if let Some(score) = content_scores.get(&p.author) {
            *content_cells
                .entry((row.clone(), content_bucket(*score).to_string()))
                .or_insert(0.0) += 1.0;
        }
        let batch_col = if batch_members.contains(&p.author) {
            "batch"
        } else {
            "non_batch"
        };
        *batch_cells
            .entry((row, batch_col.to_string()))
            .or_insert(0.0) += 1.0;
    }

    let owner_cols: Vec<String> = OwnerClass::ALL
        .iter()
        .map(|c| c.label().to_string())
        .collect();
    let content_cols = vec![
        "LOW".to_string(),
        "MODERATE".to_string(),
        "ELEVATED".to_string(),
    ];
    let batch_cols = vec!["batch".to_string(), "non_batch".to_string()];

    let temporal_by_owner = cross_tab("ownership", &temporal_rows, &owner_cols, owner_cells)?;
    let temporal_by_content = cross_tab("content", &temporal_rows, &content_cols, content_cells)?;
    let temporal_by_batch = cross_tab("batch", &temporal_rows, &batch_cols, batch_cells)?;

    let mut groups: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in &classified {
        if let (Some(score), Some(tscore)) = (content_scores.get(&p.author), p.class.score()) {
            groups.entry(p.class.label()).or_default().push(*score);
            xs.push(tscore);
            ys.push(*score);
        }
    }
    let anova_groups: Vec<Vec<f64>> = groups.into_values().filter(|g| !g.is_empty()).collect();
    let anova_content_by_class = if anova_groups.len() >= 2 {
        stats::anova(&anova_groups).ok()
    } else {
        None
    };
    let pearson_temporal_vs_content = if xs.len() >= 3 {
        stats::pearson(&xs, &ys).ok()
    } else {
        None
    };

    Ok(TriangulationReport {
        n_authors: classified.len(),
        temporal_by_owner,
        temporal_by_content,
        temporal_by_batch,
        anova_content_by_class,
        pearson_temporal_vs_content,
    })
}
