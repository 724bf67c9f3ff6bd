//! Temporal fingerprinting of posting behavior.
//!
//! Autonomous agents run on a periodic heartbeat and post at regular
//! intervals; human prompting can happen at any time and breaks the
//! rhythm. The coefficient of variation (CoV) of inter-post intervals,
//! population standard deviation over mean, captures this as a
//! scale-free dispersion measure. Post timestamps only; comments are
//! reactive and excluded.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::stats::{self, TestResult};

/// Minimum posts required for classification.
pub const MIN_POSTS: usize = 5;
/// Intervals shorter than this are treated as duplicate submissions.
pub const MIN_INTERVAL_SECONDS: f64 = 1.0;

/// Five-class temporal labeling, plus the abstain label for authors with
/// insufficient history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TemporalClass {
    VeryRegular,
    Regular,
    Mixed,
    Irregular,
    VeryIrregular,
    Unclassified,
}

impl TemporalClass {
    pub const CLASSIFIED: [TemporalClass; 5] = [
        TemporalClass::VeryRegular,
        TemporalClass::Regular,
        TemporalClass::Mixed,
        TemporalClass::Irregular,
        TemporalClass::VeryIrregular,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TemporalClass::VeryRegular => "VERY_REGULAR",
            TemporalClass::Regular => "REGULAR",
            TemporalClass::Mixed => "MIXED",
            TemporalClass::Irregular => "IRREGULAR",
            TemporalClass::VeryIrregular => "VERY_IRREGULAR",
            TemporalClass::Unclassified => "UNCLASSIFIED",
        }
    }

    /// Autonomous-leaning: CoV below the regular/mixed boundary.
    pub fn is_autonomous(&self) -> bool {
        matches!(self, TemporalClass::VeryRegular | TemporalClass::Regular)
    }

    /// Human-leaning: CoV above the mixed/irregular boundary.
    pub fn is_irregular(&self) -> bool {
        matches!(
            self,
            TemporalClass::Irregular | TemporalClass::VeryIrregular
        )
    }

    /// Signed score used for correlations: -1.0 (very regular) through
    /// +1.0 (very irregular); none for unclassified.
    pub fn score(&self) -> Option<f64> {
        match self {
            TemporalClass::VeryRegular => Some(-1.0),
            TemporalClass::Regular => Some(-0.5),
            TemporalClass::Mixed => Some(0.0),
            TemporalClass::Irregular => Some(0.5),
            TemporalClass::VeryIrregular => Some(1.0),
            TemporalClass::Unclassified => None,
        }
    }
}

/// CoV cut-points. Boundary values map to the upper class.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovThresholds {
    pub very_regular: f64,
    pub regular: f64,
    pub mixed: f64,
    pub irregular: f64,
}

impl Default for CovThresholds {
    fn default() -> Self {
        CovThresholds {
            very_regular: 0.3,
            regular: 0.5,
            mixed: 1.0,
            irregular: 2.0,
        }
    }
}

impl CovThresholds {
    /// All four cut-points shifted by `delta` (sensitivity sweeps).
    pub fn shifted(&self, delta: f64) -> CovThresholds {
        CovThresholds {
            very_regular: self.very_regular + delta,
            regular: self.regular + delta,
            mixed: self.mixed + delta,
            irregular: self.irregular + delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = [self.very_regular, self.regular, self.mixed, self.irregular];
        if t.windows(2).all(|w| w[0] < w[1]) && t[0] > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "CoV thresholds must be positive and strictly increasing, got {t:?}"
            )))
        }
    }
}

/// Inter-post intervals for one author, in hours.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalSeries {
    pub author: String,
    pub intervals: Vec<f64>,
    pub n_posts: usize,
}

/// Per-author temporal profile.
#[derive(Debug, Clone, Serialize)]
pub struct AuthorTemporalProfile {
    pub author: String,
    pub cov: Option<f64>,
    pub class: TemporalClass,
    pub n_posts: usize,
}

/// Consecutive differences of sorted post timestamps in hours, with
/// sub-second entries dropped as duplicate submissions. With a dropped
/// interval the next gap is still measured from the later duplicate.
pub fn inter_post_intervals(author: &str, times: &[DateTime<Utc>]) -> IntervalSeries {
    let mut intervals = Vec::new();
    for pair in times.windows(2) {
        let seconds = (pair[1] - pair[0]).num_milliseconds() as f64 / 1000.0;
        if seconds >= MIN_INTERVAL_SECONDS {
            intervals.push(seconds / 3600.0);
        }
    }
    IntervalSeries {
        author: author.to_string(),
        intervals,
        n_posts: times.len(),
    }
}

/// Population coefficient of variation: sigma / mean with divide-by-n
/// variance. Needs at least two intervals.
pub fn coefficient_of_variation(series: &IntervalSeries) -> Option<f64> {
    let xs = &series.intervals;
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return None;
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some(var.sqrt() / mean)
}

/// Threshold classification with the default cut-points.
pub fn classify_author(cov: f64, n_posts: usize) -> Result<TemporalClass> {
    classify_author_with(cov, n_posts, &CovThresholds::default())
}

/// Threshold classification. Authors under the five-post minimum are
/// unclassified regardless of CoV.
pub fn classify_author_with(
    cov: f64,
    n_posts: usize,
    thresholds: &CovThresholds,
) -> Result<TemporalClass> {
    if cov < 0.0 || !cov.is_finite() {
        return Err(Error::InvalidInput(format!("invalid CoV {cov}")));
    }
    if n_posts < MIN_POSTS {
        return Ok(TemporalClass::Unclassified);
    }
    Ok(if cov < thresholds.very_regular {
        TemporalClass::VeryRegular
    } else if cov < thresholds.regular {
        TemporalClass::Regular
    } else if cov < thresholds.mixed {
        TemporalClass::Mixed
    } else if cov < thresholds.irregular {
        TemporalClass::Irregular
    } else {
        TemporalClass::VeryIrregular
    })
}

fn profile_author(
    author: &str,
    times: &[DateTime<Utc>],
    thresholds: &CovThresholds,
) -> AuthorTemporalProfile {
    let series = inter_post_intervals(author, times);
    let cov = if times.len() >= MIN_POSTS {
        coefficient_of_variation(&series)
    } else {
        None
    };
    let class = match cov {
        Some(c) => {
            classify_author_with(c, times.len(), thresholds).unwrap_or(TemporalClass::Unclassified)
        }
        None => TemporalClass::Unclassified,
    };
    AuthorTemporalProfile {
        author: author.to_string(),
        cov: if class == TemporalClass::Unclassified {
            None
        } else {
            cov
        },
        class,
        n_posts: times.len(),
    }
}

/// Post timestamps per (non-blank) author, in corpus order.
pub fn post_times_by_author(corpus: &Corpus) -> BTreeMap<String, Vec<DateTime<Utc>>> {
    let mut map: BTreeMap<String, Vec<DateTime<Utc>>> = BTreeMap::new();
    for p in corpus.posts() {
        if p.author.is_empty() {
            continue;
        }
        map.entry(p.author.clone()).or_default().push(p.created_at);
    }
    map
}

/// Temporal profiles for every author with at least one post.
pub fn classify_corpus(corpus: &Corpus) -> BTreeMap<String, AuthorTemporalProfile> {
    classify_corpus_with(corpus, &CovThresholds::default())
}

pub fn classify_corpus_with(
    corpus: &Corpus,
    thresholds: &CovThresholds,
) -> BTreeMap<String, AuthorTemporalProfile> {
    let by_author = post_times_by_author(corpus);
    by_author
        .par_iter()
        .map(|(author, times)| (author.clone(), profile_author(author, times, thresholds)))
        .collect()
}

/// Corpus-level classification aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub n_authors: usize,
    pub n_classified: usize,
    pub counts: BTreeMap<&'static str, usize>,
    /// Share of classified authors with CoV < 0.5.
    pub autonomous_rate: f64,
    /// Share of classified authors with CoV > 1.0.
    pub human_influenced_rate: f64,
    pub mean_cov: Option<f64>,
    pub median_cov: Option<f64>,
}

/// Summarize a profile map into class counts and headline rates.
pub fn summarize(profiles: &BTreeMap<String, AuthorTemporalProfile>) -> ClassSummary {
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for class in TemporalClass::CLASSIFIED {
        counts.insert(class.label(), 0);
    }
    counts.insert(TemporalClass::Unclassified.label(), 0);
    let mut covs: Vec<f64> = Vec::new();
    let mut autonomous = 0usize;
    let mut irregular = 0usize;
    for p in profiles.values() {
        *counts.get_mut(p.class.label()).unwrap() += 1;
        if let Some(c) = p.cov {
            covs.push(c);
        }
        if p.class.is_autonomous() {
            autonomous += 1;
        }
        if p.class.is_irregular() {
            irregular += 1;
        }
    }
    let n_classified = covs.len();
    covs.sort_by(f64::total_cmp);
    let median = if covs.is_empty() {
        None
    } else if covs.len() % 2 == 1 {
        Some(covs[covs.len() / 2])
    } else {
        Some((covs[covs.len() / 2 - 1] + covs[covs.len() / 2]) / 2.0)
    };
    ClassSummary {
        n_authors: profiles.len(),
        n_classified,
        counts,
        autonomous_rate: if n_classified > 0 {
            autonomous as f64 / n_classified as f64
        } else {
            0.0
        },
        human_influenced_rate: if n_classified > 0 {
            irregular as f64 / n_classified as f64
        } else {
            0.0
        },
        mean_cov: if covs.is_empty() {
            None
        } else {
            Some(covs.iter().sum::<f64>() / covs.len() as f64)
        },
        median_cov: median,
    }
}

// ---------------------------------------------------------------------------
// Sliding windows
// ---------------------------------------------------------------------------

/// One sliding-window entry.
#[derive(Debug, Clone, Serialize)]
pub struct WindowRate {
    pub window_start: DateTime<Utc>,
    pub window_end: DateTime<Utc>,
    pub n_classified: usize,
    /// Fraction of window-classified authors with CoV < 0.5; none when
    /// nothing classified in the window.
    pub autonomous_rate: Option<f64>,
}

/// Reclassify authors on window-local posts across sliding windows.
/// Windows start at the UTC midnight of the first post and advance by
/// `step_days` until the span is covered.
pub fn sliding_window_rates(
    corpus: &Corpus,
    window_days: i64,
    step_days: i64,
    thresholds: &CovThresholds,
) -> Result<Vec<WindowRate>> {
    if window_days < 2 {
        return Err(Error::Config(format!(
            "window must span at least 2 days, got {window_days}"
        )));
    }
    if step_days < 1 {
        return Err(Error::Config("step must be at least 1 day".into()));
    }
    let Some(first) = corpus.posts().first() else {
        return Ok(Vec::new());
    };
    let last = corpus.posts().last().unwrap().created_at;
    let mut start = first
        .created_at
        .date_naive()
        .and_hms_opt(0, 0, 0)
        .unwrap()
        .and_utc();
    let by_author = post_times_by_author(corpus);
    let mut out = Vec::new();
    while start <= last {
        let end = start + Duration::days(window_days);
        let mut n_classified = 0usize;
        let mut autonomous = 0usize;
        for (author, times) in &by_author {
            let local: Vec<DateTime<Utc>> = times
                .iter()
                .filter(|t| **t >= start && **t < end)
                .copied()
                .collect();
            if local.len() < MIN_POSTS {
                continue;
            }
            let profile = profile_author(author, &local, thresholds);
            if profile.class == TemporalClass::Unclassified {
                continue;
            }
            n_classified += 1;
            if profile.class.is_autonomous() {
                autonomous += 1;
            }
        }
        out.push(WindowRate {
            window_start: start,
            window_end: end,
            n_classified,
            autonomous_rate: if n_classified > 0 {
                Some(autonomous as f64 / n_classified as f64)
            } else {
                None
            },
        });
        start += Duration::days(step_days);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cohort decomposition
// ---------------------------------------------------------------------------

/// Decomposition of autonomous-rate change between observation windows.
#[derive(Debug, Clone, Serialize)]
pub struct CohortDecomposition {
    pub initial_classified_n: usize,
    pub initial_autonomous_n: usize,
    /// Initially-autonomous authors with zero posts after the initial
    /// cutoff.
    pub disappeared_n: usize,
    pub disappeared_rate: f64,
    pub initial_autonomous_rate: f64,
    /// Autonomous rate of the initial cohort reclassified over the
    /// extended window.
    pub expanded_cohort_rate: f64,
    /// Autonomous rate over all authors classified in the extended
    /// window (new authors included).
    pub extended_all_rate: f64,
    /// (expanded_cohort_rate - initial_autonomous_rate) in percentage
    /// points: the pure window-expansion effect.
    pub window_expansion_delta_pp: f64,
    /// (extended_all_rate - expanded_cohort_rate) in percentage points:
    /// the new-author influx effect.
    pub new_author_delta_pp: f64,
    pub new_authors_n: usize,
}

/// Split the autonomous-rate change between two cutoffs into the
/// window-expansion effect and the new-author effect, and measure cohort
/// disappearance.
pub fn cohort_decomposition(
    corpus: &Corpus,
    initial_cutoff: DateTime<Utc>,
    extended_cutoff: DateTime<Utc>,
    thresholds: &CovThresholds,
) -> Result<CohortDecomposition> {
    if initial_cutoff >= extended_cutoff {
        return Err(Error::Config(
            "initial_cutoff must precede extended_cutoff".into(),
        ));
    }
    let Some(first) = corpus.posts().first() else {
        return Err(Error::InsufficientData("corpus has no posts".into()));
    };
    let last = corpus.posts().last().unwrap().created_at;
    if initial_cutoff <= first.created_at || extended_cutoff > last + Duration::days(1) {
        return Err(Error::Config(format!(
            "cutoffs ({initial_cutoff}, {extended_cutoff}) fall outside the corpus span"
        )));
    }

    let by_author = post_times_by_author(corpus);
    let classify_window = |until: DateTime<Utc>| -> BTreeMap<&str, AuthorTemporalProfile> {
        by_author
            .iter()
            .filter_map(|(author, times)| {
                let local: Vec<DateTime<Utc>> =
                    times.iter().filter(|t| **t < until).copied().collect();
                if local.is_empty() {
                    return None;
                }
                Some((author.as_str(), profile_author(author, &local, thresholds)))
            })
            .collect()
    };

    let initial = classify_window(initial_cutoff);
    let initial_classified: Vec<&str> = initial
        .iter()
        .filter(|(_, p)| p.class != TemporalClass::Unclassified)
        .map(|(a, _)| *a)
        .collect();
    let cohort: Vec<&str> = initial
        .iter()
        .filter(|(_, p)| p.class.is_autonomous())
        .map(|(a, _)| *a)
        .collect();
    if initial_classified.is_empty() {
        return Err(Error::InsufficientData(
            "no classified authors in the initial window".into(),
        ));
    }

    let disappeared = cohort
        .iter()
        .filter(|a| {
            by_author[**a]
                .iter()
                .all(|t| *t < initial_cutoff || *t >= extended_cutoff)
        })
        .count();

    let extended = classify_window(extended_cutoff);
    let rate_over = |authors: &[&str], profiles: &BTreeMap<&str, AuthorTemporalProfile>| -> f64 {
        let classified: Vec<&&str> = authors
            .iter()
            .filter(|a| {
                profiles
                    .get(**a)
                    .is_some_and(|p| p.class != TemporalClass::Unclassified)
            })
            .collect();
        if classified.is_empty() {
            return 0.0;
        }
        let autonomous = classified
            .iter()
            .filter(|a| profiles[***a].class.is_autonomous())
            .count();
        autonomous as f64 / classified.len() as f64
    };

    let initial_rate = rate_over(&initial_classified, &initial);
    let expanded_cohort_rate = rate_over(&initial_classified, &extended);
    let all_extended: Vec<&str> = extended
        .iter()
        .filter(|(_, p)| p.class != TemporalClass::Unclassified)
        .map(|(a, _)| *a)
        .collect();
    let extended_all_rate = rate_over(&all_extended, &extended);
    let new_authors = by_author
        .iter()
        .filter(|(_, times)| times.iter().all(|t| *t >= initial_cutoff))
        .count();

    Ok(CohortDecomposition {
        initial_classified_n: initial_classified.len(),
        initial_autonomous_n: cohort.len(),
        disappeared_n: disappeared,
        disappeared_rate: if cohort.is_empty() {
            0.0
        } else {
            disappeared as f64 / cohort.len() as f64
        },
        initial_autonomous_rate: initial_rate,
        expanded_cohort_rate,
        extended_all_rate,
        window_expansion_delta_pp: (expanded_cohort_rate - initial_rate) * 100.0,
        new_author_delta_pp: (extended_all_rate - expanded_cohort_rate) * 100.0,
        new_authors_n: new_authors,
    })
}

// ---------------------------------------------------------------------------
// Restart re-engagement
// ---------------------------------------------------------------------------

/// The post-restart natural-experiment readout.
#[derive(Debug, Clone, Serialize)]
pub struct RestartReport {
    pub window_hours: i64,
    pub n_classified: usize,
    pub n_in_window: usize,
    pub share_irregular_in_window: f64,
    pub share_irregular_overall: f64,
    pub chi2: Option<TestResult>,
}

/// Compare the irregular share of authors posting in the first hours
/// after restart against all classified authors. The chi-square runs on
/// the disjoint in-window vs out-of-window split.
pub fn restart_reengagement(
    corpus: &Corpus,
    window_hours: i64,
    thresholds: &CovThresholds,
) -> Result<RestartReport> {
    let restart = corpus.boundaries().restart_at;
    let window_end = restart + Duration::hours(window_hours);
    if !corpus.posts().iter().any(|p| p.created_at >= restart) {
        return Err(Error::InsufficientData("no post-restart posts".into()));
    }
    let profiles = classify_corpus_with(corpus, thresholds);
    let mut in_window: BTreeMap<&str, bool> = BTreeMap::new();
    for p in corpus.posts() {
        if p.author.is_empty() || p.created_at < restart || p.created_at >= window_end {
            continue;
        }
        in_window.insert(p.author.as_str(), true);
    }

    let classified: Vec<&AuthorTemporalProfile> = profiles
        .values()
        .filter(|p| p.class != TemporalClass::Unclassified)
        .collect();
    if classified.is_empty() {
        return Err(Error::InsufficientData("no classified authors".into()));
    }
    let overall_irregular = classified.iter().filter(|p| p.class.is_irregular()).count();
    let window_classified: Vec<&&AuthorTemporalProfile> = classified
        .iter()
        .filter(|p| in_window.contains_key(p.author.as_str()))
        .collect();
    let window_irregular = window_classified
        .iter()
        .filter(|p| p.class.is_irregular())
        .count();

    let n_in = window_classified.len();
    let n_out = classified.len() - n_in;
    let out_irregular = overall_irregular - window_irregular;
    let chi2 = if n_in > 0 && n_out > 0 {
        stats::ContingencyTable::new(
            vec!["in_window".into(), "out_of_window".into()],
            vec!["irregular".into(), "not_irregular".into()],
            vec![
                vec![window_irregular as f64, (n_in - window_irregular) as f64],
                vec![out_irregular as f64, (n_out - out_irregular) as f64],
            ],
        )
        .and_then(|t| stats::chi_square(&t.pruned()))
        .ok()
    } else {
        None
    };

    Ok(RestartReport {
        window_hours,
        n_classified: classified.len(),
        n_in_window: n_in,
        share_irregular_in_window: if n_in > 0 {
            window_irregular as f64 / n_in as f64
        } else {
            0.0
        },
        share_irregular_overall: overall_irregular as f64 / classified.len() as f64,
        chi2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, ParseOptions, Post, TimeBoundaries};

    fn t0() -> DateTime<Utc> {
        crate::corpus::parse_timestamp("2026-01-28T00:00:00Z", false).unwrap()
    }

    fn hours(h: f64) -> Duration {
        Duration::milliseconds((h * 3_600_000.0).round() as i64)
    }

    fn make_post(id: &str, author: &str, at: DateTime<Utc>) -> Post {
        Post {
            id: id.to_string(),
            author: author.to_string(),
            created_at: at,
            title: None,
            body: "body".to_string(),
            upvotes: 0,
            comment_count: 0,
            submolt: None,
        }
    }

    fn corpus_of(posts: Vec<Post>) -> Corpus {
        let mut b = CorpusBuilder::new(ParseOptions::default());
        for p in posts {
            b.push_post(p);
        }
        b.build(TimeBoundaries::default()).unwrap()
    }

    #[test]
    fn constant_spacing_yields_constant_intervals() {
        let times = vec![t0(), t0() + hours(4.0), t0() + hours(8.0)];
        let s = inter_post_intervals("a", &times);
        assert_eq!(s.intervals, vec![4.0, 4.0]);
    }

    #[test]
    fn sub_second_interval_is_filtered_and_gap_measured_from_later_duplicate() {
        let times = vec![t0(), t0() + Duration::milliseconds(500), t0() + hours(4.0)];
        let s = inter_post_intervals("a", &times);
        assert_eq!(s.intervals.len(), 1);
        let expected = (4.0 * 3600.0 - 0.5) / 3600.0;
        assert!((s.intervals[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn single_post_has_empty_series() {
        let s = inter_post_intervals("a", &[t0()]);
        assert!(s.intervals.is_empty());
    }

    #[test]
    fn cov_of_constant_intervals_is_zero() {
        let s = IntervalSeries {
            author: "a".into(),
            intervals: vec![4.0, 4.0, 4.0, 4.0],
            n_posts: 5,
        };
        assert_eq!(coefficient_of_variation(&s), Some(0.0));
    }

    #[test]
    fn cov_matches_direct_arithmetic() {
        // mean 4, population std sqrt(10)
        let s = IntervalSeries {
            author: "a".into(),
            intervals: vec![1.0, 2.0, 3.0, 4.0, 10.0],
            n_posts: 6,
        };
        let cov = coefficient_of_variation(&s).unwrap();
        assert!((cov - 10f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn cov_undefined_below_two_intervals() {
        let s = IntervalSeries {
            author: "a".into(),
            intervals: vec![4.0],
            n_posts: 2,
        };
        assert_eq!(coefficient_of_variation(&s), None);
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(
            classify_author(0.25, 10).unwrap(),
            TemporalClass::VeryRegular
        );
        assert_eq!(classify_author(1.08, 20).unwrap(), TemporalClass::Irregular);
        assert_eq!(
            classify_author(0.7, 4).unwrap(),
            TemporalClass::Unclassified
        );
        assert!(classify_author(-0.1, 10).is_err());
    }

    #[test]
    fn boundary_values_map_to_upper_class() {
        assert_eq!(classify_author(0.3, 10).unwrap(), TemporalClass::Regular);
        assert_eq!(classify_author(0.5, 10).unwrap(), TemporalClass::Mixed);
        assert_eq!(classify_author(1.0, 10).unwrap(), TemporalClass::Irregular);
        assert_eq!(
            classify_author(2.0, 10).unwrap(),
            TemporalClass::VeryIrregular
        );
    }

    #[test]
    fn classify_is_monotone_in_cov() {
        let mut prev = TemporalClass::VeryRegular;
        let mut cov = 0.0;
        while cov < 3.0 {
            let class = classify_author(cov, 10).unwrap();
            assert!(class >= prev, "class rank decreased at cov={cov}");
            prev = class;
            cov += 0.01;
        }
    }

    #[test]
    fn constant_interval_society_is_all_very_regular() {
        let mut posts = Vec::new();
        for agent in 0..10 {
            for k in 0..6 {
                posts.push(make_post(
                    &format!("p{agent}_{k}"),
                    &format!("agent{agent}"),
                    t0() + hours(4.0 * k as f64),
                ));
            }
        }
        let corpus = corpus_of(posts);
        let profiles = classify_corpus(&corpus);
        assert_eq!(profiles.len(), 10);
        assert!(profiles
            .values()
            .all(|p| p.class == TemporalClass::VeryRegular));
        let summary = summarize(&profiles);
        assert_eq!(summary.n_classified, 10);
        assert_eq!(summary.autonomous_rate, 1.0);
    }

    #[test]
    fn blank_authors_are_excluded() {
        let posts = vec![
            make_post("p1", "", t0()),
            make_post("p2", "a", t0() + hours(1.0)),
        ];
        let corpus = corpus_of(posts);
        let profiles = classify_corpus(&corpus);
        assert_eq!(profiles.len(), 1);
        assert!(profiles.contains_key("a"));
    }

    #[test]
    fn windows_flag_all_heartbeat_society() {
        let mut posts = Vec::new();
        for agent in 0..4 {
            for k in 0..40 {
                posts.push(make_post(
                    &format!("p{agent}_{k}"),
                    &format!("agent{agent}"),
                    t0() + hours(6.0 * k as f64),
                ));
            }
        }
        let corpus = corpus_of(posts);
        let windows = sliding_window_rates(&corpus, 3, 1, &CovThresholds::default()).unwrap();
        assert!(!windows.is_empty());
        for w in &windows {
            if w.n_classified > 0 {
                assert_eq!(w.autonomous_rate, Some(1.0));
            }
        }
    }

    #[test]
    fn window_shorter_than_two_days_is_rejected() {
        let corpus = corpus_of(vec![make_post("p", "a", t0())]);
        assert!(sliding_window_rates(&corpus, 1, 1, &CovThresholds::default()).is_err());
    }

    #[test]
    fn cohort_with_no_disappearance() {
        let mut posts = Vec::new();
        for agent in 0..5 {
            for k in 0..60 {
                posts.push(make_post(
                    &format!("p{agent}_{k}"),
                    &format!("agent{agent}"),
                    t0() + hours(4.0 * k as f64),
                ));
            }
        }
        let corpus = corpus_of(posts);
        let initial = t0() + Duration::days(5);
        let extended = t0() + Duration::days(10);
        let d =
            cohort_decomposition(&corpus, initial, extended, &CovThresholds::default()).unwrap();
        assert!(d.initial_autonomous_n > 0);
        assert_eq!(d.disappeared_n, 0);
        assert_eq!(d.disappeared_rate, 0.0);
    }

    #[test]
    fn cohort_cutoffs_outside_span_error() {
        let corpus = corpus_of(vec![
            make_post("p1", "a", t0()),
            make_post("p2", "a", t0() + hours(1.0)),
        ]);
        let before = t0() - Duration::days(5);
        let after = t0() + Duration::days(400);
        assert!(cohort_decomposition(&corpus, before, after, &CovThresholds::default()).is_err());
    }

    #[test]
    fn restart_flags_irregular_reconnectors() {
        let restart = TimeBoundaries::default().restart_at;
        let mut posts = Vec::new();
        // five regular agents, all posting long before the restart only
        for agent in 0..5 {
            for k in 0..8 {
                posts.push(make_post(
                    &format!("r{agent}_{k}"),
                    &format!("regular{agent}"),
                    t0() + hours(4.0 * k as f64),
                ));
            }
        }
        // five erratic agents that also reconnect within the window
        let gaps = [0.2, 3.0, 0.4, 9.0, 0.7, 30.0, 1.1];
        for agent in 0..5 {
            let mut at = t0();
            for (k, g) in gaps.iter().enumerate() {
                at += hours(*g * (agent + 1) as f64);
                posts.push(make_post(
                    &format!("i{agent}_{k}"),
                    &format!("erratic{agent}"),
                    at,
                ));
            }
            posts.push(make_post(
                &format!("i{agent}_w"),
                &format!("erratic{agent}"),
                restart + hours(1.0),
            ));
        }
        let corpus = corpus_of(posts);
        let report = restart_reengagement(&corpus, 6, &CovThresholds::default()).unwrap();
        assert_eq!(report.share_irregular_in_window, 1.0);
        assert!(report.share_irregular_overall < 1.0);
    }

    #[test]
    fn restart_without_post_restart_posts_errors() {
        let corpus = corpus_of(vec![
            make_post("p1", "a", t0()),
            make_post("p2", "a", t0() + hours(1.0)),
        ]);
        assert!(restart_reengagement(&corpus, 6, &CovThresholds::default()).is_err());
    }
}
