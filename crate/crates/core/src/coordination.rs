//! Bot-farm detection: comment volume concentration, shared-post timing
//! gaps, daily concentration, targeting profiles, intra-author burst
//! signatures, and embedding homogeneity over ingested vectors.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Comment, Corpus};
use crate::error::{Error, Result};

/// Distribution of timing gaps in seconds.
#[derive(Debug, Clone, Serialize)]
pub struct GapDistribution {
    pub n: usize,
    pub median: f64,
    pub iqr_low: f64,
    pub iqr_high: f64,
    pub share_under_60s: f64,
    pub share_under_15s: f64,
    /// Most frequent gap rounded to whole seconds.
    pub modal_gap: f64,
}

impl GapDistribution {
    /// Summarize a non-empty set of gaps.
    pub fn from_gaps(mut gaps: Vec<f64>) -> Option<GapDistribution> {
        if gaps.is_empty() {
            return None;
        }
        gaps.sort_by(f64::total_cmp);
        let n = gaps.len();
        let under_60 = gaps.iter().filter(|g| **g < 60.0).count();
        let under_15 = gaps.iter().filter(|g| **g < 15.0).count();
        let mut mode_counts: BTreeMap<i64, usize> = BTreeMap::new();
        for g in &gaps {
            *mode_counts.entry(g.round() as i64).or_insert(0) += 1;
        }
        let modal_gap = mode_counts
            .iter()
            .max_by_key(|(gap, count)| (**count, -**gap))
            .map(|(gap, _)| *gap as f64)
            .unwrap_or(0.0);
        Some(GapDistribution {
            n,
            median: quantile(&gaps, 0.5),
            iqr_low: quantile(&gaps, 0.25),
            iqr_high: quantile(&gaps, 0.75),
            share_under_60s: under_60 as f64 / n as f64,
            share_under_15s: under_15 as f64 / n as f64,
            modal_gap,
        })
    }
}

/// Linear-interpolation quantile over a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

fn gap_seconds(a: &Comment, b: &Comment) -> f64 {
    ((b.created_at - a.created_at).num_milliseconds() as f64 / 1000.0).abs()
}

/// One ranked commenter.
#[derive(Debug, Clone, Serialize)]
pub struct CommenterRank {
    pub author: String,
    pub count: usize,
    /// Share of all comments in the corpus (anonymous included in the
    /// denominator).
    pub share: f64,
}

/// Top-k commenters by volume; blank authors excluded from the ranking.
pub fn top_commenters(corpus: &Corpus, k: usize) -> Result<Vec<CommenterRank>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let total = corpus.comments().len();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in corpus.comments() {
        if c.author.is_empty() {
            continue;
        }
        *counts.entry(c.author.as_str()).or_insert(0) += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(author, count)| CommenterRank {
            author: author.to_string(),
            count,
            share: if total > 0 {
                count as f64 / total as f64
            } else {
                0.0
            },
        })
        .collect())
}

/// Shared-post timing-gap analysis across a set of monitored accounts.
#[derive(Debug, Clone, Serialize)]
pub struct SharedPostGaps {
    pub n_shared_posts: usize,
    pub n_gaps: usize,
    /// Absent (flagged) when the accounts share no posts.
    pub distribution: Option<GapDistribution>,
}

/// All pairwise timing gaps between comments from distinct monitored
/// accounts on the same post. Grouping is by `post_id`, so orphaned
/// comments still participate; pure timing needs no post resolution.
pub fn shared_post_gaps(corpus: &Corpus, accounts: &[String]) -> Result<SharedPostGaps> {
    if accounts.len() < 2 {
        return Err(Error::InvalidInput(
            "shared_post_gaps needs at least 2 accounts".into(),
        ));
    }
    let monitored: BTreeSet<&str> = accounts.iter().map(|s| s.as_str()).collect();
    let mut by_post: BTreeMap<&str, Vec<&Comment>> = BTreeMap::new();
    for c in corpus.comments() {
        if monitored.contains(c.author.as_str()) {
            by_post.entry(c.post_id.as_str()).or_default().push(c);
        }
    }
    let mut gaps = Vec::new();
    let mut n_shared_posts = 0usize;
    for comments in by_post.values() {
        let distinct: BTreeSet<&str> = comments.iter().map(|c| c.author.as_str()).collect();
        if distinct.len() < 2 {
            continue;
        }
        n_shared_posts += 1;
        for i in 0..comments.len() {
            for j in (i + 1)..comments.len() {
                if comments[i].author != comments[j].author {
                    gaps.push(gap_seconds(comments[i], comments[j]));
                }
            }
        }
    }
    Ok(SharedPostGaps {
        n_shared_posts,
        n_gaps: gaps.len(),
        distribution: GapDistribution::from_gaps(gaps),
    })
}

/// Daily activity concentration for a set of accounts.
#[derive(Debug, Clone, Serialize)]
pub struct DailyConcentration {
    pub per_day: BTreeMap<NaiveDate, usize>,
    pub total: usize,
    pub max_day: NaiveDate,
    pub max_day_count: usize,
    pub max_day_share: f64,
}

/// Histogram of comment counts by UTC date with the peak-day share.
pub fn daily_concentration(corpus: &Corpus, accounts: &[String]) -> Result<DailyConcentration> {
    let monitored: BTreeSet<&str> = accounts.iter().map(|s| s.as_str()).collect();
    let mut per_day: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for c in corpus.comments() {
        if monitored.contains(c.author.as_str()) {
            *per_day.entry(c.created_at.date_naive()).or_insert(0) += 1;
        }
    }
    let total: usize = per_day.values().sum();
    if total == 0 {
        return Err(Error::InsufficientData(
            "accounts have no comments in corpus".into(),
        ));
    }
    let (max_day, max_day_count) = per_day
        .iter()
        .max_by_key(|(day, count)| (**count, std::cmp::Reverse(**day)))
        .map(|(d, c)| (*d, *c))
        .unwrap();
    Ok(DailyConcentration {
        per_day,
        total,
        max_day,
        max_day_count,
        max_day_share: max_day_count as f64 / total as f64,
    })
}

/// Targeting behavior of one account against the baseline of all other
/// commenters.
#[derive(Debug, Clone, Serialize)]
pub struct TargetingProfile {
    pub n_targets: usize,
    pub share_low_karma_targets: f64,
    /// Seconds from post creation to the account's first comment on it.
    pub mean_response_latency_secs: f64,
    pub baseline_n_targets: usize,
    pub baseline_share_low_karma: f64,
    pub baseline_mean_latency_secs: f64,
    pub orphan_targets_skipped: usize,
}

/// Karma/latency targeting profile. Targets are distinct posts; latency
/// is measured on the first comment per (author, post). Final upvotes
/// proxy karma at comment time.
pub fn targeting_profile(
    corpus: &Corpus,
    account: &str,
    karma_threshold: u64,
) -> Result<TargetingProfile> {
    let mut own_first: BTreeMap<&str, &Comment> = BTreeMap::new();
    let mut other_first: BTreeMap<(&str, &str), &Comment> = BTreeMap::new();
    let mut orphans = 0usize;
    for c in corpus.comments() {
        if c.author.is_empty() {
            continue;
        }
        if c.orphaned {
            if c.author == account {
                orphans += 1;
            }
            continue;
        }
        if c.author == account {
            own_first.entry(c.post_id.as_str()).or_insert(c);
        } else {
            other_first
                .entry((c.author.as_str(), c.post_id.as_str()))
                .or_insert(c);
        }
    }
    if own_first.is_empty() {
        return Err(Error::InsufficientData(format!(
            "account {account:?} has no resolvable targets"
        )));
    }

    let mut low = 0usize;
    let mut latency_sum = 0.0;
    for (post_id, c) in &own_first {
        let post = corpus.post_by_id(post_id).expect("non-orphan target");
        if post.upvotes < karma_threshold {
            low += 1;
        }
        latency_sum += (c.created_at - post.created_at).num_milliseconds() as f64 / 1000.0;
    }

    let mut base_low = 0usize;
    let mut base_latency_sum = 0.0;
    let base_n = other_first.len();
    for ((_, post_id), c) in &other_first {
        let post = corpus.post_by_id(post_id).expect("non-orphan target");
        if post.upvotes < karma_threshold {
            base_low += 1;
        }
        base_latency_sum += (c.created_at - post.created_at).num_milliseconds() as f64 / 1000.0;
    }

    Ok(TargetingProfile {
        n_targets: own_first.len(),
        share_low_karma_targets: low as f64 / own_first.len() as f64,
        mean_response_latency_secs: latency_sum / own_first.len() as f64,
        baseline_n_targets: base_n,
        baseline_share_low_karma: if base_n > 0 {
            base_low as f64 / base_n as f64
        } else {
            0.0
        },
        baseline_mean_latency_secs: if base_n > 0 {
            base_latency_sum / base_n as f64
        } else {
            0.0
        },
        orphan_targets_skipped: orphans,
    })
}

/// Gaps between consecutive comments of one account. Sub-second gaps are
/// the signal here, so nothing is filtered.
pub fn intra_author_gaps(corpus: &Corpus, account: &str) -> Result<GapDistribution> {
    let mut own: Vec<&Comment> = corpus
        .comments()
        .iter()
        .filter(|c| c.author == account)
        .collect();
    own.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
    if own.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "account {account:?} has fewer than 2 comments"
        )));
    }
    let gaps: Vec<f64> = own.windows(2).map(|w| gap_seconds(w[0], w[1])).collect();
    Ok(GapDistribution::from_gaps(gaps).expect("at least one gap"))
}

// ---------------------------------------------------------------------------
// Embedding homogeneity
// ---------------------------------------------------------------------------

/// Sampling parameters for the homogeneity analysis.
#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityParams {
    pub pairs_per_author: usize,
    pub baseline_authors: usize,
    pub min_comments: usize,
    pub seed: u64,
}

impl Default for HomogeneityParams {
    fn default() -> Self {
        HomogeneityParams {
            pairs_per_author: 100,
            baseline_authors: 200,
            min_comments: 10,
            seed: 17,
        }
    }
}

/// Per-account similarity summary.
#[derive(Debug, Clone, Serialize)]
pub struct AccountSimilarity {
    pub n_vectors: usize,
    pub mean_cosine: f64,
}

/// Embedding homogeneity report.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingHomogeneity {
    pub per_account: BTreeMap<String, AccountSimilarity>,
    /// Accounts skipped for having too few embedded comments.
    pub skipped_accounts: Vec<String>,
    pub monitored_mean: f64,
    pub baseline_mean: f64,
    pub baseline_authors_used: usize,
    /// Cohen's d of monitored pair similarities vs baseline ones.
    pub cohens_d: f64,
    /// Mean cosine between comments of distinct monitored accounts.
    pub cross_account_means: BTreeMap<String, f64>,
    pub cross_mean: f64,
}

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        dot += *x as f64 * *y as f64;
        na += *x as f64 * *x as f64;
        nb += *y as f64 * *y as f64;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

fn derive_rng(seed: u64, tag: &str) -> ChaCha8Rng {
    // FNV-1a over the tag keeps per-account streams independent of
    // evaluation order.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn sample_intra_pairs(vectors: &[&Vec<f32>], pairs: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = vectors.len();
    let mut out = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.push(cosine(vectors[i], vectors[j]));
    }
    out
}

fn embedded_comment_vectors<'a>(corpus: &'a Corpus, author: &str) -> Vec<&'a Vec<f32>> {
    corpus
        .comments()
        .iter()
        .filter(|c| c.author == author)
        .filter_map(|c| corpus.embeddings().get(&c.id))
        .collect()
}

/// Mean sampled pairwise cosine similarity per monitored account,
/// compared against a seeded random baseline of qualifying authors.
pub fn embedding_homogeneity(
    corpus: &Corpus,
    accounts: &[String],
    params: &HomogeneityParams,
) -> Result<EmbeddingHomogeneity> {
    if corpus.embeddings().is_empty() {
        return Err(Error::InsufficientData("no embeddings ingested".into()));
    }
    if params.pairs_per_author == 0 {
        return Err(Error::InvalidInput("pairs_per_author must be >= 1".into()));
    }

    let mut per_account = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut monitored_sims: Vec<f64> = Vec::new();
    for account in accounts {
        let vectors = embedded_comment_vectors(corpus, account);
        if vectors.len() < params.min_comments.max(2) {
            skipped.push(account.clone());
            continue;
        }
        let mut rng = derive_rng(params.seed, account);
        let sims = sample_intra_pairs(&vectors, params.pairs_per_author, &mut rng);
        let mean = sims.iter().sum::<f64>() / sims.len() as f64;
        per_account.insert(
            account.clone(),
            AccountSimilarity {
                n_vectors: vectors.len(),
                mean_cosine: mean,
            },
        );
        monitored_sims.extend(sims);
    }
    if per_account.is_empty() {
        return Err(Error::InsufficientData(
            "no monitored account has enough embedded comments".into(),
        ));
    }

    // baseline: random qualifying authors, monitored accounts excluded
    let monitored_set: BTreeSet<&str> = accounts.iter().map(|s| s.as_str()).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in corpus.comments() {
        if c.author.is_empty() || monitored_set.contains(c.author.as_str()) {
            continue;
        }
        if corpus.embeddings().contains_key(&c.id) {
            *counts.entry(c.author.as_str()).or_insert(0) += 1;
        }
    }
    let mut candidates: Vec<&str> = counts
        .iter()
        .filter(|(_, n)| **n >= params.min_comments.max(2))
        .map(|(a, _)| *a)
        .collect();
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    candidates.shuffle(&mut master);
    candidates.truncate(params.baseline_authors);
    candidates.sort_unstable();

    let mut baseline_sims: Vec<f64> = Vec::new();
    for author in &candidates {
        let vectors = embedded_comment_vectors(corpus, author);
        let mut rng = derive_rng(params.seed, author);
        baseline_sims.extend(sample_intra_pairs(
            &vectors,
            params.pairs_per_author,
            &mut rng,
        ));
    }

    let monitored_mean = monitored_sims.iter().sum::<f64>() / monitored_sims.len() as f64;
    let baseline_mean = if baseline_sims.is_empty() {
        0.0
    } else {
        baseline_sims.iter().sum::<f64>() / baseline_sims.len() as f64
    };
    let cohens_d = if baseline_sims.len() >= 2 && monitored_sims.len() >= 2 {
        let ss = |xs: &[f64], m: f64| xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
        let pooled = ((ss(&monitored_sims, monitored_mean) + ss(&baseline_sims, baseline_mean))
            / (monitored_sims.len() + baseline_sims.len() - 2) as f64)
            .sqrt();
        if pooled > 0.0 {
            (monitored_mean - baseline_mean) / pooled
        } else {
            0.0
        }
    } else {
        0.0
    };

    // cross-account similarity between monitored pairs
    let mut cross_account_means = BTreeMap::new();
    let mut cross_all: Vec<f64> = Vec::new();
    let monitored_with_vectors: Vec<&String> = accounts
        .iter()
        .filter(|a| per_account.contains_key(*a))
        .collect();
    for i in 0..monitored_with_vectors.len() {
        for j in (i + 1)..monitored_with_vectors.len() {
            let (a, b) = (monitored_with_vectors[i], monitored_with_vectors[j]);
            let va = embedded_comment_vectors(corpus, a);
            let vb = embedded_comment_vectors(corpus, b);
            let mut rng = derive_rng(params.seed, &format!("{a}|{b}"));
            let mut sims = Vec::with_capacity(params.pairs_per_author);
            for _ in 0..params.pairs_per_author {
                let x = va[rng.gen_range(0..va.len())];
                let y = vb[rng.gen_range(0..vb.len())];
                sims.push(cosine(x, y));
            }
            let mean = sims.iter().sum::<f64>() / sims.len() as f64;
            cross_account_means.insert(format!("{a}|{b}"), mean);
            cross_all.extend(sims);
        }
    }
    let cross_mean = if cross_all.is_empty() {
        0.0
    } else {
        cross_all.iter().sum::<f64>() / cross_all.len() as f64
    };

    Ok(EmbeddingHomogeneity {
        per_account,
        skipped_accounts: skipped,
        monitored_mean,
        baseline_mean,
        baseline_authors_used: candidates.len(),
        cohens_d,
        cross_account_means,
        cross_mean,
    })
}

/// Bundled farm report for a fixed account set.
#[derive(Debug, Clone, Serialize)]
pub struct CoordinationReport {
    pub accounts: Vec<String>,
    pub volumes: Vec<CommenterRank>,
    pub combined_share: f64,
    pub shared_gaps: SharedPostGaps,
    pub daily: DailyConcentration,
    pub targeting: BTreeMap<String, TargetingProfile>,
    pub intra_gaps: BTreeMap<String, GapDistribution>,
    pub embeddings: Option<EmbeddingHomogeneity>,
}

/// Run the full coordination battery on a set of suspect accounts.
pub fn farm_report(
    corpus: &Corpus,
    accounts: &[String],
    karma_threshold: u64,
    homogeneity: &HomogeneityParams,
) -> Result<CoordinationReport> {
    let total = corpus.comments().len();
    let mut volumes = Vec::new();
    for account in accounts {
        let count = corpus
            .comments()
            .iter()
            .filter(|c| c.author == *account)
            .count();
        volumes.push(CommenterRank {
            author: account.clone(),
            count,
            share: if total > 0 {
                count as f64 / total as f64
            } else {
                0.0
            },
        });
    }
    let combined: usize = volumes.iter().map(|v| v.count).sum();
    let mut targeting = BTreeMap::new();
    let mut intra = BTreeMap::new();
    for account in accounts {
        if let Ok(t) = targeting_profile(corpus, account, karma_threshold) {
            targeting.insert(account.clone(), t);
        }
        if let Ok(g) = intra_author_gaps(corpus, account) {
            intra.insert(account.clone(), g);
        }
    }
    Ok(CoordinationReport {
        accounts: accounts.to_vec(),
        volumes,
        combined_share: if total > 0 {
            combined as f64 / total as f64
        } else {
            0.0
        },
        shared_gaps: shared_post_gaps(corpus, accounts)?,
        daily: daily_concentration(corpus, accounts)?,
        targeting,
        intra_gaps: intra,
        embeddings: embedding_homogeneity(corpus, accounts, homogeneity).ok(),
    })
}
