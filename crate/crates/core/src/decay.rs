//! Echo decay: how content characteristics fall off through reply
//! chains, per seed class of the thread root.
//!
//! Thread depth counts from the root post (depth 0); a comment sits at
//! its path depth plus one, so a direct reply is depth 1. The decay
//! model is y(d) = a * exp(-lambda * d) + c fitted by weighted least
//! squares: a coarse log-spaced grid over lambda with a closed-form
//! linear solve for (a, c) at each candidate, then golden-section
//! refinement of lambda.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{word_count, Corpus};
use crate::error::{Error, Result};
use crate::influence::{heuristic_features, HeuristicConfig, Strength};
use crate::stats::{self, special, TestResult};
use crate::tempo::AuthorTemporalProfile;

/// Which population seeded the thread root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SeedClass {
    /// Root author CoV > 1.0.
    HumanSeeded,
    /// Root author CoV < 0.5.
    Autonomous,
}

/// Mean word count at one depth level.
#[derive(Debug, Clone, Serialize)]
pub struct DepthPoint {
    pub depth: u32,
    pub mean_word_count: f64,
    pub n_items: usize,
}

/// Depth profile for one seed class.
#[derive(Debug, Clone, Serialize)]
pub struct DepthProfile {
    pub seed_class: SeedClass,
    pub points: Vec<DepthPoint>,
    pub n_threads: usize,
}

/// Output of the thread aggregation.
#[derive(Debug, Clone, Serialize)]
pub struct DepthProfiles {
    pub human: DepthProfile,
    pub autonomous: DepthProfile,
    /// All threads reaching the minimum depth, regardless of seed class.
    pub n_threads: usize,
    /// Depths beyond this level were pooled into it (99th percentile of
    /// thread depth).
    pub pooled_depth: u32,
    /// Item-level observations (depth, word_count) per class, the fit
    /// input.
    pub human_observations: Vec<(u32, f64)>,
    pub autonomous_observations: Vec<(u32, f64)>,
}

fn percentile_u32(sorted: &[u32], q: f64) -> u32 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

fn points_from_observations(obs: &[(u32, f64)]) -> Vec<DepthPoint> {
    let mut per_depth: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for (d, wc) in obs {
        let e = per_depth.entry(*d).or_insert((0.0, 0));
        e.0 += wc;
        e.1 += 1;
    }
    per_depth
        .into_iter()
        .map(|(depth, (sum, n))| DepthPoint {
            depth,
            mean_word_count: sum / n as f64,
            n_items: n,
        })
        .collect()
}

/// Aggregate word counts by thread depth for threads whose conversation
/// reaches `min_depth`, split by the root author's seed class.
pub fn depth_profiles(
    corpus: &Corpus,
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
    min_depth: u32,
) -> Result<DepthProfiles> {
    // thread depth of each non-orphan comment, grouped by post
    let mut comments_by_post: BTreeMap<&str, Vec<(u32, f64)>> = BTreeMap::new();
    for c in corpus.comments() {
        if c.orphaned {
            continue;
        }
        let depth = corpus.depth_of(c)? + 1;
        comments_by_post
            .entry(c.post_id.as_str())
            .or_default()
            .push((depth, word_count(&c.body) as f64));
    }

    let mut qualifying: Vec<(&str, u32)> = Vec::new();
    for (post_id, items) in &comments_by_post {
        let max_depth = items.iter().map(|(d, _)| *d).max().unwrap_or(0);
        if max_depth >= min_depth {
            qualifying.push((post_id, max_depth));
        }
    }
    if qualifying.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no threads reach depth {min_depth}"
        )));
    }
    let mut max_depths: Vec<u32> = qualifying.iter().map(|(_, d)| *d).collect();
    max_depths.sort_unstable();
    let pooled_depth = percentile_u32(&max_depths, 0.99).max(min_depth);

    let seed_of = |author: &str| -> Option<SeedClass> {
        let profile = temporal_profiles.get(author)?;
        if profile.class.is_irregular() {
            Some(SeedClass::HumanSeeded)
        } else if profile.class.is_autonomous() {
            Some(SeedClass::Autonomous)
        } else {
            None
        }
    };

    let mut human_obs: Vec<(u32, f64)> = Vec::new();
    let mut auto_obs: Vec<(u32, f64)> = Vec::new();
    let mut human_threads = 0usize;
    let mut auto_threads = 0usize;
    for (post_id, _) in &qualifying {
        let post = corpus.post_by_id(post_id).expect("qualifying post exists");
        let Some(seed) = seed_of(&post.author) else {
            continue;
        };
        let sink = match seed {
            SeedClass::HumanSeeded => {
                human_threads += 1;
                &mut human_obs
            }
            SeedClass::Autonomous => {
                auto_threads += 1;
                &mut auto_obs
            }
        };
        sink.push((0, word_count(&post.body) as f64));
        for (depth, wc) in &comments_by_post[post_id] {
            sink.push(((*depth).min(pooled_depth), *wc));
        }
    }

    Ok(DepthProfiles {
        human: DepthProfile {
            seed_class: SeedClass::HumanSeeded,
            points: points_from_observations(&human_obs),
            n_threads: human_threads,
        },
        autonomous: DepthProfile {
            seed_class: SeedClass::Autonomous,
            points: points_from_observations(&auto_obs),
            n_threads: auto_threads,
        },
        n_threads: qualifying.len(),
        pooled_depth,
        human_observations: human_obs,
        autonomous_observations: auto_obs,
    })
}

// ---------------------------------------------------------------------------
// Exponential fitting
// ---------------------------------------------------------------------------

/// Fitted decay curve y(d) = a * exp(-lambda * d) + c.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub a: f64,
    pub lambda: f64,
    pub c: f64,
    /// ln(2) / lambda, in depths.
    pub half_life: f64,
    pub rss: f64,
    /// Set when the best fit drove the amplitude negative.
    pub negative_amplitude: bool,
}

/// Fit outcome: a curve, or a flagged flat fit when the data carries no
/// decay signal.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(DecayFit),
    Flat { level: f64, rss: f64 },
}

impl FitOutcome {
    pub fn fit(&self) -> Option<&DecayFit> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Flat { .. } => None,
        }
    }
}

/// Half-life in depths for a positive decay rate.
pub fn half_life(lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "half-life requires lambda > 0, got {lambda}"
        )));
    }
    Ok(std::f64::consts::LN_2 / lambda)
}

/// Weighted linear solve for (a, c) at fixed lambda, with c clamped to
/// be nonnegative. Returns (a, c, rss).
fn solve_linear(points: &[(f64, f64, f64)], lambda: f64) -> (f64, f64, f64) {
    let mut s_w = 0.0;
    let mut s_we = 0.0;
    let mut s_wee = 0.0;
    let mut s_wy = 0.0;
    let mut s_wye = 0.0;
    for &(d, y, w) in points {
        let e = (-lambda * d).exp();
        s_w += w;
        s_we += w * e;
        s_wee += w * e * e;
        s_wy += w * y;
        s_wye += w * y * e;
    }
    let det = s_wee * s_w - s_we * s_we;
    let (mut a, mut c) = if det.abs() > 1e-300 {
        (
            (s_wye * s_w - s_wy * s_we) / det,
            (s_wee * s_wy - s_we * s_wye) / det,
        )
    } else {
        (0.0, if s_w > 0.0 { s_wy / s_w } else { 0.0 })
    };
    if c < 0.0 {
        c = 0.0;
        a = if s_wee > 0.0 { s_wye / s_wee } else { 0.0 };
    }
    let rss: f64 = points
        .iter()
        .map(|&(d, y, w)| {
            let r = y - a * (-lambda * d).exp() - c;
            w * r * r
        })
        .sum();
    (a, c, rss)
}

const LAMBDA_LO: f64 = 0.01;
const LAMBDA_HI: f64 = 10.0;
const GRID_STEPS: usize = 200;
const BRACKET_TOL: f64 = 1e-4;

/// Fit y(d) = a * exp(-lambda * d) + c to weighted observations.
///
/// Requires at least three points spanning at least three distinct
/// depths. All-equal values return a flagged flat fit.
pub fn fit_exponential(points: &[(f64, f64, f64)]) -> Result<FitOutcome> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(
            "exponential fit needs at least 3 points".into(),
        ));
    }
    let mut depths: Vec<f64> = points.iter().map(|p| p.0).collect();
    depths.sort_by(f64::total_cmp);
    depths.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if depths.len() < 3 {
        return Err(Error::InsufficientData(
            "exponential fit needs at least 3 distinct depths".into(),
        ));
    }
    let first = points[0].1;
    if points.iter().all(|p| (p.1 - first).abs() < 1e-12) {
        return Ok(FitOutcome::Flat {
            level: first,
            rss: 0.0,
        });
    }

    // coarse log-spaced grid
    let ratio = (LAMBDA_HI / LAMBDA_LO).ln();
    let grid: Vec<f64> = (0..GRID_STEPS)
        .map(|i| LAMBDA_LO * (ratio * i as f64 / (GRID_STEPS - 1) as f64).exp())
        .collect();
    let mut best_idx = 0;
    let mut best_rss = f64::INFINITY;
    for (i, &lambda) in grid.iter().enumerate() {
        let (_, _, rss) = solve_linear(points, lambda);
        if rss < best_rss {
            best_rss = rss;
            best_idx = i;
        }
    }
    let grid_best_rss = best_rss;

    // golden-section refinement on the bracketing interval
    let mut lo = grid[best_idx.saturating_sub(1)];
    let mut hi = grid[(best_idx + 1).min(GRID_STEPS - 1)];
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = solve_linear(points, x1).2;
    let mut f2 = solve_linear(points, x2).2;
    while hi - lo > BRACKET_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = solve_linear(points, x1).2;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = solve_linear(points, x2).2;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let (a, c, rss) = solve_linear(points, lambda);
    // the refinement never loses to the coarse grid
    let (lambda, a, c, rss) = if rss <= grid_best_rss {
        (lambda, a, c, rss)
    } else {
        let g = grid[best_idx];
        let (ga, gc, grss) = solve_linear(points, g);
        (g, ga, gc, grss)
    };

    Ok(FitOutcome::Fitted(DecayFit {
        a,
        lambda,
        c,
        half_life: std::f64::consts::LN_2 / lambda,
        rss,
        negative_amplitude: a < 0.0,
    }))
}

/// Decay fits for both seed classes over item-level observations.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub profiles: DepthProfiles,
    pub human_fit: Option<FitOutcome>,
    pub autonomous_fit: Option<FitOutcome>,
}

pub fn decay_report(
    corpus: &Corpus,
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
    min_depth: u32,
) -> Result<DecayReport> {
    let profiles = depth_profiles(corpus, temporal_profiles, min_depth)?;
    let to_points = |obs: &[(u32, f64)]| -> Vec<(f64, f64, f64)> {
        obs.iter().map(|(d, y)| (*d as f64, *y, 1.0)).collect()
    };
    let human_fit = fit_exponential(&to_points(&profiles.human_observations)).ok();
    let autonomous_fit = fit_exponential(&to_points(&profiles.autonomous_observations)).ok();
    Ok(DecayReport {
        profiles,
        human_fit,
        autonomous_fit,
    })
}

// ---------------------------------------------------------------------------
// Engagement comparison
// ---------------------------------------------------------------------------

/// Comment-count comparison between seed classes.
#[derive(Debug, Clone, Serialize)]
pub struct EngagementComparison {
    pub n_human: usize,
    pub n_autonomous: usize,
    pub mean_comments_human: f64,
    pub mean_comments_autonomous: f64,
    pub u: TestResult,
}

/// Mann-Whitney U on per-post comment counts, human-seeded vs autonomous
/// root authors.
pub fn engagement_comparison(
    corpus: &Corpus,
    temporal_profiles: &BTreeMap<String, AuthorTemporalProfile>,
) -> Result<EngagementComparison> {
    let mut human: Vec<f64> = Vec::new();
    let mut autonomous: Vec<f64> = Vec::new();
    for p in corpus.posts() {
        let Some(profile) = temporal_profiles.get(&p.author) else {
            continue;
        };
        if profile.class.is_irregular() {
            human.push(p.comment_count as f64);
        } else if profile.class.is_autonomous() {
            autonomous.push(p.comment_count as f64);
        }
    }
    if human.is_empty() || autonomous.is_empty() {
        return Err(Error::InsufficientData(
            "engagement comparison needs posts in both seed classes".into(),
        ));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(EngagementComparison {
        n_human: human.len(),
        n_autonomous: autonomous.len(),
        mean_comments_human: mean(&human),
        mean_comments_autonomous: mean(&autonomous),
        u: stats::mann_whitney_u(&human, &autonomous)?,
    })
}

// ---------------------------------------------------------------------------
// Promotional depth gradient
// ---------------------------------------------------------------------------

/// Promotional share at one depth.
#[derive(Debug, Clone, Serialize)]
pub struct PromoDepthPoint {
    pub depth: u32,
    pub share: f64,
    pub n_items: usize,
}

/// Promotional share by depth with an OLS trend.
#[derive(Debug, Clone, Serialize)]
pub struct PromoGradient {
    pub per_depth: Vec<PromoDepthPoint>,
    pub slope: f64,
    pub intercept: f64,
    /// Two-sided p for the slope; absent with fewer than 3 depth levels.
    pub p: Option<f64>,
}

/// Share of promotional-STRONG content at each thread depth (posts at
/// depth 0, comments at path depth + 1), with an ordinary least squares
/// slope over the per-depth shares.
pub fn promo_gradient(corpus: &Corpus, config: &HeuristicConfig) -> Result<PromoGradient> {
    let mut hits: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for p in corpus.posts() {
        let f = match corpus.annotations().get(&p.id) {
            Some(ann) => ann.merged_over(&heuristic_features(&p.full_text(), config)),
            None => heuristic_features(&p.full_text(), config),
        };
        let e = hits.entry(0).or_insert((0, 0));
        e.1 += 1;
        if f.eff_promotional() == Strength::Strong {
            e.0 += 1;
        }
    }
    for c in corpus.comments() {
        let depth = corpus.depth_of(c)? + 1;
        let f = heuristic_features(&c.body, config);
        let e = hits.entry(depth).or_insert((0, 0));
        e.1 += 1;
        if f.eff_promotional() == Strength::Strong {
            e.0 += 1;
        }
    }
    if hits.len() < 2 {
        return Err(Error::InsufficientData(
            "promotional gradient needs at least 2 depth levels".into(),
        ));
    }
    let per_depth: Vec<PromoDepthPoint> = hits
        .into_iter()
        .map(|(depth, (hit, n))| PromoDepthPoint {
            depth,
            share: hit as f64 / n as f64,
            n_items: n,
        })
        .collect();

    let n = per_depth.len() as f64;
    let mx = per_depth.iter().map(|p| p.depth as f64).sum::<f64>() / n;
    let my = per_depth.iter().map(|p| p.share).sum::<f64>() / n;
    let sxx: f64 = per_depth
        .iter()
        .map(|p| (p.depth as f64 - mx).powi(2))
        .sum();
    let sxy: f64 = per_depth
        .iter()
        .map(|p| (p.depth as f64 - mx) * (p.share - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let p = if per_depth.len() >= 3 {
        let rss: f64 = per_depth
            .iter()
            .map(|pt| {
                let r = pt.share - (intercept + slope * pt.depth as f64);
                r * r
            })
            .sum();
        let dof = n - 2.0;
        let se = (rss / dof / sxx).sqrt();
        if se > 0.0 {
            Some((2.0 * special::t_sf((slope / se).abs(), dof)).min(1.0))
        } else {
            Some(if slope == 0.0 { 1.0 } else { 0.0 })
        }
    } else {
        None
    };

    Ok(PromoGradient {
        per_depth,
        slope,
        intercept,
        p,
    })
}
