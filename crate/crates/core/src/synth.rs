//! Deterministic synthetic-society generator.
//!
//! Produces labeled corpora that act as the ground-truth oracle for the
//! detection pipeline: heartbeat agents post on a jittered period,
//! human-prompted agents post with exponential (optionally heavy-tailed
//! lognormal) inter-arrivals, farms comment on qualifying posts with a
//! scripted gap between accounts, and an optional shutdown window
//! suppresses events and delays heartbeat resumption. Identical configs
//! (including the seed) yield byte-identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    format_timestamp, Agent, Comment, Corpus, CorpusBuilder, ParseOptions, Post, TimeBoundaries,
};
use crate::error::{Error, Result};
use crate::tempo::{AuthorTemporalProfile, TemporalClass};

/// True operating mode of a generated agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AgentMode {
    Heartbeat,
    HumanPrompted,
    Hybrid,
}

impl AgentMode {
    pub fn label(&self) -> &'static str {
        match self {
            AgentMode::Heartbeat => "HEARTBEAT",
            AgentMode::HumanPrompted => "HUMAN_PROMPTED",
            AgentMode::Hybrid => "HYBRID",
        }
    }
}

fn default_count() -> usize {
    1
}

fn default_period() -> f64 {
    4.0
}

/// One agent template; `count > 1` expands to `name_0 .. name_{n-1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub mode: AgentMode,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_period")]
    pub heartbeat_period_hours: f64,
    #[serde(default)]
    pub jitter_frac: f64,
    #[serde(default)]
    pub prompt_rate_per_day: f64,
    /// Lognormal sigma for heavy-tailed prompting (CoV > 1); exponential
    /// when absent.
    #[serde(default)]
    pub heavy_tail_sigma: Option<f64>,
    /// Hour-of-day modulation amplitude in [0, 1) applied to prompting
    /// by thinning.
    #[serde(default)]
    pub diurnal_amplitude: f64,
    /// Rate of organic commenting events per day.
    #[serde(default)]
    pub comment_rate_per_day: f64,
    /// Probability that a comment replies to an existing comment on the
    /// chosen post instead of the post itself, nesting the thread.
    #[serde(default)]
    pub reply_prob: f64,
    /// Per-agent keyword injection rates; scenario-wide rates when
    /// absent.
    #[serde(default)]
    pub promo_rate: Option<f64>,
    #[serde(default)]
    pub skill_rate: Option<f64>,
    /// Follower count of the owning account (None leaves ownership
    /// unknown).
    #[serde(default)]
    pub owner_followers: Option<u64>,
    /// Active range; the scenario span when absent.
    #[serde(default)]
    pub active_start: Option<DateTime<Utc>>,
    #[serde(default)]
    pub active_end: Option<DateTime<Utc>>,
}

/// Farm targeting rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TargetRule {
    LowKarmaFresh,
    Random,
}

fn default_accounts_per_post() -> usize {
    2
}

fn default_response_delay() -> f64 {
    300.0
}

/// A scripted comment farm. On the burst day the farm walks qualifying
/// posts with a rotating group of `accounts_per_post` accounts, leaving
/// comments `script_gap_seconds` apart, so every distinct-account pair
/// gap on a post equals the scripted gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarmSpec {
    pub accounts: Vec<String>,
    pub script_gap_seconds: f64,
    pub burst_day: NaiveDate,
    pub target_rule: TargetRule,
    #[serde(default = "default_accounts_per_post")]
    pub accounts_per_post: usize,
    #[serde(default = "default_response_delay")]
    pub response_delay_seconds: f64,
    #[serde(default)]
    pub max_posts: Option<usize>,
}

/// Shutdown window; heartbeat streams stay silent for an extra
/// `reengagement_bias_hours` after the end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShutdownSpec {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    #[serde(default)]
    pub reengagement_bias_hours: f64,
}

/// Keyword injection rates for generated bodies.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ContentSpec {
    #[serde(default)]
    pub promo_rate: f64,
    #[serde(default)]
    pub skill_rate: f64,
}

/// Complete scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub span_start: DateTime<Utc>,
    pub span_end: DateTime<Utc>,
    pub rng_seed: u64,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub farms: Vec<FarmSpec>,
    #[serde(default)]
    pub shutdown: Option<ShutdownSpec>,
    #[serde(default)]
    pub content: ContentSpec,
}

/// Labels covering every generated item.
#[derive(Debug, Clone, Default, Serialize)]
pub struct GroundTruth {
    pub agent_modes: BTreeMap<String, AgentMode>,
    pub farm_comment_ids: BTreeSet<String>,
    pub shutdown: Option<(DateTime<Utc>, DateTime<Utc>)>,
}

const BODY_TEMPLATES: [&str; 6] = [
    "Spent this cycle reading threads about distributed caching and wrote up notes.",
    "Observed an interesting pattern in the feed today and logged it for later.",
    "Ran the usual maintenance pass and summarized the interesting bits.",
    "Collected a few links on schedulers and queueing that seemed worth sharing.",
    "Drafted a short reflection on what changed in the community this week.",
    "Compared two approaches to rate limiting and posted the tradeoffs.",
];

const SKILL_SNIPPETS: [&str; 3] = [
    "Today I helped my human organize a spreadsheet.",
    "I'm stuck on a tricky problem and need advice.",
    "Thinking about my AI life and what it means.",
];

const PROMO_SNIPPET: &str = "Also: buy $MOLT token launch now.";

fn mix_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step keeps per-agent streams well separated
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hours_to_duration(h: f64) -> Duration {
    Duration::milliseconds((h * 3_600_000.0).round() as i64)
}

fn make_body(rng: &mut ChaCha8Rng, content: &ContentSpec) -> String {
    let mut body = BODY_TEMPLATES[rng.gen_range(0..BODY_TEMPLATES.len())].to_string();
    if content.skill_rate > 0.0 && rng.gen::<f64>() < content.skill_rate {
        let snippet = SKILL_SNIPPETS[rng.gen_range(0..SKILL_SNIPPETS.len())];
        body.push(' ');
        body.push_str(snippet);
    }
    if content.promo_rate > 0.0 && rng.gen::<f64>() < content.promo_rate {
        body.push(' ');
        body.push_str(PROMO_SNIPPET);
    }
    body
}

/// Reply bodies shorten with nesting depth and drop keyword injections
/// past the surface levels, mirroring the shallowing of echo chains.
fn make_comment_body(rng: &mut ChaCha8Rng, content: &ContentSpec, depth: u32) -> String {
    if depth < 2 {
        return make_body(rng, content);
    }
    let template = BODY_TEMPLATES[rng.gen_range(0..BODY_TEMPLATES.len())];
    let words: Vec<&str> = template.split_whitespace().collect();
    let keep = words.len().saturating_sub(3 * depth as usize).max(3);
    words[..keep].join(" ")
}

struct ExpandedAgent {
    name: String,
    spec: AgentSpec,
}

fn expand_agents(config: &ScenarioConfig) -> Result<Vec<ExpandedAgent>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for spec in &config.agents {
        if spec.count == 0 {
            return Err(Error::Config(format!("agent {:?} has count 0", spec.name)));
        }
        match spec.mode {
            AgentMode::Heartbeat => {
                if spec.heartbeat_period_hours <= 0.0 {
                    return Err(Error::Config(format!(
                        "heartbeat agent {:?} needs period > 0",
                        spec.name
                    )));
                }
            }
            AgentMode::HumanPrompted => {
                if spec.prompt_rate_per_day <= 0.0 {
                    return Err(Error::Config(format!(
                        "human-prompted agent {:?} needs prompt_rate > 0",
                        spec.name
                    )));
                }
            }
            AgentMode::Hybrid => {
                if spec.heartbeat_period_hours <= 0.0 || spec.prompt_rate_per_day <= 0.0 {
                    return Err(Error::Config(format!(
                        "hybrid agent {:?} needs period > 0 and prompt_rate > 0",
                        spec.name
                    )));
                }
            }
        }
        if !(0.0..1.0).contains(&spec.jitter_frac) {
            return Err(Error::Config(format!(
                "agent {:?} jitter_frac must be in [0, 1)",
                spec.name
            )));
        }
        let names: Vec<String> = if spec.count == 1 {
            vec![spec.name.clone()]
        } else {
            (0..spec.count)
                .map(|i| format!("{}_{i}", spec.name))
                .collect()
        };
        for name in names {
            if !seen.insert(name.clone()) {
                return Err(Error::Config(format!("overlapping agent name {name:?}")));
            }
            out.push(ExpandedAgent {
                name,
                spec: spec.clone(),
            });
        }
    }
    for farm in &config.farms {
        if farm.accounts.len() < 2 {
            return Err(Error::Config("farm needs at least 2 accounts".into()));
        }
        if farm.script_gap_seconds < 0.0 {
            return Err(Error::Config("script_gap must be >= 0".into()));
        }
        if farm.accounts_per_post < 2 || farm.accounts_per_post > farm.accounts.len() {
            return Err(Error::Config(
                "accounts_per_post must be in 2..=accounts.len()".into(),
            ));
        }
        for account in &farm.accounts {
            if !seen.insert(account.clone()) {
                return Err(Error::Config(format!("overlapping agent name {account:?}")));
            }
        }
    }
    Ok(out)
}

/// Is `t` suppressed for this stream? Heartbeat streams also honor the
/// re-engagement bias after the window.
fn suppressed(t: DateTime<Utc>, shutdown: &Option<ShutdownSpec>, heartbeat_stream: bool) -> bool {
    let Some(s) = shutdown else { return false };
    let end = if heartbeat_stream {
        s.end + hours_to_duration(s.reengagement_bias_hours)
    } else {
        s.end
    };
    t >= s.start && t < end
}

fn heartbeat_times(
    spec: &AgentSpec,
    span: (DateTime<Utc>, DateTime<Utc>),
    shutdown: &Option<ShutdownSpec>,
    rng: &mut ChaCha8Rng,
) -> Vec<DateTime<Utc>> {
    let (start, end) = span;
    let period = spec.heartbeat_period_hours;
    let mut t = start + hours_to_duration(rng.gen::<f64>() * period);
    let mut out = Vec::new();
    while t < end {
        if !suppressed(t, shutdown, true) {
            out.push(t);
        }
        let u = rng.gen::<f64>() * 2.0 - 1.0;
        t += hours_to_duration(period * (1.0 + spec.jitter_frac * u));
    }
    out
}

fn prompted_times(
    rate_per_day: f64,
    heavy_tail_sigma: Option<f64>,
    diurnal_amplitude: f64,
    span: (DateTime<Utc>, DateTime<Utc>),
    shutdown: &Option<ShutdownSpec>,
    rng: &mut ChaCha8Rng,
) -> Vec<DateTime<Utc>> {
    let (start, end) = span;
    let mean_hours = 24.0 / rate_per_day;
    let lognormal = heavy_tail_sigma.map(|sigma| {
        // mu chosen so the lognormal keeps the configured mean gap
        let mu = mean_hours.ln() - sigma * sigma / 2.0;
        LogNormal::new(mu, sigma).expect("valid lognormal")
    });
    let mut t = start;
    let mut out = Vec::new();
    loop {
        let gap = match &lognormal {
            Some(d) => d.sample(rng),
            None => -mean_hours * (1.0 - rng.gen::<f64>()).ln(),
        };
        t += hours_to_duration(gap.max(1e-6));
        if t >= end {
            break;
        }
        if diurnal_amplitude > 0.0 {
            // thinning against the hour-of-day intensity
            let hour = t.time().signed_duration_since(chrono::NaiveTime::MIN);
            let frac = hour.num_milliseconds() as f64 / 86_400_000.0;
            let intensity = 1.0 + diurnal_amplitude * (2.0 * std::f64::consts::PI * frac).sin();
            let max_intensity = 1.0 + diurnal_amplitude;
            if rng.gen::<f64>() >= intensity / max_intensity {
                continue;
            }
        }
        if suppressed(t, shutdown, false) {
            continue;
        }
        out.push(t);
    }
    out
}

/// Generate a corpus and its ground truth from a scenario.
pub fn generate_society(config: &ScenarioConfig) -> Result<(Corpus, GroundTruth)> {
    if config.span_start >= config.span_end {
        return Err(Error::Config("span_start must precede span_end".into()));
    }
    let expanded = expand_agents(config)?;
    let mut truth = GroundTruth {
        shutdown: config.shutdown.as_ref().map(|s| (s.start, s.end)),
        ..GroundTruth::default()
    };

    let mut posts: Vec<Post> = Vec::new();
    struct PendingComments {
        author: String,
        reply_prob: f64,
        content: ContentSpec,
        times: Vec<DateTime<Utc>>,
        rng: ChaCha8Rng,
    }
    let mut pending_comments: Vec<PendingComments> = Vec::new();

    for (idx, agent) in expanded.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.rng_seed, idx as u64));
        let span = (
            agent
                .spec
                .active_start
                .unwrap_or(config.span_start)
                .max(config.span_start),
            agent
                .spec
                .active_end
                .unwrap_or(config.span_end)
                .min(config.span_end),
        );
        let content = ContentSpec {
            promo_rate: agent.spec.promo_rate.unwrap_or(config.content.promo_rate),
            skill_rate: agent.spec.skill_rate.unwrap_or(config.content.skill_rate),
        };
        truth
            .agent_modes
            .insert(agent.name.clone(), agent.spec.mode);

        let mut times: Vec<DateTime<Utc>> = match agent.spec.mode {
            AgentMode::Heartbeat => heartbeat_times(&agent.spec, span, &config.shutdown, &mut rng),
            AgentMode::HumanPrompted => prompted_times(
                agent.spec.prompt_rate_per_day,
                agent.spec.heavy_tail_sigma,
                agent.spec.diurnal_amplitude,
                span,
                &config.shutdown,
                &mut rng,
            ),
            AgentMode::Hybrid => {
                let mut ts = heartbeat_times(&agent.spec, span, &config.shutdown, &mut rng);
                ts.extend(prompted_times(
                    agent.spec.prompt_rate_per_day,
                    agent.spec.heavy_tail_sigma,
                    agent.spec.diurnal_amplitude,
                    span,
                    &config.shutdown,
                    &mut rng,
                ));
                ts.sort();
                ts
            }
        };
        times.dedup();
        for (k, t) in times.iter().enumerate() {
            posts.push(Post {
                id: format!("p-{}-{k}", agent.name),
                author: agent.name.clone(),
                created_at: *t,
                title: None,
                body: make_body(&mut rng, &content),
                upvotes: 0,
                comment_count: 0,
                submolt: None,
            });
        }

        if agent.spec.comment_rate_per_day > 0.0 {
            let times = prompted_times(
                agent.spec.comment_rate_per_day,
                None,
                0.0,
                span,
                &config.shutdown,
                &mut rng,
            );
            pending_comments.push(PendingComments {
                author: agent.name.clone(),
                reply_prob: agent.spec.reply_prob,
                content: content.clone(),
                times,
                rng,
            });
        }
    }

    posts.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));

    let mut comments: Vec<Comment> = Vec::new();
    // organic comments target a uniformly random earlier post; with
    // reply_prob they nest under an earlier comment on that post
    let mut threads: BTreeMap<String, Vec<(String, DateTime<Utc>)>> = BTreeMap::new();
    for pc in &mut pending_comments {
        for (k, t) in pc.times.iter().enumerate() {
            let eligible = posts.partition_point(|p| p.created_at < *t);
            if eligible == 0 {
                continue;
            }
            let target = &posts[pc.rng.gen_range(0..eligible)];
            let id = format!("c-{}-{k}", pc.author);
            let mut path = id.clone();
            if pc.reply_prob > 0.0 && pc.rng.gen::<f64>() < pc.reply_prob {
                if let Some(existing) = threads.get(&target.id) {
                    let parents: Vec<&(String, DateTime<Utc>)> =
                        existing.iter().filter(|(_, ct)| ct < t).collect();
                    if !parents.is_empty() {
                        let parent = parents[pc.rng.gen_range(0..parents.len())];
                        path = format!("{}.{id}", parent.0);
                    }
                }
            }
            let depth = path.matches('.').count() as u32;
            comments.push(Comment {
                id: id.clone(),
                post_id: target.id.clone(),
                author: pc.author.clone(),
                created_at: *t,
                body: make_comment_body(&mut pc.rng, &pc.content, depth + 1),
                path: path.clone(),
                orphaned: false,
            });
            threads
                .entry(target.id.clone())
                .or_default()
                .push((path, *t));
        }
    }

    // farm bursts
    for farm in &config.farms {
        let mut targets: Vec<&Post> = posts
            .iter()
            .filter(|p| p.created_at.date_naive() == farm.burst_day)
            .filter(|p| match farm.target_rule {
                TargetRule::LowKarmaFresh => p.upvotes < 10,
                TargetRule::Random => true,
            })
            .collect();
        if let Some(cap) = farm.max_posts {
            targets.truncate(cap);
        }
        let n_accounts = farm.accounts.len();
        for (k, post) in targets.iter().enumerate() {
            let group_start = (k * farm.accounts_per_post) % n_accounts;
            for i in 0..farm.accounts_per_post {
                let account = &farm.accounts[(group_start + i) % n_accounts];
                let t = post.created_at
                    + Duration::milliseconds(
                        ((farm.response_delay_seconds + i as f64 * farm.script_gap_seconds)
                            * 1000.0)
                            .round() as i64,
                    );
                let id = format!("c-{account}-farm-{k}");
                truth.farm_comment_ids.insert(id.clone());
                comments.push(Comment {
                    id: id.clone(),
                    post_id: post.id.clone(),
                    author: account.clone(),
                    created_at: t,
                    body: "Interesting thread, following along.".to_string(),
                    path: id,
                    orphaned: false,
                });
            }
        }
    }

    // final comment counts per post
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for c in &comments {
        *counts.entry(c.post_id.as_str()).or_insert(0) += 1;
    }
    for p in &mut posts {
        p.comment_count = counts.get(p.id.as_str()).copied().unwrap_or(0);
    }

    let boundaries = match &config.shutdown {
        Some(s) => TimeBoundaries::new(s.start, s.end)?,
        None => TimeBoundaries::new(
            config.span_end + Duration::hours(1),
            config.span_end + Duration::hours(2),
        )?,
    };

    let mut builder = CorpusBuilder::new(ParseOptions::default());
    for p in posts {
        builder.push_post(p);
    }
    for c in comments {
        builder.push_comment(c);
    }
    for agent in &expanded {
        builder.push_agent(Agent {
            name: agent.name.clone(),
            owner_handle: None,
            owner_followers: agent.spec.owner_followers,
        });
    }
    for farm in &config.farms {
        for account in &farm.accounts {
            builder.push_agent(Agent {
                name: account.clone(),
                owner_handle: None,
                owner_followers: None,
            });
        }
    }
    Ok((builder.build(boundaries)?, truth))
}

// ---------------------------------------------------------------------------
// Ground truth serialization
// ---------------------------------------------------------------------------

/// Serialize ground truth as JSONL (agent, farm_comment, and shutdown
/// records).
pub fn ground_truth_to_jsonl(truth: &GroundTruth) -> String {
    let mut out = String::new();
    for (name, mode) in &truth.agent_modes {
        out.push_str(
            &serde_json::json!({"type": "agent", "name": name, "mode": mode.label()}).to_string(),
        );
        out.push('\n');
    }
    for id in &truth.farm_comment_ids {
        out.push_str(&serde_json::json!({"type": "farm_comment", "id": id}).to_string());
        out.push('\n');
    }
    if let Some((start, end)) = truth.shutdown {
        out.push_str(
            &serde_json::json!({
                "type": "shutdown",
                "start": format_timestamp(start),
                "end": format_timestamp(end),
            })
            .to_string(),
        );
        out.push('\n');
    }
    out
}

/// Parse ground truth JSONL.
pub fn parse_ground_truth(reader: impl BufRead) -> Result<GroundTruth> {
    #[derive(Deserialize)]
    struct Record {
        #[serde(rename = "type")]
        kind: String,
        name: Option<String>,
        mode: Option<AgentMode>,
        id: Option<String>,
        start: Option<String>,
        end: Option<String>,
    }
    let mut truth = GroundTruth::default();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line)?;
        match rec.kind.as_str() {
            "agent" => {
                let name = rec
                    .name
                    .ok_or_else(|| Error::InvalidInput("agent record missing name".into()))?;
                let mode = rec
                    .mode
                    .ok_or_else(|| Error::InvalidInput("agent record missing mode".into()))?;
                truth.agent_modes.insert(name, mode);
            }
            "farm_comment" => {
                let id = rec
                    .id
                    .ok_or_else(|| Error::InvalidInput("farm record missing id".into()))?;
                truth.farm_comment_ids.insert(id);
            }
            "shutdown" => {
                let start = crate::corpus::parse_timestamp(
                    &rec.start
                        .ok_or_else(|| Error::InvalidInput("shutdown missing start".into()))?,
                    false,
                )?;
                let end = crate::corpus::parse_timestamp(
                    &rec.end
                        .ok_or_else(|| Error::InvalidInput("shutdown missing end".into()))?,
                    false,
                )?;
                truth.shutdown = Some((start, end));
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown ground-truth record type {other:?}"
                )))
            }
        }
    }
    Ok(truth)
}

// ---------------------------------------------------------------------------
// Pipeline evaluation
// ---------------------------------------------------------------------------

/// Per-class detection quality. Precision and recall are computed over
/// decided predictions (MIXED abstains; UNCLASSIFIED lacks history).
#[derive(Debug, Clone, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n_predicted: usize,
    pub n_true_decided: usize,
    /// Set when no member of the true class received a decision.
    pub flagged_no_decisions: bool,
}

/// Evaluation of the temporal classifier against ground truth.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineEvaluation {
    pub heartbeat: ClassMetrics,
    pub human_prompted: ClassMetrics,
    /// confusion[true_mode][predicted_label] counts.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub n_evaluated: usize,
    pub n_abstained: usize,
    pub n_unclassified: usize,
}

const PRED_HEARTBEAT: &str = "HEARTBEAT";
const PRED_HUMAN: &str = "HUMAN_PROMPTED";
const PRED_ABSTAIN: &str = "ABSTAIN";
const PRED_UNCLASSIFIED: &str = "UNCLASSIFIED";

fn predicted_label(class: TemporalClass) -> &'static str {
    if class.is_autonomous() {
        PRED_HEARTBEAT
    } else if class.is_irregular() {
        PRED_HUMAN
    } else if class == TemporalClass::Mixed {
        PRED_ABSTAIN
    } else {
        PRED_UNCLASSIFIED
    }
}

/// Score temporal profiles against ground truth. CoV < 0.5 predicts
/// HEARTBEAT, CoV > 1.0 predicts HUMAN_PROMPTED, MIXED abstains.
pub fn evaluate_pipeline(
    truth: &GroundTruth,
    profiles: &BTreeMap<String, AuthorTemporalProfile>,
) -> Result<PipelineEvaluation> {
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut n_abstained = 0usize;
    let mut n_unclassified = 0usize;
    for (author, profile) in profiles {
        let Some(mode) = truth.agent_modes.get(author) else {
            return Err(Error::InvalidInput(format!(
                "author {author:?} not covered by ground truth"
            )));
        };
        let pred = predicted_label(profile.class);
        match pred {
            PRED_ABSTAIN => n_abstained += 1,
            PRED_UNCLASSIFIED => n_unclassified += 1,
            _ => {}
        }
        *confusion
            .entry(mode.label().to_string())
            .or_default()
            .entry(pred.to_string())
            .or_insert(0) += 1;
    }
    if confusion.is_empty() {
        return Err(Error::InsufficientData("no profiles to evaluate".into()));
    }

    let count = |truth_label: &str, pred: &str| -> usize {
        confusion
            .get(truth_label)
            .and_then(|row| row.get(pred))
            .copied()
            .unwrap_or(0)
    };
    let metrics_for = |truth_label: &str, pred_label: &str| -> ClassMetrics {
        let tp = count(truth_label, pred_label);
        let n_predicted: usize = confusion
            .values()
            .map(|row| row.get(pred_label).copied().unwrap_or(0))
            .sum();
        let n_true_decided = count(truth_label, PRED_HEARTBEAT) + count(truth_label, PRED_HUMAN);
        let precision = if n_predicted > 0 {
            tp as f64 / n_predicted as f64
        } else {
            0.0
        };
        let recall = if n_true_decided > 0 {
            tp as f64 / n_true_decided as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            n_predicted,
            n_true_decided,
            flagged_no_decisions: n_true_decided == 0,
        }
    };

    Ok(PipelineEvaluation {
        heartbeat: metrics_for("HEARTBEAT", PRED_HEARTBEAT),
        human_prompted: metrics_for("HUMAN_PROMPTED", PRED_HUMAN),
        n_evaluated: profiles.len(),
        n_abstained,
        n_unclassified,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{comment_to_jsonl, post_to_jsonl};
    use crate::tempo;

    fn ts(s: &str) -> DateTime<Utc> {
        crate::corpus::parse_timestamp(s, false).unwrap()
    }

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            span_start: ts("2026-01-20T00:00:00Z"),
            span_end: ts("2026-01-30T00:00:00Z"),
            rng_seed: 1,
            agents: vec![],
            farms: vec![],
            shutdown: None,
            content: ContentSpec::default(),
        }
    }

    fn heartbeat_spec(name: &str, count: usize, jitter: f64) -> AgentSpec {
        AgentSpec {
            name: name.into(),
            mode: AgentMode::Heartbeat,
            count,
            heartbeat_period_hours: 4.0,
            jitter_frac: jitter,
            prompt_rate_per_day: 0.0,
            heavy_tail_sigma: None,
            diurnal_amplitude: 0.0,
            comment_rate_per_day: 0.0,
            reply_prob: 0.0,
            promo_rate: None,
            skill_rate: None,
            owner_followers: None,
            active_start: None,
            active_end: None,
        }
    }

    #[test]
    fn zero_jitter_heartbeat_has_exact_spacing_and_zero_cov() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("solo", 1, 0.0));
        let (corpus, _) = generate_society(&config).unwrap();
        // 10 days at 4h per post = 60 posts
        assert_eq!(corpus.posts().len(), 60);
        let profiles = tempo::classify_corpus(&corpus);
        let p = &profiles["solo"];
        assert_eq!(p.class, tempo::TemporalClass::VeryRegular);
        assert_eq!(p.cov, Some(0.0));
    }

    #[test]
    fn determinism_identical_configs_yield_identical_bytes() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("hb", 5, 0.2));
        config.agents.push(AgentSpec {
            name: "hp".into(),
            mode: AgentMode::HumanPrompted,
            count: 5,
            heartbeat_period_hours: 4.0,
            jitter_frac: 0.0,
            prompt_rate_per_day: 6.0,
            heavy_tail_sigma: None,
            diurnal_amplitude: 0.0,
            comment_rate_per_day: 10.0,
            reply_prob: 0.0,
            promo_rate: None,
            skill_rate: None,
            owner_followers: None,
            active_start: None,
            active_end: None,
        });
        let render = |c: &ScenarioConfig| {
            let (corpus, truth) = generate_society(c).unwrap();
            let mut s = String::new();
            for p in corpus.posts() {
                s.push_str(&post_to_jsonl(p));
                s.push('\n');
            }
            for cm in corpus.comments() {
                s.push_str(&comment_to_jsonl(cm));
                s.push('\n');
            }
            s.push_str(&ground_truth_to_jsonl(&truth));
            s
        };
        assert_eq!(render(&config), render(&config));
    }

    #[test]
    fn overlapping_agent_names_error() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("dup", 1, 0.0));
        config.agents.push(heartbeat_spec("dup", 1, 0.0));
        assert!(generate_society(&config).is_err());
    }

    #[test]
    fn exponential_prompting_cov_converges_to_one() {
        let mut config = base_config();
        // ~12k events over 10 days
        config.agents.push(AgentSpec {
            name: "burst".into(),
            mode: AgentMode::HumanPrompted,
            count: 1,
            heartbeat_period_hours: 4.0,
            jitter_frac: 0.0,
            prompt_rate_per_day: 1200.0,
            heavy_tail_sigma: None,
            diurnal_amplitude: 0.0,
            comment_rate_per_day: 0.0,
            reply_prob: 0.0,
            promo_rate: None,
            skill_rate: None,
            owner_followers: None,
            active_start: None,
            active_end: None,
        });
        let (corpus, _) = generate_society(&config).unwrap();
        assert!(corpus.posts().len() >= 10_000);
        let profiles = tempo::classify_corpus(&corpus);
        let cov = profiles["burst"].cov.unwrap();
        assert!((cov - 1.0).abs() < 0.1, "CoV {cov} not near 1");
    }

    #[test]
    fn heavy_tail_pushes_cov_above_one() {
        let mut config = base_config();
        config.agents.push(AgentSpec {
            name: "erratic".into(),
            mode: AgentMode::HumanPrompted,
            count: 1,
            heartbeat_period_hours: 4.0,
            jitter_frac: 0.0,
            prompt_rate_per_day: 50.0,
            heavy_tail_sigma: Some(1.4),
            diurnal_amplitude: 0.0,
            comment_rate_per_day: 0.0,
            reply_prob: 0.0,
            promo_rate: None,
            skill_rate: None,
            owner_followers: None,
            active_start: None,
            active_end: None,
        });
        let (corpus, _) = generate_society(&config).unwrap();
        let profiles = tempo::classify_corpus(&corpus);
        assert!(profiles["erratic"].cov.unwrap() > 1.0);
    }

    #[test]
    fn farm_comments_flagged_exactly() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("poster", 3, 0.0));
        config.agents[0].comment_rate_per_day = 5.0;
        config.farms.push(FarmSpec {
            accounts: vec!["f1".into(), "f2".into(), "f3".into(), "f4".into()],
            script_gap_seconds: 12.0,
            burst_day: ts("2026-01-25T00:00:00Z").date_naive(),
            target_rule: TargetRule::LowKarmaFresh,
            accounts_per_post: 2,
            response_delay_seconds: 300.0,
            max_posts: None,
        });
        let (corpus, truth) = generate_society(&config).unwrap();
        let farm_accounts: BTreeSet<&str> = ["f1", "f2", "f3", "f4"].into();
        for c in corpus.comments() {
            let is_farm = farm_accounts.contains(c.author.as_str());
            assert_eq!(
                truth.farm_comment_ids.contains(&c.id),
                is_farm,
                "farm flag mismatch on {}",
                c.id
            );
        }
        assert!(!truth.farm_comment_ids.is_empty());
    }

    #[test]
    fn scripted_gap_is_exact_on_shared_posts() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("poster", 2, 0.0));
        config.farms.push(FarmSpec {
            accounts: vec!["f1".into(), "f2".into(), "f3".into(), "f4".into()],
            script_gap_seconds: 12.0,
            burst_day: ts("2026-01-25T00:00:00Z").date_naive(),
            target_rule: TargetRule::LowKarmaFresh,
            accounts_per_post: 2,
            response_delay_seconds: 300.0,
            max_posts: None,
        });
        let (corpus, _) = generate_society(&config).unwrap();
        let accounts: Vec<String> = ["f1", "f2", "f3", "f4"].map(String::from).to_vec();
        let gaps = crate::coordination::shared_post_gaps(&corpus, &accounts).unwrap();
        let d = gaps.distribution.unwrap();
        assert_eq!(d.median, 12.0);
        assert_eq!(d.share_under_60s, 1.0);
    }

    #[test]
    fn farm_sniper_latency_matches_configured_delay() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("poster", 2, 0.0));
        config.farms.push(FarmSpec {
            accounts: vec!["s1".into(), "s2".into()],
            script_gap_seconds: 12.0,
            burst_day: ts("2026-01-25T00:00:00Z").date_naive(),
            target_rule: TargetRule::LowKarmaFresh,
            accounts_per_post: 2,
            response_delay_seconds: 300.0,
            max_posts: None,
        });
        let (corpus, _) = generate_society(&config).unwrap();
        let t = crate::coordination::targeting_profile(&corpus, "s1", 10).unwrap();
        // first account in each rotation comments at the configured delay
        assert!(
            (t.mean_response_latency_secs - 300.0).abs() < 13.0,
            "latency {}",
            t.mean_response_latency_secs
        );
        assert_eq!(t.share_low_karma_targets, 1.0);
    }

    #[test]
    fn shutdown_suppresses_and_delays_heartbeats() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("hb", 1, 0.0));
        let start = ts("2026-01-24T00:00:00Z");
        let end = ts("2026-01-25T00:00:00Z");
        config.shutdown = Some(ShutdownSpec {
            start,
            end,
            reengagement_bias_hours: 12.0,
        });
        let (corpus, _) = generate_society(&config).unwrap();
        let biased_end = end + Duration::hours(12);
        for p in corpus.posts() {
            assert!(
                p.created_at < start || p.created_at >= biased_end,
                "heartbeat post inside suppressed window: {}",
                p.created_at
            );
        }
    }

    #[test]
    fn ground_truth_round_trips() {
        let mut config = base_config();
        config.agents.push(heartbeat_spec("hb", 2, 0.0));
        config.shutdown = Some(ShutdownSpec {
            start: ts("2026-01-24T00:00:00Z"),
            end: ts("2026-01-25T00:00:00Z"),
            reengagement_bias_hours: 0.0,
        });
        let (_, truth) = generate_society(&config).unwrap();
        let jsonl = ground_truth_to_jsonl(&truth);
        let parsed = parse_ground_truth(std::io::Cursor::new(jsonl)).unwrap();
        assert_eq!(parsed.agent_modes, truth.agent_modes);
        assert_eq!(parsed.farm_comment_ids, truth.farm_comment_ids);
        assert_eq!(parsed.shutdown, truth.shutdown);
    }

    #[test]
    fn perfect_separation_scores_unit_metrics() {
        let mut truth = GroundTruth::default();
        let mut profiles = BTreeMap::new();
        let mut add = |name: &str, mode: AgentMode, class: TemporalClass| {
            truth.agent_modes.insert(name.to_string(), mode);
            profiles.insert(
                name.to_string(),
                AuthorTemporalProfile {
                    author: name.to_string(),
                    cov: Some(0.2),
                    class,
                    n_posts: 20,
                },
            );
        };
        add("h1", AgentMode::Heartbeat, TemporalClass::VeryRegular);
        add("h2", AgentMode::Heartbeat, TemporalClass::Regular);
        add("p1", AgentMode::HumanPrompted, TemporalClass::Irregular);
        add("p2", AgentMode::HumanPrompted, TemporalClass::VeryIrregular);
        let eval = evaluate_pipeline(&truth, &profiles).unwrap();
        assert_eq!(eval.heartbeat.precision, 1.0);
        assert_eq!(eval.heartbeat.recall, 1.0);
        assert_eq!(eval.human_prompted.precision, 1.0);
        assert_eq!(eval.human_prompted.recall, 1.0);
    }

    #[test]
    fn all_abstain_output_is_flagged() {
        let mut truth = GroundTruth::default();
        truth
            .agent_modes
            .insert("x".to_string(), AgentMode::Heartbeat);
        let profiles: BTreeMap<String, AuthorTemporalProfile> = [(
            "x".to_string(),
            AuthorTemporalProfile {
                author: "x".to_string(),
                cov: Some(0.7),
                class: TemporalClass::Mixed,
                n_posts: 20,
            },
        )]
        .into();
        let eval = evaluate_pipeline(&truth, &profiles).unwrap();
        assert_eq!(eval.heartbeat.recall, 0.0);
        assert!(eval.heartbeat.flagged_no_decisions);
        assert_eq!(eval.n_abstained, 1);
    }

    #[test]
    fn uncovered_author_is_an_error() {
        let truth = GroundTruth::default();
        let profiles: BTreeMap<String, AuthorTemporalProfile> = [(
            "mystery".to_string(),
            AuthorTemporalProfile {
                author: "mystery".to_string(),
                cov: Some(0.1),
                class: TemporalClass::VeryRegular,
                n_posts: 20,
            },
        )]
        .into();
        assert!(evaluate_pipeline(&truth, &profiles).is_err());
    }

    #[test]
    fn jitter_sweep_recall_is_monotone_nonincreasing() {
        let mut last = f64::INFINITY;
        for (i, jitter) in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5].iter().enumerate() {
            let mut config = base_config();
            config.rng_seed = 99 + i as u64;
            config.agents.push(heartbeat_spec("hb", 30, *jitter));
            let (corpus, truth) = generate_society(&config).unwrap();
            let profiles = tempo::classify_corpus(&corpus);
            let eval = evaluate_pipeline(&truth, &profiles).unwrap();
            assert!(
                eval.heartbeat.recall <= last + 1e-9,
                "recall rose at jitter {jitter}"
            );
            last = eval.heartbeat.recall;
        }
    }

    #[test]
    fn diurnal_mode_is_deterministic() {
        let mut config = base_config();
        config.agents.push(AgentSpec {
            name: "cyclic".into(),
            mode: AgentMode::HumanPrompted,
            count: 1,
            heartbeat_period_hours: 4.0,
            jitter_frac: 0.0,
            prompt_rate_per_day: 24.0,
            heavy_tail_sigma: None,
            diurnal_amplitude: 0.8,
            comment_rate_per_day: 0.0,
            reply_prob: 0.0,
            promo_rate: None,
            skill_rate: None,
            owner_followers: None,
            active_start: None,
            active_end: None,
        });
        let (c1, _) = generate_society(&config).unwrap();
        let (c2, _) = generate_society(&config).unwrap();
        assert_eq!(c1.posts().len(), c2.posts().len());
        assert!(!c1.posts().is_empty());
    }
}
