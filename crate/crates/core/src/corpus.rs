//! Data model, JSONL ingestion, validation, and derived fields for
//! platform dumps.
//!
//! A [`Corpus`] is an immutable snapshot of posts, comments, agents, and
//! the shutdown boundaries, optionally joined with ingested per-post
//! annotations and per-item embedding vectors. Ingestion is
//! single-writer; once built, the corpus is safely shareable for
//! concurrent reads by every analysis module.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::BufRead;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::influence::ContentFeatures;

/// A top-level post.
#[derive(Debug, Clone, Serialize)]
pub struct Post {
    pub id: String,
    /// Agent name; may be empty (anonymous).
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub title: Option<String>,
    pub body: String,
    /// Final karma.
    pub upvotes: u64,
    pub comment_count: u64,
    pub submolt: Option<String>,
}

impl Post {
    /// Title and body concatenated, the unit of all content matching.
    pub fn full_text(&self) -> String {
        match &self.title {
            Some(t) if !t.is_empty() => format!("{t}\n{}", self.body),
            _ => self.body.clone(),
        }
    }
}

/// A comment, linked to its parent post by `post_id`.
#[derive(Debug, Clone, Serialize)]
pub struct Comment {
    pub id: String,
    pub post_id: String,
    /// Agent name; may be blank (anonymous).
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub body: String,
    /// Hierarchical identifier; depth = number of separators.
    pub path: String,
    /// True when `post_id` is not present in the dump. Orphans are kept
    /// but excluded from graph/targeting analyses.
    pub orphaned: bool,
}

/// Registered agent with (optional) owner metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Agent {
    pub name: String,
    pub owner_handle: Option<String>,
    pub owner_followers: Option<u64>,
}

/// The shutdown natural-experiment boundaries.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimeBoundaries {
    pub breach_at: DateTime<Utc>,
    pub restart_at: DateTime<Utc>,
}

impl TimeBoundaries {
    pub fn new(breach_at: DateTime<Utc>, restart_at: DateTime<Utc>) -> Result<Self> {
        if breach_at >= restart_at {
            return Err(Error::Config(format!(
                "breach_at {breach_at} must precede restart_at {restart_at}"
            )));
        }
        Ok(TimeBoundaries {
            breach_at,
            restart_at,
        })
    }
}

impl Default for TimeBoundaries {
    fn default() -> Self {
        TimeBoundaries {
            breach_at: ts_utc(2026, 1, 31, 17, 35, 0),
            restart_at: ts_utc(2026, 2, 3, 13, 25, 0),
        }
    }
}

/// Which period of the timeline a timestamp falls into. The partition is
/// half-open: `breach_at` itself is in the gap, `restart_at` itself is
/// post-restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Period {
    PreBreach,
    Gap,
    PostRestart,
}

/// Classify a timestamp against the boundaries.
pub fn period_of(t: DateTime<Utc>, b: &TimeBoundaries) -> Period {
    if t < b.breach_at {
        Period::PreBreach
    } else if t < b.restart_at {
        Period::Gap
    } else {
        Period::PostRestart
    }
}

/// Number of maximal whitespace-delimited tokens.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Reply depth of a comment path: the number of separator occurrences.
/// A single-segment path is a direct reply to the post (depth 0).
pub fn comment_depth(path: &str, separator: char) -> Result<u32> {
    if path.is_empty() {
        return Err(Error::InvalidInput("empty comment path".into()));
    }
    Ok(path.chars().filter(|&c| c == separator).count() as u32)
}

/// What to do with malformed records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// Count and skip bad records.
    #[default]
    Skip,
    /// Abort on the first bad record.
    Fail,
}

/// Ingestion options.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub on_error: ErrorMode,
    /// Accept naive timestamps by assuming UTC. Off by default: naive
    /// timestamps are a known corruption source.
    pub assume_utc: bool,
    pub path_separator: char,
    /// Expected embedding dimension; `None` disables the check.
    pub embedding_dim: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            on_error: ErrorMode::Skip,
            assume_utc: false,
            path_separator: '.',
            embedding_dim: Some(768),
        }
    }
}

/// Per-stream ingestion tallies.
#[derive(Debug, Clone, Default, Serialize)]
pub struct StreamReport {
    pub ok: usize,
    pub errors: usize,
    /// First few error messages, for diagnostics.
    pub samples: Vec<String>,
}

impl StreamReport {
    fn record_error(&mut self, msg: String) {
        self.errors += 1;
        if self.samples.len() < 10 {
            self.samples.push(msg);
        }
    }
}

/// Ingestion outcome across all streams.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ParseReport {
    pub posts: StreamReport,
    pub comments: StreamReport,
    pub agents: StreamReport,
    pub annotations: StreamReport,
    pub embeddings: StreamReport,
}

impl ParseReport {
    pub fn total_errors(&self) -> usize {
        self.posts.errors
            + self.comments.errors
            + self.agents.errors
            + self.annotations.errors
            + self.embeddings.errors
    }
}

/// Immutable corpus snapshot. Posts and comments are sorted by
/// `(created_at, id)`; all collections are read-only after build.
#[derive(Debug, Clone)]
pub struct Corpus {
    posts: Vec<Post>,
    comments: Vec<Comment>,
    agents: Vec<Agent>,
    boundaries: TimeBoundaries,
    annotations: BTreeMap<String, ContentFeatures>,
    embeddings: BTreeMap<String, Vec<f32>>,
    post_index: HashMap<String, usize>,
    path_separator: char,
    report: ParseReport,
}

impl Corpus {
    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn boundaries(&self) -> &TimeBoundaries {
        &self.boundaries
    }

    pub fn annotations(&self) -> &BTreeMap<String, ContentFeatures> {
        &self.annotations
    }

    pub fn embeddings(&self) -> &BTreeMap<String, Vec<f32>> {
        &self.embeddings
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    pub fn path_separator(&self) -> char {
        self.path_separator
    }

    pub fn post_by_id(&self, id: &str) -> Option<&Post> {
        self.post_index.get(id).map(|&i| &self.posts[i])
    }

    pub fn period_of(&self, t: DateTime<Utc>) -> Period {
        period_of(t, &self.boundaries)
    }

    pub fn depth_of(&self, comment: &Comment) -> Result<u32> {
        comment_depth(&comment.path, self.path_separator)
    }

    /// Distinct non-blank post-or-comment authors.
    pub fn distinct_authors(&self) -> BTreeSet<&str> {
        self.posts
            .iter()
            .map(|p| p.author.as_str())
            .chain(self.comments.iter().map(|c| c.author.as_str()))
            .filter(|a| !a.is_empty())
            .collect()
    }

    /// Copy of the corpus restricted to items created strictly before
    /// `cutoff`. Orphan flags are recomputed against the surviving posts.
    pub fn slice_until(&self, cutoff: DateTime<Utc>) -> Corpus {
        let posts: Vec<Post> = self
            .posts
            .iter()
            .filter(|p| p.created_at < cutoff)
            .cloned()
            .collect();
        let comments: Vec<Comment> = self
            .comments
            .iter()
            .filter(|c| c.created_at < cutoff)
            .cloned()
            .collect();
        Corpus::assemble(
            posts,
            comments,
            self.agents.clone(),
            self.boundaries,
            self.annotations.clone(),
            self.embeddings.clone(),
            self.path_separator,
            self.report.clone(),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        mut posts: Vec<Post>,
        mut comments: Vec<Comment>,
        agents: Vec<Agent>,
        boundaries: TimeBoundaries,
        annotations: BTreeMap<String, ContentFeatures>,
        embeddings: BTreeMap<String, Vec<f32>>,
        path_separator: char,
        report: ParseReport,
    ) -> Corpus {
        posts.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        comments.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        let post_index: HashMap<String, usize> = posts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();
        for c in &mut comments {
            c.orphaned = !post_index.contains_key(&c.post_id);
        }
        Corpus {
            posts,
            comments,
            agents,
            boundaries,
            annotations,
            embeddings,
            post_index,
            path_separator,
            report,
        }
    }
}

fn ts_utc(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> DateTime<Utc> {
    chrono::NaiveDate::from_ymd_opt(y, mo, d)
        .unwrap()
        .and_hms_opt(h, mi, s)
        .unwrap()
        .and_utc()
}

/// Parse an ISO-8601 timestamp, normalizing to UTC. Naive timestamps are
/// rejected unless `assume_utc` is set.
pub fn parse_timestamp(value: &str, assume_utc: bool) -> Result<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(value) {
        return Ok(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(value, fmt) {
            if assume_utc {
                return Ok(naive.and_utc());
            }
            return Err(Error::Timestamp {
                value: value.to_string(),
                reason: "naive timestamp (no zone) rejected; pass assume_utc to accept".into(),
            });
        }
    }
    Err(Error::Timestamp {
        value: value.to_string(),
        reason: "unrecognized format".into(),
    })
}

/// Canonical timestamp rendering used by every emitted artifact.
pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

// ---------------------------------------------------------------------------
// JSONL record schemas
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawPost {
    id: Option<String>,
    author: Option<String>,
    created_at: Option<String>,
    title: Option<String>,
    body: Option<String>,
    upvotes: Option<i64>,
    comment_count: Option<i64>,
    submolt: Option<String>,
}

#[derive(Deserialize)]
struct RawComment {
    id: Option<String>,
    post_id: Option<String>,
    author: Option<String>,
    created_at: Option<String>,
    body: Option<String>,
    path: Option<String>,
}

#[derive(Deserialize)]
struct RawAgent {
    name: Option<String>,
    owner_handle: Option<String>,
    owner_followers: Option<i64>,
}

#[derive(Deserialize)]
struct RawEmbedding {
    id: Option<String>,
    vector: Option<Vec<f32>>,
}

#[derive(Deserialize)]
struct RawAnnotation {
    id: Option<String>,
    #[serde(flatten)]
    features: ContentFeatures,
}

fn require<T>(field: Option<T>, name: &str) -> Result<T> {
    field.ok_or_else(|| Error::InvalidInput(format!("missing required field {name:?}")))
}

fn nonneg(value: Option<i64>, name: &str) -> Result<u64> {
    match value {
        None => Ok(0),
        Some(v) if v >= 0 => Ok(v as u64),
        Some(v) => Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}"))),
    }
}

/// Incremental corpus builder. Streams may be read in any order; `build`
/// performs cross-stream validation (duplicate ids, orphan flagging) and
/// freezes the snapshot.
pub struct CorpusBuilder {
    options: ParseOptions,
    posts: Vec<Post>,
    comments: Vec<Comment>,
    agents: Vec<Agent>,
    annotations: BTreeMap<String, ContentFeatures>,
    embeddings: BTreeMap<String, Vec<f32>>,
    report: ParseReport,
}

enum Stream {
    Posts,
    Comments,
    Agents,
    Annotations,
    Embeddings,
}

impl CorpusBuilder {
    pub fn new(options: ParseOptions) -> Self {
        CorpusBuilder {
            options,
            posts: Vec::new(),
            comments: Vec::new(),
            agents: Vec::new(),
            annotations: BTreeMap::new(),
            embeddings: BTreeMap::new(),
            report: ParseReport::default(),
        }
    }

    fn stream_report(&mut self, stream: &Stream) -> &mut StreamReport {
        match stream {
            Stream::Posts => &mut self.report.posts,
            Stream::Comments => &mut self.report.comments,
            Stream::Agents => &mut self.report.agents,
            Stream::Annotations => &mut self.report.annotations,
            Stream::Embeddings => &mut self.report.embeddings,
        }
    }

    fn handle<T>(
        &mut self,
        stream: &Stream,
        line_no: usize,
        parsed: Result<T>,
        sink: impl FnOnce(&mut Self, T),
    ) -> Result<()> {
        match parsed {
            Ok(v) => {
                sink(self, v);
                self.stream_report(stream).ok += 1;
                Ok(())
            }
            Err(e) => {
                let msg = format!("line {line_no}: {e}");
                self.stream_report(stream).record_error(msg.clone());
                if self.options.on_error == ErrorMode::Fail {
                    Err(Error::Record {
                        stream: match stream {
                            Stream::Posts => "posts",
                            Stream::Comments => "comments",
                            Stream::Agents => "agents",
                            Stream::Annotations => "annotations",
                            Stream::Embeddings => "embeddings",
                        },
                        line: line_no,
                        reason: e.to_string(),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn read_posts(&mut self, reader: impl BufRead) -> Result<()> {
        let assume_utc = self.options.assume_utc;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = (|| -> Result<Post> {
                let raw: RawPost = serde_json::from_str(&line)?;
                Ok(Post {
                    id: require(raw.id, "id")?,
                    author: raw.author.unwrap_or_default(),
                    created_at: parse_timestamp(
                        &require(raw.created_at, "created_at")?,
                        assume_utc,
                    )?,
                    title: raw.title,
                    body: require(raw.body, "body")?,
                    upvotes: nonneg(raw.upvotes, "upvotes")?,
                    comment_count: nonneg(raw.comment_count, "comment_count")?,
                    submolt: raw.submolt,
                })
            })();
            self.handle(&Stream::Posts, i + 1, parsed, |b, p| b.posts.push(p))?;
        }
        Ok(())
    }

    pub fn read_comments(&mut self, reader: impl BufRead) -> Result<()> {
        let assume_utc = self.options.assume_utc;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = (|| -> Result<Comment> {
                let raw: RawComment = serde_json::from_str(&line)?;
                let path = require(raw.path, "path")?;
                if path.is_empty() {
                    return Err(Error::InvalidInput("empty comment path".into()));
                }
                Ok(Comment {
                    id: require(raw.id, "id")?,
                    post_id: require(raw.post_id, "post_id")?,
                    author: raw.author.unwrap_or_default(),
                    created_at: parse_timestamp(
                        &require(raw.created_at, "created_at")?,
                        assume_utc,
                    )?,
                    body: require(raw.body, "body")?,
                    path,
                    orphaned: false,
                })
            })();
            self.handle(&Stream::Comments, i + 1, parsed, |b, c| b.comments.push(c))?;
        }
        Ok(())
    }

    pub fn read_agents(&mut self, reader: impl BufRead) -> Result<()> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = (|| -> Result<Agent> {
                let raw: RawAgent = serde_json::from_str(&line)?;
                let followers = match raw.owner_followers {
                    None => None,
                    Some(v) if v >= 0 => Some(v as u64),
                    Some(v) => {
                        return Err(Error::InvalidInput(format!(
                            "owner_followers must be >= 0, got {v}"
                        )))
                    }
                };
                Ok(Agent {
                    name: require(raw.name, "name")?,
                    owner_handle: raw.owner_handle,
                    owner_followers: followers,
                })
            })();
            self.handle(&Stream::Agents, i + 1, parsed, |b, a| b.agents.push(a))?;
        }
        Ok(())
    }

    pub fn read_annotations(&mut self, reader: impl BufRead) -> Result<()> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = (|| -> Result<(String, ContentFeatures)> {
                let raw: RawAnnotation = serde_json::from_str(&line)?;
                raw.features.validate()?;
                Ok((require(raw.id, "id")?, raw.features))
            })();
            self.handle(&Stream::Annotations, i + 1, parsed, |b, (id, f)| {
                b.annotations.insert(id, f);
            })?;
        }
        Ok(())
    }

    pub fn read_embeddings(&mut self, reader: impl BufRead) -> Result<()> {
        let expected_dim = self.options.embedding_dim;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = (|| -> Result<(String, Vec<f32>)> {
                let raw: RawEmbedding = serde_json::from_str(&line)?;
                let vector = require(raw.vector, "vector")?;
                if let Some(dim) = expected_dim {
                    if vector.len() != dim {
                        return Err(Error::InvalidInput(format!(
                            "embedding has {} components, expected {dim}",
                            vector.len()
                        )));
                    }
                }
                Ok((require(raw.id, "id")?, vector))
            })();
            self.handle(&Stream::Embeddings, i + 1, parsed, |b, (id, v)| {
                b.embeddings.insert(id, v);
            })?;
        }
        Ok(())
    }

    /// Direct record insertion, used by the synthetic generator.
    pub fn push_post(&mut self, post: Post) {
        self.posts.push(post);
        self.report.posts.ok += 1;
    }

    pub fn push_comment(&mut self, comment: Comment) {
        self.comments.push(comment);
        self.report.comments.ok += 1;
    }

    pub fn push_agent(&mut self, agent: Agent) {
        self.agents.push(agent);
        self.report.agents.ok += 1;
    }

    /// Validate, sort, flag orphans, and freeze the snapshot.
    pub fn build(mut self, boundaries: TimeBoundaries) -> Result<Corpus> {
        let mut seen = HashSet::new();
        let mut posts = Vec::with_capacity(self.posts.len());
        for p in std::mem::take(&mut self.posts) {
            if !seen.insert(p.id.clone()) {
                let msg = format!("duplicate post id {:?}", p.id);
                self.report.posts.record_error(msg.clone());
                if self.options.on_error == ErrorMode::Fail {
                    return Err(Error::InvalidInput(msg));
                }
                continue;
            }
            posts.push(p);
        }
        let mut seen = HashSet::new();
        let mut comments = Vec::with_capacity(self.comments.len());
        for c in std::mem::take(&mut self.comments) {
            if !seen.insert(c.id.clone()) {
                let msg = format!("duplicate comment id {:?}", c.id);
                self.report.comments.record_error(msg.clone());
                if self.options.on_error == ErrorMode::Fail {
                    return Err(Error::InvalidInput(msg));
                }
                continue;
            }
            comments.push(c);
        }
        let mut seen = HashSet::new();
        let mut agents = Vec::with_capacity(self.agents.len());
        for a in std::mem::take(&mut self.agents) {
            if !seen.insert(a.name.clone()) {
                let msg = format!("duplicate agent name {:?}", a.name);
                self.report.agents.record_error(msg.clone());
                if self.options.on_error == ErrorMode::Fail {
                    return Err(Error::InvalidInput(msg));
                }
                continue;
            }
            agents.push(a);
        }
        Ok(Corpus::assemble(
            posts,
            comments,
            agents,
            boundaries,
            self.annotations,
            self.embeddings,
            self.options.path_separator,
            self.report,
        ))
    }
}

/// One-shot ingestion from JSONL streams.
pub fn parse_corpus(
    post_stream: impl BufRead,
    comment_stream: impl BufRead,
    agent_stream: impl BufRead,
    boundaries: TimeBoundaries,
    options: ParseOptions,
) -> Result<Corpus> {
    let mut builder = CorpusBuilder::new(options);
    builder.read_posts(post_stream)?;
    builder.read_comments(comment_stream)?;
    builder.read_agents(agent_stream)?;
    builder.build(boundaries)
}

// ---------------------------------------------------------------------------
// JSONL writers (round-trip serialization)
// ---------------------------------------------------------------------------

pub fn post_to_jsonl(p: &Post) -> String {
    serde_json::json!({
        "id": p.id,
        "author": p.author,
        "created_at": format_timestamp(p.created_at),
        "title": p.title,
        "body": p.body,
        "upvotes": p.upvotes,
        "comment_count": p.comment_count,
        "submolt": p.submolt,
    })
    .to_string()
}

pub fn comment_to_jsonl(c: &Comment) -> String {
    serde_json::json!({
        "id": c.id,
        "post_id": c.post_id,
        "author": c.author,
        "created_at": format_timestamp(c.created_at),
        "body": c.body,
        "path": c.path,
    })
    .to_string()
}

pub fn agent_to_jsonl(a: &Agent) -> String {
    serde_json::json!({
        "name": a.name,
        "owner_handle": a.owner_handle,
        "owner_followers": a.owner_followers,
    })
    .to_string()
}
