//! Directed comment network: an edge runs from the commenter to the
//! author of the post they commented on. Density, reciprocity, and
//! first-contact channel classification.
//!
//! Blank-author comments, orphaned comments, and self-comments are
//! excluded from the graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::{Comment, Corpus, Post};
use crate::error::{Error, Result};

/// Directed graph with edge multiplicities.
#[derive(Debug, Clone, Default)]
pub struct CommentGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), u64>,
}

impl CommentGraph {
    /// Build from explicit parts (nodes may exceed edge endpoints).
    pub fn from_parts(
        nodes: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        let mut g = CommentGraph {
            nodes: nodes.into_iter().collect(),
            edges: BTreeMap::new(),
        };
        for (src, dst) in edges {
            g.add_edge(src, dst);
        }
        g
    }

    fn add_edge(&mut self, src: String, dst: String) {
        self.nodes.insert(src.clone());
        self.nodes.insert(dst.clone());
        *self.edges.entry((src, dst)).or_insert(0) += 1;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Unique directed edges (multiplicity collapsed).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.edges
            .iter()
            .map(|((s, d), m)| (s.as_str(), d.as_str(), *m))
    }

    pub fn multiplicity(&self, src: &str, dst: &str) -> u64 {
        self.edges
            .get(&(src.to_string(), dst.to_string()))
            .copied()
            .unwrap_or(0)
    }
}

/// Build the comment graph from a corpus.
pub fn build_graph(corpus: &Corpus) -> CommentGraph {
    let mut g = CommentGraph::default();
    for c in corpus.comments() {
        if c.author.is_empty() || c.orphaned {
            continue;
        }
        let Some(post) = corpus.post_by_id(&c.post_id) else {
            continue;
        };
        if post.author.is_empty() || post.author == c.author {
            continue;
        }
        g.add_edge(c.author.clone(), post.author.clone());
    }
    g
}

/// Directed density |E| / (n * (n - 1)).
pub fn density(graph: &CommentGraph) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "density needs at least 2 nodes, got {n}"
        )));
    }
    Ok(graph.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Reciprocity readout.
#[derive(Debug, Clone, Serialize)]
pub struct ReciprocityReport {
    /// Unordered pairs with edges in both directions.
    pub reciprocal_pairs: usize,
    /// Share of directed edges participating in a reciprocal pair:
    /// 2 * pairs / |E|.
    pub rate: f64,
}

pub fn reciprocity(graph: &CommentGraph) -> Result<ReciprocityReport> {
    if graph.edge_count() == 0 {
        return Err(Error::InsufficientData(
            "reciprocity of empty edge set".into(),
        ));
    }
    let mut pairs = 0usize;
    for (src, dst) in graph.edges.keys() {
        if src < dst && graph.edges.contains_key(&(dst.clone(), src.clone())) {
            pairs += 1;
        }
    }
    Ok(ReciprocityReport {
        reciprocal_pairs: pairs,
        rate: 2.0 * pairs as f64 / graph.edge_count() as f64,
    })
}

/// First-contact discovery channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactChannel {
    Mention,
    NewPost,
    Organic,
    TrendingPost,
    ViralPost,
}

impl ContactChannel {
    pub const ALL: [ContactChannel; 5] = [
        ContactChannel::Mention,
        ContactChannel::NewPost,
        ContactChannel::Organic,
        ContactChannel::TrendingPost,
        ContactChannel::ViralPost,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ContactChannel::Mention => "mention",
            ContactChannel::NewPost => "new_post",
            ContactChannel::Organic => "organic",
            ContactChannel::TrendingPost => "trending_post",
            ContactChannel::ViralPost => "viral_post",
        }
    }
}

/// Literal `@name` detection: case-insensitive, word boundary on the
/// right.
pub fn detect_mention(body: &str, author: &str) -> bool {
    if author.is_empty() {
        return false;
    }
    let lower = body.to_lowercase();
    let needle = format!("@{}", author.to_lowercase());
    let mut start = 0;
    while let Some(pos) = lower[start..].find(&needle) {
        let end = start + pos + needle.len();
        let boundary = match lower[end..].chars().next() {
            None => true,
            Some(c) => !(c.is_alphanumeric() || c == '_'),
        };
        if boundary {
            return true;
        }
        start = end;
    }
    false
}

/// Classify a first contact. Mention takes precedence; otherwise the
/// post's karma bucket decides (final upvotes as proxy for karma at
/// comment time).
pub fn classify_first_contact(
    comment: &Comment,
    target_post: &Post,
    mention_detected: bool,
) -> ContactChannel {
    let _ = comment;
    if mention_detected {
        return ContactChannel::Mention;
    }
    match target_post.upvotes {
        0..=9 => ContactChannel::NewPost,
        10..=99 => ContactChannel::Organic,
        100..=999 => ContactChannel::TrendingPost,
        _ => ContactChannel::ViralPost,
    }
}

/// Share of first contacts per channel.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelShares {
    pub n_pairs: usize,
    pub counts: BTreeMap<&'static str, usize>,
    pub shares: BTreeMap<&'static str, f64>,
}

fn shares_from_counts(counts: BTreeMap<&'static str, usize>) -> ChannelShares {
    let n: usize = counts.values().sum();
    let shares = counts
        .iter()
        .map(|(k, v)| (*k, if n > 0 { *v as f64 / n as f64 } else { 0.0 }))
        .collect();
    ChannelShares {
        n_pairs: n,
        counts,
        shares,
    }
}

/// First-contact channel report, overall and for pairs whose first
/// contact happened after the restart.
#[derive(Debug, Clone, Serialize)]
pub struct FirstContactReport {
    /// Unique unordered author pairs (first contact deduplicates the
    /// direction).
    pub n_pairs_unordered: usize,
    /// Unique directed edges, for comparison.
    pub n_edges: usize,
    pub overall: ChannelShares,
    pub post_restart: ChannelShares,
}

/// Classify the earliest contact for every unordered author pair.
pub fn first_contact_report(corpus: &Corpus) -> Result<FirstContactReport> {
    // earliest comment per unordered pair, in corpus (time, id) order
    let mut first: HashMap<(String, String), (&Comment, &Post)> = HashMap::new();
    let mut ordered_edges: BTreeSet<(String, String)> = BTreeSet::new();
    for c in corpus.comments() {
        if c.author.is_empty() || c.orphaned {
            continue;
        }
        let Some(post) = corpus.post_by_id(&c.post_id) else {
            continue;
        };
        if post.author.is_empty() || post.author == c.author {
            continue;
        }
        ordered_edges.insert((c.author.clone(), post.author.clone()));
        let key = if c.author < post.author {
            (c.author.clone(), post.author.clone())
        } else {
            (post.author.clone(), c.author.clone())
        };
        first.entry(key).or_insert((c, post));
    }
    if first.is_empty() {
        return Err(Error::InsufficientData("no contacts in corpus".into()));
    }

    let restart = corpus.boundaries().restart_at;
    let mut overall: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut post_restart: BTreeMap<&'static str, usize> = BTreeMap::new();
    for channel in ContactChannel::ALL {
        overall.insert(channel.label(), 0);
        post_restart.insert(channel.label(), 0);
    }
    for (comment, post) in first.values() {
        let mention = detect_mention(&comment.body, &post.author);
        let channel = classify_first_contact(comment, post, mention);
        *overall.get_mut(channel.label()).unwrap() += 1;
        if comment.created_at >= restart {
            *post_restart.get_mut(channel.label()).unwrap() += 1;
        }
    }

    Ok(FirstContactReport {
        n_pairs_unordered: first.len(),
        n_edges: ordered_edges.len(),
        overall: shares_from_counts(overall),
        post_restart: shares_from_counts(post_restart),
    })
}

/// Combined metrics blob for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct GraphMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub reciprocity: ReciprocityReport,
    pub first_contacts: FirstContactReport,
}

pub fn graph_metrics(corpus: &Corpus) -> Result<GraphMetrics> {
    let g = build_graph(corpus);
    Ok(GraphMetrics {
        nodes: g.node_count(),
        edges: g.edge_count(),
        density: density(&g)?,
        reciprocity: reciprocity(&g)?,
        first_contacts: first_contact_report(corpus)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, ParseOptions, TimeBoundaries};
    use chrono::{DateTime, Duration, Utc};

    fn t0() -> DateTime<Utc> {
        crate::corpus::parse_timestamp("2026-01-28T00:00:00Z", false).unwrap()
    }

    fn post(id: &str, author: &str, at: DateTime<Utc>, upvotes: u64) -> Post {
        Post {
            id: id.to_string(),
            author: author.to_string(),
            created_at: at,
            title: None,
            body: "post body".to_string(),
            upvotes,
            comment_count: 0,
            submolt: None,
        }
    }

    fn comment(id: &str, post_id: &str, author: &str, at: DateTime<Utc>, body: &str) -> Comment {
        Comment {
            id: id.to_string(),
            post_id: post_id.to_string(),
            author: author.to_string(),
            created_at: at,
            body: body.to_string(),
            path: id.to_string(),
            orphaned: false,
        }
    }

    fn corpus_of(posts: Vec<Post>, comments: Vec<Comment>) -> Corpus {
        let mut b = CorpusBuilder::new(ParseOptions::default());
        for p in posts {
            b.push_post(p);
        }
        for c in comments {
            b.push_comment(c);
        }
        b.build(TimeBoundaries::default()).unwrap()
    }

    fn edge(s: &str, d: &str) -> (String, String) {
        (s.to_string(), d.to_string())
    }

    #[test]
    fn repeated_comments_collapse_to_one_edge_with_multiplicity() {
        let corpus = corpus_of(
            vec![post("p1", "b", t0(), 0)],
            vec![
                comment("c1", "p1", "a", t0() + Duration::minutes(1), "hi"),
                comment("c2", "p1", "a", t0() + Duration::minutes(2), "again"),
            ],
        );
        let g = build_graph(&corpus);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.multiplicity("a", "b"), 2);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn empty_corpus_builds_empty_graph() {
        let corpus = corpus_of(vec![], vec![]);
        let g = build_graph(&corpus);
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
        assert!(density(&g).is_err());
    }

    #[test]
    fn self_comments_and_blank_authors_excluded() {
        let corpus = corpus_of(
            vec![post("p1", "a", t0(), 0)],
            vec![
                comment("c1", "p1", "a", t0() + Duration::minutes(1), "self"),
                comment("c2", "p1", "", t0() + Duration::minutes(2), "anon"),
            ],
        );
        let g = build_graph(&corpus);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn density_of_complete_digraph_is_one() {
        let nodes = ["a", "b", "c"].map(String::from);
        let mut edges = Vec::new();
        for s in &nodes {
            for d in &nodes {
                if s != d {
                    edges.push((s.clone(), d.clone()));
                }
            }
        }
        let g = CommentGraph::from_parts(nodes, edges);
        assert_eq!(density(&g).unwrap(), 1.0);
    }

    #[test]
    fn density_three_nodes_one_edge() {
        let g = CommentGraph::from_parts(["a", "b", "c"].map(String::from), [edge("a", "b")]);
        assert!((density(&g).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocity_fixture() {
        let g = CommentGraph::from_parts([], [edge("a", "b"), edge("b", "a"), edge("a", "c")]);
        let r = reciprocity(&g).unwrap();
        assert_eq!(r.reciprocal_pairs, 1);
        assert!((r.rate - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocity_no_reverse_edges_is_zero() {
        let g = CommentGraph::from_parts([], [edge("a", "b"), edge("b", "c")]);
        assert_eq!(reciprocity(&g).unwrap().rate, 0.0);
    }

    #[test]
    fn reciprocity_empty_graph_errors() {
        let g = CommentGraph::default();
        assert!(reciprocity(&g).is_err());
    }

    /// Brute-force edge scan used as oracle for the reciprocity rate.
    fn brute_force_rate(edges: &[(String, String)]) -> f64 {
        let set: BTreeSet<&(String, String)> = edges.iter().collect();
        let participating = set
            .iter()
            .filter(|(s, d)| set.contains(&(d.clone(), s.clone())))
            .count();
        participating as f64 / set.len() as f64
    }

    #[test]
    fn reciprocity_matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n_nodes = rng.gen_range(2..10usize);
            let n_edges = rng.gen_range(1..=50usize);
            let mut edges = Vec::new();
            for _ in 0..n_edges {
                let s = rng.gen_range(0..n_nodes);
                let mut d = rng.gen_range(0..n_nodes);
                if d == s {
                    d = (d + 1) % n_nodes;
                }
                edges.push((format!("n{s}"), format!("n{d}")));
            }
            let g = CommentGraph::from_parts([], edges.clone());
            let got = reciprocity(&g).unwrap();
            let want = brute_force_rate(&edges);
            assert!(
                (got.rate - want).abs() < 1e-12,
                "edges={edges:?} got={} want={want}",
                got.rate
            );
        }
    }

    #[test]
    fn channel_thresholds() {
        let c = comment("c1", "p1", "a", t0(), "no mention here");
        assert_eq!(
            classify_first_contact(&c, &post("p1", "b", t0(), 5), false),
            ContactChannel::NewPost
        );
        assert_eq!(
            classify_first_contact(&c, &post("p1", "b", t0(), 50), false),
            ContactChannel::Organic
        );
        assert_eq!(
            classify_first_contact(&c, &post("p1", "b", t0(), 500), false),
            ContactChannel::TrendingPost
        );
        assert_eq!(
            classify_first_contact(&c, &post("p1", "b", t0(), 1500), false),
            ContactChannel::ViralPost
        );
    }

    #[test]
    fn mention_takes_precedence() {
        let c = comment("c1", "p1", "a", t0(), "hey @bob nice post");
        let p = post("p1", "bob", t0(), 500);
        let mention = detect_mention(&c.body, &p.author);
        assert!(mention);
        assert_eq!(
            classify_first_contact(&c, &p, mention),
            ContactChannel::Mention
        );
    }

    #[test]
    fn mention_requires_right_word_boundary() {
        assert!(detect_mention("ping @bob!", "bob"));
        assert!(detect_mention("cc @BOB", "bob"));
        assert!(!detect_mention("email @bobby", "bob"));
        assert!(!detect_mention("no at sign bob", "bob"));
    }

    #[test]
    fn first_contact_report_all_mentions() {
        let corpus = corpus_of(
            vec![post("p1", "bob", t0(), 500), post("p2", "eve", t0(), 5)],
            vec![
                comment("c1", "p1", "a", t0() + Duration::minutes(1), "hi @bob"),
                comment("c2", "p2", "b", t0() + Duration::minutes(2), "yo @eve"),
            ],
        );
        let r = first_contact_report(&corpus).unwrap();
        assert_eq!(r.n_pairs_unordered, 2);
        assert_eq!(r.overall.shares["mention"], 1.0);
    }

    #[test]
    fn first_contact_dedupes_unordered_pairs() {
        // a comments on b's post, then b comments on a's post: one pair,
        // first contact is the earlier comment (new post, 0 upvotes)
        let corpus = corpus_of(
            vec![post("p1", "b", t0(), 0), post("p2", "a", t0(), 2000)],
            vec![
                comment("c1", "p1", "a", t0() + Duration::minutes(1), "first"),
                comment("c2", "p2", "b", t0() + Duration::minutes(9), "reply back"),
            ],
        );
        let r = first_contact_report(&corpus).unwrap();
        assert_eq!(r.n_pairs_unordered, 1);
        assert_eq!(r.n_edges, 2);
        assert_eq!(r.overall.counts["new_post"], 1);
        assert_eq!(r.overall.counts["viral_post"], 0);
    }

    #[test]
    fn post_restart_subset_counts_new_connections() {
        let restart = TimeBoundaries::default().restart_at;
        let corpus = corpus_of(
            vec![
                post("p1", "b", t0(), 0),
                post("p2", "c", restart - Duration::hours(1), 0),
            ],
            vec![
                comment(
                    "c1",
                    "p1",
                    "a",
                    t0() + Duration::minutes(1),
                    "early contact",
                ),
                comment(
                    "c2",
                    "p2",
                    "a",
                    restart + Duration::hours(2),
                    "late contact",
                ),
            ],
        );
        let r = first_contact_report(&corpus).unwrap();
        assert_eq!(r.overall.n_pairs, 2);
        assert_eq!(r.post_restart.n_pairs, 1);
        assert_eq!(r.post_restart.counts["new_post"], 1);
    }

    #[test]
    fn channel_shares_sum_to_one() {
        let corpus = corpus_of(
            vec![
                post("p1", "b", t0(), 0),
                post("p2", "c", t0(), 50),
                post("p3", "d", t0(), 5000),
            ],
            vec![
                comment("c1", "p1", "a", t0() + Duration::minutes(1), "x"),
                comment("c2", "p2", "a", t0() + Duration::minutes(2), "y"),
                comment("c3", "p3", "a", t0() + Duration::minutes(3), "z"),
            ],
        );
        let r = first_contact_report(&corpus).unwrap();
        let total: f64 = r.overall.shares.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
