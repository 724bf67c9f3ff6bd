//! Behavioral forensics for multi-agent social-platform dumps.
//!
//! This crate separates autonomous agent activity (periodic "heartbeat"
//! scheduling) from human-directed activity in post/comment corpora. It
//! combines several independent signal channels:
//!
//! - [`tempo`]: temporal fingerprinting via the coefficient of variation
//!   of inter-post intervals, sliding windows, and the restart
//!   re-engagement natural experiment
//! - [`influence`]: content feature channels and a weighted
//!   human-influence score, plus platform-scaffolding analysis
//! - [`provenance`]: owner-profile classification, batch-naming
//!   detection, and signal triangulation
//! - [`genealogy`]: tracing viral phenomena to first appearance and
//!   assigning seeding verdicts
//! - [`coordination`]: bot-farm detection from comment timing gaps,
//!   daily concentration, targeting, and embedding homogeneity
//! - [`graph`]: the directed comment network: density, reciprocity,
//!   first-contact channels
//! - [`decay`]: exponential decay of content characteristics through
//!   reply chains
//! - [`synth`]: a deterministic synthetic-society generator that serves
//!   as the ground-truth oracle for the detection pipeline
//! - [`stats`]: the self-contained statistics kernel used throughout
//!
//! All analyses run over an immutable [`corpus::Corpus`] snapshot loaded
//! from JSONL dumps.

pub mod coordination;
pub mod corpus;
pub mod decay;
pub mod error;
pub mod genealogy;
pub mod graph;
pub mod influence;
pub mod patterns;
pub mod provenance;
pub mod report;
pub mod stats;
pub mod synth;
pub mod tempo;

pub use error::{Error, Result};
