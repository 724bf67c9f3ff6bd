//! Keyword/regex matching shared by the content channels.
//!
//! Pattern lists are plain text: one pattern per line. A line wrapped in
//! slashes (`/…/`) is compiled as a case-insensitive regex; anything else
//! is matched as a case-insensitive substring. `#` starts a comment.
//! Channel files may carry `[strong]` / `[weak]` section headers.

use regex::Regex;

use crate::error::{Error, Result};

/// One compiled pattern: literal substring (pre-lowercased) or regex.
#[derive(Debug, Clone)]
enum Pattern {
    Literal(String),
    Regex(Regex),
}

/// An ordered set of patterns matched against lowercased text.
#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
    sources: Vec<String>,
}

impl PatternSet {
    pub fn compile(entries: &[&str]) -> Result<Self> {
        let mut set = PatternSet::default();
        for e in entries {
            set.push(e)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, entry: &str) -> Result<()> {
        let entry = entry.trim();
        if entry.is_empty() {
            return Ok(());
        }
        let pat = if entry.len() >= 2 && entry.starts_with('/') && entry.ends_with('/') {
            let body = &entry[1..entry.len() - 1];
            let re = Regex::new(&format!("(?i){body}"))
                .map_err(|e| Error::Config(format!("bad pattern regex {entry:?}: {e}")))?;
            Pattern::Regex(re)
        } else {
            Pattern::Literal(entry.to_lowercase())
        };
        self.patterns.push(pat);
        self.sources.push(entry.to_string());
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Match against text that the caller has already lowercased.
    pub fn matches_lower(&self, lower: &str) -> bool {
        self.patterns.iter().any(|p| match p {
            Pattern::Literal(s) => lower.contains(s.as_str()),
            Pattern::Regex(re) => re.is_match(lower),
        })
    }

    /// The raw pattern strings this set was built from.
    pub fn sources(&self) -> &[String] {
        &self.sources
    }
}

/// Lowercase text once before running it through several pattern sets.
pub fn fold_text(text: &str) -> String {
    text.to_lowercase()
}

/// A two-tier channel: strong patterns checked before weak ones.
#[derive(Debug, Clone, Default)]
pub struct TieredPatterns {
    pub strong: PatternSet,
    pub weak: PatternSet,
}

impl TieredPatterns {
    pub fn compile(strong: &[&str], weak: &[&str]) -> Result<Self> {
        Ok(TieredPatterns {
            strong: PatternSet::compile(strong)?,
            weak: PatternSet::compile(weak)?,
        })
    }

    /// Parse a channel list file: lines of patterns, optional `[strong]`
    /// and `[weak]` section headers (strong is the default section).
    pub fn parse_file(content: &str) -> Result<Self> {
        let mut tiers = TieredPatterns::default();
        let mut in_weak = false;
        for line in content.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[strong]" => in_weak = false,
                "[weak]" => in_weak = true,
                _ => {
                    if in_weak {
                        tiers.weak.push(line)?;
                    } else {
                        tiers.strong.push(line)?;
                    }
                }
            }
        }
        Ok(tiers)
    }
}

/// Parse a flat (single-tier) pattern list file.
pub fn parse_list_file(content: &str) -> Result<PatternSet> {
    let mut set = PatternSet::default();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "[strong]" {
            continue;
        }
        set.push(line)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_matching_is_case_insensitive_substring() {
        let set = PatternSet::compile(&["church of molt", "$molt"]).unwrap();
        assert!(set.matches_lower(&fold_text("The Church of Molt is open")));
        assert!(set.matches_lower(&fold_text("buy $MOLT now")));
        assert!(!set.matches_lower(&fold_text("hello world")));
    }

    #[test]
    fn regex_patterns_are_supported() {
        let set = PatternSet::compile(&["/communicat(e|ing) in/"]).unwrap();
        assert!(set.matches_lower(&fold_text("they communicate in code")));
        assert!(set.matches_lower(&fold_text("Communicating in ciphers")));
        assert!(!set.matches_lower(&fold_text("communication breakdown")));
    }

    #[test]
    fn channel_file_sections() {
        let tiers =
            TieredPatterns::parse_file("# version: 1\nalpha\n[weak]\nbeta\n[strong]\ngamma\n")
                .unwrap();
        assert!(tiers.strong.matches_lower("there is alpha here"));
        assert!(tiers.strong.matches_lower("gamma ray"));
        assert!(tiers.weak.matches_lower("beta test"));
        assert!(!tiers.weak.matches_lower("alpha"));
    }

    #[test]
    fn bad_regex_is_a_config_error() {
        assert!(PatternSet::compile(&["/todo(/"]).is_err());
    }
}
