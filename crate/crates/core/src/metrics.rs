//! Lexical similarity metrics over normalized token sequences.
//!
//! All scores are fractions in `[0, 1]`. Rendering as percentages is left to
//! callers (the CLI prints `×100` with two decimals).
//!
//! The tokenizer here is shared with the corpus statistics so that lengths,
//! vocabulary counts and overlap metrics agree on what a "word" is.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("cannot average an empty list of scores")]
    EmptyList,
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("repetition threshold must be at least 2, got {0}")]
    BadThreshold(usize),
}

/// An ordered list of normalized tokens: lowercase, with leading and
/// trailing punctuation removed, never empty strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    /// First `len` tokens (or all of them when shorter).
    pub fn truncated(&self, len: usize) -> TokenSeq {
        TokenSeq(self.0[..len.min(self.0.len())].to_vec())
    }

    fn ngram_counts(&self, n: usize) -> HashMap<&[String], usize> {
        let mut counts = HashMap::new();
        if n == 0 || self.0.len() < n {
            return counts;
        }
        for gram in self.0.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
        counts
    }

    fn ngram_total(&self, n: usize) -> usize {
        (self.0.len() + 1).saturating_sub(n)
    }
}

impl From<Vec<String>> for TokenSeq {
    /// Builds a sequence from already-normalized tokens; empty strings are dropped.
    fn from(tokens: Vec<String>) -> Self {
        TokenSeq(tokens.into_iter().filter(|t| !t.is_empty()).collect())
    }
}

impl<'a> FromIterator<&'a str> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        TokenSeq(
            iter.into_iter()
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect(),
        )
    }
}

/// Normalizes one whitespace-delimited word, or returns `None` when nothing
/// but punctuation remains.
pub fn normalize_word(word: &str) -> Option<String> {
    let core = word.trim_matches(|c: char| !c.is_alphanumeric());
    if core.is_empty() {
        None
    } else {
        Some(core.to_lowercase())
    }
}

/// Splits on whitespace, strips leading/trailing non-alphanumeric characters
/// from every word and lowercases. Internal punctuation is kept, so
/// `"U.S."` becomes `"u.s"` and `"protein-coding"` stays intact.
pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq(text.split_whitespace().filter_map(normalize_word).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl MetricScore {
    pub const ZERO: MetricScore = MetricScore {
        precision: 0.0,
        recall: 0.0,
        f_measure: 0.0,
    };

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f_measure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        MetricScore {
            precision,
            recall,
            f_measure,
        }
    }

    fn from_overlap(overlap: usize, candidate_total: usize, reference_total: usize) -> Self {
        if candidate_total == 0 || reference_total == 0 {
            return MetricScore::ZERO;
        }
        if overlap == candidate_total && overlap == reference_total {
            return MetricScore {
                precision: 1.0,
                recall: 1.0,
                f_measure: 1.0,
            };
        }
        MetricScore::from_pr(
            overlap as f64 / candidate_total as f64,
            overlap as f64 / reference_total as f64,
        )
    }
}

fn clipped_overlap(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> usize {
    let reference_counts = reference.ngram_counts(n);
    candidate
        .ngram_counts(n)
        .into_iter()
        .map(|(gram, count)| count.min(reference_counts.get(gram).copied().unwrap_or(0)))
        .sum()
}

/// ROUGE-N with clipped n-gram counts.
///
/// Panics if `n == 0`.
pub fn rouge_n(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> MetricScore {
    assert!(n >= 1, "ROUGE-N order must be at least 1");
    MetricScore::from_overlap(
        clipped_overlap(candidate, reference, n),
        candidate.ngram_total(n),
        reference.ngram_total(n),
    )
}

/// Length of the longest common subsequence, computed with a two-row table.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Sentence-level ROUGE-L.
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> MetricScore {
    let lcs = lcs_len(candidate.tokens(), reference.tokens());
    MetricScore::from_overlap(lcs, candidate.len(), reference.len())
}

/// Sentence-level BLEU with brevity penalty.
///
/// Orders `n >= 2` whose clipped match count is zero use add-one smoothing,
/// `(0 + 1) / (total + 1)`. A zero unigram precision yields 0.
///
/// Panics if `max_n == 0`.
pub fn bleu(candidate: &TokenSeq, reference: &TokenSeq, max_n: usize) -> f64 {
    assert!(max_n >= 1, "BLEU order must be at least 1");
    let c = candidate.len();
    let r = reference.len();
    if c == 0 || r == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let matches = clipped_overlap(candidate, reference, n);
        let total = candidate.ngram_total(n);
        let precision = if matches > 0 {
            matches as f64 / total as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
    }
    let brevity = if c < r {
        (1.0 - r as f64 / c as f64).exp()
    } else {
        1.0
    };
    let score = brevity * (log_sum / max_n as f64).exp();
    score.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionFlag {
    pub repeated: bool,
    /// The first n-gram found repeating, joined with single spaces.
    pub ngram: Option<String>,
    /// Longest consecutive run length of `ngram`.
    pub run: usize,
}

/// Reports whether some n-gram occurs at least `threshold` times back to back.
pub fn flag_repetition(
    text: &str,
    n: usize,
    threshold: usize,
) -> Result<RepetitionFlag, MetricsError> {
    if n == 0 {
        return Err(MetricsError::ZeroOrder);
    }
    if threshold < 2 {
        return Err(MetricsError::BadThreshold(threshold));
    }
    let tokens = tokenize(text).into_inner();
    for start in 0..tokens.len() {
        let gram = match tokens.get(start..start + n) {
            Some(g) => g,
            None => break,
        };
        let mut run = 1;
        while tokens.get(start + run * n..start + (run + 1) * n) == Some(gram) {
            run += 1;
        }
        if run >= threshold {
            return Ok(RepetitionFlag {
                repeated: true,
                ngram: Some(gram.join(" ")),
                run,
            });
        }
    }
    Ok(RepetitionFlag {
        repeated: false,
        ngram: None,
        run: 0,
    })
}

/// Field-wise arithmetic mean.
pub fn corpus_mean(scores: &[MetricScore]) -> Result<MetricScore, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::EmptyList);
    }
    let n = scores.len() as f64;
    let sum = scores.iter().fold(MetricScore::ZERO, |acc, s| MetricScore {
        precision: acc.precision + s.precision,
        recall: acc.recall + s.recall,
        f_measure: acc.f_measure + s.f_measure,
    });
    Ok(MetricScore {
        precision: sum.precision / n,
        recall: sum.recall / n,
        f_measure: sum.f_measure / n,
    })
}
