//! Building, validating, splitting and analyzing the paragraph/description
//! dataset.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{lcs_len, rouge_n, tokenize, TokenSeq};
use crate::wikiclient::{FetchError, IdUniverse, KnowledgeSource, Qid};

/// Paragraphs with fewer tokens than this are rejected.
pub const MIN_PARAGRAPH_TOKENS: usize = 10;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input text is empty")]
    EmptyInput,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
    #[error("prefix lengths must be positive and strictly ascending")]
    BadPrefixLengths,
    #[error("topic-exclusive split impossible: {0}")]
    TopicExhaustion(String),
    #[error("source exhausted after collecting {} of {target} samples", samples.len())]
    SourceExhausted { target: usize, samples: Vec<Sample> },
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub qid: Qid,
    pub label: String,
    pub description: String,
    #[serde(default)]
    pub instances: Vec<String>,
    pub title: String,
    pub paragraph: String,
    pub first_sentence: String,
}

impl Sample {
    /// Key used for topic-exclusive splitting: the first instance label.
    pub fn topic(&self) -> Option<&str> {
        self.instances.first().map(String::as_str)
    }
}

pub fn read_samples(reader: impl BufRead) -> Result<Vec<Sample>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_samples(mut writer: impl Write, samples: &[Sample]) -> Result<(), CorpusError> {
    for s in samples {
        serde_json::to_writer(&mut writer, s).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// text clean-up

fn is_zero_width(c: char) -> bool {
    matches!(
        c,
        '\u{00AD}'
            | '\u{200B}'
            | '\u{200C}'
            | '\u{200D}'
            | '\u{200E}'
            | '\u{200F}'
            | '\u{2060}'
            | '\u{FEFF}'
    )
}

fn normalize_quote(c: char) -> char {
    match c {
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' => '\'',
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' => '"',
        other => other,
    }
}

/// Collapses whitespace runs, drops control and zero-width characters,
/// straightens curly quotes and trims. Everything else is kept.
pub fn preprocess(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
        } else if c.is_control() || is_zero_width(c) {
            continue;
        } else {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(normalize_quote(c));
        }
    }
    out
}

const ABBREVIATIONS: &[&str] = &[
    "St", "Dr", "Mr", "Mrs", "Ms", "Jr", "Sr", "Prof", "Rev", "Gen", "Col", "Lt", "Sgt", "Capt",
    "Mt", "Ft", "No", "Nos", "Vol", "Inc", "Ltd", "Co", "Corp", "vs", "ca", "cf", "approx",
];

fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let mut chars = word.chars();
    let single_letter =
        matches!((chars.next(), chars.next()), (Some(c), None) if c.is_alphabetic());
    single_letter || word.contains('.') || ABBREVIATIONS.contains(&word)
}

/// Returns the first sentence of `paragraph`.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace and then an
/// uppercase letter or digit. A period does not end a sentence after a
/// single letter (`"S."`), an initialism containing a period (`"U.S."`), or
/// a word from a fixed abbreviation list (`"St."`, `"Dr."`, ...).
pub fn extract_first_sentence(paragraph: &str) -> Result<String, CorpusError> {
    let text = paragraph.trim();
    if text.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    for (i, c) in text.char_indices() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let rest = &text[i + c.len_utf8()..];
        let after_space = rest.trim_start();
        if after_space.len() == rest.len() {
            continue;
        }
        let starts_sentence = after_space
            .chars()
            .next()
            .is_some_and(|n| n.is_uppercase() || n.is_ascii_digit());
        if !starts_sentence {
            continue;
        }
        if c == '.' {
            let word = text[..i].rsplit(char::is_whitespace).next().unwrap_or("");
            if is_abbreviation(word) {
                continue;
            }
        }
        return Ok(text[..i + c.len_utf8()].to_owned());
    }
    Ok(text.to_owned())
}

// ---------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    EmptyDescription,
    ShortParagraph,
    Redirect,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::EmptyDescription => "empty_description",
            RejectReason::ShortParagraph => "short_paragraph",
            RejectReason::Redirect => "redirect",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Accept,
    Reject(RejectReason),
}

pub fn validate_sample(sample: &Sample, redirect: bool) -> Validation {
    if sample.description.trim().is_empty() {
        Validation::Reject(RejectReason::EmptyDescription)
    } else if tokenize(&sample.paragraph).len() < MIN_PARAGRAPH_TOKENS {
        Validation::Reject(RejectReason::ShortParagraph)
    } else if redirect {
        Validation::Reject(RejectReason::Redirect)
    } else {
        Validation::Accept
    }
}

/// The first instance label, used as a trivial baseline description.
pub fn baseline_description(sample: &Sample) -> Option<&str> {
    sample.topic()
}

// ---------------------------------------------------------------------------
// collection

#[derive(Debug)]
enum Outcome {
    Accepted(Sample),
    Rejected(RejectReason),
    Skipped,
}

fn build_sample(source: &dyn KnowledgeSource, qid: Qid) -> Result<Outcome, FetchError> {
    let entity = match source.fetch_entity(qid) {
        Ok(e) => e,
        Err(FetchError::NotFound(_)) => return Ok(Outcome::Skipped),
        Err(FetchError::Malformed(m)) => {
            log::warn!("{qid}: malformed entity response: {m}");
            return Ok(Outcome::Skipped);
        }
        Err(e) => return Err(e),
    };
    let Some(title) = entity.sitelink_title.filter(|t| !t.is_empty()) else {
        return Ok(Outcome::Skipped);
    };
    let intro = match source.fetch_article_intro(&title) {
        Ok(i) => i,
        Err(FetchError::NotFound(_)) => return Ok(Outcome::Skipped),
        Err(FetchError::Malformed(m)) => {
            log::warn!("{qid}: malformed intro response for {title:?}: {m}");
            return Ok(Outcome::Skipped);
        }
        Err(e) => return Err(e),
    };
    let paragraph = preprocess(&intro.first_paragraph);
    let first_sentence = extract_first_sentence(&paragraph).unwrap_or_default();
    let sample = Sample {
        qid,
        label: preprocess(&entity.label),
        description: preprocess(&entity.description),
        instances: entity.instances,
        title,
        paragraph,
        first_sentence,
    };
    Ok(match validate_sample(&sample, intro.is_redirect) {
        Validation::Accept => Outcome::Accepted(sample),
        Validation::Reject(r) => Outcome::Rejected(r),
    })
}

/// Draws unscanned ids uniformly from the source's id universe.
struct IdSampler {
    rng: ChaCha8Rng,
    universe: IdUniverse,
    scanned: HashSet<u64>,
}

impl IdSampler {
    fn next(&mut self) -> Option<u64> {
        match &mut self.universe {
            IdUniverse::Range { max } => {
                if self.scanned.len() as u64 >= *max {
                    return None;
                }
                loop {
                    let id = self.rng.random_range(1..=*max);
                    if self.scanned.insert(id) {
                        return Some(id);
                    }
                }
            }
            IdUniverse::Finite(remaining) => {
                if remaining.is_empty() {
                    return None;
                }
                let idx = self.rng.random_range(0..remaining.len());
                let id = remaining.swap_remove(idx);
                self.scanned.insert(id);
                Some(id)
            }
        }
    }
}

/// Randomly samples entities until `n` valid samples are collected.
///
/// Ids are drawn uniformly without repetition; each is fetched, cleaned and
/// validated, and accepted samples are kept in draw order. Up to
/// `source.max_in_flight()` ids are fetched concurrently; results are still
/// consumed in draw order so a fixed seed always yields the same samples.
pub fn collect(
    n: usize,
    source: &dyn KnowledgeSource,
    rng_seed: u64,
) -> Result<Vec<Sample>, CorpusError> {
    let mut sampler = IdSampler {
        rng: ChaCha8Rng::seed_from_u64(rng_seed),
        universe: source.id_universe(),
        scanned: HashSet::new(),
    };
    let workers = source.max_in_flight().max(1);
    let mut samples = Vec::with_capacity(n);
    let mut rejected: BTreeMap<RejectReason, usize> = BTreeMap::new();
    let mut skipped = 0usize;
    while samples.len() < n {
        let batch: Vec<Qid> = (0..workers)
            .map_while(|_| sampler.next())
            .filter_map(Qid::new)
            .collect();
        if batch.is_empty() {
            log::info!("source exhausted; rejected {rejected:?}, skipped {skipped}");
            return Err(CorpusError::SourceExhausted { target: n, samples });
        }
        let outcomes: Vec<Result<Outcome, FetchError>> = if batch.len() == 1 {
            vec![build_sample(source, batch[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch
                    .iter()
                    .map(|&qid| scope.spawn(move || build_sample(source, qid)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("collection worker panicked"))
                    .collect()
            })
        };
        for outcome in outcomes {
            match outcome? {
                Outcome::Accepted(s) if samples.len() < n => samples.push(s),
                Outcome::Accepted(_) => {}
                Outcome::Rejected(r) => *rejected.entry(r).or_default() += 1,
                Outcome::Skipped => skipped += 1,
            }
        }
    }
    log::info!(
        "collected {} samples; rejected {rejected:?}, skipped {skipped}",
        samples.len()
    );
    Ok(samples)
}

// ---------------------------------------------------------------------------
// splitting

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    TopicExclusive,
    TopicIndependent,
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::TopicExclusive => "topic-exclusive",
            SplitMode::TopicIndependent => "topic-independent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, CorpusError> {
        let all = [train, validation, test];
        if all.iter().any(|r| !(0.0..=1.0).contains(r))
            || (all.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(CorpusError::BadRatios(all));
        }
        Ok(SplitRatios {
            train,
            validation,
            test,
        })
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Sample>,
    pub validation: Vec<Sample>,
    pub test: Vec<Sample>,
    pub mode: SplitMode,
    pub ratios: SplitRatios,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub mode: SplitMode,
    pub ratios: SplitRatios,
    pub seed: u64,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl DatasetSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fractions of the split's samples in train, validation and test.
    pub fn achieved_ratios(&self) -> [f64; 3] {
        let total = self.len().max(1) as f64;
        [
            self.train.len() as f64 / total,
            self.validation.len() as f64 / total,
            self.test.len() as f64 / total,
        ]
    }

    pub fn manifest(&self) -> SplitManifest {
        SplitManifest {
            mode: self.mode,
            ratios: self.ratios,
            seed: self.seed,
            train: self.train.len(),
            validation: self.validation.len(),
            test: self.test.len(),
        }
    }
}

/// Partitions `dataset` into train, validation and test sets.
///
/// Topic-exclusive: samples without instances are dropped, topics (first
/// instance) are ranked by frequency and the most popular ones fill the
/// training set up to its ratio; the remaining topics are shuffled and
/// dealt to validation or test, whichever is further below its target.
///
/// Topic-independent: samples are shuffled and cut at the ratio boundaries.
pub fn split(
    dataset: &[Sample],
    mode: SplitMode,
    ratios: SplitRatios,
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    let ratios = SplitRatios::new(ratios.train, ratios.validation, ratios.test)?;
    if dataset.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, validation, test) = match mode {
        SplitMode::TopicIndependent => {
            let mut order: Vec<usize> = (0..dataset.len()).collect();
            order.shuffle(&mut rng);
            let n = dataset.len() as f64;
            let n_train = (ratios.train * n).round() as usize;
            let n_val = ((ratios.validation * n).round() as usize).min(dataset.len() - n_train);
            let pick = |idx: &[usize]| idx.iter().map(|&i| dataset[i].clone()).collect::<Vec<_>>();
            (
                pick(&order[..n_train]),
                pick(&order[n_train..n_train + n_val]),
                pick(&order[n_train + n_val..]),
            )
        }
        SplitMode::TopicExclusive => exclusive_split(dataset, ratios, &mut rng)?,
    };
    Ok(DatasetSplit {
        train,
        validation,
        test,
        mode,
        ratios,
        seed,
    })
}

type Sets = (Vec<Sample>, Vec<Sample>, Vec<Sample>);

fn exclusive_split(
    dataset: &[Sample],
    ratios: SplitRatios,
    rng: &mut ChaCha8Rng,
) -> Result<Sets, CorpusError> {
    let mut groups: Vec<(&str, Vec<&Sample>)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for s in dataset {
        if let Some(topic) = s.topic() {
            let slot = *index.entry(topic).or_insert_with(|| {
                groups.push((topic, Vec::new()));
                groups.len() - 1
            });
            groups[slot].1.push(s);
        }
    }
    let total: usize = groups.iter().map(|(_, g)| g.len()).sum();
    if total == 0 {
        return Err(CorpusError::EmptyDataset);
    }
    groups.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(b.0)));

    let needs_val = ratios.validation > 0.0;
    let needs_test = ratios.test > 0.0;
    let held_out_topics = usize::from(needs_val) + usize::from(needs_test);
    if groups.len() < 1 + held_out_topics {
        return Err(CorpusError::TopicExhaustion(format!(
            "{} topic(s) cannot fill {} disjoint non-empty sets",
            groups.len(),
            1 + held_out_topics
        )));
    }

    let train_target = ratios.train * total as f64;
    let max_prefix = groups.len() - held_out_topics;
    let mut cumulative = 0usize;
    let mut prefix = max_prefix;
    for (k, (_, g)) in groups.iter().enumerate().take(max_prefix) {
        let before = cumulative;
        cumulative += g.len();
        if cumulative as f64 >= train_target {
            let overshoot = cumulative as f64 - train_target;
            let undershoot = train_target - before as f64;
            prefix = if undershoot < overshoot && k > 0 {
                k
            } else {
                k + 1
            };
            break;
        }
    }

    let mut rest: Vec<&(&str, Vec<&Sample>)> = groups[prefix..].iter().collect();
    rest.shuffle(rng);
    let val_target = ratios.validation * total as f64;
    let test_target = ratios.test * total as f64;
    let (mut val_groups, mut test_groups) = (Vec::new(), Vec::new());
    let (mut val_count, mut test_count) = (0usize, 0usize);
    for group in rest {
        let val_deficit = val_target - val_count as f64;
        let test_deficit = test_target - test_count as f64;
        if needs_val && (!needs_test || val_deficit >= test_deficit) {
            val_count += group.1.len();
            val_groups.push(group);
        } else {
            test_count += group.1.len();
            test_groups.push(group);
        }
    }
    if (needs_val && val_groups.is_empty()) || (needs_test && test_groups.is_empty()) {
        return Err(CorpusError::TopicExhaustion(
            "not enough held-out topics for validation and test".into(),
        ));
    }
    let flatten = |gs: &[&(&str, Vec<&Sample>)]| -> Vec<Sample> {
        gs.iter()
            .flat_map(|(_, g)| g.iter().map(|s| (*s).clone()))
            .collect()
    };
    let train_groups: Vec<_> = groups[..prefix].iter().collect();
    Ok((
        flatten(&train_groups),
        flatten(&val_groups),
        flatten(&test_groups),
    ))
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub samples: usize,
    pub avg_doc_len: f64,
    pub avg_summ_len: f64,
    pub compression_ratio: f64,
    /// Unique normalized words across paragraphs and descriptions.
    pub vocab_size: usize,
    /// First-instance topic counts; samples without instances are not counted.
    pub instance_histogram: BTreeMap<String, usize>,
}

/// Average document length over average summary length (0 when the summaries are empty).
pub fn compression_ratio(avg_doc_len: f64, avg_summ_len: f64) -> f64 {
    if avg_summ_len > 0.0 {
        avg_doc_len / avg_summ_len
    } else {
        0.0
    }
}

pub fn corpus_stats(dataset: &[Sample]) -> Result<CorpusStats, CorpusError> {
    if dataset.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    let mut vocab: HashSet<String> = HashSet::new();
    let mut histogram = BTreeMap::new();
    let (mut doc_tokens, mut summ_tokens) = (0usize, 0usize);
    for s in dataset {
        let para = tokenize(&s.paragraph);
        let desc = tokenize(&s.description);
        doc_tokens += para.len();
        summ_tokens += desc.len();
        vocab.extend(para.into_inner());
        vocab.extend(desc.into_inner());
        if let Some(topic) = s.topic() {
            *histogram.entry(topic.to_owned()).or_insert(0) += 1;
        }
    }
    let n = dataset.len() as f64;
    let avg_doc_len = doc_tokens as f64 / n;
    let avg_summ_len = summ_tokens as f64 / n;
    Ok(CorpusStats {
        samples: dataset.len(),
        avg_doc_len,
        avg_summ_len,
        compression_ratio: compression_ratio(avg_doc_len, avg_summ_len),
        vocab_size: vocab.len(),
        instance_histogram: histogram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefixOverlapRow {
    pub prefix_len: usize,
    pub rouge1_precision: f64,
    pub rouge2_precision: f64,
    pub rougel_precision: f64,
}

/// Mean ROUGE-1/2/L precision of each description against the first
/// `len` tokens of its paragraph, for every requested length.
pub fn prefix_overlap(
    dataset: &[Sample],
    prefix_lengths: &[usize],
) -> Result<Vec<PrefixOverlapRow>, CorpusError> {
    if dataset.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }
    if prefix_lengths.is_empty()
        || prefix_lengths[0] == 0
        || prefix_lengths.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(CorpusError::BadPrefixLengths);
    }
    let pairs: Vec<(TokenSeq, TokenSeq)> = dataset
        .iter()
        .map(|s| (tokenize(&s.description), tokenize(&s.paragraph)))
        .collect();
    let n = pairs.len() as f64;
    Ok(prefix_lengths
        .iter()
        .map(|&len| {
            let (mut r1, mut r2, mut rl) = (0.0, 0.0, 0.0);
            for (desc, para) in &pairs {
                let prefix = para.truncated(len);
                r1 += rouge_n(desc, &prefix, 1).precision;
                r2 += rouge_n(desc, &prefix, 2).precision;
                if !desc.is_empty() {
                    rl += lcs_len(desc.tokens(), prefix.tokens()) as f64 / desc.len() as f64;
                }
            }
            PrefixOverlapRow {
                prefix_len: len,
                rouge1_precision: r1 / n,
                rouge2_precision: r2 / n,
                rougel_precision: rl / n,
            }
        })
        .collect())
}
