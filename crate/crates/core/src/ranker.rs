//! Candidate scoring, reranking and contrastive training.
//!
//! A candidate description is scored against a reference text with one of
//! three evaluation functions: clamped cosine similarity of embeddings,
//! ROUGE-1 F-measure, or their harmonic mean. Embeddings are produced
//! elsewhere and loaded into an [`EmbeddingTable`]. The only trainable part
//! is a square projection applied to every embedding before the cosine term,
//! trained on a margin ranking loss with analytic gradients.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metrics::{rouge_n, tokenize, TokenSeq};

pub const DEFAULT_MARGIN: f64 = 0.01;
/// Standard deviation of the noise added to the identity at initialization.
pub const INIT_NOISE_STD: f64 = 0.01;

#[derive(Debug, Error)]
pub enum RankerError {
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("no embedding for text {0:?}")]
    MissingEmbedding(String),
    #[error("mode {0} needs an embedding table")]
    NoEmbeddings(ScoreMode),
    #[error("embedding {0:?} has non-finite entries")]
    NonFiniteEmbedding(String),
    #[error("invalid candidate set {id:?}: {reason}")]
    InvalidCandidateSet { id: String, reason: String },
    #[error("invalid scorer parameters: {0}")]
    InvalidParams(String),
    #[error("mode {0} has no trainable parameters")]
    NotTrainable(ScoreMode),
    #[error("epochs must be at least 1")]
    NoEpochs,
    #[error("training diverged at epoch {0}: loss or gradient is not finite")]
    NonFiniteLoss(usize),
    #[error("empty list of candidate sets")]
    EmptyList,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    Cosine,
    Rouge1,
    Fused,
}

impl ScoreMode {
    fn uses_embeddings(self) -> bool {
        !matches!(self, ScoreMode::Rouge1)
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Cosine => "cosine",
            ScoreMode::Rouge1 => "rouge1",
            ScoreMode::Fused => "fused",
        })
    }
}

/// Which text candidates are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Paragraph,
    Gold,
}

/// Margin between the candidates at sorted positions `i < j` (1-based).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginSchedule {
    /// `(j - i) * lambda_candidate`
    #[default]
    Pairwise,
    /// `i * lambda_candidate`
    Positional,
}

impl MarginSchedule {
    fn margin(self, i: usize, j: usize, lambda: f64) -> f64 {
        match self {
            MarginSchedule::Pairwise => (j - i) as f64 * lambda,
            MarginSchedule::Positional => i as f64 * lambda,
        }
    }
}

// ---------------------------------------------------------------------------
// data

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub id: String,
    pub paragraph: String,
    pub gold: String,
    /// Candidate descriptions in generation order.
    pub candidates: Vec<String>,
}

impl CandidateSet {
    pub fn validate(&self) -> Result<(), RankerError> {
        let bad = |reason: &str| RankerError::InvalidCandidateSet {
            id: self.id.clone(),
            reason: reason.to_owned(),
        };
        if self.candidates.is_empty() {
            return Err(bad("no candidates"));
        }
        if self.paragraph.trim().is_empty() {
            return Err(bad("empty paragraph"));
        }
        if self.gold.trim().is_empty() {
            return Err(bad("empty gold description"));
        }
        Ok(())
    }

    fn reference(&self, reference: Reference) -> &str {
        match reference {
            Reference::Paragraph => &self.paragraph,
            Reference::Gold => &self.gold,
        }
    }
}

fn parse_jsonl<T: serde::de::DeserializeOwned>(
    reader: impl BufRead,
) -> Result<Vec<T>, RankerError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| RankerError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Reads candidate sets, one JSON object per line, validating each.
pub fn read_candidate_sets(reader: impl BufRead) -> Result<Vec<CandidateSet>, RankerError> {
    let sets: Vec<CandidateSet> = parse_jsonl(reader)?;
    for s in &sets {
        s.validate()?;
    }
    Ok(sets)
}

/// Content id of a text: `sha256:` followed by the lowercase hex digest.
pub fn text_id(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

#[derive(Debug, Deserialize, Serialize)]
struct EmbeddingLine {
    id: String,
    vector: Vec<f64>,
}

/// Text id → embedding vector. Ids are either the text itself or its
/// [`text_id`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    entries: HashMap<String, DVector<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            entries: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<(), RankerError> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(RankerError::DimensionMismatch(self.dim, vector.len()));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(RankerError::NonFiniteEmbedding(id));
        }
        self.entries.insert(id, DVector::from_vec(vector));
        Ok(())
    }

    /// Looks `text` up by literal id first, then by content id.
    pub fn get(&self, text: &str) -> Option<&DVector<f64>> {
        self.entries
            .get(text)
            .or_else(|| self.entries.get(&text_id(text)))
    }

    fn lookup(&self, text: &str) -> Result<&DVector<f64>, RankerError> {
        self.get(text).ok_or_else(|| {
            let shown: String = text.chars().take(60).collect();
            RankerError::MissingEmbedding(shown)
        })
    }

    /// Reads `{id, vector}` lines; the dimension is taken from the first line.
    pub fn read(reader: impl BufRead) -> Result<Self, RankerError> {
        let lines: Vec<EmbeddingLine> = parse_jsonl(reader)?;
        let dim = lines.first().map_or(0, |l| l.vector.len());
        let mut table = EmbeddingTable::new(dim);
        for (i, l) in lines.into_iter().enumerate() {
            table
                .insert(l.id, l.vector)
                .map_err(|e| RankerError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(table)
    }

    /// Writes entries sorted by id.
    pub fn write(&self, mut writer: impl Write) -> Result<(), RankerError> {
        let mut ids: Vec<&String> = self.entries.keys().collect();
        ids.sort();
        for id in ids {
            let line = EmbeddingLine {
                id: id.clone(),
                vector: self.entries[id].iter().copied().collect(),
            };
            serde_json::to_writer(&mut writer, &line).map_err(std::io::Error::from)?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Trainable projection and margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsWire", into = "ParamsWire")]
pub struct ScorerParams {
    pub projection: DMatrix<f64>,
    pub lambda_gold: f64,
    pub lambda_candidate: f64,
    pub margin_schedule: MarginSchedule,
}

#[derive(Serialize, Deserialize)]
struct ParamsWire {
    dim: usize,
    projection: Vec<f64>,
    lambda_gold: f64,
    lambda_candidate: f64,
    #[serde(default, skip_serializing_if = "is_pairwise")]
    margin_schedule: MarginSchedule,
}

fn is_pairwise(m: &MarginSchedule) -> bool {
    *m == MarginSchedule::Pairwise
}

impl TryFrom<ParamsWire> for ScorerParams {
    type Error = RankerError;

    fn try_from(w: ParamsWire) -> Result<Self, Self::Error> {
        if w.projection.len() != w.dim * w.dim {
            return Err(RankerError::InvalidParams(format!(
                "projection has {} entries, expected {}",
                w.projection.len(),
                w.dim * w.dim
            )));
        }
        let params = ScorerParams {
            projection: DMatrix::from_row_slice(w.dim, w.dim, &w.projection),
            lambda_gold: w.lambda_gold,
            lambda_candidate: w.lambda_candidate,
            margin_schedule: w.margin_schedule,
        };
        params.check()?;
        Ok(params)
    }
}

impl From<ScorerParams> for ParamsWire {
    fn from(p: ScorerParams) -> Self {
        let dim = p.projection.nrows();
        let mut projection = Vec::with_capacity(dim * dim);
        for row in p.projection.row_iter() {
            projection.extend(row.iter().copied());
        }
        ParamsWire {
            dim,
            projection,
            lambda_gold: p.lambda_gold,
            lambda_candidate: p.lambda_candidate,
            margin_schedule: p.margin_schedule,
        }
    }
}

impl ScorerParams {
    pub fn identity(dim: usize) -> Self {
        ScorerParams {
            projection: DMatrix::identity(dim, dim),
            lambda_gold: DEFAULT_MARGIN,
            lambda_candidate: DEFAULT_MARGIN,
            margin_schedule: MarginSchedule::Pairwise,
        }
    }

    /// Identity plus Gaussian noise with standard deviation [`INIT_NOISE_STD`].
    pub fn init(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, INIT_NOISE_STD).expect("valid normal");
        let mut params = ScorerParams::identity(dim);
        for v in params.projection.iter_mut() {
            *v += noise.sample(&mut rng);
        }
        params
    }

    pub fn dim(&self) -> usize {
        self.projection.nrows()
    }

    pub fn check(&self) -> Result<(), RankerError> {
        if !self.projection.is_square() {
            return Err(RankerError::InvalidParams(
                "projection is not square".into(),
            ));
        }
        if self.projection.iter().any(|v| !v.is_finite()) {
            return Err(RankerError::InvalidParams(
                "non-finite projection entry".into(),
            ));
        }
        if !(self.lambda_gold >= 0.0 && self.lambda_candidate >= 0.0)
            || !self.lambda_gold.is_finite()
            || !self.lambda_candidate.is_finite()
        {
            return Err(RankerError::InvalidParams(
                "margins must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// scoring primitives

/// Cosine similarity with negative values clamped to 0.
pub fn clamped_cosine(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64, RankerError> {
    raw_cosine(a, b).map(|c| c.clamp(0.0, 1.0))
}

fn raw_cosine(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64, RankerError> {
    if a.len() != b.len() {
        return Err(RankerError::DimensionMismatch(a.len(), b.len()));
    }
    let aa = a.dot(a);
    let bb = b.dot(b);
    if aa == 0.0 || bb == 0.0 {
        return Err(RankerError::ZeroVector);
    }
    Ok(a.dot(b) / (aa * bb).sqrt())
}

/// Harmonic mean of a lexical and a semantic score; 0 when both are 0.
pub fn harmonic_fusion(r: f64, c: f64) -> f64 {
    if r + c > 0.0 {
        2.0 * r * c / (r + c)
    } else {
        0.0
    }
}

fn rouge1_f(a: &TokenSeq, b: &TokenSeq) -> f64 {
    rouge_n(a, b, 1).f_measure
}

/// Scores `candidate` against `reference`.
///
/// With `params`, embeddings are multiplied by the projection before the
/// cosine term. The ROUGE term always uses the raw texts.
pub fn eval_f(
    candidate: &str,
    reference: &str,
    mode: ScoreMode,
    embeddings: Option<&EmbeddingTable>,
    params: Option<&ScorerParams>,
) -> Result<f64, RankerError> {
    let rouge = || rouge1_f(&tokenize(candidate), &tokenize(reference));
    let cosine = || -> Result<f64, RankerError> {
        let table = embeddings.ok_or(RankerError::NoEmbeddings(mode))?;
        let a = table.lookup(candidate)?;
        let b = table.lookup(reference)?;
        match params {
            Some(p) => clamped_cosine(&(&p.projection * a), &(&p.projection * b)),
            None => clamped_cosine(a, b),
        }
    };
    Ok(match mode {
        ScoreMode::Rouge1 => rouge(),
        ScoreMode::Cosine => cosine()?,
        ScoreMode::Fused => harmonic_fusion(rouge(), cosine()?),
    })
}

// ---------------------------------------------------------------------------
// ranking

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    /// Position in generation order.
    pub index: usize,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedOutput {
    pub id: String,
    pub best: String,
    pub gold: String,
    /// Candidates by descending score; equal scores keep generation order.
    pub ranked: Vec<RankedCandidate>,
}

/// Indices of `scores` ordered by descending score, stable on ties.
fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Scores candidates against the paragraph and sorts them.
pub fn rank_candidates(
    set: &CandidateSet,
    mode: ScoreMode,
    embeddings: Option<&EmbeddingTable>,
    params: Option<&ScorerParams>,
) -> Result<RankedOutput, RankerError> {
    rank_against(set, Reference::Paragraph, mode, embeddings, params)
}

pub fn rank_against(
    set: &CandidateSet,
    reference: Reference,
    mode: ScoreMode,
    embeddings: Option<&EmbeddingTable>,
    params: Option<&ScorerParams>,
) -> Result<RankedOutput, RankerError> {
    set.validate()?;
    let target = set.reference(reference);
    let scores = set
        .candidates
        .iter()
        .map(|c| eval_f(c, target, mode, embeddings, params))
        .collect::<Result<Vec<_>, _>>()?;
    let ranked: Vec<RankedCandidate> = descending_order(&scores)
        .into_iter()
        .map(|i| RankedCandidate {
            index: i,
            text: set.candidates[i].clone(),
            score: scores[i],
        })
        .collect();
    Ok(RankedOutput {
        id: set.id.clone(),
        best: ranked[0].text.clone(),
        gold: set.gold.clone(),
        ranked,
    })
}

// ---------------------------------------------------------------------------
// losses

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub gold_part: f64,
    pub candidate_part: f64,
}

/// Margin ranking loss from precomputed scores, plus the derivative of the
/// total with respect to each candidate score and the gold score.
fn margin_loss_with_coefficients(
    candidate_scores: &[f64],
    gold_score: f64,
    params: &ScorerParams,
) -> (LossBreakdown, Vec<f64>, f64) {
    let order = descending_order(candidate_scores);
    let mut coef = vec![0.0; candidate_scores.len()];
    let mut gold_coef = 0.0;
    let mut gold_part = 0.0;
    for (i, &s) in candidate_scores.iter().enumerate() {
        let t = s - gold_score + params.lambda_gold;
        if t > 0.0 {
            gold_part += t;
            coef[i] += 1.0;
            gold_coef -= 1.0;
        }
    }
    let mut candidate_part = 0.0;
    for (a, &hi) in order.iter().enumerate() {
        for (b, &lo) in order.iter().enumerate().skip(a + 1) {
            let margin = params
                .margin_schedule
                .margin(a + 1, b + 1, params.lambda_candidate);
            let t = candidate_scores[lo] - candidate_scores[hi] + margin;
            if t > 0.0 {
                candidate_part += t;
                coef[lo] += 1.0;
                coef[hi] -= 1.0;
            }
        }
    }
    (
        LossBreakdown {
            total: gold_part + candidate_part,
            gold_part,
            candidate_part,
        },
        coef,
        gold_coef,
    )
}

/// Margin ranking loss over candidate scores already computed against the
/// paragraph. Candidates are sorted by descending score before the pairwise
/// part is evaluated.
pub fn margin_loss(
    candidate_scores: &[f64],
    gold_score: f64,
    params: &ScorerParams,
) -> LossBreakdown {
    margin_loss_with_coefficients(candidate_scores, gold_score, params).0
}

pub fn ranking_loss(
    set: &CandidateSet,
    mode: ScoreMode,
    embeddings: Option<&EmbeddingTable>,
    params: &ScorerParams,
) -> Result<LossBreakdown, RankerError> {
    set.validate()?;
    let scores = set
        .candidates
        .iter()
        .map(|c| eval_f(c, &set.paragraph, mode, embeddings, Some(params)))
        .collect::<Result<Vec<_>, _>>()?;
    let gold = eval_f(&set.gold, &set.paragraph, mode, embeddings, Some(params))?;
    Ok(margin_loss(&scores, gold, params))
}

/// `1 - mean f(best, gold)`, where the best candidate of each set is chosen
/// against its paragraph.
pub fn validation_loss(
    sets: &[CandidateSet],
    mode: ScoreMode,
    embeddings: Option<&EmbeddingTable>,
    params: Option<&ScorerParams>,
) -> Result<f64, RankerError> {
    if sets.is_empty() {
        return Err(RankerError::EmptyList);
    }
    let mut total = 0.0;
    for set in sets {
        let ranked = rank_candidates(set, mode, embeddings, params)?;
        total += eval_f(&ranked.best, &set.gold, mode, embeddings, params)?;
    }
    Ok(1.0 - total / sets.len() as f64)
}

// ---------------------------------------------------------------------------
// gradients

/// A candidate set with everything that does not depend on the projection
/// computed once.
#[derive(Debug, Clone)]
struct PreparedSet {
    paragraph: DVector<f64>,
    gold: DVector<f64>,
    candidates: Vec<DVector<f64>>,
    /// ROUGE-1 F against the paragraph: gold first, then each candidate.
    gold_rouge: f64,
    candidate_rouge: Vec<f64>,
}

impl PreparedSet {
    fn new(set: &CandidateSet, table: &EmbeddingTable) -> Result<Self, RankerError> {
        set.validate()?;
        let para_tokens = tokenize(&set.paragraph);
        let rouge = |t: &str| rouge1_f(&tokenize(t), &para_tokens);
        Ok(PreparedSet {
            paragraph: table.lookup(&set.paragraph)?.clone(),
            gold: table.lookup(&set.gold)?.clone(),
            candidates: set
                .candidates
                .iter()
                .map(|c| table.lookup(c).cloned())
                .collect::<Result<_, _>>()?,
            gold_rouge: rouge(&set.gold),
            candidate_rouge: set.candidates.iter().map(|c| rouge(c)).collect(),
        })
    }
}

/// Score of `y` against the paragraph projection `u = W x` and its gradient
/// with respect to `W`.
struct ScoreGrad {
    score: f64,
    /// d score / d u and d score / d v, where v = W y.
    du: DVector<f64>,
    dv: DVector<f64>,
}

fn score_with_grad(
    u: &DVector<f64>,
    v: &DVector<f64>,
    rouge: f64,
    mode: ScoreMode,
) -> Result<ScoreGrad, RankerError> {
    let cos = raw_cosine(u, v)?;
    let nu = u.norm();
    let nv = v.norm();
    let (c, mut du, mut dv) = if cos > 0.0 {
        let du = v / (nu * nv) - u * (cos / (nu * nu));
        let dv = u / (nu * nv) - v * (cos / (nv * nv));
        (cos.min(1.0), du, dv)
    } else {
        (0.0, DVector::zeros(u.len()), DVector::zeros(u.len()))
    };
    let (score, outer) = match mode {
        ScoreMode::Cosine => (c, 1.0),
        ScoreMode::Fused => {
            let denom = rouge + c;
            if denom > 0.0 {
                (
                    harmonic_fusion(rouge, c),
                    2.0 * rouge * rouge / (denom * denom),
                )
            } else {
                (0.0, 0.0)
            }
        }
        ScoreMode::Rouge1 => return Err(RankerError::NotTrainable(mode)),
    };
    du *= outer;
    dv *= outer;
    Ok(ScoreGrad { score, du, dv })
}

fn prepared_loss_and_grad(
    set: &PreparedSet,
    mode: ScoreMode,
    params: &ScorerParams,
) -> Result<(LossBreakdown, DMatrix<f64>), RankerError> {
    let w = &params.projection;
    let u = w * &set.paragraph;
    let gold = score_with_grad(&u, &(w * &set.gold), set.gold_rouge, mode)?;
    let cands = set
        .candidates
        .iter()
        .zip(&set.candidate_rouge)
        .map(|(y, &r)| score_with_grad(&u, &(w * y), r, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let scores: Vec<f64> = cands.iter().map(|c| c.score).collect();
    let (loss, coef, gold_coef) = margin_loss_with_coefficients(&scores, gold.score, params);

    // dL/dW = (sum_k c_k du_k) x^T + sum_k c_k dv_k y_k^T
    let mut du_total = &gold.du * gold_coef;
    let mut grad = (&gold.dv * gold_coef) * set.gold.transpose();
    for ((cg, y), &c) in cands.iter().zip(&set.candidates).zip(&coef) {
        if c != 0.0 {
            du_total += &cg.du * c;
            grad += (&cg.dv * c) * y.transpose();
        }
    }
    grad += du_total * set.paragraph.transpose();
    Ok((loss, grad))
}

/// Ranking loss of one set and its gradient with respect to the projection.
pub fn ranking_loss_gradient(
    set: &CandidateSet,
    mode: ScoreMode,
    embeddings: &EmbeddingTable,
    params: &ScorerParams,
) -> Result<(LossBreakdown, DMatrix<f64>), RankerError> {
    if !mode.uses_embeddings() {
        return Err(RankerError::NotTrainable(mode));
    }
    prepared_loss_and_grad(&PreparedSet::new(set, embeddings)?, mode, params)
}

// ---------------------------------------------------------------------------
// training

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean ranking loss over the training sets before this epoch's update.
    pub train_loss: f64,
    /// Validation loss after this epoch's update.
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters with the lowest validation loss seen (epoch 0 is the start).
    pub params: ScorerParams,
    pub best_epoch: usize,
    pub initial_validation_loss: f64,
    pub best_validation_loss: f64,
    pub history: Vec<EpochRecord>,
}

/// Full-batch gradient descent on the mean ranking loss.
///
/// Gradients flow through the cosine term only. After every epoch the
/// validation loss is measured and the best snapshot is kept.
pub fn train(
    train_sets: &[CandidateSet],
    val_sets: &[CandidateSet],
    mode: ScoreMode,
    embeddings: &EmbeddingTable,
    params0: &ScorerParams,
    config: TrainConfig,
) -> Result<TrainOutcome, RankerError> {
    if !mode.uses_embeddings() {
        return Err(RankerError::NotTrainable(mode));
    }
    if config.epochs == 0 {
        return Err(RankerError::NoEpochs);
    }
    if train_sets.is_empty() || val_sets.is_empty() {
        return Err(RankerError::EmptyList);
    }
    params0.check()?;
    if params0.dim() != embeddings.dim() {
        return Err(RankerError::DimensionMismatch(
            params0.dim(),
            embeddings.dim(),
        ));
    }
    let prepared = train_sets
        .iter()
        .map(|s| PreparedSet::new(s, embeddings))
        .collect::<Result<Vec<_>, _>>()?;
    let n = prepared.len() as f64;

    let initial = validation_loss(val_sets, mode, Some(embeddings), Some(params0))?;
    let mut best = (params0.clone(), initial, 0usize);
    let mut params = params0.clone();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let mut loss = 0.0;
        let mut grad = DMatrix::zeros(params.dim(), params.dim());
        for set in &prepared {
            let (l, g) = prepared_loss_and_grad(set, mode, &params)?;
            loss += l.total;
            grad += g;
        }
        loss /= n;
        grad /= n;
        if !loss.is_finite() || grad.iter().any(|v| !v.is_finite()) {
            return Err(RankerError::NonFiniteLoss(epoch));
        }
        params.projection -= grad * config.learning_rate;
        if params.projection.iter().any(|v| !v.is_finite()) {
            return Err(RankerError::NonFiniteLoss(epoch));
        }
        let val = validation_loss(val_sets, mode, Some(embeddings), Some(&params))?;
        log::debug!("epoch {epoch}: train loss {loss:.6}, validation loss {val:.6}");
        history.push(EpochRecord {
            epoch,
            train_loss: loss,
            validation_loss: val,
        });
        if val < best.1 {
            best = (params.clone(), val, epoch);
        }
    }
    Ok(TrainOutcome {
        params: best.0,
        best_epoch: best.2,
        initial_validation_loss: initial,
        best_validation_loss: best.1,
        history,
    })
}
