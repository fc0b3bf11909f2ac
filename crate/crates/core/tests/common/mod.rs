//! Synthetic ranking tasks shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use shortdesc::metrics::{rouge_n, tokenize};
use shortdesc::ranker::{eval_f, CandidateSet, EmbeddingTable, ScoreMode, ScorerParams};

pub const PLANTED_DIM: usize = 8;
const SIGNAL_DIMS: usize = 4;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn gaussian(rng: &mut ChaCha8Rng, dims: std::ops::Range<usize>, norm: f64) -> Vec<f64> {
    let mut v = [0.0; PLANTED_DIM];
    for i in dims {
        v[i] = normal(rng);
    }
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x * norm / len).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// A task where the first four embedding dimensions carry meaning and the
/// last four carry a large per-paragraph nuisance component.
///
/// Each paragraph is `signal + nuisance`, its gold is `signal`, one
/// candidate is a noisy copy of the signal and the others share the
/// paragraph's nuisance. Under the identity projection the nuisance
/// candidates win; a projection that suppresses the nuisance dimensions
/// picks the good candidate.
pub struct PlantedTask {
    pub train: Vec<CandidateSet>,
    pub validation: Vec<CandidateSet>,
    pub embeddings: EmbeddingTable,
}

pub fn planted_task(n_train: usize, n_validation: usize, seed: u64) -> PlantedTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(PLANTED_DIM);
    let mut sets = Vec::with_capacity(n_train + n_validation);
    for i in 0..n_train + n_validation {
        let signal = gaussian(&mut rng, 0..SIGNAL_DIMS, 1.0);
        let nuisance = gaussian(&mut rng, SIGNAL_DIMS..PLANTED_DIM, 3.0);
        let paragraph = format!("p{i} paragraph");
        let gold = format!("p{i} gold");
        table
            .insert(paragraph.clone(), add(&signal, &nuisance))
            .unwrap();
        table.insert(gold.clone(), signal.clone()).unwrap();
        let n_cands = 4;
        let good_at = rng.random_range(0..n_cands);
        let mut candidates = Vec::with_capacity(n_cands);
        for j in 0..n_cands {
            let text = format!("p{i} candidate {j}");
            let vector = if j == good_at {
                add(&signal, &gaussian(&mut rng, 0..PLANTED_DIM, 0.1))
            } else {
                let off_topic = gaussian(&mut rng, 0..SIGNAL_DIMS, 1.0);
                let jitter = gaussian(&mut rng, SIGNAL_DIMS..PLANTED_DIM, 0.5);
                add(&off_topic, &add(&nuisance, &jitter))
            };
            table.insert(text.clone(), vector).unwrap();
            candidates.push(text);
        }
        sets.push(CandidateSet {
            id: format!("planted-{i}"),
            paragraph,
            gold,
            candidates,
        });
    }
    let validation = sets.split_off(n_train);
    PlantedTask {
        train: sets,
        validation,
        embeddings: table,
    }
}

/// `n` candidate sets over random word strings, each containing its own
/// paragraph verbatim as one candidate, with random embeddings for every
/// text. Returns the sets and the index of the verbatim candidate.
pub fn verbatim_sets(
    n: usize,
    dim: usize,
    seed: u64,
) -> (Vec<(CandidateSet, usize)>, EmbeddingTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new(dim);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let paragraph = format!("{} {}", random_text(&mut rng, "para"), i);
        let gold = format!("{} gold{i}", random_text(&mut rng, "gold"));
        let n_cands = rng.random_range(2..=8);
        let at = rng.random_range(0..n_cands);
        let candidates: Vec<String> = (0..n_cands)
            .map(|j| {
                if j == at {
                    paragraph.clone()
                } else {
                    // shares words with the paragraph but never equals it
                    format!("{} {i} c{j}", random_text(&mut rng, "para"))
                }
            })
            .collect();
        for t in std::iter::once(&paragraph)
            .chain([&gold])
            .chain(&candidates)
        {
            if table.get(t).is_none() {
                let v: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
                table.insert(t.clone(), v).unwrap();
            }
        }
        let set = CandidateSet {
            id: format!("v{i}"),
            paragraph,
            gold,
            candidates,
        };
        out.push((set, at));
    }
    (out, table)
}

/// One random instance for gradient checking.
pub struct GradientInstance {
    pub set: CandidateSet,
    pub table: EmbeddingTable,
    pub params: ScorerParams,
    pub mode: ScoreMode,
}

const WORDS: [&str; 6] = ["river", "city", "north", "small", "old", "village"];

fn random_text(rng: &mut ChaCha8Rng, tag: &str) -> String {
    let len = rng.random_range(3..=6);
    let mut words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
    words.push(tag);
    words.join(" ")
}

/// Draws instances until one is away from every non-differentiable point:
/// hinge arguments, score ties and clamped cosines are all at least `gap`
/// from zero, and at least one hinge is active.
pub fn gradient_instance(rng: &mut ChaCha8Rng, gap: f64) -> GradientInstance {
    loop {
        let dim = rng.random_range(2..=8);
        let mode = if rng.random_bool(0.5) {
            ScoreMode::Cosine
        } else {
            ScoreMode::Fused
        };
        let n_cands = rng.random_range(2..=5);
        let mut texts = vec![random_text(rng, "para"), random_text(rng, "gold")];
        texts.extend((0..n_cands).map(|j| random_text(rng, &format!("cand{j}"))));
        let mut table = EmbeddingTable::new(dim);
        for t in &texts {
            let v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
            table.insert(t.clone(), v).unwrap();
        }
        let mut params = ScorerParams::identity(dim);
        let noise = DMatrix::from_fn(dim, dim, |_, _| 0.4 * normal(rng));
        params.projection += noise;
        params.lambda_gold = rng.random_range(0.0..0.3);
        params.lambda_candidate = rng.random_range(0.0..0.1);
        let set = CandidateSet {
            id: "g".into(),
            paragraph: texts[0].clone(),
            gold: texts[1].clone(),
            candidates: texts[2..].to_vec(),
        };
        if is_smooth(&set, &table, &params, mode, gap) {
            return GradientInstance {
                set,
                table,
                params,
                mode,
            };
        }
    }
}

fn projected_cosine(table: &EmbeddingTable, p: &ScorerParams, a: &str, b: &str) -> f64 {
    let u: DVector<f64> = &p.projection * table.get(a).unwrap();
    let v: DVector<f64> = &p.projection * table.get(b).unwrap();
    u.dot(&v) / (u.norm() * v.norm())
}

fn is_smooth(
    set: &CandidateSet,
    table: &EmbeddingTable,
    p: &ScorerParams,
    mode: ScoreMode,
    gap: f64,
) -> bool {
    let texts: Vec<&String> = set
        .candidates
        .iter()
        .chain(std::iter::once(&set.gold))
        .collect();
    for t in &texts {
        let c = projected_cosine(table, p, t, &set.paragraph);
        if c.abs() < gap {
            return false;
        }
        if mode == ScoreMode::Fused {
            let r = rouge_n(&tokenize(t), &tokenize(&set.paragraph), 1).f_measure;
            // fusion of zero rouge is constant; require both terms positive
            if r < gap || c < gap {
                return false;
            }
        }
    }
    let score = |t: &str| eval_f(t, &set.paragraph, mode, Some(table), Some(p)).unwrap();
    let mut scores: Vec<f64> = set.candidates.iter().map(|c| score(c)).collect();
    let gold = score(&set.gold);
    scores.sort_by(|a, b| b.total_cmp(a));
    let mut hinges: Vec<f64> = scores.iter().map(|s| s - gold + p.lambda_gold).collect();
    for a in 0..scores.len() {
        for b in a + 1..scores.len() {
            if (scores[a] - scores[b]).abs() < gap {
                return false;
            }
            hinges.push(scores[b] - scores[a] + (b - a) as f64 * p.lambda_candidate);
        }
    }
    hinges.iter().all(|h| h.abs() >= gap) && hinges.iter().any(|&h| h > 0.0)
}

/// Relative Frobenius error between the analytic gradient and central
/// finite differences with step `h`.
pub fn gradient_relative_error(inst: &GradientInstance, h: f64) -> f64 {
    use shortdesc::ranker::{ranking_loss, ranking_loss_gradient};
    let (_, analytic) =
        ranking_loss_gradient(&inst.set, inst.mode, &inst.table, &inst.params).unwrap();
    let dim = inst.params.dim();
    let loss_at = |r: usize, c: usize, delta: f64| {
        let mut p = inst.params.clone();
        p.projection[(r, c)] += delta;
        ranking_loss(&inst.set, inst.mode, Some(&inst.table), &p)
            .unwrap()
            .total
    };
    let numeric = DMatrix::from_fn(dim, dim, |r, c| {
        (loss_at(r, c, h) - loss_at(r, c, -h)) / (2.0 * h)
    });
    let scale = analytic.norm().max(numeric.norm()).max(1e-12);
    (analytic - numeric).norm() / scale
}
