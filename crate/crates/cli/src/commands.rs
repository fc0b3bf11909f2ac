use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use shortdesc::agreement::{AgreementReport, RatingsMatrix};
use shortdesc::corpus::{self, Sample, SplitMode, SplitRatios};
use shortdesc::metrics::{self, bleu, rouge_l, rouge_n, tokenize, MetricScore};
use shortdesc::ranker::{
    self, CandidateSet, EmbeddingTable, MarginSchedule, Reference, ScoreMode, ScorerParams,
    TrainConfig,
};
use shortdesc::sentiment::{self, truncate_4dp, KsResult, Polarity};
use shortdesc::wikiclient::{FixtureSource, HttpConfig, HttpSource, KnowledgeSource};

use crate::error::CliError;
use crate::io::{ensure_distinct, open, Sink};
use crate::{
    AgreementArgs, CollectArgs, EvalArgs, InitArg, KsArgs, ModeArg, PolarityArg, PrefixOverlapArgs,
    ReferenceArg, RepetitionArgs, ScheduleArg, ScoreArgs, SplitArgs, SplitModeArg, StatsArgs,
    TrainArgs, TrainModeArg,
};

pub const WIKIDATA_ENV: &str = "SHORTDESC_WIKIDATA_API";
pub const WIKIPEDIA_ENV: &str = "SHORTDESC_WIKIPEDIA_API";

fn read_dataset(path: &Path) -> Result<Vec<Sample>, CliError> {
    corpus::read_samples(open(path)?).map_err(|e| CliError::from(e).in_file(path))
}

fn read_sets(path: &Path) -> Result<Vec<CandidateSet>, CliError> {
    ranker::read_candidate_sets(open(path)?).map_err(|e| CliError::from(e).in_file(path))
}

fn read_embeddings(path: &Path) -> Result<EmbeddingTable, CliError> {
    EmbeddingTable::read(open(path)?).map_err(|e| CliError::from(e).in_file(path))
}

fn read_params(path: &Path) -> Result<ScorerParams, CliError> {
    let params: ScorerParams =
        serde_json::from_reader(open(path)?).map_err(|e| CliError::from(e).in_file(path))?;
    Ok(params)
}

fn read_json_lines(path: &Path) -> Result<Vec<Value>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| CliError::Data(format!("{}: line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn text_field<'a>(
    record: &'a Value,
    field: &str,
    path: &Path,
    line: usize,
) -> Result<&'a str, CliError> {
    record.get(field).and_then(Value::as_str).ok_or_else(|| {
        CliError::Data(format!(
            "{}: record {line} has no string field {field:?}",
            path.display()
        ))
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

// ---------------------------------------------------------------------------

fn http_config(args: &CollectArgs) -> HttpConfig {
    let mut config = HttpConfig {
        max_in_flight: args.max_in_flight.max(1),
        requests_per_second: args.requests_per_second,
        max_attempts: args.max_attempts.max(1),
        ..HttpConfig::default()
    };
    if let Ok(url) = std::env::var(WIKIDATA_ENV) {
        config.wikidata_endpoint = url;
    }
    if let Ok(url) = std::env::var(WIKIPEDIA_ENV) {
        config.wikipedia_endpoint = url;
    }
    config
}

pub fn collect(args: CollectArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if args.requests_per_second.is_nan() || args.requests_per_second <= 0.0 {
        return Err(CliError::Usage(
            "--requests-per-second must be positive".into(),
        ));
    }
    let mut inputs = Vec::new();
    let (entities, intros);
    if let Some(dir) = &args.fixture_dir {
        entities = dir.join("entities.jsonl");
        intros = dir.join("intros.jsonl");
        inputs.extend([entities.as_path(), intros.as_path()]);
    }
    ensure_distinct(&inputs, &[&args.out])?;
    let source: Box<dyn KnowledgeSource> = match &args.fixture_dir {
        Some(dir) => Box::new(FixtureSource::load(dir)?),
        None => Box::new(HttpSource::new(http_config(&args))?),
    };
    let samples = corpus::collect(args.n, source.as_ref(), args.seed)?;
    let mut sink = Sink::new(Some(&args.out))?;
    for s in &samples {
        sink.json(s)?;
    }
    sink.finish()?;
    eprintln!(
        "collected {} samples into {}",
        samples.len(),
        args.out.display()
    );
    Ok(())
}

pub fn split(args: SplitArgs) -> Result<(), CliError> {
    let ratios = SplitRatios::new(args.ratios[0], args.ratios[1], args.ratios[2])?;
    let mode = match args.mode {
        SplitModeArg::TopicExclusive => SplitMode::TopicExclusive,
        SplitModeArg::TopicIndependent => SplitMode::TopicIndependent,
    };
    let names = [
        "train.jsonl",
        "validation.jsonl",
        "test.jsonl",
        "manifest.json",
    ];
    let outputs: Vec<_> = names.iter().map(|n| args.out_dir.join(n)).collect();
    let output_refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    ensure_distinct(&[&args.input], &output_refs)?;
    let data = read_dataset(&args.input)?;
    let parts = corpus::split(&data, mode, ratios, args.seed)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    for (path, samples) in outputs
        .iter()
        .zip([&parts.train, &parts.validation, &parts.test])
    {
        let mut sink = Sink::new(Some(path))?;
        for s in samples {
            sink.json(s)?;
        }
        sink.finish()?;
    }
    let manifest = serde_json::to_string_pretty(&parts.manifest())?;
    fs::write(&outputs[3], manifest + "\n").map_err(|e| CliError::io(&outputs[3], e))?;
    let achieved = parts.achieved_ratios();
    eprintln!(
        "{mode}: train {} / validation {} / test {} ({:.3}/{:.3}/{:.3})",
        parts.train.len(),
        parts.validation.len(),
        parts.test.len(),
        achieved[0],
        achieved[1],
        achieved[2]
    );
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.input)?;
    let stats = corpus::corpus_stats(&data)?;
    let mut out = Sink::new(None)?;
    if args.json {
        out.json(&stats)?;
        return out.finish();
    }
    out.line(&format!("{:<20}{:>10}", "samples", stats.samples))?;
    out.line(&format!("{:<20}{:>10.2}", "avg_doc_len", stats.avg_doc_len))?;
    out.line(&format!(
        "{:<20}{:>10.2}",
        "avg_summ_len", stats.avg_summ_len
    ))?;
    out.line(&format!(
        "{:<20}{:>10.2}",
        "compression_ratio", stats.compression_ratio
    ))?;
    out.line(&format!("{:<20}{:>10}", "vocab_size", stats.vocab_size))?;
    out.line(&format!(
        "{:<20}{:>10}",
        "topics",
        stats.instance_histogram.len()
    ))?;
    let mut topics: Vec<(&String, &usize)> = stats.instance_histogram.iter().collect();
    topics.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    if args.top > 0 && !topics.is_empty() {
        out.line("")?;
        out.line(&format!("{:<30}{:>8}{:>9}", "topic", "count", "share"))?;
        for (topic, count) in topics.into_iter().take(args.top) {
            let share = *count as f64 / stats.samples as f64;
            out.line(&format!("{topic:<30}{count:>8}{:>9}", pct(share)))?;
        }
    }
    out.finish()
}

pub fn prefix_overlap(args: PrefixOverlapArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.input)?;
    let rows = corpus::prefix_overlap(&data, &args.lengths)?;
    let mut out = Sink::new(None)?;
    if args.json {
        for row in &rows {
            out.json(row)?;
        }
        return out.finish();
    }
    out.line(&format!(
        "{:>8}{:>9}{:>9}{:>9}",
        "prefix", "R-1", "R-2", "R-L"
    ))?;
    for row in &rows {
        out.line(&format!(
            "{:>8}{:>9}{:>9}{:>9}",
            row.prefix_len,
            pct(row.rouge1_precision),
            pct(row.rouge2_precision),
            pct(row.rougel_precision)
        ))?;
    }
    out.finish()
}

// ---------------------------------------------------------------------------

struct Scorer {
    sets: Vec<CandidateSet>,
    embeddings: Option<EmbeddingTable>,
    params: Option<ScorerParams>,
    mode: ScoreMode,
    reference: Reference,
}

fn score_mode(mode: ModeArg) -> ScoreMode {
    match mode {
        ModeArg::Cosine => ScoreMode::Cosine,
        ModeArg::Rouge1 => ScoreMode::Rouge1,
        ModeArg::Fused => ScoreMode::Fused,
    }
}

fn load_scorer(args: &ScoreArgs) -> Result<Scorer, CliError> {
    let mode = score_mode(args.mode);
    let mut inputs: Vec<&Path> = vec![&args.candidates];
    inputs.extend(args.embeddings.as_deref());
    inputs.extend(args.params.as_deref());
    if let Some(out) = &args.out {
        ensure_distinct(&inputs, &[out])?;
    }
    if mode != ScoreMode::Rouge1 && args.embeddings.is_none() {
        return Err(CliError::Usage(format!("--mode {mode} needs --embeddings")));
    }
    let embeddings = args
        .embeddings
        .as_deref()
        .map(read_embeddings)
        .transpose()?;
    let params = args.params.as_deref().map(read_params).transpose()?;
    if let (Some(p), Some(e)) = (&params, &embeddings) {
        if p.dim() != e.dim() {
            return Err(CliError::Data(format!(
                "parameters have dimension {} but embeddings have {}",
                p.dim(),
                e.dim()
            )));
        }
    }
    Ok(Scorer {
        sets: read_sets(&args.candidates)?,
        embeddings,
        params,
        mode,
        reference: match args.reference {
            ReferenceArg::Paragraph => Reference::Paragraph,
            ReferenceArg::Gold => Reference::Gold,
        },
    })
}

#[derive(Serialize)]
struct ScoreLine<'a> {
    id: &'a str,
    scores: Vec<f64>,
}

pub fn score(args: ScoreArgs) -> Result<(), CliError> {
    let s = load_scorer(&args)?;
    let mut sink = Sink::new(args.out.as_deref())?;
    for set in &s.sets {
        let target = match s.reference {
            Reference::Paragraph => &set.paragraph,
            Reference::Gold => &set.gold,
        };
        let scores = set
            .candidates
            .iter()
            .map(|c| ranker::eval_f(c, target, s.mode, s.embeddings.as_ref(), s.params.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        sink.json(&ScoreLine {
            id: &set.id,
            scores,
        })?;
    }
    sink.finish()
}

pub fn rerank(args: ScoreArgs) -> Result<(), CliError> {
    let s = load_scorer(&args)?;
    let mut sink = Sink::new(args.out.as_deref())?;
    for set in &s.sets {
        let ranked = ranker::rank_against(
            set,
            s.reference,
            s.mode,
            s.embeddings.as_ref(),
            s.params.as_ref(),
        )?;
        sink.json(&ranked)?;
    }
    sink.finish()
}

pub fn train_ranker(args: TrainArgs) -> Result<(), CliError> {
    let mut outputs: Vec<&Path> = vec![&args.out];
    outputs.extend(args.history.as_deref());
    ensure_distinct(&[&args.train, &args.validation, &args.embeddings], &outputs)?;
    if args.epochs == 0 {
        return Err(CliError::Usage("--epochs must be at least 1".into()));
    }
    if !(args.lr.is_finite() && args.lr >= 0.0) {
        return Err(CliError::Usage("--lr must be a non-negative number".into()));
    }
    let embeddings = read_embeddings(&args.embeddings)?;
    let train_sets = read_sets(&args.train)?;
    let val_sets = read_sets(&args.validation)?;
    let dim = embeddings.dim();
    let mut params0 = match args.init {
        InitArg::Random => ScorerParams::init(dim, args.seed),
        InitArg::Identity => ScorerParams::identity(dim),
    };
    params0.lambda_gold = args.lambda_gold;
    params0.lambda_candidate = args.lambda_candidate;
    params0.margin_schedule = match args.margin_schedule {
        ScheduleArg::Pairwise => MarginSchedule::Pairwise,
        ScheduleArg::Positional => MarginSchedule::Positional,
    };
    params0
        .check()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mode = match args.mode {
        TrainModeArg::Cosine => ScoreMode::Cosine,
        TrainModeArg::Fused => ScoreMode::Fused,
    };
    let config = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
    };
    let outcome = ranker::train(&train_sets, &val_sets, mode, &embeddings, &params0, config)?;
    let text = serde_json::to_string_pretty(&outcome.params)?;
    fs::write(&args.out, text + "\n").map_err(|e| CliError::io(&args.out, e))?;
    if let Some(path) = &args.history {
        let mut sink = Sink::new(Some(path))?;
        for record in &outcome.history {
            sink.json(record)?;
        }
        sink.finish()?;
    }
    eprintln!(
        "validation loss {:.6} -> {:.6} (best epoch {} of {})",
        outcome.initial_validation_loss,
        outcome.best_validation_loss,
        outcome.best_epoch,
        args.epochs
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalLine {
    metric: String,
    #[serde(flatten)]
    score: MetricScore,
}

#[derive(Serialize)]
struct BleuLine {
    metric: String,
    score: f64,
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    if args.bleu_order == 0 {
        return Err(CliError::Usage("--bleu-order must be at least 1".into()));
    }
    let records = read_json_lines(&args.input)?;
    if records.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no records",
            args.input.display()
        )));
    }
    let (mut r1, mut r2, mut rl) = (Vec::new(), Vec::new(), Vec::new());
    let mut bleu_total = 0.0;
    for (i, record) in records.iter().enumerate() {
        let c = tokenize(text_field(
            record,
            &args.candidate_field,
            &args.input,
            i + 1,
        )?);
        let r = tokenize(text_field(
            record,
            &args.reference_field,
            &args.input,
            i + 1,
        )?);
        r1.push(rouge_n(&c, &r, 1));
        r2.push(rouge_n(&c, &r, 2));
        rl.push(rouge_l(&c, &r));
        bleu_total += bleu(&c, &r, args.bleu_order);
    }
    let means = [
        ("rouge1", metrics::corpus_mean(&r1)?),
        ("rouge2", metrics::corpus_mean(&r2)?),
        ("rougeL", metrics::corpus_mean(&rl)?),
    ];
    let bleu_mean = bleu_total / records.len() as f64;
    let bleu_name = format!("bleu{}", args.bleu_order);
    let mut out = Sink::new(None)?;
    if args.json {
        for (name, score) in means {
            out.json(&EvalLine {
                metric: name.into(),
                score,
            })?;
        }
        out.json(&BleuLine {
            metric: bleu_name,
            score: bleu_mean,
        })?;
        return out.finish();
    }
    out.line(&format!(
        "{:<10}{:>11}{:>9}{:>9}",
        "metric", "precision", "recall", "f"
    ))?;
    for (name, s) in means {
        out.line(&format!(
            "{name:<10}{:>11}{:>9}{:>9}",
            pct(s.precision),
            pct(s.recall),
            pct(s.f_measure)
        ))?;
    }
    out.line(&format!("{bleu_name:<10}{:>29}", pct(bleu_mean)))?;
    out.line(&format!("({} pairs)", records.len()))?;
    out.finish()
}

pub fn ks_test(args: KsArgs) -> Result<(), CliError> {
    let a = sentiment::read_polarities(open(&args.a)?)
        .map_err(|e| CliError::from(e).in_file(&args.a))?;
    let b = sentiment::read_polarities(open(&args.b)?)
        .map_err(|e| CliError::from(e).in_file(&args.b))?;
    let polarities: Vec<Polarity> = match args.polarity {
        PolarityArg::All => Polarity::ALL.to_vec(),
        PolarityArg::Negative => vec![Polarity::Negative],
        PolarityArg::Neutral => vec![Polarity::Neutral],
        PolarityArg::Positive => vec![Polarity::Positive],
    };
    let results = polarities
        .into_iter()
        .map(|p| sentiment::ks_test_polarity(&a, &b, p, &args.alphas))
        .collect::<Result<Vec<KsResult>, _>>()?;
    let mut out = Sink::new(None)?;
    if args.json {
        for r in &results {
            out.json(r)?;
        }
        return out.finish();
    }
    out.line(&format!(
        "{:<10}{:>6}{:>6}{:>9}{:>7}{:>9}{:>11}  {}",
        "polarity", "n", "m", "D", "alpha", "c_alpha", "threshold", "decision"
    ))?;
    for r in &results {
        let polarity = r.polarity.map(|p| p.to_string()).unwrap_or_default();
        for level in &r.levels {
            let decision = match level.decision {
                sentiment::Decision::Reject => "reject",
                sentiment::Decision::Accept => "accept",
            };
            out.line(&format!(
                "{polarity:<10}{:>6}{:>6}{:>9.4}{:>7.2}{:>9.4}{:>11.4}  {decision}",
                r.n,
                r.m,
                r.d_statistic,
                level.alpha,
                truncate_4dp(level.critical_value),
                truncate_4dp(level.threshold)
            ))?;
        }
    }
    out.finish()
}

#[derive(Serialize)]
struct CoefficientLine<'a> {
    coefficient: &'a str,
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn agreement(args: AgreementArgs) -> Result<(), CliError> {
    let matrix = RatingsMatrix::from_csv(open(&args.ratings)?, args.categories)
        .map_err(|e| CliError::from(e).in_file(&args.ratings))?;
    let report = AgreementReport::compute(&matrix);
    let mut out = Sink::new(None)?;
    if args.json {
        for (name, value) in report.rows() {
            out.json(&CoefficientLine {
                coefficient: name,
                value: value.as_ref().ok().copied(),
                error: value.as_ref().err().map(ToString::to_string),
            })?;
        }
        return out.finish();
    }
    out.line(&format!(
        "{} items, {} raters, {} categories",
        matrix.n_items(),
        matrix.raters().len(),
        matrix.n_categories()
    ))?;
    for line in report.to_string().lines() {
        out.line(line)?;
    }
    out.finish()
}

#[derive(Serialize)]
struct RepetitionLine<'a> {
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<&'a Value>,
    #[serde(flatten)]
    flag: metrics::RepetitionFlag,
}

pub fn flag_repetition(args: RepetitionArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if args.threshold < 2 {
        return Err(CliError::Usage("--threshold must be at least 2".into()));
    }
    if let Some(out) = &args.out {
        ensure_distinct(&[&args.input], &[out])?;
    }
    let records = read_json_lines(&args.input)?;
    let mut sink = Sink::new(args.out.as_deref())?;
    let mut flagged = 0;
    for (i, record) in records.iter().enumerate() {
        let text = text_field(record, &args.field, &args.input, i + 1)?;
        let flag = metrics::flag_repetition(text, args.n, args.threshold)?;
        flagged += usize::from(flag.repeated);
        sink.json(&RepetitionLine {
            line: i + 1,
            id: record.get("id"),
            flag,
        })?;
    }
    sink.finish()?;
    eprintln!("{flagged} of {} texts flagged", records.len());
    Ok(())
}
