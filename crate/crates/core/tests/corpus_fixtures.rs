//! Corpus behaviour on the checked-in fixtures.
//!
//! Expected statistics come from `fixtures/recount.py`, which recomputes
//! them without using this crate.

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use shortdesc::corpus::{
    self, collect, corpus_stats, extract_first_sentence, prefix_overlap, read_samples, split,
    CorpusError, Sample, SplitMode, SplitRatios,
};
use shortdesc::wikiclient::{FixtureSource, KnowledgeSource};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn corpus_200() -> Vec<Sample> {
    let file = File::open(fixtures().join("corpus_200.jsonl")).unwrap();
    read_samples(BufReader::new(file)).unwrap()
}

fn wiki() -> FixtureSource {
    FixtureSource::load(&fixtures().join("wiki")).unwrap()
}

#[test]
fn stats_match_independent_recount() {
    let stats = corpus_stats(&corpus_200()).unwrap();
    assert_eq!(stats.samples, 200);
    assert!((stats.avg_doc_len - 13087.0 / 200.0).abs() < 1e-12);
    assert!((stats.avg_summ_len - 564.0 / 200.0).abs() < 1e-12);
    assert!((stats.compression_ratio - 13087.0 / 564.0).abs() < 1e-9);
    assert_eq!(stats.vocab_size, 539);
    assert_eq!(stats.instance_histogram.len(), 85);
    assert_eq!(stats.instance_histogram["human"], 48);
    assert_eq!(stats.instance_histogram["taxon"], 16);
    assert_eq!(stats.instance_histogram["film"], 8);
    assert_eq!(stats.instance_histogram.values().sum::<usize>(), 195);
}

#[test]
fn prefix_overlap_matches_independent_recount() {
    let expected = [
        (
            5,
            [0.3252261904761907, 0.06883333333333334, 0.3252261904761907],
        ),
        (
            10,
            [0.6871190476190481, 0.30183333333333345, 0.6613571428571432],
        ),
        (
            20,
            [0.8088928571428567, 0.30683333333333346, 0.7841309523809527],
        ),
    ];
    let rows = prefix_overlap(&corpus_200(), &[5, 10, 20]).unwrap();
    for (row, (len, [r1, r2, rl])) in rows.iter().zip(expected) {
        assert_eq!(row.prefix_len, len);
        assert!((row.rouge1_precision - r1).abs() < 1e-9, "{row:?}");
        assert!((row.rouge2_precision - r2).abs() < 1e-9, "{row:?}");
        assert!((row.rougel_precision - rl).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn stored_first_sentences_match_extractor() {
    for s in corpus_200() {
        assert_eq!(
            extract_first_sentence(&s.paragraph).unwrap(),
            s.first_sentence,
            "{}",
            s.qid
        );
    }
}

#[test]
fn topic_exclusive_split_is_disjoint_and_close_to_ratios() {
    let data = corpus_200();
    let parts = split(&data, SplitMode::TopicExclusive, SplitRatios::default(), 11).unwrap();
    let topics = |xs: &[Sample]| -> HashSet<String> {
        xs.iter()
            .filter_map(|s| s.topic().map(str::to_owned))
            .collect()
    };
    let (tr, va, te) = (
        topics(&parts.train),
        topics(&parts.validation),
        topics(&parts.test),
    );
    assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
    assert!(!va.is_empty() && !te.is_empty());
    // samples without instances cannot be assigned to a topic
    assert_eq!(parts.len(), 195);
    let achieved = parts.achieved_ratios();
    for (got, want) in achieved.iter().zip([0.8, 0.1, 0.1]) {
        assert!((got - want).abs() <= 0.02, "{achieved:?}");
    }
    let again = split(&data, SplitMode::TopicExclusive, SplitRatios::default(), 11).unwrap();
    assert_eq!(parts, again);
}

#[test]
fn topic_independent_split_keeps_every_sample() {
    let data = corpus_200();
    let parts = split(
        &data,
        SplitMode::TopicIndependent,
        SplitRatios::default(),
        3,
    )
    .unwrap();
    assert_eq!(
        (parts.train.len(), parts.validation.len(), parts.test.len()),
        (160, 20, 20)
    );
    let mut ids: Vec<_> = parts
        .train
        .iter()
        .chain(&parts.validation)
        .chain(&parts.test)
        .map(|s| s.qid)
        .collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 200);
}

#[test]
fn collect_from_fixtures_skips_invalid_entities() {
    let source = wiki();
    let samples = collect(30, &source, 5).unwrap();
    assert_eq!(samples.len(), 30);
    let ids: HashSet<String> = samples.iter().map(|s| s.qid.to_string()).collect();
    assert_eq!(ids.len(), 30);
    for bad in ["Q900001", "Q900002", "Q900003", "Q900004"] {
        assert!(!ids.contains(bad), "{bad} should have been rejected");
    }
    for s in &samples {
        assert!(!s.paragraph.contains("  "), "{}", s.paragraph);
        assert_eq!(
            s.first_sentence,
            extract_first_sentence(&s.paragraph).unwrap()
        );
    }
}

#[test]
fn collect_is_deterministic_per_seed() {
    let source = wiki();
    let a = collect(10, &source, 42).unwrap();
    let b = collect(10, &source, 42).unwrap();
    let c = collect(10, &source, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn collect_reports_exhaustion() {
    let source = wiki();
    match collect(31, &source, 1) {
        Err(CorpusError::SourceExhausted { target, samples }) => {
            assert_eq!(target, 31);
            assert_eq!(samples.len(), 30);
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
}

#[test]
fn fixture_source_is_finite() {
    let source = wiki();
    assert!(matches!(
        source.id_universe(),
        shortdesc::wikiclient::IdUniverse::Finite(ref ids) if ids.len() == 34
    ));
    assert!(source.fetch_entity_str("Q12345678901").is_err());
}

#[test]
fn samples_round_trip_through_jsonl() {
    let data = corpus_200();
    let mut buf = Vec::new();
    corpus::write_samples(&mut buf, &data).unwrap();
    assert_eq!(read_samples(buf.as_slice()).unwrap(), data);
}
