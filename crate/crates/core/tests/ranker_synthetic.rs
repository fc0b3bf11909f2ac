mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shortdesc::ranker::{
    rank_candidates, train, validation_loss, ScoreMode, ScorerParams, TrainConfig,
};

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..40 {
        let inst = common::gradient_instance(&mut rng, 1e-3);
        let err = common::gradient_relative_error(&inst, 1e-6);
        assert!(
            err < 1e-4,
            "instance {i} ({:?}, dim {}): {err:e}",
            inst.mode,
            inst.params.dim()
        );
    }
}

#[test]
fn verbatim_paragraph_candidate_ranks_first_in_fused_mode() {
    let (sets, table) = common::verbatim_sets(200, 6, 5);
    for (set, at) in &sets {
        let out = rank_candidates(set, ScoreMode::Fused, Some(&table), None).unwrap();
        assert_eq!(out.ranked[0].index, *at, "{}", set.id);
        assert_eq!(out.ranked[0].score, 1.0);
        assert_eq!(out.best, set.paragraph);
    }
}

#[test]
fn training_recovers_planted_projection() {
    let task = common::planted_task(150, 60, 21);
    let p0 = ScorerParams::identity(common::PLANTED_DIM);
    let config = TrainConfig {
        learning_rate: 1.0,
        epochs: 100,
    };
    let out = train(
        &task.train,
        &task.validation,
        ScoreMode::Cosine,
        &task.embeddings,
        &p0,
        config,
    )
    .unwrap();
    let before = validation_loss(
        &task.validation,
        ScoreMode::Cosine,
        Some(&task.embeddings),
        Some(&p0),
    )
    .unwrap();
    assert_eq!(out.initial_validation_loss, before);
    assert!(
        out.best_validation_loss <= 0.8 * before,
        "{before} -> {}",
        out.best_validation_loss
    );
    let again = train(
        &task.train,
        &task.validation,
        ScoreMode::Cosine,
        &task.embeddings,
        &p0,
        config,
    )
    .unwrap();
    assert_eq!(out, again);
}
