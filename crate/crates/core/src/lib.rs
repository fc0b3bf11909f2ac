//! Building and evaluating a corpus of paragraph / short-description pairs.
//!
//! - [`wikiclient`] fetches entity records and article intros, live or from fixtures.
//! - [`corpus`] collects, validates, splits and summarises samples.
//! - [`metrics`] implements ROUGE-1/2/L, BLEU and a repetition flag.
//! - [`ranker`] scores and reranks candidate descriptions with a trainable projection.
//! - [`sentiment`] runs two-sample Kolmogorov-Smirnov tests on polarity scores.
//! - [`agreement`] computes inter-annotator agreement coefficients.

pub mod agreement;
pub mod corpus;
pub mod metrics;
pub mod ranker;
pub mod sentiment;
pub mod wikiclient;
