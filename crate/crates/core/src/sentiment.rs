//! Sentiment consistency between text collections via the two-sample
//! Kolmogorov-Smirnov test on per-polarity probabilities.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `negative + neutral + positive = 1`.
pub const SUM_TOLERANCE: f64 = 1e-3;

/// The significance levels of the standard report.
pub const STANDARD_ALPHAS: [f64; 5] = [0.20, 0.15, 0.10, 0.05, 0.01];

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("empty sample")]
    EmptyList,
    #[error("significance level must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("record {id:?}: {reason}")]
    BadRecord { id: String, reason: String },
    #[error("unknown polarity {0:?}")]
    UnknownPolarity(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Negative, Polarity::Neutral, Polarity::Positive];
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        })
    }
}

impl FromStr for Polarity {
    type Err = SentimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            "positive" => Ok(Polarity::Positive),
            other => Err(SentimentError::UnknownPolarity(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityRecord {
    pub id: String,
    pub negative: f64,
    pub neutral: f64,
    pub positive: f64,
}

impl PolarityRecord {
    pub fn get(&self, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Negative => self.negative,
            Polarity::Neutral => self.neutral,
            Polarity::Positive => self.positive,
        }
    }

    pub fn validate(&self) -> Result<(), SentimentError> {
        let bad = |reason: String| SentimentError::BadRecord {
            id: self.id.clone(),
            reason,
        };
        for p in Polarity::ALL {
            let v = self.get(p);
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("{p} probability {v} outside [0, 1]")));
            }
        }
        let sum = self.negative + self.neutral + self.positive;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(bad(format!("probabilities sum to {sum}")));
        }
        Ok(())
    }
}

/// Reads polarity triples, rejecting any line that violates the record invariants.
pub fn read_polarities(reader: impl BufRead) -> Result<Vec<PolarityRecord>, SentimentError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PolarityRecord =
            serde_json::from_str(&line).map_err(|e| SentimentError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        record.validate().map_err(|e| SentimentError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Empirical CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self, SentimentError> {
        if values.is_empty() {
            return Err(SentimentError::EmptyList);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SentimentError::NonFinite);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample that is `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

pub fn ecdf(values: &[f64]) -> Result<Ecdf, SentimentError> {
    Ecdf::new(values)
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|`, evaluated exactly at
/// every point of the pooled sample.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, SentimentError> {
    let fa = Ecdf::new(a)?;
    let fb = Ecdf::new(b)?;
    let (xs, ys) = (&fa.sorted, &fb.sorted);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// `c(alpha) = sqrt(-ln(alpha / 2) / 2)`.
pub fn critical_value(alpha: f64) -> Result<f64, SentimentError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SentimentError::BadAlpha(alpha));
    }
    Ok((-(alpha / 2.0).ln() / 2.0).sqrt())
}

/// `c(alpha) * sqrt((n + m) / (n * m))`.
pub fn rejection_threshold(alpha: f64, n: usize, m: usize) -> Result<f64, SentimentError> {
    if n == 0 || m == 0 {
        return Err(SentimentError::EmptyList);
    }
    let (n, m) = (n as f64, m as f64);
    Ok(critical_value(alpha)? * ((n + m) / (n * m)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Reject,
    Accept,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsLevel {
    pub alpha: f64,
    pub critical_value: f64,
    pub threshold: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
    pub n: usize,
    pub m: usize,
    pub d_statistic: f64,
    pub levels: Vec<KsLevel>,
}

/// Tests whether two samples share a distribution at each significance
/// level. The null hypothesis is rejected when `D` exceeds the threshold.
pub fn ks_test(a: &[f64], b: &[f64], alphas: &[f64]) -> Result<KsResult, SentimentError> {
    let d = ks_statistic(a, b)?;
    let levels = alphas
        .iter()
        .map(|&alpha| {
            let c = critical_value(alpha)?;
            let threshold = rejection_threshold(alpha, a.len(), b.len())?;
            Ok(KsLevel {
                alpha,
                critical_value: c,
                threshold,
                decision: if d > threshold {
                    Decision::Reject
                } else {
                    Decision::Accept
                },
            })
        })
        .collect::<Result<Vec<_>, SentimentError>>()?;
    Ok(KsResult {
        polarity: None,
        n: a.len(),
        m: b.len(),
        d_statistic: d,
        levels,
    })
}

/// Runs [`ks_test`] on one polarity component of two record collections.
pub fn ks_test_polarity(
    a: &[PolarityRecord],
    b: &[PolarityRecord],
    polarity: Polarity,
    alphas: &[f64],
) -> Result<KsResult, SentimentError> {
    let xs: Vec<f64> = a.iter().map(|r| r.get(polarity)).collect();
    let ys: Vec<f64> = b.iter().map(|r| r.get(polarity)).collect();
    let mut result = ks_test(&xs, &ys, alphas)?;
    result.polarity = Some(polarity);
    Ok(result)
}

/// Truncates (does not round) to four decimal places.
pub fn truncate_4dp(x: f64) -> f64 {
    // the small offset absorbs representation error such as 0.0607 * 1e4 = 606.9999...
    ((x * 1e4) + 1e-9).floor() / 1e4
}
