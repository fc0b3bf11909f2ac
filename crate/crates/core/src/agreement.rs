//! Inter-annotator agreement coefficients.
//!
//! Ratings are held in an items × raters [`RatingsMatrix`] of optional
//! labels. Nominal coefficients compare labels for equality; the interval
//! variant of Krippendorff's alpha parses them as numbers.
//!
//! None of the coefficients are clamped: values below zero mean agreement
//! worse than chance.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("expected exactly 2 raters, found {0}")]
    WrongRaterCount(usize),
    #[error("ratings matrix has missing cells")]
    MissingCells,
    #[error("items are rated by different numbers of raters")]
    UnequalRaters,
    #[error("chance agreement is total; the coefficient is undefined")]
    DegenerateChance,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("label {0:?} is not numeric")]
    NonNumeric(String),
    #[error("invalid ratings matrix: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairwiseKind {
    CohenKappa,
    ScottPi,
    BennettS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Nominal,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingsMatrix {
    raters: Vec<String>,
    rows: Vec<Vec<Option<String>>>,
    n_categories: usize,
}

impl RatingsMatrix {
    /// Builds a matrix. `n_categories` defaults to the number of distinct
    /// labels observed (at least 2) and may not be smaller than that.
    pub fn new(
        raters: Vec<String>,
        rows: Vec<Vec<Option<String>>>,
        n_categories: Option<usize>,
    ) -> Result<Self, AgreementError> {
        if raters.len() < 2 {
            return Err(AgreementError::Invalid(format!(
                "need at least 2 raters, got {}",
                raters.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != raters.len()) {
            return Err(AgreementError::Invalid(format!(
                "item {} has {} cells for {} raters",
                bad + 1,
                rows[bad].len(),
                raters.len()
            )));
        }
        let mut matrix = RatingsMatrix {
            raters,
            rows,
            n_categories: 0,
        };
        let observed = matrix.categories().len();
        let n = n_categories.unwrap_or(observed.max(2));
        if n < 2 || n < observed {
            return Err(AgreementError::Invalid(format!(
                "{n} categories declared but {observed} observed"
            )));
        }
        matrix.n_categories = n;
        Ok(matrix)
    }

    /// Convenience constructor for fully observed matrices.
    pub fn complete<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self, AgreementError> {
        let width = rows.first().map_or(0, Vec::len);
        let raters = (1..=width).map(|i| format!("r{i}")).collect();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|c| Some(c.as_ref().to_owned())).collect())
            .collect();
        RatingsMatrix::new(raters, rows, None)
    }

    /// Parses CSV: a header row of rater ids, then one item per line.
    /// Empty cells are missing ratings.
    pub fn from_csv(
        reader: impl Read,
        n_categories: Option<usize>,
    ) -> Result<Self, AgreementError> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let raters: Vec<String> = csv.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for record in csv.records() {
            let record = record?;
            rows.push(
                record
                    .iter()
                    .map(|c| (!c.is_empty()).then(|| c.to_owned()))
                    .collect(),
            );
        }
        RatingsMatrix::new(raters, rows, n_categories)
    }

    pub fn raters(&self) -> &[String] {
        &self.raters
    }

    pub fn n_items(&self) -> usize {
        self.rows.len()
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    pub fn has_missing(&self) -> bool {
        self.rows.iter().flatten().any(Option::is_none)
    }

    /// Distinct observed labels, sorted.
    pub fn categories(&self) -> Vec<&str> {
        let mut cats: Vec<&str> = self
            .rows
            .iter()
            .flatten()
            .flatten()
            .map(String::as_str)
            .collect();
        cats.sort_unstable();
        cats.dedup();
        cats
    }

    fn two_complete_raters(&self) -> Result<Vec<(&str, &str)>, AgreementError> {
        if self.raters.len() != 2 {
            return Err(AgreementError::WrongRaterCount(self.raters.len()));
        }
        self.rows
            .iter()
            .map(|r| match (&r[0], &r[1]) {
                (Some(a), Some(b)) => Ok((a.as_str(), b.as_str())),
                _ => Err(AgreementError::MissingCells),
            })
            .collect()
    }
}

/// Fraction of items on which both raters give the same label.
pub fn observed_agreement(m: &RatingsMatrix) -> Result<f64, AgreementError> {
    let pairs = m.two_complete_raters()?;
    if pairs.is_empty() {
        return Err(AgreementError::InsufficientData("no items".into()));
    }
    let agree = pairs.iter().filter(|(a, b)| a == b).count();
    Ok(agree as f64 / pairs.len() as f64)
}

fn chance_corrected(p_o: f64, p_e: f64) -> Result<f64, AgreementError> {
    if p_o == 1.0 {
        return Ok(1.0);
    }
    if p_e >= 1.0 {
        return Err(AgreementError::DegenerateChance);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Two-rater chance-corrected agreement `(P_o - P_e) / (1 - P_e)`.
///
/// Chance agreement `P_e` is the product of each rater's marginals (Cohen),
/// the squared pooled marginals (Scott), or `1 / n_categories` (Bennett).
pub fn pairwise_agreement(m: &RatingsMatrix, kind: PairwiseKind) -> Result<f64, AgreementError> {
    let p_o = observed_agreement(m)?;
    let pairs = m.two_complete_raters()?;
    let n = pairs.len() as f64;
    let p_e = match kind {
        PairwiseKind::BennettS => 1.0 / m.n_categories() as f64,
        PairwiseKind::CohenKappa | PairwiseKind::ScottPi => {
            let mut marginals: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
            for (a, b) in &pairs {
                marginals.entry(a).or_default().0 += 1.0;
                marginals.entry(b).or_default().1 += 1.0;
            }
            marginals
                .values()
                .map(|&(x, y)| {
                    let (p1, p2) = (x / n, y / n);
                    if kind == PairwiseKind::CohenKappa {
                        p1 * p2
                    } else {
                        let pooled = (p1 + p2) / 2.0;
                        pooled * pooled
                    }
                })
                .sum()
        }
    };
    chance_corrected(p_o, p_e)
}

/// Fleiss' kappa for any number of raters, each rating every item.
pub fn fleiss_kappa(m: &RatingsMatrix) -> Result<f64, AgreementError> {
    if m.has_missing() {
        return Err(AgreementError::UnequalRaters);
    }
    if m.n_items() == 0 {
        return Err(AgreementError::InsufficientData("no items".into()));
    }
    let r = m.raters().len() as f64;
    let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
    let mut p_bar = 0.0;
    for row in &m.rows {
        let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
        for label in row.iter().flatten() {
            *counts.entry(label).or_default() += 1.0;
            *totals.entry(label).or_default() += 1.0;
        }
        let sq: f64 = counts.values().map(|c| c * c).sum();
        p_bar += (sq - r) / (r * (r - 1.0));
    }
    p_bar /= m.n_items() as f64;
    let all = m.n_items() as f64 * r;
    let p_e: f64 = totals.values().map(|t| (t / all) * (t / all)).sum();
    if p_e >= 1.0 {
        return Err(AgreementError::DegenerateChance);
    }
    if p_bar == 1.0 {
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Krippendorff's alpha `1 - D_o / D_e` from the coincidence matrix.
///
/// Only items with at least two ratings are pairable; at least two such
/// items are required. Missing cells are allowed.
pub fn krippendorff_alpha(m: &RatingsMatrix, level: Level) -> Result<f64, AgreementError> {
    // value index per label; interval level needs numeric labels
    let labels = m.categories();
    let numeric: Vec<f64> = match level {
        Level::Nominal => Vec::new(),
        Level::Interval => labels
            .iter()
            .map(|l| {
                l.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| AgreementError::NonNumeric((*l).to_owned()))
            })
            .collect::<Result<_, _>>()?,
    };
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let k = labels.len();
    let mut coincidence = vec![vec![0.0f64; k]; k];
    let mut pairable_units = 0usize;
    for row in &m.rows {
        let values: Vec<usize> = row.iter().flatten().map(|l| index[l.as_str()]).collect();
        let mu = values.len();
        if mu < 2 {
            continue;
        }
        pairable_units += 1;
        let w = 1.0 / (mu - 1) as f64;
        for (a, &va) in values.iter().enumerate() {
            for (b, &vb) in values.iter().enumerate() {
                if a != b {
                    coincidence[va][vb] += w;
                }
            }
        }
    }
    if pairable_units < 2 {
        return Err(AgreementError::InsufficientData(format!(
            "{pairable_units} item(s) with two or more ratings"
        )));
    }
    let delta = |c: usize, d: usize| -> f64 {
        match level {
            Level::Nominal => f64::from(u8::from(c != d)),
            Level::Interval => (numeric[c] - numeric[d]).powi(2),
        }
    };
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            let dist = delta(c, d);
            observed += coincidence[c][d] * dist;
            expected += marginals[c] * marginals[d] * dist;
        }
    }
    let d_o = observed / n;
    let d_e = expected / (n * (n - 1.0));
    if d_e == 0.0 {
        return Err(AgreementError::DegenerateChance);
    }
    if d_o == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - d_o / d_e)
}

/// All coefficients for one matrix; entries that do not apply (for
/// example two-rater coefficients on a three-rater matrix) hold the error.
#[derive(Debug)]
pub struct AgreementReport {
    pub observed: Result<f64, AgreementError>,
    pub alpha_nominal: Result<f64, AgreementError>,
    pub alpha_interval: Result<f64, AgreementError>,
    pub cohen_kappa: Result<f64, AgreementError>,
    pub fleiss_kappa: Result<f64, AgreementError>,
    pub bennett_s: Result<f64, AgreementError>,
    pub scott_pi: Result<f64, AgreementError>,
}

impl AgreementReport {
    pub fn compute(m: &RatingsMatrix) -> Self {
        AgreementReport {
            observed: observed_agreement(m),
            alpha_nominal: krippendorff_alpha(m, Level::Nominal),
            alpha_interval: krippendorff_alpha(m, Level::Interval),
            cohen_kappa: pairwise_agreement(m, PairwiseKind::CohenKappa),
            fleiss_kappa: fleiss_kappa(m),
            bennett_s: pairwise_agreement(m, PairwiseKind::BennettS),
            scott_pi: pairwise_agreement(m, PairwiseKind::ScottPi),
        }
    }

    /// The six coefficients with their conventional short names.
    pub fn rows(&self) -> [(&'static str, &Result<f64, AgreementError>); 6] {
        [
            ("alpha_nominal", &self.alpha_nominal),
            ("alpha_interval", &self.alpha_interval),
            ("cohen_kappa", &self.cohen_kappa),
            ("fleiss_kappa", &self.fleiss_kappa),
            ("bennett_s", &self.bennett_s),
            ("scott_pi", &self.scott_pi),
        ]
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.rows() {
            match value {
                Ok(v) => writeln!(f, "{name:<16}{v:>9.4}")?,
                Err(e) => writeln!(f, "{name:<16}{:>9}  ({e})", "n/a")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rater_table(both_a: usize, both_b: usize, a_b: usize, b_a: usize) -> RatingsMatrix {
        let mut rows = Vec::new();
        rows.extend(std::iter::repeat_n(vec!["A", "A"], both_a));
        rows.extend(std::iter::repeat_n(vec!["B", "B"], both_b));
        rows.extend(std::iter::repeat_n(vec!["A", "B"], a_b));
        rows.extend(std::iter::repeat_n(vec!["B", "A"], b_a));
        RatingsMatrix::complete(&rows).unwrap()
    }

    #[test]
    fn observed_examples() {
        assert_eq!(
            observed_agreement(&two_rater_table(3, 2, 0, 0)).unwrap(),
            1.0
        );
        assert_eq!(
            observed_agreement(&two_rater_table(0, 0, 3, 2)).unwrap(),
            0.0
        );
        assert_eq!(
            observed_agreement(&two_rater_table(20, 20, 5, 5)).unwrap(),
            0.8
        );
        let three = RatingsMatrix::complete(&[vec!["A", "A", "A"]]).unwrap();
        assert!(matches!(
            observed_agreement(&three),
            Err(AgreementError::WrongRaterCount(3))
        ));
        let missing = RatingsMatrix::new(
            vec!["x".into(), "y".into()],
            vec![vec![Some("A".into()), None]],
            None,
        )
        .unwrap();
        assert!(matches!(
            observed_agreement(&missing),
            Err(AgreementError::MissingCells)
        ));
    }

    #[test]
    fn hand_computed_kappa_table() {
        let m = two_rater_table(20, 20, 5, 5);
        let kappa = pairwise_agreement(&m, PairwiseKind::CohenKappa).unwrap();
        assert!((kappa - 0.6).abs() < 1e-9);
        let s = pairwise_agreement(&m, PairwiseKind::BennettS).unwrap();
        assert!((s - 0.6).abs() < 1e-9);
        let pi = pairwise_agreement(&m, PairwiseKind::ScottPi).unwrap();
        assert!((pi - kappa).abs() < 1e-12);
    }

    #[test]
    fn cohen_and_scott_differ_on_skewed_marginals() {
        // rater 1: A 30 / B 20, rater 2: A 20 / B 30
        let m = two_rater_table(15, 15, 15, 5);
        // P_o = 0.6; Cohen P_e = 0.6*0.4 + 0.4*0.6 = 0.48; Scott P_e = 0.5^2 * 2 = 0.5
        let kc = pairwise_agreement(&m, PairwiseKind::CohenKappa).unwrap();
        let pi = pairwise_agreement(&m, PairwiseKind::ScottPi).unwrap();
        assert!((kc - (0.6 - 0.48) / 0.52).abs() < 1e-12);
        assert!((pi - 0.2).abs() < 1e-12);
    }

    #[test]
    fn bennett_uses_declared_categories() {
        let rows = vec![
            vec!["1", "1"],
            vec!["2", "3"],
            vec!["4", "4"],
            vec!["5", "5"],
        ];
        let base = RatingsMatrix::complete(&rows).unwrap();
        let m = RatingsMatrix::new(base.raters().to_vec(), base.rows.clone(), Some(5)).unwrap();
        let s = pairwise_agreement(&m, PairwiseKind::BennettS).unwrap();
        assert!((s - (0.75 - 0.2) / 0.8).abs() < 1e-12);
        assert!(RatingsMatrix::new(base.raters().to_vec(), base.rows.clone(), Some(3)).is_err());
    }

    #[test]
    fn degenerate_chance() {
        // each rater sticks to one label, but not the same one: P_o = 0, P_e = 0
        let m = two_rater_table(0, 0, 4, 0);
        assert_eq!(
            pairwise_agreement(&m, PairwiseKind::CohenKappa).unwrap(),
            0.0
        );
        let single = RatingsMatrix::complete(&[vec!["A", "A", "A"], vec!["A", "A", "A"]]).unwrap();
        assert!(matches!(
            fleiss_kappa(&single),
            Err(AgreementError::DegenerateChance)
        ));
        assert!(matches!(
            krippendorff_alpha(&single, Level::Nominal),
            Err(AgreementError::DegenerateChance)
        ));
        // two raters, one label: perfect observed agreement short-circuits to 1
        let pair = RatingsMatrix::complete(&[vec!["A", "A"], vec!["A", "A"]]).unwrap();
        assert_eq!(
            pairwise_agreement(&pair, PairwiseKind::ScottPi).unwrap(),
            1.0
        );
    }

    #[test]
    fn fleiss_hand_example() {
        // items (A,A,B) and (A,B,B): P_i = (2^2 + 1^2 - 3) / 6 = 1/3 each,
        // p_A = p_B = 1/2 so P_e = 1/2; kappa = (1/3 - 1/2) / (1/2) = -1/3
        let m = RatingsMatrix::complete(&[vec!["A", "A", "B"], vec!["A", "B", "B"]]).unwrap();
        assert!((fleiss_kappa(&m).unwrap() + 1.0 / 3.0).abs() < 1e-12);
        let missing = RatingsMatrix::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![Some("A".into()), None, Some("B".into())]],
            None,
        )
        .unwrap();
        assert!(matches!(
            fleiss_kappa(&missing),
            Err(AgreementError::UnequalRaters)
        ));
    }

    /// Pairwise-disagreement form of alpha, independent of the coincidence matrix:
    /// alpha = 1 - (n - 1) * sum_u [sum_{i!=j in u} delta / (m_u - 1)] / sum_{i!=j over all pairable values} delta
    fn alpha_pairwise_oracle(units: &[Vec<f64>], delta: impl Fn(f64, f64) -> f64) -> f64 {
        let pairable: Vec<&Vec<f64>> = units.iter().filter(|u| u.len() >= 2).collect();
        let all: Vec<f64> = pairable.iter().flat_map(|u| u.iter().copied()).collect();
        let n = all.len() as f64;
        let mut within = 0.0;
        for u in &pairable {
            let mut s = 0.0;
            for (i, a) in u.iter().enumerate() {
                for (j, b) in u.iter().enumerate() {
                    if i != j {
                        s += delta(*a, *b);
                    }
                }
            }
            within += s / (u.len() as f64 - 1.0);
        }
        let mut between = 0.0;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                if i != j {
                    between += delta(*a, *b);
                }
            }
        }
        1.0 - (n - 1.0) * within / between
    }

    #[test]
    fn krippendorff_interval_hand_example() {
        // coincidences: o11 = o22 = o33 = 2, o34 = o43 = 1; n = 8
        // D_o = 2/8, D_e = 126/56 = 2.25, alpha = 1 - 1/9
        let m = RatingsMatrix::complete(&[
            vec!["1", "1"],
            vec!["2", "2"],
            vec!["3", "3"],
            vec!["3", "4"],
        ])
        .unwrap();
        let a = krippendorff_alpha(&m, Level::Interval).unwrap();
        assert!((a - 8.0 / 9.0).abs() < 1e-12);
        let units = vec![
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![3.0, 4.0],
        ];
        assert!((a - alpha_pairwise_oracle(&units, |x, y| (x - y).powi(2))).abs() < 1e-12);
        // nominal: D_o = 2/8, D_e = (64 - (4 + 4 + 9 + 1)) / 56 = 46/56
        let an = krippendorff_alpha(&m, Level::Nominal).unwrap();
        assert!((an - (1.0 - 0.25 * 56.0 / 46.0)).abs() < 1e-12);
    }

    #[test]
    fn krippendorff_with_missing_values_matches_oracle() {
        let cells = [
            [Some("1"), Some("1"), None, Some("1")],
            [Some("2"), Some("2"), Some("3"), Some("2")],
            [Some("3"), Some("3"), Some("3"), Some("3")],
            [Some("3"), Some("3"), Some("3"), Some("3")],
            [Some("2"), Some("2"), Some("2"), Some("2")],
            [Some("1"), Some("2"), Some("3"), Some("4")],
            [Some("4"), Some("4"), Some("4"), Some("4")],
            [Some("1"), Some("1"), Some("2"), Some("1")],
            [Some("2"), Some("2"), Some("2"), Some("2")],
            [None, Some("5"), Some("5"), Some("5")],
            [None, None, Some("1"), Some("1")],
            [None, None, Some("3"), None],
        ];
        let rows: Vec<Vec<Option<String>>> = cells
            .iter()
            .map(|r| r.iter().map(|c| c.map(str::to_owned)).collect())
            .collect();
        let m = RatingsMatrix::new((1..=4).map(|i| format!("r{i}")).collect(), rows, None).unwrap();
        let units: Vec<Vec<f64>> = cells
            .iter()
            .map(|r| r.iter().flatten().map(|c| c.parse().unwrap()).collect())
            .collect();
        let nominal = alpha_pairwise_oracle(&units, |x, y| f64::from(u8::from(x != y)));
        let interval = alpha_pairwise_oracle(&units, |x, y| (x - y).powi(2));
        assert!((krippendorff_alpha(&m, Level::Nominal).unwrap() - nominal).abs() < 1e-12);
        assert!((krippendorff_alpha(&m, Level::Interval).unwrap() - interval).abs() < 1e-12);
        // published value for this reliability data (nominal) is 0.743
        assert!((nominal - 0.743).abs() < 5e-4, "{nominal}");
    }

    #[test]
    fn krippendorff_errors() {
        let lonely = RatingsMatrix::new(
            vec!["x".into(), "y".into()],
            vec![vec![Some("A".into()), None], vec![None, Some("B".into())]],
            None,
        )
        .unwrap();
        assert!(matches!(
            krippendorff_alpha(&lonely, Level::Nominal),
            Err(AgreementError::InsufficientData(_))
        ));
        let words = RatingsMatrix::complete(&[vec!["A", "B"], vec!["A", "A"]]).unwrap();
        assert!(matches!(
            krippendorff_alpha(&words, Level::Interval),
            Err(AgreementError::NonNumeric(_))
        ));
    }

    #[test]
    fn perfect_agreement_is_one_everywhere() {
        let m = RatingsMatrix::complete(&[
            vec!["1", "1"],
            vec!["2", "2"],
            vec!["5", "5"],
            vec!["2", "2"],
        ])
        .unwrap();
        let report = AgreementReport::compute(&m);
        for (name, v) in report.rows() {
            assert_eq!(*v.as_ref().unwrap(), 1.0, "{name}");
        }
    }

    #[test]
    fn item_order_does_not_matter() {
        let rows = vec![
            vec!["1", "2"],
            vec!["2", "2"],
            vec!["3", "1"],
            vec!["3", "3"],
            vec!["1", "1"],
        ];
        let mut reversed = rows.clone();
        reversed.reverse();
        let a = AgreementReport::compute(&RatingsMatrix::complete(&rows).unwrap());
        let b = AgreementReport::compute(&RatingsMatrix::complete(&reversed).unwrap());
        for ((_, x), (_, y)) in a.rows().iter().zip(b.rows()) {
            assert!((x.as_ref().unwrap() - y.as_ref().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_parsing() {
        let text = "ann,bob,cy\nA,A,\nB, B ,B\n";
        let m = RatingsMatrix::from_csv(text.as_bytes(), None).unwrap();
        assert_eq!(m.raters(), ["ann", "bob", "cy"]);
        assert_eq!(m.n_items(), 2);
        assert!(m.has_missing());
        assert_eq!(m.categories(), ["A", "B"]);
        assert!(RatingsMatrix::from_csv("a,b\nx,y,z\n".as_bytes(), None).is_err());
    }
}
