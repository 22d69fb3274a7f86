//! ROUGE-1, ROUGE-2, and ROUGE-SU4 scoring over token lists.
//!
//! Matching is clipped: each unit counts at most `min(count_sys, count_ref)`
//! times. SU4 units are skip-bigrams with skip distance up to 4 unioned with
//! unigrams, counted in a single pool.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Recall, precision, and balanced F-score, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl RougeScore {
    pub const ZERO: RougeScore = RougeScore {
        recall: 0.0,
        precision: 0.0,
        f1: 0.0,
    };

    fn from_counts(matched: usize, system_units: usize, reference_units: usize) -> RougeScore {
        let recall = if reference_units == 0 {
            0.0
        } else {
            matched as f64 / reference_units as f64
        };
        let precision = if system_units == 0 {
            0.0
        } else {
            matched as f64 / system_units as f64
        };
        RougeScore {
            recall,
            precision,
            f1: f1(precision, recall),
        }
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_overlap<K: std::hash::Hash + Eq>(
    system: &HashMap<K, usize>,
    reference: &HashMap<K, usize>,
) -> usize {
    system
        .iter()
        .map(|(unit, &count)| count.min(reference.get(unit).copied().unwrap_or(0)))
        .sum()
}

/// N-gram overlap score of a system summary against one reference.
pub fn rouge_n(system: &[String], reference: &[String], n: usize) -> RougeScore {
    assert!(n >= 1, "n-gram order must be >= 1");
    let system_counts = ngram_counts(system, n);
    let reference_counts = ngram_counts(reference, n);
    let matched = clipped_overlap(&system_counts, &reference_counts);
    let system_units = system.len().saturating_sub(n - 1);
    let reference_units = reference.len().saturating_sub(n - 1);
    RougeScore::from_counts(matched, system_units, reference_units)
}

/// SU4 unit: a unigram or an ordered token pair at most 4 positions apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Su4Unit<'a> {
    Unigram(&'a str),
    SkipBigram(&'a str, &'a str),
}

fn su4_counts(tokens: &[String]) -> HashMap<Su4Unit<'_>, usize> {
    let mut counts = HashMap::new();
    for (a, first) in tokens.iter().enumerate() {
        *counts.entry(Su4Unit::Unigram(first)).or_insert(0) += 1;
        for second in tokens.iter().skip(a + 1).take(4) {
            *counts
                .entry(Su4Unit::SkipBigram(first, second))
                .or_insert(0) += 1;
        }
    }
    counts
}

/// Skip-bigram (max gap 4) plus unigram overlap score.
pub fn rouge_su4(system: &[String], reference: &[String]) -> RougeScore {
    let system_counts = su4_counts(system);
    let reference_counts = su4_counts(reference);
    let matched = clipped_overlap(&system_counts, &reference_counts);
    let system_units: usize = system_counts.values().sum();
    let reference_units: usize = reference_counts.values().sum();
    RougeScore::from_counts(matched, system_units, reference_units)
}

/// Macro-averaged scores for one metric: recall, precision, and F are each
/// averaged independently over the pairs, so the averaged F can sit below
/// both averaged P and averaged R.
pub fn macro_average(scores: &[RougeScore]) -> Result<RougeScore> {
    if scores.is_empty() {
        return Err(Error::InvalidInput(
            "cannot average zero score pairs".into(),
        ));
    }
    let n = scores.len() as f64;
    Ok(RougeScore {
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
        f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
    })
}

/// Scores for the three reported metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub rouge_1: RougeScore,
    pub rouge_2: RougeScore,
    pub rouge_su4: RougeScore,
}

/// Score every (system, reference) pair and macro-average each metric.
pub fn evaluate_corpus(pairs: &[(Vec<String>, Vec<String>)]) -> Result<MetricSet> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no summary pairs to evaluate".into()));
    }
    let r1: Vec<RougeScore> = pairs
        .iter()
        .map(|(sys, reference)| rouge_n(sys, reference, 1))
        .collect();
    let r2: Vec<RougeScore> = pairs
        .iter()
        .map(|(sys, reference)| rouge_n(sys, reference, 2))
        .collect();
    let su4: Vec<RougeScore> = pairs
        .iter()
        .map(|(sys, reference)| rouge_su4(sys, reference))
        .collect();
    Ok(MetricSet {
        rouge_1: macro_average(&r1)?,
        rouge_2: macro_average(&r2)?,
        rouge_su4: macro_average(&su4)?,
    })
}
