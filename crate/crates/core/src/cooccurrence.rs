//! The concept-sentence co-occurrence matrix and its observed-position set.

use crate::error::{Error, Result};
use crate::text::{Concept, Sentence};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::fmt::Write as _;

/// N×M matrix of concept-sentence values in [0, 1] plus the set of observed
/// positions. A freshly built matrix is binary and observes exactly its
/// 1-entries; an imputed matrix keeps the original observed set.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    values: DMatrix<f64>,
    observed: Vec<(usize, usize)>,
}

impl CooccurrenceMatrix {
    /// Wrap arbitrary values and observed positions, validating ranges.
    pub fn from_parts(values: DMatrix<f64>, mut observed: Vec<(usize, usize)>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(
                "matrix values must lie in [0, 1]".into(),
            ));
        }
        for &(i, j) in &observed {
            if i >= values.nrows() || j >= values.ncols() {
                return Err(Error::PositionOutOfBounds {
                    row: i,
                    col: j,
                    nrows: values.nrows(),
                    ncols: values.ncols(),
                });
            }
        }
        observed.sort_unstable();
        observed.dedup();
        Ok(CooccurrenceMatrix { values, observed })
    }

    pub fn n_concepts(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_sentences(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Observed positions, sorted ascending by (row, column).
    pub fn observed(&self) -> &[(usize, usize)] {
        &self.observed
    }

    /// Same observed set over different values (e.g. an imputed completion).
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        Self::from_parts(values, self.observed.clone())
    }

    /// Serialize in the dump format: a "N M" header line, then N rows of
    /// space-separated values with six significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_concepts(), self.n_sentences());
        for i in 0..self.n_concepts() {
            let row: Vec<String> = (0..self.n_sentences())
                .map(|j| format_sig6(self.values[(i, j)]))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Format with six significant digits in plain decimal notation.
fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Build the binary matrix: entry (i, j) is 1 iff concept i's bigram occurs
/// as an adjacent pair in sentence j.
pub fn build_matrix(sentences: &[Sentence], concepts: &[Concept]) -> Result<CooccurrenceMatrix> {
    if sentences.is_empty() || concepts.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one sentence and one concept".into(),
        ));
    }
    for (expect, sentence) in sentences.iter().enumerate() {
        if sentence.sentence_id != expect {
            return Err(Error::InvalidInput(format!(
                "sentence ids not contiguous: found {} at position {expect}",
                sentence.sentence_id
            )));
        }
    }
    for (expect, concept) in concepts.iter().enumerate() {
        if concept.concept_id != expect {
            return Err(Error::InvalidInput(format!(
                "concept ids not contiguous: found {} at position {expect}",
                concept.concept_id
            )));
        }
    }

    let index: HashMap<(&str, &str), usize> = concepts
        .iter()
        .map(|c| ((c.bigram.0.as_str(), c.bigram.1.as_str()), c.concept_id))
        .collect();

    let mut values = DMatrix::zeros(concepts.len(), sentences.len());
    let mut observed = Vec::new();
    for sentence in sentences {
        for pair in sentence.tokens.windows(2) {
            if let Some(&i) = index.get(&(pair[0].as_str(), pair[1].as_str())) {
                if values[(i, sentence.sentence_id)] == 0.0 {
                    values[(i, sentence.sentence_id)] = 1.0;
                    observed.push((i, sentence.sentence_id));
                }
            }
        }
    }
    CooccurrenceMatrix::from_parts(values, observed)
}

/// Fraction of nonzero entries.
pub fn density(matrix: &CooccurrenceMatrix) -> f64 {
    let nonzero = matrix.values.iter().filter(|&&v| v != 0.0).count();
    nonzero as f64 / (matrix.n_concepts() * matrix.n_sentences()) as f64
}

/// An imputed concept-sentence association: a cell outside the observed set
/// whose value reached the reporting threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub sentence_id: usize,
    pub concept_id: usize,
    pub value: f64,
}

/// All non-observed cells with value >= `threshold`, sorted by descending
/// value, then ascending (concept, sentence).
pub fn associations_above(matrix: &CooccurrenceMatrix, threshold: f64) -> Result<Vec<Association>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    let observed: std::collections::HashSet<(usize, usize)> =
        matrix.observed.iter().copied().collect();
    let mut out = Vec::new();
    for i in 0..matrix.n_concepts() {
        for j in 0..matrix.n_sentences() {
            if matrix.values[(i, j)] >= threshold && !observed.contains(&(i, j)) {
                out.push(Association {
                    sentence_id: j,
                    concept_id: i,
                    value: matrix.values[(i, j)],
                });
            }
        }
    }
    out.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap()
            .then(a.concept_id.cmp(&b.concept_id))
            .then(a.sentence_id.cmp(&b.sentence_id))
    });
    Ok(out)
}
