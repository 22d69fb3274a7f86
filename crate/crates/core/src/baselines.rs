//! Comparison systems: SumBasic, LexRank, and the plain coverage ILP
//! without matrix imputation.

use crate::error::{Error, Result};
use crate::solver::{solve_exact, SelectionProblem, Summary, ZMode};
use crate::text::{Concept, Sentence, StopwordList};
use nalgebra::DMatrix;
use std::collections::{BTreeMap, HashMap};

/// Knobs for the baseline systems.
#[derive(Debug, Clone)]
pub struct BaselineConfig {
    /// Cosine similarities below this do not become graph edges.
    pub lexrank_similarity_threshold: f64,
    /// Probability of following a graph edge in the centrality walk.
    pub lexrank_damping: f64,
    /// Power-iteration convergence tolerance (L1 change).
    pub lexrank_epsilon: f64,
    pub word_budget: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            lexrank_similarity_threshold: 0.1,
            lexrank_damping: 0.85,
            lexrank_epsilon: 1e-6,
            word_budget: 30,
        }
    }
}

const MAX_POWER_ITERATIONS: usize = 10_000;

/// SumBasic: repeatedly pick the highest-probability content word, select
/// the best fitting sentence containing it, then square the probabilities
/// of the chosen sentence's words. Stops when no sentence fits the residual
/// budget. Ties break toward the lexicographically smaller word and the
/// smaller sentence index.
pub fn sumbasic(sentences: &[Sentence], stopwords: &StopwordList, word_budget: usize) -> Summary {
    let mut probabilities: BTreeMap<&str, f64> = BTreeMap::new();
    let mut content_total = 0usize;
    for sentence in sentences {
        for token in &sentence.tokens {
            if !stopwords.contains(token) {
                *probabilities.entry(token.as_str()).or_insert(0.0) += 1.0;
                content_total += 1;
            }
        }
    }
    if content_total == 0 {
        return Summary::empty();
    }
    for p in probabilities.values_mut() {
        *p /= content_total as f64;
    }

    let mut selected = vec![false; sentences.len()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut residual = word_budget;
    loop {
        let any_fits = sentences
            .iter()
            .enumerate()
            .any(|(idx, s)| !selected[idx] && s.word_count <= residual);
        if !any_fits {
            break;
        }

        // Words by descending probability, ties lexicographic.
        let mut words: Vec<(&str, f64)> = probabilities.iter().map(|(w, p)| (*w, *p)).collect();
        words.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));

        let mut pick: Option<usize> = None;
        'words: for (word, _) in &words {
            let mut best: Option<(f64, usize)> = None;
            for (idx, sentence) in sentences.iter().enumerate() {
                if selected[idx] || sentence.word_count > residual {
                    continue;
                }
                if !sentence.tokens.iter().any(|t| t == word) {
                    continue;
                }
                let mut sum = 0.0;
                let mut count = 0usize;
                for token in &sentence.tokens {
                    if let Some(p) = probabilities.get(token.as_str()) {
                        sum += p;
                        count += 1;
                    }
                }
                if count == 0 {
                    continue;
                }
                let mean = sum / count as f64;
                let better = match best {
                    None => true,
                    Some((best_mean, _)) => mean > best_mean + 1e-12,
                };
                if better {
                    best = Some((mean, idx));
                }
            }
            if let Some((_, idx)) = best {
                pick = Some(idx);
                break 'words;
            }
        }

        match pick {
            Some(idx) => {
                selected[idx] = true;
                chosen.push(idx);
                residual -= sentences[idx].word_count;
                for token in &sentences[idx].tokens {
                    if let Some(p) = probabilities.get_mut(token.as_str()) {
                        *p = *p * *p;
                    }
                }
            }
            None => break,
        }
    }

    chosen.sort_unstable();
    let total_words = chosen.iter().map(|&i| sentences[i].word_count).sum();
    Summary {
        selected: chosen,
        concept_values: Vec::new(),
        objective_value: 0.0,
        total_words,
        exact: false,
    }
}

/// Damped eigenvector centralities of the thresholded cosine-similarity
/// graph, computed by power iteration. Nodes with no edges redistribute
/// their mass uniformly, so a fully disconnected graph is uniform.
pub fn lexrank_centralities(sentences: &[Sentence], config: &BaselineConfig) -> Result<Vec<f64>> {
    let m = sentences.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    if !(0.0 < config.lexrank_damping && config.lexrank_damping < 1.0) {
        return Err(Error::InvalidInput("damping must lie in (0, 1)".into()));
    }

    // tf-idf sentence vectors; idf over this document's sentences.
    let mut document_frequency: HashMap<&str, usize> = HashMap::new();
    for sentence in sentences {
        let mut seen: Vec<&str> = sentence.tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for word in seen {
            *document_frequency.entry(word).or_insert(0) += 1;
        }
    }
    let idf: HashMap<&str, f64> = document_frequency
        .iter()
        .map(|(w, &df)| (*w, (m as f64 / df as f64).ln()))
        .collect();
    let vectors: Vec<HashMap<&str, f64>> = sentences
        .iter()
        .map(|sentence| {
            let mut v: HashMap<&str, f64> = HashMap::new();
            for token in &sentence.tokens {
                *v.entry(token.as_str()).or_insert(0.0) += 1.0;
            }
            for (word, tf) in v.iter_mut() {
                *tf *= idf[word];
            }
            v
        })
        .collect();
    let norms: Vec<f64> = vectors
        .iter()
        .map(|v| v.values().map(|x| x * x).sum::<f64>().sqrt())
        .collect();

    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); m];
    for a in 0..m {
        for b in (a + 1)..m {
            let sim = if norms[a] == 0.0 || norms[b] == 0.0 {
                0.0
            } else {
                let dot: f64 = vectors[a]
                    .iter()
                    .filter_map(|(w, x)| vectors[b].get(w).map(|y| x * y))
                    .sum();
                dot / (norms[a] * norms[b])
            };
            if sim >= config.lexrank_similarity_threshold {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
    }

    let damping = config.lexrank_damping;
    let uniform = 1.0 / m as f64;
    let mut p = vec![uniform; m];
    for _ in 0..MAX_POWER_ITERATIONS {
        let dangling: f64 = (0..m)
            .filter(|&u| neighbors[u].is_empty())
            .map(|u| p[u])
            .sum();
        let mut next = vec![(1.0 - damping) * uniform + damping * dangling * uniform; m];
        for u in 0..m {
            let degree = neighbors[u].len();
            if degree > 0 {
                let share = damping * p[u] / degree as f64;
                for &v in &neighbors[u] {
                    next[v] += share;
                }
            }
        }
        let change: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if change < config.lexrank_epsilon {
            return Ok(p);
        }
    }
    Err(Error::PowerIterationDiverged(MAX_POWER_ITERATIONS))
}

/// LexRank: rank sentences by centrality, then add them in descending order
/// while they fit the budget. Ties break toward the smaller index.
pub fn lexrank(sentences: &[Sentence], config: &BaselineConfig) -> Result<Summary> {
    if sentences.is_empty() {
        return Ok(Summary::empty());
    }
    let centralities = lexrank_centralities(sentences, config)?;
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.sort_by(|&a, &b| {
        centralities[b]
            .partial_cmp(&centralities[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut residual = config.word_budget;
    let mut chosen = Vec::new();
    for idx in order {
        if sentences[idx].word_count <= residual {
            residual -= sentences[idx].word_count;
            chosen.push(idx);
        }
    }
    chosen.sort_unstable();
    let total_words = chosen.iter().map(|&i| sentences[i].word_count).sum();
    Ok(Summary {
        selected: chosen,
        concept_values: Vec::new(),
        objective_value: 0.0,
        total_words,
        exact: false,
    })
}

/// Build the binary selection problem for one document's sentences. Concepts
/// with no occurrence in these sentences are dropped; `kept` maps problem
/// rows back to indices into `concepts`.
pub fn document_binary_problem(
    sentences: &[Sentence],
    concepts: &[Concept],
    word_budget: usize,
) -> Result<(SelectionProblem, Vec<usize>)> {
    let occurrence: HashMap<(&str, &str), usize> = concepts
        .iter()
        .enumerate()
        .map(|(pos, c)| ((c.bigram.0.as_str(), c.bigram.1.as_str()), pos))
        .collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut row_of: HashMap<usize, usize> = HashMap::new();
    for (col, sentence) in sentences.iter().enumerate() {
        for pair in sentence.tokens.windows(2) {
            if let Some(&pos) = occurrence.get(&(pair[0].as_str(), pair[1].as_str())) {
                let row = *row_of.entry(pos).or_insert_with(|| {
                    rows.push(vec![0.0; sentences.len()]);
                    kept.push(pos);
                    rows.len() - 1
                });
                rows[row][col] = 1.0;
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(
            "no concept occurs in the document's sentences".into(),
        ));
    }
    let matrix = DMatrix::from_fn(rows.len(), sentences.len(), |i, j| rows[i][j]);
    let weights: Vec<f64> = kept.iter().map(|&pos| concepts[pos].weight).collect();
    let lengths: Vec<usize> = sentences.iter().map(|s| s.word_count).collect();
    let problem = SelectionProblem::new(matrix, weights, lengths, word_budget, ZMode::Binary)?;
    Ok((problem, kept))
}

/// The coverage ILP on the raw binary matrix, solved exactly.
pub fn ilp_baseline(
    sentences: &[Sentence],
    concepts: &[Concept],
    word_budget: usize,
) -> Result<Summary> {
    if word_budget == 0 {
        return Ok(Summary::empty());
    }
    let (problem, _) = document_binary_problem(sentences, concepts, word_budget)?;
    solve_exact(&problem)
}
