//! Tokenization, sentence splitting, bigram concept extraction, and corpus
//! statistics.
//!
//! Concepts are adjacent token pairs. A pair whose two tokens are both
//! stopwords is discarded; a pair with exactly one stopword is kept. Each
//! concept is weighted by its sentence frequency, the number of distinct
//! sentences containing it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// The three reflection prompts a response can answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prompt {
    Interesting,
    Confusing,
    Learning,
}

impl Prompt {
    pub fn as_str(&self) -> &'static str {
        match self {
            Prompt::Interesting => "interesting",
            Prompt::Confusing => "confusing",
            Prompt::Learning => "learning",
        }
    }
}

impl std::str::FromStr for Prompt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "interesting" => Ok(Prompt::Interesting),
            "confusing" => Ok(Prompt::Confusing),
            "learning" => Ok(Prompt::Learning),
            other => Err(Error::InvalidInput(format!(
                "unknown prompt '{other}' (expected interesting, confusing, or learning)"
            ))),
        }
    }
}

impl std::fmt::Display for Prompt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One student response to one prompt after one lecture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseUnit {
    pub lecture_id: String,
    pub prompt_id: Prompt,
    pub student_id: Option<String>,
    pub raw_text: String,
}

impl ResponseUnit {
    pub fn new(
        lecture_id: impl Into<String>,
        prompt_id: Prompt,
        student_id: Option<String>,
        raw_text: impl Into<String>,
    ) -> Result<Self> {
        let raw_text = raw_text.into();
        if raw_text.trim().is_empty() {
            return Err(Error::InvalidInput(
                "response text is empty after trimming".into(),
            ));
        }
        Ok(ResponseUnit {
            lecture_id: lecture_id.into(),
            prompt_id,
            student_id,
            raw_text,
        })
    }
}

/// A tokenized sentence. `source` indexes into the corpus response list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub sentence_id: usize,
    pub source: usize,
    pub tokens: Vec<String>,
    pub word_count: usize,
}

/// A bigram concept with its sentence-frequency weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Concept {
    pub concept_id: usize,
    pub bigram: (String, String),
    pub weight: f64,
}

impl Concept {
    pub fn bigram_text(&self) -> String {
        format!("{} {}", self.bigram.0, self.bigram.1)
    }
}

/// Set of lowercase stopwords.
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

impl StopwordList {
    /// The list shipped with the crate (~150 common English words).
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_STOPWORDS).expect("bundled stopword list is valid")
    }

    /// Parse a list in the file format: one word per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let words: HashSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        if words.is_empty() {
            return Err(Error::EmptyStopwords);
        }
        Ok(StopwordList { words })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercase and split `text` on whitespace, stripping punctuation but
/// keeping hyphens and apostrophes that sit inside a word.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|word| {
            let cleaned: String = word
                .chars()
                .filter(|c| c.is_alphanumeric() || *c == '-' || *c == '\'')
                .flat_map(char::to_lowercase)
                .collect();
            let trimmed = cleaned.trim_matches(|c| c == '-' || c == '\'');
            if trimmed.is_empty() {
                None
            } else {
                Some(trimmed.to_string())
            }
        })
        .collect()
}

/// Split one response into sentences on terminal punctuation and newlines.
/// Sentences that tokenize to nothing are dropped; a response with no
/// terminal punctuation yields exactly one sentence.
///
/// `source` is the index of `unit` in its corpus; `next_id` is the id to
/// assign to the first produced sentence.
pub fn split_sentences(unit: &ResponseUnit, source: usize, next_id: usize) -> Vec<Sentence> {
    let mut out = Vec::new();
    for piece in unit.raw_text.split(['.', '!', '?', '\n', '\r']) {
        let tokens = tokenize(piece);
        if tokens.is_empty() {
            continue;
        }
        let word_count = tokens.len();
        out.push(Sentence {
            sentence_id: next_id + out.len(),
            source,
            tokens,
            word_count,
        });
    }
    out
}

/// Tokenize and split every response in order, assigning contiguous
/// sentence ids.
pub fn split_all(responses: &[ResponseUnit]) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    for (source, unit) in responses.iter().enumerate() {
        let mut split = split_sentences(unit, source, sentences.len());
        sentences.append(&mut split);
    }
    sentences
}

/// Extract bigram concepts from `sentences`, dropping pairs made of two
/// stopwords. Concept ids follow first occurrence; weights are sentence
/// frequencies.
pub fn extract_concepts(sentences: &[Sentence], stopwords: &StopwordList) -> Result<Vec<Concept>> {
    if stopwords.is_empty() {
        return Err(Error::EmptyStopwords);
    }
    let mut concepts: Vec<Concept> = Vec::new();
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    for sentence in sentences {
        let mut seen_here: HashSet<usize> = HashSet::new();
        for pair in sentence.tokens.windows(2) {
            if stopwords.contains(&pair[0]) && stopwords.contains(&pair[1]) {
                continue;
            }
            let key = (pair[0].clone(), pair[1].clone());
            let id = *index.entry(key.clone()).or_insert_with(|| {
                concepts.push(Concept {
                    concept_id: concepts.len(),
                    bigram: key,
                    weight: 0.0,
                });
                concepts.len() - 1
            });
            if seen_here.insert(id) {
                concepts[id].weight += 1.0;
            }
        }
    }
    Ok(concepts)
}

/// Descriptive statistics for an ingested corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub response_count: usize,
    pub mean_response_words: f64,
    pub stddev_response_words: f64,
    pub document_count: usize,
    pub mean_document_words: f64,
    /// Total words in each (lecture, prompt) pseudo-document.
    pub document_words: BTreeMap<(String, Prompt), usize>,
    pub concept_count: usize,
    pub sentence_count: usize,
    /// Fraction of concepts whose total occurrence count across the corpus
    /// is one or two.
    pub low_frequency_fraction: f64,
    pub matrix_density: f64,
}

/// Compute corpus statistics: response length mean/stddev (population),
/// words per (lecture, prompt) pseudo-document, the fraction of concepts
/// occurring at most twice, and the co-occurrence matrix density.
pub fn corpus_stats(
    responses: &[ResponseUnit],
    sentences: &[Sentence],
    concepts: &[Concept],
) -> Result<CorpusStats> {
    if responses.is_empty() || sentences.is_empty() {
        return Err(Error::InvalidInput("corpus is empty".into()));
    }

    let mut words_per_response = vec![0usize; responses.len()];
    let mut words_per_document: BTreeMap<(String, Prompt), usize> = BTreeMap::new();
    for sentence in sentences {
        words_per_response[sentence.source] += sentence.word_count;
        let unit = &responses[sentence.source];
        *words_per_document
            .entry((unit.lecture_id.clone(), unit.prompt_id))
            .or_insert(0) += sentence.word_count;
    }

    let n = responses.len() as f64;
    let mean = words_per_response.iter().sum::<usize>() as f64 / n;
    let variance = words_per_response
        .iter()
        .map(|&w| (w as f64 - mean).powi(2))
        .sum::<f64>()
        / n;

    let doc_count = words_per_document.len();
    let mean_doc_words =
        words_per_document.values().sum::<usize>() as f64 / doc_count.max(1) as f64;

    // Occurrence counts over concept bigrams, multiplicity included.
    let mut occurrences: HashMap<(&str, &str), usize> = HashMap::new();
    for sentence in sentences {
        for pair in sentence.tokens.windows(2) {
            *occurrences
                .entry((pair[0].as_str(), pair[1].as_str()))
                .or_insert(0) += 1;
        }
    }
    let low = concepts
        .iter()
        .filter(|c| {
            occurrences
                .get(&(c.bigram.0.as_str(), c.bigram.1.as_str()))
                .copied()
                .unwrap_or(0)
                <= 2
        })
        .count();
    let low_fraction = if concepts.is_empty() {
        0.0
    } else {
        low as f64 / concepts.len() as f64
    };

    let matrix = crate::cooccurrence::build_matrix(sentences, concepts)?;

    Ok(CorpusStats {
        response_count: responses.len(),
        mean_response_words: mean,
        stddev_response_words: variance.sqrt(),
        document_count: doc_count,
        mean_document_words: mean_doc_words,
        document_words: words_per_document,
        concept_count: concepts.len(),
        sentence_count: sentences.len(),
        low_frequency_fraction: low_fraction,
        matrix_density: crate::cooccurrence::density(&matrix),
    })
}
