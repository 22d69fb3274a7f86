//! Experiment orchestration: pipeline assembly, per-document summarization,
//! fold splits, lambda grid search, and report rendering.

use crate::baselines::{self, BaselineConfig};
use crate::cooccurrence::{self, CooccurrenceMatrix};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::impute::{soft_impute, ImputeConfig};
use crate::rouge::{self, MetricSet};
use crate::solver::{solve_exact, SelectionProblem, Summary, ZMode};
use crate::text::{self, Concept, Prompt, Sentence, StopwordList};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::fmt::Write as _;

/// The sentences of one (lecture, prompt) pseudo-document.
#[derive(Debug, Clone)]
pub struct Document {
    pub lecture_id: String,
    pub prompt: Prompt,
    /// Corpus-global sentence ids, ascending.
    pub sentence_ids: Vec<usize>,
}

/// A corpus run through the text pipeline: sentences, concepts, the global
/// co-occurrence matrix over all lectures, and the document index.
#[derive(Debug, Clone)]
pub struct AnalyzedCorpus {
    pub corpus: Corpus,
    pub stopwords: StopwordList,
    pub sentences: Vec<Sentence>,
    pub concepts: Vec<Concept>,
    pub matrix: CooccurrenceMatrix,
    pub documents: Vec<Document>,
}

/// Tokenize, split, extract concepts, and build the matrix over every
/// sentence in the corpus.
pub fn analyze(corpus: Corpus, stopwords: &StopwordList) -> Result<AnalyzedCorpus> {
    let sentences = text::split_all(corpus.responses());
    if sentences.is_empty() {
        return Err(Error::InvalidInput(
            "corpus contains no non-empty sentences".into(),
        ));
    }
    let concepts = text::extract_concepts(&sentences, stopwords)?;
    if concepts.is_empty() {
        return Err(Error::InvalidInput(
            "corpus yields no bigram concepts".into(),
        ));
    }
    let matrix = cooccurrence::build_matrix(&sentences, &concepts)?;

    let mut documents: Vec<Document> = Vec::new();
    for sentence in &sentences {
        let unit = &corpus.responses()[sentence.source];
        match documents.last_mut() {
            Some(doc) if doc.lecture_id == unit.lecture_id && doc.prompt == unit.prompt_id => {
                doc.sentence_ids.push(sentence.sentence_id);
            }
            _ => documents.push(Document {
                lecture_id: unit.lecture_id.clone(),
                prompt: unit.prompt_id,
                sentence_ids: vec![sentence.sentence_id],
            }),
        }
    }

    Ok(AnalyzedCorpus {
        corpus,
        stopwords: stopwords.clone(),
        sentences,
        concepts,
        matrix,
        documents,
    })
}

impl AnalyzedCorpus {
    pub fn find_document(&self, lecture: &str, prompt: Prompt) -> Result<&Document> {
        self.documents
            .iter()
            .find(|d| d.lecture_id == lecture && d.prompt == prompt)
            .ok_or_else(|| Error::UnknownDocument {
                lecture: lecture.to_string(),
                prompt: prompt.to_string(),
            })
    }

    pub fn document_sentences(&self, doc: &Document) -> Vec<Sentence> {
        doc.sentence_ids
            .iter()
            .map(|&id| self.sentences[id].clone())
            .collect()
    }

    /// Token stream of a summary: selected sentences in id order.
    pub fn summary_tokens(&self, selected: &[usize]) -> Vec<String> {
        let mut ids = selected.to_vec();
        ids.sort_unstable();
        ids.iter()
            .flat_map(|&id| self.sentences[id].tokens.iter().cloned())
            .collect()
    }

    pub fn sentence_text(&self, id: usize) -> String {
        self.sentences[id].tokens.join(" ")
    }
}

/// Summarization method selectable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    IlpImpute,
    IlpBaseline,
    SumBasic,
    LexRank,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::IlpImpute,
        Method::IlpBaseline,
        Method::SumBasic,
        Method::LexRank,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::IlpImpute => "ilp-impute",
            Method::IlpBaseline => "ilp-baseline",
            Method::SumBasic => "sumbasic",
            Method::LexRank => "lexrank",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ilp-impute" => Ok(Method::IlpImpute),
            "ilp-baseline" => Ok(Method::IlpBaseline),
            "sumbasic" => Ok(Method::SumBasic),
            "lexrank" => Ok(Method::LexRank),
            other => Err(Error::InvalidInput(format!(
                "unknown method '{other}' (expected ilp-impute, ilp-baseline, sumbasic, or lexrank)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Settings shared by the evaluation and tuning entry points.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub word_budget: usize,
    /// Regularization weight used when a single imputation is requested.
    pub lambda: f64,
    /// Grid searched by [`tune_lambda`].
    pub lambda_grid: Vec<f64>,
    pub folds: usize,
    pub methods: Vec<Method>,
    /// Seed for the fold shuffle.
    pub seed: u64,
    pub impute_iterations: usize,
    pub impute_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            word_budget: 30,
            lambda: 1.0,
            lambda_grid: (0..=10).map(|k| k as f64 * 0.5).collect(),
            folds: 3,
            methods: Method::ALL.to_vec(),
            seed: 0,
            impute_iterations: 500,
            impute_tolerance: 1e-6,
        }
    }
}

impl ExperimentConfig {
    pub fn impute_config(&self, lambda: f64) -> ImputeConfig {
        ImputeConfig {
            lambda,
            max_iterations: self.impute_iterations,
            rel_tolerance: self.impute_tolerance,
            ..ImputeConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.word_budget == 0 {
            return Err(Error::InvalidInput("word budget must be positive".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidInput("lambda grid must be non-empty".into()));
        }
        if self.lambda_grid.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::InvalidInput(
                "lambda grid values must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Restrict completed matrix values to one document's columns and build the
/// continuous-coverage selection problem. Concept rows with no mass in the
/// document are dropped. Returns `None` when nothing remains to cover.
fn restricted_problem(
    values: &DMatrix<f64>,
    concepts: &[Concept],
    sentences: &[Sentence],
    doc: &Document,
    word_budget: usize,
) -> Result<Option<SelectionProblem>> {
    let cols = &doc.sentence_ids;
    let mut rows: Vec<usize> = Vec::new();
    for i in 0..values.nrows() {
        if cols.iter().any(|&j| values[(i, j)] != 0.0) {
            rows.push(i);
        }
    }
    if rows.is_empty() {
        return Ok(None);
    }
    let matrix = DMatrix::from_fn(rows.len(), cols.len(), |r, c| values[(rows[r], cols[c])]);
    let weights: Vec<f64> = rows.iter().map(|&i| concepts[i].weight).collect();
    let lengths: Vec<usize> = cols.iter().map(|&j| sentences[j].word_count).collect();
    let problem = SelectionProblem::new(matrix, weights, lengths, word_budget, ZMode::Continuous)?;
    Ok(Some(problem))
}

/// Summarize one document with the chosen method. `imputed` must carry the
/// completed matrix when the method is `ilp-impute`. The returned summary's
/// sentence indices are corpus-global.
pub fn summarize_document(
    analyzed: &AnalyzedCorpus,
    doc: &Document,
    method: Method,
    word_budget: usize,
    imputed: Option<&DMatrix<f64>>,
) -> Result<Summary> {
    let local_sentences = analyzed.document_sentences(doc);
    let mut summary = match method {
        Method::SumBasic => baselines::sumbasic(&local_sentences, &analyzed.stopwords, word_budget),
        Method::LexRank => {
            let config = BaselineConfig {
                word_budget,
                ..BaselineConfig::default()
            };
            baselines::lexrank(&local_sentences, &config)?
        }
        Method::IlpBaseline => {
            if has_concept_support(&local_sentences, analyzed) {
                baselines::ilp_baseline(&local_sentences, &analyzed.concepts, word_budget)?
            } else {
                Summary::empty()
            }
        }
        Method::IlpImpute => {
            let values = imputed.ok_or_else(|| {
                Error::InvalidInput("ilp-impute requires an imputed matrix".into())
            })?;
            match restricted_problem(
                values,
                &analyzed.concepts,
                &analyzed.sentences,
                doc,
                word_budget,
            )? {
                Some(problem) => solve_exact(&problem)?,
                None => Summary::empty(),
            }
        }
    };
    // Map document-local indices back to corpus sentence ids.
    summary.selected = summary
        .selected
        .iter()
        .map(|&local| doc.sentence_ids[local])
        .collect();
    Ok(summary)
}

fn has_concept_support(sentences: &[Sentence], analyzed: &AnalyzedCorpus) -> bool {
    let known: HashSet<(&str, &str)> = analyzed
        .concepts
        .iter()
        .map(|c| (c.bigram.0.as_str(), c.bigram.1.as_str()))
        .collect();
    sentences.iter().any(|s| {
        s.tokens
            .windows(2)
            .any(|p| known.contains(&(p[0].as_str(), p[1].as_str())))
    })
}

/// Partition lecture ids into near-equal folds, deterministically in `seed`.
pub fn make_folds(lectures: &[String], folds: usize, seed: u64) -> Result<Vec<Vec<String>>> {
    let mut unique: Vec<String> = lectures.to_vec();
    unique.sort();
    unique.dedup();
    if folds == 0 {
        return Err(Error::InvalidInput("fold count must be positive".into()));
    }
    if unique.len() < folds {
        return Err(Error::NotEnoughLectures {
            lectures: unique.len(),
            folds,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unique.shuffle(&mut rng);
    let mut assignment: Vec<Vec<String>> = vec![Vec::new(); folds];
    for (index, lecture) in unique.into_iter().enumerate() {
        assignment[index % folds].push(lecture);
    }
    for fold in &mut assignment {
        fold.sort();
    }
    Ok(assignment)
}

/// Documents of the given lectures that have a reference summary, paired
/// with their reference tokens.
fn scoreable_documents<'a>(
    analyzed: &'a AnalyzedCorpus,
    lectures: &HashSet<&str>,
) -> Vec<(&'a Document, Vec<String>)> {
    analyzed
        .documents
        .iter()
        .filter(|d| lectures.contains(d.lecture_id.as_str()))
        .filter_map(|d| {
            analyzed
                .corpus
                .reference_tokens(&d.lecture_id, d.prompt)
                .map(|tokens| (d, tokens))
        })
        .collect()
}

fn score_documents(
    analyzed: &AnalyzedCorpus,
    docs: &[(&Document, Vec<String>)],
    values: &DMatrix<f64>,
    word_budget: usize,
) -> Result<MetricSet> {
    let mut pairs = Vec::with_capacity(docs.len());
    for (doc, reference) in docs {
        let summary =
            summarize_document(analyzed, doc, Method::IlpImpute, word_budget, Some(values))?;
        pairs.push((
            analyzed.summary_tokens(&summary.selected),
            reference.clone(),
        ));
    }
    rouge::evaluate_corpus(&pairs)
}

/// Per-fold tuning outcome.
#[derive(Debug, Clone)]
pub struct FoldReport {
    pub test_lectures: Vec<String>,
    pub chosen_lambda: f64,
    pub test_scores: MetricSet,
}

/// Cross-validated grid-search result.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub folds: Vec<FoldReport>,
    /// Each metric column averaged over the folds' test scores.
    pub averaged: MetricSet,
}

/// Three-fold style tuning: impute once per grid value over the full
/// matrix, choose the lambda maximizing mean ROUGE-1 F on the tuning folds
/// (ties to the smaller lambda), and score it on the held-out fold.
pub fn tune_lambda(analyzed: &AnalyzedCorpus, config: &ExperimentConfig) -> Result<TuneOutcome> {
    config.validate()?;
    let annotated = analyzed.corpus.annotated_lectures();
    if annotated.is_empty() {
        return Err(Error::MissingReferences(
            "no documents carry reference summaries".into(),
        ));
    }
    let folds = make_folds(&annotated, config.folds, config.seed)?;

    let mut grid: Vec<f64> = config.lambda_grid.clone();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    // One imputation per grid value, shared across folds.
    let mut completions: Vec<(f64, DMatrix<f64>)> = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let imputed = soft_impute(&analyzed.matrix, &config.impute_config(lambda))?;
        completions.push((lambda, imputed.values));
    }

    let mut reports: Vec<FoldReport> = Vec::with_capacity(folds.len());
    for held_out in &folds {
        let test_set: HashSet<&str> = held_out.iter().map(String::as_str).collect();
        let tune_set: HashSet<&str> = annotated
            .iter()
            .map(String::as_str)
            .filter(|l| !test_set.contains(l))
            .collect();
        debug_assert!(tune_set.is_disjoint(&test_set));
        let tune_docs = scoreable_documents(analyzed, &tune_set);
        let test_docs = scoreable_documents(analyzed, &test_set);
        if tune_docs.is_empty() || test_docs.is_empty() {
            return Err(Error::MissingReferences(format!(
                "fold {held_out:?} leaves no scoreable documents"
            )));
        }

        let mut chosen = completions[0].0;
        let mut chosen_values = &completions[0].1;
        let mut best_f = f64::NEG_INFINITY;
        for (lambda, values) in &completions {
            let scores = score_documents(analyzed, &tune_docs, values, config.word_budget)?;
            if scores.rouge_1.f1 > best_f {
                best_f = scores.rouge_1.f1;
                chosen = *lambda;
                chosen_values = values;
            }
        }

        let test_scores = score_documents(analyzed, &test_docs, chosen_values, config.word_budget)?;
        reports.push(FoldReport {
            test_lectures: held_out.clone(),
            chosen_lambda: chosen,
            test_scores,
        });
    }

    let averaged = average_metric_sets(reports.iter().map(|r| &r.test_scores))?;
    Ok(TuneOutcome {
        folds: reports,
        averaged,
    })
}

fn average_metric_sets<'a>(sets: impl Iterator<Item = &'a MetricSet>) -> Result<MetricSet> {
    let sets: Vec<&MetricSet> = sets.collect();
    let r1: Vec<_> = sets.iter().map(|s| s.rouge_1).collect();
    let r2: Vec<_> = sets.iter().map(|s| s.rouge_2).collect();
    let su4: Vec<_> = sets.iter().map(|s| s.rouge_su4).collect();
    Ok(MetricSet {
        rouge_1: rouge::macro_average(&r1)?,
        rouge_2: rouge::macro_average(&r2)?,
        rouge_su4: rouge::macro_average(&su4)?,
    })
}

/// One produced summary, for the report.
#[derive(Debug, Clone)]
pub struct ReportedSummary {
    pub method: Method,
    pub lecture_id: String,
    pub prompt: Prompt,
    pub lines: Vec<String>,
    pub total_words: usize,
}

/// Full evaluation report.
#[derive(Debug, Clone)]
pub struct Report {
    pub rows: Vec<(Method, MetricSet)>,
    pub summaries: Vec<ReportedSummary>,
    /// (sentence text, bigram text, value) above the reporting threshold.
    pub associations: Vec<(String, String, f64)>,
    pub binary_density: f64,
    pub imputed_density: Option<f64>,
    pub lambda: Option<f64>,
}

/// Imputed-association reporting threshold.
pub const ASSOCIATION_THRESHOLD: f64 = 0.9;

/// Run every configured method over the corpus: score on documents with
/// references, keep all produced summaries, and list the imputed
/// associations when imputation ran.
pub fn run_report(analyzed: &AnalyzedCorpus, config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    if config.methods.is_empty() {
        return Err(Error::InvalidInput("no methods requested".into()));
    }

    let needs_impute = config.methods.contains(&Method::IlpImpute);
    let imputed = if needs_impute {
        Some(soft_impute(
            &analyzed.matrix,
            &config.impute_config(config.lambda),
        )?)
    } else {
        None
    };
    let imputed_values = imputed.as_ref().map(|m| &m.values);

    let all_lectures: HashSet<&str> = analyzed
        .documents
        .iter()
        .map(|d| d.lecture_id.as_str())
        .collect();
    let scoreable = scoreable_documents(analyzed, &all_lectures);
    if scoreable.is_empty() {
        return Err(Error::MissingReferences(
            "no documents carry reference summaries".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &method in &config.methods {
        let mut pairs = Vec::new();
        for doc in &analyzed.documents {
            let summary =
                summarize_document(analyzed, doc, method, config.word_budget, imputed_values)?;
            if let Some(reference) = analyzed
                .corpus
                .reference_tokens(&doc.lecture_id, doc.prompt)
            {
                pairs.push((analyzed.summary_tokens(&summary.selected), reference));
            }
            summaries.push(ReportedSummary {
                method,
                lecture_id: doc.lecture_id.clone(),
                prompt: doc.prompt,
                lines: summary
                    .selected
                    .iter()
                    .map(|&id| analyzed.sentence_text(id))
                    .collect(),
                total_words: summary.total_words,
            });
        }
        rows.push((method, rouge::evaluate_corpus(&pairs)?));
    }

    let binary_density = cooccurrence::density(&analyzed.matrix);
    let mut associations = Vec::new();
    let mut imputed_density = None;
    if let Some(values) = imputed_values {
        let completed = analyzed.matrix.with_values(values.clone())?;
        imputed_density = Some(cooccurrence::density(&completed));
        for assoc in cooccurrence::associations_above(&completed, ASSOCIATION_THRESHOLD)? {
            associations.push((
                analyzed.sentence_text(assoc.sentence_id),
                analyzed.concepts[assoc.concept_id].bigram_text(),
                assoc.value,
            ));
        }
    }

    Ok(Report {
        rows,
        summaries,
        associations,
        binary_density,
        imputed_density,
        lambda: needs_impute.then_some(config.lambda),
    })
}

impl Report {
    /// Render the full report deterministically.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== metrics (percent) ==");
        out.push_str(&render_metric_table(&self.rows));

        let _ = writeln!(out);
        let _ = writeln!(out, "== summaries ==");
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "-- {} | {} | {} ({} words) --",
                s.method, s.lecture_id, s.prompt, s.total_words
            );
            for line in &s.lines {
                let _ = writeln!(out, "- {line}");
            }
        }

        if let Some(lambda) = self.lambda {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "== imputed associations (threshold {ASSOCIATION_THRESHOLD}, lambda {lambda}) =="
            );
            let _ = writeln!(
                out,
                "binary density {:.4}, imputed density {:.4}",
                self.binary_density,
                self.imputed_density.unwrap_or(0.0)
            );
            for (sentence, bigram, value) in &self.associations {
                let _ = writeln!(out, "{value:.3}  [{bigram}]  {sentence}");
            }
        }
        out
    }
}

/// Table-style rendering: one row per system, R/P/F percent columns for
/// each metric, one decimal place.
pub fn render_metric_table(rows: &[(Method, MetricSet)]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>28} {:>21} {:>21}",
        "", "ROUGE-1", "ROUGE-2", "ROUGE-SU4"
    );
    let _ = writeln!(
        out,
        "{:<14} {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}",
        "system", "R", "P", "F", "R", "P", "F", "R", "P", "F"
    );
    for (method, metrics) in rows {
        let _ = writeln!(
            out,
            "{:<14} {:>6.1} {:>6.1} {:>6.1}  {:>6.1} {:>6.1} {:>6.1}  {:>6.1} {:>6.1} {:>6.1}",
            method.as_str(),
            100.0 * metrics.rouge_1.recall,
            100.0 * metrics.rouge_1.precision,
            100.0 * metrics.rouge_1.f1,
            100.0 * metrics.rouge_2.recall,
            100.0 * metrics.rouge_2.precision,
            100.0 * metrics.rouge_2.f1,
            100.0 * metrics.rouge_su4.recall,
            100.0 * metrics.rouge_su4.precision,
            100.0 * metrics.rouge_su4.f1,
        );
    }
    out
}
