//! Command-line interface: summarize documents, run imputation, evaluate
//! methods, tune lambda, and print corpus statistics.

use clap::{Parser, Subcommand};
use feedsum::corpus::{load_corpus, Corpus};
use feedsum::error::{Error, Result};
use feedsum::experiment::{
    analyze, make_folds, render_metric_table, run_report, summarize_document, tune_lambda,
    AnalyzedCorpus, ExperimentConfig, Method,
};
use feedsum::impute::{soft_impute, trace_csv};
use feedsum::text::{corpus_stats, Prompt, StopwordList};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "feedsum",
    about = "Summarize short, lexically diverse text collections by matrix completion and concept-coverage selection"
)]
struct Cli {
    /// Optional TOML config file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize one (lecture, prompt) document.
    Summarize {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        lecture: String,
        #[arg(long)]
        prompt: String,
        /// One of: ilp-impute, ilp-baseline, sumbasic, lexrank.
        #[arg(long)]
        method: String,
        /// Trace-norm weight for ilp-impute.
        #[arg(long)]
        lambda: Option<f64>,
        /// Summary word budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Complete the co-occurrence matrix and dump the result.
    Impute {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Write the completed matrix in the text dump format.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        /// Write the objective trace as CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Score methods against reference summaries and print the report.
    Evaluate {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Methods to evaluate, space separated.
        #[arg(long, num_args = 1..)]
        methods: Vec<String>,
        #[arg(long)]
        budget: Option<usize>,
        /// Trace-norm weight used when ilp-impute is evaluated.
        #[arg(long)]
        lambda: Option<f64>,
        /// Also write summaries and associations under this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Cross-validated grid search for lambda.
    Tune {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Grid as start:end:step (e.g. 0:5:0.5) or a single value.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print corpus statistics.
    Stats {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

/// Optional config file; any present key acts as the flag default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corpus: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    budget: Option<usize>,
    lambda: Option<f64>,
    grid: Option<String>,
    folds: Option<usize>,
    seed: Option<u64>,
    methods: Option<Vec<String>>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<ConfigFile> {
        match path {
            None => Ok(ConfigFile::default()),
            Some(path) => {
                let content = std::fs::read_to_string(path)?;
                toml::from_str(&content)
                    .map_err(|e| Error::InvalidInput(format!("config file: {e}")))
            }
        }
    }

    fn stopword_list(&self) -> Result<StopwordList> {
        match &self.stopwords {
            Some(path) => StopwordList::from_path(path),
            None => Ok(StopwordList::default_english()),
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |msg: &str| Error::InvalidInput(format!("grid '{spec}': {msg}"));
    match parts.as_slice() {
        [single] => {
            let value: f64 = single.parse().map_err(|_| bad("not a number"))?;
            Ok(vec![value])
        }
        [start, end, step] => {
            let start: f64 = start.parse().map_err(|_| bad("bad start"))?;
            let end: f64 = end.parse().map_err(|_| bad("bad end"))?;
            let step: f64 = step.parse().map_err(|_| bad("bad step"))?;
            if step <= 0.0 || end < start {
                return Err(bad("need start <= end and step > 0"));
            }
            let mut grid = Vec::new();
            let mut k = 0usize;
            loop {
                let value = start + k as f64 * step;
                if value > end + 1e-9 {
                    break;
                }
                grid.push(value);
                k += 1;
            }
            Ok(grid)
        }
        _ => Err(bad("expected start:end:step or a single value")),
    }
}

fn require_corpus(flag: Option<PathBuf>, config: &ConfigFile) -> Result<PathBuf> {
    flag.or_else(|| config.corpus.clone())
        .ok_or_else(|| Error::InvalidInput("--corpus is required (flag or config file)".into()))
}

fn load_analyzed(path: &Path, config: &ConfigFile) -> Result<AnalyzedCorpus> {
    let corpus: Corpus = load_corpus(path)?;
    analyze(corpus, &config.stopword_list()?)
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|n| Method::from_str(n)).collect()
}

fn run(cli: Cli) -> Result<()> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Summarize {
            corpus,
            lecture,
            prompt,
            method,
            lambda,
            budget,
        } => {
            let path = require_corpus(corpus, &config)?;
            let analyzed = load_analyzed(&path, &config)?;
            let prompt = Prompt::from_str(&prompt)?;
            let method = Method::from_str(&method)?;
            let budget = budget.or(config.budget).unwrap_or(30);
            let lambda = lambda.or(config.lambda).unwrap_or(1.0);
            let doc = analyzed.find_document(&lecture, prompt)?;
            let experiment = ExperimentConfig::default();
            let imputed = if method == Method::IlpImpute {
                Some(soft_impute(&analyzed.matrix, &experiment.impute_config(lambda))?.values)
            } else {
                None
            };
            let summary = summarize_document(&analyzed, doc, method, budget, imputed.as_ref())?;
            for &id in &summary.selected {
                println!("{}", analyzed.sentence_text(id));
            }
        }
        Command::Impute {
            corpus,
            lambda,
            matrix_out,
            trace_out,
        } => {
            let path = require_corpus(corpus, &config)?;
            let analyzed = load_analyzed(&path, &config)?;
            let lambda = lambda.or(config.lambda).unwrap_or(1.0);
            let experiment = ExperimentConfig::default();
            let result = soft_impute(&analyzed.matrix, &experiment.impute_config(lambda))?;
            let completed = analyzed.matrix.with_values(result.values.clone())?;
            if let Some(out) = matrix_out {
                std::fs::write(&out, completed.dump())?;
            }
            if let Some(out) = trace_out {
                std::fs::write(&out, trace_csv(&result.objective_trace))?;
            }
            println!(
                "lambda {} iterations {} converged {} objective {:.6} density {:.4} -> {:.4}",
                lambda,
                result.iterations_run,
                result.converged,
                result.final_objective,
                feedsum::cooccurrence::density(&analyzed.matrix),
                feedsum::cooccurrence::density(&completed),
            );
        }
        Command::Evaluate {
            corpus,
            methods,
            budget,
            lambda,
            out_dir,
        } => {
            let path = require_corpus(corpus, &config)?;
            let analyzed = load_analyzed(&path, &config)?;
            let method_names = if methods.is_empty() {
                config
                    .methods
                    .clone()
                    .unwrap_or_else(|| Method::ALL.iter().map(|m| m.as_str().to_string()).collect())
            } else {
                methods
            };
            let experiment = ExperimentConfig {
                word_budget: budget.or(config.budget).unwrap_or(30),
                lambda: lambda.or(config.lambda).unwrap_or(1.0),
                methods: parse_methods(&method_names)?,
                ..ExperimentConfig::default()
            };
            let report = run_report(&analyzed, &experiment)?;
            print!("{}", report.render());
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("report.txt"), report.render())?;
                for summary in &report.summaries {
                    let name = format!(
                        "{}_{}_{}.txt",
                        summary.method, summary.lecture_id, summary.prompt
                    );
                    std::fs::write(dir.join(name), summary.lines.join("\n"))?;
                }
            }
        }
        Command::Tune {
            corpus,
            grid,
            folds,
            seed,
            budget,
        } => {
            let path = require_corpus(corpus, &config)?;
            let analyzed = load_analyzed(&path, &config)?;
            let grid_spec = grid
                .or_else(|| config.grid.clone())
                .unwrap_or_else(|| "0:5:0.5".to_string());
            let experiment = ExperimentConfig {
                word_budget: budget.or(config.budget).unwrap_or(30),
                lambda_grid: parse_grid(&grid_spec)?,
                folds: folds.or(config.folds).unwrap_or(3),
                seed: seed.or(config.seed).unwrap_or(0),
                ..ExperimentConfig::default()
            };
            // Surface fold construction errors before the imputations run.
            make_folds(
                &analyzed.corpus.annotated_lectures(),
                experiment.folds,
                experiment.seed,
            )?;
            let outcome = tune_lambda(&analyzed, &experiment)?;
            for (index, fold) in outcome.folds.iter().enumerate() {
                println!(
                    "fold {} test [{}] lambda {} rouge1-f {:.4}",
                    index + 1,
                    fold.test_lectures.join(" "),
                    fold.chosen_lambda,
                    fold.test_scores.rouge_1.f1,
                );
            }
            println!("averaged over {} folds:", outcome.folds.len());
            print!(
                "{}",
                render_metric_table(&[(Method::IlpImpute, outcome.averaged)])
            );
        }
        Command::Stats { corpus } => {
            let path = require_corpus(corpus, &config)?;
            let analyzed = load_analyzed(&path, &config)?;
            let stats = corpus_stats(
                analyzed.corpus.responses(),
                &analyzed.sentences,
                &analyzed.concepts,
            )?;
            println!("responses                 {}", stats.response_count);
            println!("sentences                 {}", stats.sentence_count);
            println!("concepts                  {}", stats.concept_count);
            println!("documents                 {}", stats.document_count);
            println!(
                "response words mean/std   {:.2} / {:.2}",
                stats.mean_response_words, stats.stddev_response_words
            );
            println!("document words mean       {:.2}", stats.mean_document_words);
            println!(
                "bigrams with freq <= 2    {:.4}",
                stats.low_frequency_fraction
            );
            println!("matrix density            {:.4}", stats.matrix_density);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
