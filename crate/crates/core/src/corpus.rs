//! Corpus ingestion: JSON Lines files of student responses and reference
//! summaries.
//!
//! Each line is one record. Response records look like
//! `{"lecture": "L01", "prompt": "interesting", "student": "s1", "text": "..."}`
//! (student may be null or absent); reference records carry a list of bullet
//! strings instead of text:
//! `{"lecture": "L01", "prompt": "interesting", "reference": ["...", "..."]}`.

use crate::error::{Error, Result};
use crate::text::{Prompt, ResponseUnit};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

/// Responses plus optional per-document reference summaries. A document is
/// the set of responses sharing one (lecture, prompt) key.
#[derive(Debug, Clone)]
pub struct Corpus {
    responses: Vec<ResponseUnit>,
    references: BTreeMap<(String, Prompt), Vec<String>>,
}

impl Corpus {
    /// Validate and order a corpus: responses are stably sorted by
    /// (lecture, prompt), and every reference key must match at least one
    /// response.
    pub fn new(
        mut responses: Vec<ResponseUnit>,
        references: BTreeMap<(String, Prompt), Vec<String>>,
    ) -> Result<Self> {
        responses.sort_by(|a, b| {
            (a.lecture_id.as_str(), a.prompt_id).cmp(&(b.lecture_id.as_str(), b.prompt_id))
        });
        for (lecture, prompt) in references.keys() {
            let covered = responses
                .iter()
                .any(|r| &r.lecture_id == lecture && r.prompt_id == *prompt);
            if !covered {
                return Err(Error::OrphanReference {
                    lecture: lecture.clone(),
                    prompt: prompt.to_string(),
                });
            }
        }
        Ok(Corpus {
            responses,
            references,
        })
    }

    pub fn responses(&self) -> &[ResponseUnit] {
        &self.responses
    }

    pub fn references(&self) -> &BTreeMap<(String, Prompt), Vec<String>> {
        &self.references
    }

    pub fn reference(&self, lecture: &str, prompt: Prompt) -> Option<&Vec<String>> {
        self.references.get(&(lecture.to_string(), prompt))
    }

    /// Reference bullets joined with sentence breaks and tokenized.
    pub fn reference_tokens(&self, lecture: &str, prompt: Prompt) -> Option<Vec<String>> {
        self.reference(lecture, prompt)
            .map(|bullets| crate::text::tokenize(&bullets.join(". ")))
    }

    /// Lectures that have at least one reference summary, sorted.
    pub fn annotated_lectures(&self) -> Vec<String> {
        let mut lectures: Vec<String> = self
            .references
            .keys()
            .map(|(lecture, _)| lecture.clone())
            .collect();
        lectures.sort();
        lectures.dedup();
        lectures
    }
}

fn field_str<'v>(
    obj: &'v serde_json::Map<String, Value>,
    key: &str,
    line: usize,
) -> Result<&'v str> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::CorpusFormat {
            line,
            message: format!("missing or non-string field '{key}'"),
        })
}

/// Read a corpus file, reporting malformed lines by number (1-based).
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let content = std::fs::read_to_string(path)?;
    parse_corpus(&content)
}

/// Parse corpus file content. Blank lines are ignored.
pub fn parse_corpus(content: &str) -> Result<Corpus> {
    let mut responses = Vec::new();
    let mut references: BTreeMap<(String, Prompt), Vec<String>> = BTreeMap::new();
    for (index, raw_line) in content.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(trimmed).map_err(|e| Error::CorpusFormat {
            line,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::CorpusFormat {
            line,
            message: "record is not a JSON object".into(),
        })?;
        let lecture = field_str(obj, "lecture", line)?.to_string();
        let prompt: Prompt = field_str(obj, "prompt", line)?
            .parse()
            .map_err(|e: Error| Error::CorpusFormat {
                line,
                message: e.to_string(),
            })?;

        if let Some(reference) = obj.get("reference") {
            let bullets: Vec<String> = reference
                .as_array()
                .ok_or_else(|| Error::CorpusFormat {
                    line,
                    message: "'reference' must be an array of strings".into(),
                })?
                .iter()
                .map(|b| {
                    b.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::CorpusFormat {
                            line,
                            message: "'reference' must be an array of strings".into(),
                        })
                })
                .collect::<Result<_>>()?;
            if bullets.is_empty() {
                return Err(Error::CorpusFormat {
                    line,
                    message: "'reference' must not be empty".into(),
                });
            }
            if references
                .insert((lecture.clone(), prompt), bullets)
                .is_some()
            {
                return Err(Error::DuplicateReference {
                    lecture,
                    prompt: prompt.to_string(),
                });
            }
        } else {
            let text = field_str(obj, "text", line)?;
            let student = match obj.get("student") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => {
                    return Err(Error::CorpusFormat {
                        line,
                        message: "'student' must be a string or null".into(),
                    })
                }
            };
            let unit = ResponseUnit::new(lecture, prompt, student, text).map_err(|e| {
                Error::CorpusFormat {
                    line,
                    message: e.to_string(),
                }
            })?;
            responses.push(unit);
        }
    }
    Corpus::new(responses, references)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_two_response_fixture() {
        let content = r#"
{"lecture": "L01", "prompt": "interesting", "student": "s1", "text": "bicycle parts activity"}
{"lecture": "L01", "prompt": "confusing", "student": null, "text": "stress strain graphs"}
"#;
        let corpus = parse_corpus(content).unwrap();
        assert_eq!(corpus.responses().len(), 2);
        assert!(corpus.references().is_empty());
    }

    #[test]
    fn reference_without_responses_is_rejected() {
        let content = r#"
{"lecture": "L01", "prompt": "interesting", "text": "bicycle parts activity"}
{"lecture": "L02", "prompt": "interesting", "reference": ["something else"]}
"#;
        assert!(matches!(
            parse_corpus(content),
            Err(Error::OrphanReference { .. })
        ));
    }

    #[test]
    fn eight_responses_and_reference_make_one_document() {
        let mut content = String::new();
        for text in [
            "The main topics of this course seem interesting and correspond with my major (Chemical engineering)",
            "I found the group activity most interesting",
            "Process that make materials",
            "I found the properties of bike elements to be most interesting",
            "How materials are manufactured",
            "Finding out what we will learn in this class was interesting to me",
            "The activity with the bicycle parts",
            "part of a bike activity",
        ] {
            content.push_str(&format!(
                "{}\n",
                serde_json::json!({"lecture": "L01", "prompt": "interesting", "text": text})
            ));
        }
        content.push_str(
            r#"{"lecture": "L01", "prompt": "interesting", "reference": ["group activity of analyzing bicycle's parts", "materials processing", "the main topic of this course"]}"#,
        );
        let corpus = parse_corpus(&content).unwrap();
        assert_eq!(corpus.responses().len(), 8);
        assert_eq!(corpus.references().len(), 1);
        assert_eq!(corpus.annotated_lectures(), vec!["L01".to_string()]);
        let tokens = corpus.reference_tokens("L01", Prompt::Interesting).unwrap();
        assert!(tokens.contains(&"bicycle's".to_string()));
    }

    #[test]
    fn malformed_line_reports_number() {
        let content = "{\"lecture\": \"L01\", \"prompt\": \"interesting\", \"text\": \"ok words\"}\nnot json\n";
        match parse_corpus(content) {
            Err(Error::CorpusFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_reference_is_rejected() {
        let content = r#"
{"lecture": "L01", "prompt": "interesting", "text": "bicycle parts activity"}
{"lecture": "L01", "prompt": "interesting", "reference": ["a"]}
{"lecture": "L01", "prompt": "interesting", "reference": ["b"]}
"#;
        assert!(matches!(
            parse_corpus(content),
            Err(Error::DuplicateReference { .. })
        ));
    }

    #[test]
    fn unknown_prompt_is_rejected_with_line() {
        let content = r#"{"lecture": "L01", "prompt": "bogus", "text": "words here"}"#;
        match parse_corpus(content) {
            Err(Error::CorpusFormat { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn responses_sorted_by_lecture_then_prompt() {
        let content = r#"
{"lecture": "L02", "prompt": "interesting", "text": "later lecture"}
{"lecture": "L01", "prompt": "learning", "text": "first lecture learning"}
{"lecture": "L01", "prompt": "interesting", "text": "first lecture interesting"}
"#;
        let corpus = parse_corpus(content).unwrap();
        let keys: Vec<(String, Prompt)> = corpus
            .responses()
            .iter()
            .map(|r| (r.lecture_id.clone(), r.prompt_id))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("L01".to_string(), Prompt::Interesting),
                ("L01".to_string(), Prompt::Learning),
                ("L02".to_string(), Prompt::Interesting),
            ]
        );
    }
}
