//! Canonical corpus serialization.
//!
//! A line-oriented structured-text export with one record per document,
//! documents ordered by id. Serializing a corpus and re-parsing the
//! result yields a field-by-field identical corpus, which is what the
//! round-trip tests rely on.
//!
//! ```text
//! #litscan-corpus v1
//! doc\t<doc_id>
//! date\t<ISO date or ->
//! cats\t<Label|Label or ->
//! passage\t<kind>\t<escaped text>     (one per passage, in order)
//! ann\t<start>\t<end>\t<mention>\t<type>[\t<concept id>]
//! <blank line>
//! ```
//!
//! Tabs, newlines, carriage returns, and backslashes inside text fields
//! are escaped as `\t`, `\n`, `\r`, `\\`.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::{CategoryLabel, Corpus, Document, EntityAnnotation, PassageKind};

const HEADER: &str = "#litscan-corpus v1";

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(format!(
                    "bad escape `\\{}`",
                    other.map(String::from).unwrap_or_default()
                ))
            }
        }
    }
    Ok(out)
}

/// Serialize a corpus in canonical form.
pub fn to_canonical(corpus: &Corpus) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for doc in corpus.documents() {
        out.push_str("doc\t");
        out.push_str(&escape(&doc.doc_id));
        out.push('\n');
        out.push_str("date\t");
        match doc.pub_date {
            Some(date) => out.push_str(&date.format("%Y-%m-%d").to_string()),
            None => out.push('-'),
        }
        out.push('\n');
        out.push_str("cats\t");
        if doc.categories.is_empty() {
            out.push('-');
        } else {
            let labels: Vec<&str> = doc.categories.iter().map(|c| c.as_str()).collect();
            out.push_str(&labels.join("|"));
        }
        out.push('\n');
        for (kind, text) in &doc.passages {
            out.push_str("passage\t");
            out.push_str(kind.as_str());
            out.push('\t');
            out.push_str(&escape(text));
            out.push('\n');
        }
        for ann in corpus.annotations_for(&doc.doc_id) {
            out.push_str(&format!(
                "ann\t{}\t{}\t{}\t{}",
                ann.start,
                ann.end,
                escape(&ann.mention),
                escape(&ann.concept_type)
            ));
            if let Some(id) = &ann.concept_id {
                out.push('\t');
                out.push_str(&escape(id));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Parse a canonical corpus export.
pub fn from_canonical(input: &str) -> Result<Corpus, CanonicalError> {
    let malformed = |line: usize, reason: &str| CanonicalError::Malformed {
        line,
        reason: reason.to_string(),
    };

    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == HEADER => {}
        _ => return Err(malformed(1, "missing canonical corpus header")),
    }

    struct PendingDoc {
        doc_id: String,
        date: Option<Option<NaiveDate>>,
        cats: Option<BTreeSet<CategoryLabel>>,
        passages: Vec<(PassageKind, String)>,
        anns: Vec<EntityAnnotation>,
    }

    let mut corpus = Corpus::new();
    let mut pending: Option<PendingDoc> = None;

    let mut finish =
        |pending: &mut Option<PendingDoc>, line: usize| -> Result<(), CanonicalError> {
            if let Some(doc) = pending.take() {
                let date = doc
                    .date
                    .ok_or_else(|| malformed(line, "record missing date line"))?;
                let cats = doc
                    .cats
                    .ok_or_else(|| malformed(line, "record missing cats line"))?;
                let document = Document::from_passages(doc.doc_id, date, cats, doc.passages)
                    .map_err(|e| malformed(line, &e.to_string()))?;
                corpus
                    .insert_document(document)
                    .map_err(|e| malformed(line, &e.to_string()))?;
                for ann in doc.anns {
                    corpus
                        .push_annotation(ann)
                        .map_err(|e| malformed(line, &e.to_string()))?;
                }
            }
            Ok(())
        };

    for (index, raw) in lines {
        let line_no = index + 1;
        if raw.is_empty() {
            finish(&mut pending, line_no)?;
            continue;
        }
        let mut fields = raw.split('\t');
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "doc" => {
                finish(&mut pending, line_no)?;
                let [id] = rest.as_slice() else {
                    return Err(malformed(line_no, "doc line takes one field"));
                };
                pending = Some(PendingDoc {
                    doc_id: unescape(id).map_err(|e| malformed(line_no, &e))?,
                    date: None,
                    cats: None,
                    passages: Vec::new(),
                    anns: Vec::new(),
                });
            }
            "date" => {
                let doc = pending
                    .as_mut()
                    .ok_or_else(|| malformed(line_no, "date before doc"))?;
                let [value] = rest.as_slice() else {
                    return Err(malformed(line_no, "date line takes one field"));
                };
                doc.date = Some(if *value == "-" {
                    None
                } else {
                    Some(
                        NaiveDate::parse_from_str(value, "%Y-%m-%d")
                            .map_err(|_| malformed(line_no, "bad date"))?,
                    )
                });
            }
            "cats" => {
                let doc = pending
                    .as_mut()
                    .ok_or_else(|| malformed(line_no, "cats before doc"))?;
                let [value] = rest.as_slice() else {
                    return Err(malformed(line_no, "cats line takes one field"));
                };
                let mut cats = BTreeSet::new();
                if *value != "-" {
                    for label in value.split('|') {
                        cats.insert(
                            CategoryLabel::parse(label)
                                .map_err(|e| malformed(line_no, &e.to_string()))?,
                        );
                    }
                }
                doc.cats = Some(cats);
            }
            "passage" => {
                let doc = pending
                    .as_mut()
                    .ok_or_else(|| malformed(line_no, "passage before doc"))?;
                let [kind, text] = rest.as_slice() else {
                    return Err(malformed(line_no, "passage line takes two fields"));
                };
                let kind = PassageKind::parse(kind)
                    .ok_or_else(|| malformed(line_no, "unknown passage kind"))?;
                doc.passages
                    .push((kind, unescape(text).map_err(|e| malformed(line_no, &e))?));
            }
            "ann" => {
                let doc = pending
                    .as_mut()
                    .ok_or_else(|| malformed(line_no, "ann before doc"))?;
                if rest.len() < 4 || rest.len() > 5 {
                    return Err(malformed(line_no, "ann line takes four or five fields"));
                }
                let start: usize = rest[0]
                    .parse()
                    .map_err(|_| malformed(line_no, "bad start offset"))?;
                let end: usize = rest[1]
                    .parse()
                    .map_err(|_| malformed(line_no, "bad end offset"))?;
                if end <= start {
                    return Err(malformed(line_no, "end offset not greater than start"));
                }
                doc.anns.push(EntityAnnotation {
                    doc_id: doc.doc_id.clone(),
                    start,
                    end,
                    mention: unescape(rest[2]).map_err(|e| malformed(line_no, &e))?,
                    concept_type: unescape(rest[3]).map_err(|e| malformed(line_no, &e))?,
                    concept_id: match rest.get(4) {
                        Some(id) => Some(unescape(id).map_err(|e| malformed(line_no, &e))?),
                        None => None,
                    },
                });
            }
            _ => return Err(malformed(line_no, "unknown record tag")),
        }
    }
    let final_line = input.lines().count();
    finish(&mut pending, final_line)?;

    Ok(corpus)
}
