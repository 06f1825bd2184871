//! Parser for the PubTator exchange format.
//!
//! Per document the format carries a title line `<id>|t|<title>`, an
//! abstract line `<id>|a|<abstract>`, and zero or more annotation lines
//! `<id>\t<start>\t<end>\t<mention>\t<type>\t<concept_id>` (the concept
//! id column is optional). Blocks are separated by blank lines.
//!
//! Annotation offsets are character offsets into the title and abstract
//! joined with a single space, which is what public snapshot files use.
//! If the space join does not reproduce the mention, the parser retries
//! with a newline join before flagging the line.

use std::io::BufRead;

use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Document, EntityAnnotation};

/// Parsing strictness.
///
/// `Strict` aborts on the first malformed line with its position;
/// `Lenient` skips malformed lines and counts them. A duplicate document
/// id is an error in both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Lenient,
}

/// Counters for what lenient parsing skipped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// Structural lines skipped (bad title/abstract lines, stray text).
    pub skipped_lines: usize,
    /// Annotation lines dropped (bad offsets, mention mismatch, unknown
    /// or mismatched document id).
    pub dropped_annotations: usize,
}

impl ParseStats {
    pub fn is_clean(&self) -> bool {
        self.skipped_lines == 0 && self.dropped_annotations == 0
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub stats: ParseStats,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate document id `{doc_id}`")]
    DuplicateDocId { line: usize, doc_id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse a PubTator stream.
pub fn parse_pubtator<R: BufRead>(reader: R, mode: ParseMode) -> Result<ParseOutcome, ParseError> {
    let mut corpus = Corpus::new();
    let mut stats = ParseStats::default();
    let mut block: Vec<(usize, String)> = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let mut line = line?;
        // Tolerate CRLF files.
        if line.ends_with('\r') {
            line.pop();
        }
        let line_no = index + 1;
        if line.trim().is_empty() {
            if !block.is_empty() {
                parse_block(&block, mode, &mut corpus, &mut stats)?;
                block.clear();
            }
        } else {
            block.push((line_no, line));
        }
    }
    if !block.is_empty() {
        parse_block(&block, mode, &mut corpus, &mut stats)?;
    }

    Ok(ParseOutcome { corpus, stats })
}

/// Parse a PubTator document held in memory.
pub fn parse_pubtator_str(input: &str, mode: ParseMode) -> Result<ParseOutcome, ParseError> {
    parse_pubtator(input.as_bytes(), mode)
}

fn malformed(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// Split a `<id>|<tag>|<text>` line. The text may itself contain `|`.
fn split_text_line(line: &str) -> Option<(&str, &str, &str)> {
    let mut parts = line.splitn(3, '|');
    let id = parts.next()?;
    let tag = parts.next()?;
    let text = parts.next()?;
    Some((id, tag, text))
}

fn parse_block(
    block: &[(usize, String)],
    mode: ParseMode,
    corpus: &mut Corpus,
    stats: &mut ParseStats,
) -> Result<(), ParseError> {
    let (first_line_no, first_line) = &block[0];

    let (doc_id, title) = match split_text_line(first_line) {
        Some((id, "t", text)) if !id.is_empty() && !id.contains('\t') => {
            (id.to_string(), text.to_string())
        }
        _ => {
            let err = malformed(*first_line_no, "expected `<id>|t|<title>` at block start");
            if mode == ParseMode::Strict {
                return Err(err);
            }
            stats.skipped_lines += block.len();
            return Ok(());
        }
    };

    let mut rest = &block[1..];
    let mut abstract_text = String::new();
    if let Some((line_no, line)) = rest.first() {
        if let Some((id, "a", text)) = split_text_line(line) {
            if id == doc_id {
                abstract_text = text.to_string();
                rest = &rest[1..];
            } else if mode == ParseMode::Strict {
                return Err(malformed(
                    *line_no,
                    "abstract line id differs from title line id",
                ));
            } else {
                stats.skipped_lines += 1;
                rest = &rest[1..];
            }
        }
    }

    let mut doc = Document::new(doc_id.clone(), title, abstract_text);

    // The two join conventions, materialized lazily as char vectors.
    let mut space_chars: Option<Vec<char>> = None;
    let mut newline_chars: Option<Vec<char>> = None;

    let mut annotations = Vec::new();
    for (line_no, line) in rest {
        match parse_annotation_line(
            line,
            &doc_id,
            &mut doc,
            &mut space_chars,
            &mut newline_chars,
        ) {
            Ok(ann) => annotations.push(ann),
            Err(reason) => {
                if mode == ParseMode::Strict {
                    return Err(malformed(*line_no, reason));
                }
                stats.dropped_annotations += 1;
            }
        }
    }

    match corpus.insert_document(doc) {
        Ok(()) => {}
        Err(CorpusError::DuplicateDocId(doc_id)) => {
            return Err(ParseError::DuplicateDocId {
                line: *first_line_no,
                doc_id,
            });
        }
        Err(other) => return Err(malformed(*first_line_no, other.to_string())),
    }
    for ann in annotations {
        corpus
            .push_annotation(ann)
            .expect("document inserted just above");
    }
    Ok(())
}

fn parse_annotation_line(
    line: &str,
    doc_id: &str,
    doc: &mut Document,
    space_chars: &mut Option<Vec<char>>,
    newline_chars: &mut Option<Vec<char>>,
) -> Result<EntityAnnotation, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 5 || fields.len() > 6 {
        return Err(format!(
            "expected 5 or 6 tab-separated annotation fields, found {}",
            fields.len()
        ));
    }
    if fields[0] != doc_id {
        return Err(format!(
            "annotation id `{}` differs from block id `{}`",
            fields[0], doc_id
        ));
    }
    let start: usize = fields[1]
        .parse()
        .map_err(|_| format!("bad start offset `{}`", fields[1]))?;
    let end: usize = fields[2]
        .parse()
        .map_err(|_| format!("bad end offset `{}`", fields[2]))?;
    if end <= start {
        return Err(format!(
            "end offset {end} not greater than start offset {start}"
        ));
    }
    let mention = fields[3].to_string();
    let concept_type = fields[4].to_string();
    let concept_id = match fields.get(5) {
        Some(id) if !id.is_empty() => Some(id.to_string()),
        _ => None,
    };

    let space = space_chars.get_or_insert_with(|| doc.annotation_text(' ').chars().collect());
    if !span_matches(space, start, end, &mention) {
        let newline =
            newline_chars.get_or_insert_with(|| doc.annotation_text('\n').chars().collect());
        if !span_matches(newline, start, end, &mention) {
            return Err(format!(
                "mention `{mention}` does not match text at offsets {start}..{end}"
            ));
        }
    }

    Ok(EntityAnnotation {
        doc_id: doc_id.to_string(),
        start,
        end,
        mention,
        concept_type,
        concept_id,
    })
}

fn span_matches(text: &[char], start: usize, end: usize, mention: &str) -> bool {
    if end > text.len() {
        return false;
    }
    let mut span = text[start..end].iter();
    let mut mention_chars = mention.chars();
    loop {
        match (span.next(), mention_chars.next()) {
            (None, None) => return true,
            (Some(a), Some(b)) if *a == b => {}
            _ => return false,
        }
    }
}
