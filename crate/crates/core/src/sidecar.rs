//! Sidecar tables: document metadata and extra passages.
//!
//! The annotation format carries no dates or category labels, so they
//! arrive in a tab-separated sidecar with header
//! `doc_id\tpub_date\tcategories` (date ISO-8601 or empty, categories
//! pipe-separated or empty). Extra passages (figure captions and the
//! like) use a second table with header `doc_id\tkind\ttext`.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::{CategoryLabel, Corpus, PassageKind};

/// Metadata attached to one document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocMeta {
    pub pub_date: Option<NaiveDate>,
    pub categories: BTreeSet<CategoryLabel>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SidecarError {
    #[error("line {line}: bad date `{value}`")]
    BadDate { line: usize, value: String },
    #[error("line {line}: unknown category label `{label}`")]
    UnknownCategory { line: usize, label: String },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

const META_HEADER: &str = "doc_id\tpub_date\tcategories";
const PASSAGE_HEADER: &str = "doc_id\tkind\ttext";

/// Parse the metadata sidecar into a map keyed by document id.
pub fn parse_sidecar(input: &str) -> Result<BTreeMap<String, DocMeta>, SidecarError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == META_HEADER => {}
        _ => {
            return Err(SidecarError::Malformed {
                line: 1,
                reason: format!("expected header `{META_HEADER}`"),
            })
        }
    }

    let mut meta = BTreeMap::new();
    for (index, raw) in lines {
        let line = index + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [doc_id, date, categories] = fields.as_slice() else {
            return Err(SidecarError::Malformed {
                line,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        if doc_id.is_empty() {
            return Err(SidecarError::Malformed {
                line,
                reason: "empty doc_id".to_string(),
            });
        }

        let pub_date = if date.is_empty() {
            None
        } else {
            Some(NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| {
                SidecarError::BadDate {
                    line,
                    value: date.to_string(),
                }
            })?)
        };

        let mut labels = BTreeSet::new();
        if !categories.is_empty() {
            for label in categories.split('|') {
                labels.insert(CategoryLabel::parse(label).map_err(|_| {
                    SidecarError::UnknownCategory {
                        line,
                        label: label.to_string(),
                    }
                })?);
            }
        }

        if meta
            .insert(
                doc_id.to_string(),
                DocMeta {
                    pub_date,
                    categories: labels,
                },
            )
            .is_some()
        {
            return Err(SidecarError::Malformed {
                line,
                reason: format!("duplicate row for doc_id `{doc_id}`"),
            });
        }
    }
    Ok(meta)
}

/// Attach metadata to matching documents. Rows for absent documents are
/// not fatal; their ids are returned for reporting.
pub fn apply_sidecar(corpus: &mut Corpus, meta: &BTreeMap<String, DocMeta>) -> Vec<String> {
    let mut unmatched = Vec::new();
    for (doc_id, entry) in meta {
        match corpus.get_mut(doc_id) {
            Some(doc) => {
                doc.pub_date = entry.pub_date;
                doc.categories = entry.categories.clone();
            }
            None => unmatched.push(doc_id.clone()),
        }
    }
    unmatched
}

/// Parse the extra-passage table. Only `caption` and `other` kinds are
/// accepted; title and abstract always come from the annotation file.
pub fn parse_passages(input: &str) -> Result<Vec<(String, PassageKind, String)>, SidecarError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == PASSAGE_HEADER => {}
        _ => {
            return Err(SidecarError::Malformed {
                line: 1,
                reason: format!("expected header `{PASSAGE_HEADER}`"),
            })
        }
    }

    let mut rows = Vec::new();
    for (index, raw) in lines {
        let line = index + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [doc_id, kind, text] = fields.as_slice() else {
            return Err(SidecarError::Malformed {
                line,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        let kind = match PassageKind::parse(kind) {
            Some(kind @ (PassageKind::Caption | PassageKind::Other)) => kind,
            _ => {
                return Err(SidecarError::Malformed {
                    line,
                    reason: format!("passage kind must be caption or other, got `{kind}`"),
                })
            }
        };
        rows.push((doc_id.to_string(), kind, text.to_string()));
    }
    Ok(rows)
}

/// Append extra passages to matching documents, preserving row order.
/// Rows for absent documents are returned for reporting.
pub fn apply_passages(corpus: &mut Corpus, rows: &[(String, PassageKind, String)]) -> Vec<String> {
    let mut unmatched = Vec::new();
    for (doc_id, kind, text) in rows {
        match corpus.get_mut(doc_id) {
            Some(doc) => doc.add_passage(*kind, text.clone()),
            None => unmatched.push(doc_id.clone()),
        }
    }
    unmatched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    #[test]
    fn parses_dates_and_labels() {
        let input = "doc_id\tpub_date\tcategories\n123\t2020-03-01\tTreatment|Mechanism\n";
        let meta = parse_sidecar(input).unwrap();
        let entry = &meta["123"];
        assert_eq!(entry.pub_date, NaiveDate::from_ymd_opt(2020, 3, 1));
        assert_eq!(entry.categories.len(), 2);
        assert!(entry.categories.contains(&CategoryLabel::Treatment));
        assert!(entry.categories.contains(&CategoryLabel::Mechanism));
    }

    #[test]
    fn empty_categories_mean_no_labels() {
        let input = "doc_id\tpub_date\tcategories\n123\t2020-03-01\t\n";
        let meta = parse_sidecar(input).unwrap();
        assert!(meta["123"].categories.is_empty());
    }

    #[test]
    fn invalid_month_is_bad_date() {
        let input = "doc_id\tpub_date\tcategories\n123\t2020-13-01\t\n";
        assert_eq!(
            parse_sidecar(input).unwrap_err(),
            SidecarError::BadDate {
                line: 2,
                value: "2020-13-01".to_string()
            }
        );
    }

    #[test]
    fn unknown_label_is_rejected() {
        let input = "doc_id\tpub_date\tcategories\n123\t\tVaccines\n";
        assert!(matches!(
            parse_sidecar(input).unwrap_err(),
            SidecarError::UnknownCategory { line: 2, .. }
        ));
    }

    #[test]
    fn absent_doc_ids_are_reported_not_fatal() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(Document::new("1", "t", "a"))
            .unwrap();
        let input = "doc_id\tpub_date\tcategories\n1\t2020-02-01\tPrevention\n2\t2020-02-02\t\n";
        let meta = parse_sidecar(input).unwrap();
        let unmatched = apply_sidecar(&mut corpus, &meta);
        assert_eq!(unmatched, vec!["2".to_string()]);
        assert_eq!(
            corpus.get("1").unwrap().pub_date,
            NaiveDate::from_ymd_opt(2020, 2, 1)
        );
    }

    #[test]
    fn passage_rows_append_in_order() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(Document::new("1", "t", "a"))
            .unwrap();
        let input = "doc_id\tkind\ttext\n1\tcaption\tFigure 1 GGO\n1\tcaption\tFigure 2 mass\n";
        let rows = parse_passages(input).unwrap();
        let unmatched = apply_passages(&mut corpus, &rows);
        assert!(unmatched.is_empty());
        let doc = corpus.get("1").unwrap();
        assert_eq!(doc.passages.len(), 4);
        assert_eq!(doc.passages[2].1, "Figure 1 GGO");
        assert_eq!(doc.passages[3].1, "Figure 2 mass");
    }

    #[test]
    fn title_kind_rejected_in_passage_table() {
        let input = "doc_id\tkind\ttext\n1\ttitle\tnope\n";
        assert!(parse_passages(input).is_err());
    }
}
