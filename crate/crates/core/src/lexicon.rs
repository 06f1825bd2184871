//! Dictionary compilation for heading-based tagging.
//!
//! A lexicon is a list of headings, each with a preferred name, entry
//! terms (synonyms, always including the preferred name), and tree
//! numbers encoding its place in a hierarchy. The source is a TSV with
//! header `heading_id\tpreferred_name\ttree_numbers\tentry_terms`,
//! tree numbers and entry terms pipe-separated.
//!
//! Entry terms are normalized at compile time: lowercase, whitespace
//! collapsed, punctuation stripped at token edges, no stemming. A
//! normalized term must map to exactly one heading.

use std::collections::hash_map::Entry;
use std::collections::BTreeSet;
use std::collections::HashMap;

use thiserror::Error;

/// One dictionary heading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heading {
    pub heading_id: String,
    pub preferred_name: String,
    /// Normalized entry terms, preferred name included.
    pub entry_terms: BTreeSet<String>,
    pub tree_numbers: BTreeSet<String>,
}

/// A compiled dictionary.
#[derive(Debug, Clone)]
pub struct Lexicon {
    headings: Vec<Heading>,
    term_to_heading: HashMap<String, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("entry term `{term}` claimed by headings `{heading_a}` and `{heading_b}`")]
    DuplicateEntryTerm {
        term: String,
        heading_a: String,
        heading_b: String,
    },
    #[error("duplicate heading id `{0}`")]
    DuplicateHeading(String),
    #[error("lexicon is empty after filtering")]
    EmptyLexicon,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

const LEXICON_HEADER: &str = "heading_id\tpreferred_name\ttree_numbers\tentry_terms";

/// Normalize a phrase: lowercase, collapse whitespace, strip
/// non-alphanumeric characters from token edges. Tokens that end up
/// empty are dropped. No stemming.
pub fn normalize_phrase(phrase: &str) -> String {
    let mut tokens: Vec<String> = Vec::new();
    for raw in phrase.split_whitespace() {
        let chars: Vec<char> = raw.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && !chars[start].is_alphanumeric() {
            start += 1;
        }
        while end > start && !chars[end - 1].is_alphanumeric() {
            end -= 1;
        }
        if start < end {
            tokens.push(
                chars[start..end]
                    .iter()
                    .flat_map(|c| c.to_lowercase())
                    .collect(),
            );
        }
    }
    tokens.join(" ")
}

/// Whether a tree number sits under a prefix, compared component-wise so
/// that `C23` matches `C23.888.119` but not `C230.1`.
pub fn tree_has_prefix(tree_number: &str, prefix: &str) -> bool {
    let mut tree = tree_number.split('.');
    for want in prefix.split('.') {
        match tree.next() {
            Some(part) if part == want => {}
            _ => return false,
        }
    }
    true
}

impl Lexicon {
    /// Compile a lexicon from its TSV source, optionally keeping only
    /// headings with a tree number under `branch_filter`.
    pub fn compile(source: &str, branch_filter: Option<&str>) -> Result<Lexicon, LexiconError> {
        let mut lines = source.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header == LEXICON_HEADER => {}
            _ => {
                return Err(LexiconError::Malformed {
                    line: 1,
                    reason: format!("expected header `{LEXICON_HEADER}`"),
                })
            }
        }

        let mut headings: Vec<Heading> = Vec::new();
        let mut term_to_heading: HashMap<String, usize> = HashMap::new();
        let mut seen_ids: BTreeSet<String> = BTreeSet::new();

        for (index, raw) in lines {
            let line = index + 1;
            if raw.is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            let [heading_id, preferred_name, tree_numbers, entry_terms] = fields.as_slice() else {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            };
            if heading_id.is_empty() {
                return Err(LexiconError::Malformed {
                    line,
                    reason: "empty heading_id".to_string(),
                });
            }
            if !seen_ids.insert(heading_id.to_string()) {
                return Err(LexiconError::DuplicateHeading(heading_id.to_string()));
            }

            let trees: BTreeSet<String> = tree_numbers
                .split('|')
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();

            if let Some(prefix) = branch_filter {
                if !trees.iter().any(|tree| tree_has_prefix(tree, prefix)) {
                    continue;
                }
            }

            let mut terms: BTreeSet<String> = BTreeSet::new();
            for term in std::iter::once(*preferred_name)
                .chain(entry_terms.split('|'))
                .filter(|t| !t.is_empty())
            {
                let normalized = normalize_phrase(term);
                if normalized.is_empty() {
                    return Err(LexiconError::Malformed {
                        line,
                        reason: format!("entry term `{term}` is empty after normalization"),
                    });
                }
                terms.insert(normalized);
            }
            if terms.is_empty() {
                return Err(LexiconError::Malformed {
                    line,
                    reason: "heading has no entry terms".to_string(),
                });
            }

            let heading_index = headings.len();
            for term in &terms {
                match term_to_heading.entry(term.clone()) {
                    Entry::Vacant(slot) => {
                        slot.insert(heading_index);
                    }
                    Entry::Occupied(existing) => {
                        return Err(LexiconError::DuplicateEntryTerm {
                            term: term.clone(),
                            heading_a: headings[*existing.get()].heading_id.clone(),
                            heading_b: heading_id.to_string(),
                        });
                    }
                }
            }

            headings.push(Heading {
                heading_id: heading_id.to_string(),
                preferred_name: preferred_name.to_string(),
                entry_terms: terms,
                tree_numbers: trees,
            });
        }

        if headings.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(Lexicon {
            headings,
            term_to_heading,
        })
    }

    pub fn headings(&self) -> &[Heading] {
        &self.headings
    }

    pub fn heading(&self, index: usize) -> &Heading {
        &self.headings[index]
    }

    pub fn heading_by_id(&self, heading_id: &str) -> Option<&Heading> {
        self.headings.iter().find(|h| h.heading_id == heading_id)
    }

    /// Heading index owning a normalized term.
    pub fn heading_of_term(&self, normalized_term: &str) -> Option<usize> {
        self.term_to_heading.get(normalized_term).copied()
    }

    /// All `(normalized term, heading index)` pairs.
    pub fn term_entries(&self) -> impl Iterator<Item = (&str, usize)> {
        self.term_to_heading
            .iter()
            .map(|(term, &idx)| (term.as_str(), idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FEVER_ROW: &str = "D005334\tFever\tC23.888.119.846\tfever|Pyrexia\n";

    fn with_header(rows: &str) -> String {
        format!("{LEXICON_HEADER}\n{rows}")
    }

    #[test]
    fn compiles_and_normalizes_entries() {
        let lexicon = Lexicon::compile(&with_header(FEVER_ROW), Some("C23")).unwrap();
        assert_eq!(lexicon.headings().len(), 1);
        let heading = &lexicon.headings()[0];
        assert_eq!(heading.preferred_name, "Fever");
        assert_eq!(
            heading.entry_terms.iter().cloned().collect::<Vec<_>>(),
            vec!["fever".to_string(), "pyrexia".to_string()]
        );
    }

    #[test]
    fn branch_filter_can_empty_the_lexicon() {
        let err = Lexicon::compile(&with_header(FEVER_ROW), Some("C14")).unwrap_err();
        assert_eq!(err, LexiconError::EmptyLexicon);
    }

    #[test]
    fn prefix_matching_is_component_wise() {
        assert!(tree_has_prefix("C23.888.119", "C23"));
        assert!(tree_has_prefix("C23.888.119", "C23.888"));
        assert!(!tree_has_prefix("C230.1", "C23"));
        assert!(!tree_has_prefix("C23", "C23.888"));
    }

    #[test]
    fn duplicate_entry_terms_across_headings_rejected() {
        let rows = "D1\tEdema\tC23.1\tedema\nD2\tSwelling\tC23.2\tedema\n";
        let err = Lexicon::compile(&with_header(rows), None).unwrap_err();
        assert_eq!(
            err,
            LexiconError::DuplicateEntryTerm {
                term: "edema".to_string(),
                heading_a: "D1".to_string(),
                heading_b: "D2".to_string(),
            }
        );
    }

    #[test]
    fn normalization_strips_edge_punctuation() {
        assert_eq!(normalize_phrase("  Fever,  (severe) "), "fever severe");
        assert_eq!(normalize_phrase("COVID-19."), "covid-19");
        assert_eq!(normalize_phrase("Behcet's Syndrome"), "behcet's syndrome");
        assert_eq!(normalize_phrase("..."), "");
    }

    #[test]
    fn multi_tree_headings_keep_all_numbers() {
        let rows = "D1\tCough\tC23.888.852.293|C08.618.248\tcough\n";
        let lexicon = Lexicon::compile(&with_header(rows), Some("C08")).unwrap();
        assert_eq!(lexicon.headings()[0].tree_numbers.len(), 2);
    }
}
