//! Dictionary tagging: leftmost-longest matching, heading rollups, tree
//! grouping, and passage-level co-mention matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::corpus::{Corpus, PassageKind};
use crate::lexicon::Lexicon;

/// A match inside a single text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextMatch {
    /// Character offsets of the matched span.
    pub start: usize,
    pub end: usize,
    /// The normalized entry term that matched.
    pub matched_term: String,
    pub heading_id: String,
}

/// A match located in a corpus document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub doc_id: String,
    /// Index into the document's passage list.
    pub passage_index: usize,
    pub start: usize,
    pub end: usize,
    pub matched_term: String,
    pub heading_id: String,
}

struct Token {
    /// Char offsets of the token core (edge punctuation stripped).
    start: usize,
    end: usize,
    core: String,
}

fn tokenize(chars: &[char]) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let token_start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let mut start = token_start;
        let mut end = i;
        while start < end && !chars[start].is_alphanumeric() {
            start += 1;
        }
        while end > start && !chars[end - 1].is_alphanumeric() {
            end -= 1;
        }
        if start < end {
            tokens.push(Token {
                start,
                end,
                core: chars[start..end]
                    .iter()
                    .flat_map(|c| c.to_lowercase())
                    .collect(),
            });
        }
    }
    tokens
}

struct Pattern {
    tokens: Vec<String>,
    term: String,
    heading: usize,
}

/// A lexicon prepared for matching. Case-insensitive, token-boundary
/// respecting; overlaps resolved leftmost-longest.
pub struct Matcher<'a> {
    lexicon: &'a Lexicon,
    by_first_token: HashMap<String, Vec<Pattern>>,
}

impl<'a> Matcher<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Matcher<'a> {
        let mut by_first_token: HashMap<String, Vec<Pattern>> = HashMap::new();
        for (term, heading) in lexicon.term_entries() {
            let tokens: Vec<String> = term.split(' ').map(String::from).collect();
            by_first_token
                .entry(tokens[0].clone())
                .or_default()
                .push(Pattern {
                    tokens,
                    term: term.to_string(),
                    heading,
                });
        }
        for patterns in by_first_token.values_mut() {
            // Longest first; term text disambiguates deterministically
            // (equal-length duplicates cannot exist).
            patterns.sort_by(|a, b| {
                b.tokens
                    .len()
                    .cmp(&a.tokens.len())
                    .then(a.term.cmp(&b.term))
            });
        }
        Matcher {
            lexicon,
            by_first_token,
        }
    }

    pub fn find(&self, text: &str) -> Vec<TextMatch> {
        let chars: Vec<char> = text.chars().collect();
        let tokens = tokenize(&chars);
        let mut matches = Vec::new();

        let mut i = 0;
        'scan: while i < tokens.len() {
            if let Some(patterns) = self.by_first_token.get(&tokens[i].core) {
                for pattern in patterns {
                    let len = pattern.tokens.len();
                    if i + len > tokens.len() {
                        continue;
                    }
                    if !pattern
                        .tokens
                        .iter()
                        .zip(&tokens[i..i + len])
                        .all(|(want, token)| *want == token.core)
                    {
                        continue;
                    }
                    // Multi-word terms only match across plain whitespace;
                    // intervening punctuation breaks the phrase.
                    if !(1..len).all(|j| {
                        chars[tokens[i + j - 1].end..tokens[i + j].start]
                            .iter()
                            .all(|c| c.is_whitespace())
                    }) {
                        continue;
                    }
                    matches.push(TextMatch {
                        start: tokens[i].start,
                        end: tokens[i + len - 1].end,
                        matched_term: pattern.term.clone(),
                        heading_id: self.lexicon.heading(pattern.heading).heading_id.clone(),
                    });
                    i += len;
                    continue 'scan;
                }
            }
            i += 1;
        }
        matches
    }
}

/// Tag one text against a lexicon. Corpus-scale callers should build a
/// [`Matcher`] once instead.
pub fn tag_text(lexicon: &Lexicon, text: &str) -> Vec<TextMatch> {
    Matcher::new(lexicon).find(text)
}

/// Tag every passage of the given kinds across the corpus. Documents are
/// processed in parallel; output order is by document id, then passage
/// index, then span start.
pub fn tag_corpus(corpus: &Corpus, lexicon: &Lexicon, kinds: &BTreeSet<PassageKind>) -> Vec<Match> {
    let matcher = Matcher::new(lexicon);
    let docs: Vec<_> = corpus.documents().collect();
    docs.par_iter()
        .map(|doc| {
            let mut doc_matches = Vec::new();
            for (passage_index, text) in doc.passages_of(kinds) {
                for hit in matcher.find(text) {
                    doc_matches.push(Match {
                        doc_id: doc.doc_id.clone(),
                        passage_index,
                        start: hit.start,
                        end: hit.end,
                        matched_term: hit.matched_term,
                        heading_id: hit.heading_id,
                    });
                }
            }
            doc_matches
        })
        .flatten()
        .collect()
}

/// Documents matching each heading, rolled up over entry terms.
pub fn heading_doc_sets(
    corpus: &Corpus,
    lexicon: &Lexicon,
    kinds: &BTreeSet<PassageKind>,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for hit in tag_corpus(corpus, lexicon, kinds) {
        sets.entry(hit.heading_id).or_default().insert(hit.doc_id);
    }
    sets
}

/// Per-heading article counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadingCount {
    pub heading_id: String,
    pub name: String,
    pub article_count: usize,
}

/// Article counts per heading, sorted by count descending then name
/// ascending. Headings with no matches are omitted.
pub fn heading_article_counts(
    corpus: &Corpus,
    lexicon: &Lexicon,
    kinds: &BTreeSet<PassageKind>,
) -> Vec<HeadingCount> {
    let sets = heading_doc_sets(corpus, lexicon, kinds);
    let mut counts: Vec<HeadingCount> = sets
        .into_iter()
        .map(|(heading_id, docs)| {
            let name = lexicon
                .heading_by_id(&heading_id)
                .map(|h| h.preferred_name.clone())
                .unwrap_or_else(|| heading_id.clone());
            HeadingCount {
                heading_id,
                name,
                article_count: docs.len(),
            }
        })
        .collect();
    counts.sort_by(|a, b| {
        b.article_count
            .cmp(&a.article_count)
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.heading_id.cmp(&b.heading_id))
    });
    counts
}

/// Aggregate per-heading document sets up the tree hierarchy.
///
/// Each heading contributes its documents to every distinct tree prefix
/// truncated at `depth` components. Group counts are document unions, so
/// a document counts once per group no matter how many member headings
/// mention it. Headings without tree numbers are skipped.
pub fn group_by_tree(
    doc_sets: &BTreeMap<String, BTreeSet<String>>,
    lexicon: &Lexicon,
    depth: usize,
) -> BTreeMap<String, usize> {
    assert!(depth >= 1, "depth must be positive");
    let mut groups: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for (heading_id, docs) in doc_sets {
        let Some(heading) = lexicon.heading_by_id(heading_id) else {
            continue;
        };
        let prefixes: BTreeSet<String> = heading
            .tree_numbers
            .iter()
            .map(|tree| tree.split('.').take(depth).collect::<Vec<_>>().join("."))
            .collect();
        for prefix in prefixes {
            groups
                .entry(prefix)
                .or_default()
                .extend(docs.iter().map(String::as_str));
        }
    }
    groups
        .into_iter()
        .map(|(prefix, docs)| (prefix, docs.len()))
        .collect()
}

/// Symmetric heading-by-heading co-mention matrix.
///
/// Off-diagonal cells count documents with at least one passage of an
/// allowed kind matching both headings; the diagonal counts documents
/// matching the heading in any allowed passage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComentionMatrix {
    /// `(heading_id, preferred_name)` in cell order.
    pub headings: Vec<(String, String)>,
    pub cells: Vec<Vec<usize>>,
}

impl ComentionMatrix {
    /// Restrict the matrix to its first `n` headings (they are ordered
    /// by diagonal count descending already).
    pub fn top(&self, n: usize) -> ComentionMatrix {
        let n = n.min(self.headings.len());
        ComentionMatrix {
            headings: self.headings[..n].to_vec(),
            cells: self.cells[..n]
                .iter()
                .map(|row| row[..n].to_vec())
                .collect(),
        }
    }
}

pub fn comention_matrix(
    corpus: &Corpus,
    lexicon: &Lexicon,
    kinds: &BTreeSet<PassageKind>,
) -> ComentionMatrix {
    // Per document: headings seen at all, and heading pairs sharing a passage.
    let mut heading_docs: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    let mut pair_docs: BTreeMap<(String, String), BTreeSet<&str>> = BTreeMap::new();

    let matches = tag_corpus(corpus, lexicon, kinds);
    let mut by_doc: BTreeMap<&str, BTreeMap<usize, BTreeSet<&str>>> = BTreeMap::new();
    for hit in &matches {
        by_doc
            .entry(&hit.doc_id)
            .or_default()
            .entry(hit.passage_index)
            .or_default()
            .insert(&hit.heading_id);
    }

    for (doc_id, passages) in &by_doc {
        for headings in passages.values() {
            let list: Vec<&str> = headings.iter().copied().collect();
            for (i, a) in list.iter().enumerate() {
                heading_docs
                    .entry(a.to_string())
                    .or_default()
                    .insert(doc_id);
                for b in &list[i + 1..] {
                    pair_docs
                        .entry((a.to_string(), b.to_string()))
                        .or_default()
                        .insert(doc_id);
                }
            }
        }
    }

    let mut ordered: Vec<(String, usize)> = heading_docs
        .iter()
        .map(|(id, docs)| (id.clone(), docs.len()))
        .collect();
    ordered.sort_by(|a, b| {
        let name = |id: &str| {
            lexicon
                .heading_by_id(id)
                .map(|h| h.preferred_name.clone())
                .unwrap_or_else(|| id.to_string())
        };
        b.1.cmp(&a.1)
            .then_with(|| name(&a.0).cmp(&name(&b.0)))
            .then_with(|| a.0.cmp(&b.0))
    });

    let index: BTreeMap<&str, usize> = ordered
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();
    let n = ordered.len();
    let mut cells = vec![vec![0usize; n]; n];
    for (i, (_, diag)) in ordered.iter().enumerate() {
        cells[i][i] = *diag;
    }
    for ((a, b), docs) in &pair_docs {
        let i = index[a.as_str()];
        let j = index[b.as_str()];
        cells[i][j] = docs.len();
        cells[j][i] = docs.len();
    }

    let headings = ordered
        .into_iter()
        .map(|(id, _)| {
            let name = lexicon
                .heading_by_id(&id)
                .map(|h| h.preferred_name.clone())
                .unwrap_or_else(|| id.clone());
            (id, name)
        })
        .collect();
    ComentionMatrix { headings, cells }
}
