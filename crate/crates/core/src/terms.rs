//! Term extraction: unigrams and two-word phrases with document postings.
//!
//! Tokenization is lowercase; a token is a maximal run of letters,
//! digits, and hyphens. A `/` splits tokens, but the joined form is kept
//! as an extra unigram so drug combinations like `lopinavir/ritonavir`
//! survive as one term. Unigrams exclude stopwords; bigrams are adjacent
//! token pairs within one sentence with neither token a stopword.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::corpus::Corpus;

/// One vocabulary term with its document postings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabTerm {
    pub text: String,
    /// Sorted indices into [`TermVocabulary::doc_ids`].
    pub postings: Vec<u32>,
}

impl VocabTerm {
    pub fn doc_freq(&self) -> usize {
        self.postings.len()
    }
}

/// The corpus vocabulary.
///
/// Terms are ordered by document frequency descending, then text
/// ascending; that ordering is also the clustering visit order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermVocabulary {
    pub doc_ids: Vec<String>,
    pub terms: Vec<VocabTerm>,
    index: HashMap<String, u32>,
}

impl TermVocabulary {
    /// Corpus size, including documents that contributed no term.
    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_index(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn term(&self, index: u32) -> &VocabTerm {
        &self.terms[index as usize]
    }

    /// Build a vocabulary from explicit postings (documents referenced
    /// by id; ids not listed in `doc_ids` are rejected by panic in
    /// tests' favor). Terms are re-sorted into canonical order.
    pub fn from_postings(
        doc_ids: Vec<String>,
        postings: Vec<(String, Vec<u32>)>,
    ) -> TermVocabulary {
        let n = doc_ids.len() as u32;
        let mut terms: Vec<VocabTerm> = postings
            .into_iter()
            .map(|(text, mut docs)| {
                docs.sort_unstable();
                docs.dedup();
                assert!(docs.iter().all(|&d| d < n), "posting out of range");
                VocabTerm {
                    text,
                    postings: docs,
                }
            })
            .collect();
        sort_terms(&mut terms);
        let index = build_index(&terms);
        TermVocabulary {
            doc_ids,
            terms,
            index,
        }
    }
}

fn sort_terms(terms: &mut [VocabTerm]) {
    terms.sort_by(|a, b| {
        b.postings
            .len()
            .cmp(&a.postings.len())
            .then_with(|| a.text.cmp(&b.text))
    });
}

fn build_index(terms: &[VocabTerm]) -> HashMap<String, u32> {
    terms
        .iter()
        .enumerate()
        .map(|(i, term)| (term.text.clone(), i as u32))
        .collect()
}

/// Load a stopword list: one lowercase word per line, `#` comments and
/// blank lines ignored.
pub fn load_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| line.to_lowercase())
        .collect()
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-'
}

fn is_sentence_break(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ';' | ':' | '\n')
}

/// Sentences as token lists, plus slash-joined extra unigrams.
struct SentenceTokens {
    tokens: Vec<String>,
    joined_unigrams: Vec<String>,
}

fn sentences(text: &str) -> Vec<SentenceTokens> {
    let mut out: Vec<SentenceTokens> = Vec::new();
    let mut current = SentenceTokens {
        tokens: Vec::new(),
        joined_unigrams: Vec::new(),
    };

    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if is_token_char(c) || c == '/' {
            // Maximal run of token chars and slashes.
            let mut raw = String::new();
            while let Some(&c) = chars.peek() {
                if is_token_char(c) || c == '/' {
                    raw.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let raw = raw.to_lowercase();
            let parts: Vec<&str> = raw
                .split('/')
                .filter(|part| part.chars().any(char::is_alphanumeric))
                .collect();
            if parts.len() >= 2 {
                current.joined_unigrams.push(parts.join("/"));
            }
            for part in parts {
                current.tokens.push(part.to_string());
            }
        } else {
            if is_sentence_break(c)
                && !(current.tokens.is_empty() && current.joined_unigrams.is_empty())
            {
                out.push(std::mem::replace(
                    &mut current,
                    SentenceTokens {
                        tokens: Vec::new(),
                        joined_unigrams: Vec::new(),
                    },
                ));
            }
            chars.next();
        }
    }
    if !(current.tokens.is_empty() && current.joined_unigrams.is_empty()) {
        out.push(current);
    }
    out
}

/// Terms of one document.
fn doc_terms(texts: &[&str], stopwords: &BTreeSet<String>) -> BTreeSet<String> {
    let mut terms = BTreeSet::new();
    for text in texts {
        for sentence in sentences(text) {
            for joined in &sentence.joined_unigrams {
                if !stopwords.contains(joined) {
                    terms.insert(joined.clone());
                }
            }
            let tokens = &sentence.tokens;
            for (i, token) in tokens.iter().enumerate() {
                let stop = stopwords.contains(token);
                if !stop {
                    terms.insert(token.clone());
                }
                if i + 1 < tokens.len() {
                    let next = &tokens[i + 1];
                    if !stop && !stopwords.contains(next) {
                        terms.insert(format!("{token} {next}"));
                    }
                }
            }
        }
    }
    terms
}

/// Extract the term vocabulary from titles and abstracts. Terms below
/// `min_df` document frequency are dropped.
pub fn extract_terms(
    corpus: &Corpus,
    stopwords: &BTreeSet<String>,
    min_df: usize,
) -> TermVocabulary {
    let docs: Vec<_> = corpus.documents().collect();
    let per_doc: Vec<BTreeSet<String>> = docs
        .par_iter()
        .map(|doc| doc_terms(&[doc.title.as_str(), doc.abstract_text.as_str()], stopwords))
        .collect();

    let mut postings: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (doc_index, terms) in per_doc.into_iter().enumerate() {
        for term in terms {
            postings.entry(term).or_default().push(doc_index as u32);
        }
    }

    let mut terms: Vec<VocabTerm> = postings
        .into_iter()
        .filter(|(_, docs)| docs.len() >= min_df.max(1))
        .map(|(text, postings)| VocabTerm { text, postings })
        .collect();
    sort_terms(&mut terms);
    let index = build_index(&terms);
    TermVocabulary {
        doc_ids: docs.into_iter().map(|doc| doc.doc_id.clone()).collect(),
        terms,
        index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn corpus_of(texts: &[&str]) -> Corpus {
        let mut corpus = Corpus::new();
        for (i, text) in texts.iter().enumerate() {
            corpus
                .insert_document(Document::new(format!("d{i}"), *text, ""))
                .unwrap();
        }
        corpus
    }

    fn term_set(vocab: &TermVocabulary) -> BTreeSet<String> {
        vocab.terms.iter().map(|t| t.text.clone()).collect()
    }

    #[test]
    fn unigrams_and_bigrams_from_a_sentence() {
        let corpus = corpus_of(&["the spike protein binds ace2"]);
        let stops: BTreeSet<String> = ["the".to_string()].into();
        let vocab = extract_terms(&corpus, &stops, 1);
        let terms = term_set(&vocab);
        for expected in [
            "spike",
            "protein",
            "binds",
            "ace2",
            "spike protein",
            "protein binds",
            "binds ace2",
        ] {
            assert!(terms.contains(expected), "missing {expected}");
        }
        assert!(!terms.contains("the"));
        assert!(!terms.contains("the spike"));
    }

    #[test]
    fn slash_splits_but_keeps_joined_unigram() {
        let corpus = corpus_of(&["treated with lopinavir/ritonavir daily"]);
        let stops = BTreeSet::new();
        let vocab = extract_terms(&corpus, &stops, 1);
        let terms = term_set(&vocab);
        assert!(terms.contains("lopinavir"));
        assert!(terms.contains("ritonavir"));
        assert!(terms.contains("lopinavir/ritonavir"));
        // Bigrams use the split tokens.
        assert!(terms.contains("lopinavir ritonavir"));
        assert!(!terms.contains("with lopinavir/ritonavir"));
    }

    #[test]
    fn min_df_drops_rare_terms() {
        let corpus = corpus_of(&["alpha beta", "alpha gamma"]);
        let vocab = extract_terms(&corpus, &BTreeSet::new(), 2);
        let terms = term_set(&vocab);
        assert!(terms.contains("alpha"));
        assert!(!terms.contains("beta"));
        assert!(!terms.contains("gamma"));
    }

    #[test]
    fn bigrams_do_not_cross_sentences() {
        let corpus = corpus_of(&["fever persists. cough follows"]);
        let vocab = extract_terms(&corpus, &BTreeSet::new(), 1);
        let terms = term_set(&vocab);
        assert!(terms.contains("fever persists"));
        assert!(terms.contains("cough follows"));
        assert!(!terms.contains("persists cough"));
    }

    #[test]
    fn hyphens_stay_inside_tokens() {
        let corpus = corpus_of(&["covid-19 spreads"]);
        let vocab = extract_terms(&corpus, &BTreeSet::new(), 1);
        assert!(term_set(&vocab).contains("covid-19"));
    }

    #[test]
    fn postings_are_document_sets() {
        let corpus = corpus_of(&["alpha alpha alpha", "alpha", "beta"]);
        let vocab = extract_terms(&corpus, &BTreeSet::new(), 1);
        let alpha = vocab.term(vocab.term_index("alpha").unwrap());
        assert_eq!(alpha.postings, vec![0, 1]);
        assert_eq!(vocab.n_docs(), 3);
    }

    #[test]
    fn visit_order_is_df_desc_then_text() {
        let corpus = corpus_of(&["b a", "b a", "b z"]);
        let vocab = extract_terms(&corpus, &BTreeSet::new(), 1);
        let texts: Vec<&str> = vocab.terms.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts[0], "b");
        // "a" (df 2) precedes "b a" (df 2)? No: both df 2, text order.
        let a_pos = texts.iter().position(|&t| t == "a").unwrap();
        let ba_pos = texts.iter().position(|&t| t == "b a").unwrap();
        assert!(a_pos < ba_pos);
        let z_pos = texts.iter().position(|&t| t == "z").unwrap();
        assert!(ba_pos < z_pos);
    }

    #[test]
    fn stopword_loader_skips_comments() {
        let stops = load_stopwords("# header\nthe\n\nof\n");
        assert_eq!(stops.len(), 2);
        assert!(stops.contains("the"));
        assert!(stops.contains("of"));
    }
}
