//! Synonym-merged entity mention counts, rankings, and weekly trends.
//!
//! Annotations sharing a concept type and concept id are one entity no
//! matter how the text spells them, so "remdesivir" and "GS-5734" fold
//! into a single count. Annotations without a concept id fall back to
//! their lowercase, whitespace-collapsed mention text; dropping them
//! would silently bias the counts.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::stats::week_index;
use crate::WeekIndex;

/// Identity and display name of one entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EntityKey {
    pub concept_type: String,
    /// Concept id when the annotation carries one, otherwise the
    /// normalized mention text.
    pub key: String,
    /// Shortest surface mention observed for the key, ties broken
    /// lexicographically.
    pub display_name: String,
}

/// Counts for one entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityCount {
    pub key: EntityKey,
    /// Documents mentioning the entity at least once.
    pub article_count: usize,
    /// Total annotated spans.
    pub mention_count: usize,
    pub doc_ids: BTreeSet<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntityError {
    #[error("no annotation with type `{concept_type}` and key `{key}`")]
    UnknownKey { concept_type: String, key: String },
}

/// Fallback key for annotations without a concept id: lowercase with
/// whitespace runs collapsed to single spaces.
pub fn normalize_mention(mention: &str) -> String {
    mention
        .split_whitespace()
        .map(|token| token.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

fn shorter_name(current: &str, candidate: &str) -> bool {
    let current_len = current.chars().count();
    let candidate_len = candidate.chars().count();
    candidate_len < current_len || (candidate_len == current_len && candidate < current)
}

/// Article and mention counts per entity, optionally restricted to a set
/// of concept types. Output is sorted by article count descending, then
/// display name, type, and key ascending.
pub fn mention_counts(corpus: &Corpus, type_filter: Option<&BTreeSet<String>>) -> Vec<EntityCount> {
    struct Accum {
        display_name: String,
        mention_count: usize,
        doc_ids: BTreeSet<String>,
    }

    let mut accum: BTreeMap<(String, String), Accum> = BTreeMap::new();
    for ann in corpus.annotations() {
        if let Some(filter) = type_filter {
            if !filter.contains(&ann.concept_type) {
                continue;
            }
        }
        let key = match &ann.concept_id {
            Some(id) => id.clone(),
            None => normalize_mention(&ann.mention),
        };
        let entry = accum
            .entry((ann.concept_type.clone(), key))
            .or_insert_with(|| Accum {
                display_name: ann.mention.clone(),
                mention_count: 0,
                doc_ids: BTreeSet::new(),
            });
        if shorter_name(&entry.display_name, &ann.mention) {
            entry.display_name = ann.mention.clone();
        }
        entry.mention_count += 1;
        entry.doc_ids.insert(ann.doc_id.clone());
    }

    let mut counts: Vec<EntityCount> = accum
        .into_iter()
        .map(|((concept_type, key), accum)| EntityCount {
            key: EntityKey {
                concept_type,
                key,
                display_name: accum.display_name,
            },
            article_count: accum.doc_ids.len(),
            mention_count: accum.mention_count,
            doc_ids: accum.doc_ids,
        })
        .collect();
    sort_counts(&mut counts);
    counts
}

fn sort_counts(counts: &mut [EntityCount]) {
    counts.sort_by(|a, b| {
        b.article_count
            .cmp(&a.article_count)
            .then_with(|| a.key.display_name.cmp(&b.key.display_name))
            .then_with(|| a.key.concept_type.cmp(&b.key.concept_type))
            .then_with(|| a.key.key.cmp(&b.key.key))
    });
}

/// First `k` entities by article count descending, display name
/// ascending. Independent of input order.
pub fn top_k(counts: &[EntityCount], k: usize) -> Vec<EntityCount> {
    let mut sorted = counts.to_vec();
    sort_counts(&mut sorted);
    sorted.truncate(k);
    sorted
}

/// Per-week article counts for one entity. Weeks with no mentions are
/// omitted; documents without a date are excluded.
pub fn weekly_trend(
    corpus: &Corpus,
    concept_type: &str,
    key: &str,
    anchor: NaiveDate,
) -> Result<Vec<(WeekIndex, usize)>, EntityError> {
    let mut seen = false;
    let mut docs: BTreeSet<&str> = BTreeSet::new();
    for ann in corpus.annotations() {
        if ann.concept_type != concept_type {
            continue;
        }
        let matches = match &ann.concept_id {
            Some(id) => id == key,
            None => normalize_mention(&ann.mention) == key,
        };
        if matches {
            seen = true;
            docs.insert(&ann.doc_id);
        }
    }
    if !seen {
        return Err(EntityError::UnknownKey {
            concept_type: concept_type.to_string(),
            key: key.to_string(),
        });
    }

    let mut bins: BTreeMap<WeekIndex, usize> = BTreeMap::new();
    for doc_id in docs {
        if let Some(date) = corpus.get(doc_id).and_then(|doc| doc.pub_date) {
            *bins.entry(week_index(date, anchor)).or_default() += 1;
        }
    }
    Ok(bins.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, EntityAnnotation};

    fn ann(
        doc_id: &str,
        mention: &str,
        concept_type: &str,
        concept_id: Option<&str>,
    ) -> EntityAnnotation {
        EntityAnnotation {
            doc_id: doc_id.to_string(),
            start: 0,
            end: mention.chars().count().max(1),
            mention: mention.to_string(),
            concept_type: concept_type.to_string(),
            concept_id: concept_id.map(String::from),
        }
    }

    fn push(corpus: &mut Corpus, annotation: EntityAnnotation) {
        if !corpus.contains(&annotation.doc_id) {
            corpus
                .insert_document(Document::new(annotation.doc_id.clone(), "t", "a"))
                .unwrap();
        }
        corpus.push_annotation(annotation).unwrap();
    }

    #[test]
    fn synonyms_merge_by_concept_id() {
        let mut corpus = Corpus::new();
        push(&mut corpus, ann("d1", "remdesivir", "Chemical", Some("X")));
        push(&mut corpus, ann("d1", "remdesivir", "Chemical", Some("X")));
        push(&mut corpus, ann("d1", "GS-5734", "Chemical", Some("X")));
        push(&mut corpus, ann("d2", "remdesivir", "Chemical", Some("X")));
        let counts = mention_counts(&corpus, None);
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[0].article_count, 2);
        assert_eq!(counts[0].mention_count, 4);
        // "GS-5734" (7 chars) beats "remdesivir" (10 chars).
        assert_eq!(counts[0].key.display_name, "GS-5734");
    }

    #[test]
    fn missing_concept_id_falls_back_to_normalized_mention() {
        let mut corpus = Corpus::new();
        push(&mut corpus, ann("d1", "Spike  Protein", "Gene", None));
        push(&mut corpus, ann("d2", "spike protein", "Gene", None));
        let counts = mention_counts(&corpus, None);
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[0].key.key, "spike protein");
        assert_eq!(counts[0].article_count, 2);
    }

    #[test]
    fn no_annotations_no_counts() {
        assert!(mention_counts(&Corpus::new(), None).is_empty());
    }

    #[test]
    fn type_filter_restricts_output() {
        let mut corpus = Corpus::new();
        push(&mut corpus, ann("d1", "ACE2", "Gene", Some("59272")));
        push(&mut corpus, ann("d1", "fever", "Disease", Some("D005334")));
        let filter: BTreeSet<String> = ["Gene".to_string()].into();
        let counts = mention_counts(&corpus, Some(&filter));
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[0].key.concept_type, "Gene");
    }

    #[test]
    fn top_k_uses_lexicographic_tie_break() {
        let mut corpus = Corpus::new();
        for doc in ["d1", "d2", "d3", "d4", "d5"] {
            push(&mut corpus, ann(doc, "A", "Gene", Some("a")));
            push(&mut corpus, ann(doc, "B", "Gene", Some("b")));
        }
        push(&mut corpus, ann("d1", "C", "Gene", Some("c")));
        let counts = mention_counts(&corpus, None);
        let top = top_k(&counts, 2);
        assert_eq!(top.len(), 2);
        assert_eq!(top[0].key.display_name, "A");
        assert_eq!(top[1].key.display_name, "B");

        // k beyond the list returns everything.
        assert_eq!(top_k(&counts, 10).len(), 3);
    }

    #[test]
    fn weekly_trend_counts_articles_per_week() {
        let mut corpus = Corpus::new();
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        for (doc, date) in [
            ("d1", "2020-02-02"),
            ("d2", "2020-02-03"),
            ("d3", "2020-02-16"),
        ] {
            push(&mut corpus, ann(doc, "HCQ", "Chemical", Some("D006886")));
            corpus.get_mut(doc).unwrap().pub_date =
                NaiveDate::parse_from_str(date, "%Y-%m-%d").ok();
        }
        let trend = weekly_trend(&corpus, "Chemical", "D006886", anchor).unwrap();
        assert_eq!(trend, vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let mut corpus = Corpus::new();
        push(&mut corpus, ann("d1", "ACE2", "Gene", Some("59272")));
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        assert!(matches!(
            weekly_trend(&corpus, "Gene", "nope", anchor),
            Err(EntityError::UnknownKey { .. })
        ));
    }

    #[test]
    fn undated_docs_make_empty_trend() {
        let mut corpus = Corpus::new();
        push(&mut corpus, ann("d1", "ACE2", "Gene", Some("59272")));
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        let trend = weekly_trend(&corpus, "Gene", "59272", anchor).unwrap();
        assert!(trend.is_empty());
    }
}
