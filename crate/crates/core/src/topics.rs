//! Topics over the vocabulary partition: document scoring and
//! assignment, titles, onsets, category association, and the category
//! heatmap.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::{CategoryLabel, Corpus};
use crate::stats::week_index;
use crate::terms::TermVocabulary;
use crate::{Score, WeekIndex};

/// Topics with at least this many terms count as significant; smaller
/// ones are specific.
pub const SIGNIFICANT_TERM_COUNT: usize = 10;

/// One topic: a set of weighted terms plus the documents retrieved for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub id: usize,
    /// `(term index, weight)` sorted by term index.
    pub terms: Vec<(u32, Score)>,
    pub title: String,
    /// Nonzero scores per document index.
    pub doc_scores: BTreeMap<u32, Score>,
    /// Documents assigned to this topic (their argmax topic, at or above
    /// the assignment threshold).
    pub assigned_docs: BTreeSet<u32>,
    /// The assignment threshold this topic used, once scoring ran.
    pub threshold: Option<Score>,
    pub onset_week: Option<WeekIndex>,
    pub category: Option<CategoryLabel>,
}

impl Topic {
    pub fn new(id: usize, terms: Vec<(u32, Score)>) -> Topic {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        Topic {
            id,
            terms,
            title: String::new(),
            doc_scores: BTreeMap::new(),
            assigned_docs: BTreeSet::new(),
            threshold: None,
            onset_week: None,
            category: None,
        }
    }

    pub fn is_significant(&self) -> bool {
        self.terms.len() >= SIGNIFICANT_TERM_COUNT
    }

    /// Assigned documents ordered by score descending, then document id
    /// ascending (indices are in id order already).
    fn ranked_assigned(&self) -> Vec<(u32, Score)> {
        let mut ranked: Vec<(u32, Score)> = self
            .assigned_docs
            .iter()
            .map(|doc| (*doc, self.doc_scores.get(doc).copied().unwrap_or(0.0)))
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite scores")
                .then(a.0.cmp(&b.0))
        });
        ranked
    }
}

/// Disjoint topics covering the whole vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicPartition {
    pub topics: Vec<Topic>,
    pub vocabulary: TermVocabulary,
}

impl TopicPartition {
    pub fn new(topics: Vec<Topic>, vocabulary: TermVocabulary) -> TopicPartition {
        TopicPartition { topics, vocabulary }
    }

    /// True when the topics' term sets are pairwise disjoint and their
    /// union equals the vocabulary.
    pub fn check_partition(&self) -> bool {
        let mut seen = vec![false; self.vocabulary.len()];
        for topic in &self.topics {
            for (term, _) in &topic.terms {
                let slot = &mut seen[*term as usize];
                if *slot {
                    return false;
                }
                *slot = true;
            }
        }
        seen.into_iter().all(|covered| covered)
    }

    pub fn significant_topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.iter().filter(|t| t.is_significant())
    }

    pub fn specific_topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.iter().filter(|t| !t.is_significant())
    }
}

/// How the assignment threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    /// Per topic: the given quantile (nearest rank) of its nonzero
    /// document scores.
    Percentile(f64),
    /// One fixed threshold for every topic.
    Absolute(Score),
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::Percentile(0.9)
    }
}

fn nearest_rank(sorted_ascending: &[Score], quantile: f64) -> Score {
    debug_assert!(!sorted_ascending.is_empty());
    let n = sorted_ascending.len();
    let rank = ((quantile * n as f64).ceil() as usize).clamp(1, n);
    sorted_ascending[rank - 1]
}

/// Score every document against every topic and fill in assignments.
///
/// A document's score for a topic is the sum of the weights of the
/// topic's terms it contains. The document is assigned to its best
/// scoring topic (ties broken by lowest topic id) when that score meets
/// the topic's threshold. All nonzero scores are retained for reporting.
pub fn score_documents(partition: &mut TopicPartition, mode: ThresholdMode) {
    let n_docs = partition.vocabulary.n_docs();
    let n_topics = partition.topics.len();

    // term index -> (topic position, weight)
    let mut term_topic: BTreeMap<u32, (usize, Score)> = BTreeMap::new();
    for (pos, topic) in partition.topics.iter().enumerate() {
        for (term, weight) in &topic.terms {
            term_topic.insert(*term, (pos, *weight));
        }
    }

    // doc index -> term indices, ascending; summation order is fixed so
    // results do not depend on scheduling.
    let mut doc_terms: Vec<Vec<u32>> = vec![Vec::new(); n_docs];
    for (term_index, term) in partition.vocabulary.terms.iter().enumerate() {
        for doc in &term.postings {
            doc_terms[*doc as usize].push(term_index as u32);
        }
    }

    let mut scores: Vec<BTreeMap<u32, Score>> = vec![BTreeMap::new(); n_topics];
    let mut doc_nonzero: Vec<Vec<(usize, Score)>> = vec![Vec::new(); n_docs];
    for (doc, terms) in doc_terms.iter().enumerate() {
        let mut sums: BTreeMap<usize, Score> = BTreeMap::new();
        for term in terms {
            // Vocabulary terms outside every topic contribute nothing.
            let Some(&(topic, weight)) = term_topic.get(term) else {
                continue;
            };
            *sums.entry(topic).or_insert(0.0) += weight;
        }
        for (topic, score) in sums {
            if score != 0.0 {
                scores[topic].insert(doc as u32, score);
                doc_nonzero[doc].push((topic, score));
            }
        }
    }

    // Per-topic thresholds.
    let thresholds: Vec<Score> = scores
        .iter()
        .map(|topic_scores| match mode {
            ThresholdMode::Absolute(value) => value,
            ThresholdMode::Percentile(quantile) => {
                let mut values: Vec<Score> = topic_scores.values().copied().collect();
                if values.is_empty() {
                    Score::INFINITY
                } else {
                    values.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
                    nearest_rank(&values, quantile)
                }
            }
        })
        .collect();

    // Assignment: the argmax topic when it clears that topic's threshold.
    let mut assigned: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n_topics];
    for (doc, entries) in doc_nonzero.iter().enumerate() {
        let mut best: Option<(usize, Score)> = None;
        for &(topic, score) in entries {
            let better = match best {
                None => true,
                Some((best_topic, best_score)) => {
                    score > best_score || (score == best_score && topic < best_topic)
                }
            };
            if better {
                best = Some((topic, score));
            }
        }
        if let Some((topic, score)) = best {
            if score >= thresholds[topic] {
                assigned[topic].insert(doc as u32);
            }
        }
    }

    for (pos, topic) in partition.topics.iter_mut().enumerate() {
        topic.doc_scores = std::mem::take(&mut scores[pos]);
        topic.assigned_docs = std::mem::take(&mut assigned[pos]);
        topic.threshold = Some(thresholds[pos]);
    }
}

fn title_case(term: &str) -> String {
    term.split(' ')
        .map(|word| {
            let mut chars = word.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect::<String>(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Build a topic title from its top-weighted terms.
///
/// Terms are taken by weight descending (text ascending on ties). A
/// two-word phrase is preferred over its constituent unigrams: a unigram
/// that appears inside any phrase of the topic is skipped so the phrase
/// can carry it. Words already in the title are not repeated. Selection
/// stops once `max_words` words are used.
pub fn make_title(topic: &Topic, vocabulary: &TermVocabulary, max_words: usize) -> String {
    assert!(max_words >= 1, "max_words must be positive");
    let mut ranked: Vec<(&str, Score)> = topic
        .terms
        .iter()
        .map(|(term, weight)| (vocabulary.term(*term).text.as_str(), *weight))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite weights")
            .then_with(|| a.0.cmp(b.0))
    });

    let phrase_words: BTreeSet<&str> = ranked
        .iter()
        .filter(|(text, _)| text.contains(' '))
        .flat_map(|(text, _)| text.split(' '))
        .collect();

    let mut chosen: Vec<&str> = Vec::new();
    let mut used_words: BTreeSet<&str> = BTreeSet::new();
    let mut used = 0usize;
    for (text, _) in &ranked {
        let words: Vec<&str> = text.split(' ').collect();
        if words.len() == 1 && phrase_words.contains(words[0]) {
            continue;
        }
        if used + words.len() > max_words {
            continue;
        }
        if words.iter().any(|word| used_words.contains(word)) {
            continue;
        }
        chosen.push(text);
        used += words.len();
        used_words.extend(words);
        if used == max_words {
            break;
        }
    }

    if chosen.is_empty() {
        // Nothing fit (e.g. every unigram hides inside an oversized
        // phrase); fall back to the top term truncated to the budget.
        if let Some((text, _)) = ranked.first() {
            let words: Vec<&str> = text.split(' ').take(max_words).collect();
            return title_case(&words.join(" "));
        }
        return String::new();
    }
    title_case(&chosen.join(" "))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopicError {
    #[error("topic {0} has no dated documents among its most relevant")]
    NoDatedDocuments(usize),
}

/// Onset week of a topic: among its `top_k` best scoring assigned
/// documents, the week of the earliest publication date.
pub fn topic_onset(
    topic: &Topic,
    vocabulary: &TermVocabulary,
    corpus: &Corpus,
    top_k: usize,
    anchor: NaiveDate,
) -> Result<WeekIndex, TopicError> {
    let earliest = topic
        .ranked_assigned()
        .into_iter()
        .take(top_k.max(1))
        .filter_map(|(doc, _)| {
            corpus
                .get(&vocabulary.doc_ids[doc as usize])
                .and_then(|document| document.pub_date)
        })
        .min();
    match earliest {
        Some(date) => Ok(week_index(date, anchor)),
        None => Err(TopicError::NoDatedDocuments(topic.id)),
    }
}

/// Associate a topic with the most frequent category label among its
/// `top_k` best scoring assigned documents. Each document contributes
/// each of its labels once. Ties prefer the label whose carrying
/// documents score higher in total, then the alphabetically first name.
/// Returns `None` when none of those documents is labeled.
pub fn associate_category(
    topic: &Topic,
    vocabulary: &TermVocabulary,
    corpus: &Corpus,
    top_k: usize,
) -> Option<CategoryLabel> {
    let mut counts: BTreeMap<CategoryLabel, (usize, Score)> = BTreeMap::new();
    for (doc, score) in topic.ranked_assigned().into_iter().take(top_k.max(1)) {
        let Some(document) = corpus.get(&vocabulary.doc_ids[doc as usize]) else {
            continue;
        };
        for label in &document.categories {
            let entry = counts.entry(*label).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += score;
        }
    }
    counts
        .into_iter()
        .max_by(|(label_a, (count_a, sum_a)), (label_b, (count_b, sum_b))| {
            count_a
                .cmp(count_b)
                .then_with(|| sum_a.partial_cmp(sum_b).expect("finite scores"))
                .then_with(|| label_b.as_str().cmp(label_a.as_str()))
        })
        .map(|(label, _)| label)
}

/// Category-by-category heatmap over topics.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryHeatmap {
    /// Rows and columns follow [`CategoryLabel::ALL`].
    pub cells: [[Score; 8]; 8],
    /// Topics averaged into each row.
    pub topics_per_primary: [usize; 8],
}

/// For each topic with primary category P, the fraction of its assigned
/// labeled documents also carrying each category Q, averaged over the
/// topics with primary P. The diagonal is reported as 1 for rows backed
/// by at least one topic.
pub fn category_heatmap(partition: &TopicPartition, corpus: &Corpus) -> CategoryHeatmap {
    let label_pos = |label: CategoryLabel| {
        CategoryLabel::ALL
            .iter()
            .position(|&l| l == label)
            .expect("label in ALL")
    };

    let mut sums = [[0.0f64; 8]; 8];
    let mut topics_per_primary = [0usize; 8];

    for topic in &partition.topics {
        let Some(primary) = topic.category else {
            continue;
        };
        let mut labeled_docs = 0usize;
        let mut carrying = [0usize; 8];
        for doc in &topic.assigned_docs {
            let Some(document) = corpus.get(&partition.vocabulary.doc_ids[*doc as usize]) else {
                continue;
            };
            if document.categories.is_empty() {
                continue;
            }
            labeled_docs += 1;
            for label in &document.categories {
                carrying[label_pos(*label)] += 1;
            }
        }
        if labeled_docs == 0 {
            continue;
        }
        let row = label_pos(primary);
        topics_per_primary[row] += 1;
        for col in 0..8 {
            sums[row][col] += carrying[col] as f64 / labeled_docs as f64;
        }
    }

    let mut cells = [[0.0f64; 8]; 8];
    for row in 0..8 {
        if topics_per_primary[row] == 0 {
            continue;
        }
        for col in 0..8 {
            cells[row][col] = sums[row][col] / topics_per_primary[row] as f64;
        }
        cells[row][row] = 1.0;
    }
    CategoryHeatmap {
        cells,
        topics_per_primary,
    }
}
