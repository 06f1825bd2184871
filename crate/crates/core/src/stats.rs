//! Temporal and category statistics over a corpus.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::corpus::{CategoryLabel, Corpus};
use crate::WeekIndex;

/// Week offset of `date` relative to `anchor`: floor of the day
/// difference divided by seven. Dates before the anchor get negative
/// indices.
pub fn week_index(date: NaiveDate, anchor: NaiveDate) -> WeekIndex {
    (date - anchor).num_days().div_euclid(7)
}

/// Publication counts per week.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeeklyHistogram {
    /// `(week_index, count)` pairs sorted by week index; weeks with no
    /// publications are omitted.
    pub bins: Vec<(WeekIndex, usize)>,
    /// Documents without a publication date.
    pub undated: usize,
}

impl WeeklyHistogram {
    pub fn dated_total(&self) -> usize {
        self.bins.iter().map(|(_, count)| count).sum()
    }
}

/// Bin documents into weeks relative to `anchor`.
pub fn weekly_histogram(corpus: &Corpus, anchor: NaiveDate) -> WeeklyHistogram {
    let mut bins: BTreeMap<WeekIndex, usize> = BTreeMap::new();
    let mut undated = 0usize;
    for doc in corpus.documents() {
        match doc.pub_date {
            Some(date) => *bins.entry(week_index(date, anchor)).or_default() += 1,
            None => undated += 1,
        }
    }
    WeeklyHistogram {
        bins: bins.into_iter().collect(),
        undated,
    }
}

/// Per-label counts, multi-label bucket counts, and label-pair
/// co-occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryStats {
    /// Documents carrying each label. Every admissible label is present,
    /// possibly with a zero count.
    pub per_label: BTreeMap<CategoryLabel, usize>,
    /// Documents by label-set size: `[none, one, two, three or more]`.
    pub buckets: [usize; 4],
    /// Documents carrying both labels of each unordered pair, keyed with
    /// the smaller label first.
    pub pair_counts: BTreeMap<(CategoryLabel, CategoryLabel), usize>,
}

pub fn category_stats(corpus: &Corpus) -> CategoryStats {
    let mut stats = CategoryStats::default();
    for label in CategoryLabel::ALL {
        stats.per_label.insert(label, 0);
    }
    for doc in corpus.documents() {
        let labels: Vec<CategoryLabel> = doc.categories.iter().copied().collect();
        let bucket = labels.len().min(3);
        stats.buckets[bucket] += 1;
        for &label in &labels {
            *stats.per_label.get_mut(&label).expect("all labels present") += 1;
        }
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                // BTreeSet iteration is ascending, so a < b already.
                *stats.pair_counts.entry((a, b)).or_default() += 1;
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn dated_doc(id: &str, date: &str) -> Document {
        let mut doc = Document::new(id, format!("title {id}"), "");
        doc.pub_date = NaiveDate::parse_from_str(date, "%Y-%m-%d").ok();
        doc
    }

    fn labeled_doc(id: &str, labels: &[CategoryLabel]) -> Document {
        let mut doc = Document::new(id, format!("title {id}"), "");
        doc.categories = labels.iter().copied().collect();
        doc
    }

    #[test]
    fn bins_by_floor_week() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(dated_doc("1", "2020-02-01"))
            .unwrap();
        corpus
            .insert_document(dated_doc("2", "2020-02-03"))
            .unwrap();
        corpus
            .insert_document(dated_doc("3", "2020-02-08"))
            .unwrap();
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        let hist = weekly_histogram(&corpus, anchor);
        assert_eq!(hist.bins, vec![(0, 2), (1, 1)]);
        assert_eq!(hist.undated, 0);
        assert_eq!(hist.dated_total(), 3);
    }

    #[test]
    fn undated_docs_counted_separately() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(Document::new("1", "t", "a"))
            .unwrap();
        corpus
            .insert_document(Document::new("2", "t", "a"))
            .unwrap();
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        let hist = weekly_histogram(&corpus, anchor);
        assert!(hist.bins.is_empty());
        assert_eq!(hist.undated, 2);
    }

    #[test]
    fn dates_before_anchor_get_negative_weeks() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(dated_doc("1", "2020-01-31"))
            .unwrap();
        corpus
            .insert_document(dated_doc("2", "2020-01-25"))
            .unwrap();
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        let hist = weekly_histogram(&corpus, anchor);
        assert_eq!(hist.bins, vec![(-1, 2)]);
    }

    #[test]
    fn category_counting_matches_definitions() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(labeled_doc("1", &[CategoryLabel::Treatment]))
            .unwrap();
        corpus
            .insert_document(labeled_doc(
                "2",
                &[CategoryLabel::Treatment, CategoryLabel::Mechanism],
            ))
            .unwrap();
        let stats = category_stats(&corpus);
        assert_eq!(stats.per_label[&CategoryLabel::Treatment], 2);
        assert_eq!(stats.per_label[&CategoryLabel::Mechanism], 1);
        assert_eq!(stats.per_label[&CategoryLabel::Prevention], 0);
        assert_eq!(stats.buckets, [0, 1, 1, 0]);
        assert_eq!(
            stats.pair_counts[&(CategoryLabel::Treatment, CategoryLabel::Mechanism)],
            1
        );
    }

    #[test]
    fn empty_corpus_is_all_zeros() {
        let stats = category_stats(&Corpus::new());
        assert!(stats.per_label.values().all(|&count| count == 0));
        assert_eq!(stats.buckets, [0; 4]);
        assert!(stats.pair_counts.is_empty());
    }

    #[test]
    fn label_sum_at_least_labeled_docs() {
        let mut corpus = Corpus::new();
        corpus
            .insert_document(labeled_doc("1", &[CategoryLabel::Prevention]))
            .unwrap();
        corpus
            .insert_document(labeled_doc(
                "2",
                &[
                    CategoryLabel::Diagnosis,
                    CategoryLabel::Treatment,
                    CategoryLabel::Mechanism,
                ],
            ))
            .unwrap();
        corpus.insert_document(labeled_doc("3", &[])).unwrap();
        let stats = category_stats(&corpus);
        let label_sum: usize = stats.per_label.values().sum();
        let labeled_docs = stats.buckets[1] + stats.buckets[2] + stats.buckets[3];
        assert!(label_sum >= labeled_docs);
        assert_eq!(label_sum, 4);
        assert_eq!(labeled_docs, 2);
    }
}
