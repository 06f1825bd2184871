//! Corpus analytics for annotated literature collections.
//!
//! `litscan` ingests a document collection with pre-computed entity
//! annotations and produces a top-down summary of it:
//!
//! - publication growth curves and category statistics,
//! - synonym-merged entity mention counts and weekly trends,
//! - dictionary tagging of symptoms, organs, and findings, with
//!   tree-branch grouping and passage-level co-mention matrices,
//! - two-corpus frequency comparison with Wilson score intervals,
//! - unsupervised topic discovery over words and two-word phrases, with
//!   document clusters, rule-based titles, onsets, and category
//!   association.
//!
//! Everything is deterministic: no stage uses randomness, parallel runs
//! merge into the same bytes as sequential ones, and reports render with
//! fixed formatting.

pub mod canonical;
pub mod compare;
pub mod corpus;
pub mod entity;
pub mod lexicon;
pub mod num;
pub mod pdc;
pub mod pubtator;
pub mod report;
pub mod sidecar;
pub mod stats;
pub mod tagger;
pub mod terms;
pub mod topics;

pub use compare::{compare_corpora, interval_verdict, wilson_interval, ComparisonRow, Verdict};
pub use corpus::{CategoryLabel, Corpus, Document, EntityAnnotation, PassageKind};
pub use entity::{mention_counts, top_k, weekly_trend, EntityCount, EntityKey};
pub use lexicon::Lexicon;
pub use pdc::{pdc_cluster, PassStats, PdcOutcome};
pub use pubtator::{parse_pubtator, parse_pubtator_str, ParseMode, ParseOutcome};
pub use stats::{category_stats, weekly_histogram, CategoryStats, WeeklyHistogram};
pub use tagger::{
    comention_matrix, group_by_tree, heading_article_counts, heading_doc_sets, tag_corpus,
    tag_text, ComentionMatrix, HeadingCount, Match, Matcher,
};
pub use terms::{extract_terms, load_stopwords, TermVocabulary};
pub use topics::{
    associate_category, category_heatmap, make_title, score_documents, topic_onset,
    CategoryHeatmap, ThresholdMode, Topic, TopicPartition,
};

/// Scalar type the pipeline instantiates the numeric kernels at.
pub type Score = f64;

/// Week offset relative to an anchor date; negative weeks lie before it.
pub type WeekIndex = i64;

/// The built-in English stopword list (data file, version 1).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// The default `z` for 95% confidence intervals.
pub const DEFAULT_Z: Score = 1.959964;
