//! Property tests for the structural invariants.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use proptest::prelude::*;

use litscan::canonical::{from_canonical, to_canonical};
use litscan::corpus::{Corpus, Document, EntityAnnotation, PassageKind};
use litscan::lexicon::{normalize_phrase, Lexicon};
use litscan::pdc::pdc_cluster;
use litscan::pubtator::{parse_pubtator_str, ParseMode};
use litscan::stats::weekly_histogram;
use litscan::tagger::{comention_matrix, tag_text};
use litscan::terms::TermVocabulary;
use litscan::{mention_counts, wilson_interval};

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn text_of(max_words: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..=max_words).prop_map(|words| words.join(" "))
}

prop_compose! {
    fn gen_document(id: usize)(
        title in text_of(6),
        abstract_text in text_of(12),
        date_offset in prop::option::of(0i64..200),
        spans in prop::collection::vec((0usize..40, 1usize..6), 0..5),
    ) -> (Document, Vec<EntityAnnotation>) {
        let doc_id = format!("d{id}");
        let mut doc = Document::new(doc_id.clone(), title, abstract_text);
        doc.pub_date = date_offset
            .map(|days| NaiveDate::from_ymd_opt(2020, 2, 1).unwrap() + chrono::Days::new(days as u64));
        let joined: Vec<char> = doc.annotation_text(' ').chars().collect();
        let types = ["Gene", "Disease", "Chemical"];
        let mut anns = Vec::new();
        for (i, (start, len)) in spans.into_iter().enumerate() {
            let start = start % joined.len();
            let end = (start + len).min(joined.len());
            if end <= start {
                continue;
            }
            let mention: String = joined[start..end].iter().collect();
            anns.push(EntityAnnotation {
                doc_id: doc_id.clone(),
                start,
                end,
                mention,
                concept_type: types[i % types.len()].to_string(),
                concept_id: if i % 2 == 0 { Some(format!("ID:{}", i % 3)) } else { None },
            });
        }
        (doc, anns)
    }
}

fn gen_corpus(max_docs: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(any::<u8>(), 1..=max_docs).prop_flat_map(|seeds| {
        let docs: Vec<_> = seeds
            .iter()
            .enumerate()
            .map(|(i, _)| gen_document(i))
            .collect();
        docs.prop_map(|docs| {
            let mut corpus = Corpus::new();
            for (doc, anns) in docs {
                corpus.insert_document(doc).unwrap();
                for ann in anns {
                    corpus.push_annotation(ann).unwrap();
                }
            }
            corpus
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_round_trip_is_identity(corpus in gen_corpus(6)) {
        let serialized = to_canonical(&corpus);
        let reparsed = from_canonical(&serialized).unwrap();
        prop_assert_eq!(&corpus, &reparsed);
        prop_assert_eq!(serialized, to_canonical(&reparsed));
    }

    #[test]
    fn pubtator_mentions_match_offsets(corpus in gen_corpus(4)) {
        // Render the corpus as a PubTator stream and parse it back:
        // every annotation must reproduce its offset substring.
        let mut text = String::new();
        for doc in corpus.documents() {
            text.push_str(&format!("{}|t|{}\n", doc.doc_id, doc.title));
            text.push_str(&format!("{}|a|{}\n", doc.doc_id, doc.abstract_text));
            for ann in corpus.annotations_for(&doc.doc_id) {
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    ann.doc_id,
                    ann.start,
                    ann.end,
                    ann.mention,
                    ann.concept_type,
                    ann.concept_id.clone().unwrap_or_default()
                ));
            }
            text.push('\n');
        }
        let out = parse_pubtator_str(&text, ParseMode::Strict).unwrap();
        prop_assert_eq!(out.corpus.len(), corpus.len());
        for doc in out.corpus.documents() {
            let joined: Vec<char> = doc.annotation_text(' ').chars().collect();
            for ann in out.corpus.annotations_for(&doc.doc_id) {
                let span: String = joined[ann.start..ann.end].iter().collect();
                prop_assert_eq!(&span, &ann.mention);
            }
        }
    }

    #[test]
    fn histogram_sums_and_ignores_input_order(corpus in gen_corpus(8)) {
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        let hist = weekly_histogram(&corpus, anchor);
        let dated = corpus.documents().filter(|d| d.pub_date.is_some()).count();
        prop_assert_eq!(hist.dated_total(), dated);
        prop_assert_eq!(hist.undated, corpus.len() - dated);
        prop_assert!(hist.bins.windows(2).all(|w| w[0].0 < w[1].0));

        // Re-inserting documents in reverse order changes nothing.
        let mut reversed = Corpus::new();
        let docs: Vec<_> = corpus.documents().cloned().collect();
        for doc in docs.into_iter().rev() {
            reversed.insert_document(doc).unwrap();
        }
        prop_assert_eq!(weekly_histogram(&reversed, anchor), hist);
    }

    #[test]
    fn mention_counts_ignore_annotation_order(corpus in gen_corpus(6)) {
        let counts = mention_counts(&corpus, None);
        for count in &counts {
            prop_assert_eq!(count.article_count, count.doc_ids.len());
            prop_assert!(count.mention_count >= count.article_count);
            prop_assert!(count.article_count <= corpus.len());
        }
        let sorted = counts.windows(2).all(|w| {
            w[0].article_count > w[1].article_count
                || (w[0].article_count == w[1].article_count
                    && w[0].key.display_name <= w[1].key.display_name)
        });
        prop_assert!(sorted);

        // Same annotations, pushed in reverse order.
        let mut reversed = Corpus::new();
        for doc in corpus.documents() {
            let mut bare = doc.clone();
            bare.passages.clear();
            bare.passages = doc.passages.clone();
            reversed.insert_document(bare).unwrap();
        }
        let mut anns: Vec<_> = corpus.annotations().cloned().collect();
        anns.reverse();
        for ann in anns {
            reversed.push_annotation(ann).unwrap();
        }
        prop_assert_eq!(mention_counts(&reversed, None), counts.clone());

        // Weekly trend counts plus the key's undated documents add back
        // up to its article count.
        let anchor = NaiveDate::from_ymd_opt(2020, 2, 1).unwrap();
        for count in &counts {
            let trend = litscan::weekly_trend(
                &corpus,
                &count.key.concept_type,
                &count.key.key,
                anchor,
            )
            .unwrap();
            let dated: usize = trend.iter().map(|(_, n)| n).sum();
            let undated = count
                .doc_ids
                .iter()
                .filter(|doc_id| corpus.get(doc_id).unwrap().pub_date.is_none())
                .count();
            prop_assert_eq!(dated + undated, count.article_count);
        }
    }

    #[test]
    fn wilson_bounds_are_ordered_and_contain_the_ratio(
        k in 0u64..200,
        extra in 1u64..200,
        z in 0.5f64..4.0,
    ) {
        let n = k + extra;
        let (lo, hi) = wilson_interval(k, n, z).unwrap();
        let p = k as f64 / n as f64;
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p && p <= hi);

        let small = k.min(n - k);
        let (slo, shi) = wilson_interval(small, n, z).unwrap();
        let (mlo, mhi) = wilson_interval(n - small, n, z).unwrap();
        prop_assert_eq!(mlo, 1.0 - shi);
        prop_assert_eq!(mhi, 1.0 - slo);
    }

    #[test]
    fn matches_never_overlap_and_normalize_back(
        words in prop::collection::vec(prop_oneof![
            Just("fever".to_string()),
            Just("dry".to_string()),
            Just("cough".to_string()),
            Just("dry cough".to_string()),
            Just("severe".to_string()),
            Just("chest, ".to_string()),
            Just("(pain)".to_string()),
        ], 1..30),
    ) {
        let source = "heading_id\tpreferred_name\ttree_numbers\tentry_terms\n\
                      D1\tFever\tC23.1\tfever\n\
                      D2\tDry Cough\tC23.2\tdry cough\n\
                      D3\tChest Pain\tC23.3\tchest pain\n";
        let lexicon = Lexicon::compile(source, None).unwrap();
        let text = words.join(" ");
        let matches = tag_text(&lexicon, &text);
        let chars: Vec<char> = text.chars().collect();
        for pair in matches.windows(2) {
            prop_assert!(pair[0].end <= pair[1].start, "overlap in {text}");
        }
        for hit in &matches {
            let span: String = chars[hit.start..hit.end].iter().collect();
            prop_assert_eq!(normalize_phrase(&span), hit.matched_term.clone());
        }
    }

    #[test]
    fn comention_matrix_is_symmetric_and_bounded(corpus in gen_corpus(6)) {
        let source = "heading_id\tpreferred_name\ttree_numbers\tentry_terms\n\
                      D1\tAlpha\t\ta|aa|ab\n\
                      D2\tBeta\t\tb|ba|bb\n\
                      D3\tGamma\t\tc|ca|cb\n";
        let lexicon = Lexicon::compile(source, None).unwrap();
        let kinds: BTreeSet<PassageKind> = [PassageKind::Title, PassageKind::Abstract].into();
        let matrix = comention_matrix(&corpus, &lexicon, &kinds);
        let n = matrix.headings.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(matrix.cells[i][j], matrix.cells[j][i]);
                if i != j {
                    prop_assert!(matrix.cells[i][j] <= matrix.cells[i][i].min(matrix.cells[j][j]));
                }
            }
        }
    }

    #[test]
    fn pdc_always_returns_a_partition(
        postings in prop::collection::vec(
            prop::collection::btree_set(0u32..8, 1..=6),
            1..12,
        ),
    ) {
        let vocab = TermVocabulary::from_postings(
            (0..8).map(|i| format!("d{i}")).collect(),
            postings
                .iter()
                .enumerate()
                .map(|(i, docs)| (format!("t{i:02}"), docs.iter().copied().collect()))
                .collect(),
        );
        let n_terms = vocab.len();
        let outcome = pdc_cluster(vocab, 10).unwrap();
        prop_assert!(outcome.partition.check_partition());
        prop_assert!(outcome.passes.len() <= 10);
        let total: usize = outcome.partition.topics.iter().map(|t| t.terms.len()).sum();
        prop_assert_eq!(total, n_terms);

        // Total affinity never decreases across passes, on any corpus.
        let mut last = f64::NEG_INFINITY;
        for stats in &outcome.passes {
            prop_assert!(stats.total_affinity >= last, "pass {} decreased", stats.pass);
            last = stats.total_affinity;
        }

        // Deterministic: the same vocabulary clusters identically.
        let vocab2 = TermVocabulary::from_postings(
            (0..8).map(|i| format!("d{i}")).collect(),
            postings
                .iter()
                .enumerate()
                .map(|(i, docs)| (format!("t{i:02}"), docs.iter().copied().collect()))
                .collect(),
        );
        let outcome2 = pdc_cluster(vocab2, 10).unwrap();
        prop_assert_eq!(&outcome.partition.topics, &outcome2.partition.topics);
    }
}
