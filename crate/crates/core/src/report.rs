//! Plot-ready TSV renderers for every report the pipeline emits.
//!
//! All numbers are formatted deterministically (fractions with six
//! decimals), so identical inputs render byte-identical files.

use std::collections::BTreeMap;

use crate::compare::ComparisonRow;
use crate::corpus::CategoryLabel;
use crate::entity::EntityCount;
use crate::stats::{CategoryStats, WeeklyHistogram};
use crate::tagger::{ComentionMatrix, HeadingCount, Match};
use crate::topics::{CategoryHeatmap, TopicPartition};
use crate::{Score, WeekIndex};

fn fmt_score(value: Score) -> String {
    format!("{value:.6}")
}

pub fn render_growth_curve(histogram: &WeeklyHistogram) -> String {
    let mut out = String::from("week\tcount\n");
    for (week, count) in &histogram.bins {
        out.push_str(&format!("{week}\t{count}\n"));
    }
    out
}

/// Combined category report: per-label counts, multi-label buckets, and
/// label-pair co-occurrence counts, one section per `kind`.
pub fn render_category_report(stats: &CategoryStats) -> String {
    let mut out = String::from("kind\tname\tcount\n");
    for (label, count) in &stats.per_label {
        out.push_str(&format!("label\t{label}\t{count}\n"));
    }
    for (bucket, name) in ["0", "1", "2", "3plus"].iter().enumerate() {
        out.push_str(&format!("bucket\t{name}\t{}\n", stats.buckets[bucket]));
    }
    let mut pairs: Vec<(&(CategoryLabel, CategoryLabel), &usize)> =
        stats.pair_counts.iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    for ((a, b), count) in pairs {
        out.push_str(&format!("pair\t{a}+{b}\t{count}\n"));
    }
    out
}

pub fn render_category_bars(stats: &CategoryStats) -> String {
    let mut out = String::from("label\tcount\n");
    for (label, count) in &stats.per_label {
        out.push_str(&format!("{label}\t{count}\n"));
    }
    out
}

/// Entity count rows. The `concept_id` column carries the merge key:
/// the concept id when one exists, the normalized mention otherwise.
/// `gene_map` adds an association column when provided.
pub fn render_entity_counts(
    counts: &[EntityCount],
    gene_map: Option<&BTreeMap<String, String>>,
) -> String {
    let mut out = String::from("type\tdisplay_name\tconcept_id\tarticle_count\tmention_count");
    if gene_map.is_some() {
        out.push_str("\tassociated_gene");
    }
    out.push('\n');
    for count in counts {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}",
            count.key.concept_type,
            count.key.display_name,
            count.key.key,
            count.article_count,
            count.mention_count
        ));
        if let Some(map) = gene_map {
            out.push('\t');
            out.push_str(map.get(&count.key.key).map(String::as_str).unwrap_or(""));
        }
        out.push('\n');
    }
    out
}

/// One weekly trend row: concept type, merge key, display name, week,
/// article count.
pub type EntityTrendRow = (String, String, String, WeekIndex, usize);

pub fn render_entity_trends(rows: &[EntityTrendRow]) -> String {
    let mut out = String::from("type\tconcept_id\tdisplay_name\tweek\tarticle_count\n");
    for (concept_type, key, display, week, count) in rows {
        out.push_str(&format!(
            "{concept_type}\t{key}\t{display}\t{week}\t{count}\n"
        ));
    }
    out
}

pub fn render_heading_counts(counts: &[HeadingCount]) -> String {
    let mut out = String::from("heading_id\tname\tarticle_count\n");
    for count in counts {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            count.heading_id, count.name, count.article_count
        ));
    }
    out
}

pub fn render_matches(matches: &[Match]) -> String {
    let mut out = String::from("doc_id\tpassage_index\tstart\tend\tmatched_term\theading_id\n");
    for hit in matches {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            hit.doc_id, hit.passage_index, hit.start, hit.end, hit.matched_term, hit.heading_id
        ));
    }
    out
}

pub fn render_tree_groups(groups: &BTreeMap<String, usize>) -> String {
    let mut rows: Vec<(&String, &usize)> = groups.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = String::from("tree_prefix\tarticle_count\n");
    for (prefix, count) in rows {
        out.push_str(&format!("{prefix}\t{count}\n"));
    }
    out
}

pub fn render_comention_matrix(matrix: &ComentionMatrix) -> String {
    let mut out = String::from("heading");
    for (_, name) in &matrix.headings {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (row, (_, name)) in matrix.headings.iter().enumerate() {
        out.push_str(name);
        for cell in &matrix.cells[row] {
            out.push_str(&format!("\t{cell}"));
        }
        out.push('\n');
    }
    out
}

pub fn render_comparison(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("heading\tk_a\tn_a\tlo_a\thi_a\tk_b\tn_b\tlo_b\thi_b\tverdict\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.name,
            row.k_a,
            row.n_a,
            fmt_score(row.ci_a.0),
            fmt_score(row.ci_a.1),
            row.k_b,
            row.n_b,
            fmt_score(row.ci_b.0),
            fmt_score(row.ci_b.1),
            row.verdict
        ));
    }
    out
}

/// Timeline rows for topics: id, title, onset week, assigned document
/// count, category. Topics below `min_terms` terms are skipped.
pub fn render_topic_timeline(partition: &TopicPartition, min_terms: usize) -> String {
    let mut out = String::from("topic_id\ttitle\tonset_week\tdoc_count\tcategory\n");
    for topic in &partition.topics {
        if topic.terms.len() < min_terms {
            continue;
        }
        let onset = topic
            .onset_week
            .map(|week| week.to_string())
            .unwrap_or_else(|| "-".to_string());
        let category = topic
            .category
            .map(|label| label.to_string())
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            topic.id,
            topic.title,
            onset,
            topic.assigned_docs.len(),
            category
        ));
    }
    out
}

pub fn render_category_heatmap(heatmap: &CategoryHeatmap) -> String {
    let mut out = String::from("primary");
    for label in CategoryLabel::ALL {
        out.push('\t');
        out.push_str(label.as_str());
    }
    out.push_str("\ttopics\n");
    for (row, label) in CategoryLabel::ALL.iter().enumerate() {
        out.push_str(label.as_str());
        for col in 0..8 {
            out.push('\t');
            out.push_str(&fmt_score(heatmap.cells[row][col]));
        }
        out.push_str(&format!("\t{}\n", heatmap.topics_per_primary[row]));
    }
    out
}

/// Structured-text topic export: a summary line, then per topic a
/// header block, its terms with weights, and its assigned documents
/// with scores.
pub fn render_topics(partition: &TopicPartition, min_terms: usize) -> String {
    let exported = partition
        .topics
        .iter()
        .filter(|topic| topic.terms.len() >= min_terms)
        .count();
    let mut out = format!(
        "topics\texported\t{exported}\ttotal\t{}\n\n",
        partition.topics.len()
    );
    for topic in &partition.topics {
        if topic.terms.len() < min_terms {
            continue;
        }
        out.push_str(&format!("topic\t{}\n", topic.id));
        out.push_str(&format!("title\t{}\n", topic.title));
        out.push_str(&format!(
            "class\t{}\n",
            if topic.is_significant() {
                "significant"
            } else {
                "specific"
            }
        ));
        out.push_str(&format!(
            "category\t{}\n",
            topic
                .category
                .map(|l| l.to_string())
                .unwrap_or_else(|| "-".into())
        ));
        out.push_str(&format!(
            "onset_week\t{}\n",
            topic
                .onset_week
                .map(|w| w.to_string())
                .unwrap_or_else(|| "-".into())
        ));

        let mut terms: Vec<(&str, Score)> = topic
            .terms
            .iter()
            .map(|(term, weight)| (partition.vocabulary.term(*term).text.as_str(), *weight))
            .collect();
        terms.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite weights")
                .then(a.0.cmp(b.0))
        });
        out.push_str(&format!("terms\t{}\n", terms.len()));
        for (text, weight) in terms {
            out.push_str(&format!("term\t{text}\t{}\n", fmt_score(weight)));
        }

        out.push_str(&format!("docs\t{}\n", topic.assigned_docs.len()));
        let mut docs: Vec<(&str, Score)> = topic
            .assigned_docs
            .iter()
            .map(|doc| {
                (
                    partition.vocabulary.doc_ids[*doc as usize].as_str(),
                    topic.doc_scores.get(doc).copied().unwrap_or(0.0),
                )
            })
            .collect();
        docs.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite scores")
                .then(a.0.cmp(b.0))
        });
        for (doc_id, score) in docs {
            out.push_str(&format!("doc\t{doc_id}\t{}\n", fmt_score(score)));
        }
        out.push('\n');
    }
    out
}

/// Data rows of a rendered TSV (lines minus one header).
pub fn tsv_rows(content: &str) -> usize {
    content.lines().count().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_curve_is_two_columns() {
        let histogram = WeeklyHistogram {
            bins: vec![(-1, 2), (0, 5)],
            undated: 3,
        };
        let rendered = render_growth_curve(&histogram);
        assert_eq!(rendered, "week\tcount\n-1\t2\n0\t5\n");
        assert_eq!(tsv_rows(&rendered), 2);
    }

    #[test]
    fn score_formatting_is_fixed_width() {
        assert_eq!(fmt_score(0.5), "0.500000");
        assert_eq!(fmt_score(1.0 / 3.0), "0.333333");
    }
}
