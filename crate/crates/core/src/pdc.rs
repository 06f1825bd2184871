//! Greedy likelihood clustering of the term vocabulary into disjoint
//! topics.
//!
//! Every term starts as a singleton cluster. Passes visit terms in a
//! fixed order (document frequency descending, text ascending) and move
//! each term to the cluster where its affinity is highest, if that
//! strictly beats its affinity in the current cluster and the move
//! strictly raises the total summed affinity of the partition (a move
//! can lower other members' affinities, so the gate is what makes the
//! total non-decreasing across passes). The process stops when a pass
//! makes no move or after `max_passes`. No cluster count is ever
//! supplied; the partition emerges from the data.
//!
//! Affinity of a term against a cluster is a Bernoulli log-likelihood
//! ratio: with `m` context documents (docs containing another member of
//! the cluster) and `k` of them also containing the term, it compares
//! the smoothed in-context rate `q = (k + 0.5) / (m + 1)` against the
//! background rate `p = df / N`. The ratio is signed by the direction of
//! association: when the observed rate falls below the background rate
//! the magnitude counts against the cluster, so anti-correlated terms
//! never attract each other.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::num::Real;
use crate::terms::TermVocabulary;
use crate::topics::{Topic, TopicPartition};
use crate::Score;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdcError {
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("term `{0}` has no document postings")]
    EmptyPostings(String),
}

/// Signed log-likelihood-ratio affinity of a term for a cluster context.
///
/// `hits` of the `context` documents contain the term, the term appears
/// in `term_df` of the `n_docs` corpus documents. A context of zero
/// (singleton cluster) scores zero.
pub fn affinity<T: Real>(hits: u64, context: u64, term_df: u64, n_docs: u64) -> T {
    debug_assert!(hits <= context);
    debug_assert!(term_df >= 1 && term_df <= n_docs);
    if context == 0 {
        return T::zero();
    }
    let k = T::from_count(hits);
    let m = T::from_count(context);
    let p = T::from_count(term_df) / T::from_count(n_docs);
    let q = (k + T::half()) / (m + T::one());

    let mut llr = T::zero();
    if hits > 0 {
        llr = llr + k * (q / p).ln();
    }
    if hits < context {
        llr = llr + (m - k) * ((T::one() - q) / (T::one() - p)).ln();
    }

    // Positive association means the in-context rate k/m is at least the
    // background rate df/N, compared exactly in integers.
    let positive = (hits as u128) * (n_docs as u128) >= (context as u128) * (term_df as u128);
    if positive {
        llr
    } else {
        -llr.abs()
    }
}

/// Statistics of one clustering pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PassStats {
    pub pass: usize,
    pub moves: usize,
    /// Sum over all terms of their affinity in their own cluster.
    pub total_affinity: Score,
}

#[derive(Debug)]
pub struct PdcOutcome {
    pub partition: TopicPartition,
    pub passes: Vec<PassStats>,
}

struct ClusterState {
    members: BTreeSet<u32>,
    /// doc index -> number of member terms containing it.
    coverage: HashMap<u32, u32>,
}

struct Engine {
    n_docs: u64,
    df: Vec<u64>,
    postings: Vec<Vec<u32>>,
    assign: Vec<u32>,
    clusters: Vec<ClusterState>,
    /// doc index -> (cluster id -> member count), mirror of coverage.
    doc_clusters: Vec<HashMap<u32, u32>>,
    /// coverage size -> live cluster ids.
    size_index: BTreeMap<usize, BTreeSet<u32>>,
}

impl Engine {
    fn new(vocab: &TermVocabulary) -> Result<Engine, PdcError> {
        let n_terms = vocab.len();
        let n_docs = vocab.n_docs() as u64;
        let mut engine = Engine {
            n_docs,
            df: Vec::with_capacity(n_terms),
            postings: Vec::with_capacity(n_terms),
            assign: (0..n_terms as u32).collect(),
            clusters: Vec::with_capacity(n_terms),
            doc_clusters: vec![HashMap::new(); vocab.n_docs()],
            size_index: BTreeMap::new(),
        };
        for (term, info) in vocab.terms.iter().enumerate() {
            if info.postings.is_empty() {
                return Err(PdcError::EmptyPostings(info.text.clone()));
            }
            engine.df.push(info.postings.len() as u64);
            engine.postings.push(info.postings.clone());
            let mut coverage = HashMap::with_capacity(info.postings.len());
            for &doc in &info.postings {
                coverage.insert(doc, 1);
                engine.doc_clusters[doc as usize].insert(term as u32, 1);
            }
            engine
                .size_index
                .entry(info.postings.len())
                .or_default()
                .insert(term as u32);
            engine.clusters.push(ClusterState {
                members: BTreeSet::from([term as u32]),
                coverage,
            });
        }
        Ok(engine)
    }

    fn cov_size(&self, cluster: u32) -> usize {
        self.clusters[cluster as usize].coverage.len()
    }

    /// Affinity of a member inside its cluster. A singleton scores zero
    /// by definition.
    fn member_affinity(&self, cluster: u32, term: u32) -> Score {
        let state = &self.clusters[cluster as usize];
        if state.members.len() == 1 {
            return 0.0;
        }
        let mut sole = 0u64;
        let mut hits = 0u64;
        for doc in &self.postings[term as usize] {
            match state.coverage.get(doc) {
                Some(1) => sole += 1,
                Some(_) => hits += 1,
                None => unreachable!("member postings are covered"),
            }
        }
        let context = state.coverage.len() as u64 - sole;
        affinity(hits, context, self.df[term as usize], self.n_docs)
    }

    fn current_affinity(&self, term: u32) -> Score {
        self.member_affinity(self.assign[term as usize], term)
    }

    /// Summed affinity of every member of one cluster (zero for a
    /// dropped cluster).
    fn cluster_affinity_sum(&self, cluster: u32) -> Score {
        self.clusters[cluster as usize]
            .members
            .iter()
            .map(|&member| self.member_affinity(cluster, member))
            .sum()
    }

    /// Overlap counts against every cluster sharing a document with the
    /// term, the term's own cluster included.
    fn overlaps(&self, term: u32) -> HashMap<u32, u64> {
        let mut counts: HashMap<u32, u64> = HashMap::new();
        for doc in &self.postings[term as usize] {
            for cluster in self.doc_clusters[*doc as usize].keys() {
                *counts.entry(*cluster).or_default() += 1;
            }
        }
        counts
    }

    fn detach(&mut self, term: u32) {
        let cluster = self.assign[term as usize];
        let old_size = self.cov_size(cluster);
        let state = &mut self.clusters[cluster as usize];
        state.members.remove(&term);
        for doc in &self.postings[term as usize] {
            let count = state.coverage.get_mut(doc).expect("covered doc");
            *count -= 1;
            if *count == 0 {
                state.coverage.remove(doc);
            }
            let mirror = self.doc_clusters[*doc as usize]
                .get_mut(&cluster)
                .expect("mirrored doc");
            *mirror -= 1;
            if *mirror == 0 {
                self.doc_clusters[*doc as usize].remove(&cluster);
            }
        }
        let bucket = self.size_index.get_mut(&old_size).expect("indexed size");
        bucket.remove(&cluster);
        if bucket.is_empty() {
            self.size_index.remove(&old_size);
        }
        // Emptied clusters are dropped: never re-indexed, id never reused.
        if !self.clusters[cluster as usize].members.is_empty() {
            let new_size = self.cov_size(cluster);
            self.size_index.entry(new_size).or_default().insert(cluster);
        }
    }

    fn attach(&mut self, term: u32, cluster: u32) {
        // A dropped cluster is not size-indexed; re-attaching to one only
        // happens when a rejected move is rolled back.
        if !self.clusters[cluster as usize].members.is_empty() {
            let old_size = self.cov_size(cluster);
            let bucket = self.size_index.get_mut(&old_size).expect("indexed size");
            bucket.remove(&cluster);
            if bucket.is_empty() {
                self.size_index.remove(&old_size);
            }
        }
        let state = &mut self.clusters[cluster as usize];
        state.members.insert(term);
        for doc in &self.postings[term as usize] {
            *state.coverage.entry(*doc).or_insert(0) += 1;
            *self.doc_clusters[*doc as usize].entry(cluster).or_insert(0) += 1;
        }
        let new_size = self.cov_size(cluster);
        self.size_index.entry(new_size).or_default().insert(cluster);
        self.assign[term as usize] = cluster;
    }

    /// One visit of one term. Returns true when the term moved.
    fn visit(&mut self, term: u32) -> bool {
        let own = self.assign[term as usize];
        let current = self.current_affinity(term);
        let df = self.df[term as usize];

        let overlaps = self.overlaps(term);
        let mut best: Option<(Score, u32)> = None;
        let consider = |aff: Score, cluster: u32, best: &mut Option<(Score, u32)>| {
            let better = match best {
                None => true,
                Some((best_aff, best_id)) => {
                    aff > *best_aff || (aff == *best_aff && cluster < *best_id)
                }
            };
            if better {
                *best = Some((aff, cluster));
            }
        };

        let mut shared: Vec<(u32, u64)> = overlaps
            .iter()
            .filter(|(cluster, _)| **cluster != own)
            .map(|(cluster, k)| (*cluster, *k))
            .collect();
        shared.sort_unstable();
        for (cluster, k) in shared {
            let aff = affinity(k, self.cov_size(cluster) as u64, df, self.n_docs);
            consider(aff, cluster, &mut best);
        }

        // Clusters sharing no document with the term, grouped by coverage
        // size: their affinity depends only on the size, so one candidate
        // per size bucket suffices (the lowest id not already considered).
        for (&size, ids) in &self.size_index {
            if let Some(&cluster) = ids
                .iter()
                .find(|id| **id != own && !overlaps.contains_key(id))
            {
                let aff = affinity(0, size as u64, df, self.n_docs);
                consider(aff, cluster, &mut best);
            }
        }

        match best {
            Some((aff, cluster)) if aff > current => {
                // The move must also strictly raise the partition's total
                // affinity; only the two touched clusters can change.
                let before = self.cluster_affinity_sum(own) + self.cluster_affinity_sum(cluster);
                self.detach(term);
                self.attach(term, cluster);
                let after = self.cluster_affinity_sum(own) + self.cluster_affinity_sum(cluster);
                if after > before {
                    true
                } else {
                    self.detach(term);
                    self.attach(term, own);
                    false
                }
            }
            _ => false,
        }
    }

    fn total_affinity(&self) -> Score {
        (0..self.assign.len() as u32)
            .map(|term| self.current_affinity(term))
            .sum()
    }

    #[cfg(debug_assertions)]
    fn assert_partition(&self) {
        let mut seen = 0usize;
        for state in &self.clusters {
            for member in &state.members {
                assert_eq!(self.assign[*member as usize] as usize, {
                    self.clusters
                        .iter()
                        .position(|c| c.members.contains(member))
                        .unwrap()
                });
                seen += 1;
            }
        }
        assert_eq!(seen, self.assign.len());
    }
}

/// Partition the vocabulary into disjoint topics.
pub fn pdc_cluster(vocab: TermVocabulary, max_passes: usize) -> Result<PdcOutcome, PdcError> {
    if vocab.is_empty() {
        return Err(PdcError::EmptyVocabulary);
    }
    let max_passes = max_passes.max(1);
    let mut engine = Engine::new(&vocab)?;

    let mut passes = Vec::new();
    for pass in 1..=max_passes {
        let mut moves = 0usize;
        for term in 0..engine.assign.len() as u32 {
            if engine.visit(term) {
                moves += 1;
            }
        }
        #[cfg(debug_assertions)]
        engine.assert_partition();
        passes.push(PassStats {
            pass,
            moves,
            total_affinity: engine.total_affinity(),
        });
        if moves == 0 {
            break;
        }
    }

    // Materialize surviving clusters as topics: largest first, ties by
    // lowest member index (the highest-frequency term). Term weight is
    // the member's final affinity floored at zero, so a document's score
    // for a topic can only drop when a term is removed.
    let mut groups: Vec<(Vec<u32>, Vec<Score>)> = engine
        .clusters
        .iter()
        .filter(|state| !state.members.is_empty())
        .map(|state| {
            let members: Vec<u32> = state.members.iter().copied().collect();
            let weights: Vec<Score> = members
                .iter()
                .map(|&term| engine.current_affinity(term).max(0.0))
                .collect();
            (members, weights)
        })
        .collect();
    groups.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0[0].cmp(&b.0[0])));

    let topics = groups
        .into_iter()
        .enumerate()
        .map(|(id, (members, weights))| Topic::new(id, members.into_iter().zip(weights).collect()))
        .collect();

    Ok(PdcOutcome {
        partition: TopicPartition::new(topics, vocab),
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_from(n_docs: usize, postings: &[(&str, &[u32])]) -> TermVocabulary {
        TermVocabulary::from_postings(
            (0..n_docs).map(|i| format!("d{i}")).collect(),
            postings
                .iter()
                .map(|(text, docs)| (text.to_string(), docs.to_vec()))
                .collect(),
        )
    }

    fn term_groups(partition: &TopicPartition) -> BTreeSet<BTreeSet<String>> {
        partition
            .topics
            .iter()
            .map(|topic| {
                topic
                    .terms
                    .iter()
                    .map(|(idx, _)| partition.vocabulary.term(*idx).text.clone())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn affinity_is_zero_for_empty_context() {
        assert_eq!(affinity::<f64>(0, 0, 3, 6), 0.0);
    }

    #[test]
    fn affinity_rewards_cooccurrence_and_punishes_absence() {
        let together: f64 = affinity(3, 3, 3, 6);
        let apart: f64 = affinity(0, 3, 3, 6);
        assert!(together > 0.0);
        assert!(apart < 0.0);
        // Same evidence magnitude, opposite sign, in this symmetric setup.
        assert_eq!(together, -apart);
    }

    #[test]
    fn affinity_handles_ubiquitous_terms() {
        // A term in every document can never be positively surprising.
        let aff: f64 = affinity(4, 4, 6, 6);
        assert!(aff <= 0.0);
        assert!(aff.is_finite());
    }

    #[test]
    fn two_blocks_are_recovered() {
        let vocab = vocab_from(
            6,
            &[
                ("alpha", &[0, 1, 2]),
                ("beta", &[0, 1, 2]),
                ("gamma", &[3, 4, 5]),
                ("delta", &[3, 4, 5]),
            ],
        );
        let outcome = pdc_cluster(vocab, 10).unwrap();
        let groups = term_groups(&outcome.partition);
        let expected: BTreeSet<BTreeSet<String>> = [
            ["alpha", "beta"].iter().map(|s| s.to_string()).collect(),
            ["gamma", "delta"].iter().map(|s| s.to_string()).collect(),
        ]
        .into();
        assert_eq!(groups, expected);
        assert!(outcome.partition.check_partition());
    }

    #[test]
    fn no_cooccurrence_stays_singleton() {
        let vocab = vocab_from(4, &[("a", &[0]), ("b", &[1]), ("c", &[2]), ("d", &[3])]);
        let outcome = pdc_cluster(vocab, 10).unwrap();
        assert_eq!(outcome.partition.topics.len(), 4);
        assert!(outcome
            .partition
            .topics
            .iter()
            .all(|topic| topic.terms.len() == 1 && topic.terms[0].1 == 0.0));
        assert_eq!(outcome.passes[0].moves, 0);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let vocab = vocab_from(3, &[]);
        assert_eq!(
            pdc_cluster(vocab, 5).unwrap_err(),
            PdcError::EmptyVocabulary
        );
    }

    #[test]
    fn empty_postings_are_an_error() {
        let vocab = vocab_from(3, &[("ghost", &[])]);
        assert_eq!(
            pdc_cluster(vocab, 5).unwrap_err(),
            PdcError::EmptyPostings("ghost".to_string())
        );
    }

    #[test]
    fn total_affinity_never_decreases() {
        // Two blocks plus background documents sharing nothing.
        let vocab = vocab_from(
            10,
            &[
                ("alpha", &[0, 1, 2]),
                ("beta", &[0, 1, 2]),
                ("kappa", &[0, 1, 2]),
                ("gamma", &[3, 4, 5, 6]),
                ("delta", &[3, 4, 5, 6]),
            ],
        );
        let outcome = pdc_cluster(vocab, 20).unwrap();
        let mut last = f64::NEG_INFINITY;
        for stats in &outcome.passes {
            assert!(
                stats.total_affinity >= last,
                "pass {} decreased: {} < {last}",
                stats.pass,
                stats.total_affinity
            );
            last = stats.total_affinity;
        }
        assert_eq!(outcome.passes.last().unwrap().moves, 0);
    }

    #[test]
    fn weights_are_final_affinities() {
        let vocab = vocab_from(8, &[("alpha", &[0, 1, 2]), ("beta", &[0, 1, 2])]);
        let outcome = pdc_cluster(vocab, 10).unwrap();
        let topic = &outcome.partition.topics[0];
        assert_eq!(topic.terms.len(), 2);
        let expected: f64 = affinity(3, 3, 3, 8);
        for (_, weight) in &topic.terms {
            assert_eq!(*weight, expected);
        }
    }
}
