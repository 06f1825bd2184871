//! Pipeline orchestration: stage execution, report files, and the run
//! manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use litscan::canonical::to_canonical;
use litscan::compare::{compare_corpora, ComparisonRow, HeadingFreqs};
use litscan::corpus::Corpus;
use litscan::entity::{mention_counts, top_k, EntityCount};
use litscan::lexicon::Lexicon;
use litscan::pdc::pdc_cluster;
use litscan::pubtator::{parse_pubtator, ParseStats};
use litscan::report;
use litscan::sidecar::{apply_passages, apply_sidecar, parse_passages, parse_sidecar};
use litscan::stats::{category_stats, weekly_histogram, CategoryStats, WeeklyHistogram};
use litscan::tagger::{
    comention_matrix, group_by_tree, heading_article_counts, heading_doc_sets, tag_corpus,
    ComentionMatrix, HeadingCount,
};
use litscan::terms::{extract_terms, load_stopwords};
use litscan::topics::{
    associate_category, category_heatmap, make_title, score_documents, topic_onset,
    CategoryHeatmap, TopicPartition,
};
use litscan::{WeekIndex, DEFAULT_STOPWORDS};

use crate::config::RunConfig;

/// The analysis stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Stats,
    Entities,
    Symptoms,
    Compare,
    Topics,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Stats,
        Stage::Entities,
        Stage::Symptoms,
        Stage::Compare,
        Stage::Topics,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Stats => "stats",
            Stage::Entities => "entities",
            Stage::Symptoms => "symptoms",
            Stage::Compare => "compare",
            Stage::Topics => "topics",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Plot-ready dataset kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlotKind {
    GrowthCurve,
    CategoryBars,
    TrendLines,
    ComentionHeatmap,
    TopicTimeline,
    CategoryHeatmap,
    OrganIntensity,
}

impl PlotKind {
    pub const ALL: [PlotKind; 7] = [
        PlotKind::GrowthCurve,
        PlotKind::CategoryBars,
        PlotKind::TrendLines,
        PlotKind::ComentionHeatmap,
        PlotKind::TopicTimeline,
        PlotKind::CategoryHeatmap,
        PlotKind::OrganIntensity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::GrowthCurve => "growth_curve",
            PlotKind::CategoryBars => "category_bars",
            PlotKind::TrendLines => "trend_lines",
            PlotKind::ComentionHeatmap => "comention_heatmap",
            PlotKind::TopicTimeline => "topic_timeline",
            PlotKind::CategoryHeatmap => "category_heatmap",
            PlotKind::OrganIntensity => "organ_intensity",
        }
    }

    pub fn parse(name: &str) -> Option<PlotKind> {
        PlotKind::ALL
            .iter()
            .copied()
            .find(|kind| kind.as_str() == name)
    }

    /// The stage whose results this dataset is drawn from.
    pub fn stage(self) -> Stage {
        match self {
            PlotKind::GrowthCurve | PlotKind::CategoryBars => Stage::Stats,
            PlotKind::TrendLines => Stage::Entities,
            PlotKind::ComentionHeatmap | PlotKind::OrganIntensity => Stage::Symptoms,
            PlotKind::TopicTimeline | PlotKind::CategoryHeatmap => Stage::Topics,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::GrowthCurve => "growth_curve.tsv",
            PlotKind::CategoryBars => "category_bars.tsv",
            PlotKind::TrendLines => "entity_trends.tsv",
            PlotKind::ComentionHeatmap => "finding_comentions.tsv",
            PlotKind::TopicTimeline => "topic_timeline.tsv",
            PlotKind::CategoryHeatmap => "category_heatmap.tsv",
            PlotKind::OrganIntensity => "organ_intensity.tsv",
        }
    }

    /// Whether the configuration carries the inputs this dataset needs.
    pub fn available(self, config: &RunConfig) -> bool {
        match self {
            PlotKind::ComentionHeatmap => {
                config.symptoms_lexicon.is_some() && config.findings_lexicon.is_some()
            }
            PlotKind::OrganIntensity => {
                config.symptoms_lexicon.is_some() && config.organs_lexicon.is_some()
            }
            _ => true,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage}: {message}")]
    Stage { stage: String, message: String },
    #[error("plot kind `{0}` needs a stage that did not run")]
    MissingStage(&'static str),
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// One produced file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputEntry {
    pub name: String,
    pub rows: usize,
    pub stage: &'static str,
}

/// Everything the stages computed, kept for plot emission.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub corpus: Corpus,
    pub parse_stats: ParseStats,
    /// Topics below this term count stay out of the exports.
    pub export_min_terms: usize,
    pub histogram: Option<WeeklyHistogram>,
    pub categories: Option<CategoryStats>,
    pub entity_counts: Option<Vec<EntityCount>>,
    pub entity_trends: Option<Vec<report::EntityTrendRow>>,
    pub symptom_counts: Option<Vec<HeadingCount>>,
    pub organ_counts: Option<Vec<HeadingCount>>,
    pub finding_matrix: Option<ComentionMatrix>,
    pub comparison: Option<Vec<ComparisonRow>>,
    pub partition: Option<TopicPartition>,
}

/// Manifest of a pipeline run.
#[derive(Debug)]
pub struct RunReport {
    pub fingerprint: String,
    pub out_dir: PathBuf,
    pub outputs: Vec<OutputEntry>,
    pub warnings: Vec<String>,
    pub failure: Option<(Stage, String)>,
    pub artifacts: Artifacts,
}

impl RunReport {
    fn record(
        &mut self,
        name: &str,
        content: &str,
        stage: &'static str,
    ) -> Result<(), PipelineError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, content).map_err(|source| PipelineError::Write { path, source })?;
        let rows = report::tsv_rows(content);
        self.outputs.retain(|entry| entry.name != name);
        self.outputs.push(OutputEntry {
            name: name.to_string(),
            rows,
            stage,
        });
        Ok(())
    }

    /// Render and write `manifest.tsv`: the config fingerprint plus one
    /// line per output, sorted by file name.
    pub fn write_manifest(&mut self) -> Result<(), PipelineError> {
        let mut content = format!("fingerprint\t{}\n", self.fingerprint);
        let mut outputs = self.outputs.clone();
        outputs.sort_by(|a, b| a.name.cmp(&b.name));
        for entry in &outputs {
            content.push_str(&format!(
                "output\t{}\t{}\t{}\n",
                entry.name, entry.rows, entry.stage
            ));
        }
        let path = self.out_dir.join("manifest.tsv");
        std::fs::write(&path, content).map_err(|source| PipelineError::Write { path, source })?;
        Ok(())
    }
}

fn stage_err(stage: Stage, message: impl fmt::Display) -> PipelineError {
    PipelineError::Stage {
        stage: stage.to_string(),
        message: message.to_string(),
    }
}

/// Parse one or more annotation files and merge in the sidecars.
pub fn load_corpus(
    paths: &[PathBuf],
    sidecar: Option<&Path>,
    passages: Option<&Path>,
    mode: litscan::pubtator::ParseMode,
    warnings: &mut Vec<String>,
) -> anyhow::Result<(Corpus, ParseStats)> {
    let mut corpus = Corpus::new();
    let mut stats = ParseStats::default();
    for path in paths {
        let file = std::fs::File::open(path)
            .map_err(|e| anyhow::anyhow!("cannot open `{}`: {e}", path.display()))?;
        let outcome = parse_pubtator(std::io::BufReader::new(file), mode)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        stats.skipped_lines += outcome.stats.skipped_lines;
        stats.dropped_annotations += outcome.stats.dropped_annotations;
        corpus
            .merge(outcome.corpus)
            .map_err(|e| anyhow::anyhow!("merging `{}`: {e}", path.display()))?;
    }
    if let Some(path) = sidecar {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read `{}`: {e}", path.display()))?;
        let meta = parse_sidecar(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let unmatched = apply_sidecar(&mut corpus, &meta);
        if !unmatched.is_empty() {
            warnings.push(format!(
                "sidecar rows for {} absent document(s): {}",
                unmatched.len(),
                unmatched.join(", ")
            ));
        }
    }
    if let Some(path) = passages {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read `{}`: {e}", path.display()))?;
        let rows = parse_passages(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let unmatched = apply_passages(&mut corpus, &rows);
        if !unmatched.is_empty() {
            warnings.push(format!(
                "passage rows for {} absent document(s)",
                unmatched.len()
            ));
        }
    }
    if !stats.is_clean() {
        warnings.push(format!(
            "lenient parse skipped {} line(s) and dropped {} annotation(s)",
            stats.skipped_lines, stats.dropped_annotations
        ));
    }
    Ok((corpus, stats))
}

fn load_lexicon(path: &Path, branch: Option<&str>) -> anyhow::Result<Lexicon> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read `{}`: {e}", path.display()))?;
    Lexicon::compile(&text, branch).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn heading_freqs(
    corpus: &Corpus,
    lexicon: &Lexicon,
    kinds: &BTreeSet<litscan::PassageKind>,
) -> HeadingFreqs {
    heading_article_counts(corpus, lexicon, kinds)
        .into_iter()
        .map(|count| (count.heading_id, (count.name, count.article_count as u64)))
        .collect()
}

/// Check that every requested stage has the inputs it needs. This is the
/// pre-flight gate: failures here are config errors, not stage errors.
pub fn check_stage_requirements(
    config: &RunConfig,
    stages: &BTreeSet<Stage>,
) -> Result<(), String> {
    if stages.contains(&Stage::Compare) && !config.has_compare_corpus() {
        return Err("the compare stage needs [inputs.compare] with a second corpus".to_string());
    }
    if (stages.contains(&Stage::Symptoms) || stages.contains(&Stage::Compare))
        && config.symptoms_lexicon.is_none()
    {
        return Err("the symptoms and compare stages need lexicons.symptoms".to_string());
    }
    Ok(())
}

/// Stages runnable under this config (for `all`).
pub fn configured_stages(config: &RunConfig) -> BTreeSet<Stage> {
    let mut stages: BTreeSet<Stage> = [Stage::Stats, Stage::Entities, Stage::Topics].into();
    if config.symptoms_lexicon.is_some() {
        stages.insert(Stage::Symptoms);
        if config.has_compare_corpus() {
            stages.insert(Stage::Compare);
        }
    }
    stages
}

/// Execute the selected stages in dependency order, writing every report
/// as it is produced. On a stage error the remaining stages are skipped
/// and already-written outputs stay in place.
pub fn run_pipeline(
    config: &RunConfig,
    stages: &BTreeSet<Stage>,
) -> Result<RunReport, PipelineError> {
    std::fs::create_dir_all(&config.out_dir).map_err(|source| PipelineError::Write {
        path: config.out_dir.clone(),
        source,
    })?;

    let mut report = RunReport {
        fingerprint: config.fingerprint(),
        out_dir: config.out_dir.clone(),
        outputs: Vec::new(),
        warnings: Vec::new(),
        failure: None,
        artifacts: Artifacts {
            export_min_terms: config.export_min_terms,
            ..Artifacts::default()
        },
    };

    let run = |report: &mut RunReport| -> Result<(), PipelineError> {
        let mut warnings = Vec::new();
        let (corpus, parse_stats) = load_corpus(
            &config.pubtator,
            config.sidecar.as_deref(),
            config.passages.as_deref(),
            config.mode,
            &mut warnings,
        )
        .map_err(|e| PipelineError::Stage {
            stage: "ingest".to_string(),
            message: e.to_string(),
        })?;
        report.warnings.append(&mut warnings);
        report.artifacts.corpus = corpus;
        report.artifacts.parse_stats = parse_stats;

        for stage in Stage::ALL {
            if !stages.contains(&stage) {
                continue;
            }
            match stage {
                Stage::Stats => run_stats(config, report)?,
                Stage::Entities => run_entities(config, report)?,
                Stage::Symptoms => run_symptoms(config, report)?,
                Stage::Compare => run_compare(config, report)?,
                Stage::Topics => run_topics(config, report)?,
            }
        }
        Ok(())
    };

    if let Err(error) = maybe_in_pool(config.threads, || run(&mut report)) {
        match error {
            PipelineError::Stage { stage, message } => {
                let stage_enum = Stage::ALL
                    .into_iter()
                    .find(|s| s.as_str() == stage)
                    .unwrap_or(Stage::Stats);
                report.failure = Some((stage_enum, format!("stage {stage}: {message}")));
            }
            other => return Err(other),
        }
    }
    report.write_manifest()?;
    Ok(report)
}

fn maybe_in_pool<T>(threads: usize, job: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    if threads == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(job)
    }
}

fn run_stats(config: &RunConfig, report: &mut RunReport) -> Result<(), PipelineError> {
    let (histogram, categories) = {
        let corpus = &report.artifacts.corpus;
        (
            weekly_histogram(corpus, config.anchor),
            category_stats(corpus),
        )
    };
    report.record(
        "growth_curve.tsv",
        &report::render_growth_curve(&histogram),
        "stats",
    )?;
    report.record(
        "category_report.tsv",
        &report::render_category_report(&categories),
        "stats",
    )?;
    report.artifacts.histogram = Some(histogram);
    report.artifacts.categories = Some(categories);
    Ok(())
}

fn run_entities(config: &RunConfig, report: &mut RunReport) -> Result<(), PipelineError> {
    let gene_map = match &config.gene_map {
        Some(path) => Some(load_gene_map(path).map_err(|e| stage_err(Stage::Entities, e))?),
        None => None,
    };

    let (counts, trend_rows) = {
        let corpus = &report.artifacts.corpus;
        let counts = mention_counts(corpus, None);

        // Weekly trends for the most mentioned entities of the configured type.
        let of_type: Vec<EntityCount> = counts
            .iter()
            .filter(|count| count.key.concept_type == config.trend_type)
            .cloned()
            .collect();
        let mut trend_rows = Vec::new();
        for count in top_k(&of_type, config.trend_top_k) {
            let mut bins: BTreeMap<WeekIndex, usize> = BTreeMap::new();
            for doc_id in &count.doc_ids {
                if let Some(date) = corpus.get(doc_id).and_then(|doc| doc.pub_date) {
                    *bins
                        .entry(litscan::stats::week_index(date, config.anchor))
                        .or_default() += 1;
                }
            }
            for (week, articles) in bins {
                trend_rows.push((
                    count.key.concept_type.clone(),
                    count.key.key.clone(),
                    count.key.display_name.clone(),
                    week,
                    articles,
                ));
            }
        }
        (counts, trend_rows)
    };

    report.record(
        "entity_counts.tsv",
        &report::render_entity_counts(&counts, gene_map.as_ref()),
        "entities",
    )?;
    report.record(
        "entity_trends.tsv",
        &report::render_entity_trends(&trend_rows),
        "entities",
    )?;

    report.artifacts.entity_counts = Some(counts);
    report.artifacts.entity_trends = Some(trend_rows);
    Ok(())
}

fn load_gene_map(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read `{}`: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (index, line) in text.lines().enumerate() {
        if line.is_empty() || (index == 0 && line == "concept_id\tgene") {
            continue;
        }
        let Some((key, gene)) = line.split_once('\t') else {
            anyhow::bail!(
                "{}: line {}: expected `concept_id\\tgene`",
                path.display(),
                index + 1
            );
        };
        map.insert(key.to_string(), gene.to_string());
    }
    Ok(map)
}

fn run_symptoms(config: &RunConfig, report: &mut RunReport) -> Result<(), PipelineError> {
    let path = config
        .symptoms_lexicon
        .as_ref()
        .ok_or_else(|| stage_err(Stage::Symptoms, "no symptoms lexicon configured"))?;
    let lexicon = load_lexicon(path, config.symptoms_branch.as_deref())
        .map_err(|e| stage_err(Stage::Symptoms, e))?;

    let organs = match &config.organs_lexicon {
        Some(path) => Some(load_lexicon(path, None).map_err(|e| stage_err(Stage::Symptoms, e))?),
        None => None,
    };
    let findings = match &config.findings_lexicon {
        Some(path) => Some(load_lexicon(path, None).map_err(|e| stage_err(Stage::Symptoms, e))?),
        None => None,
    };

    let (counts, matches, groups, organ_counts, finding_matrix) = {
        let corpus = &report.artifacts.corpus;
        let counts = heading_article_counts(corpus, &lexicon, &config.tag_passages);
        let matches = tag_corpus(corpus, &lexicon, &config.tag_passages);
        let sets = heading_doc_sets(corpus, &lexicon, &config.tag_passages);
        let groups = group_by_tree(&sets, &lexicon, config.tree_depth);
        let organ_counts = organs
            .as_ref()
            .map(|lex| heading_article_counts(corpus, lex, &config.tag_passages));
        let finding_matrix = findings
            .as_ref()
            .map(|lex| comention_matrix(corpus, lex, &config.comention_passages).top(10));
        (counts, matches, groups, organ_counts, finding_matrix)
    };

    report.record(
        "symptom_counts.tsv",
        &report::render_heading_counts(&counts),
        "symptoms",
    )?;
    report.record(
        "symptom_matches.tsv",
        &report::render_matches(&matches),
        "symptoms",
    )?;
    report.record(
        "symptom_tree_groups.tsv",
        &report::render_tree_groups(&groups),
        "symptoms",
    )?;
    report.artifacts.symptom_counts = Some(counts);

    if let Some(counts) = organ_counts {
        report.record(
            "organ_intensity.tsv",
            &report::render_heading_counts(&counts[..counts.len().min(10)]),
            "symptoms",
        )?;
        report.artifacts.organ_counts = Some(counts);
    }
    if let Some(matrix) = finding_matrix {
        report.record(
            "finding_comentions.tsv",
            &report::render_comention_matrix(&matrix),
            "symptoms",
        )?;
        report.artifacts.finding_matrix = Some(matrix);
    }
    Ok(())
}

fn run_compare(config: &RunConfig, report: &mut RunReport) -> Result<(), PipelineError> {
    let path = config
        .symptoms_lexicon
        .as_ref()
        .ok_or_else(|| stage_err(Stage::Compare, "no symptoms lexicon configured"))?;
    let lexicon = load_lexicon(path, config.symptoms_branch.as_deref())
        .map_err(|e| stage_err(Stage::Compare, e))?;

    let mut warnings = Vec::new();
    let (corpus_b, _) = load_corpus(
        &config.compare_pubtator,
        config.compare_sidecar.as_deref(),
        None,
        config.mode,
        &mut warnings,
    )
    .map_err(|e| stage_err(Stage::Compare, e))?;
    report.warnings.append(&mut warnings);

    let rows = {
        let corpus_a = &report.artifacts.corpus;
        if corpus_a.is_empty() || corpus_b.is_empty() {
            return Err(stage_err(Stage::Compare, "both corpora must be non-empty"));
        }
        let freqs_a = heading_freqs(corpus_a, &lexicon, &config.tag_passages);
        let freqs_b = heading_freqs(&corpus_b, &lexicon, &config.tag_passages);
        compare_corpora(
            &freqs_a,
            corpus_a.len() as u64,
            &freqs_b,
            corpus_b.len() as u64,
            config.z,
        )
        .map_err(|e| stage_err(Stage::Compare, e))?
    };
    report.record(
        "comparison.tsv",
        &report::render_comparison(&rows),
        "compare",
    )?;
    report.artifacts.comparison = Some(rows);
    Ok(())
}

fn run_topics(config: &RunConfig, report: &mut RunReport) -> Result<(), PipelineError> {
    let stopwords = match &config.stopwords {
        Some(path) => {
            load_stopwords(&std::fs::read_to_string(path).map_err(|e| stage_err(Stage::Topics, e))?)
        }
        None => load_stopwords(DEFAULT_STOPWORDS),
    };

    let (partition, heatmap) = {
        let corpus = &report.artifacts.corpus;
        let vocabulary = extract_terms(corpus, &stopwords, config.min_df);
        let outcome =
            pdc_cluster(vocabulary, config.max_passes).map_err(|e| stage_err(Stage::Topics, e))?;
        let mut partition = outcome.partition;

        score_documents(&mut partition, config.threshold);
        for index in 0..partition.topics.len() {
            let title = make_title(
                &partition.topics[index],
                &partition.vocabulary,
                config.title_max_words,
            );
            let onset = topic_onset(
                &partition.topics[index],
                &partition.vocabulary,
                corpus,
                config.onset_top_k,
                config.anchor,
            )
            .ok();
            let category = associate_category(
                &partition.topics[index],
                &partition.vocabulary,
                corpus,
                config.association_top_k,
            );
            let topic = &mut partition.topics[index];
            topic.title = title;
            topic.onset_week = onset;
            topic.category = category;
        }
        let heatmap: CategoryHeatmap = category_heatmap(&partition, corpus);
        (partition, heatmap)
    };

    report.record(
        "topics.txt",
        &report::render_topics(&partition, config.export_min_terms),
        "topics",
    )?;
    report.record(
        "topic_timeline.tsv",
        &report::render_topic_timeline(&partition, config.export_min_terms),
        "topics",
    )?;
    report.record(
        "category_heatmap.tsv",
        &report::render_category_heatmap(&heatmap),
        "topics",
    )?;
    report.artifacts.partition = Some(partition);
    Ok(())
}

/// Write the dataset for one figure. The underlying stage must have run.
pub fn emit_plot_data(report: &mut RunReport, kind: PlotKind) -> Result<PathBuf, PipelineError> {
    let missing = || PipelineError::MissingStage(kind.as_str());
    let content = match kind {
        PlotKind::GrowthCurve => {
            report::render_growth_curve(report.artifacts.histogram.as_ref().ok_or_else(missing)?)
        }
        PlotKind::CategoryBars => {
            report::render_category_bars(report.artifacts.categories.as_ref().ok_or_else(missing)?)
        }
        PlotKind::TrendLines => report::render_entity_trends(
            report
                .artifacts
                .entity_trends
                .as_ref()
                .ok_or_else(missing)?,
        ),
        PlotKind::ComentionHeatmap => report::render_comention_matrix(
            report
                .artifacts
                .finding_matrix
                .as_ref()
                .ok_or_else(missing)?,
        ),
        PlotKind::TopicTimeline => {
            let partition = report.artifacts.partition.as_ref().ok_or_else(missing)?;
            report::render_topic_timeline(partition, report.artifacts.export_min_terms)
        }
        PlotKind::CategoryHeatmap => {
            let partition = report.artifacts.partition.as_ref().ok_or_else(missing)?;
            report::render_category_heatmap(&category_heatmap(partition, &report.artifacts.corpus))
        }
        PlotKind::OrganIntensity => {
            let counts = report.artifacts.organ_counts.as_ref().ok_or_else(missing)?;
            report::render_heading_counts(&counts[..counts.len().min(10)])
        }
    };
    let stage = kind.stage().as_str();
    report.record(kind.file_name(), &content, stage)?;
    Ok(report.out_dir.join(kind.file_name()))
}

/// Write the canonical corpus export (the `ingest` subcommand).
pub fn write_canonical(report: &mut RunReport) -> Result<(), PipelineError> {
    let content = to_canonical(&report.artifacts.corpus);
    let path = report.out_dir.join("corpus_canonical.txt");
    std::fs::write(&path, &content).map_err(|source| PipelineError::Write { path, source })?;
    report.outputs.push(OutputEntry {
        name: "corpus_canonical.txt".to_string(),
        rows: report.artifacts.corpus.len(),
        stage: "ingest",
    });
    Ok(())
}
