//! Run configuration: a TOML file plus flag overrides (flags win).
//!
//! Relative paths inside the file resolve against the file's directory.
//! The config fingerprint covers every semantic field — inputs, lexicons,
//! parameters — but not execution knobs (thread count) or the output
//! directory, so reruns of the same analysis produce identical manifests
//! wherever they write and however they parallelize.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;
use thiserror::Error;

use litscan::corpus::PassageKind;
use litscan::pubtator::ParseMode;
use litscan::topics::ThresholdMode;
use litscan::Score;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("input file does not exist: `{0}`")]
    MissingPath(PathBuf),
    #[error("{0}")]
    BadParam(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<PathBuf> {
        match self {
            OneOrMany::One(path) => vec![path],
            OneOrMany::Many(paths) => paths,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    inputs: InputsSection,
    #[serde(default)]
    lexicons: LexiconsSection,
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsSection {
    pubtator: Option<OneOrMany>,
    sidecar: Option<PathBuf>,
    passages: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    gene_map: Option<PathBuf>,
    compare: Option<CompareSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSection {
    pubtator: OneOrMany,
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconsSection {
    symptoms: Option<PathBuf>,
    symptoms_branch: Option<String>,
    organs: Option<PathBuf>,
    findings: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ParamsSection {
    anchor_date: String,
    z: Score,
    min_df: usize,
    max_passes: usize,
    threshold_mode: String,
    threshold_value: Score,
    title_max_words: usize,
    onset_top_k: usize,
    association_top_k: usize,
    trend_type: String,
    trend_top_k: usize,
    tag_passages: Vec<String>,
    comention_passages: Vec<String>,
    tree_depth: usize,
    export_min_terms: usize,
    strict: bool,
    threads: usize,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            anchor_date: "2020-02-01".to_string(),
            z: litscan::DEFAULT_Z,
            min_df: 3,
            max_passes: 20,
            threshold_mode: "percentile".to_string(),
            threshold_value: 0.9,
            title_max_words: 4,
            onset_top_k: 10,
            association_top_k: 5,
            trend_type: "Chemical".to_string(),
            trend_top_k: 5,
            tag_passages: vec!["title".to_string(), "abstract".to_string()],
            comention_passages: vec!["caption".to_string()],
            tree_depth: 2,
            export_min_terms: 2,
            strict: false,
            threads: 0,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// Flag overrides; flags win over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
    pub threads: Option<usize>,
}

/// The resolved, validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pubtator: Vec<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub passages: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub gene_map: Option<PathBuf>,
    pub compare_pubtator: Vec<PathBuf>,
    pub compare_sidecar: Option<PathBuf>,

    pub symptoms_lexicon: Option<PathBuf>,
    pub symptoms_branch: Option<String>,
    pub organs_lexicon: Option<PathBuf>,
    pub findings_lexicon: Option<PathBuf>,

    pub anchor: NaiveDate,
    pub z: Score,
    pub min_df: usize,
    pub max_passes: usize,
    pub threshold: ThresholdMode,
    pub title_max_words: usize,
    pub onset_top_k: usize,
    pub association_top_k: usize,
    pub trend_type: String,
    pub trend_top_k: usize,
    pub tag_passages: BTreeSet<PassageKind>,
    pub comention_passages: BTreeSet<PassageKind>,
    pub tree_depth: usize,
    pub export_min_terms: usize,
    pub mode: ParseMode,
    pub threads: usize,

    pub out_dir: PathBuf,
}

fn resolve(base: &Path, path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

fn parse_kinds(names: &[String], what: &str) -> Result<BTreeSet<PassageKind>, ConfigError> {
    let mut kinds = BTreeSet::new();
    for name in names {
        let kind = PassageKind::parse(name).ok_or_else(|| {
            ConfigError::BadParam(format!("{what}: unknown passage kind `{name}`"))
        })?;
        kinds.insert(kind);
    }
    if kinds.is_empty() {
        return Err(ConfigError::BadParam(format!(
            "{what}: no passage kinds given"
        )));
    }
    Ok(kinds)
}

impl RunConfig {
    pub fn load(config_path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(config_path).map_err(|source| ConfigError::Io {
            path: config_path.to_path_buf(),
            source,
        })?;
        let file: FileConfig = toml::from_str(&text)?;
        let base = config_path.parent().unwrap_or_else(|| Path::new("."));

        let pubtator = file
            .inputs
            .pubtator
            .ok_or_else(|| ConfigError::BadParam("inputs.pubtator is required".to_string()))?
            .into_vec()
            .into_iter()
            .map(|p| resolve(base, p))
            .collect::<Vec<_>>();
        if pubtator.is_empty() {
            return Err(ConfigError::BadParam(
                "inputs.pubtator lists no files".to_string(),
            ));
        }

        let (compare_pubtator, compare_sidecar) = match file.inputs.compare {
            Some(section) => (
                section
                    .pubtator
                    .into_vec()
                    .into_iter()
                    .map(|p| resolve(base, p))
                    .collect(),
                section.sidecar.map(|p| resolve(base, p)),
            ),
            None => (Vec::new(), None),
        };

        let params = file.params;
        let anchor = NaiveDate::parse_from_str(&params.anchor_date, "%Y-%m-%d").map_err(|_| {
            ConfigError::BadParam(format!("bad anchor_date `{}`", params.anchor_date))
        })?;

        let threshold = match params.threshold_mode.as_str() {
            "percentile" => {
                if !(params.threshold_value > 0.0 && params.threshold_value <= 1.0) {
                    return Err(ConfigError::BadParam(
                        "threshold_value must be in (0, 1] for percentile mode".to_string(),
                    ));
                }
                ThresholdMode::Percentile(params.threshold_value)
            }
            "absolute" => {
                if !params.threshold_value.is_finite() || params.threshold_value < 0.0 {
                    return Err(ConfigError::BadParam(
                        "threshold_value must be finite and >= 0 for absolute mode".to_string(),
                    ));
                }
                ThresholdMode::Absolute(params.threshold_value)
            }
            other => {
                return Err(ConfigError::BadParam(format!(
                    "threshold_mode must be percentile or absolute, got `{other}`"
                )))
            }
        };

        if !params.z.is_finite() || params.z <= 0.0 {
            return Err(ConfigError::BadParam(
                "z must be positive and finite".to_string(),
            ));
        }
        for (name, value) in [
            ("min_df", params.min_df),
            ("max_passes", params.max_passes),
            ("title_max_words", params.title_max_words),
            ("onset_top_k", params.onset_top_k),
            ("association_top_k", params.association_top_k),
            ("trend_top_k", params.trend_top_k),
            ("tree_depth", params.tree_depth),
        ] {
            if value == 0 {
                return Err(ConfigError::BadParam(format!("{name} must be at least 1")));
            }
        }

        let mode = match overrides.strict.unwrap_or(params.strict) {
            true => ParseMode::Strict,
            false => ParseMode::Lenient,
        };

        let out_dir = overrides.out.clone().unwrap_or_else(|| {
            resolve(
                base,
                file.output.dir.unwrap_or_else(|| PathBuf::from("out")),
            )
        });

        let config = RunConfig {
            pubtator,
            sidecar: file.inputs.sidecar.map(|p| resolve(base, p)),
            passages: file.inputs.passages.map(|p| resolve(base, p)),
            stopwords: file.inputs.stopwords.map(|p| resolve(base, p)),
            gene_map: file.inputs.gene_map.map(|p| resolve(base, p)),
            compare_pubtator,
            compare_sidecar,
            symptoms_lexicon: file.lexicons.symptoms.map(|p| resolve(base, p)),
            symptoms_branch: file.lexicons.symptoms_branch,
            organs_lexicon: file.lexicons.organs.map(|p| resolve(base, p)),
            findings_lexicon: file.lexicons.findings.map(|p| resolve(base, p)),
            anchor,
            z: params.z,
            min_df: params.min_df,
            max_passes: params.max_passes,
            threshold,
            title_max_words: params.title_max_words,
            onset_top_k: params.onset_top_k,
            association_top_k: params.association_top_k,
            trend_type: params.trend_type,
            trend_top_k: params.trend_top_k,
            tag_passages: parse_kinds(&params.tag_passages, "tag_passages")?,
            comention_passages: parse_kinds(&params.comention_passages, "comention_passages")?,
            tree_depth: params.tree_depth,
            export_min_terms: params.export_min_terms,
            mode,
            threads: overrides.threads.unwrap_or(params.threads),
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    /// Every referenced path must exist before anything runs.
    fn validate(&self) -> Result<(), ConfigError> {
        let mut paths: Vec<&PathBuf> = Vec::new();
        paths.extend(self.pubtator.iter());
        paths.extend(self.compare_pubtator.iter());
        for path in [
            &self.sidecar,
            &self.passages,
            &self.stopwords,
            &self.gene_map,
            &self.compare_sidecar,
            &self.symptoms_lexicon,
            &self.organs_lexicon,
            &self.findings_lexicon,
        ]
        .into_iter()
        .flatten()
        {
            paths.push(path);
        }
        for path in paths {
            if !path.is_file() {
                return Err(ConfigError::MissingPath(path.clone()));
            }
        }
        Ok(())
    }

    pub fn has_compare_corpus(&self) -> bool {
        !self.compare_pubtator.is_empty()
    }

    /// Canonical dump of every semantic field, the fingerprint input.
    fn canonical_string(&self) -> String {
        fn paths(list: &[PathBuf]) -> String {
            list.iter()
                .map(|p| p.to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join(",")
        }
        fn opt(path: &Option<PathBuf>) -> String {
            path.as_ref()
                .map(|p| p.to_string_lossy().into_owned())
                .unwrap_or_default()
        }
        fn kinds(set: &BTreeSet<PassageKind>) -> String {
            set.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",")
        }

        let mut out = String::new();
        let mut push = |key: &str, value: String| {
            let _ = writeln!(out, "{key}={value}");
        };
        push("pubtator", paths(&self.pubtator));
        push("sidecar", opt(&self.sidecar));
        push("passages", opt(&self.passages));
        push("stopwords", opt(&self.stopwords));
        push("gene_map", opt(&self.gene_map));
        push("compare.pubtator", paths(&self.compare_pubtator));
        push("compare.sidecar", opt(&self.compare_sidecar));
        push("lexicons.symptoms", opt(&self.symptoms_lexicon));
        push(
            "lexicons.symptoms_branch",
            self.symptoms_branch.clone().unwrap_or_default(),
        );
        push("lexicons.organs", opt(&self.organs_lexicon));
        push("lexicons.findings", opt(&self.findings_lexicon));
        push("anchor", self.anchor.format("%Y-%m-%d").to_string());
        push("z", format!("{:.9}", self.z));
        push("min_df", self.min_df.to_string());
        push("max_passes", self.max_passes.to_string());
        push(
            "threshold",
            match self.threshold {
                ThresholdMode::Percentile(q) => format!("percentile:{q:.9}"),
                ThresholdMode::Absolute(v) => format!("absolute:{v:.9}"),
            },
        );
        push("title_max_words", self.title_max_words.to_string());
        push("onset_top_k", self.onset_top_k.to_string());
        push("association_top_k", self.association_top_k.to_string());
        push("trend_type", self.trend_type.clone());
        push("trend_top_k", self.trend_top_k.to_string());
        push("tag_passages", kinds(&self.tag_passages));
        push("comention_passages", kinds(&self.comention_passages));
        push("tree_depth", self.tree_depth.to_string());
        push("export_min_terms", self.export_min_terms.to_string());
        push("strict", (self.mode == ParseMode::Strict).to_string());
        out
    }

    /// FNV-1a 64 over the canonical dump, as fixed-width hex.
    pub fn fingerprint(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical_string().bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}
