//! Document, annotation, and corpus data model.
//!
//! A [`Corpus`] holds one [`Document`] per article plus the entity
//! annotations attached to it. Documents carry their text as an ordered
//! list of passages (title and abstract first, then optional captions or
//! other pre-extracted passages), a publication date, and a set of
//! category labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDate;
use thiserror::Error;

/// The eight admissible article category labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryLabel {
    Prevention,
    Treatment,
    Diagnosis,
    Mechanism,
    GeneralInformation,
    CaseReport,
    Transmission,
    EpidemicForecasting,
}

impl CategoryLabel {
    /// All labels in declaration order.
    pub const ALL: [CategoryLabel; 8] = [
        CategoryLabel::Prevention,
        CategoryLabel::Treatment,
        CategoryLabel::Diagnosis,
        CategoryLabel::Mechanism,
        CategoryLabel::GeneralInformation,
        CategoryLabel::CaseReport,
        CategoryLabel::Transmission,
        CategoryLabel::EpidemicForecasting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CategoryLabel::Prevention => "Prevention",
            CategoryLabel::Treatment => "Treatment",
            CategoryLabel::Diagnosis => "Diagnosis",
            CategoryLabel::Mechanism => "Mechanism",
            CategoryLabel::GeneralInformation => "GeneralInformation",
            CategoryLabel::CaseReport => "CaseReport",
            CategoryLabel::Transmission => "Transmission",
            CategoryLabel::EpidemicForecasting => "EpidemicForecasting",
        }
    }

    /// Parse a label. Case, spaces, hyphens, and underscores are ignored,
    /// so `"General Information"`, `"general_information"`, and
    /// `"GeneralInformation"` all map to the same label. Anything else is
    /// rejected.
    pub fn parse(input: &str) -> Result<Self, UnknownCategory> {
        let folded: String = input
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match folded.as_str() {
            "prevention" => CategoryLabel::Prevention,
            "treatment" => CategoryLabel::Treatment,
            "diagnosis" => CategoryLabel::Diagnosis,
            "mechanism" => CategoryLabel::Mechanism,
            "generalinformation" | "generalinfo" => CategoryLabel::GeneralInformation,
            "casereport" | "casereports" => CategoryLabel::CaseReport,
            "transmission" => CategoryLabel::Transmission,
            "epidemicforecasting" | "forecasting" => CategoryLabel::EpidemicForecasting,
            _ => return Err(UnknownCategory(input.to_string())),
        })
    }
}

impl fmt::Display for CategoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown category label `{0}`")]
pub struct UnknownCategory(pub String);

/// Kind of a document passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PassageKind {
    Title,
    Abstract,
    Caption,
    Other,
}

impl PassageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PassageKind::Title => "title",
            PassageKind::Abstract => "abstract",
            PassageKind::Caption => "caption",
            PassageKind::Other => "other",
        }
    }

    pub fn parse(input: &str) -> Option<Self> {
        match input {
            "title" => Some(PassageKind::Title),
            "abstract" => Some(PassageKind::Abstract),
            "caption" => Some(PassageKind::Caption),
            "other" => Some(PassageKind::Other),
            _ => None,
        }
    }
}

impl fmt::Display for PassageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One article.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub abstract_text: String,
    pub pub_date: Option<NaiveDate>,
    pub categories: BTreeSet<CategoryLabel>,
    /// Ordered passages. Title and abstract come first when non-empty;
    /// captions and other pre-extracted passages follow.
    pub passages: Vec<(PassageKind, String)>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        title: impl Into<String>,
        abstract_text: impl Into<String>,
    ) -> Self {
        let title = title.into();
        let abstract_text = abstract_text.into();
        let mut passages = Vec::new();
        if !title.is_empty() {
            passages.push((PassageKind::Title, title.clone()));
        }
        if !abstract_text.is_empty() {
            passages.push((PassageKind::Abstract, abstract_text.clone()));
        }
        Document {
            doc_id: doc_id.into(),
            title,
            abstract_text,
            pub_date: None,
            categories: BTreeSet::new(),
            passages,
        }
    }

    /// Rebuild a document from an explicit passage list, checking that the
    /// title/abstract passages sit at the front in order.
    pub fn from_passages(
        doc_id: impl Into<String>,
        pub_date: Option<NaiveDate>,
        categories: BTreeSet<CategoryLabel>,
        passages: Vec<(PassageKind, String)>,
    ) -> Result<Self, CorpusError> {
        let doc_id = doc_id.into();
        let mut title = String::new();
        let mut abstract_text = String::new();
        for (index, (kind, text)) in passages.iter().enumerate() {
            match kind {
                PassageKind::Title => {
                    if index != 0 || !title.is_empty() {
                        return Err(CorpusError::BadPassageOrder(doc_id));
                    }
                    title = text.clone();
                }
                PassageKind::Abstract => {
                    let expected = usize::from(!title.is_empty());
                    if index != expected || !abstract_text.is_empty() {
                        return Err(CorpusError::BadPassageOrder(doc_id));
                    }
                    abstract_text = text.clone();
                }
                _ => {}
            }
        }
        Ok(Document {
            doc_id,
            title,
            abstract_text,
            pub_date,
            categories,
            passages,
        })
    }

    pub fn add_passage(&mut self, kind: PassageKind, text: impl Into<String>) {
        self.passages.push((kind, text.into()));
    }

    /// Title and abstract joined with `sep`, the text that annotation
    /// offsets index into.
    pub fn annotation_text(&self, sep: char) -> String {
        let mut joined = String::with_capacity(self.title.len() + 1 + self.abstract_text.len());
        joined.push_str(&self.title);
        joined.push(sep);
        joined.push_str(&self.abstract_text);
        joined
    }

    /// Passages of the given kinds, with their absolute passage index.
    pub fn passages_of<'a>(
        &'a self,
        kinds: &'a BTreeSet<PassageKind>,
    ) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.passages
            .iter()
            .enumerate()
            .filter(move |(_, (kind, _))| kinds.contains(kind))
            .map(|(index, (_, text))| (index, text.as_str()))
    }
}

/// One tagged entity span.
///
/// Offsets are character offsets into the document's title and abstract
/// joined with a single separator character (see the parser module).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityAnnotation {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub mention: String,
    pub concept_type: String,
    pub concept_id: Option<String>,
}

/// A document collection with its annotations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: BTreeMap<String, Document>,
    annotations: BTreeMap<String, Vec<EntityAnnotation>>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    /// Number of documents.
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn insert_document(&mut self, doc: Document) -> Result<(), CorpusError> {
        if self.documents.contains_key(&doc.doc_id) {
            return Err(CorpusError::DuplicateDocId(doc.doc_id));
        }
        self.documents.insert(doc.doc_id.clone(), doc);
        Ok(())
    }

    /// Attach an annotation to its document. The document must exist.
    pub fn push_annotation(&mut self, ann: EntityAnnotation) -> Result<(), CorpusError> {
        if !self.documents.contains_key(&ann.doc_id) {
            return Err(CorpusError::UnknownDoc(ann.doc_id));
        }
        self.annotations
            .entry(ann.doc_id.clone())
            .or_default()
            .push(ann);
        Ok(())
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.get(doc_id)
    }

    pub fn get_mut(&mut self, doc_id: &str) -> Option<&mut Document> {
        self.documents.get_mut(doc_id)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.documents.contains_key(doc_id)
    }

    /// Documents in ascending `doc_id` order.
    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.documents.keys().map(String::as_str)
    }

    pub fn annotations_for(&self, doc_id: &str) -> &[EntityAnnotation] {
        self.annotations
            .get(doc_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All annotations, grouped by document in ascending `doc_id` order.
    pub fn annotations(&self) -> impl Iterator<Item = &EntityAnnotation> {
        self.annotations.values().flatten()
    }

    pub fn annotation_count(&self) -> usize {
        self.annotations.values().map(Vec::len).sum()
    }

    /// Merge another corpus into this one. Fails on a shared document id.
    pub fn merge(&mut self, other: Corpus) -> Result<(), CorpusError> {
        for (_, doc) in other.documents {
            self.insert_document(doc)?;
        }
        for (doc_id, anns) in other.annotations {
            self.annotations.entry(doc_id).or_default().extend(anns);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("annotation references unknown document `{0}`")]
    UnknownDoc(String),
    #[error("document `{0}`: title/abstract passages out of order")]
    BadPassageOrder(String),
}
