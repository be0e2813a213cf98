//! Dataset descriptor files.
//!
//! A descriptor is a `key = value` text file:
//!
//! ```text
//! kind = tabular
//! graph = uner_types
//! source = uner_types.csv
//! key = entity
//! key.link = wikipedia-label en
//! map.type = iri rdf:type
//! map.label = literal rdfs:label @en
//! map.place = link sem:hasPlace wikipedia-label en
//! ```
//!
//! `kind` is one of `tabular`, `news`, `qa`, `place`, `click-relation`.
//! News descriptors also name a `gazetteer` and a `lexicon`. Relative
//! paths resolve against the descriptor's directory. `mode` selects
//! `extend` (default) or `replace` for the upload.

use std::path::{Path, PathBuf};

use super::{
    click_relations, load_gazetteer, load_lexicon, news_articles, parse_jsonl, places, qa_pairs, tabular, Batch,
    IngestError, RecordError,
};
use crate::linker::{LinkRegistry, RefSource};
use crate::rdf::term::is_valid_language;
use crate::rdf::{Iri, PrefixTable};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdapterKind {
    Tabular,
    News,
    Qa,
    Place,
    ClickRelation,
}

impl AdapterKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "tabular" => Self::Tabular,
            "news" => Self::News,
            "qa" => Self::Qa,
            "place" => Self::Place,
            "click-relation" => Self::ClickRelation,
            _ => return None,
        })
    }
}

/// How a cell names an entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyLink {
    /// A Wikipedia label in the given language.
    Label(String),
    Wikidata,
    Dbpedia,
    /// A canonical `oekg-r:` resource, bare or prefixed.
    Resource,
}

impl KeyLink {
    fn parse(words: &[&str]) -> Result<Self, String> {
        match words {
            ["wikipedia-label", lang] => {
                let lang = lang.to_ascii_lowercase();
                if is_valid_language(&lang) {
                    Ok(Self::Label(lang))
                } else {
                    Err(format!("invalid language {lang:?}"))
                }
            }
            ["wikidata-uri"] => Ok(Self::Wikidata),
            ["dbpedia-uri"] => Ok(Self::Dbpedia),
            ["resource"] => Ok(Self::Resource),
            _ => Err(format!(
                "expected 'wikipedia-label <lang>', 'wikidata-uri', 'dbpedia-uri' or 'resource', got {:?}",
                words.join(" ")
            )),
        }
    }

    pub(crate) fn source(&self) -> Option<(RefSource, Option<&str>)> {
        match self {
            Self::Label(lang) => Some((RefSource::WikipediaLabel, Some(lang))),
            Self::Wikidata => Some((RefSource::WikidataUri, None)),
            Self::Dbpedia => Some((RefSource::DbpediaUri, None)),
            Self::Resource => None,
        }
    }
}

/// What a mapped column's cells become.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueKind {
    /// An entity, linked or minted.
    Link(KeyLink),
    /// An IRI, absolute or prefixed.
    Iri,
    /// A literal, optionally language-tagged or typed.
    Literal { language: Option<String>, datatype: Option<Iri> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub column: String,
    pub property: Iri,
    pub value: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabularSpec {
    pub delimiter: u8,
    pub key: String,
    pub key_link: KeyLink,
    pub columns: Vec<ColumnMapping>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetDescriptor {
    pub kind: AdapterKind,
    pub graph: NamedGraphId,
    pub source: PathBuf,
    pub gazetteer: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub tabular: Option<TabularSpec>,
    /// Replace the graph instead of extending it.
    pub replace: bool,
}

impl DatasetDescriptor {
    pub fn load(path: impl AsRef<Path>, prefixes: &PrefixTable) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = read(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), prefixes)
    }

    /// Parses descriptor text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path, prefixes: &PrefixTable) -> Result<Self, IngestError> {
        let mut kind = None;
        let mut graph = None;
        let mut source = None;
        let mut gazetteer = None;
        let mut lexicon = None;
        let mut replace = false;
        let mut delimiter = b',';
        let mut key = None;
        let mut key_link = None;
        let mut columns: Vec<ColumnMapping> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| IngestError::Descriptor { line, message };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (name, value) = trimmed
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected 'key = value'".into()))?;
            let words: Vec<&str> = value.split_whitespace().collect();
            match name {
                "kind" => {
                    kind = Some(AdapterKind::parse(value).ok_or_else(|| err(format!("unknown adapter kind {value:?}")))?)
                }
                "graph" => graph = Some(NamedGraphId::new(value).map_err(|e| err(e.to_string()))?),
                "source" => source = Some(base.join(value)),
                "gazetteer" => gazetteer = Some(base.join(value)),
                "lexicon" => lexicon = Some(base.join(value)),
                "mode" => {
                    replace = match value {
                        "extend" => false,
                        "replace" => true,
                        _ => return Err(err(format!("mode must be 'extend' or 'replace', got {value:?}"))),
                    }
                }
                "delimiter" => {
                    delimiter = match value {
                        "tab" | "\\t" => b'\t',
                        v if v.len() == 1 => v.as_bytes()[0],
                        _ => return Err(err(format!("delimiter must be one character or 'tab', got {value:?}"))),
                    }
                }
                "key" => key = Some(value.to_owned()),
                "key.link" => key_link = Some(KeyLink::parse(&words).map_err(err)?),
                _ => {
                    let Some(column) = name.strip_prefix("map.") else {
                        return Err(err(format!("unknown setting {name:?}")));
                    };
                    if columns.iter().any(|c| c.column == column) {
                        return Err(err(format!("column {column:?} mapped twice")));
                    }
                    columns.push(parse_mapping(column, &words, prefixes).map_err(err)?);
                }
            }
        }

        let missing = |what: &str| IngestError::Descriptor { line: 0, message: format!("missing '{what}'") };
        let kind = kind.ok_or_else(|| missing("kind"))?;
        let tabular = match kind {
            AdapterKind::Tabular => Some(TabularSpec {
                delimiter,
                key: key.ok_or_else(|| missing("key"))?,
                key_link: key_link.ok_or_else(|| missing("key.link"))?,
                columns,
            }),
            _ if !columns.is_empty() || key.is_some() => {
                return Err(IngestError::Descriptor {
                    line: 0,
                    message: "column mappings only apply to tabular descriptors".into(),
                })
            }
            _ => None,
        };
        if kind == AdapterKind::News && (gazetteer.is_none() || lexicon.is_none()) {
            return Err(missing("gazetteer' and 'lexicon"));
        }
        Ok(Self {
            kind,
            graph: graph.ok_or_else(|| missing("graph"))?,
            source: source.ok_or_else(|| missing("source"))?,
            gazetteer,
            lexicon,
            tabular,
            replace,
        })
    }

    /// Reads the sources and runs the adapter. Source records that fail to
    /// parse are reported with their line numbers.
    pub fn run(
        &self,
        registry: &mut LinkRegistry,
        schema: &SchemaRegistry,
        prefixes: &PrefixTable,
    ) -> Result<Batch, IngestError> {
        let text = read(&self.source)?;
        let graph = &self.graph;
        if let Some(spec) = &self.tabular {
            return tabular(&text, spec, registry, schema, prefixes, graph);
        }
        fn renumber<T>(
            text: &str,
            run: impl FnOnce(&[T]) -> Result<Batch, IngestError>,
        ) -> Result<Batch, IngestError>
        where
            T: serde::de::DeserializeOwned,
        {
            let (records, mut errors) = parse_jsonl::<T>(text);
            let (lines, docs): (Vec<usize>, Vec<T>) = records.into_iter().unzip();
            let mut batch = run(&docs)?;
            for e in &mut batch.report.errors {
                e.record = lines[e.record - 1];
            }
            batch.report.records += errors.len();
            errors.append(&mut batch.report.errors);
            errors.sort_by_key(|e: &RecordError| e.record);
            batch.report.errors = errors;
            Ok(batch)
        }
        match self.kind {
            AdapterKind::News => {
                let gazetteer = load_gazetteer(&read(self.gazetteer.as_ref().expect("checked"))?, registry, prefixes)?;
                let lexicon = load_lexicon(&read(self.lexicon.as_ref().expect("checked"))?)?;
                renumber(&text, |docs| news_articles(docs, registry, &gazetteer, &lexicon, schema, graph))
            }
            AdapterKind::Qa => renumber(&text, |docs| qa_pairs(docs, registry, schema, graph)),
            AdapterKind::Place => renumber(&text, |docs| places(docs, registry, schema, graph)),
            AdapterKind::ClickRelation => renumber(&text, |docs| click_relations(docs, registry, schema, graph)),
            AdapterKind::Tabular => unreachable!("tabular descriptors carry a spec"),
        }
    }
}

fn parse_mapping(column: &str, words: &[&str], prefixes: &PrefixTable) -> Result<ColumnMapping, String> {
    let [kind, property, rest @ ..] = words else {
        return Err(format!("map.{column} needs a kind and a property"));
    };
    let property = expand(property, prefixes)?;
    let value = match *kind {
        "link" => ValueKind::Link(KeyLink::parse(rest)?),
        "iri" if rest.is_empty() => ValueKind::Iri,
        "literal" => match rest {
            [] => ValueKind::Literal { language: None, datatype: None },
            [tag] if tag.starts_with('@') => {
                let lang = tag[1..].to_ascii_lowercase();
                if !is_valid_language(&lang) {
                    return Err(format!("invalid language {lang:?}"));
                }
                ValueKind::Literal { language: Some(lang), datatype: None }
            }
            [dt] if dt.starts_with("^^") => {
                ValueKind::Literal { language: None, datatype: Some(expand(&dt[2..], prefixes)?) }
            }
            _ => return Err(format!("literal takes '@lang' or '^^datatype', got {:?}", rest.join(" "))),
        },
        _ => return Err(format!("map.{column}: expected 'link', 'iri' or 'literal', got {:?}", words.join(" "))),
    };
    Ok(ColumnMapping { column: column.to_owned(), property, value })
}

pub(crate) fn expand(text: &str, prefixes: &PrefixTable) -> Result<Iri, String> {
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Iri::new(inner).map_err(|e| e.to_string());
    }
    prefixes.expand_curie(text).or_else(|_| Iri::new(text)).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}
