use serde::Deserialize;

use super::{generated, require_schema, Batch, EntityRef, IngestError, RecordFault};
use crate::linker::LinkRegistry;
use crate::rdf::term::is_valid_language;
use crate::rdf::vocab::{oekg, rdf, xsd};
use crate::rdf::{iri, Literal, Triple};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LanguageScore {
    pub language: String,
    pub score: f64,
}

/// A directed entity relation weighted per language by user clicks.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ClickRelation {
    pub source: EntityRef,
    pub target: EntityRef,
    pub scores: Vec<LanguageScore>,
}

const PROPERTIES: &[&str] = &[
    rdf::TYPE,
    oekg::SOURCE,
    oekg::TARGET,
    oekg::HAS_LANGUAGE_SPECIFIC_RELATION_SCORE,
    oekg::SCORE_VALUE,
    oekg::SCORE_LANGUAGE,
];

/// Per relation: a typed relation resource with `oekg-s:source` and
/// `oekg-s:target`; per language score, a score resource carrying an
/// `xsd:decimal` value and an `xsd:language` tag.
pub fn click_relations(
    relations: &[ClickRelation],
    registry: &mut LinkRegistry,
    schema: &SchemaRegistry,
    graph: &NamedGraphId,
) -> Result<Batch, IngestError> {
    require_schema(schema, PROPERTIES)?;
    let mut batch = Batch::new(graph);
    for (n, rel) in relations.iter().enumerate() {
        batch.report.records += 1;
        match relation(rel, registry) {
            Ok(triples) => {
                batch.report.cells_linked += 2;
                batch.emit(triples);
            }
            Err(fault) => batch.fail(n + 1, fault),
        }
    }
    Ok(batch)
}

fn relation(rel: &ClickRelation, registry: &mut LinkRegistry) -> Result<Vec<Triple>, RecordFault> {
    let mut languages: Vec<String> = Vec::new();
    for s in &rel.scores {
        if !(0.0..=1.0).contains(&s.score) {
            return Err(RecordFault::ScoreOutOfRange { language: s.language.clone(), score: s.score });
        }
        let lang = s.language.to_ascii_lowercase();
        if !is_valid_language(&lang) {
            return Err(RecordFault::Invalid(format!("invalid language tag {:?}", s.language)));
        }
        if languages.contains(&lang) {
            return Err(RecordFault::DuplicateLanguage(lang));
        }
        languages.push(lang);
    }
    let source = rel.source.resolve(registry)?;
    let target = rel.target.resolve(registry)?;
    let stem = format!("rel_{}_{}", source.local(), target.local());
    let r = generated(registry, &stem)?.iri();
    let mut out = vec![
        Triple::new(r.clone(), iri(rdf::TYPE), iri(oekg::LANGUAGE_SPECIFIC_RELATION)),
        Triple::new(r.clone(), iri(oekg::SOURCE), source.iri()),
        Triple::new(r.clone(), iri(oekg::TARGET), target.iri()),
    ];
    for (s, lang) in rel.scores.iter().zip(&languages) {
        let node = generated(registry, &format!("{stem}_{lang}"))?.iri();
        out.push(Triple::new(r.clone(), iri(oekg::HAS_LANGUAGE_SPECIFIC_RELATION_SCORE), node.clone()));
        out.push(Triple::new(
            node.clone(),
            iri(oekg::SCORE_VALUE),
            Literal::typed(s.score.to_string(), iri(xsd::DECIMAL)),
        ));
        out.push(Triple::new(node, iri(oekg::SCORE_LANGUAGE), Literal::typed(lang.as_str(), iri(xsd::LANGUAGE))));
    }
    Ok(out)
}
