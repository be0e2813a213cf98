use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{generated, require_schema, Batch, EntityRef, IngestError, RecordFault};
use crate::linker::LinkRegistry;
use crate::rdf::vocab::{rdf, so};
use crate::rdf::{iri, Literal, Triple};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

/// A question with its verbalised answer.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct QAPair {
    /// Stem of the question and answer resource names. Derived from the
    /// question text when absent.
    #[serde(default)]
    pub id: Option<String>,
    pub question: String,
    pub answer: String,
    #[serde(default)]
    pub question_entities: Vec<EntityRef>,
    #[serde(default)]
    pub answer_entities: Vec<EntityRef>,
    /// The structured query the pair was generated from. Kept for
    /// provenance; it is not emitted.
    #[serde(default)]
    pub query: Option<String>,
    #[serde(default = "default_language")]
    pub language: String,
}

fn default_language() -> String {
    "en".into()
}

const PROPERTIES: &[&str] = &[rdf::TYPE, so::TEXT, so::MAIN_ENTITY, so::MENTIONS, so::SUGGESTED_ANSWER];

impl QAPair {
    pub fn stem(&self) -> String {
        match &self.id {
            Some(id) => id.clone(),
            None => {
                let digest = Sha256::digest(self.question.as_bytes());
                let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
                format!("qa_{hex}")
            }
        }
    }
}

/// Per pair: a `so:Question` and a `so:Answer` with their texts, linked by
/// `so:suggestedAnswer`; question entities via `so:mainEntity` and answer
/// entities via `so:mentions`.
pub fn qa_pairs(
    pairs: &[QAPair],
    registry: &mut LinkRegistry,
    schema: &SchemaRegistry,
    graph: &NamedGraphId,
) -> Result<Batch, IngestError> {
    require_schema(schema, PROPERTIES)?;
    let mut batch = Batch::new(graph);
    for (n, pair) in pairs.iter().enumerate() {
        batch.report.records += 1;
        match qa_pair(pair, registry) {
            Ok((triples, linked)) => {
                batch.report.cells_linked += linked;
                batch.emit(triples);
            }
            Err(fault) => batch.fail(n + 1, fault),
        }
    }
    Ok(batch)
}

fn qa_pair(pair: &QAPair, registry: &mut LinkRegistry) -> Result<(Vec<Triple>, usize), RecordFault> {
    if pair.question.trim().is_empty() || pair.answer.trim().is_empty() {
        return Err(RecordFault::Invalid("question and answer texts must be non-empty".into()));
    }
    let text = |s: &str| Literal::lang(s, &pair.language).map_err(|e| RecordFault::Invalid(e.to_string()));
    let (question_text, answer_text) = (text(&pair.question)?, text(&pair.answer)?);
    let resolve = |refs: &[EntityRef]| -> Result<Vec<_>, RecordFault> {
        let mut ids = Vec::new();
        for r in refs {
            let id = r.resolve(registry)?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        Ok(ids)
    };
    let (question_entities, answer_entities) = (resolve(&pair.question_entities)?, resolve(&pair.answer_entities)?);
    let stem = pair.stem();
    let q = generated(registry, &format!("{stem}_q"))?.iri();
    let a = generated(registry, &format!("{stem}_a"))?.iri();
    let mut out = vec![
        Triple::new(q.clone(), iri(rdf::TYPE), iri(so::QUESTION)),
        Triple::new(q.clone(), iri(so::TEXT), question_text),
        Triple::new(q.clone(), iri(so::SUGGESTED_ANSWER), a.clone()),
        Triple::new(a.clone(), iri(rdf::TYPE), iri(so::ANSWER)),
        Triple::new(a.clone(), iri(so::TEXT), answer_text),
    ];
    out.extend(question_entities.iter().map(|e| Triple::new(q.clone(), iri(so::MAIN_ENTITY), e.iri())));
    out.extend(answer_entities.iter().map(|e| Triple::new(a.clone(), iri(so::MENTIONS), e.iri())));
    Ok((out, question_entities.len() + answer_entities.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linker::{ExternalRef, ResourceId};
    use crate::rdf::parse_ntriples;
    use crate::schema::BASE_SCHEMA;
    use crate::store::QuadStore;

    fn schema() -> SchemaRegistry {
        let mut s = SchemaRegistry::new();
        let (triples, _) = parse_ntriples(BASE_SCHEMA);
        s.upload(&mut QuadStore::new(), &triples, &NamedGraphId::new("schema").unwrap()).unwrap();
        s
    }

    fn pair(json: &str) -> QAPair {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn wwe_pair() {
        let mut reg = LinkRegistry::new();
        for (label, local) in [("WWE", "wwe"), ("John_Cena", "cena"), ("Dwayne_Johnson", "rock")] {
            reg.register_alias(ExternalRef::label("en", label).unwrap(), ResourceId::new(local).unwrap()).unwrap();
        }
        let p = pair(
            r#"{"id":"vq1","question":"Whose wife is a presenter at WWE?",
                "answer":"The people whose partners are presenters at WWE are John Cena, Dwayne Johnson.",
                "question_entities":["wikipedia-label:en:WWE"],
                "answer_entities":["wikipedia-label:en:John Cena","wikipedia-label:en:Dwayne Johnson"]}"#,
        );
        let b = qa_pairs(&[p], &mut reg, &schema(), &NamedGraphId::new("vquanda").unwrap()).unwrap();
        assert_eq!(b.triples.len(), 8);
        assert_eq!(b.report.cells_linked, 3);
        let q = ResourceId::new("vq1_q").unwrap().iri();
        assert!(b.triples.contains(&Triple::new(q, iri(so::MAIN_ENTITY), ResourceId::new("wwe").unwrap().iri())));
    }

    #[test]
    fn pair_without_entities_has_five_triples() {
        let p = pair(r#"{"question":"Who?","answer":"Nobody."}"#);
        assert!(p.stem().starts_with("qa_"));
        let b = qa_pairs(&[p], &mut LinkRegistry::new(), &schema(), &NamedGraphId::new("qa").unwrap()).unwrap();
        assert_eq!(b.triples.len(), 5);
    }

    #[test]
    fn unresolved_entity_rejects_the_pair() {
        let p = pair(r#"{"question":"Who?","answer":"X.","answer_entities":["wikipedia-label:en:Nobody"]}"#);
        let b = qa_pairs(&[p], &mut LinkRegistry::new(), &schema(), &NamedGraphId::new("qa").unwrap()).unwrap();
        assert!(b.triples.is_empty());
        assert_eq!(b.report.errors.len(), 1);
    }
}
