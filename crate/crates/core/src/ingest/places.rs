use serde::Deserialize;

use super::{require_schema, Batch, EntityRef, IngestError, RecordFault};
use crate::linker::LinkRegistry;
use crate::rdf::vocab::so;
use crate::rdf::{iri, Iri, Literal, Triple};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PlaceDescription {
    pub language: String,
    pub text: String,
}

/// Images and descriptions of a place that is already linked.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PlaceDoc {
    pub place: EntityRef,
    #[serde(default)]
    pub images: Vec<String>,
    #[serde(default)]
    pub descriptions: Vec<PlaceDescription>,
}

const PROPERTIES: &[&str] = &[so::IMAGE, so::DESCRIPTION];

/// One `so:image` per image IRI and one language-tagged `so:description`
/// per description.
pub fn places(
    docs: &[PlaceDoc],
    registry: &LinkRegistry,
    schema: &SchemaRegistry,
    graph: &NamedGraphId,
) -> Result<Batch, IngestError> {
    require_schema(schema, PROPERTIES)?;
    let mut batch = Batch::new(graph);
    for (n, doc) in docs.iter().enumerate() {
        batch.report.records += 1;
        match place(doc, registry) {
            Ok(triples) => {
                batch.report.cells_linked += 1;
                batch.emit(triples);
            }
            Err(fault) => batch.fail(n + 1, fault),
        }
    }
    Ok(batch)
}

fn place(doc: &PlaceDoc, registry: &LinkRegistry) -> Result<Vec<Triple>, RecordFault> {
    let subject = doc.place.resolve(registry)?.iri();
    let mut out = Vec::with_capacity(doc.images.len() + doc.descriptions.len());
    for image in &doc.images {
        let image = Iri::new(image.as_str()).map_err(|e| RecordFault::Invalid(format!("image: {e}")))?;
        out.push(Triple::new(subject.clone(), iri(so::IMAGE), image));
    }
    for d in &doc.descriptions {
        let text = Literal::lang(d.text.as_str(), &d.language).map_err(|e| RecordFault::Invalid(e.to_string()))?;
        out.push(Triple::new(subject.clone(), iri(so::DESCRIPTION), text));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linker::{ExternalRef, ResourceId};
    use crate::rdf::parse_ntriples;
    use crate::schema::BASE_SCHEMA;
    use crate::store::QuadStore;
    use proptest::prelude::*;

    fn schema() -> SchemaRegistry {
        let mut s = SchemaRegistry::new();
        let (triples, _) = parse_ntriples(BASE_SCHEMA);
        s.upload(&mut QuadStore::new(), &triples, &NamedGraphId::new("schema").unwrap()).unwrap();
        s
    }

    fn registry() -> LinkRegistry {
        let mut reg = LinkRegistry::new();
        reg.register_alias(ExternalRef::label("en", "Ferrara").unwrap(), ResourceId::new("ferrara").unwrap())
            .unwrap();
        reg
    }

    #[test]
    fn ferrara_image() {
        let doc: PlaceDoc = serde_json::from_str(
            r#"{"place":"wikipedia-label:en:Ferrara","images":["https://upload.wikimedia.org/ferrara.jpg"]}"#,
        )
        .unwrap();
        let b = places(&[doc], &registry(), &schema(), &NamedGraphId::new("mlm").unwrap()).unwrap();
        assert_eq!(
            b.triples,
            vec![Triple::new(
                ResourceId::new("ferrara").unwrap().iri(),
                iri(so::IMAGE),
                Iri::new("https://upload.wikimedia.org/ferrara.jpg").unwrap()
            )]
        );
    }

    #[test]
    fn empty_doc_and_unresolved_place() {
        let reg = registry();
        let g = NamedGraphId::new("mlm").unwrap();
        let empty: PlaceDoc = serde_json::from_str(r#"{"place":"oekg-r:ferrara"}"#).unwrap();
        assert!(places(&[empty], &reg, &schema(), &g).unwrap().triples.is_empty());
        let missing: PlaceDoc = serde_json::from_str(r#"{"place":"wikipedia-label:en:Atlantis"}"#).unwrap();
        assert_eq!(places(&[missing], &reg, &schema(), &g).unwrap().report.errors.len(), 1);
    }

    proptest! {
        #[test]
        fn triple_count_is_images_plus_descriptions(images in 0usize..5, descriptions in 0usize..5) {
            let doc = PlaceDoc {
                place: EntityRef::Resource(ResourceId::new("ferrara").unwrap()),
                images: (0..images).map(|i| format!("http://img.example/{i}.jpg")).collect(),
                descriptions: (0..descriptions)
                    .map(|i| PlaceDescription { language: "en".into(), text: format!("d{i}") })
                    .collect(),
            };
            let b = places(&[doc], &registry(), &schema(), &NamedGraphId::new("mlm").unwrap()).unwrap();
            prop_assert_eq!(b.triples.len(), images + descriptions);
        }
    }
}
