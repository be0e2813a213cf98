use serde::Deserialize;

use super::{annotate_mentions, generated, require_schema, score_sentiment, Batch, Gazetteer, IngestError, Lexicon, RecordFault};
use crate::linker::{LinkRegistry, ResourceId};
use crate::rdf::vocab::{oekg, onyx, rdf, so, xsd};
use crate::rdf::{iri, Iri, Literal, Triple};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct NewsArticleDoc {
    /// Becomes the article's `oekg-r:` local name.
    #[serde(rename = "id")]
    pub source_id: String,
    pub headline: String,
    #[serde(default)]
    pub body: String,
    pub language: String,
}

const PROPERTIES: &[&str] = &[
    rdf::TYPE,
    so::HEADLINE,
    so::MENTIONS,
    onyx::HAS_EMOTION_SET,
    onyx::HAS_EMOTION,
    onyx::HAS_EMOTION_CATEGORY,
    onyx::HAS_EMOTION_INTENSITY,
];

/// Articles with their headline, mentioned entities and headline emotions.
///
/// Per article: `rdf:type so:Article`, a language-tagged `so:headline`, one
/// `so:mentions` per distinct gazetteer target in headline and body, and an
/// `onyx:EmotionSet` holding a positive and a negative `onyx:Emotion` with
/// integer intensities.
pub fn news_articles(
    docs: &[NewsArticleDoc],
    registry: &mut LinkRegistry,
    gazetteer: &Gazetteer,
    lexicon: &Lexicon,
    schema: &SchemaRegistry,
    graph: &NamedGraphId,
) -> Result<Batch, IngestError> {
    require_schema(schema, PROPERTIES)?;
    let mut batch = Batch::new(graph);
    for (n, doc) in docs.iter().enumerate() {
        batch.report.records += 1;
        match article(doc, registry, gazetteer, lexicon) {
            Ok((triples, linked)) => {
                batch.report.cells_linked += linked;
                batch.emit(triples);
            }
            Err(fault) => batch.fail(n + 1, fault),
        }
    }
    Ok(batch)
}

fn article(
    doc: &NewsArticleDoc,
    registry: &mut LinkRegistry,
    gazetteer: &Gazetteer,
    lexicon: &Lexicon,
) -> Result<(Vec<Triple>, usize), RecordFault> {
    if doc.headline.trim().is_empty() {
        return Err(RecordFault::Invalid("empty headline".into()));
    }
    let headline = Literal::lang(doc.headline.as_str(), &doc.language)
        .map_err(|e| RecordFault::Invalid(e.to_string()))?;
    let a = generated(registry, &doc.source_id)?;
    let a_iri = a.iri();
    let mut out = vec![
        Triple::new(a_iri.clone(), iri(rdf::TYPE), iri(so::ARTICLE)),
        Triple::new(a_iri.clone(), iri(so::HEADLINE), headline),
    ];

    let mut targets: Vec<ResourceId> = Vec::new();
    for text in [&doc.headline, &doc.body] {
        for m in annotate_mentions(text, gazetteer) {
            if !targets.contains(&m.target) {
                targets.push(m.target);
            }
        }
    }
    let linked = targets.len();
    out.extend(targets.iter().map(|t| Triple::new(a_iri.clone(), iri(so::MENTIONS), t.iri())));

    let emotion = score_sentiment(&doc.headline, lexicon);
    let set = generated(registry, &format!("{}_es", doc.source_id))?.iri();
    out.push(Triple::new(a_iri, iri(onyx::HAS_EMOTION_SET), set.clone()));
    out.push(Triple::new(set.clone(), iri(rdf::TYPE), iri(onyx::EMOTION_SET)));
    for (suffix, category, strength) in [
        ("pos", oekg::POSITIVE_EMOTION, emotion.positive),
        ("neg", oekg::NEGATIVE_EMOTION, emotion.negative),
    ] {
        let e: Iri = generated(registry, &format!("{}_es_{suffix}", doc.source_id))?.iri();
        out.push(Triple::new(set.clone(), iri(onyx::HAS_EMOTION), e.clone()));
        out.push(Triple::new(e.clone(), iri(rdf::TYPE), iri(onyx::EMOTION)));
        out.push(Triple::new(e.clone(), iri(onyx::HAS_EMOTION_CATEGORY), iri(category)));
        out.push(Triple::new(
            e,
            iri(onyx::HAS_EMOTION_INTENSITY),
            Literal::typed(strength.to_string(), iri(xsd::INTEGER)),
        ));
    }
    Ok((out, linked))
}
