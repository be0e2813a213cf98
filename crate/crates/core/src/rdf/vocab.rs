//! Namespace and term constants for the vocabularies the graph is built from.

pub mod ns {
    pub const OEKG_R: &str = "http://oekg.l3s.uni-hannover.de/resource/";
    pub const OEKG_S: &str = "http://oekg.l3s.uni-hannover.de/schema/";
    pub const OEKG_G: &str = "http://oekg.l3s.uni-hannover.de/graph/";
    pub const UNER: &str = "http://oekg.l3s.uni-hannover.de/uner/";
    pub const SO: &str = "http://schema.org/";
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const SEM: &str = "http://semanticweb.cs.vu.nl/2009/11/sem/";
    pub const ONYX: &str = "http://www.gsi.dit.upm.es/ontologies/onyx/ns#";
    pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const DBR: &str = "http://dbpedia.org/resource/";
    pub const DBO: &str = "http://dbpedia.org/ontology/";
}

macro_rules! terms {
    ($ns:expr; $($name:ident = $local:literal),* $(,)?) => {
        $(pub const $name: &str = concat!($ns, $local);)*
    };
}

pub mod rdf {
    terms!("http://www.w3.org/1999/02/22-rdf-syntax-ns#";
        TYPE = "type",
        PROPERTY = "Property",
        LANG_STRING = "langString",
    );
}

pub mod rdfs {
    terms!("http://www.w3.org/2000/01/rdf-schema#";
        CLASS = "Class",
        SUB_CLASS_OF = "subClassOf",
        DOMAIN = "domain",
        RANGE = "range",
        LABEL = "label",
        DATATYPE = "Datatype",
    );
}

pub mod owl {
    terms!("http://www.w3.org/2002/07/owl#";
        CLASS = "Class",
        SAME_AS = "sameAs",
        OBJECT_PROPERTY = "ObjectProperty",
        DATATYPE_PROPERTY = "DatatypeProperty",
        // Not an OWL term, but the schema figure labels subclass edges this way.
        SUB_CLASS_OF = "subClassOf",
    );
}

pub mod xsd {
    terms!("http://www.w3.org/2001/XMLSchema#";
        STRING = "string",
        BOOLEAN = "boolean",
        INTEGER = "integer",
        DECIMAL = "decimal",
        DOUBLE = "double",
        FLOAT = "float",
        DATE = "date",
        LANGUAGE = "language",
        TOKEN = "token",
    );

    /// Datatypes whose lexical forms are interpreted as numbers.
    pub const NUMERIC: &[&str] = &[
        INTEGER,
        DECIMAL,
        DOUBLE,
        FLOAT,
        concat!("http://www.w3.org/2001/XMLSchema#", "int"),
        concat!("http://www.w3.org/2001/XMLSchema#", "long"),
        concat!("http://www.w3.org/2001/XMLSchema#", "short"),
        concat!("http://www.w3.org/2001/XMLSchema#", "byte"),
        concat!("http://www.w3.org/2001/XMLSchema#", "nonNegativeInteger"),
        concat!("http://www.w3.org/2001/XMLSchema#", "positiveInteger"),
        concat!("http://www.w3.org/2001/XMLSchema#", "negativeInteger"),
        concat!("http://www.w3.org/2001/XMLSchema#", "nonPositiveInteger"),
        concat!("http://www.w3.org/2001/XMLSchema#", "unsignedInt"),
        concat!("http://www.w3.org/2001/XMLSchema#", "unsignedLong"),
    ];
}

pub mod skos {
    terms!("http://www.w3.org/2004/02/skos/core#";
        PREF_LABEL = "prefLabel",
        EXACT_MATCH = "exactMatch",
        CLOSE_MATCH = "closeMatch",
        BROAD_MATCH = "broadMatch",
        NARROW_MATCH = "narrowMatch",
    );
}

pub mod so {
    terms!("http://schema.org/";
        ARTICLE = "Article",
        QUESTION = "Question",
        ANSWER = "Answer",
        HEADLINE = "headline",
        MENTIONS = "mentions",
        MAIN_ENTITY = "mainEntity",
        TEXT = "text",
        SUGGESTED_ANSWER = "suggestedAnswer",
        IMAGE = "image",
        DESCRIPTION = "description",
    );
}

pub mod sem {
    terms!("http://semanticweb.cs.vu.nl/2009/11/sem/";
        EVENT = "Event",
        ACTOR = "Actor",
        PLACE = "Place",
        HAS_PLACE = "hasPlace",
        HAS_BEGIN_TIME_STAMP = "hasBeginTimeStamp",
        HAS_END_TIME_STAMP = "hasEndTimeStamp",
    );
}

pub mod onyx {
    terms!("http://www.gsi.dit.upm.es/ontologies/onyx/ns#";
        EMOTION_SET = "EmotionSet",
        EMOTION = "Emotion",
        EMOTION_CATEGORY = "EmotionCategory",
        HAS_EMOTION_SET = "hasEmotionSet",
        HAS_EMOTION = "hasEmotion",
        HAS_EMOTION_CATEGORY = "hasEmotionCategory",
        HAS_EMOTION_INTENSITY = "hasEmotionIntensity",
    );
}

pub mod oekg {
    terms!("http://oekg.l3s.uni-hannover.de/schema/";
        TEXT_EVENT = "TextEvent",
        EVENT_SERIES = "EventSeries",
        EVENT_SERIES_EDITION = "EventSeriesEdition",
        RELATION = "Relation",
        LANGUAGE_SPECIFIC_RELATION = "LanguageSpecificRelation",
        LANGUAGE_SPECIFIC_RELATION_SCORE = "LanguageSpecificRelationScore",
        SOURCE = "source",
        TARGET = "target",
        HAS_LANGUAGE_SPECIFIC_RELATION_SCORE = "hasLanguageSpecificRelationScore",
        SCORE_VALUE = "scoreValue",
        SCORE_LANGUAGE = "scoreLanguage",
        POSITIVE_EMOTION = "positive-emotion",
        NEGATIVE_EMOTION = "negative-emotion",
    );
}
