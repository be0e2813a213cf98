//! Class and property definitions, the subclass hierarchy, and SKOS
//! alignments between ontologies.
//!
//! The registry is a cache over schema statements that also live in the
//! store as ordinary quads; [`SchemaRegistry::from_store`] rebuilds it from
//! the quads alone.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rdf::vocab::{owl, rdf, rdfs, skos};
use crate::rdf::{iri, Iri, Subject, Term, Triple};
use crate::store::{GraphSelector, NamedGraphId, QuadPattern, QuadStore};

/// Schema shipped with the engine and loaded into the `schema` graph.
pub const BASE_SCHEMA: &str = include_str!("../data/base_schema.nt");
pub const BASE_SCHEMA_GRAPH: &str = "schema";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("subclass cycle: {}", format_cycle(.0))]
    CycleDetected(Vec<Iri>),
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("property {0} is not declared in the schema")]
    UndeclaredProperty(Iri),
}

fn format_cycle(cycle: &[Iri]) -> String {
    cycle.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub iri: Iri,
    pub superclasses: BTreeSet<Iri>,
    pub origin: NamedGraphId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub iri: Iri,
    pub domain: Option<Iri>,
    pub range: Option<Iri>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum AlignmentRelation {
    ExactMatch,
    CloseMatch,
    BroadMatch,
    NarrowMatch,
}

impl AlignmentRelation {
    pub fn from_predicate(predicate: &str) -> Option<Self> {
        match predicate {
            skos::EXACT_MATCH => Some(Self::ExactMatch),
            skos::CLOSE_MATCH => Some(Self::CloseMatch),
            skos::BROAD_MATCH => Some(Self::BroadMatch),
            skos::NARROW_MATCH => Some(Self::NarrowMatch),
            _ => None,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Self::ExactMatch | Self::CloseMatch)
    }

    /// The relation seen from the other side.
    pub fn inverse(self) -> Self {
        match self {
            Self::BroadMatch => Self::NarrowMatch,
            Self::NarrowMatch => Self::BroadMatch,
            r => r,
        }
    }
}

impl fmt::Display for AlignmentRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactMatch => "exactMatch",
            Self::CloseMatch => "closeMatch",
            Self::BroadMatch => "broadMatch",
            Self::NarrowMatch => "narrowMatch",
        })
    }
}

/// One alignment; symmetric relations are stored with `left <= right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alignment {
    pub left: Iri,
    pub right: Iri,
    pub relation: AlignmentRelation,
}

impl Alignment {
    pub fn new(left: Iri, right: Iri, relation: AlignmentRelation) -> Self {
        if relation.is_symmetric() && right < left {
            Self { left: right, right: left, relation }
        } else {
            Self { left, right, relation }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaDelta {
    pub classes: Vec<Iri>,
    pub properties: Vec<Iri>,
    pub alignments: Vec<Alignment>,
    pub subclass_edges: usize,
    pub inserted_quads: usize,
}

impl SchemaDelta {
    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
            && self.properties.is_empty()
            && self.alignments.is_empty()
            && self.subclass_edges == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaRegistry {
    classes: BTreeMap<Iri, ClassDef>,
    properties: BTreeMap<Iri, PropertyDef>,
    alignments: BTreeSet<Alignment>,
}

const CLASS_TYPES: &[&str] = &[rdfs::CLASS, owl::CLASS, rdfs::DATATYPE];
const PROPERTY_TYPES: &[&str] = &[rdf::PROPERTY, owl::OBJECT_PROPERTY, owl::DATATYPE_PROPERTY];
const SCHEMA_PREDICATES: &[&str] = &[
    rdf::TYPE,
    rdfs::SUB_CLASS_OF,
    owl::SUB_CLASS_OF,
    rdfs::DOMAIN,
    rdfs::RANGE,
    skos::EXACT_MATCH,
    skos::CLOSE_MATCH,
    skos::BROAD_MATCH,
    skos::NARROW_MATCH,
];

impl SchemaRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds the registry from schema statements found in any graph.
    pub fn from_store(store: &QuadStore) -> Self {
        let mut registry = Self::new();
        for predicate in SCHEMA_PREDICATES {
            let pattern = QuadPattern {
                predicate: Some(Term::Iri(iri(predicate))),
                graph: GraphSelector::Any,
                ..Default::default()
            };
            for quad in store.matches(&pattern) {
                registry.apply(&quad.triple, &quad.graph);
            }
        }
        registry
    }

    /// Validates and stores a schema document in `graph`. Every triple is
    /// stored; the recognised schema statements also update the registry.
    /// A document that would make the hierarchy cyclic changes nothing.
    pub fn upload(
        &mut self,
        store: &mut QuadStore,
        triples: &[Triple],
        graph: &NamedGraphId,
    ) -> Result<SchemaDelta, SchemaError> {
        let candidate = self.extended(triples, graph)?;
        let delta = self.diff(&candidate);
        let inserted_quads = store.insert_quads(triples, graph);
        *self = candidate;
        Ok(SchemaDelta { inserted_quads, ..delta })
    }

    /// The registry with `triples` applied, after the acyclicity check.
    pub fn extended(&self, triples: &[Triple], graph: &NamedGraphId) -> Result<Self, SchemaError> {
        let mut candidate = self.clone();
        for t in triples {
            candidate.apply(t, graph);
        }
        candidate.check_acyclic()?;
        Ok(candidate)
    }

    fn diff(&self, newer: &Self) -> SchemaDelta {
        let old_edges: usize = self.classes.values().map(|c| c.superclasses.len()).sum();
        let new_edges: usize = newer.classes.values().map(|c| c.superclasses.len()).sum();
        SchemaDelta {
            classes: newer.classes.keys().filter(|k| !self.classes.contains_key(*k)).cloned().collect(),
            properties: newer
                .properties
                .keys()
                .filter(|k| !self.properties.contains_key(*k))
                .cloned()
                .collect(),
            alignments: newer.alignments.difference(&self.alignments).cloned().collect(),
            subclass_edges: new_edges - old_edges,
            inserted_quads: 0,
        }
    }

    fn apply(&mut self, t: &Triple, graph: &NamedGraphId) {
        let Subject::Iri(subject) = &t.subject else {
            return;
        };
        let Term::Iri(object) = &t.object else {
            return;
        };
        match t.predicate.as_str() {
            rdf::TYPE if CLASS_TYPES.contains(&object.as_str()) => {
                self.class_mut(subject, graph);
            }
            rdf::TYPE if PROPERTY_TYPES.contains(&object.as_str()) => {
                self.property_mut(subject);
            }
            rdfs::SUB_CLASS_OF | owl::SUB_CLASS_OF => {
                self.class_mut(object, graph);
                self.class_mut(subject, graph).superclasses.insert(object.clone());
            }
            rdfs::DOMAIN => {
                self.class_mut(object, graph);
                let prop = self.property_mut(subject);
                if prop.domain.as_ref().is_none_or(|d| object < d) {
                    prop.domain = Some(object.clone());
                }
            }
            rdfs::RANGE => {
                self.class_mut(object, graph);
                let prop = self.property_mut(subject);
                if prop.range.as_ref().is_none_or(|r| object < r) {
                    prop.range = Some(object.clone());
                }
            }
            p => {
                if let Some(relation) = AlignmentRelation::from_predicate(p) {
                    self.alignments
                        .insert(Alignment::new(subject.clone(), object.clone(), relation));
                }
            }
        }
    }

    fn class_mut(&mut self, class: &Iri, graph: &NamedGraphId) -> &mut ClassDef {
        self.classes.entry(class.clone()).or_insert_with(|| ClassDef {
            iri: class.clone(),
            superclasses: BTreeSet::new(),
            origin: graph.clone(),
        })
    }

    fn property_mut(&mut self, property: &Iri) -> &mut PropertyDef {
        self.properties.entry(property.clone()).or_insert_with(|| PropertyDef {
            iri: property.clone(),
            domain: None,
            range: None,
        })
    }

    fn check_acyclic(&self) -> Result<(), SchemaError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&Iri, Mark> = BTreeMap::new();
        for start in self.classes.keys() {
            if marks.contains_key(start) {
                continue;
            }
            marks.insert(start, Mark::Active);
            let mut frames = vec![(start, self.supers(start))];
            while let Some((node, supers)) = frames.last_mut() {
                let node = *node;
                let Some(next) = supers.next() else {
                    marks.insert(node, Mark::Done);
                    frames.pop();
                    continue;
                };
                match marks.get(next) {
                    Some(Mark::Active) => {
                        let pos = frames.iter().position(|(c, _)| *c == next).expect("on path");
                        let mut cycle: Vec<Iri> =
                            frames[pos..].iter().map(|(c, _)| (*c).clone()).collect();
                        cycle.push(next.clone());
                        return Err(SchemaError::CycleDetected(cycle));
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Active);
                        frames.push((next, self.supers(next)));
                    }
                }
            }
        }
        Ok(())
    }

    fn supers<'a>(&'a self, class: &Iri) -> std::collections::btree_set::Iter<'a, Iri> {
        static EMPTY: BTreeSet<Iri> = BTreeSet::new();
        self.classes.get(class).map_or(EMPTY.iter(), |c| c.superclasses.iter())
    }

    pub fn class(&self, class: &Iri) -> Option<&ClassDef> {
        self.classes.get(class)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.values()
    }

    pub fn property(&self, property: &Iri) -> Option<&PropertyDef> {
        self.properties.get(property)
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn alignments(&self) -> impl Iterator<Item = &Alignment> {
        self.alignments.iter()
    }

    pub fn is_declared_property(&self, property: &Iri) -> bool {
        self.properties.contains_key(property)
    }

    pub fn require_properties<'a>(
        &self,
        properties: impl IntoIterator<Item = &'a Iri>,
    ) -> Result<(), SchemaError> {
        for p in properties {
            if !self.is_declared_property(p) {
                return Err(SchemaError::UndeclaredProperty(p.clone()));
            }
        }
        Ok(())
    }

    /// Strict ancestors of `class`.
    pub fn subclass_closure(&self, class: &Iri) -> Result<BTreeSet<Iri>, SchemaError> {
        if !self.classes.contains_key(class) {
            return Err(SchemaError::UnknownClass(class.clone()));
        }
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Iri> = self.supers(class).collect();
        while let Some(next) = queue.pop_front() {
            if seen.insert(next.clone()) {
                queue.extend(self.supers(next));
            }
        }
        Ok(seen)
    }

    /// Strict descendants of `class`.
    pub fn subclasses(&self, class: &Iri) -> BTreeSet<Iri> {
        let mut children: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
        for def in self.classes.values() {
            for sup in &def.superclasses {
                children.entry(sup).or_default().push(&def.iri);
            }
        }
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Iri> = children.get(class).into_iter().flatten().copied().collect();
        while let Some(next) = queue.pop_front() {
            if seen.insert(next.clone()) {
                queue.extend(children.get(next).into_iter().flatten().copied());
            }
        }
        seen
    }

    /// Subjects typed `class`, or any subclass of it when `transitive`.
    pub fn instances_of(&self, store: &QuadStore, class: &Iri, transitive: bool) -> BTreeSet<Subject> {
        let mut classes = vec![class.clone()];
        if transitive {
            classes.extend(self.subclasses(class));
        }
        let mut out = BTreeSet::new();
        for c in classes {
            let pattern = QuadPattern {
                predicate: Some(Term::Iri(iri(rdf::TYPE))),
                object: Some(Term::Iri(c)),
                ..Default::default()
            };
            out.extend(store.matches(&pattern).into_iter().map(|q| q.triple.subject));
        }
        out
    }

    /// Every alignment touching `class`, seen from `class`'s side.
    pub fn aligned(&self, class: &Iri) -> BTreeSet<(Iri, AlignmentRelation)> {
        let mut out = BTreeSet::new();
        for a in &self.alignments {
            if &a.left == class {
                out.insert((a.right.clone(), a.relation));
            }
            if &a.right == class {
                out.insert((a.left.clone(), a.relation.inverse()));
            }
        }
        out
    }
}
