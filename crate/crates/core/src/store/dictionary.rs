use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::rdf::Term;

pub type TermId = u32;

#[derive(Default)]
struct Inner {
    ids: HashMap<Term, TermId>,
    terms: Vec<Term>,
}

/// Append-only term interner shared by every snapshot derived from one store.
///
/// Ids are never reused or removed, so an older snapshot can always resolve
/// the ids it holds; looking up a term added later simply yields an id that
/// none of that snapshot's indexes contain.
#[derive(Clone, Default)]
pub(crate) struct Dictionary(Arc<RwLock<Inner>>);

impl Dictionary {
    pub(crate) fn lookup(&self, term: &Term) -> Option<TermId> {
        self.0.read().ids.get(term).copied()
    }

    pub(crate) fn resolve(&self, id: TermId) -> Term {
        self.0.read().terms[id as usize].clone()
    }

    pub(crate) fn with_terms<R>(&self, f: impl FnOnce(&[Term]) -> R) -> R {
        f(&self.0.read().terms)
    }

    pub(crate) fn interner(&self) -> Interner<'_> {
        Interner(self.0.write())
    }
}

pub(crate) struct Interner<'a>(parking_lot::RwLockWriteGuard<'a, Inner>);

impl Interner<'_> {
    pub(crate) fn intern(&mut self, term: &Term) -> TermId {
        if let Some(&id) = self.0.ids.get(term) {
            return id;
        }
        let id = TermId::try_from(self.0.terms.len()).expect("term dictionary overflow");
        self.0.terms.push(term.clone());
        self.0.ids.insert(term.clone(), id);
        id
    }
}
