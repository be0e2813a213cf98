#![allow(dead_code)]

pub mod oracle;

use oekg_core::rdf::{BlankNode, Iri, Literal, Subject, Term, Triple};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

/// A random string drawn from ASCII, escapes, control characters and
/// multi-byte code points.
pub fn text(rng: &mut StdRng, max: usize) -> String {
    const POOL: &[char] = &[
        'a', 'b', 'Z', '0', ' ', '"', '\\', '\n', '\r', '\t', '\'', '<', '>', '#', '.', '\u{0}', '\u{1}', '\u{7f}',
        '\u{8}', '\u{c}', 'é', 'ß', 'Ж', '中', '\u{2028}', '😀', '\u{10ffff}', '_', ':', '@', '^',
    ];
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *POOL.choose(rng).unwrap()).collect()
}

pub fn random_iri(rng: &mut StdRng) -> Iri {
    const SAFE: &[char] = &['a', 'q', 'Z', '9', '-', '_', '.', '~', '%', '/', '#', '?', '=', '&', 'é', 'Ж', '😀', '(', ')'];
    let n = rng.gen_range(1..12);
    let tail: String = (0..n).map(|_| *SAFE.choose(rng).unwrap()).collect();
    let scheme = ["http://example.org/", "urn:x:", "https://ex.com/a/"].choose(rng).unwrap();
    iri(&format!("{scheme}{tail}"))
}

pub fn random_blank(rng: &mut StdRng) -> BlankNode {
    let head = ['b', 'x', '_', '7'].choose(rng).unwrap();
    let body: String = (0..rng.gen_range(0..6)).map(|_| *['a', '1', '-', '.', '_'].choose(rng).unwrap()).collect();
    let body = body.trim_end_matches('.');
    BlankNode::new(format!("{head}{body}")).unwrap()
}

pub fn random_literal(rng: &mut StdRng) -> Literal {
    let lexical = text(rng, 10);
    match rng.gen_range(0..3) {
        0 => Literal::string(lexical),
        1 => {
            let tag = ["en", "en-GB", "de", "zh-Hant-TW", "x-private", "es-419"].choose(rng).unwrap();
            Literal::lang(lexical, tag).unwrap()
        }
        _ => Literal::typed(lexical, random_iri(rng)),
    }
}

pub fn random_triple(rng: &mut StdRng) -> Triple {
    let subject: Subject = if rng.gen_bool(0.3) { random_blank(rng).into() } else { random_iri(rng).into() };
    let object: Term = match rng.gen_range(0..3) {
        0 => random_iri(rng).into(),
        1 => random_blank(rng).into(),
        _ => random_literal(rng).into(),
    };
    Triple::new(subject, random_iri(rng), object)
}

/// Small vocabularies so random stores and queries share many terms.
pub struct Pool {
    pub subjects: Vec<Subject>,
    pub predicates: Vec<Iri>,
    pub objects: Vec<Term>,
}

impl Pool {
    pub fn new() -> Self {
        let r = |n: &str| iri(&format!("http://example.org/{n}"));
        let subjects: Vec<Subject> = vec![
            r("s0").into(),
            r("s1").into(),
            r("s2").into(),
            r("s3").into(),
            r("s4").into(),
            BlankNode::new("n0").unwrap().into(),
            BlankNode::new("n1").unwrap().into(),
        ];
        let predicates = vec![r("p0"), r("p1"), r("p2")];
        let mut objects: Vec<Term> = vec![r("s0").into(), r("s1").into(), r("s2").into(), r("s3").into()];
        for n in 0..5 {
            objects.push(Literal::typed(n.to_string(), iri(XSD_INTEGER)).into());
        }
        objects.push(Literal::string("a").into());
        objects.push(Literal::string("b").into());
        Self { subjects, predicates, objects }
    }

    pub fn triple(&self, rng: &mut StdRng) -> Triple {
        Triple::new(
            self.subjects.choose(rng).unwrap().clone(),
            self.predicates.choose(rng).unwrap().clone(),
            self.objects.choose(rng).unwrap().clone(),
        )
    }
}
