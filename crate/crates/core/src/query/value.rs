//! Comparison and ordering of RDF terms in `FILTER` and `ORDER BY`.
//!
//! Numeric literals compare by value and `xsd:date` literals
//! chronologically. Other literals order by datatype, then lexical form,
//! then language tag. IRIs and blank nodes only support `=` and `!=`.

use std::cmp::Ordering;

use thiserror::Error;

use super::CompareOp;
use crate::rdf::vocab::xsd;
use crate::rdf::{Literal, Term};

/// The operands of a comparison cannot be compared with the given operator.
/// The solution being filtered is dropped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type mismatch in comparison")]
pub struct TypeMismatch;

/// The value of a numeric literal, or `None` for other literals and
/// malformed lexical forms.
pub fn numeric_value(lit: &Literal) -> Option<f64> {
    if !xsd::NUMERIC.contains(&lit.datatype().as_str()) {
        return None;
    }
    let lexical = lit.lexical().trim();
    match lit.datatype().as_str() {
        xsd::DOUBLE | xsd::FLOAT => match lexical {
            "INF" | "+INF" => Some(f64::INFINITY),
            "-INF" => Some(f64::NEG_INFINITY),
            "NaN" => Some(f64::NAN),
            _ => lexical.parse().ok(),
        },
        xsd::INTEGER => {
            let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
                .then(|| lexical.parse().ok())
                .flatten()
        }
        _ => {
            let unsigned = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            let valid = !unsigned.is_empty()
                && unsigned.bytes().all(|b| b.is_ascii_digit() || b == b'.')
                && unsigned.bytes().filter(|&b| b == b'.').count() <= 1
                && unsigned.bytes().any(|b| b.is_ascii_digit());
            valid.then(|| lexical.parse().ok()).flatten()
        }
    }
}

/// `(year, month, day)` of an `xsd:date` literal. A trailing timezone is
/// ignored.
pub fn date_value(lit: &Literal) -> Option<(i64, u32, u32)> {
    if lit.datatype().as_str() != xsd::DATE {
        return None;
    }
    let s = lit.lexical();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let mut parts = body.splitn(3, '-');
    let year: i64 = parts.next().filter(|y| y.len() >= 4)?.parse().ok()?;
    let month: u32 = parts.next().filter(|m| m.len() == 2)?.parse().ok()?;
    let rest = parts.next()?;
    let day: u32 = rest.get(..2)?.parse().ok()?;
    let tz = &rest[2..];
    let tz_ok = tz.is_empty() || tz == "Z" || (tz.len() == 6 && (tz.starts_with('+') || tz.starts_with('-')));
    if !(1..=12).contains(&month) || !(1..=31).contains(&day) || !tz_ok {
        return None;
    }
    Some((if negative { -year } else { year }, month, day))
}

enum Value<'a> {
    Number(f64),
    Date((i64, u32, u32)),
    Other(&'a Literal),
}

fn literal_value(lit: &Literal) -> Value<'_> {
    if let Some(n) = numeric_value(lit) {
        Value::Number(n)
    } else if let Some(d) = date_value(lit) {
        Value::Date(d)
    } else {
        Value::Other(lit)
    }
}

fn literal_key(lit: &Literal) -> (&str, &str, Option<&str>) {
    (lit.datatype().as_str(), lit.lexical(), lit.language())
}

/// Evaluates `left op right`. Unbound operands are a type mismatch.
pub fn compare(op: CompareOp, left: Option<&Term>, right: Option<&Term>) -> Result<bool, TypeMismatch> {
    let (Some(left), Some(right)) = (left, right) else {
        return Err(TypeMismatch);
    };
    let equality_only = |equal: bool| match op {
        CompareOp::Eq => Ok(equal),
        CompareOp::Ne => Ok(!equal),
        _ => Err(TypeMismatch),
    };
    let (Term::Literal(a), Term::Literal(b)) = (left, right) else {
        return equality_only(left == right);
    };
    let ordering = match (literal_value(a), literal_value(b)) {
        (Value::Number(x), Value::Number(y)) => match x.partial_cmp(&y) {
            Some(o) => o,
            // NaN compares unequal to everything and is unordered.
            None => return equality_only(false),
        },
        (Value::Date(x), Value::Date(y)) => x.cmp(&y),
        (Value::Number(_), _) | (_, Value::Number(_)) => return equality_only(a == b),
        _ => literal_key(a).cmp(&literal_key(b)),
    };
    Ok(match op {
        CompareOp::Eq => ordering == Ordering::Equal,
        CompareOp::Ne => ordering != Ordering::Equal,
        CompareOp::Lt => ordering == Ordering::Less,
        CompareOp::Le => ordering != Ordering::Greater,
        CompareOp::Gt => ordering == Ordering::Greater,
        CompareOp::Ge => ordering != Ordering::Less,
    })
}

/// Total order used by `ORDER BY`: unbound, then blank nodes, IRIs and
/// literals. Numeric literals sort before dates, which sort before other
/// literals.
pub fn order_terms(left: Option<&Term>, right: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> u8 {
        match t {
            None => 0,
            Some(Term::BlankNode(_)) => 1,
            Some(Term::Iri(_)) => 2,
            Some(Term::Literal(_)) => 3,
        }
    }
    fn literal_rank(v: &Value<'_>) -> u8 {
        match v {
            Value::Number(_) => 0,
            Value::Date(_) => 1,
            Value::Other(_) => 2,
        }
    }
    match (left, right) {
        (Some(Term::BlankNode(a)), Some(Term::BlankNode(b))) => a.label().cmp(b.label()),
        (Some(Term::Iri(a)), Some(Term::Iri(b))) => a.as_str().cmp(b.as_str()),
        (Some(Term::Literal(a)), Some(Term::Literal(b))) => {
            let (va, vb) = (literal_value(a), literal_value(b));
            match (&va, &vb) {
                (Value::Number(x), Value::Number(y)) => x.total_cmp(y),
                (Value::Date(x), Value::Date(y)) => x.cmp(y),
                (Value::Other(x), Value::Other(y)) => {
                    (x.lexical(), x.datatype().as_str(), x.language())
                        .cmp(&(y.lexical(), y.datatype().as_str(), y.language()))
                }
                _ => literal_rank(&va).cmp(&literal_rank(&vb)),
            }
        }
        _ => rank(left).cmp(&rank(right)),
    }
}
