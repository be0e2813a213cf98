use super::descriptor::{expand, KeyLink, TabularSpec, ValueKind};
use super::{Batch, IngestError, RecordFault};
use crate::linker::{ExternalRef, LinkRegistry, ResourceId};
use crate::rdf::{Literal, PrefixTable, Term, Triple};
use crate::schema::SchemaRegistry;
use crate::store::NamedGraphId;

/// Delimiter-separated rows with a header. Each row's key cell names the
/// subject, linked through the registry or minted when unknown. Every
/// mapped, non-empty cell adds one triple.
pub fn tabular(
    text: &str,
    spec: &TabularSpec,
    registry: &mut LinkRegistry,
    schema: &SchemaRegistry,
    prefixes: &PrefixTable,
    graph: &NamedGraphId,
) -> Result<Batch, IngestError> {
    schema.require_properties(spec.columns.iter().map(|c| &c.property))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::Mapping(format!("unreadable header: {e}")))?
        .clone();
    let position = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::Mapping(format!("column {name:?} is not in the header")))
    };
    let key_col = position(&spec.key)?;
    let mapped: Vec<usize> = spec.columns.iter().map(|c| position(&c.column)).collect::<Result<_, _>>()?;

    let mut batch = Batch::new(graph);
    for (n, record) in reader.records().enumerate() {
        let row_no = n + 1;
        batch.report.records += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                batch.fail(row_no, e);
                continue;
            }
        };
        let cell = |i: usize| record.get(i).map(str::trim).unwrap_or("");
        let key = cell(key_col);
        if key.is_empty() {
            batch.fail(row_no, "empty key cell");
            continue;
        }
        let subject = match link(key, &spec.key_link, registry, &mut batch) {
            Ok(id) => id.iri(),
            Err(fault) => {
                batch.fail(row_no, fault);
                continue;
            }
        };
        let mut triples = Vec::new();
        for (mapping, &col) in spec.columns.iter().zip(&mapped) {
            let value = cell(col);
            if value.is_empty() {
                continue;
            }
            let object: Result<Term, RecordFault> = match &mapping.value {
                ValueKind::Link(how) => link(value, how, registry, &mut batch).map(|id| id.iri().into()),
                ValueKind::Iri => expand(value, prefixes)
                    .map(Term::from)
                    .map_err(|e| RecordFault::Invalid(format!("column {:?}: {e}", mapping.column))),
                ValueKind::Literal { language: Some(lang), .. } => Literal::lang(value, lang)
                    .map(Term::from)
                    .map_err(|e| RecordFault::Invalid(e.to_string())),
                ValueKind::Literal { datatype: Some(dt), .. } => Ok(Literal::typed(value, dt.clone()).into()),
                ValueKind::Literal { .. } => Ok(Literal::string(value).into()),
            };
            match object {
                Ok(o) => triples.push(Triple::new(subject.clone(), mapping.property.clone(), o)),
                Err(fault) => batch.fail(row_no, fault),
            }
        }
        batch.emit(triples);
    }
    Ok(batch)
}

/// Resolves a cell to a resource, minting and registering one when the
/// reference is unknown.
fn link(
    value: &str,
    how: &KeyLink,
    registry: &mut LinkRegistry,
    batch: &mut Batch,
) -> Result<ResourceId, RecordFault> {
    let Some((source, language)) = how.source() else {
        let id = ResourceId::parse(value)?;
        batch.report.cells_linked += 1;
        return Ok(id);
    };
    let value = value.strip_prefix('<').and_then(|v| v.strip_suffix('>')).unwrap_or(value);
    let reference = ExternalRef::new(source, language, value)?;
    let (id, minted, same_as) = registry.resolve_or_mint(&reference);
    if minted {
        batch.report.resources_minted += 1;
    } else {
        batch.report.cells_linked += 1;
    }
    batch.links.extend(same_as);
    Ok(id)
}
