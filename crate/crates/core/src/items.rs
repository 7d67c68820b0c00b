//! Item listings: `id,c1,...,ck` CSV with a header row.

use std::collections::HashSet;
use std::io::Read;

use crate::error::{Error, Result};
use crate::size::SizeTuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub size: SizeTuple,
}

impl Item {
    pub fn new(id: impl Into<String>, size: SizeTuple) -> Self {
        Self { id: id.into(), size }
    }
}

/// Parses an items CSV. Ids must be unique.
pub fn parse_items<R: Read>(reader: R) -> Result<Vec<Item>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut width = None;
    let mut seen = HashSet::new();
    let mut items = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let Some(w) = width else {
            if record.len() < 2 {
                return Err(Error::Parse { line, message: "header needs an id column and components".into() });
            }
            width = Some(record.len());
            continue;
        };
        if record.len() != w {
            return Err(Error::Parse { line, message: format!("expected {w} fields, found {}", record.len()) });
        }
        let id = record[0].to_string();
        let components = record
            .iter()
            .skip(1)
            .map(|f| f.parse::<u64>().map_err(|_| Error::Parse { line, message: format!("invalid component {f:?}") }))
            .collect::<Result<Vec<_>>>()?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        items.push(Item { id, size: SizeTuple::from(components.as_slice()) });
    }
    if width.is_none() {
        return Err(Error::Parse { line: 1, message: "missing header row".into() });
    }
    Ok(items)
}
