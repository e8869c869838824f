//! Shared reader/writer for the line-oriented "TAG dim nnz extra" triple files.

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) struct TripleHeader {
    pub dim: usize,
    pub extra: String,
}

pub(crate) fn write_triples<W: Write, V: std::fmt::Display>(
    mut out: W,
    tag: &str,
    dim: usize,
    extra: &str,
    entries: &[(usize, usize, V)],
) -> Result<()> {
    writeln!(out, "{tag} {dim} {} {extra}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v}")?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn read_triples<R: BufRead, V: FromStr>(
    reader: R,
    tag: &str,
) -> Result<(TripleHeader, Vec<(usize, usize, V)>)> {
    let mut lines = reader.lines();
    let header_line = lines.next().ok_or_else(|| Error::parse(1, format!("missing {tag} header")))??;
    let fields: Vec<&str> = header_line.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != tag {
        return Err(Error::parse(1, format!("expected header \"{tag} <dim> <nnz> <param>\", got {header_line:?}")));
    }
    let dim = parse_field::<usize>(fields[1], 1, "dim")?;
    let nnz = parse_field::<usize>(fields[2], 1, "nnz")?;
    let header = TripleHeader { dim, extra: fields[3].to_string() };

    let mut entries = Vec::with_capacity(nnz);
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(lineno, "expected \"i j value\""));
        };
        let i = parse_field::<usize>(i, lineno, "row index")?;
        let j = parse_field::<usize>(j, lineno, "column index")?;
        if i >= dim || j >= dim {
            return Err(Error::parse(lineno, format!("index out of range for dim {dim}")));
        }
        let v = parse_field::<V>(v, lineno, "value")?;
        entries.push((i, j, v));
    }
    if entries.len() != nnz {
        return Err(Error::parse(
            entries.len() + 1,
            format!("header declares {nnz} entries but file has {}", entries.len()),
        ));
    }
    Ok((header, entries))
}

pub(crate) fn parse_field<V: FromStr>(s: &str, line: usize, what: &str) -> Result<V> {
    s.parse::<V>().map_err(|_| Error::parse(line, format!("invalid {what}: {s:?}")))
}
