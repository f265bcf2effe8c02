//! UCI bag-of-words `docword` files.
//!
//! Three header lines (`D`, `W`, `NNZ`) followed by `NNZ` lines of
//! `docID wordID count`, 1-based, docIDs nondecreasing.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::block::CsrMatrix;
use crate::error::{Error, Result};

/// Word counts, one CSR row per document, 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BowDataset {
    pub n_docs: usize,
    pub vocab: usize,
    pub counts: CsrMatrix,
}

impl BowDataset {
    pub fn nnz(&self) -> usize {
        self.counts.nnz()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_value(
    lines: &mut impl Iterator<Item = (usize, std::io::Result<String>)>,
    name: &str,
) -> Result<usize> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(0, format!("missing header line {name}")))?;
    let line = line.map_err(|e| parse_err(no, e.to_string()))?;
    line.trim().parse().map_err(|_| {
        parse_err(
            no,
            format!("header {name}: expected a count, got '{}'", line.trim()),
        )
    })
}

fn field(no: usize, tok: Option<&str>, name: &str) -> Result<u64> {
    let tok = tok.ok_or_else(|| parse_err(no, format!("missing {name}")))?;
    tok.parse().map_err(|_| {
        parse_err(
            no,
            format!("{name}: expected a nonnegative integer, got '{tok}'"),
        )
    })
}

/// Parses a docword stream. With `doc_limit = Some(m)` only documents `1..=m`
/// are kept and reading stops at the first later document.
pub fn parse_docword<R: BufRead>(reader: R, doc_limit: Option<usize>) -> Result<BowDataset> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let n_docs = header_value(&mut lines, "D")?;
    let vocab = header_value(&mut lines, "W")?;
    let nnz = header_value(&mut lines, "NNZ")?;
    let keep = doc_limit.map_or(n_docs, |m| m.min(n_docs));

    let mut row_len = vec![0usize; keep];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut seen = HashSet::new();
    let mut current_doc = 0usize;
    let mut read = 0usize;
    let mut last_line = 3;
    let mut truncated_by_limit = false;

    for (no, line) in lines.by_ref() {
        let line = line.map_err(|e| parse_err(no, e.to_string()))?;
        last_line = no;
        let mut toks = line.split_whitespace();
        let Some(first) = toks.next() else {
            continue;
        };
        if read == nnz {
            return Err(parse_err(
                no,
                format!("more entries than the declared NNZ = {nnz}"),
            ));
        }
        let doc = field(no, Some(first), "docID")? as usize;
        let word = field(no, toks.next(), "wordID")? as usize;
        let count = field(no, toks.next(), "count")?;
        if toks.next().is_some() {
            return Err(parse_err(no, "expected exactly three fields"));
        }
        if doc == 0 || doc > n_docs {
            return Err(parse_err(no, format!("docID {doc} outside 1..={n_docs}")));
        }
        if word == 0 || word > vocab {
            return Err(parse_err(no, format!("wordID {word} outside 1..={vocab}")));
        }
        if count == 0 {
            return Err(parse_err(no, "count must be positive"));
        }
        if doc < current_doc {
            return Err(parse_err(
                no,
                format!("docID {doc} after {current_doc}: docIDs must be nondecreasing"),
            ));
        }
        if doc != current_doc {
            seen.clear();
            current_doc = doc;
        }
        if !seen.insert(word) {
            return Err(parse_err(
                no,
                format!("duplicate wordID {word} in document {doc}"),
            ));
        }
        read += 1;
        if doc > keep {
            truncated_by_limit = true;
            break;
        }
        row_len[doc - 1] += 1;
        indices.push(word - 1);
        values.push(count as f64);
    }

    if !truncated_by_limit && read < nnz {
        return Err(parse_err(
            last_line + 1,
            format!("expected {nnz} entries, found {read}"),
        ));
    }

    let mut indptr = Vec::with_capacity(keep + 1);
    indptr.push(0);
    for len in &row_len {
        indptr.push(indptr.last().unwrap() + len);
    }
    // Entries arrive grouped by document, so they are already in CSR order.
    let counts = CsrMatrix::new(keep, vocab, indptr, indices, values)?;
    Ok(BowDataset {
        n_docs: keep,
        vocab,
        counts,
    })
}

pub fn read_docword(path: impl AsRef<Path>, doc_limit: Option<usize>) -> Result<BowDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_docword(BufReader::new(file), doc_limit)
}

/// Writes `data` back out in docword format.
pub fn write_docword<W: Write>(mut out: W, data: &BowDataset) -> std::io::Result<()> {
    writeln!(out, "{}", data.n_docs)?;
    writeln!(out, "{}", data.vocab)?;
    writeln!(out, "{}", data.nnz())?;
    for r in 0..data.counts.rows() {
        let (idx, val) = data.counts.row(r);
        for (j, v) in idx.iter().zip(val) {
            writeln!(out, "{} {} {}", r + 1, j + 1, *v as u64)?;
        }
    }
    Ok(())
}
