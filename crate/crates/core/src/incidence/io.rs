//! Plain-text unital files.
//!
//! ```text
//! unital v=9 k=3
//! 0 1 2
//! # comment
//! ...
//! ```
//!
//! One block per nonempty line, 0-based indices. Output is canonical: points
//! ascending within a block and blocks in lexicographic order.

use super::{Incidence, IncidenceError, Unital, UnitalError, ValidationReport};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{v} points is not of the form q^3 + 1")]
    BadPointCount { v: usize },
    #[error("unital axioms fail")]
    Invalid(Box<ValidationReport>),
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize, ParseError> {
    let token = token.ok_or_else(|| err(line, format!("header is missing {key}=")))?;
    token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(line, format!("expected {key}=<int>, found `{token}`")))
}

pub fn parse_unital_text(text: &str) -> Result<Incidence, ParseError> {
    let mut header = None;
    let mut blocks = Vec::new();
    let mut block_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((v, k)) = header else {
            let mut tokens = content.split_whitespace();
            if tokens.next() != Some("unital") {
                return Err(err(line_no, "expected header `unital v=<int> k=<int>`"));
            }
            let v = header_field(tokens.next(), "v", line_no)?;
            let k = header_field(tokens.next(), "k", line_no)?;
            if let Some(extra) = tokens.next() {
                return Err(err(
                    line_no,
                    format!("unexpected token `{extra}` in header"),
                ));
            }
            header = Some((v, k));
            continue;
        };
        let block = content
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| err(line_no, format!("`{t}` is not a point index")))
            })
            .collect::<Result<Vec<u32>, _>>()?;
        if block.len() != k {
            return Err(err(
                line_no,
                format!("block has {} points, header says k={k}", block.len()),
            ));
        }
        if let Some(&x) = block.iter().find(|&&x| x as usize >= v) {
            return Err(err(line_no, format!("point {x} out of range for v={v}")));
        }
        blocks.push(block);
        block_lines.push(line_no);
    }
    let (v, _) = header.ok_or_else(|| err(1, "missing header"))?;
    Incidence::new(v, blocks).map_err(|e| match e {
        IncidenceError::RepeatedPoint { block, point } => err(
            block_lines[block],
            format!("point {point} repeated in block"),
        ),
        IncidenceError::DuplicateBlock { block } => err(block_lines[block], "duplicate block"),
        other => err(0, other.to_string()),
    })
}

/// Canonical text form of an incidence structure with constant block size.
pub fn unital_text(inc: &Incidence) -> String {
    let k = inc.constant_block_size().unwrap_or(0);
    let mut out = format!("unital v={} k={k}\n", inc.v());
    for b in inc.blocks() {
        let mut first = true;
        for x in b {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_unital(path: impl AsRef<Path>) -> Result<Unital, ReadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ReadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let inc = parse_unital_text(&text)?;
    Unital::new(inc).map_err(|e| match e {
        UnitalError::BadPointCount(v) => ReadError::BadPointCount { v },
        UnitalError::Invalid(report) => ReadError::Invalid(report),
    })
}

pub fn write_unital(u: &Unital, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, unital_text(u.incidence()))
}
