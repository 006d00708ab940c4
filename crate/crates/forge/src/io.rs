//! Reading and writing corpora in the plain and tsv formats.
//!
//! Both formats are UTF-8 with LF line endings. Invalid UTF-8 is a hard error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pseudo_forge_core::corpus::{self, CorpusError, Provenance};
use pseudo_forge_core::{Corpus, CorpusKind, ParallelPair};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: invalid UTF-8")]
    Utf8 { path: PathBuf, line: usize },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

impl IoError {
    pub fn format(path: &Path, line: usize, message: impl Into<String>) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid(path: &Path, message: impl Into<String>) -> Self {
        IoError::Invalid {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Tsv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!("unknown format '{other}' (expected plain or tsv)")),
        }
    }
}

/// Reads a file as LF-separated lines. A final newline is optional and does
/// not start an extra line.
pub fn read_lines(path: &Path) -> Result<Vec<String>, IoError> {
    let bytes = fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = Vec::new();
    let body = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
    if bytes.is_empty() {
        return Ok(lines);
    }
    for (i, raw) in body.split(|&b| b == b'\n').enumerate() {
        let text = std::str::from_utf8(raw).map_err(|_| IoError::Utf8 {
            path: path.to_path_buf(),
            line: i + 1,
        })?;
        lines.push(text.to_string());
    }
    Ok(lines)
}

fn parse_err(path: &Path) -> impl Fn(CorpusError) -> IoError + '_ {
    move |source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    }
}

/// Plain files become seed-monolingual corpora, tsv files genuine ones.
pub fn read_corpus(path: &Path, format: Format) -> Result<Corpus, IoError> {
    let kind = match format {
        Format::Plain => CorpusKind::SeedMonolingual,
        Format::Tsv => CorpusKind::Genuine,
    };
    read_corpus_as(path, format, kind)
}

pub fn read_corpus_as(path: &Path, format: Format, kind: CorpusKind) -> Result<Corpus, IoError> {
    let pairs = match format {
        Format::Plain => read_lines(path)?
            .iter()
            .enumerate()
            .map(|(i, l)| corpus::parse_plain_line(l, i + 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(parse_err(path))?,
        Format::Tsv => read_tagged(path)?.into_iter().map(|(p, _)| p).collect(),
    };
    Ok(Corpus::new(pairs, kind))
}

/// Tsv pairs with their optional provenance column.
pub fn read_tagged(path: &Path) -> Result<Vec<(ParallelPair, Option<Provenance>)>, IoError> {
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| corpus::parse_tsv_line(l, i + 1))
        .collect::<Result<Vec<_>, _>>()
        .map_err(parse_err(path))
}

/// Plain output writes the target side.
pub fn render_corpus(corpus: &Corpus, format: Format) -> String {
    let mut out = String::new();
    for pair in &corpus.pairs {
        match format {
            Format::Plain => writeln!(out, "{}", pair.target),
            Format::Tsv => writeln!(out, "{}", corpus::render_tsv(pair, None)),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn render_tagged(pairs: &[(ParallelPair, Option<Provenance>)]) -> String {
    let mut out = String::new();
    for (pair, prov) in pairs {
        out.push_str(&corpus::render_tsv(pair, *prov));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_corpus(corpus: &Corpus, path: &Path, format: Format) -> Result<(), IoError> {
    write_text(path, &render_corpus(corpus, format))
}
