//! Tokens, sentences and parallel corpora, plus the line-level grammar of the
//! `plain` and `tsv` interchange formats.
//!
//! A line of the plain format is one sentence; a line of the tsv format is
//! `source<TAB>target`, optionally followed by a third provenance column
//! (`genuine` or `pseudo`). Tokens are separated by runs of space characters.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Placeholder emitted for masked positions. Reserved: seed and genuine
/// corpora must not contain it.
pub const MASK: &str = "\u{27E8}mask\u{27E9}";

const SEPARATORS: [char; 4] = ['\t', '\n', '\r', ' '];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("empty token")]
    EmptyToken,
    #[error("token {0:?} contains whitespace")]
    WhitespaceInToken(String),
    #[error("line {line}: expected `source<TAB>target`, found no tab")]
    MissingTab { line: usize },
    #[error("line {line}: unexpected third column {value:?}")]
    BadProvenance { line: usize, value: String },
    #[error("line {line}: too many tab-separated fields")]
    TooManyFields { line: usize },
    #[error("line {line}: empty target sentence")]
    EmptyTarget { line: usize },
    #[error("line {line}: empty sentence")]
    EmptySentence { line: usize },
    #[error("line {line}: contains the reserved mask token")]
    ReservedToken { line: usize },
    #[error("pair {index}: seed corpora need source == target")]
    NotMonolingual { index: usize },
}

/// A single whitespace-free token.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self, CorpusError> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(CorpusError::EmptyToken);
        }
        if surface.contains(SEPARATORS) {
            return Err(CorpusError::WhitespaceInToken(surface));
        }
        Ok(Token(surface))
    }

    pub fn mask() -> Self {
        Token(MASK.to_string())
    }

    pub fn is_mask(&self) -> bool {
        self.0 == MASK
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// An ordered token sequence. Empty sentences only arise as noising output.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sentence(Vec<Token>);

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence(tokens)
    }

    pub fn empty() -> Self {
        Sentence(Vec::new())
    }

    /// Splits on spaces, tabs, CR and LF. Never fails: every piece is a valid token.
    pub fn parse(text: &str) -> Self {
        Sentence(
            text.split(SEPARATORS)
                .filter(|piece| !piece.is_empty())
                .map(|piece| Token(piece.to_string()))
                .collect(),
        )
    }

    /// Builds a sentence from string pieces, validating each one.
    pub fn from_strs<S: AsRef<str>>(pieces: &[S]) -> Result<Self, CorpusError> {
        pieces
            .iter()
            .map(|p| Token::new(p.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map(Sentence)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Token> {
        self.0.iter()
    }

    pub fn contains_mask(&self) -> bool {
        self.0.iter().any(Token::is_mask)
    }

    /// Number of characters, not counting the separating spaces.
    pub fn char_count(&self) -> usize {
        self.0.iter().map(|t| t.as_str().chars().count()).sum()
    }
}

impl fmt::Debug for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(token.as_str())?;
        }
        Ok(())
    }
}

impl From<Vec<Token>> for Sentence {
    fn from(tokens: Vec<Token>) -> Self {
        Sentence(tokens)
    }
}

impl FromIterator<Token> for Sentence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        Sentence(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Sentence {
    type Item = &'a Token;
    type IntoIter = core::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParallelPair {
    pub source: Sentence,
    pub target: Sentence,
}

impl ParallelPair {
    pub fn new(source: Sentence, target: Sentence) -> Result<Self, CorpusError> {
        if target.is_empty() {
            return Err(CorpusError::EmptyTarget { line: 0 });
        }
        Ok(ParallelPair { source, target })
    }

    /// A seed-corpus pair: the sentence on both sides.
    pub fn monolingual(sentence: Sentence) -> Self {
        ParallelPair {
            source: sentence.clone(),
            target: sentence,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusKind {
    Genuine,
    Pseudo,
    SeedMonolingual,
}

/// Where a pair in a composed corpus came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Genuine,
    Pseudo,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Genuine => "genuine",
            Provenance::Pseudo => "pseudo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "genuine" => Some(Provenance::Genuine),
            "pseudo" => Some(Provenance::Pseudo),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub pairs: Vec<ParallelPair>,
    pub kind: CorpusKind,
}

impl Corpus {
    pub fn new(pairs: Vec<ParallelPair>, kind: CorpusKind) -> Self {
        Corpus { pairs, kind }
    }

    pub fn empty(kind: CorpusKind) -> Self {
        Corpus {
            pairs: Vec::new(),
            kind,
        }
    }

    /// Wraps grammatical sentences as a seed corpus.
    pub fn seed<I: IntoIterator<Item = Sentence>>(sentences: I) -> Self {
        Corpus {
            pairs: sentences.into_iter().map(ParallelPair::monolingual).collect(),
            kind: CorpusKind::SeedMonolingual,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn targets(&self) -> impl Iterator<Item = &Sentence> {
        self.pairs.iter().map(|p| &p.target)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Sentence> {
        self.pairs.iter().map(|p| &p.source)
    }

    /// Checks the seed-corpus invariant (source == target everywhere).
    pub fn check_monolingual(&self) -> Result<(), CorpusError> {
        match self.pairs.iter().position(|p| !p.is_identity()) {
            Some(index) => Err(CorpusError::NotMonolingual { index }),
            None => Ok(()),
        }
    }

    /// Rejects corpora that already contain the mask placeholder. Line numbers
    /// in the error are 1-based.
    pub fn check_reserved(&self) -> Result<(), CorpusError> {
        match self
            .pairs
            .iter()
            .position(|p| p.source.contains_mask() || p.target.contains_mask())
        {
            Some(i) => Err(CorpusError::ReservedToken { line: i + 1 }),
            None => Ok(()),
        }
    }
}

/// Parses one line of the plain format (`line` is the 1-based line number).
pub fn parse_plain_line(text: &str, line: usize) -> Result<ParallelPair, CorpusError> {
    let sentence = Sentence::parse(text);
    if sentence.is_empty() {
        return Err(CorpusError::EmptySentence { line });
    }
    Ok(ParallelPair::monolingual(sentence))
}

/// Parses one line of the tsv format, including the optional provenance column.
pub fn parse_tsv_line(
    text: &str,
    line: usize,
) -> Result<(ParallelPair, Option<Provenance>), CorpusError> {
    let text = text.strip_suffix('\r').unwrap_or(text);
    let fields: Vec<&str> = text.split('\t').collect();
    if fields.len() > 3 {
        return Err(CorpusError::TooManyFields { line });
    }
    let (source, target) = match fields[..] {
        [s, t, ..] => (s, t),
        _ => return Err(CorpusError::MissingTab { line }),
    };
    let provenance = match fields.get(2) {
        None => None,
        Some(&value) => Some(Provenance::parse(value).ok_or_else(|| {
            CorpusError::BadProvenance {
                line,
                value: value.to_string(),
            }
        })?),
    };
    let target = Sentence::parse(target);
    if target.is_empty() {
        return Err(CorpusError::EmptyTarget { line });
    }
    Ok((
        ParallelPair {
            source: Sentence::parse(source),
            target,
        },
        provenance,
    ))
}

/// Renders a pair as a tsv line without the trailing newline.
pub fn render_tsv(pair: &ParallelPair, provenance: Option<Provenance>) -> String {
    let mut out = alloc::format!("{}\t{}", pair.source, pair.target);
    if let Some(p) = provenance {
        out.push('\t');
        out.push_str(p.as_str());
    }
    out
}
