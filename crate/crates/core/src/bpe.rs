//! Byte-pair-encoding subwords.
//!
//! Merges are learned from a word-frequency table (pair counts are weighted by
//! word frequency) and replayed in learning order at application time. Every
//! subword except the last one of a word carries a trailing continuation marker,
//! `"sand@@ wi@@ ch"` for `sandwich`.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use thiserror::Error;

use crate::corpus::{Corpus, Sentence, Token};

pub const DEFAULT_MARKER: &str = "@@";
pub const DEFAULT_MERGES: usize = 8000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BpeError {
    #[error("cannot learn merges from an empty corpus")]
    EmptyCorpus,
    #[error("duplicate merge ({0:?}, {1:?})")]
    DuplicateMerge(String, String),
    #[error("invalid merge symbol {0:?}")]
    BadSymbol(String),
    #[error("sentence ends inside a subword chain ({0:?})")]
    DanglingMarker(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    marker: String,
    ranks: BTreeMap<String, BTreeMap<String, usize>>,
}

impl Default for MergeTable {
    fn default() -> Self {
        MergeTable {
            merges: Vec::new(),
            marker: DEFAULT_MARKER.to_string(),
            ranks: BTreeMap::new(),
        }
    }
}

impl MergeTable {
    pub fn from_merges(
        merges: Vec<(String, String)>,
        marker: impl Into<String>,
    ) -> Result<Self, BpeError> {
        let mut table = MergeTable {
            merges: Vec::with_capacity(merges.len()),
            marker: marker.into(),
            ranks: BTreeMap::new(),
        };
        for (left, right) in merges {
            for sym in [&left, &right] {
                if Token::new(sym.as_str()).is_err() {
                    return Err(BpeError::BadSymbol(sym.clone()));
                }
            }
            table.push(left, right)?;
        }
        Ok(table)
    }

    fn push(&mut self, left: String, right: String) -> Result<(), BpeError> {
        let rank = self.merges.len();
        let slot = self.ranks.entry(left.clone()).or_default();
        if slot.contains_key(&right) {
            return Err(BpeError::DuplicateMerge(left, right));
        }
        slot.insert(right.clone(), rank);
        self.merges.push((left, right));
        Ok(())
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// The first `n` merges as a table of their own.
    pub fn prefix(&self, n: usize) -> MergeTable {
        let mut table = MergeTable {
            merges: Vec::new(),
            marker: self.marker.clone(),
            ranks: BTreeMap::new(),
        };
        for (l, r) in self.merges.iter().take(n) {
            // Entries of a valid table are unique, so this cannot fail.
            let _ = table.push(l.clone(), r.clone());
        }
        table
    }

    fn rank(&self, left: &str, right: &str) -> Option<usize> {
        self.ranks.get(left)?.get(right).copied()
    }

    /// Segments one word without markers.
    pub fn segment_word(&self, word: &str) -> Vec<String> {
        let mut symbols: Vec<String> = word.chars().map(|c| c.to_string()).collect();
        let mut last: Option<usize> = None;
        loop {
            // Replaying merges in table order is equivalent to repeatedly taking
            // the lowest-ranked adjacent pair whose rank is past the last merge applied.
            let next = symbols
                .windows(2)
                .filter_map(|w| self.rank(&w[0], &w[1]))
                .filter(|&r| last.is_none_or(|l| r > l))
                .min();
            let Some(rank) = next else { break };
            let (left, right) = &self.merges[rank];
            let mut merged = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() && symbols[i] == *left && symbols[i + 1] == *right {
                    let mut joined = symbols[i].clone();
                    joined.push_str(&symbols[i + 1]);
                    merged.push(joined);
                    i += 2;
                } else {
                    merged.push(core::mem::take(&mut symbols[i]));
                    i += 1;
                }
            }
            symbols = merged;
            last = Some(rank);
        }
        symbols
    }

    /// Appends the marked segmentation of `word` to `out`.
    pub fn apply_word(&self, word: &str, out: &mut Vec<Token>) {
        let segments = self.segment_word(word);
        let last = segments.len().saturating_sub(1);
        for (i, mut seg) in segments.into_iter().enumerate() {
            if i < last {
                seg.push_str(&self.marker);
            }
            out.push(Token::new(seg).expect("segments of a token are non-empty and whitespace-free"));
        }
    }
}

/// A sentence of subword tokens with continuation markers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubwordSentence(Sentence);

impl SubwordSentence {
    pub fn new(tokens: Sentence) -> Self {
        SubwordSentence(tokens)
    }

    pub fn tokens(&self) -> &[Token] {
        self.0.tokens()
    }

    pub fn as_sentence(&self) -> &Sentence {
        &self.0
    }

    pub fn into_sentence(self) -> Sentence {
        self.0
    }
}

pub fn apply_bpe(sentence: &Sentence, table: &MergeTable) -> SubwordSentence {
    let mut out = Vec::with_capacity(sentence.len() * 2);
    for word in sentence {
        table.apply_word(word.as_str(), &mut out);
    }
    SubwordSentence(Sentence::new(out))
}

/// Joins marker chains back into words.
pub fn decode_bpe(subwords: &SubwordSentence, marker: &str) -> Result<Sentence, BpeError> {
    let mut words = Vec::new();
    let mut pending = String::new();
    for token in subwords.tokens() {
        let text = token.as_str();
        match text.strip_suffix(marker) {
            Some(stem) if !stem.is_empty() => pending.push_str(stem),
            _ => {
                pending.push_str(text);
                words.push(Token::new(core::mem::take(&mut pending)).expect("non-empty"));
            }
        }
    }
    if !pending.is_empty() {
        return Err(BpeError::DanglingMarker(pending));
    }
    Ok(Sentence::new(words))
}

/// Learns up to `num_merges` merges from the target side of `corpus`.
pub fn learn_bpe(corpus: &Corpus, num_merges: usize) -> Result<MergeTable, BpeError> {
    if corpus.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for sentence in corpus.targets() {
        for token in sentence {
            *freq.entry(token.as_str()).or_default() += 1;
        }
    }
    Ok(learn_from_frequencies(
        freq.into_iter(),
        num_merges,
        DEFAULT_MARKER,
    ))
}

type Pair = (u32, u32);

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    key: Reverse<(String, String)>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count, &self.key).cmp(&(other.count, &other.key))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Learner {
    symbols: Vec<String>,
    ids: BTreeMap<String, u32>,
    words: Vec<(Vec<u32>, u64)>,
    counts: BTreeMap<Pair, u64>,
    occurs: BTreeMap<Pair, BTreeSet<usize>>,
    heap: BinaryHeap<Candidate>,
}

impl Learner {
    fn intern(&mut self, symbol: &str) -> u32 {
        if let Some(&id) = self.ids.get(symbol) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(symbol.to_string());
        self.ids.insert(symbol.to_string(), id);
        id
    }

    fn candidate(&self, pair: Pair, count: u64) -> Candidate {
        Candidate {
            count,
            key: Reverse((
                self.symbols[pair.0 as usize].clone(),
                self.symbols[pair.1 as usize].clone(),
            )),
            pair,
        }
    }

    fn add_word(&mut self, idx: usize, sign: i8, touched: &mut BTreeSet<Pair>) {
        let (ref syms, freq) = self.words[idx];
        for w in syms.windows(2) {
            let pair = (w[0], w[1]);
            let count = self.counts.entry(pair).or_default();
            if sign > 0 {
                *count += freq;
                self.occurs.entry(pair).or_default().insert(idx);
            } else {
                *count -= freq;
                if let Some(set) = self.occurs.get_mut(&pair) {
                    set.remove(&idx);
                }
            }
            touched.insert(pair);
        }
    }
}

/// Learns merges from `(word, frequency)` entries. Ties between equally
/// frequent pairs go to the lexicographically smallest `(left, right)`.
pub fn learn_from_frequencies<'a>(
    words: impl Iterator<Item = (&'a str, u64)>,
    num_merges: usize,
    marker: &str,
) -> MergeTable {
    let mut learner = Learner {
        symbols: Vec::new(),
        ids: BTreeMap::new(),
        words: Vec::new(),
        counts: BTreeMap::new(),
        occurs: BTreeMap::new(),
        heap: BinaryHeap::new(),
    };
    for (word, freq) in words {
        let mut buf = [0u8; 4];
        let syms = word
            .chars()
            .map(|c| learner.intern(c.encode_utf8(&mut buf)))
            .collect();
        learner.words.push((syms, freq));
    }
    let mut touched = BTreeSet::new();
    for idx in 0..learner.words.len() {
        learner.add_word(idx, 1, &mut touched);
    }
    for pair in core::mem::take(&mut touched) {
        let c = learner.candidate(pair, learner.counts[&pair]);
        learner.heap.push(c);
    }

    let mut table = MergeTable {
        merges: Vec::new(),
        marker: marker.to_string(),
        ranks: BTreeMap::new(),
    };
    while table.len() < num_merges {
        let Some(top) = learner.heap.pop() else { break };
        if learner.counts.get(&top.pair).copied() != Some(top.count) {
            continue;
        }
        if top.count < 2 {
            break;
        }
        let (left, right) = top.pair;
        let mut joined = learner.symbols[left as usize].clone();
        joined.push_str(&learner.symbols[right as usize]);
        let new_id = learner.intern(&joined);
        let Reverse((l, r)) = top.key;
        if table.push(l, r).is_err() {
            continue;
        }

        let affected: Vec<usize> = learner
            .occurs
            .get(&top.pair)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for idx in affected {
            learner.add_word(idx, -1, &mut touched);
            let syms = &mut learner.words[idx].0;
            let mut merged = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == left && syms[i + 1] == right {
                    merged.push(new_id);
                    i += 2;
                } else {
                    merged.push(syms[i]);
                    i += 1;
                }
            }
            *syms = merged;
            learner.add_word(idx, 1, &mut touched);
        }
        for pair in core::mem::take(&mut touched) {
            let count = learner.counts.get(&pair).copied().unwrap_or(0);
            if count == 0 {
                learner.counts.remove(&pair);
                learner.occurs.remove(&pair);
            } else {
                let c = learner.candidate(pair, count);
                learner.heap.push(c);
            }
        }
    }
    table
}
