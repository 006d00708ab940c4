//! Direct token-level noising of grammatical sentences.
//!
//! For each token an action is drawn from a categorical distribution over
//! mask, deletion, insertion and keep. Insertion keeps the token and appends one
//! extra token drawn from a unigram distribution.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, CorpusKind, ParallelPair, Sentence, Token};
use crate::rng::{domain, RandomSource};

/// Fixed keep probability used when the spec is derived from a mask probability.
pub const DERIVED_KEEP: f64 = 0.2;
pub const DEFAULT_MASK: f64 = 0.5;
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("probability {name}={value} outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("noise probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("mask probability {0} outside [0, 0.8]")]
    MaskDomain(f64),
    #[error("unigram table needs a non-empty genuine corpus")]
    EmptyUnigram,
    #[error("cannot parse noise spec {0:?}; expected `mask,del,ins,keep`")]
    BadSpec(alloc::string::String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Mask,
    Delete,
    Insert,
    Keep,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Mask, Action::Delete, Action::Insert, Action::Keep];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Categorical distribution `(mask, deletion, insertion, keep)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub mask: f64,
    pub deletion: f64,
    pub insertion: f64,
    pub keep: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            mask: 0.5,
            deletion: 0.15,
            insertion: 0.15,
            keep: 0.2,
        }
    }
}

impl NoiseSpec {
    pub fn new(mask: f64, deletion: f64, insertion: f64, keep: f64) -> Result<Self, NoiseError> {
        let spec = NoiseSpec {
            mask,
            deletion,
            insertion,
            keep,
        };
        for (name, value) in spec.named() {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::OutOfRange { name, value });
            }
        }
        let sum = mask + deletion + insertion + keep;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(NoiseError::NotNormalized(sum));
        }
        Ok(spec)
    }

    /// Keep fixed at 0.2, deletion and insertion splitting the remainder evenly.
    pub fn derive(mask: f64) -> Result<Self, NoiseError> {
        if !(0.0..=1.0 - DERIVED_KEEP).contains(&mask) {
            return Err(NoiseError::MaskDomain(mask));
        }
        let rest = (1.0 - DERIVED_KEEP - mask) / 2.0;
        // Clamp the tiny negative that float subtraction produces at mask = 0.8.
        let rest = rest.max(0.0);
        NoiseSpec::new(mask, rest, rest, DERIVED_KEEP)
    }

    /// Parses the four-field `mask,del,ins,keep` serialization.
    pub fn parse(text: &str) -> Result<Self, NoiseError> {
        let bad = || NoiseError::BadSpec(text.into());
        let fields: Vec<f64> = text
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match fields[..] {
            [m, d, i, k] => NoiseSpec::new(m, d, i, k),
            _ => Err(bad()),
        }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        [self.mask, self.deletion, self.insertion, self.keep]
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("mask", self.mask),
            ("deletion", self.deletion),
            ("insertion", self.insertion),
            ("keep", self.keep),
        ]
    }

    /// Draws an action by inverting the cumulative distribution.
    pub fn sample(&self, rng: &mut RandomSource) -> Action {
        let u = rng.next_f64();
        let mut acc = 0.0;
        for action in Action::ALL {
            acc += self.probabilities()[action.index()];
            if u < acc {
                return action;
            }
        }
        // Rounding left a sliver above the total: fall back to the last action
        // with non-zero mass.
        Action::ALL
            .into_iter()
            .rev()
            .find(|a| self.probabilities()[a.index()] > 0.0)
            .unwrap_or(Action::Keep)
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.mask, self.deletion, self.insertion, self.keep)
    }
}

/// Token distribution for the insertion action, sampled by binary search over
/// cumulative weights.
#[derive(Clone, Debug, PartialEq)]
pub struct UnigramTable {
    tokens: Vec<Token>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl UnigramTable {
    /// Relative token frequencies over the target side of `genuine`.
    pub fn from_corpus(genuine: &Corpus) -> Result<Self, NoiseError> {
        let mut counts: BTreeMap<&Token, u64> = BTreeMap::new();
        for sentence in genuine.targets() {
            for token in sentence {
                *counts.entry(token).or_default() += 1;
            }
        }
        Self::from_counts(counts.into_iter().map(|(t, c)| (t.clone(), c)))
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (Token, u64)>) -> Result<Self, NoiseError> {
        let (tokens, counts): (Vec<Token>, Vec<u64>) =
            counts.into_iter().filter(|(_, c)| *c > 0).unzip();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(NoiseError::EmptyUnigram);
        }
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let mut running = 0u64;
        let cumulative = counts
            .iter()
            .map(|&c| {
                running += c;
                running as f64 / total as f64
            })
            .collect();
        Ok(UnigramTable {
            tokens,
            probs,
            cumulative,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn probability(&self, token: &Token) -> f64 {
        self.tokens
            .binary_search(token)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Token, f64)> {
        self.tokens.iter().zip(self.probs.iter().copied())
    }

    pub fn sample(&self, rng: &mut RandomSource) -> &Token {
        let u = rng.next_f64();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        &self.tokens[idx.min(self.tokens.len() - 1)]
    }
}

/// Noises one sentence. `trace`, when given, receives the action drawn at each position.
pub fn noise_sentence_traced(
    target: &Sentence,
    spec: &NoiseSpec,
    unigram: &UnigramTable,
    rng: &mut RandomSource,
    mut trace: Option<&mut Vec<Action>>,
) -> Sentence {
    let mut out = Vec::with_capacity(target.len() + target.len() / 4 + 1);
    for token in target {
        let action = spec.sample(rng);
        if let Some(t) = trace.as_deref_mut() {
            t.push(action);
        }
        match action {
            Action::Keep => out.push(token.clone()),
            Action::Mask => out.push(Token::mask()),
            Action::Delete => {}
            Action::Insert => {
                out.push(token.clone());
                out.push(unigram.sample(rng).clone());
            }
        }
    }
    Sentence::new(out)
}

pub fn direct_noise_sentence(
    target: &Sentence,
    spec: &NoiseSpec,
    unigram: &UnigramTable,
    rng: &mut RandomSource,
) -> Sentence {
    noise_sentence_traced(target, spec, unigram, rng, None)
}

/// The random stream used for sentence `index` of a run seeded with `base_seed`.
pub fn sentence_stream(base_seed: u64, index: usize) -> RandomSource {
    RandomSource::with_domain(base_seed, domain::DIRECT_NOISE, index as u64)
}

/// Builds the pseudo pair for seed sentence `index`.
pub fn noise_pair(
    target: &Sentence,
    index: usize,
    spec: &NoiseSpec,
    unigram: &UnigramTable,
    base_seed: u64,
) -> ParallelPair {
    let mut rng = sentence_stream(base_seed, index);
    ParallelPair {
        source: direct_noise_sentence(target, spec, unigram, &mut rng),
        target: target.clone(),
    }
}

/// One pseudo pair per seed sentence, sequentially. The `pseudo-forge` crate
/// has a parallel driver producing identical output.
pub fn generate_direct_noise_corpus(
    seed_corpus: &Corpus,
    spec: &NoiseSpec,
    unigram: &UnigramTable,
    base_seed: u64,
) -> Result<Corpus, NoiseError> {
    seed_corpus.check_monolingual()?;
    let pairs = seed_corpus
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| noise_pair(&p.target, i, spec, unigram, base_seed))
        .collect();
    Ok(Corpus::new(pairs, CorpusKind::Pseudo))
}
