//! Backtranslation decoding over a pluggable sequence scorer.
//!
//! [`beam_search_noisy`] is a beam search in which every candidate extension
//! receives an extra `r * beta_random` (with `r ~ U[0, 1)`) on a separate
//! "noisy" score used for pruning. Reported scores and the final ranking use the
//! unperturbed log-probability. With `beta_random = 0` it is plain beam search.
//!
//! [`sample_decode`] draws tokens one by one from the scorer's distribution.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, CorpusKind, ParallelPair, Sentence, Token};
use crate::rng::{domain, RandomSource};

/// Reserved name of the end-of-sequence symbol in toy-scorer files.
pub const EOS: &str = "eos";
pub const DEFAULT_BEAM: usize = 5;
pub const DEFAULT_BETA: f64 = 6.0;
pub const DEFAULT_MAX_LEN: usize = 256;

const NORMALIZATION_TOLERANCE: f64 = 1e-6;
const TABLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("scorer returned an empty distribution")]
    EmptyDistribution,
    #[error("scorer distribution has no end-of-sequence entry")]
    MissingEos,
    #[error("scorer distribution sums to {0}")]
    Unnormalized(f64),
    #[error("scorer returned an invalid log-probability {0}")]
    BadLogProb(f64),
    #[error("distribution for {key} sums to {sum}")]
    TableUnnormalized { key: String, sum: f64 },
    #[error("distribution for {key} has probability {value} outside [0, 1]")]
    TableProbability { key: String, value: f64 },
    #[error("distribution for {key} lists {token:?} twice")]
    TableDuplicate { key: String, token: String },
    #[error("invalid decode parameters: {0}")]
    Params(&'static str),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// A candidate continuation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Next {
    Token(Token),
    Eos,
}

impl Next {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        if text == EOS {
            Ok(Next::Eos)
        } else {
            Token::new(text).map(Next::Token)
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Next::Token(t) => t.as_str(),
            Next::Eos => EOS,
        }
    }
}

/// Log-probabilities of next symbols given a source sentence and an output prefix.
pub trait SequenceScorer {
    fn next_log_probs(&self, source: &Sentence, prefix: &[Token]) -> Result<Vec<(Next, f64)>, DecodeError>;
}

impl<S: SequenceScorer + ?Sized> SequenceScorer for &S {
    fn next_log_probs(&self, source: &Sentence, prefix: &[Token]) -> Result<Vec<(Next, f64)>, DecodeError> {
        (**self).next_log_probs(source, prefix)
    }
}

/// Enforces the scorer contract: non-empty, contains EOS, normalized within 1e-6.
pub fn check_distribution(dist: &[(Next, f64)]) -> Result<(), DecodeError> {
    if dist.is_empty() {
        return Err(DecodeError::EmptyDistribution);
    }
    if !dist.iter().any(|(n, _)| *n == Next::Eos) {
        return Err(DecodeError::MissingEos);
    }
    let mut sum = 0.0;
    for &(_, lp) in dist {
        if lp.is_nan() || lp > NORMALIZATION_TOLERANCE {
            return Err(DecodeError::BadLogProb(lp));
        }
        sum += libm::exp(lp);
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(DecodeError::Unnormalized(sum));
    }
    Ok(())
}

fn scored(
    scorer: &(impl SequenceScorer + ?Sized),
    source: &Sentence,
    prefix: &[Token],
) -> Result<Vec<(Next, f64)>, DecodeError> {
    let dist = scorer.next_log_probs(source, prefix)?;
    check_distribution(&dist)?;
    Ok(dist)
}

/// Source key that matches every source sentence in a [`ToyScorer`].
pub const ANY_SOURCE: &str = "*";

/// A table-driven scorer: explicit distributions keyed by `(source, prefix)`
/// (both space-joined), falling back to `(*, prefix)` and then to a uniform
/// distribution over the vocabulary plus EOS.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyScorer {
    vocab: Vec<Token>,
    table: BTreeMap<(String, String), Vec<(Next, f64)>>,
}

impl ToyScorer {
    pub fn new(vocab: Vec<Token>) -> Self {
        let mut vocab = vocab;
        vocab.sort();
        vocab.dedup();
        ToyScorer {
            vocab,
            table: BTreeMap::new(),
        }
    }

    pub fn vocab(&self) -> &[Token] {
        &self.vocab
    }

    /// Stores a distribution of probabilities (not logs). EOS is added with
    /// probability 0 if missing.
    pub fn insert(
        &mut self,
        source: &str,
        prefix: &str,
        mut dist: Vec<(Next, f64)>,
    ) -> Result<(), DecodeError> {
        let source = Sentence::parse(source).to_string();
        let source = if source.is_empty() { ANY_SOURCE.to_string() } else { source };
        let prefix = Sentence::parse(prefix).to_string();
        let key = alloc::format!("{source:?} ||| {prefix:?}");
        let mut sum = 0.0;
        let mut seen = alloc::collections::BTreeSet::new();
        for (next, p) in &dist {
            if !(0.0..=1.0).contains(p) {
                return Err(DecodeError::TableProbability { key, value: *p });
            }
            if !seen.insert(next.clone()) {
                return Err(DecodeError::TableDuplicate {
                    key,
                    token: next.as_str().to_string(),
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > TABLE_TOLERANCE {
            return Err(DecodeError::TableUnnormalized { key, sum });
        }
        if !seen.contains(&Next::Eos) {
            dist.push((Next::Eos, 0.0));
        }
        for (next, _) in &dist {
            if let Next::Token(t) = next {
                if let Err(at) = self.vocab.binary_search(t) {
                    self.vocab.insert(at, t.clone());
                }
            }
        }
        self.table.insert((source, prefix), dist);
        Ok(())
    }

    /// Stored probabilities for a context, if any (exact source first, then `*`).
    pub fn lookup(&self, source: &str, prefix: &str) -> Option<&[(Next, f64)]> {
        self.table
            .get(&(source.to_string(), prefix.to_string()))
            .or_else(|| self.table.get(&(ANY_SOURCE.to_string(), prefix.to_string())))
            .map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &[(Next, f64)])> {
        self.table
            .iter()
            .map(|((s, p), d)| (s.as_str(), p.as_str(), d.as_slice()))
    }

    fn uniform(&self) -> Vec<(Next, f64)> {
        let lp = -libm::log((self.vocab.len() + 1) as f64);
        self.vocab
            .iter()
            .map(|t| (Next::Token(t.clone()), lp))
            .chain(core::iter::once((Next::Eos, lp)))
            .collect()
    }
}

impl SequenceScorer for ToyScorer {
    fn next_log_probs(&self, source: &Sentence, prefix: &[Token]) -> Result<Vec<(Next, f64)>, DecodeError> {
        let source = source.to_string();
        let prefix = Sentence::new(prefix.to_vec()).to_string();
        Ok(match self.lookup(&source, &prefix) {
            Some(dist) => dist.iter().map(|(n, p)| (n.clone(), libm::log(*p))).collect(),
            None => self.uniform(),
        })
    }
}

/// Fills a toy scorer with random distributions for every prefix of length
/// `< max_len` over `vocab`, for one source (or `*`). Used by tests and demos.
pub fn random_toy_scorer(vocab: &[Token], source: &str, max_len: usize, rng: &mut RandomSource) -> ToyScorer {
    let mut scorer = ToyScorer::new(vocab.to_vec());
    let mut frontier: Vec<Vec<Token>> = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        let mut next_frontier = Vec::new();
        for prefix in frontier {
            let weights: Vec<f64> = (0..=vocab.len()).map(|_| rng.next_f64() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            let mut dist: Vec<(Next, f64)> = vocab
                .iter()
                .zip(&weights)
                .map(|(t, w)| (Next::Token(t.clone()), w / total))
                .collect();
            dist.push((Next::Eos, weights[vocab.len()] / total));
            let prefix_text = Sentence::new(prefix.clone()).to_string();
            scorer
                .insert(source, &prefix_text, dist)
                .expect("weights are normalized by construction");
            for t in vocab {
                let mut p = prefix.clone();
                p.push(t.clone());
                next_frontier.push(p);
            }
        }
        frontier = next_frontier;
    }
    scorer
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeParams {
    pub beam_width: usize,
    pub max_len: usize,
    pub beta_random: f64,
    pub length_normalize: bool,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams {
            beam_width: DEFAULT_BEAM,
            max_len: DEFAULT_MAX_LEN,
            beta_random: DEFAULT_BETA,
            length_normalize: true,
        }
    }
}

impl DecodeParams {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam_width == 0 {
            return Err(DecodeError::Params("beam width must be at least 1"));
        }
        if self.max_len == 0 {
            return Err(DecodeError::Params("max length must be at least 1"));
        }
        if !(self.beta_random >= 0.0 && self.beta_random.is_finite()) {
            return Err(DecodeError::Params("beta_random must be finite and non-negative"));
        }
        Ok(())
    }

    /// Final score of a finished hypothesis: raw log-probability, divided by
    /// the output length (at least 1) when length normalization is on.
    pub fn final_score(&self, raw: f64, len: usize) -> f64 {
        if self.length_normalize {
            raw / len.max(1) as f64
        } else {
            raw
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub tokens: Vec<Token>,
    pub raw_score: f64,
    pub noisy_score: f64,
    pub finished: bool,
}

impl Hypothesis {
    fn root() -> Self {
        Hypothesis {
            tokens: Vec::new(),
            raw_score: 0.0,
            noisy_score: 0.0,
            finished: false,
        }
    }
}

/// One entry of an n-best list.
#[derive(Clone, Debug, PartialEq)]
pub struct Scored {
    pub sentence: Sentence,
    pub score: f64,
}

fn by_desc(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

/// Beam search with per-step score noise. Returns up to `beam_width`
/// finished hypotheses sorted by (length-normalized) raw score, descending.
pub fn beam_search_noisy(
    scorer: &(impl SequenceScorer + ?Sized),
    source: &Sentence,
    params: &DecodeParams,
    rng: &mut RandomSource,
) -> Result<Vec<Scored>, DecodeError> {
    beam_search_observed(scorer, source, params, rng, &mut |_, _| {})
}

/// [`beam_search_noisy`] that reports the surviving open hypotheses after
/// every step (`step` is 1-based).
pub fn beam_search_observed(
    scorer: &(impl SequenceScorer + ?Sized),
    source: &Sentence,
    params: &DecodeParams,
    rng: &mut RandomSource,
    observer: &mut dyn FnMut(usize, &[Hypothesis]),
) -> Result<Vec<Scored>, DecodeError> {
    params.validate()?;
    let width = params.beam_width;
    let pool_key = |h: &Hypothesis| params.final_score(h.noisy_score, h.tokens.len());

    let mut beam = alloc::vec![Hypothesis::root()];
    let mut finished: Vec<Hypothesis> = Vec::new();
    for step in 1..=params.max_len {
        if beam.is_empty() {
            break;
        }
        let mut candidates = Vec::new();
        for hyp in &beam {
            for (next, lp) in scored(scorer, source, &hyp.tokens)? {
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                let lp = lp.min(0.0);
                let noise = if params.beta_random > 0.0 {
                    rng.next_f64() * params.beta_random
                } else {
                    0.0
                };
                let mut tokens = hyp.tokens.clone();
                let done = match next {
                    Next::Eos => true,
                    Next::Token(t) => {
                        tokens.push(t);
                        step == params.max_len
                    }
                };
                candidates.push(Hypothesis {
                    tokens,
                    raw_score: hyp.raw_score + lp,
                    noisy_score: hyp.noisy_score + lp + noise,
                    finished: done,
                });
            }
        }
        candidates.sort_by(|a, b| by_desc(a.noisy_score, b.noisy_score));

        let mut next_beam = Vec::with_capacity(width);
        for cand in candidates {
            if next_beam.len() == width {
                break;
            }
            if cand.finished {
                finished.push(cand);
            } else {
                next_beam.push(cand);
            }
        }
        finished.sort_by(|a, b| by_desc(pool_key(a), pool_key(b)));
        finished.truncate(width);
        observer(step, &next_beam);
        beam = next_beam;
    }

    let mut out: Vec<Scored> = finished
        .into_iter()
        .map(|h| Scored {
            score: params.final_score(h.raw_score, h.tokens.len()),
            sentence: Sentence::new(h.tokens),
        })
        .collect();
    out.sort_by(|a, b| by_desc(a.score, b.score));
    Ok(out)
}

/// Ancestral sampling until EOS or `max_len` tokens.
pub fn sample_decode(
    scorer: &(impl SequenceScorer + ?Sized),
    source: &Sentence,
    max_len: usize,
    rng: &mut RandomSource,
) -> Result<Sentence, DecodeError> {
    let mut tokens = Vec::new();
    while tokens.len() < max_len {
        let dist = scored(scorer, source, &tokens)?;
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut choice = None;
        for (next, lp) in &dist {
            let p = libm::exp(*lp);
            if p <= 0.0 {
                continue;
            }
            acc += p;
            choice = Some(next);
            if u < acc {
                break;
            }
        }
        match choice.cloned() {
            Some(Next::Token(t)) => tokens.push(t),
            Some(Next::Eos) | None => break,
        }
    }
    Ok(Sentence::new(tokens))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Noisy,
    Sample,
}

impl Method {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "noisy" => Some(Method::Noisy),
            "sample" => Some(Method::Sample),
            _ => None,
        }
    }
}

pub fn sentence_stream(base_seed: u64, index: usize) -> RandomSource {
    RandomSource::with_domain(base_seed, domain::BACKTRANSLATE, index as u64)
}

/// Decodes a pseudo source for seed sentence `index`.
pub fn backtranslate_pair(
    target: &Sentence,
    index: usize,
    scorer: &(impl SequenceScorer + ?Sized),
    method: Method,
    params: &DecodeParams,
    base_seed: u64,
) -> Result<ParallelPair, DecodeError> {
    let mut rng = sentence_stream(base_seed, index);
    let source = match method {
        Method::Noisy => beam_search_noisy(scorer, target, params, &mut rng)?
            .into_iter()
            .next()
            .map(|s| s.sentence)
            .unwrap_or_default(),
        Method::Sample => sample_decode(scorer, target, params.max_len, &mut rng)?,
    };
    Ok(ParallelPair {
        source,
        target: target.clone(),
    })
}

pub fn backtranslate_corpus(
    seed_corpus: &Corpus,
    scorer: &(impl SequenceScorer + ?Sized),
    method: Method,
    params: &DecodeParams,
    base_seed: u64,
) -> Result<Corpus, DecodeError> {
    seed_corpus.check_monolingual()?;
    params.validate()?;
    let pairs = seed_corpus
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| backtranslate_pair(&p.target, i, scorer, method, params, base_seed))
        .collect::<Result<_, _>>()?;
    Ok(Corpus::new(pairs, CorpusKind::Pseudo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tok(s: &str) -> Token {
        Token::new(s).unwrap()
    }

    fn next(s: &str) -> Next {
        Next::parse(s).unwrap()
    }

    fn vocab(n: usize) -> Vec<Token> {
        (0..n).map(|i| tok(&alloc::format!("t{i}"))).collect()
    }

    #[test]
    fn stored_distribution_is_returned_exactly() {
        let mut s = ToyScorer::new(vec![tok("a")]);
        s.insert("x", "", vec![(next("a"), 0.7), (Next::Eos, 0.3)]).unwrap();
        let d = s.next_log_probs(&Sentence::parse("x"), &[]).unwrap();
        assert_eq!(d, vec![(next("a"), libm::log(0.7)), (Next::Eos, libm::log(0.3))]);
    }

    #[test]
    fn unnormalized_rows_are_rejected_with_key() {
        let mut s = ToyScorer::new(vec![tok("a")]);
        let err = s.insert("x", "a", vec![(next("a"), 0.6), (Next::Eos, 0.3)]).unwrap_err();
        match err {
            DecodeError::TableUnnormalized { key, .. } => assert!(key.contains("\"x\"") && key.contains("\"a\"")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fallback_is_uniform_over_vocab_and_eos() {
        let s = ToyScorer::new(vec![tok("a"), tok("b"), tok("c")]);
        let d = s.next_log_probs(&Sentence::parse("q"), &[tok("a")]).unwrap();
        assert_eq!(d.len(), 4);
        check_distribution(&d).unwrap();
        assert!(d.iter().all(|(_, lp)| (lp - libm::log(0.25)).abs() < 1e-12));
    }

    #[test]
    fn eos_everywhere_decodes_to_empty() {
        let mut s = ToyScorer::new(vec![tok("a")]);
        s.insert("*", "", vec![(Next::Eos, 1.0)]).unwrap();
        let src = Sentence::parse("anything here");
        let nbest = beam_search_noisy(&s, &src, &DecodeParams::default(), &mut RandomSource::new(0, 0)).unwrap();
        assert!(nbest[0].sentence.is_empty());
        assert!(sample_decode(&s, &src, 10, &mut RandomSource::new(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn contract_violations_surface() {
        struct Broken(Vec<(Next, f64)>);
        impl SequenceScorer for Broken {
            fn next_log_probs(&self, _: &Sentence, _: &[Token]) -> Result<Vec<(Next, f64)>, DecodeError> {
                Ok(self.0.clone())
            }
        }
        let src = Sentence::parse("a");
        let run = |d: Vec<(Next, f64)>| {
            beam_search_noisy(&Broken(d), &src, &DecodeParams::default(), &mut RandomSource::new(0, 0))
        };
        assert_eq!(run(vec![]), Err(DecodeError::EmptyDistribution));
        assert_eq!(run(vec![(next("a"), 0.0)]), Err(DecodeError::MissingEos));
        assert!(matches!(run(vec![(Next::Eos, libm::log(0.5))]), Err(DecodeError::Unnormalized(_))));
    }

    #[test]
    fn one_hot_sampler_ignores_seed() {
        let mut s = ToyScorer::new(vec![tok("a"), tok("b")]);
        s.insert("*", "", vec![(next("b"), 1.0)]).unwrap();
        s.insert("*", "b", vec![(next("a"), 1.0)]).unwrap();
        s.insert("*", "b a", vec![(Next::Eos, 1.0)]).unwrap();
        let src = Sentence::parse("z");
        for seed in 0..20 {
            let out = sample_decode(&s, &src, 10, &mut RandomSource::new(seed, 0)).unwrap();
            assert_eq!(out, Sentence::parse("b a"));
        }
    }

    #[test]
    fn max_len_bounds_sampling() {
        let s = ToyScorer::new(vocab(3));
        for seed in 0..50 {
            let out = sample_decode(&s, &Sentence::parse("x"), 1, &mut RandomSource::new(seed, 0)).unwrap();
            assert!(out.len() <= 1);
        }
    }

    #[test]
    fn first_token_frequencies_match_table() {
        let mut s = ToyScorer::new(vocab(3));
        let dist = vec![(next("t0"), 0.5), (next("t1"), 0.2), (next("t2"), 0.2), (Next::Eos, 0.1)];
        s.insert("*", "", dist.clone()).unwrap();
        let n = 100_000;
        let mut counts = BTreeMap::new();
        for i in 0..n {
            let out = sample_decode(&s, &Sentence::parse("x"), 1, &mut RandomSource::new(3, i)).unwrap();
            let key = out.tokens().first().map(|t| t.to_string()).unwrap_or_else(|| EOS.to_string());
            *counts.entry(key).or_insert(0u32) += 1;
        }
        for (next, p) in dist {
            let freq = counts.get(next.as_str()).copied().unwrap_or(0) as f64 / n as f64;
            assert!((freq - p).abs() < 0.01, "{next:?}: {freq} vs {p}");
        }
    }

    #[test]
    fn nbest_is_sorted_and_deterministic() {
        let v = vocab(4);
        let s = random_toy_scorer(&v, "*", 3, &mut RandomSource::new(1, 1));
        let src = Sentence::parse("x y");
        let params = DecodeParams { max_len: 3, ..DecodeParams::default() };
        let a = beam_search_noisy(&s, &src, &params, &mut RandomSource::new(8, 8)).unwrap();
        let b = beam_search_noisy(&s, &src, &params, &mut RandomSource::new(8, 8)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].score >= w[1].score));
        assert!(a.len() <= params.beam_width);
    }

    #[test]
    fn raw_scores_never_increase_and_noise_is_bounded() {
        let v = vocab(3);
        let s = random_toy_scorer(&v, "*", 4, &mut RandomSource::new(2, 2));
        let params = DecodeParams { max_len: 4, beam_width: 3, ..DecodeParams::default() };
        let mut last: BTreeMap<Vec<Token>, f64> = BTreeMap::new();
        last.insert(Vec::new(), 0.0);
        beam_search_observed(&s, &Sentence::parse("x"), &params, &mut RandomSource::new(4, 0), &mut |step, hyps| {
            for h in hyps {
                let gap = h.noisy_score - h.raw_score;
                assert!(gap >= 0.0 && gap <= step as f64 * params.beta_random);
                let parent = &h.tokens[..h.tokens.len() - 1];
                if let Some(prev) = last.get(parent) {
                    assert!(h.raw_score <= *prev);
                }
            }
            for h in hyps {
                last.insert(h.tokens.clone(), h.raw_score);
            }
        })
        .unwrap();
    }

    #[test]
    fn invalid_params() {
        let s = ToyScorer::new(vocab(1));
        let src = Sentence::parse("x");
        for params in [
            DecodeParams { beam_width: 0, ..DecodeParams::default() },
            DecodeParams { max_len: 0, ..DecodeParams::default() },
            DecodeParams { beta_random: -1.0, ..DecodeParams::default() },
        ] {
            assert!(matches!(
                beam_search_noisy(&s, &src, &params, &mut RandomSource::new(0, 0)),
                Err(DecodeError::Params(_))
            ));
        }
    }

    #[test]
    fn backtranslation_pairs_with_untouched_targets() {
        // One-hot transduction: any source -> "e r r".
        let mut s = ToyScorer::new(vec![tok("e"), tok("r")]);
        s.insert("*", "", vec![(next("e"), 1.0)]).unwrap();
        s.insert("*", "e", vec![(next("r"), 1.0)]).unwrap();
        s.insert("*", "e r", vec![(next("r"), 1.0)]).unwrap();
        s.insert("*", "e r r", vec![(Next::Eos, 1.0)]).unwrap();
        let seed = Corpus::seed((0..500).map(|i| Sentence::parse(&alloc::format!("w{i} v"))));
        let params = DecodeParams { beta_random: 0.0, max_len: 10, ..DecodeParams::default() };
        let out = backtranslate_corpus(&seed, &s, Method::Noisy, &params, 3).unwrap();
        assert_eq!(out.len(), 500);
        assert_eq!(out.kind, CorpusKind::Pseudo);
        for (o, i) in out.pairs.iter().zip(&seed.pairs) {
            assert_eq!(o.target, i.target);
            assert_eq!(o.source, Sentence::parse("e r r"));
        }
        let sampled = backtranslate_corpus(&seed, &s, Method::Sample, &params, 3).unwrap();
        assert_eq!(sampled, out);
    }
}
