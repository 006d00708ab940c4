//! Post-processing of correction candidates: ensemble score averaging,
//! right-to-left re-ranking and sentence-level error-detection gating.

use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::corpus::{Sentence, Token};
use crate::decode::{check_distribution, DecodeError, Next, SequenceScorer};

/// Number of left-to-right models in the default ensemble.
pub const DEFAULT_ENSEMBLE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RerankError {
    #[error("ensemble needs at least one model score")]
    EmptyEnsemble,
    #[error("n-best list has no candidates")]
    EmptyList,
    #[error("expected {expected} right-to-left scores, got {got}")]
    ScoreCount { expected: usize, got: usize },
    #[error(transparent)]
    Scorer(#[from] DecodeError),
}

/// Mean of per-model log-probabilities.
pub fn ensemble_combine(scores: &[f64]) -> Result<f64, RerankError> {
    if scores.is_empty() {
        return Err(RerankError::EmptyEnsemble);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub sentence: Sentence,
    pub l2r_score: f64,
}

/// Candidates for one source sentence, sorted by left-to-right score
/// (descending, stable).
#[derive(Clone, Debug, PartialEq)]
pub struct NBestList {
    source: Sentence,
    candidates: Vec<Candidate>,
}

impl NBestList {
    pub fn new(source: Sentence, mut candidates: Vec<Candidate>) -> Result<Self, RerankError> {
        if candidates.is_empty() {
            return Err(RerankError::EmptyList);
        }
        candidates.sort_by(|a, b| b.l2r_score.total_cmp(&a.l2r_score));
        Ok(NBestList { source, candidates })
    }

    pub fn source(&self) -> &Sentence {
        &self.source
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reranked {
    pub sentence: Sentence,
    pub l2r_score: f64,
    pub r2l_score: f64,
    /// Position in the input list (after its l2r sort).
    pub original_rank: usize,
}

impl Reranked {
    pub fn total(&self) -> f64 {
        self.l2r_score + self.r2l_score
    }
}

/// Log-probability of `tokens` followed by EOS under `scorer`, optionally
/// divided by the token count.
pub fn sequence_log_prob(
    scorer: &(impl SequenceScorer + ?Sized),
    source: &Sentence,
    tokens: &[Token],
    length_normalize: bool,
) -> Result<f64, DecodeError> {
    let mut total = 0.0;
    for i in 0..=tokens.len() {
        let dist = scorer.next_log_probs(source, &tokens[..i])?;
        check_distribution(&dist)?;
        let want = match tokens.get(i) {
            Some(t) => Next::Token(t.clone()),
            None => Next::Eos,
        };
        total += dist
            .iter()
            .find(|(n, _)| *n == want)
            .map(|(_, lp)| *lp)
            .unwrap_or(f64::NEG_INFINITY);
    }
    Ok(if length_normalize {
        total / tokens.len().max(1) as f64
    } else {
        total
    })
}

/// Sorts by `l2r + r2l` descending; ties keep the input order.
pub fn rerank_with_scores(nbest: &NBestList, r2l_scores: &[f64]) -> Result<Vec<Reranked>, RerankError> {
    if r2l_scores.len() != nbest.candidates.len() {
        return Err(RerankError::ScoreCount {
            expected: nbest.candidates.len(),
            got: r2l_scores.len(),
        });
    }
    let mut out: Vec<Reranked> = nbest
        .candidates
        .iter()
        .zip(r2l_scores)
        .enumerate()
        .map(|(rank, (c, &r2l))| Reranked {
            sentence: c.sentence.clone(),
            l2r_score: c.l2r_score,
            r2l_score: r2l,
            original_rank: rank,
        })
        .collect();
    out.sort_by(|a, b| match b.total().total_cmp(&a.total()) {
        Ordering::Equal => a.original_rank.cmp(&b.original_rank),
        other => other,
    });
    Ok(out)
}

/// Scores every candidate right-to-left (token-reversed) with each model,
/// averages across models and re-sorts by the summed score.
pub fn rerank_r2l<S: SequenceScorer + ?Sized>(
    nbest: &NBestList,
    r2l_models: &[&S],
    length_normalize: bool,
) -> Result<Vec<Reranked>, RerankError> {
    if r2l_models.is_empty() {
        return Err(RerankError::EmptyEnsemble);
    }
    let mut scores = Vec::with_capacity(nbest.candidates.len());
    for cand in &nbest.candidates {
        let reversed: Vec<Token> = cand.sentence.tokens().iter().rev().cloned().collect();
        let per_model = r2l_models
            .iter()
            .map(|m| sequence_log_prob(*m, &nbest.source, &reversed, length_normalize))
            .collect::<Result<Vec<_>, _>>()?;
        scores.push(ensemble_combine(&per_model)?);
    }
    rerank_with_scores(nbest, &scores)
}

/// Binary sentence-level error detector.
pub trait ErrorDetector {
    fn has_error(&self, sentence: &Sentence) -> bool;
}

impl<F: Fn(&Sentence) -> bool> ErrorDetector for F {
    fn has_error(&self, sentence: &Sentence) -> bool {
        self(sentence)
    }
}

/// Default detector: flags every sentence, so the gate passes corrections through.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlwaysDetect;

impl ErrorDetector for AlwaysDetect {
    fn has_error(&self, _: &Sentence) -> bool {
        true
    }
}

/// The correction if the detector flags the source, otherwise the source itself.
pub fn sed_gate<'a>(
    detector: &(impl ErrorDetector + ?Sized),
    source: &'a Sentence,
    correction: &'a Sentence,
) -> &'a Sentence {
    if detector.has_error(source) {
        correction
    } else {
        source
    }
}
