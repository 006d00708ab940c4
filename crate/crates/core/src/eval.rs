//! Edit-based precision, recall and F-beta.
//!
//! Edits come from a token-level Levenshtein alignment (unit costs), with
//! adjacent non-matching operations merged into one span edit. This is a
//! desk-scale scorer: it does no error typing and no search over edit
//! combinations, so its numbers are not comparable to ERRANT or the M2 scorer.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::{Sentence, Token};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{name} has {got} sentences, expected {expected}")]
    LengthMismatch {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("at least one reference set is required")]
    NoReferences,
    #[error("negative input to f_beta ({0})")]
    Negative(f64),
    #[error("beta must be positive, got {0}")]
    Beta(f64),
}

/// Replace source tokens `start..end` with `replacement`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<Token>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Match,
    Sub,
    Del,
    Ins,
}

/// Minimal-cost alignment. On ties the backtrace prefers the diagonal
/// (match or substitution), then deletion, then insertion; walking back from
/// the end this pushes edits as far left as possible.
fn align(source: &[Token], target: &[Token]) -> Vec<Step> {
    let (n, m) = (source.len(), target.len());
    let width = m + 1;
    let mut cost = alloc::vec![0u32; (n + 1) * width];
    for i in 0..=n {
        for j in 0..=m {
            cost[i * width + j] = if i == 0 {
                j as u32
            } else if j == 0 {
                i as u32
            } else {
                let diag = cost[(i - 1) * width + j - 1] + u32::from(source[i - 1] != target[j - 1]);
                let del = cost[(i - 1) * width + j] + 1;
                let ins = cost[i * width + j - 1] + 1;
                diag.min(del).min(ins)
            };
        }
    }
    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * width + j];
        if i > 0 && j > 0 {
            let same = source[i - 1] == target[j - 1];
            if cost[(i - 1) * width + j - 1] + u32::from(!same) == here {
                steps.push(if same { Step::Match } else { Step::Sub });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && cost[(i - 1) * width + j] + 1 == here {
            steps.push(Step::Del);
            i -= 1;
        } else {
            steps.push(Step::Ins);
            j -= 1;
        }
    }
    steps.reverse();
    steps
}

/// Edits turning `source` into `corrected`, ordered by position.
pub fn extract_edits(source: &Sentence, corrected: &Sentence) -> Vec<Edit> {
    let (src, tgt) = (source.tokens(), corrected.tokens());
    let mut edits = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut open: Option<Edit> = None;
    for step in align(src, tgt) {
        if step == Step::Match {
            if let Some(edit) = open.take() {
                edits.push(edit);
            }
            i += 1;
            j += 1;
            continue;
        }
        let edit = open.get_or_insert_with(|| Edit {
            start: i,
            end: i,
            replacement: Vec::new(),
        });
        match step {
            Step::Sub => {
                edit.end += 1;
                edit.replacement.push(tgt[j].clone());
                i += 1;
                j += 1;
            }
            Step::Del => {
                edit.end += 1;
                i += 1;
            }
            Step::Ins => {
                edit.replacement.push(tgt[j].clone());
                j += 1;
            }
            Step::Match => unreachable!(),
        }
    }
    edits.extend(open);
    edits.retain(|e| src[e.start..e.end] != e.replacement[..]);
    edits
}

/// Applies non-overlapping edits (sorted by start) to `source`.
pub fn apply_edits(source: &Sentence, edits: &[Edit]) -> Sentence {
    let src = source.tokens();
    let mut out = Vec::with_capacity(src.len());
    let mut at = 0;
    for e in edits {
        out.extend_from_slice(&src[at..e.start]);
        out.extend(e.replacement.iter().cloned());
        at = e.end;
    }
    out.extend_from_slice(&src[at..]);
    Sentence::new(out)
}

/// `(1 + β²)·P·R / (β²·P + R)`, or 0 when both are 0. Works on either the
/// 0–1 or the 0–100 scale.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> Result<f64, EvalError> {
    for v in [precision, recall] {
        if v < 0.0 || v.is_nan() {
            return Err(EvalError::Negative(v));
        }
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(EvalError::Beta(beta));
    }
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + b2) * precision * recall / denom)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreReport {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    /// In [0, 1].
    pub precision: f64,
    pub recall: f64,
    pub f_half: f64,
}

impl ScoreReport {
    /// Zero denominators count as perfect: P = 1 when nothing was proposed,
    /// R = 1 when nothing needed fixing.
    pub fn from_counts(c: Counts) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        ScoreReport {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision,
            recall,
            f_half: f_beta(precision, recall, 0.5).unwrap_or(0.0),
        }
    }
}

/// Counts for one sentence against the best of several references, where
/// "best" maximizes `(tp, -fp, -fn)`; the first reference wins ties.
/// Returns the counts and the chosen reference index.
pub fn sentence_counts(source: &Sentence, hypothesis: &Sentence, references: &[&Sentence]) -> (Counts, usize) {
    let hyp: BTreeSet<Edit> = extract_edits(source, hypothesis).into_iter().collect();
    let mut best: Option<(Counts, usize)> = None;
    for (r, reference) in references.iter().enumerate() {
        let gold: BTreeSet<Edit> = extract_edits(source, reference).into_iter().collect();
        let tp = hyp.intersection(&gold).count() as u64;
        let c = Counts {
            tp,
            fp: hyp.len() as u64 - tp,
            fn_: gold.len() as u64 - tp,
        };
        let key = |c: &Counts| (c.tp, core::cmp::Reverse(c.fp), core::cmp::Reverse(c.fn_));
        if best.as_ref().is_none_or(|(b, _)| key(&c) > key(b)) {
            best = Some((c, r));
        }
    }
    best.unwrap_or_default()
}

pub fn score_corpus(
    sources: &[Sentence],
    hypotheses: &[Sentence],
    references: &[Vec<Sentence>],
) -> Result<ScoreReport, EvalError> {
    if references.is_empty() {
        return Err(EvalError::NoReferences);
    }
    let expected = sources.len();
    if hypotheses.len() != expected {
        return Err(EvalError::LengthMismatch {
            name: "hypotheses",
            expected,
            got: hypotheses.len(),
        });
    }
    for r in references {
        if r.len() != expected {
            return Err(EvalError::LengthMismatch {
                name: "references",
                expected,
                got: r.len(),
            });
        }
    }
    let mut total = Counts::default();
    for (i, (src, hyp)) in sources.iter().zip(hypotheses).enumerate() {
        let refs: Vec<&Sentence> = references.iter().map(|r| &r[i]).collect();
        total.add(sentence_counts(src, hyp, &refs).0);
    }
    Ok(ScoreReport::from_counts(total))
}
