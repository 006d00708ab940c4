//! Character-level spelling noise: delete, insert, replace or transpose.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::{Sentence, Token};
use crate::rng::{domain, RandomSource};

pub const DEFAULT_RATE: f64 = 0.003;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpellError {
    #[error("spelling noise rate {0} outside [0, 1]")]
    Rate(f64),
    #[error("spelling noise alphabet is empty")]
    EmptyAlphabet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpellOp {
    Delete,
    Insert,
    Replace,
    Transpose,
}

impl SpellOp {
    pub const ALL: [SpellOp; 4] = [SpellOp::Delete, SpellOp::Insert, SpellOp::Replace, SpellOp::Transpose];
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpellNoiseConfig {
    rate: f64,
    alphabet: Vec<char>,
}

impl SpellNoiseConfig {
    pub fn new(rate: f64, alphabet: impl IntoIterator<Item = char>) -> Result<Self, SpellError> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(SpellError::Rate(rate));
        }
        let alphabet: Vec<char> = alphabet
            .into_iter()
            .filter(|c| !c.is_whitespace())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if alphabet.is_empty() {
            return Err(SpellError::EmptyAlphabet);
        }
        Ok(SpellNoiseConfig { rate, alphabet })
    }

    /// Alphabet made of the non-whitespace characters seen in `sentences`.
    pub fn from_observed<'a>(
        rate: f64,
        sentences: impl IntoIterator<Item = &'a Sentence>,
    ) -> Result<Self, SpellError> {
        let chars = sentences
            .into_iter()
            .flat_map(|s| s.iter())
            .flat_map(|t| t.as_str().chars());
        Self::new(rate, chars)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    fn draw_char(&self, rng: &mut RandomSource) -> char {
        self.alphabet[rng.below(self.alphabet.len() as u64) as usize]
    }
}

/// Counters filled in by [`inject_traced`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpellStats {
    /// Characters eligible as sites (whitespace and mask tokens are not).
    pub chars: u64,
    /// Characters selected for an operation.
    pub sites: u64,
    /// Operation kind drawn at each site, indexed like [`SpellOp::ALL`].
    pub chosen: [u64; 4],
    /// Operations that changed the text, indexed like [`SpellOp::ALL`].
    pub applied: [u64; 4],
    /// Transpositions at a token's last character, which are skipped.
    pub skipped: u64,
    /// Sites swallowed because a transposition at the previous position already
    /// consumed their character.
    pub absorbed: u64,
}

impl SpellStats {
    pub fn applied_total(&self) -> u64 {
        self.applied.iter().sum()
    }

    pub fn merge(&mut self, other: &SpellStats) {
        self.chars += other.chars;
        self.sites += other.sites;
        for (a, b) in self.chosen.iter_mut().zip(other.chosen) {
            *a += b;
        }
        for (a, b) in self.applied.iter_mut().zip(other.applied) {
            *a += b;
        }
        self.skipped += other.skipped;
        self.absorbed += other.absorbed;
    }
}

fn noise_token(
    token: &str,
    config: &SpellNoiseConfig,
    rng: &mut RandomSource,
    stats: &mut SpellStats,
) -> String {
    let chars: Vec<char> = token.chars().collect();
    // Sites and operation kinds are fixed on the original characters first.
    let mut plan: Vec<Option<SpellOp>> = Vec::with_capacity(chars.len());
    for _ in &chars {
        stats.chars += 1;
        if rng.chance(config.rate) {
            stats.sites += 1;
            let kind = rng.below(4) as usize;
            stats.chosen[kind] += 1;
            plan.push(Some(SpellOp::ALL[kind]));
        } else {
            plan.push(None);
        }
    }

    apply_plan(&chars, &plan, &mut || config.draw_char(rng), stats)
}

/// Applies per-character operations left to right. A transposition consumes
/// the following character, so any operation planned there is dropped.
pub fn apply_plan(
    chars: &[char],
    plan: &[Option<SpellOp>],
    draw: &mut dyn FnMut() -> char,
    stats: &mut SpellStats,
) -> String {
    let mut out = String::with_capacity(chars.len() + 4);
    let mut i = 0;
    while i < chars.len() {
        match plan[i] {
            None => out.push(chars[i]),
            Some(SpellOp::Delete) => {
                stats.applied[0] += 1;
            }
            Some(SpellOp::Insert) => {
                out.push(draw());
                out.push(chars[i]);
                stats.applied[1] += 1;
            }
            Some(SpellOp::Replace) => {
                out.push(draw());
                stats.applied[2] += 1;
            }
            Some(SpellOp::Transpose) => {
                if i + 1 < chars.len() {
                    out.push(chars[i + 1]);
                    out.push(chars[i]);
                    stats.applied[3] += 1;
                    if plan[i + 1].is_some() {
                        stats.absorbed += 1;
                    }
                    i += 1;
                } else {
                    out.push(chars[i]);
                    stats.skipped += 1;
                }
            }
        }
        i += 1;
    }
    out
}

/// Applies spelling noise and accumulates counters into `stats`. Mask
/// placeholders pass through untouched.
pub fn inject_traced(
    sentence: &Sentence,
    config: &SpellNoiseConfig,
    rng: &mut RandomSource,
    stats: &mut SpellStats,
) -> Sentence {
    if config.rate == 0.0 {
        stats.chars += sentence
            .iter()
            .filter(|t| !t.is_mask())
            .map(|t| t.as_str().chars().count() as u64)
            .sum::<u64>();
        return sentence.clone();
    }
    sentence
        .iter()
        .filter_map(|t| {
            if t.is_mask() {
                return Some(t.clone());
            }
            Token::new(noise_token(t.as_str(), config, rng, stats)).ok()
        })
        .collect()
}

pub fn inject_spelling_noise(
    sentence: &Sentence,
    config: &SpellNoiseConfig,
    rng: &mut RandomSource,
) -> Sentence {
    inject_traced(sentence, config, rng, &mut SpellStats::default())
}

/// Stream for sentence `index` of a spelling-noise run.
pub fn sentence_stream(base_seed: u64, index: usize) -> RandomSource {
    RandomSource::with_domain(base_seed, domain::SPELL_NOISE, index as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(rate: f64) -> SpellNoiseConfig {
        SpellNoiseConfig::new(rate, "abcdefghijklmnopqrstuvwxyz".chars()).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let s = Sentence::parse("the quick brown fox");
        let mut rng = RandomSource::new(3, 3);
        assert_eq!(inject_spelling_noise(&s, &config(0.0), &mut rng), s);
    }

    #[test]
    fn forced_transposition() {
        let chars: Vec<char> = "the".chars().collect();
        let mut stats = SpellStats::default();
        let mut draw = || 'x';
        let t = Some(SpellOp::Transpose);
        assert_eq!(apply_plan(&chars, &[t, None, None], &mut draw, &mut stats), "hte");
        assert_eq!(apply_plan(&chars, &[None, None, t], &mut draw, &mut stats), "the");
        assert_eq!(stats.skipped, 1);
        let r = Some(SpellOp::Replace);
        assert_eq!(apply_plan(&chars, &[t, r, None], &mut draw, &mut stats), "hte");
        assert_eq!(stats.absorbed, 1);
        let plan = [Some(SpellOp::Delete), Some(SpellOp::Insert), r];
        assert_eq!(apply_plan(&chars, &plan, &mut draw, &mut stats), "xhx");
    }

    #[test]
    fn rate_one_transposes_consume_neighbours() {
        // With every character a site, only the op mix varies; the output must
        // still be a valid sentence without whitespace inside tokens.
        let s = Sentence::parse("abcd efgh");
        let mut stats = SpellStats::default();
        let out = inject_traced(&s, &config(1.0), &mut RandomSource::new(1, 0), &mut stats);
        assert_eq!(stats.sites, 8);
        assert_eq!(stats.applied_total() + stats.skipped + stats.absorbed, 8);
        assert!(out.len() <= 2);
    }

    #[test]
    fn mask_tokens_are_never_sites() {
        let s = Sentence::new(vec![Token::mask(), Token::new("ab").unwrap(), Token::mask()]);
        let mut stats = SpellStats::default();
        let out = inject_traced(&s, &config(1.0), &mut RandomSource::new(5, 0), &mut stats);
        assert_eq!(stats.chars, 2);
        assert!(out.tokens().first().unwrap().is_mask());
        assert!(out.tokens().last().unwrap().is_mask());
    }

    #[test]
    fn config_validation() {
        assert_eq!(SpellNoiseConfig::new(1.5, "a".chars()), Err(SpellError::Rate(1.5)));
        assert_eq!(SpellNoiseConfig::new(0.1, " \t".chars()), Err(SpellError::EmptyAlphabet));
        let observed = SpellNoiseConfig::from_observed(0.1, [&Sentence::parse("ba ab c")]).unwrap();
        assert_eq!(observed.alphabet(), &['a', 'b', 'c']);
    }

    #[test]
    fn operation_kinds_are_uniform() {
        let s = Sentence::parse("abcdefghij klmnopqrst uvwxyzabcd");
        let mut stats = SpellStats::default();
        for i in 0..2000 {
            inject_traced(&s, &config(0.5), &mut sentence_stream(7, i), &mut stats);
        }
        assert!(stats.sites >= 10_000);
        let expected = stats.sites as f64 / 4.0;
        let chi2: f64 = stats
            .chosen
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // Upper 0.001 quantile of chi-square with 3 degrees of freedom.
        assert!(chi2 < 16.266, "chi2 = {chi2}, {stats:?}");
    }

    proptest! {
        #[test]
        fn length_drift_bounded_by_operations(
            words in prop::collection::vec("[a-z]{1,8}", 1..10),
            seed in any::<u64>(),
        ) {
            let s = Sentence::from_strs(&words).unwrap();
            let mut stats = SpellStats::default();
            let out = inject_traced(&s, &config(0.2), &mut sentence_stream(seed, 0), &mut stats);
            let drift = (out.char_count() as i64 - s.char_count() as i64).unsigned_abs();
            prop_assert!(drift <= stats.applied_total());
            prop_assert_eq!(stats.chars, s.char_count() as u64);
        }

        #[test]
        fn deterministic_per_stream(words in prop::collection::vec("[a-z]{1,8}", 1..10), seed in any::<u64>()) {
            let s = Sentence::from_strs(&words).unwrap();
            let a = inject_spelling_noise(&s, &config(0.3), &mut sentence_stream(seed, 4));
            let b = inject_spelling_noise(&s, &config(0.3), &mut sentence_stream(seed, 4));
            prop_assert_eq!(a, b);
        }
    }
}
