//! Algorithms for building pseudo-parallel training data for grammatical
//! error correction from a corpus of grammatical sentences.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, threads or the clock lives in the `pseudo-forge` crate.
//!
//! * [`corpus`]: tokens, sentences, parallel pairs and line parsing.
//! * [`rng`]: the counter-based random source every randomized stage draws from.
//! * [`bpe`]: learning and applying byte-pair-encoding merges with `@@` markers.
//! * [`noise`]: per-token mask / delete / insert / keep corruption.
//! * [`spell`]: character-level spelling noise.
//! * [`decode`]: noisy beam search and ancestral sampling over a pluggable scorer.
//! * [`pipeline`]: dedup, subsampling, joint composition and training manifests.
//! * [`rerank`]: ensemble scores, right-to-left re-ranking and detector gating.
//! * [`eval`]: a small edit-based precision / recall / F0.5 scorer.
//! * [`sweep`]: parameter grids with per-trial seeds and aggregation.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bpe;
pub mod corpus;
pub mod decode;
pub mod eval;
pub mod noise;
pub mod pipeline;
pub mod rerank;
pub mod rng;
pub mod spell;
pub mod sweep;

pub use corpus::{Corpus, CorpusKind, ParallelPair, Sentence, Token};
pub use rng::RandomSource;
