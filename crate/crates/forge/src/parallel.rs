//! Multi-threaded drivers. Each sentence draws from its own random stream,
//! so results do not depend on the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;

use pseudo_forge_core::corpus::{CorpusError, Provenance};
use pseudo_forge_core::decode::{self, DecodeError, DecodeParams, Method, SequenceScorer};
use pseudo_forge_core::noise::{self, NoiseSpec, UnigramTable};
use pseudo_forge_core::spell::{self, SpellNoiseConfig, SpellStats};
use pseudo_forge_core::{Corpus, CorpusKind, ParallelPair};

/// A pool with `workers` threads, or one per logical core when `None`.
pub fn pool(workers: Option<usize>) -> Result<ThreadPool, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    builder.build()
}

/// Maps `f` over `items` with their indices; output keeps input order.
pub fn map_indexed<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
}

pub fn direct_noise(
    pool: &ThreadPool,
    seed_corpus: &Corpus,
    spec: &NoiseSpec,
    unigram: &UnigramTable,
    base_seed: u64,
) -> Result<Corpus, CorpusError> {
    seed_corpus.check_monolingual()?;
    let pairs = map_indexed(pool, &seed_corpus.pairs, |i, p| {
        noise::noise_pair(&p.target, i, spec, unigram, base_seed)
    });
    Ok(Corpus::new(pairs, CorpusKind::Pseudo))
}

/// Spelling noise on the source side of each pair.
pub fn spelling_noise(
    pool: &ThreadPool,
    pairs: &[(ParallelPair, Option<Provenance>)],
    config: &SpellNoiseConfig,
    base_seed: u64,
) -> (Vec<(ParallelPair, Option<Provenance>)>, SpellStats) {
    let noised = map_indexed(pool, pairs, |i, (pair, prov)| {
        let mut stats = SpellStats::default();
        let mut rng = spell::sentence_stream(base_seed, i);
        let source = spell::inject_traced(&pair.source, config, &mut rng, &mut stats);
        let out = ParallelPair {
            source,
            target: pair.target.clone(),
        };
        ((out, *prov), stats)
    });
    let mut total = SpellStats::default();
    let pairs = noised
        .into_iter()
        .map(|(p, s)| {
            total.merge(&s);
            p
        })
        .collect();
    (pairs, total)
}

pub fn backtranslate<S: SequenceScorer + Sync + ?Sized>(
    pool: &ThreadPool,
    seed_corpus: &Corpus,
    scorer: &S,
    method: Method,
    params: &DecodeParams,
    base_seed: u64,
) -> Result<Corpus, DecodeError> {
    seed_corpus.check_monolingual()?;
    params.validate()?;
    let pairs = map_indexed(pool, &seed_corpus.pairs, |i, p| {
        decode::backtranslate_pair(&p.target, i, scorer, method, params, base_seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus::new(pairs, CorpusKind::Pseudo))
}
