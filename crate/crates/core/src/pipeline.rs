//! Data preparation and dataset composition.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::{Corpus, CorpusKind, ParallelPair, Provenance};
use crate::rng::{domain, RandomSource};

/// Pseudo-data scales used for size sweeps.
pub const PRESET_SIZES: [usize; 5] = [1_400_000, 7_000_000, 14_000_000, 30_000_000, 70_000_000];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("pretraining needs at least one pseudo corpus path")]
    NoPseudoPaths,
    #[error("fine-tuning needs at least one genuine corpus path")]
    NoGenuinePaths,
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
}

/// Drops pairs whose source equals their target, keeping order.
pub fn dedup(corpus: &Corpus) -> Corpus {
    Corpus::new(
        corpus.pairs.iter().filter(|p| !p.is_identity()).cloned().collect(),
        corpus.kind,
    )
}

/// Fisher-Yates shuffle driven by `(seed, SHUFFLE domain, stream 0)`.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = RandomSource::with_domain(seed, domain::SHUFFLE, 0);
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// `Dg ∪ Dp`, shuffled by `seed`, each pair annotated with where it came from.
pub fn compose_joint(genuine: &Corpus, pseudo: &Corpus, seed: u64) -> Vec<(ParallelPair, Provenance)> {
    let mut out: Vec<(ParallelPair, Provenance)> = genuine
        .pairs
        .iter()
        .map(|p| (p.clone(), Provenance::Genuine))
        .chain(pseudo.pairs.iter().map(|p| (p.clone(), Provenance::Pseudo)))
        .collect();
    shuffle(&mut out, seed);
    out
}

/// Chooses `n` of `len` indices uniformly (reservoir sampling), returned ascending.
pub fn sample_indices(len: usize, n: usize, seed: u64) -> Vec<usize> {
    if n >= len {
        return (0..len).collect();
    }
    let mut rng = RandomSource::with_domain(seed, domain::SUBSAMPLE, 0);
    let mut reservoir: Vec<usize> = (0..n).collect();
    for i in n..len {
        let j = rng.below(i as u64 + 1) as usize;
        if j < n {
            reservoir[j] = i;
        }
    }
    reservoir.sort_unstable();
    reservoir
}

/// A uniform subset of exactly `min(n, |corpus|)` pairs in original order.
pub fn subsample(corpus: &Corpus, n: usize, seed: u64) -> Corpus {
    if n >= corpus.len() {
        return corpus.clone();
    }
    let pairs = sample_indices(corpus.len(), n, seed)
        .into_iter()
        .map(|i| corpus.pairs[i].clone())
        .collect();
    Corpus::new(pairs, corpus.kind)
}

/// Parses sizes like `70000`, `1.4M`, `30m` or `500k`.
pub fn parse_size(text: &str) -> Option<usize> {
    let text = text.trim();
    let (number, scale) = match text.chars().last()? {
        'k' | 'K' => (&text[..text.len() - 1], 1_000.0),
        'm' | 'M' => (&text[..text.len() - 1], 1_000_000.0),
        _ => (text, 1.0),
    };
    if scale == 1.0 {
        return number.parse().ok();
    }
    let value: f64 = number.parse().ok()?;
    if !(value >= 0.0 && value.is_finite()) {
        return None;
    }
    let scaled = value * scale;
    let rounded = libm::round(scaled);
    if (scaled - rounded).abs() > 1e-6 {
        return None;
    }
    Some(rounded as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Joint,
    Pretrain,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Joint => "joint",
            Regime::Pretrain => "pretrain",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "joint" => Some(Regime::Joint),
            "pretrain" => Some(Regime::Pretrain),
            _ => None,
        }
    }
}

/// A corpus file referenced by a stage, tagged with its role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageInput {
    pub role: Provenance,
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub name: String,
    pub inputs: Vec<StageInput>,
}

impl Stage {
    fn has(&self, role: Provenance) -> bool {
        self.inputs.iter().any(|i| i.role == role)
    }
}

/// Declarative description of a training schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub regime: Regime,
    pub stages: Vec<Stage>,
    pub seed: u64,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidManifest(m.to_string()));
        match self.regime {
            Regime::Joint => {
                let [stage] = self.stages.as_slice() else {
                    return bad("joint regime needs exactly one stage");
                };
                if !stage.has(Provenance::Genuine) || !stage.has(Provenance::Pseudo) {
                    return bad("joint stage must reference both genuine and pseudo corpora");
                }
            }
            Regime::Pretrain => {
                let [first, second] = self.stages.as_slice() else {
                    return bad("pretrain regime needs exactly two stages");
                };
                if first.inputs.is_empty() || first.has(Provenance::Genuine) {
                    return bad("pretrain stage 1 must reference only pseudo corpora");
                }
                if second.inputs.is_empty() || second.has(Provenance::Pseudo) {
                    return bad("pretrain stage 2 must reference only genuine corpora");
                }
            }
        }
        Ok(())
    }
}

fn inputs(role: Provenance, paths: &[String]) -> Vec<StageInput> {
    paths
        .iter()
        .map(|p| StageInput {
            role,
            path: p.clone(),
        })
        .collect()
}

/// Pretrain on the pseudo corpora, then fine-tune on the genuine ones.
pub fn make_pretrain_manifest(
    pseudo_paths: &[String],
    genuine_paths: &[String],
    seed: u64,
) -> Result<DatasetManifest, PipelineError> {
    if pseudo_paths.is_empty() {
        return Err(PipelineError::NoPseudoPaths);
    }
    if genuine_paths.is_empty() {
        return Err(PipelineError::NoGenuinePaths);
    }
    Ok(DatasetManifest {
        regime: Regime::Pretrain,
        stages: alloc::vec![
            Stage {
                name: "pretrain".into(),
                inputs: inputs(Provenance::Pseudo, pseudo_paths),
            },
            Stage {
                name: "finetune".into(),
                inputs: inputs(Provenance::Genuine, genuine_paths),
            },
        ],
        seed,
    })
}

/// A single stage training on genuine and pseudo corpora together.
pub fn make_joint_manifest(
    pseudo_paths: &[String],
    genuine_paths: &[String],
    seed: u64,
) -> Result<DatasetManifest, PipelineError> {
    if pseudo_paths.is_empty() {
        return Err(PipelineError::NoPseudoPaths);
    }
    if genuine_paths.is_empty() {
        return Err(PipelineError::NoGenuinePaths);
    }
    let mut all = inputs(Provenance::Genuine, genuine_paths);
    all.extend(inputs(Provenance::Pseudo, pseudo_paths));
    Ok(DatasetManifest {
        regime: Regime::Joint,
        stages: alloc::vec![Stage {
            name: "joint".into(),
            inputs: all,
        }],
        seed,
    })
}

/// Strips provenance annotations, producing a pseudo corpus of the composed pairs.
pub fn without_provenance(pairs: Vec<(ParallelPair, Provenance)>) -> Corpus {
    Corpus::new(pairs.into_iter().map(|(p, _)| p).collect(), CorpusKind::Pseudo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use alloc::vec;
    use proptest::prelude::*;

    fn pair(src: &str, tgt: &str) -> ParallelPair {
        ParallelPair::new(Sentence::parse(src), Sentence::parse(tgt)).unwrap()
    }

    fn genuine(pairs: Vec<ParallelPair>) -> Corpus {
        Corpus::new(pairs, CorpusKind::Genuine)
    }

    #[test]
    fn dedup_examples() {
        let c = genuine(vec![pair("a b", "a b"), pair("a", "a b")]);
        assert_eq!(dedup(&c).pairs, vec![pair("a", "a b")]);
        let clean = genuine(vec![pair("x", "y")]);
        assert_eq!(dedup(&clean), clean);
    }

    #[test]
    fn joint_sizes_add_up() {
        // Only the arithmetic matters; scaled down from 561,410 + 1,400,000.
        let g = genuine((0..5614).map(|i| pair("g", &alloc::format!("g{i}"))).collect());
        let p = Corpus::new((0..14000).map(|i| pair("p", &alloc::format!("p{i}"))).collect(), CorpusKind::Pseudo);
        assert_eq!(compose_joint(&g, &p, 1).len(), 5614 + 14000);
        assert_eq!(561_410 + 1_400_000, 1_961_410);
    }

    #[test]
    fn joint_with_empty_pseudo_permutes_genuine() {
        let g = genuine((0..50).map(|i| pair("s", &alloc::format!("t{i}"))).collect());
        let out = compose_joint(&g, &Corpus::empty(CorpusKind::Pseudo), 9);
        let mut got: Vec<_> = out.iter().map(|(p, _)| p.clone()).collect();
        got.sort();
        let mut want = g.pairs.clone();
        want.sort();
        assert_eq!(got, want);
        assert!(out.iter().all(|(_, prov)| *prov == Provenance::Genuine));
        assert_eq!(out, compose_joint(&g, &Corpus::empty(CorpusKind::Pseudo), 9));
    }

    #[test]
    fn pretrain_manifest_orders_stages() {
        let m = make_pretrain_manifest(&["dp.tsv".into()], &["dg.tsv".into()], 1).unwrap();
        assert_eq!(m.stages[0].name, "pretrain");
        assert_eq!(m.stages[0].inputs[0].path, "dp.tsv");
        assert_eq!(m.stages[1].name, "finetune");
        assert_eq!(m.stages[1].inputs[0].path, "dg.tsv");
        m.validate().unwrap();
        assert_eq!(make_pretrain_manifest(&[], &["dg.tsv".into()], 1), Err(PipelineError::NoPseudoPaths));
        assert_eq!(make_pretrain_manifest(&["dp".into()], &[], 1), Err(PipelineError::NoGenuinePaths));
    }

    #[test]
    fn manifest_validation_catches_bad_layouts() {
        let mut m = make_pretrain_manifest(&["dp".into()], &["dg".into()], 1).unwrap();
        m.stages.swap(0, 1);
        assert!(m.validate().is_err());
        let mut j = make_joint_manifest(&["dp".into()], &["dg".into()], 1).unwrap();
        j.validate().unwrap();
        j.stages[0].inputs.retain(|i| i.role == Provenance::Genuine);
        assert!(j.validate().is_err());
    }

    #[test]
    fn subsample_boundaries() {
        let c = genuine((0..10).map(|i| pair("a", &alloc::format!("b{i}"))).collect());
        assert!(subsample(&c, 0, 1).is_empty());
        assert_eq!(subsample(&c, 10, 1), c);
        assert_eq!(subsample(&c, 99, 1), c);
        assert_eq!(subsample(&c, 4, 7).len(), 4);
    }

    #[test]
    fn size_presets_parse() {
        let parsed: Vec<usize> = ["1.4M", "7M", "14M", "30M", "70M"].iter().map(|s| parse_size(s).unwrap()).collect();
        assert_eq!(parsed, PRESET_SIZES);
        assert_eq!(parse_size("500k"), Some(500_000));
        assert_eq!(parse_size("12"), Some(12));
        assert_eq!(parse_size("1.23456789M"), None);
        assert_eq!(parse_size("x"), None);
    }

    #[test]
    fn distinct_seeds_give_distinct_subsets() {
        let subsets: alloc::collections::BTreeSet<Vec<usize>> =
            (0..50).map(|seed| sample_indices(1000, 10, seed)).collect();
        assert!(subsets.len() >= 49);
    }

    #[test]
    fn reservoir_is_uniform() {
        // Each index of 20 should be picked with probability 5/20.
        let mut hits = [0u32; 20];
        for seed in 0..20_000 {
            for i in sample_indices(20, 5, seed) {
                hits[i] += 1;
            }
        }
        for h in hits {
            assert!((4_700..5_300).contains(&h), "{hits:?}");
        }
    }

    proptest! {
        #[test]
        fn dedup_removes_exactly_identities(rows in prop::collection::vec((0u8..3, 0u8..3), 0..40)) {
            let c = genuine(rows.iter().map(|(s, t)| pair(&alloc::format!("w{s}"), &alloc::format!("w{t}"))).collect());
            let d = dedup(&c);
            let expected: Vec<_> = c.pairs.iter().filter(|p| p.source != p.target).cloned().collect();
            prop_assert_eq!(&d.pairs, &expected);
            prop_assert_eq!(dedup(&d), d);
        }

        #[test]
        fn subsample_preserves_order_and_size(len in 0usize..200, n in 0usize..250, seed in any::<u64>()) {
            let idx = sample_indices(len, n, seed);
            prop_assert_eq!(idx.len(), n.min(len));
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(&idx, &sample_indices(len, n, seed));
        }
    }
}
