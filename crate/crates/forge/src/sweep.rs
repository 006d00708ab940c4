//! Sweep evaluators: a built-in desk-scale one and an external command.
//!
//! The built-in evaluator measures how closely generated errors match genuine
//! ones: each dev target is noised with the point's settings, and the edits
//! from target to synthetic source are scored against the edits from target to
//! the genuine source.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use pseudo_forge_core::decode::{self, DecodeParams, Method, ToyScorer};
use pseudo_forge_core::eval::score_corpus;
use pseudo_forge_core::noise::{self, NoiseSpec, UnigramTable};
use pseudo_forge_core::pipeline::{sample_indices, subsample};
use pseudo_forge_core::sweep::{assemble, Metrics, PointResult, SweepError, SweepParam, SweepPlan, SweepPoint, SweepTable};
use pseudo_forge_core::{Corpus, ParallelPair, Sentence};

use crate::io::{render_corpus, write_text, Format};
use crate::parallel;

/// Settings held fixed while one parameter varies.
#[derive(Clone, Debug)]
pub struct FixedSettings {
    pub spec: NoiseSpec,
    pub decode: DecodeParams,
}

/// Pseudo pairs for `targets` under the point's settings.
fn generate(
    param: SweepParam,
    point: &SweepPoint,
    targets: &[&Sentence],
    unigram: &UnigramTable,
    scorer: Option<&ToyScorer>,
    fixed: &FixedSettings,
) -> Result<Vec<ParallelPair>, String> {
    let spec = match param {
        SweepParam::MuMask => NoiseSpec::derive(point.value).map_err(|e| e.to_string())?,
        _ => fixed.spec,
    };
    if param == SweepParam::Beta {
        let scorer = scorer.ok_or("a beta sweep needs a toy scorer (--scorer)")?;
        let params = DecodeParams {
            beta_random: point.value,
            ..fixed.decode
        };
        return targets
            .iter()
            .enumerate()
            .map(|(i, t)| decode::backtranslate_pair(t, i, scorer, Method::Noisy, &params, point.seed).map_err(|e| e.to_string()))
            .collect();
    }
    Ok(targets
        .iter()
        .enumerate()
        .map(|(i, t)| noise::noise_pair(t, i, &spec, unigram, point.seed))
        .collect())
}

pub struct BuiltinEvaluator<'a> {
    pub dev: &'a Corpus,
    pub unigram: UnigramTable,
    pub scorer: Option<&'a ToyScorer>,
    pub fixed: FixedSettings,
}

impl BuiltinEvaluator<'_> {
    pub fn evaluate(&self, param: SweepParam, point: &SweepPoint) -> Result<Metrics, String> {
        let pairs: Vec<&ParallelPair> = if param == SweepParam::DpSize {
            let n = (point.value as usize).min(self.dev.len());
            sample_indices(self.dev.len(), n, point.seed).into_iter().map(|i| &self.dev.pairs[i]).collect()
        } else {
            self.dev.pairs.iter().collect()
        };
        let targets: Vec<&Sentence> = pairs.iter().map(|p| &p.target).collect();
        let synthetic = generate(param, point, &targets, &self.unigram, self.scorer, &self.fixed)?;
        let sources: Vec<Sentence> = targets.iter().map(|t| (*t).clone()).collect();
        let hyps: Vec<Sentence> = synthetic.into_iter().map(|p| p.source).collect();
        let refs = vec![pairs.iter().map(|p| p.source.clone()).collect::<Vec<_>>()];
        let report = score_corpus(&sources, &hyps, &refs).map_err(|e| e.to_string())?;
        Ok(Metrics {
            precision: 100.0 * report.precision,
            recall: 100.0 * report.recall,
            f_half: 100.0 * report.f_half,
        })
    }
}

/// Runs `template` through `sh -c` after substituting `{pseudo}`, `{value}`
/// and `{seed}`. The last non-empty stdout line must hold "P R F".
pub struct ExternalEvaluator<'a> {
    pub template: String,
    pub seed_corpus: &'a Corpus,
    pub unigram: UnigramTable,
    pub scorer: Option<&'a ToyScorer>,
    pub fixed: FixedSettings,
    pub work_dir: PathBuf,
}

pub fn parse_metrics_line(stdout: &str) -> Result<Metrics, String> {
    let line = stdout
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .ok_or("evaluator printed nothing")?;
    let nums: Vec<f64> = line
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| format!("cannot parse evaluator output '{line}'"))?;
    match nums[..] {
        [precision, recall, f_half] => Ok(Metrics {
            precision,
            recall,
            f_half,
        }),
        _ => Err(format!("expected 'P R F', got '{line}'")),
    }
}

impl ExternalEvaluator<'_> {
    fn pseudo_path(&self, point: &SweepPoint) -> PathBuf {
        self.work_dir.join(format!("pseudo-{}-{}.tsv", point.value, point.trial))
    }

    pub fn evaluate(&self, param: SweepParam, point: &SweepPoint) -> Result<Metrics, String> {
        let corpus = if param == SweepParam::DpSize {
            subsample(self.seed_corpus, point.value as usize, point.seed)
        } else {
            self.seed_corpus.clone()
        };
        let targets: Vec<&Sentence> = corpus.targets().collect();
        let pairs = generate(param, point, &targets, &self.unigram, self.scorer, &self.fixed)?;
        let path = self.pseudo_path(point);
        write_text(&path, &render_corpus(&Corpus::new(pairs, pseudo_forge_core::CorpusKind::Pseudo), Format::Tsv))
            .map_err(|e| e.to_string())?;
        let cmd = self
            .template
            .replace("{pseudo}", &path.display().to_string())
            .replace("{value}", &point.value.to_string())
            .replace("{seed}", &point.seed.to_string());
        let output = Command::new("sh").arg("-c").arg(&cmd).output().map_err(|e| format!("{cmd}: {e}"))?;
        if !output.status.success() {
            return Err(format!("{cmd}: exited with {}", output.status));
        }
        parse_metrics_line(&String::from_utf8_lossy(&output.stdout))
    }
}

pub enum Evaluator<'a> {
    Builtin(BuiltinEvaluator<'a>),
    External(ExternalEvaluator<'a>),
}

impl Evaluator<'_> {
    pub fn evaluate(&self, param: SweepParam, point: &SweepPoint) -> Result<Metrics, String> {
        match self {
            Evaluator::Builtin(e) => e.evaluate(param, point),
            Evaluator::External(e) => e.evaluate(param, point),
        }
    }
}

/// Evaluates all points on `pool` and assembles the table in plan order.
/// With `timing` off, every seconds cell is 0 so the table is byte-stable.
pub fn run_parallel(
    pool: &rayon::ThreadPool,
    plan: &SweepPlan,
    evaluator: &Evaluator<'_>,
    timing: bool,
) -> Result<SweepTable, SweepError> {
    let points = plan.points();
    let results: Vec<PointResult> = parallel::map_indexed(pool, &points, |_, p| {
        let start = Instant::now();
        let metrics = match evaluator.evaluate(plan.param(), p) {
            Ok(m) => Some(m),
            Err(e) => {
                log::warn!("sweep point {}={} trial {} failed: {e}", plan.param().as_str(), p.value, p.trial);
                None
            }
        };
        let secs = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
        (metrics, secs)
    });
    assemble(plan, &results)
}

pub fn default_work_dir() -> PathBuf {
    std::env::temp_dir().join(format!("pseudo-forge-sweep-{}", std::process::id()))
}

pub fn ensure_dir(path: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pseudo_forge_core::sweep::render_table;
    use pseudo_forge_core::CorpusKind;

    fn dev() -> Corpus {
        let pairs = (0..40)
            .map(|i| {
                let t = Sentence::parse(&format!("the cat number {i} sat on the mat"));
                let s = Sentence::parse(&format!("the cat number {i} sat mat"));
                ParallelPair::new(s, t).unwrap()
            })
            .collect();
        Corpus::new(pairs, CorpusKind::Genuine)
    }

    #[test]
    fn metrics_line_parsing() {
        let m = parse_metrics_line("training...\n50.0 25.0 41.7\n\n").unwrap();
        assert_eq!((m.precision, m.recall, m.f_half), (50.0, 25.0, 41.7));
        assert!(parse_metrics_line("").is_err());
        assert!(parse_metrics_line("1 2").is_err());
    }

    #[test]
    fn builtin_sweep_is_deterministic_across_workers() {
        let dev = dev();
        let seed = Corpus::seed(dev.targets().cloned());
        let evaluator = Evaluator::Builtin(BuiltinEvaluator {
            dev: &dev,
            unigram: UnigramTable::from_corpus(&seed).unwrap(),
            scorer: None,
            fixed: FixedSettings {
                spec: NoiseSpec::default(),
                decode: DecodeParams::default(),
            },
        });
        let plan = SweepPlan::new(SweepParam::MuMask, vec![0.1, 0.5], 2, 3).unwrap();
        let a = render_table(&run_parallel(&parallel::pool(Some(1)).unwrap(), &plan, &evaluator, false).unwrap());
        let b = render_table(&run_parallel(&parallel::pool(Some(3)).unwrap(), &plan, &evaluator, false).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 2 * 3);
    }

    #[test]
    fn beta_without_scorer_fails_every_point() {
        let dev = dev();
        let evaluator = Evaluator::Builtin(BuiltinEvaluator {
            dev: &dev,
            unigram: UnigramTable::from_corpus(&dev).unwrap(),
            scorer: None,
            fixed: FixedSettings {
                spec: NoiseSpec::default(),
                decode: DecodeParams::default(),
            },
        });
        let plan = SweepPlan::new(SweepParam::Beta, vec![0.0], 1, 3).unwrap();
        assert_eq!(
            run_parallel(&parallel::pool(Some(1)).unwrap(), &plan, &evaluator, false),
            Err(SweepError::AllFailed)
        );
    }
}
