//! The `pseudo-forge` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use pseudo_forge_core::bpe::{self, SubwordSentence};
use pseudo_forge_core::corpus::Provenance;
use pseudo_forge_core::decode::{DecodeParams, Method};
use pseudo_forge_core::eval::score_corpus;
use pseudo_forge_core::noise::{NoiseSpec, UnigramTable};
use pseudo_forge_core::pipeline::{self, Regime};
use pseudo_forge_core::rerank::{ensemble_combine, rerank_r2l, rerank_with_scores, sed_gate, Candidate, NBestList, Reranked};
use pseudo_forge_core::spell::SpellNoiseConfig;
use pseudo_forge_core::sweep::{render_table, SweepParam, SweepPlan};
use pseudo_forge_core::{rng, Corpus, CorpusKind, ParallelPair, Sentence};

use crate::config::PipelineConfig;
use crate::formats::{self, MANIFEST_SCHEMA, MERGES_HEADER};
use crate::io::{self, Format, IoError};
use crate::parallel;
use crate::sweep::{self as sweep_run, BuiltinEvaluator, Evaluator, ExternalEvaluator, FixedSettings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "pseudo-forge", version, about = "Pseudo-data generation for grammatical error correction")]
struct Cli {
    /// Flat key=value configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: one per logical core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corrupt seed sentences by masking, deleting and inserting tokens.
    NoiseDirect {
        #[command(flatten)]
        io: InOut,
        /// Mask probability; the keep share stays 0.2 and the rest is split evenly.
        #[arg(long, conflicts_with = "mu")]
        mu_mask: Option<f64>,
        /// Full spec "mask,del,ins,keep".
        #[arg(long)]
        mu: Option<String>,
        /// Genuine tsv corpus supplying the insertion unigram table.
        #[arg(long)]
        genuine: Option<PathBuf>,
    },
    /// Generate pseudo sources with a toy reverse model.
    Backtranslate {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        scorer: PathBuf,
        #[arg(long, default_value = "noisy", value_parser = ["noisy", "sample"])]
        method: String,
        #[arg(long)]
        beam: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        length_normalize: Option<bool>,
    },
    /// Add character-level spelling noise to the source side.
    Sse {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = "tsv")]
        format: Format,
        #[arg(long)]
        sse_rate: Option<f64>,
        /// File whose characters form the replacement alphabet (default: characters of the targets).
        #[arg(long)]
        sse_alphabet: Option<PathBuf>,
    },
    /// Learn a BPE merge table.
    BpeLearn {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = "plain")]
        format: Format,
        #[arg(long)]
        merges: Option<usize>,
    },
    /// Segment a corpus with a merge table.
    BpeApply {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = "plain")]
        format: Format,
        #[arg(long)]
        codes: PathBuf,
    },
    /// Join subword segments back into words.
    BpeDecode {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = "plain")]
        format: Format,
    },
    /// Drop pairs whose source equals their target.
    Dedup {
        #[command(flatten)]
        io: InOut,
    },
    /// Draw a random subset of pairs.
    Subsample {
        #[command(flatten)]
        io: InOut,
        /// Count such as 5000, 500k or 1.4M.
        #[arg(long)]
        n: String,
    },
    /// Combine genuine and pseudo corpora for training.
    Compose {
        #[arg(long, required = true)]
        genuine: Vec<PathBuf>,
        #[arg(long, required = true)]
        pseudo: Vec<PathBuf>,
        #[arg(long, default_value = "joint", value_parser = ["joint", "pretrain"])]
        regime: String,
        /// Joint corpus output (joint regime only; stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Omit the provenance column from the joint corpus.
        #[arg(long)]
        no_provenance: bool,
    },
    /// Re-rank n-best lists with right-to-left scores.
    Rerank {
        #[arg(long)]
        nbest: PathBuf,
        /// Source sentences, one per line, indexed by sentence id from 0.
        #[arg(long)]
        src: Option<PathBuf>,
        /// Right-to-left toy scorer; repeat for an ensemble.
        #[arg(long = "r2l-model", conflicts_with = "r2l_scores", required_unless_present = "r2l_scores")]
        r2l_model: Vec<PathBuf>,
        /// Precomputed right-to-left scores, one line per n-best line, one column per model.
        #[arg(long)]
        r2l_scores: Option<PathBuf>,
        #[arg(long)]
        length_normalize: Option<bool>,
        /// Best candidate per sentence id, in id order.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full re-ranked lists with summed scores.
        #[arg(long)]
        nbest_out: Option<PathBuf>,
    },
    /// Keep corrections only where the detector flagged the source.
    Gate {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        /// One 0/1 verdict per source line.
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edit-based precision, recall and F0.5.
    Score {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref", required = true)]
        refs: Vec<PathBuf>,
    },
    /// Sweep one generation parameter and tabulate the results.
    Sweep {
        #[arg(long, value_parser = ["mu-mask", "beta", "dp-size"])]
        param: String,
        /// Comma-separated grid (defaults depend on the parameter).
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long, default_value_t = pseudo_forge_core::sweep::DEFAULT_TRIALS)]
        trials: usize,
        /// Genuine tsv dev set for the built-in evaluator.
        #[arg(long, required_unless_present = "eval_cmd")]
        dev: Option<PathBuf>,
        /// Seed corpus for external evaluation.
        #[arg(long = "in", requires = "eval_cmd")]
        input: Option<PathBuf>,
        /// Shell command with {pseudo}, {value} and {seed}; prints "P R F" last.
        #[arg(long, requires = "input")]
        eval_cmd: Option<String>,
        #[arg(long)]
        scorer: Option<PathBuf>,
        #[arg(long)]
        work_dir: Option<PathBuf>,
        /// Write 0 in the seconds column so tables are byte-stable.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print tool and format versions.
    Version,
}

struct Ctx {
    config: PipelineConfig,
    seed_flag: Option<u64>,
}

impl Ctx {
    fn seed(&self) -> Result<u64, CliError> {
        self.seed_flag
            .or(self.config.seed)
            .ok_or_else(|| CliError::Usage("this subcommand needs --seed (or seed in --config)".into()))
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        parallel::pool(self.config.workers).map_err(data)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => io::write_text(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(data)?;
            stdout.flush().map_err(data)?;
        }
    }
    Ok(())
}

/// Plain sentence lines; empty lines are allowed and give empty sentences.
fn read_sentences(path: &Path) -> Result<Vec<Sentence>, CliError> {
    Ok(io::read_lines(path)?.iter().map(|l| Sentence::parse(l)).collect())
}

fn render_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

fn read_seed(path: &Path) -> Result<Corpus, CliError> {
    let corpus = io::read_corpus(path, Format::Plain)?;
    corpus.check_reserved().map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(corpus)
}

fn read_genuine(path: &Path) -> Result<Corpus, CliError> {
    let corpus = io::read_corpus(path, Format::Tsv)?;
    corpus.check_reserved().map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(corpus)
}

/// Reads either format as tagged pairs; plain lines become identity pairs.
fn read_pairs(path: &Path, format: Format) -> Result<Vec<(ParallelPair, Option<Provenance>)>, CliError> {
    Ok(match format {
        Format::Tsv => io::read_tagged(path)?,
        Format::Plain => io::read_corpus(path, Format::Plain)?.pairs.into_iter().map(|p| (p, None)).collect(),
    })
}

fn decode_params(config: &PipelineConfig, beam: Option<usize>, beta: Option<f64>, max_len: Option<usize>, ln: Option<bool>) -> DecodeParams {
    DecodeParams {
        beam_width: beam.unwrap_or(config.beam_width),
        max_len: max_len.unwrap_or(config.max_len),
        beta_random: beta.unwrap_or(config.beta_random),
        length_normalize: ln.unwrap_or(config.length_normalize),
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Version = cli.command {
        println!("pseudo-forge {}", env!("CARGO_PKG_VERSION"));
        println!("rng {}", rng::ALGORITHM);
        println!("bpe {}", MERGES_HEADER.trim_start_matches("#version: "));
        println!("manifest {MANIFEST_SCHEMA}");
        return Ok(());
    }
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        config.workers = Some(w);
    }
    let ctx = Ctx {
        config,
        seed_flag: cli.seed,
    };
    eprintln!("effective config: {}", PipelineConfig {
        seed: ctx.seed_flag.or(ctx.config.seed),
        ..ctx.config.clone()
    });
    match cli.command {
        Command::NoiseDirect { io: inout, mu_mask, mu, genuine } => {
            let seed = ctx.seed()?;
            let spec = match (mu_mask, mu) {
                (Some(m), _) => NoiseSpec::derive(m).map_err(data)?,
                (None, Some(text)) => NoiseSpec::parse(&text).map_err(data)?,
                (None, None) => ctx.config.mu,
            };
            let corpus = read_seed(&inout.input)?;
            let unigram = match genuine {
                Some(path) => UnigramTable::from_corpus(&read_genuine(&path)?),
                None => UnigramTable::from_corpus(&corpus),
            }
            .map_err(data)?;
            log::info!("noise-direct: {} sentences, spec {spec}", corpus.len());
            let out = parallel::direct_noise(&ctx.pool()?, &corpus, &spec, &unigram, seed).map_err(data)?;
            emit(inout.out.as_deref(), &io::render_corpus(&out, Format::Tsv))
        }
        Command::Backtranslate { io: inout, scorer, method, beam, beta, max_len, length_normalize } => {
            let seed = ctx.seed()?;
            let method = Method::parse(&method).expect("restricted by clap");
            let params = decode_params(&ctx.config, beam, beta, max_len, length_normalize);
            params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let scorer = formats::parse_toy_scorer(&scorer)?;
            let corpus = read_seed(&inout.input)?;
            log::info!("backtranslate: {} sentences, {method:?}, {params:?}", corpus.len());
            let out = parallel::backtranslate(&ctx.pool()?, &corpus, &scorer, method, &params, seed).map_err(data)?;
            emit(inout.out.as_deref(), &io::render_corpus(&out, Format::Tsv))
        }
        Command::Sse { io: inout, format, sse_rate, sse_alphabet } => {
            let seed = ctx.seed()?;
            let pairs = read_pairs(&inout.input, format)?;
            let rate = sse_rate.unwrap_or(ctx.config.sse_rate);
            let config = match sse_alphabet {
                Some(path) => SpellNoiseConfig::new(rate, formats::read_alphabet(&path)?),
                None => SpellNoiseConfig::from_observed(rate, pairs.iter().map(|(p, _)| &p.target)),
            }
            .map_err(data)?;
            let (out, stats) = parallel::spelling_noise(&ctx.pool()?, &pairs, &config, seed);
            log::info!(
                "sse: {} chars, {} sites, {} applied, {} skipped, {} absorbed",
                stats.chars,
                stats.sites,
                stats.applied_total(),
                stats.skipped,
                stats.absorbed
            );
            emit(inout.out.as_deref(), &io::render_tagged(&out))
        }
        Command::BpeLearn { io: inout, format, merges } => {
            let corpus = io::read_corpus(&inout.input, format)?;
            let n = merges.unwrap_or(ctx.config.bpe_merges);
            let table = bpe::learn_bpe(&corpus, n).map_err(data)?;
            log::info!("bpe-learn: {} of {n} merges learned", table.len());
            emit(inout.out.as_deref(), &formats::render_merges(&table))
        }
        Command::BpeApply { io: inout, format, codes } => {
            let table = formats::read_merges(&codes)?;
            let seg = |s: &Sentence| bpe::apply_bpe(s, &table).into_sentence();
            let text = bpe_map(&inout.input, format, |s| Ok(seg(s)))?;
            emit(inout.out.as_deref(), &text)
        }
        Command::BpeDecode { io: inout, format } => {
            let text = bpe_map(&inout.input, format, |s| {
                bpe::decode_bpe(&SubwordSentence::new(s.clone()), bpe::DEFAULT_MARKER).map_err(data)
            })?;
            emit(inout.out.as_deref(), &text)
        }
        Command::Dedup { io: inout } => {
            let corpus = io::read_corpus(&inout.input, Format::Tsv)?;
            let out = pipeline::dedup(&corpus);
            log::info!("dedup: kept {} of {} pairs", out.len(), corpus.len());
            emit(inout.out.as_deref(), &io::render_corpus(&out, Format::Tsv))
        }
        Command::Subsample { io: inout, n } => {
            let seed = ctx.seed()?;
            let n = pipeline::parse_size(&n).ok_or_else(|| CliError::Usage(format!("bad size '{n}'")))?;
            let corpus = io::read_corpus(&inout.input, Format::Tsv)?;
            if n > corpus.len() {
                log::warn!("subsample: asked for {n} pairs, corpus has {}", corpus.len());
            }
            let out = pipeline::subsample(&corpus, n, seed);
            emit(inout.out.as_deref(), &io::render_corpus(&out, Format::Tsv))
        }
        Command::Compose { genuine, pseudo, regime, out, manifest, no_provenance } => {
            let seed = ctx.seed()?;
            let regime = Regime::parse(&regime).expect("restricted by clap");
            let names = |ps: &[PathBuf]| ps.iter().map(|p| p.display().to_string()).collect::<Vec<_>>();
            match regime {
                Regime::Pretrain => {
                    if out.is_some() {
                        return Err(CliError::Usage("--out applies to the joint regime only; pretrain writes a manifest".into()));
                    }
                    let path = manifest.ok_or_else(|| CliError::Usage("pretrain regime needs --manifest".into()))?;
                    for p in genuine.iter().chain(&pseudo) {
                        io::read_lines(p)?;
                    }
                    let m = pipeline::make_pretrain_manifest(&names(&pseudo), &names(&genuine), seed).map_err(data)?;
                    io::write_text(&path, &formats::render_manifest(&m))?;
                    Ok(())
                }
                Regime::Joint => {
                    let load = |paths: &[PathBuf], kind| -> Result<Corpus, CliError> {
                        let mut all = Corpus::empty(kind);
                        for p in paths {
                            let c = io::read_corpus_as(p, Format::Tsv, kind)?;
                            all.pairs.extend(c.pairs);
                        }
                        Ok(all)
                    };
                    let g = load(&genuine, CorpusKind::Genuine)?;
                    let p = load(&pseudo, CorpusKind::Pseudo)?;
                    let joint = pipeline::compose_joint(&g, &p, seed);
                    log::info!("compose: {} genuine + {} pseudo pairs", g.len(), p.len());
                    let tagged: Vec<_> = joint
                        .into_iter()
                        .map(|(pair, prov)| (pair, (!no_provenance).then_some(prov)))
                        .collect();
                    if let Some(path) = manifest {
                        let m = pipeline::make_joint_manifest(&names(&pseudo), &names(&genuine), seed).map_err(data)?;
                        io::write_text(&path, &formats::render_manifest(&m))?;
                    }
                    emit(out.as_deref(), &io::render_tagged(&tagged))
                }
            }
        }
        Command::Rerank { nbest, src, r2l_model, r2l_scores, length_normalize, out, nbest_out } => {
            let ln = length_normalize.unwrap_or(ctx.config.length_normalize);
            let entries = formats::parse_nbest(&nbest)?;
            let sources = src.as_deref().map(read_sentences).transpose()?;
            let per_line_scores: Option<Vec<f64>> = match &r2l_scores {
                Some(path) => {
                    let lines = io::read_lines(path)?;
                    if lines.len() != entries.len() {
                        return Err(data(format!("{} has {} lines, n-best has {}", path.display(), lines.len(), entries.len())));
                    }
                    let scores = lines
                        .iter()
                        .enumerate()
                        .map(|(i, l)| {
                            let cols: Vec<f64> = l
                                .split_whitespace()
                                .map(str::parse)
                                .collect::<Result<_, _>>()
                                .map_err(|_| data(format!("{}: line {}: bad score", path.display(), i + 1)))?;
                            ensemble_combine(&cols).map_err(|e| data(format!("{}: line {}: {e}", path.display(), i + 1)))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(scores)
                }
                None => None,
            };
            let models = r2l_model.iter().map(|p| formats::parse_toy_scorer(p)).collect::<Result<Vec<_>, _>>()?;
            if !models.is_empty() && models.len() != ctx.config.ensemble_models {
                log::warn!("rerank: {} right-to-left models given, config expects {}", models.len(), ctx.config.ensemble_models);
            }
            let mut groups: BTreeMap<usize, Vec<(Candidate, f64)>> = BTreeMap::new();
            for (i, e) in entries.into_iter().enumerate() {
                let r2l = per_line_scores.as_ref().map_or(0.0, |s| s[i]);
                groups.entry(e.id).or_default().push((e.candidate, r2l));
            }
            let mut best = String::new();
            let mut full = String::new();
            for (id, mut group) in groups {
                let source = match &sources {
                    Some(s) => s.get(id).cloned().ok_or_else(|| data(format!("sentence id {id} has no source line")))?,
                    None if !models.is_empty() => return Err(CliError::Usage("--r2l-model needs --src".into())),
                    None => Sentence::empty(),
                };
                // Same stable order NBestList uses, so precomputed scores stay aligned.
                group.sort_by(|a, b| b.0.l2r_score.total_cmp(&a.0.l2r_score));
                let scores: Vec<f64> = group.iter().map(|(_, s)| *s).collect();
                let list = NBestList::new(source, group.into_iter().map(|(c, _)| c).collect()).map_err(data)?;
                let ranked: Vec<Reranked> = if models.is_empty() {
                    rerank_with_scores(&list, &scores)
                } else {
                    let refs: Vec<&_> = models.iter().collect();
                    rerank_r2l(&list, &refs, ln)
                }
                .map_err(data)?;
                best.push_str(&format!("{}\n", ranked[0].sentence));
                for r in &ranked {
                    full.push_str(&formats::render_nbest_line(id, &r.sentence, r.total()));
                    full.push('\n');
                }
            }
            if let Some(path) = nbest_out {
                io::write_text(&path, &full)?;
            }
            emit(out.as_deref(), &best)
        }
        Command::Gate { src, hyp, verdicts, out } => {
            let sources = read_sentences(&src)?;
            let hyps = read_sentences(&hyp)?;
            if sources.len() != hyps.len() {
                return Err(data(format!("--src has {} lines, --hyp has {}", sources.len(), hyps.len())));
            }
            let verdicts = match verdicts {
                Some(path) => {
                    let v = formats::parse_verdicts(&path)?;
                    if v.len() != sources.len() {
                        return Err(data(format!("--verdicts has {} lines, --src has {}", v.len(), sources.len())));
                    }
                    v
                }
                None => vec![true; sources.len()],
            };
            let gated: Vec<&Sentence> = sources
                .iter()
                .zip(&hyps)
                .zip(&verdicts)
                .map(|((s, h), &flag)| sed_gate(&|_: &Sentence| flag, s, h))
                .collect();
            emit(out.as_deref(), &render_sentences(gated))
        }
        Command::Score { src, hyp, refs } => {
            let sources = read_sentences(&src)?;
            let hyps = read_sentences(&hyp)?;
            let references = refs.iter().map(|r| read_sentences(r)).collect::<Result<Vec<_>, _>>()?;
            let r = score_corpus(&sources, &hyps, &references).map_err(data)?;
            let (p, rc, f) = (100.0 * r.precision, 100.0 * r.recall, 100.0 * r.f_half);
            let record = serde_json::json!({
                "tp": r.tp, "fp": r.fp, "fn": r.fn_,
                "precision": p, "recall": rc, "f0.5": f,
            });
            emit(None, &format!("TP={} FP={} FN={} P={p:.1} R={rc:.1} F0.5={f:.1}\n{record}\n", r.tp, r.fp, r.fn_))
        }
        Command::Sweep { param, values, trials, dev, input, eval_cmd, scorer, work_dir, no_timing, out } => {
            let seed = ctx.seed()?;
            let param = SweepParam::parse(&param).map_err(|e| CliError::Usage(e.to_string()))?;
            let values = if values.is_empty() { param.default_values() } else { values };
            let plan = SweepPlan::new(param, values, trials, seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let scorer = scorer.as_deref().map(formats::parse_toy_scorer).transpose()?;
            let fixed = FixedSettings {
                spec: ctx.config.mu,
                decode: decode_params(&ctx.config, None, None, None, None),
            };
            let dev_corpus;
            let seed_corpus;
            let evaluator = match (eval_cmd, dev) {
                (Some(template), _) => {
                    seed_corpus = read_seed(input.as_deref().expect("required by clap"))?;
                    let work_dir = work_dir.unwrap_or_else(sweep_run::default_work_dir);
                    sweep_run::ensure_dir(&work_dir).map_err(|e| data(format!("{}: {e}", work_dir.display())))?;
                    Evaluator::External(ExternalEvaluator {
                        template,
                        unigram: UnigramTable::from_corpus(&seed_corpus).map_err(data)?,
                        seed_corpus: &seed_corpus,
                        scorer: scorer.as_ref(),
                        fixed,
                        work_dir,
                    })
                }
                (None, Some(path)) => {
                    dev_corpus = read_genuine(&path)?;
                    Evaluator::Builtin(BuiltinEvaluator {
                        unigram: UnigramTable::from_corpus(&dev_corpus).map_err(data)?,
                        dev: &dev_corpus,
                        scorer: scorer.as_ref(),
                        fixed,
                    })
                }
                (None, None) => unreachable!("required by clap"),
            };
            let table = sweep_run::run_parallel(&ctx.pool()?, &plan, &evaluator, !no_timing).map_err(data)?;
            if table.failed > 0 {
                log::warn!("sweep: {} points failed", table.failed);
            }
            emit(out.as_deref(), &render_table(&table))
        }
        Command::Version => unreachable!("handled above"),
    }
}

/// Applies `f` to every sentence of a plain file, or to both sides of a tsv file.
fn bpe_map(
    path: &Path,
    format: Format,
    f: impl Fn(&Sentence) -> Result<Sentence, CliError>,
) -> Result<String, CliError> {
    match format {
        Format::Plain => {
            let sentences = read_sentences(path)?;
            let out = sentences.iter().map(&f).collect::<Result<Vec<_>, _>>()?;
            Ok(render_sentences(&out))
        }
        Format::Tsv => {
            let pairs = io::read_tagged(path)?;
            let out = pairs
                .iter()
                .map(|(p, prov)| {
                    Ok((
                        ParallelPair {
                            source: f(&p.source)?,
                            target: f(&p.target)?,
                        },
                        *prov,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(io::render_tagged(&out))
        }
    }
}
