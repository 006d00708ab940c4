//! Text formats for merge tables, toy scorers, manifests, n-best lists and
//! detector verdicts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use pseudo_forge_core::bpe::{MergeTable, DEFAULT_MARKER};
use pseudo_forge_core::corpus::Provenance;
use pseudo_forge_core::decode::{Next, ToyScorer, ANY_SOURCE};
use pseudo_forge_core::pipeline::{DatasetManifest, Regime, Stage, StageInput};
use pseudo_forge_core::rerank::Candidate;
use pseudo_forge_core::{Sentence, Token};

use crate::io::{read_lines, IoError};

pub const MERGES_HEADER: &str = "#version: pseudo-forge-bpe-1";
pub const MANIFEST_SCHEMA: &str = "pseudo-forge-manifest-1";
pub const VOCAB_HEADER: &str = "#vocab:";
const FIELD_SEP: &str = "|||";

pub fn render_merges(table: &MergeTable) -> String {
    let mut out = String::from(MERGES_HEADER);
    out.push('\n');
    for (l, r) in table.merges() {
        let _ = writeln!(out, "{l} {r}");
    }
    out
}

pub fn read_merges(path: &Path) -> Result<MergeTable, IoError> {
    let lines = read_lines(path)?;
    match lines.first() {
        Some(h) if h == MERGES_HEADER => {}
        _ => return Err(IoError::format(path, 1, format!("expected header '{MERGES_HEADER}'"))),
    }
    let mut merges = Vec::with_capacity(lines.len() - 1);
    for (i, line) in lines.iter().enumerate().skip(1) {
        let parts: Vec<&str> = line.split(' ').collect();
        let [l, r] = parts[..] else {
            return Err(IoError::format(path, i + 1, "expected 'left right'"));
        };
        merges.push((l.to_string(), r.to_string()));
    }
    MergeTable::from_merges(merges, DEFAULT_MARKER).map_err(|e| IoError::invalid(path, e.to_string()))
}

/// First line of a (source, prefix) group and its entries.
type Group = (usize, Vec<(Next, f64)>);

/// Toy scorer file: a `#vocab:` header, then one `source ||| prefix ||| token prob`
/// record per line. Records sharing a (source, prefix) form one distribution.
/// Blank lines and lines starting with `#` after the header are ignored.
pub fn parse_toy_scorer(path: &Path) -> Result<ToyScorer, IoError> {
    let lines = read_lines(path)?;
    let vocab_line = lines
        .first()
        .and_then(|h| h.strip_prefix(VOCAB_HEADER))
        .ok_or_else(|| IoError::format(path, 1, format!("expected '{VOCAB_HEADER} tok ...' header")))?;
    let vocab = vocab_line
        .split_whitespace()
        .map(Token::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| IoError::format(path, 1, e.to_string()))?;
    let mut scorer = ToyScorer::new(vocab);
    let mut groups: BTreeMap<(String, String), Group> = BTreeMap::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let n = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(FIELD_SEP).map(str::trim).collect();
        let [source, prefix, entry] = fields[..] else {
            return Err(IoError::format(path, n, "expected 'source ||| prefix ||| token prob'"));
        };
        let (tok, prob) = entry
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| IoError::format(path, n, "expected 'token prob'"))?;
        let next = Next::parse(tok.trim()).map_err(|e| IoError::format(path, n, e.to_string()))?;
        let prob: f64 = prob
            .parse()
            .map_err(|_| IoError::format(path, n, format!("bad probability '{prob}'")))?;
        let source = if source.is_empty() { ANY_SOURCE } else { source };
        groups
            .entry((Sentence::parse(source).to_string(), Sentence::parse(prefix).to_string()))
            .or_insert_with(|| (n, Vec::new()))
            .1
            .push((next, prob));
    }
    for ((source, prefix), (first_line, dist)) in groups {
        scorer
            .insert(&source, &prefix, dist)
            .map_err(|e| IoError::format(path, first_line, e.to_string()))?;
    }
    Ok(scorer)
}

pub fn render_toy_scorer(scorer: &ToyScorer) -> String {
    let mut out = String::from(VOCAB_HEADER);
    for t in scorer.vocab() {
        out.push(' ');
        out.push_str(t.as_str());
    }
    out.push('\n');
    for (source, prefix, dist) in scorer.entries() {
        for (next, p) in dist {
            let _ = writeln!(out, "{source} {FIELD_SEP} {prefix} {FIELD_SEP} {} {p}", next.as_str());
        }
    }
    out
}

pub fn render_manifest(manifest: &DatasetManifest) -> String {
    let mut out = format!("#schema: {MANIFEST_SCHEMA}\nregime = {}\nseed = {}\n", manifest.regime.as_str(), manifest.seed);
    for stage in &manifest.stages {
        let _ = writeln!(out, "\n[stage {}]", stage.name);
        for input in &stage.inputs {
            let _ = writeln!(out, "{} = {}", input.role.as_str(), input.path);
        }
    }
    out
}

pub fn parse_manifest(path: &Path) -> Result<DatasetManifest, IoError> {
    let lines = read_lines(path)?;
    let schema = format!("#schema: {MANIFEST_SCHEMA}");
    if lines.first() != Some(&schema) {
        return Err(IoError::format(path, 1, format!("expected '{schema}'")));
    }
    let mut regime = None;
    let mut seed = None;
    let mut stages: Vec<Stage> = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix("[stage ").and_then(|r| r.strip_suffix(']')) {
            stages.push(Stage {
                name: name.trim().to_string(),
                inputs: Vec::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| IoError::format(path, n, "expected 'key = value'"))?;
        match (stages.last_mut(), key) {
            (None, "regime") => {
                regime = Some(Regime::parse(value).ok_or_else(|| IoError::format(path, n, format!("unknown regime '{value}'")))?)
            }
            (None, "seed") => seed = Some(value.parse().map_err(|_| IoError::format(path, n, "bad seed"))?),
            (Some(stage), role) => {
                let role = Provenance::parse(role).ok_or_else(|| IoError::format(path, n, format!("unknown role '{role}'")))?;
                stage.inputs.push(StageInput {
                    role,
                    path: value.to_string(),
                });
            }
            (None, other) => return Err(IoError::format(path, n, format!("unknown key '{other}'"))),
        }
    }
    let manifest = DatasetManifest {
        regime: regime.ok_or_else(|| IoError::invalid(path, "missing 'regime'"))?,
        stages,
        seed: seed.unwrap_or(0),
    };
    manifest.validate().map_err(|e| IoError::invalid(path, e.to_string()))?;
    Ok(manifest)
}

/// One `id ||| tokens ||| score` line.
#[derive(Clone, Debug, PartialEq)]
pub struct NBestEntry {
    pub id: usize,
    pub candidate: Candidate,
}

pub fn parse_nbest(path: &Path) -> Result<Vec<NBestEntry>, IoError> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split(FIELD_SEP).map(str::trim).collect();
        let [id, tokens, score] = fields[..] else {
            return Err(IoError::format(path, n, "expected 'id ||| tokens ||| score'"));
        };
        let id = id.parse().map_err(|_| IoError::format(path, n, format!("bad sentence id '{id}'")))?;
        let score: f64 = score
            .parse()
            .map_err(|_| IoError::format(path, n, format!("bad score '{score}'")))?;
        if !score.is_finite() && score != f64::NEG_INFINITY {
            return Err(IoError::format(path, n, format!("bad score '{score}'")));
        }
        out.push(NBestEntry {
            id,
            candidate: Candidate {
                sentence: Sentence::parse(tokens),
                l2r_score: score,
            },
        });
    }
    Ok(out)
}

pub fn render_nbest_line(id: usize, sentence: &Sentence, score: f64) -> String {
    format!("{id} {FIELD_SEP} {sentence} {FIELD_SEP} {score}")
}

pub fn parse_verdicts(path: &Path) -> Result<Vec<bool>, IoError> {
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| match l.trim() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(IoError::format(path, i + 1, format!("expected 0 or 1, found '{other}'"))),
        })
        .collect()
}

/// Every non-whitespace character in the file.
pub fn read_alphabet(path: &Path) -> Result<Vec<char>, IoError> {
    Ok(read_lines(path)?.iter().flat_map(|l| l.chars()).filter(|c| !c.is_whitespace()).collect())
}
