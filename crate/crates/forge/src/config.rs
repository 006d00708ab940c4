//! Flat `key = value` configuration shared by all subcommands.

use std::fmt;
use std::path::Path;

use pseudo_forge_core::bpe::DEFAULT_MERGES;
use pseudo_forge_core::decode::{DEFAULT_BEAM, DEFAULT_BETA, DEFAULT_MAX_LEN};
use pseudo_forge_core::noise::NoiseSpec;
use pseudo_forge_core::rerank::DEFAULT_ENSEMBLE;
use pseudo_forge_core::spell::DEFAULT_RATE;

use crate::io::{read_lines, IoError};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub mu: NoiseSpec,
    pub beta_random: f64,
    pub beam_width: usize,
    pub length_normalize: bool,
    pub sse_rate: f64,
    pub bpe_merges: usize,
    pub max_len: usize,
    pub ensemble_models: usize,
    pub seed: Option<u64>,
    /// `None` means one worker per logical core.
    pub workers: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mu: NoiseSpec::default(),
            beta_random: DEFAULT_BETA,
            beam_width: DEFAULT_BEAM,
            length_normalize: true,
            sse_rate: DEFAULT_RATE,
            bpe_merges: DEFAULT_MERGES,
            max_len: DEFAULT_MAX_LEN,
            ensemble_models: DEFAULT_ENSEMBLE,
            seed: None,
            workers: None,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "on" | "yes" | "1" => Some(true),
        "false" | "off" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl PipelineConfig {
    /// Applies one setting. Unknown keys are errors so typos do not go unnoticed.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = || format!("invalid value '{value}' for {key}");
        match key {
            "mu" => self.mu = NoiseSpec::parse(value).map_err(|e| format!("mu: {e}"))?,
            "mu_mask" => self.mu = NoiseSpec::derive(value.parse().map_err(|_| bad())?).map_err(|e| format!("mu_mask: {e}"))?,
            "beta_random" => self.beta_random = value.parse().map_err(|_| bad())?,
            "beam_width" => self.beam_width = value.parse().map_err(|_| bad())?,
            "length_normalize" => self.length_normalize = parse_bool(value).ok_or_else(bad)?,
            "sse_rate" => self.sse_rate = value.parse().map_err(|_| bad())?,
            "bpe_merges" => self.bpe_merges = value.parse().map_err(|_| bad())?,
            "max_len" => self.max_len = value.parse().map_err(|_| bad())?,
            "ensemble_models" => self.ensemble_models = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = Some(value.parse().map_err(|_| bad())?),
            "workers" => self.workers = Some(value.parse().map_err(|_| bad())?).filter(|&w| w > 0),
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self, (usize, String)> {
        let mut config = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| (i + 1, "expected 'key = value'".to_string()))?;
            config.set(k.trim(), v.trim()).map_err(|e| (i + 1, e))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = read_lines(path)?.join("\n");
        Self::parse_text(&text).map_err(|(line, msg)| IoError::format(path, line, msg))
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<u64>| v.map_or_else(|| "unset".to_string(), |v| v.to_string());
        write!(
            f,
            "mu={} beta_random={} beam_width={} length_normalize={} sse_rate={} bpe_merges={} max_len={} ensemble_models={} seed={} workers={}",
            self.mu,
            self.beta_random,
            self.beam_width,
            self.length_normalize,
            self.sse_rate,
            self.bpe_merges,
            self.max_len,
            self.ensemble_models,
            opt(self.seed),
            self.workers.map_or_else(|| "auto".to_string(), |w| w.to_string()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_module_defaults() {
        let c = PipelineConfig::default();
        assert_eq!(c.mu.probabilities(), [0.5, 0.15, 0.15, 0.2]);
        assert_eq!((c.beta_random, c.beam_width, c.length_normalize), (6.0, 5, true));
        assert_eq!((c.sse_rate, c.bpe_merges, c.ensemble_models), (0.003, 8000, 4));
    }

    #[test]
    fn parses_flat_file() {
        let c = PipelineConfig::parse_text("# experiment 3\nseed = 42\nmu_mask=0.3\nlength_normalize = off\n").unwrap();
        assert_eq!(c.seed, Some(42));
        assert!((c.mu.probabilities()[0] - 0.3).abs() < 1e-12);
        assert!(!c.length_normalize);
        assert_eq!(PipelineConfig::parse_text("a=1\n").unwrap_err().0, 1);
        assert_eq!(PipelineConfig::parse_text("\nseed\n").unwrap_err().0, 2);
    }
}
