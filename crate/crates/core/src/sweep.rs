//! Parameter sweeps over the noise mask probability, the beam noise scale and
//! the pseudo-data size, producing a plot-ready table.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use thiserror::Error;

use crate::rng::{domain, mix64};

pub const DEFAULT_TRIALS: usize = 5;
pub const TABLE_HEADER: &str = "param\tvalue\ttrial\tseed\tP\tR\tF0.5\tseconds";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("sweep needs at least one value")]
    NoValues,
    #[error("sweep values must be strictly increasing and finite")]
    NotIncreasing,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{param} value {value} out of range")]
    BadValue { param: &'static str, value: f64 },
    #[error("unknown sweep parameter '{0}' (expected mu-mask, beta or dp-size)")]
    UnknownParam(String),
    #[error("cannot aggregate zero trials")]
    EmptyAggregate,
    #[error("expected {expected} point results, got {got}")]
    ResultCount { expected: usize, got: usize },
    #[error("every sweep point failed")]
    AllFailed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParam {
    MuMask,
    Beta,
    DpSize,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::MuMask => "mu-mask",
            SweepParam::Beta => "beta",
            SweepParam::DpSize => "dp-size",
        }
    }

    pub fn parse(text: &str) -> Result<Self, SweepError> {
        match text {
            "mu-mask" | "mu_mask" => Ok(SweepParam::MuMask),
            "beta" | "beta-random" | "beta_random" => Ok(SweepParam::Beta),
            "dp-size" | "dp_size" => Ok(SweepParam::DpSize),
            other => Err(SweepError::UnknownParam(other.into())),
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::MuMask => alloc::vec![0.1, 0.3, 0.5, 0.7],
            SweepParam::Beta => alloc::vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            SweepParam::DpSize => alloc::vec![100.0, 300.0, 1000.0, 3000.0],
        }
    }

    fn check(self, value: f64) -> Result<(), SweepError> {
        let ok = match self {
            // The keep share stays fixed at 0.2, so the mask share is capped at 0.8.
            SweepParam::MuMask => (0.0..=0.8).contains(&value),
            SweepParam::Beta => value >= 0.0,
            SweepParam::DpSize => value >= 1.0 && value == libm::round(value),
        };
        if ok {
            Ok(())
        } else {
            Err(SweepError::BadValue {
                param: self.as_str(),
                value,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    param: SweepParam,
    values: Vec<f64>,
    trials: usize,
    base_seed: u64,
}

impl SweepPlan {
    pub fn new(param: SweepParam, values: Vec<f64>, trials: usize, base_seed: u64) -> Result<Self, SweepError> {
        if values.is_empty() {
            return Err(SweepError::NoValues);
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SweepError::NotIncreasing);
        }
        if trials == 0 {
            return Err(SweepError::NoTrials);
        }
        for &v in &values {
            param.check(v)?;
        }
        Ok(SweepPlan {
            param,
            values,
            trials,
            base_seed,
        })
    }

    pub fn param(&self) -> SweepParam {
        self.param
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    /// Every (value, trial) in plan order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.values.len() * self.trials);
        for &value in &self.values {
            for trial in 0..self.trials {
                out.push(SweepPoint {
                    value,
                    trial,
                    seed: trial_seed(self.base_seed, value, trial),
                });
            }
        }
        out
    }
}

/// Depends only on the grid value, not its position, so adding values
/// leaves existing rows unchanged.
pub fn trial_seed(base_seed: u64, value: f64, trial: usize) -> u64 {
    let h = mix64(value.to_bits() ^ mix64(trial as u64 ^ mix64(domain::SWEEP)));
    mix64(h ^ base_seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
}

/// Precision, recall and F0.5 on the 0–100 scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_half: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `None` on aggregate rows.
    pub trial: Option<usize>,
    pub seed: Option<u64>,
    /// `None` when the point (or every trial of an aggregate) failed.
    pub metrics: Option<Metrics>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub failed: usize,
}

/// Mean of P, R and F0.5; F is averaged, not recomputed from the mean P and R.
pub fn aggregate_trials(trials: &[Metrics]) -> Result<Metrics, SweepError> {
    if trials.is_empty() {
        return Err(SweepError::EmptyAggregate);
    }
    let n = trials.len() as f64;
    let mean = |f: fn(&Metrics) -> f64| trials.iter().map(f).sum::<f64>() / n;
    Ok(Metrics {
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f_half: mean(|m| m.f_half),
    })
}

/// Outcome of one point: metrics or a failure, plus elapsed seconds.
pub type PointResult = (Option<Metrics>, f64);

/// Builds the table from per-point results given in [`SweepPlan::points`] order.
/// Aggregates average the successful trials; their seconds are the sum.
pub fn assemble(plan: &SweepPlan, results: &[PointResult]) -> Result<SweepTable, SweepError> {
    let points = plan.points();
    if results.len() != points.len() {
        return Err(SweepError::ResultCount {
            expected: points.len(),
            got: results.len(),
        });
    }
    let mut rows = Vec::with_capacity(points.len() + plan.values.len());
    let mut failed = 0;
    for (chunk_points, chunk_results) in points.chunks(plan.trials).zip(results.chunks(plan.trials)) {
        let mut ok = Vec::with_capacity(plan.trials);
        let mut seconds = 0.0;
        for (p, (metrics, secs)) in chunk_points.iter().zip(chunk_results) {
            match metrics {
                Some(m) => ok.push(*m),
                None => failed += 1,
            }
            seconds += secs;
            rows.push(SweepRow {
                value: p.value,
                trial: Some(p.trial),
                seed: Some(p.seed),
                metrics: *metrics,
                seconds: *secs,
            });
        }
        rows.push(SweepRow {
            value: chunk_points[0].value,
            trial: None,
            seed: None,
            metrics: aggregate_trials(&ok).ok(),
            seconds,
        });
    }
    if failed == points.len() {
        return Err(SweepError::AllFailed);
    }
    Ok(SweepTable {
        param: plan.param,
        rows,
        failed,
    })
}

/// Runs every point sequentially. `clock` returns seconds from any fixed origin.
pub fn run_sweep<E, C>(plan: &SweepPlan, mut evaluate: E, mut clock: C) -> Result<SweepTable, SweepError>
where
    E: FnMut(&SweepPoint) -> Option<Metrics>,
    C: FnMut() -> f64,
{
    let results: Vec<PointResult> = plan
        .points()
        .iter()
        .map(|p| {
            let start = clock();
            let m = evaluate(p);
            (m, clock() - start)
        })
        .collect();
    assemble(plan, &results)
}

/// Tab-separated table with [`TABLE_HEADER`]. Failed cells read `NA`;
/// aggregate rows carry `mean` in the trial column and `-` as seed.
pub fn render_table(table: &SweepTable) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for row in &table.rows {
        let trial = row.trial.map_or_else(|| String::from("mean"), |t| format!("{t}"));
        let seed = row.seed.map_or_else(|| String::from("-"), |s| format!("{s}"));
        let metrics = match row.metrics {
            Some(m) => format!("{:.4}\t{:.4}\t{:.4}", m.precision, m.recall, m.f_half),
            None => String::from("NA\tNA\tNA"),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.3}",
            table.param.as_str(),
            row.value,
            trial,
            seed,
            metrics,
            row.seconds
        );
    }
    out
}
