//! Monte Carlo census of support-vector configurations.
//!
//! Each trial draws two class centers uniformly from `[−a, a]^dim`, samples
//! Gaussian clouds around them, trains a hard-margin separator and records
//! how many support vectors each class contributes. Draws that are not
//! linearly separable are discarded and redrawn in full.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, Finding};
use crate::sampling::{self, Gaussian};
use crate::svm::{self, Label, LabeledPointSet, TrainParams};
use crate::{Error, Result};
use rand::Rng;

pub const DEFAULT_POINTS_PER_CLASS: usize = 20;
pub const DEFAULT_DIM: usize = 2;
pub const DEFAULT_STD_DEV: f64 = 1.0;
pub const DEFAULT_MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Half-width of the box the centers are drawn from.
    pub a: f64,
    pub points_per_class: usize,
    pub dim: usize,
    pub std_dev: f64,
    pub trials: u64,
    pub seed: u64,
    pub max_rejections_per_trial: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl ExperimentConfig {
    pub fn new(a: f64, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            a,
            points_per_class: DEFAULT_POINTS_PER_CLASS,
            dim: DEFAULT_DIM,
            std_dev: DEFAULT_STD_DEV,
            trials,
            seed,
            max_rejections_per_trial: DEFAULT_MAX_REJECTIONS,
            tol: svm::DEFAULT_TOL,
            max_iter: svm::DEFAULT_MAX_ITER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(what.to_string()));
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad("a must be positive");
        }
        if !(self.std_dev.is_finite() && self.std_dev > 0.0) {
            return bad("std_dev must be positive");
        }
        if self.points_per_class == 0 || self.dim == 0 {
            return bad("points_per_class and dim must be positive");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.max_rejections_per_trial == 0 {
            return bad("max_rejections_per_trial must be positive");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) || self.max_iter == 0 {
            return bad("tol and max_iter must be positive");
        }
        Ok(())
    }

    fn train_params(&self) -> TrainParams {
        TrainParams {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

fn draw<R: Rng>(cfg: &ExperimentConfig, rng: &mut R) -> Result<LabeledPointSet> {
    let mut g = Gaussian::default();
    let mut cloud = |rng: &mut R| -> Vec<Vec<f64>> {
        let center: Vec<f64> = (0..cfg.dim).map(|_| rng.gen_range(-cfg.a..=cfg.a)).collect();
        (0..cfg.points_per_class)
            .map(|_| center.iter().map(|c| c + cfg.std_dev * g.sample(rng)).collect())
            .collect()
    };
    let pos = cloud(rng);
    let neg = cloud(rng);
    let labels = std::iter::repeat(Label::Positive)
        .take(pos.len())
        .chain(std::iter::repeat(Label::Negative).take(neg.len()))
        .collect();
    LabeledPointSet::new(pos.into_iter().chain(neg).collect(), labels)
}

/// Draws trial `trial_index`: positives first, then negatives. Returns the
/// data and the number of discarded non-separable draws.
pub fn generate_trial_counted(
    cfg: &ExperimentConfig,
    trial_index: u64,
) -> Result<(LabeledPointSet, usize)> {
    cfg.validate()?;
    let mut rng = sampling::stream_rng(cfg.seed, trial_index);
    for rejected in 0..=cfg.max_rejections_per_trial {
        let data = draw(cfg, &mut rng)?;
        if svm::is_linearly_separable(&data)? {
            return Ok((data, rejected));
        }
    }
    Err(Error::RejectionLimit(cfg.max_rejections_per_trial))
}

pub fn generate_trial(cfg: &ExperimentConfig, trial_index: u64) -> Result<LabeledPointSet> {
    generate_trial_counted(cfg, trial_index).map(|(d, _)| d)
}

/// One censused trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n_pos_sv: usize,
    pub n_neg_sv: usize,
    pub margin: f64,
    pub rejected_draws: usize,
    pub flags: Vec<Finding>,
}

impl TrialRecord {
    pub fn total_sv(&self) -> usize {
        self.n_pos_sv + self.n_neg_sv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitCount {
    pub n_pos_sv: usize,
    pub n_neg_sv: usize,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedTrial {
    pub trial: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult {
    pub config: ExperimentConfig,
    /// Completed trials per (positive, negative) support-vector split.
    pub counts: Vec<SplitCount>,
    pub total_by_sv_count: BTreeMap<usize, u64>,
    /// Non-separable draws discarded across all trials.
    pub rejected_trials: u64,
    /// Trials that raised a degeneracy finding; they are still counted.
    pub flagged_trials: Vec<u64>,
    pub failed_trials: Vec<FailedTrial>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl CensusResult {
    pub fn completed(&self) -> u64 {
        self.total_by_sv_count.values().sum()
    }

    /// Fraction of completed trials with exactly `k` support vectors.
    pub fn sv_fraction(&self, k: usize) -> f64 {
        let done = self.completed();
        if done == 0 {
            return 0.0;
        }
        *self.total_by_sv_count.get(&k).unwrap_or(&0) as f64 / done as f64
    }

    pub fn two_sv_fraction(&self) -> f64 {
        self.sv_fraction(2)
    }
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialRecord> {
    let (data, rejected_draws) = generate_trial_counted(cfg, trial)?;
    let sol = svm::train_hard_margin(&data, cfg.train_params())?;
    let report = analysis::classify_configuration(&sol, &data);
    Ok(TrialRecord {
        trial,
        n_pos_sv: report.n_pos_sv,
        n_neg_sv: report.n_neg_sv,
        margin: sol.margin,
        rejected_draws,
        flags: report.degeneracy_flags,
    })
}

/// Runs every trial and tallies the support-vector configurations. The
/// result depends only on `cfg`, not on thread count or scheduling.
pub fn census(cfg: &ExperimentConfig) -> Result<CensusResult> {
    cfg.validate()?;
    let outcomes: Vec<(u64, Result<TrialRecord>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| (t, run_trial(cfg, t)))
        .collect();

    let mut splits: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut total_by_sv_count = BTreeMap::new();
    let mut rejected_trials = 0u64;
    let mut flagged_trials = Vec::new();
    let mut failed_trials = Vec::new();
    let mut records = Vec::with_capacity(outcomes.len());
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(rec) => {
                *splits.entry((rec.n_pos_sv, rec.n_neg_sv)).or_default() += 1;
                *total_by_sv_count.entry(rec.total_sv()).or_default() += 1;
                rejected_trials += rec.rejected_draws as u64;
                if !rec.flags.is_empty() {
                    flagged_trials.push(trial);
                }
                records.push(rec);
            }
            Err(e) => failed_trials.push(FailedTrial {
                trial,
                error: e.to_string(),
            }),
        }
    }
    Ok(CensusResult {
        config: *cfg,
        counts: splits
            .into_iter()
            .map(|((p, n), trials)| SplitCount {
                n_pos_sv: p,
                n_neg_sv: n,
                trials,
            })
            .collect(),
        total_by_sv_count,
        rejected_trials,
        flagged_trials,
        failed_trials,
        records,
    })
}
