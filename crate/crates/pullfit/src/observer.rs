//! Synthetic observer: biased noisy percepts of single series, combined by a
//! true mixture weight on compound displays. Ground truth for parameter
//! recovery.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::stimulus::{
    design_pairs, sample_true_pair, CompoundLayout, DesignMeans, FrameCoord, Half, SeriesKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverParams {
    pub bias_line: f64,
    pub sigma_line: f64,
    pub bias_bar: f64,
    pub sigma_bar: f64,
    pub w_line_target: f64,
    pub w_bar_target: f64,
}

impl Default for ObserverParams {
    /// Biases are the reported overall mean errors (line -4.49 px, bar
    /// +4.19 px). Spreads are back-of-envelope sd ~ se * sqrt(n) from the
    /// reported standard errors; weights default to the reference fitted
    /// values so a default simulation exercises the interesting regime.
    fn default() -> Self {
        ObserverParams {
            bias_line: -4.49,
            sigma_line: 6.5,
            bias_bar: 4.19,
            sigma_bar: 5.1,
            w_line_target: 0.945,
            w_bar_target: 0.971,
        }
    }
}

impl ObserverParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("bias_line", self.bias_line), ("bias_bar", self.bias_bar)] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("observer.{name} must be finite")));
            }
        }
        for (name, v) in [
            ("sigma_line", self.sigma_line),
            ("sigma_bar", self.sigma_bar),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "observer.{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("w_line_target", self.w_line_target),
            ("w_bar_target", self.w_bar_target),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!(
                    "observer.{name} must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn bias(&self, kind: SeriesKind) -> f64 {
        match kind {
            SeriesKind::Line => self.bias_line,
            SeriesKind::Bar => self.bias_bar,
        }
    }

    pub fn sigma(&self, kind: SeriesKind) -> f64 {
        match kind {
            SeriesKind::Line => self.sigma_line,
            SeriesKind::Bar => self.sigma_bar,
        }
    }

    pub fn weight(&self, target_kind: SeriesKind) -> f64 {
        match target_kind {
            SeriesKind::Line => self.w_line_target,
            SeriesKind::Bar => self.w_bar_target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Single,
    Compound,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Single => "single",
            Condition::Compound => "compound",
        })
    }
}

/// One position estimate. Estimates may exit the frame; true means never do.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub condition: Condition,
    pub target_kind: SeriesKind,
    pub target_half: Half,
    pub true_target: f64,
    pub nontarget_kind: Option<SeriesKind>,
    pub true_nontarget: Option<f64>,
    pub estimate: f64,
}

impl TrialRecord {
    pub fn error(&self) -> f64 {
        self.estimate - self.true_target
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrialFilter {
    pub condition: Option<Condition>,
    pub kind: Option<SeriesKind>,
    pub half: Option<Half>,
}

impl TrialFilter {
    pub fn single(kind: SeriesKind) -> Self {
        TrialFilter {
            condition: Some(Condition::Single),
            kind: Some(kind),
            half: None,
        }
    }

    pub fn compound(kind: SeriesKind) -> Self {
        TrialFilter {
            condition: Some(Condition::Compound),
            kind: Some(kind),
            half: None,
        }
    }

    pub fn matches(&self, t: &TrialRecord) -> bool {
        self.condition.is_none_or(|c| c == t.condition)
            && self.kind.is_none_or(|k| k == t.target_kind)
            && self.half.is_none_or(|h| h == t.target_half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub n: usize,
    pub mean_error: f64,
    pub se: f64,
}

/// How many trials of each flavor to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimCounts {
    pub n_single_line: usize,
    pub n_single_bar: usize,
    pub n_compound_line_target: usize,
    pub n_compound_bar_target: usize,
}

impl Default for SimCounts {
    /// Compound counts mirror the reference dataset (773 line / 779 bar).
    fn default() -> Self {
        SimCounts {
            n_single_line: 1000,
            n_single_bar: 1000,
            n_compound_line_target: 773,
            n_compound_bar_target: 779,
        }
    }
}

/// percept = true position + Normal(bias, sigma) estimation error.
pub fn sample_single_percept<R: Rng>(
    kind: SeriesKind,
    true_mean: f64,
    params: &ObserverParams,
    rng: &mut R,
) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    true_mean + params.bias(kind) + params.sigma(kind) * z
}

/// y* = w * x*_target + (1 - w) * x*_nontarget.
pub fn compound_estimate(x_target: f64, x_nontarget: f64, w: f64) -> f64 {
    w * x_target + (1.0 - w) * x_nontarget
}

/// Generate a full synthetic dataset: single trials for each kind, then
/// compound trials for each target kind, ids dense from 0. Per compound
/// trial the rng order is (pair, target percept, non-target percept).
pub fn simulate_dataset<R: Rng>(
    design: &DesignMeans,
    params: &ObserverParams,
    counts: SimCounts,
    layout: CompoundLayout,
    rng: &mut R,
) -> Result<Vec<TrialRecord>> {
    params.validate()?;
    let total = counts.n_single_line
        + counts.n_single_bar
        + counts.n_compound_line_target
        + counts.n_compound_bar_target;
    let mut trials = Vec::with_capacity(total);
    let mut next_id = 0u64;

    for (kind, n) in [
        (SeriesKind::Line, counts.n_single_line),
        (SeriesKind::Bar, counts.n_single_bar),
    ] {
        let half = layout.half_of(kind);
        let triple = design.triple(kind, half);
        for _ in 0..n {
            let true_mean = triple[rng.random_range(0..3)].get();
            let estimate = sample_single_percept(kind, true_mean, params, rng);
            trials.push(TrialRecord {
                trial_id: next_id,
                condition: Condition::Single,
                target_kind: kind,
                target_half: half,
                true_target: true_mean,
                nontarget_kind: None,
                true_nontarget: None,
                estimate,
            });
            next_id += 1;
        }
    }

    for (kind, n) in [
        (SeriesKind::Line, counts.n_compound_line_target),
        (SeriesKind::Bar, counts.n_compound_bar_target),
    ] {
        let pairs = design_pairs(design, kind, layout);
        let w = params.weight(kind);
        for _ in 0..n {
            let pair = sample_true_pair(&pairs, rng)?;
            let x_t = sample_single_percept(kind, pair.target_true.get(), params, rng);
            let x_nt =
                sample_single_percept(pair.nontarget_kind, pair.nontarget_true.get(), params, rng);
            trials.push(TrialRecord {
                trial_id: next_id,
                condition: Condition::Compound,
                target_kind: kind,
                target_half: layout.half_of(kind),
                true_target: pair.target_true.get(),
                nontarget_kind: Some(pair.nontarget_kind),
                true_nontarget: Some(pair.nontarget_true.get()),
                estimate: compound_estimate(x_t, x_nt, w),
            });
            next_id += 1;
        }
    }

    Ok(trials)
}

pub fn summarize_errors(trials: &[TrialRecord], filter: &TrialFilter) -> Result<ErrorSummary> {
    let errors: Vec<f64> = trials
        .iter()
        .filter(|t| filter.matches(t))
        .map(|t| t.error())
        .collect();
    if errors.is_empty() {
        return Err(Error::EmptySelection);
    }
    let n = errors.len();
    let se = if n == 1 {
        0.0
    } else {
        stats::sample_sd(&errors) / (n as f64).sqrt()
    };
    Ok(ErrorSummary {
        n,
        mean_error: stats::mean(&errors),
        se,
    })
}

/// True-mean coordinate validated against the frame; convenience for
/// constructing records by hand.
pub fn frame(v: f64) -> Result<FrameCoord> {
    FrameCoord::new(v)
}
