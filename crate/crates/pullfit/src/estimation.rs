//! Mixture-weight estimation.
//!
//! The likelihood of observed compound estimates is approximated by kernel
//! density over M synthetic samples (a stochastic, simulation-based
//! likelihood). Within one optimizer run the synthetic draws are pinned by a
//! common-random-numbers seed, making the objective a deterministic, smooth
//! function of w that a bounded Brent search can minimize. The repeat
//! protocol refits with fresh seeds and random starting weights to expose
//! the stochastic variability the intervals summarize.
//!
//! The two weights are fit by independent 1-D searches: line-target
//! observations never touch w_bar and vice versa, so the joint likelihood
//! factorizes and the pair of searches is exactly equivalent to a 2-D joint
//! fit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::{empirical_from_trials, synthesize_compound, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::kde::{build_kde, silverman_bandwidth};
use crate::observer::{Condition, TrialRecord};
use crate::optimize::brent_min;
use crate::seed::{self, purpose};
use crate::stats;
use crate::stimulus::{FrameCoord, SeriesKind, TruePair};

/// Fallback bandwidth when every synthetic sample is identical (point-mass
/// error distributions): half a pixel, the quantization scale of the data.
/// Silverman's rule is undefined at zero spread; without a fallback a
/// point-mass construction could never be fit at all.
pub const DEGENERATE_BANDWIDTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Synthetic samples per likelihood evaluation.
    pub m: usize,
    pub repeats: usize,
    pub start_lo: f64,
    pub start_hi: f64,
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub grid_size: usize,
    pub density_floor: f64,
    pub optimizer_tol: f64,
    pub base_seed: u64,
    pub hdi_mass: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            m: 10_000,
            repeats: 50,
            start_lo: 0.9,
            start_hi: 1.0,
            weight_lo: 0.0,
            weight_hi: 1.0,
            grid_size: 512,
            density_floor: 1e-12,
            optimizer_tol: 1e-4,
            base_seed: 42,
            hdi_mass: 0.95,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Validation(m));
        if !(0.0 <= self.weight_lo && self.weight_lo < self.weight_hi && self.weight_hi <= 1.0) {
            return err(format!(
                "weight bounds [{}, {}] must satisfy 0 <= lo < hi <= 1",
                self.weight_lo, self.weight_hi
            ));
        }
        if !(self.weight_lo <= self.start_lo
            && self.start_lo <= self.start_hi
            && self.start_hi <= self.weight_hi)
        {
            return err(format!(
                "start interval [{}, {}] must lie within weight bounds [{}, {}]",
                self.start_lo, self.start_hi, self.weight_lo, self.weight_hi
            ));
        }
        if !(self.hdi_mass > 0.0 && self.hdi_mass <= 1.0) {
            return err(format!("hdi_mass {} must lie in (0, 1]", self.hdi_mass));
        }
        if self.m < 2 {
            return err(format!("m = {} too small, need at least 2", self.m));
        }
        if self.repeats == 0 {
            return err("repeats must be at least 1".into());
        }
        if self.grid_size < 16 {
            return err(format!("grid_size = {} too small, need at least 16", self.grid_size));
        }
        if !(self.density_floor.is_finite() && self.density_floor > 0.0) {
            return err(format!("density_floor {} must be positive", self.density_floor));
        }
        if !(self.optimizer_tol.is_finite() && self.optimizer_tol > 0.0) {
            return err(format!("optimizer_tol {} must be positive", self.optimizer_tol));
        }
        Ok(())
    }
}

/// Everything one target kind's likelihood needs.
#[derive(Debug, Clone, Copy)]
pub struct FitContext<'a> {
    pub target_kind: SeriesKind,
    pub target_dist: &'a EmpiricalDistribution,
    pub nontarget_dist: &'a EmpiricalDistribution,
    pub pairs: &'a [TruePair],
    pub observations: &'a [f64],
}

fn nll_unbounded(w: f64, ctx: &FitContext, cfg: &FitConfig, crn_seed: u64) -> Result<f64> {
    let mut rng = seed::rng_from(crn_seed);
    let samples = synthesize_compound(
        ctx.target_dist,
        ctx.nontarget_dist,
        ctx.pairs,
        w,
        cfg.m,
        &mut rng,
    )?;
    let h = match silverman_bandwidth(&samples.values) {
        Ok(h) => h,
        Err(Error::DegenerateDistribution) => DEGENERATE_BANDWIDTH,
        Err(e) => return Err(e),
    };
    let kde = build_kde(&samples.values, h, cfg.grid_size, cfg.density_floor)?;
    Ok(-(kde.log_likelihood(ctx.observations)?))
}

/// Negative log-likelihood of the observations under the synthetic mixture
/// at weight w. Deterministic in (w, crn_seed, inputs, cfg): the same seed
/// reproduces the same pair/error draws regardless of w.
pub fn nll_for_weight(w: f64, ctx: &FitContext, cfg: &FitConfig, crn_seed: u64) -> Result<f64> {
    if !(cfg.weight_lo..=cfg.weight_hi).contains(&w) {
        return Err(Error::WeightOutOfRange {
            w,
            lo: cfg.weight_lo,
            hi: cfg.weight_hi,
        });
    }
    nll_unbounded(w, ctx, cfg, crn_seed)
}

/// The nll value when every observation sits at the density floor; no w can
/// do worse, and equality means the optimizer saw no signal at all.
fn plateau_nll(cfg: &FitConfig, n_obs: usize) -> f64 {
    let ll: f64 = (0..n_obs).map(|_| cfg.density_floor.ln()).sum();
    -ll
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedWeight {
    pub w_hat: f64,
    pub loglik: f64,
}

/// Maximum-likelihood weight via bounded Brent from start_w on the
/// CRN-deterministic objective. If Brent never leaves the density-floor
/// plateau (possible only when the likelihood basin is narrower than its
/// steps, e.g. point-mass constructions), a coarse scan brackets the basin
/// and the search reruns inside it.
pub fn fit_weight(
    ctx: &FitContext,
    cfg: &FitConfig,
    crn_seed: u64,
    start_w: f64,
) -> Result<FittedWeight> {
    if !(cfg.start_lo..=cfg.start_hi).contains(&start_w) {
        return Err(Error::StartOutOfRange {
            start: start_w,
            lo: cfg.start_lo,
            hi: cfg.start_hi,
        });
    }
    let mut first_err: Option<Error> = None;
    let mut objective = |w: f64| match nll_unbounded(w, ctx, cfg, crn_seed) {
        Ok(v) => v,
        Err(e) => {
            first_err.get_or_insert(e);
            f64::INFINITY
        }
    };

    let (mut w_hat, mut f_hat) = brent_min(
        &mut objective,
        cfg.weight_lo,
        cfg.weight_hi,
        start_w,
        cfg.optimizer_tol,
        200,
    );

    if f_hat >= plateau_nll(cfg, ctx.observations.len()) {
        const SCAN_POINTS: usize = 201;
        let step = (cfg.weight_hi - cfg.weight_lo) / (SCAN_POINTS - 1) as f64;
        let mut best = (w_hat, f_hat);
        for i in 0..SCAN_POINTS {
            let w = cfg.weight_lo + i as f64 * step;
            let fv = objective(w);
            if fv < best.1 {
                best = (w, fv);
            }
        }
        if best.1 < f_hat {
            let lo = (best.0 - step).max(cfg.weight_lo);
            let hi = (best.0 + step).min(cfg.weight_hi);
            let refined = brent_min(&mut objective, lo, hi, best.0, cfg.optimizer_tol, 200);
            (w_hat, f_hat) = if refined.1 < best.1 { refined } else { best };
        }
    }

    if let Some(e) = first_err {
        return Err(e);
    }
    if !f_hat.is_finite() {
        return Err(Error::NonFinite(w_hat));
    }
    Ok(FittedWeight {
        w_hat,
        loglik: -f_hat,
    })
}

/// Log-likelihood of the 0-parameter ideal observer: the mixture with the
/// target weight pinned at 1, evaluated on its own fresh seed so the
/// baseline carries the same sampling stochasticity as the fits.
pub fn optimal_observer_loglik(ctx: &FitContext, cfg: &FitConfig, crn_seed: u64) -> Result<f64> {
    Ok(-nll_unbounded(1.0, ctx, cfg, crn_seed)?)
}

/// Akaike Information Criterion, 2k - 2*loglik; lower is better.
pub fn aic(k: usize, loglik: f64) -> f64 {
    2.0 * k as f64 - 2.0 * loglik
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Highest density interval: the width-minimal window of ceil(mass * n)
/// consecutive sorted values; ties resolve to the smallest lower bound.
pub fn hdi(values: &[f64], mass: f64) -> Result<Interval> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(Error::Validation(format!("hdi mass {mass} must lie in (0, 1]")));
    }
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    // The 1e-9 guard keeps fp products like 0.95 * 100 = 95.000000000000014
    // from inflating the window by one.
    let m = ((mass * n as f64 - 1e-9).ceil().max(1.0) as usize).min(n);
    let mut best_i = 0;
    let mut best_width = xs[m - 1] - xs[0];
    for i in 1..=(n - m) {
        let width = xs[i + m - 1] - xs[i];
        if width < best_width {
            best_width = width;
            best_i = i;
        }
    }
    Ok(Interval {
        lo: xs[best_i],
        hi: xs[best_i + m - 1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub seed: u64,
    pub start_w_line: f64,
    pub start_w_bar: f64,
    pub w_line_hat: Option<f64>,
    pub w_bar_hat: Option<f64>,
    pub loglik_mixture: f64,
    pub loglik_optimal: f64,
    pub aic_mixture: f64,
    pub aic_optimal: f64,
    pub delta_aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub repeats: usize,
    /// Free parameters in the mixture model: 2 normally, 1 when only one
    /// target kind has compound data.
    pub k_mixture: usize,
    pub warning: Option<String>,
    pub mean_w_line: Option<f64>,
    pub mean_w_bar: Option<f64>,
    pub hdi_w_line: Option<Interval>,
    pub hdi_w_bar: Option<Interval>,
    pub mean_delta_aic: f64,
    pub hdi_delta_aic: Interval,
    pub n_positive_delta: usize,
    pub per_repeat: Vec<RepeatRecord>,
}

/// Per-kind compound-trial data: the true-mean pairs shown and the estimates
/// reported, in trial order.
pub struct CompoundData {
    pub pairs: Vec<TruePair>,
    pub observations: Vec<f64>,
}

pub fn compound_subset(trials: &[TrialRecord], kind: SeriesKind) -> Result<CompoundData> {
    let mut pairs = Vec::new();
    let mut observations = Vec::new();
    for t in trials {
        if t.condition != Condition::Compound || t.target_kind != kind {
            continue;
        }
        let (nk, nt) = match (t.nontarget_kind, t.true_nontarget) {
            (Some(nk), Some(nt)) => (nk, nt),
            _ => {
                return Err(Error::Validation(format!(
                    "compound trial {} lacks non-target fields",
                    t.trial_id
                )))
            }
        };
        let coord = |v: f64| {
            FrameCoord::new(v).map_err(|_| {
                Error::Validation(format!("trial {}: true mean {v} outside frame", t.trial_id))
            })
        };
        pairs.push(TruePair {
            target_kind: kind,
            target_true: coord(t.true_target)?,
            nontarget_kind: nk,
            nontarget_true: coord(nt)?,
        });
        observations.push(t.estimate);
    }
    Ok(CompoundData {
        pairs,
        observations,
    })
}

#[cfg(feature = "parallel")]
fn map_repeats<F>(n: usize, f: F) -> Result<Vec<RepeatRecord>>
where
    F: Fn(usize) -> Result<RepeatRecord> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_repeats<F>(n: usize, f: F) -> Result<Vec<RepeatRecord>>
where
    F: Fn(usize) -> Result<RepeatRecord> + Sync + Send,
{
    (0..n).map(f).collect()
}

/// The full repeat protocol. Per repeat r: derive seeds from (base_seed, r),
/// draw starting weights uniformly in [start_lo, start_hi], fit each target
/// kind's weight on its compound observations, score the ideal-observer
/// baseline on a fresh seed, and record AICs. Repeats are independent and
/// run in parallel when the `parallel` feature is on; results are keyed by
/// repeat index, so worker count never changes the output.
pub fn fit_repeats(trials: &[TrialRecord], cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let line_dist = empirical_from_trials(trials, SeriesKind::Line)?;
    let bar_dist = empirical_from_trials(trials, SeriesKind::Bar)?;
    let line_data = compound_subset(trials, SeriesKind::Line)?;
    let bar_data = compound_subset(trials, SeriesKind::Bar)?;

    let has_line = !line_data.observations.is_empty();
    let has_bar = !bar_data.observations.is_empty();
    if !has_line && !has_bar {
        return Err(Error::MissingCondition(
            "no compound trials for either target kind".into(),
        ));
    }
    let warning = match (has_line, has_bar) {
        (true, false) => Some("no compound bar-target trials; fitted w_line only (k = 1)".into()),
        (false, true) => Some("no compound line-target trials; fitted w_bar only (k = 1)".into()),
        _ => None,
    };
    let k = usize::from(has_line) + usize::from(has_bar);

    let line_ctx = has_line.then_some(FitContext {
        target_kind: SeriesKind::Line,
        target_dist: &line_dist,
        nontarget_dist: &bar_dist,
        pairs: &line_data.pairs,
        observations: &line_data.observations,
    });
    let bar_ctx = has_bar.then_some(FitContext {
        target_kind: SeriesKind::Bar,
        target_dist: &bar_dist,
        nontarget_dist: &line_dist,
        pairs: &bar_data.pairs,
        observations: &bar_data.observations,
    });

    let run_repeat = |r: usize| -> Result<RepeatRecord> {
        let repeat_seed = seed::derive(cfg.base_seed, purpose::REPEAT, r as u64);
        let mut start_rng = seed::rng_from(seed::derive(repeat_seed, purpose::START, 0));
        let start_w_line: f64 = start_rng.random_range(cfg.start_lo..=cfg.start_hi);
        let start_w_bar: f64 = start_rng.random_range(cfg.start_lo..=cfg.start_hi);

        let mut loglik_mixture = 0.0;
        let mut loglik_optimal = 0.0;
        let mut w_line_hat = None;
        let mut w_bar_hat = None;
        if let Some(ctx) = &line_ctx {
            let fitted = fit_weight(ctx, cfg, seed::derive(repeat_seed, purpose::CRN, 0), start_w_line)?;
            loglik_mixture += fitted.loglik;
            loglik_optimal +=
                optimal_observer_loglik(ctx, cfg, seed::derive(repeat_seed, purpose::BASELINE, 0))?;
            w_line_hat = Some(fitted.w_hat);
        }
        if let Some(ctx) = &bar_ctx {
            let fitted = fit_weight(ctx, cfg, seed::derive(repeat_seed, purpose::CRN, 1), start_w_bar)?;
            loglik_mixture += fitted.loglik;
            loglik_optimal +=
                optimal_observer_loglik(ctx, cfg, seed::derive(repeat_seed, purpose::BASELINE, 1))?;
            w_bar_hat = Some(fitted.w_hat);
        }

        let aic_mixture = aic(k, loglik_mixture);
        let aic_optimal = aic(0, loglik_optimal);
        Ok(RepeatRecord {
            repeat: r,
            seed: repeat_seed,
            start_w_line,
            start_w_bar,
            w_line_hat,
            w_bar_hat,
            loglik_mixture,
            loglik_optimal,
            aic_mixture,
            aic_optimal,
            delta_aic: aic_mixture - aic_optimal,
        })
    };

    let per_repeat = map_repeats(cfg.repeats, run_repeat)?;

    let deltas: Vec<f64> = per_repeat.iter().map(|x| x.delta_aic).collect();
    let kind_summary = |get: fn(&RepeatRecord) -> Option<f64>| -> Result<(Option<f64>, Option<Interval>)> {
        let ws: Vec<f64> = per_repeat.iter().filter_map(get).collect();
        if ws.is_empty() {
            Ok((None, None))
        } else {
            Ok((Some(stats::mean(&ws)), Some(hdi(&ws, cfg.hdi_mass)?)))
        }
    };
    let (mean_w_line, hdi_w_line) = kind_summary(|x| x.w_line_hat)?;
    let (mean_w_bar, hdi_w_bar) = kind_summary(|x| x.w_bar_hat)?;

    Ok(FitResult {
        repeats: cfg.repeats,
        k_mixture: k,
        warning,
        mean_w_line,
        mean_w_bar,
        hdi_w_line,
        hdi_w_bar,
        mean_delta_aic: stats::mean(&deltas),
        hdi_delta_aic: hdi(&deltas, cfg.hdi_mass)?,
        n_positive_delta: deltas.iter().filter(|d| **d > 0.0).count(),
        per_repeat,
    })
}
