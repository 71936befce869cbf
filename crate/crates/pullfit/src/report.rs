//! Fit reports: a JSON document carrying the full result plus overlay curve
//! data, and a flat CSV of the per-repeat table.

use serde::{Deserialize, Serialize};

use crate::empirical::{empirical_from_trials, synthesize_compound};
use crate::error::{Error, Result};
use crate::estimation::{
    compound_subset, FitConfig, FitResult, RepeatRecord, DEGENERATE_BANDWIDTH,
};
use crate::kde::{build_kde, silverman_bandwidth};
use crate::observer::TrialRecord;
use crate::seed::{self, purpose};
use crate::stimulus::SeriesKind;
use crate::trials_csv::format_number;

pub const PER_REPEAT_HEADER: &str = "repeat,seed,start_w_line,start_w_bar,w_line_hat,w_bar_hat,\
loglik_mixture,loglik_optimal,aic_mixture,aic_optimal,delta_aic";

/// Observed-vs-model density data for one target kind, precomputed so a
/// report consumer (or the SVG renderer) never reruns the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub target_kind: SeriesKind,
    /// Mean fitted weight the model curve was synthesized at.
    pub w_used: f64,
    pub observed_edges: Vec<f64>,
    pub observed_density: Vec<f64>,
    pub model_x: Vec<f64>,
    pub model_density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub tool: String,
    pub version: String,
    pub trials_path: String,
    pub n_trials: usize,
    pub fit_config: FitConfig,
    pub result: FitResult,
    pub overlays: Vec<Overlay>,
}

/// Equal-width histogram normalized to unit area. A degenerate range widens
/// to one pixel so constant data still renders.
pub fn histogram(values: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(bins >= 1 && !values.is_empty());
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let total = values.len() as f64;
    let density = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    (edges, density)
}

const OVERLAY_CURVE_POINTS: usize = 161;
const OVERLAY_HIST_BINS: usize = 24;

/// Observed histogram plus the model density synthesized at `w_used`; the
/// synthesis seed derives from the config base seed and `seed_index`.
pub fn overlay_for_kind(
    trials: &[TrialRecord],
    cfg: &FitConfig,
    kind: SeriesKind,
    w_used: f64,
    seed_index: u64,
) -> Result<Overlay> {
    let target_dist = empirical_from_trials(trials, kind)?;
    let nontarget_dist = empirical_from_trials(trials, kind.other())?;
    let data = compound_subset(trials, kind)?;

    let mut rng = seed::rng_from(seed::derive(cfg.base_seed, purpose::OVERLAY, seed_index));
    let samples = synthesize_compound(
        &target_dist,
        &nontarget_dist,
        &data.pairs,
        w_used,
        cfg.m,
        &mut rng,
    )?;
    let h = match silverman_bandwidth(&samples.values) {
        Ok(h) => h,
        Err(Error::DegenerateDistribution) => DEGENERATE_BANDWIDTH,
        Err(e) => return Err(e),
    };
    let kde = build_kde(&samples.values, h, cfg.grid_size, cfg.density_floor)?;

    let (observed_edges, observed_density) = histogram(&data.observations, OVERLAY_HIST_BINS);
    let span_lo = kde.grid_x[0].min(observed_edges[0]);
    let span_hi = kde.grid_x[kde.grid_x.len() - 1].max(observed_edges[observed_edges.len() - 1]);
    let step = (span_hi - span_lo) / (OVERLAY_CURVE_POINTS - 1) as f64;
    let model_x: Vec<f64> = (0..OVERLAY_CURVE_POINTS)
        .map(|i| span_lo + i as f64 * step)
        .collect();
    let model_density = model_x.iter().map(|&x| kde.density_at(x)).collect();

    Ok(Overlay {
        target_kind: kind,
        w_used,
        observed_edges,
        observed_density,
        model_x,
        model_density,
    })
}

pub fn build_report(
    trials: &[TrialRecord],
    trials_path: &str,
    cfg: &FitConfig,
    result: FitResult,
) -> Result<FitReport> {
    let mut overlays = Vec::new();
    if let Some(w) = result.mean_w_line {
        overlays.push(overlay_for_kind(trials, cfg, SeriesKind::Line, w, 0)?);
    }
    if let Some(w) = result.mean_w_bar {
        overlays.push(overlay_for_kind(trials, cfg, SeriesKind::Bar, w, 1)?);
    }
    Ok(FitReport {
        tool: "pullfit".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        trials_path: trials_path.to_string(),
        n_trials: trials.len(),
        fit_config: cfg.clone(),
        result,
        overlays,
    })
}

pub fn report_to_json(report: &FitReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str, origin: &str) -> Result<FitReport> {
    serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        path: origin.to_string(),
        line: e.line(),
        message: format!("not a fit report: {e}"),
    })
}

fn opt_num(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn per_repeat_csv(records: &[RepeatRecord]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(PER_REPEAT_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.repeat,
            r.seed,
            format_number(r.start_w_line),
            format_number(r.start_w_bar),
            opt_num(r.w_line_hat),
            opt_num(r.w_bar_hat),
            format_number(r.loglik_mixture),
            format_number(r.loglik_optimal),
            format_number(r.aic_mixture),
            format_number(r.aic_optimal),
            format_number(r.delta_aic),
        );
    }
    out
}

/// The human-readable digest a fit prints to standard output.
pub fn summarize_report(report: &FitReport) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let res = &report.result;
    let _ = writeln!(
        s,
        "fit: {} trials, {} repeats, M = {}, seed = {}",
        report.n_trials, res.repeats, report.fit_config.m, report.fit_config.base_seed
    );
    if let Some(w) = &res.warning {
        let _ = writeln!(s, "warning: {w}");
    }
    let kind_line = |name: &str, mean: Option<f64>, hdi: &Option<crate::estimation::Interval>| {
        match (mean, hdi) {
            (Some(m), Some(i)) => format!(
                "w_{name} = {} (95% HDI [{}, {}])",
                format_number(m),
                format_number(i.lo),
                format_number(i.hi)
            ),
            _ => format!("w_{name}: no compound data"),
        }
    };
    let _ = writeln!(s, "{}", kind_line("line", res.mean_w_line, &res.hdi_w_line));
    let _ = writeln!(s, "{}", kind_line("bar", res.mean_w_bar, &res.hdi_w_bar));
    let _ = writeln!(
        s,
        "delta AIC (mixture - optimal): mean = {}, 95% HDI [{}, {}], positive in {}/{} repeats",
        format_number(res.mean_delta_aic),
        format_number(res.hdi_delta_aic.lo),
        format_number(res.hdi_delta_aic.hi),
        res.n_positive_delta,
        res.repeats
    );
    s
}
