//! Subcommand implementations, CLI-agnostic: each takes parsed inputs, does
//! its file I/O, and returns the text the caller should print. When `out` is
//! omitted the rendered document itself is returned instead of a summary, so
//! the commands compose in pipelines and in tests.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::estimation::fit_repeats;
use crate::observer::{simulate_dataset, Condition, SimCounts, TrialFilter};
use crate::report::{build_report, per_repeat_csv, report_from_json, report_to_json, summarize_report, FitReport};
use crate::seed::{self, purpose};
use crate::stimulus::SeriesKind;
use crate::svg::render_report_svg;
use crate::trials_csv::{format_number, parse_trials_csv, write_trials_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Validation(format!(
                "unknown format `{other}` (expected json, csv, or svg)"
            ))),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Simulate a dataset, write the trial CSV, and return per-condition error
/// summaries.
pub fn cmd_simulate(cfg: &RunConfig, counts: SimCounts, seed: u64, out: &Path) -> Result<String> {
    let mut rng = seed::rng_from(seed);
    let trials = simulate_dataset(&cfg.design, &cfg.observer, counts, cfg.layout, &mut rng)?;
    write_trials_csv(out, &trials)?;

    let mut s = String::new();
    for condition in [Condition::Single, Condition::Compound] {
        for kind in [SeriesKind::Line, SeriesKind::Bar] {
            let filter = match condition {
                Condition::Single => TrialFilter::single(kind),
                Condition::Compound => TrialFilter::compound(kind),
            };
            match crate::observer::summarize_errors(&trials, &filter) {
                Ok(sum) => {
                    let _ = writeln!(
                        s,
                        "{condition} {kind}: n = {}, mean error = {}, se = {}",
                        sum.n,
                        format_number(sum.mean_error),
                        format_number(sum.se)
                    );
                }
                Err(Error::EmptySelection) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let _ = writeln!(s, "wrote {} trials to {}", trials.len(), out.display());
    Ok(s)
}

fn render(report: &FitReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report_to_json(report),
        OutputFormat::Csv => per_repeat_csv(&report.result.per_repeat),
        OutputFormat::Svg => render_report_svg(report),
    }
}

/// Fit the mixture weights to a trial CSV. With `out`, the rendered report
/// is written there and a human digest is returned; without it the rendered
/// report itself is returned.
pub fn cmd_fit(
    cfg: &RunConfig,
    trials_path: &Path,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<String> {
    let trials = parse_trials_csv(trials_path)?;
    let result = fit_repeats(&trials, &cfg.fit)?;
    let report = build_report(&trials, &trials_path.display().to_string(), &cfg.fit, result)?;
    let doc = render(&report, format);
    match out {
        Some(path) => {
            write_text(path, &doc)?;
            let mut s = summarize_report(&report);
            let _ = writeln!(s, "wrote report to {}", path.display());
            Ok(s)
        }
        None => Ok(doc),
    }
}

/// Parse a `lo:hi:step` weight grid within [0, 1].
pub fn parse_weight_grid(spec: &str) -> Result<Vec<f64>> {
    let grid_err = |message: String| Error::Grid {
        spec: spec.to_string(),
        message,
    };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(grid_err("expected lo:hi:step".into()));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| grid_err(format!("`{}` is not a number", p.trim())))
        })
        .collect::<Result<_>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) {
        return Err(grid_err(format!("step {step} must be positive")));
    }
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(grid_err(format!("bounds [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| (lo + i as f64 * step).min(hi)).collect())
}

pub const RECOVERY_HEADER: &str = "true_w,mean_w_line,hdi_w_line_lo,hdi_w_line_hi,\
mean_w_bar,hdi_w_bar_lo,hdi_w_bar_hi,mean_delta_aic,hdi_delta_aic_lo,hdi_delta_aic_hi";

/// Parameter-recovery sweep: for each grid weight, simulate a dataset with
/// that weight on both target kinds, fit it, and append one summary row.
/// Simulation and fit seeds derive from the base seed and the grid index, so
/// the whole table is reproducible from the config alone.
pub fn cmd_recover(cfg: &RunConfig, grid_spec: &str, out: Option<&Path>) -> Result<String> {
    let grid = parse_weight_grid(grid_spec)?;
    let mut csv = String::from(RECOVERY_HEADER);
    csv.push('\n');
    for (i, &w) in grid.iter().enumerate() {
        let mut params = cfg.observer.clone();
        params.w_line_target = w;
        params.w_bar_target = w;
        let mut rng = seed::rng_from(seed::derive(cfg.fit.base_seed, purpose::RECOVER_SIM, i as u64));
        let trials = simulate_dataset(&cfg.design, &params, SimCounts::default(), cfg.layout, &mut rng)?;

        let mut fit_cfg = cfg.fit.clone();
        fit_cfg.base_seed = seed::derive(cfg.fit.base_seed, purpose::RECOVER_FIT, i as u64);
        let res = fit_repeats(&trials, &fit_cfg)?;

        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        let opt_hdi = |v: &Option<crate::estimation::Interval>| match v {
            Some(i) => (format_number(i.lo), format_number(i.hi)),
            None => (String::new(), String::new()),
        };
        let (l_lo, l_hi) = opt_hdi(&res.hdi_w_line);
        let (b_lo, b_hi) = opt_hdi(&res.hdi_w_bar);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            format_number(w),
            opt(res.mean_w_line),
            l_lo,
            l_hi,
            opt(res.mean_w_bar),
            b_lo,
            b_hi,
            format_number(res.mean_delta_aic),
            format_number(res.hdi_delta_aic.lo),
            format_number(res.hdi_delta_aic.hi),
        );
    }
    match out {
        Some(path) => {
            write_text(path, &csv)?;
            Ok(format!("recover: {} grid points, wrote {}\n", grid.len(), path.display()))
        }
        None => Ok(csv),
    }
}

/// Re-emit a saved JSON report in another format.
pub fn cmd_report(input: &Path, out: Option<&Path>, format: OutputFormat) -> Result<String> {
    let text =
        std::fs::read_to_string(input).map_err(|e| Error::io(input.display().to_string(), e))?;
    let report = report_from_json(&text, &input.display().to_string())?;
    let doc = render(&report, format);
    match out {
        Some(path) => {
            write_text(path, &doc)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(doc),
    }
}
