//! Run configuration: a line-oriented `section.key = value` file.
//!
//! Every key is optional; the defaults reproduce the reference setup
//! (M = 10,000 synthetic samples, 50 repeats, starts in [0.9, 1]). Unknown
//! keys are rejected rather than ignored so a typo cannot silently fall back
//! to a default. `#` starts a comment; blank lines are fine; list values are
//! comma-separated.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimation::FitConfig;
use crate::observer::ObserverParams;
use crate::stimulus::{default_design, CompoundLayout, DesignMeans};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fit: FitConfig,
    pub observer: ObserverParams,
    pub design: DesignMeans,
    pub layout: CompoundLayout,
    pub trials_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fit: FitConfig::default(),
            observer: ObserverParams::default(),
            design: default_design(),
            layout: CompoundLayout::LineAboveBar,
            trials_path: None,
            out_path: None,
        }
    }
}

/// Raw design triples, kept as plain floats until the whole file is read so
/// the cross-field separation checks run once on the final values.
struct DesignDraft {
    line_top: [f64; 3],
    line_bottom: [f64; 3],
    bar_top: [f64; 3],
    bar_bottom: [f64; 3],
}

impl Default for DesignDraft {
    fn default() -> Self {
        DesignDraft {
            line_top: [93.0, 105.0, 117.0],
            line_bottom: [23.0, 35.0, 47.0],
            bar_top: [100.0, 105.0, 110.0],
            bar_bottom: [30.0, 35.0, 40.0],
        }
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_config_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str, origin: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut draft = DesignDraft::default();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let bad = |message: String| Error::ConfigParse {
            path: origin.to_string(),
            line: lineno,
            message,
        };
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `section.key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(bad(format!("key `{key}` has no value")));
        }

        let f64_of = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| bad(format!("`{v}` is not a number")))
        };
        let usize_of = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| bad(format!("`{v}` is not a non-negative integer")))
        };
        let triple_of = |v: &str| -> Result<[f64; 3]> {
            let parts: Vec<f64> = v
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("`{}` is not a number", p.trim())))
                })
                .collect::<Result<_>>()?;
            parts
                .try_into()
                .map_err(|_| bad(format!("`{v}` must be exactly 3 comma-separated numbers")))
        };

        match key {
            "fit.m" => cfg.fit.m = usize_of(value)?,
            "fit.repeats" => cfg.fit.repeats = usize_of(value)?,
            "fit.start_lo" => cfg.fit.start_lo = f64_of(value)?,
            "fit.start_hi" => cfg.fit.start_hi = f64_of(value)?,
            "fit.weight_lo" => cfg.fit.weight_lo = f64_of(value)?,
            "fit.weight_hi" => cfg.fit.weight_hi = f64_of(value)?,
            "fit.grid_size" => cfg.fit.grid_size = usize_of(value)?,
            "fit.density_floor" => cfg.fit.density_floor = f64_of(value)?,
            "fit.optimizer_tol" => cfg.fit.optimizer_tol = f64_of(value)?,
            "fit.base_seed" => {
                cfg.fit.base_seed = value
                    .parse::<u64>()
                    .map_err(|_| bad(format!("`{value}` is not a seed (u64)")))?
            }
            "fit.hdi_mass" => cfg.fit.hdi_mass = f64_of(value)?,

            "observer.bias_line" => cfg.observer.bias_line = f64_of(value)?,
            "observer.sigma_line" => cfg.observer.sigma_line = f64_of(value)?,
            "observer.bias_bar" => cfg.observer.bias_bar = f64_of(value)?,
            "observer.sigma_bar" => cfg.observer.sigma_bar = f64_of(value)?,
            "observer.w_line_target" => cfg.observer.w_line_target = f64_of(value)?,
            "observer.w_bar_target" => cfg.observer.w_bar_target = f64_of(value)?,

            "design.line_top" => draft.line_top = triple_of(value)?,
            "design.line_bottom" => draft.line_bottom = triple_of(value)?,
            "design.bar_top" => draft.bar_top = triple_of(value)?,
            "design.bar_bottom" => draft.bar_bottom = triple_of(value)?,
            "design.layout" => {
                cfg.layout = match value {
                    "line_above_bar" => CompoundLayout::LineAboveBar,
                    "bar_above_line" => CompoundLayout::BarAboveLine,
                    _ => {
                        return Err(bad(format!(
                            "`{value}` is not a layout (line_above_bar | bar_above_line)"
                        )))
                    }
                }
            }

            "io.trials" => cfg.trials_path = Some(PathBuf::from(value)),
            "io.out" => cfg.out_path = Some(PathBuf::from(value)),

            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
    }

    cfg.design = DesignMeans::new(
        draft.line_top,
        draft.line_bottom,
        draft.bar_top,
        draft.bar_bottom,
    )?;
    cfg.fit.validate()?;
    cfg.observer.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::{Half, SeriesKind};

    #[test]
    fn empty_file_yields_full_defaults() {
        let cfg = parse_config_str("", "<test>").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.fit.m, 10_000);
        assert_eq!(cfg.fit.repeats, 50);
        assert_eq!((cfg.fit.start_lo, cfg.fit.start_hi), (0.9, 1.0));
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = parse_config_str(
            "# a comment\n\nfit.repeats = 7   # trailing comment\n",
            "<test>",
        )
        .unwrap();
        assert_eq!(cfg.fit.repeats, 7);
    }

    #[test]
    fn start_outside_weight_bounds_is_a_validation_error() {
        let err = parse_config_str("fit.start_lo = 1.2\nfit.start_hi = 1.3\n", "<test>")
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("weight bounds"));
    }

    #[test]
    fn design_override_passes_separation_checks() {
        let cfg = parse_config_str("design.line_top = 93, 105, 117\n", "<test>").unwrap();
        let t = cfg.design.triple(SeriesKind::Line, Half::Top);
        assert_eq!(t[1].get(), 105.0);

        let err = parse_config_str("design.line_top = 93, 100, 117\n", "<test>").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn unknown_keys_and_malformed_lines_carry_line_numbers() {
        let err = parse_config_str("fit.repeats = 3\nfit.mm = 4\n", "<test>").unwrap_err();
        match err {
            Error::ConfigParse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown key"));
            }
            other => panic!("expected ConfigParse, got {other:?}"),
        }

        let err = parse_config_str("just words\n", "<test>").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 1, .. }));

        let err = parse_config_str("fit.m = lots\n", "<test>").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 1, .. }));
    }

    #[test]
    fn observer_and_layout_keys_apply() {
        let cfg = parse_config_str(
            "observer.w_line_target = 0.9\ndesign.layout = bar_above_line\nio.trials = /tmp/t.csv\n",
            "<test>",
        )
        .unwrap();
        assert_eq!(cfg.observer.w_line_target, 0.9);
        assert_eq!(cfg.layout, CompoundLayout::BarAboveLine);
        assert_eq!(cfg.trials_path.as_deref(), Some(Path::new("/tmp/t.csv")));
    }
}
