//! Trial CSV schema: the interchange format every subcommand reads or writes.
//!
//! Plain comma separation, no quoting; no field in the schema can contain a
//! comma. Numbers are serialized with 6 significant digits, which is stable
//! under a parse/write round trip.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::observer::{Condition, TrialRecord};
use crate::stimulus::{Half, SeriesKind};

pub const TRIALS_HEADER: &str =
    "trial_id,condition,target_kind,target_half,true_target,nontarget_kind,true_nontarget,estimate";

/// Decimal serialization with 6 significant digits, trailing zeros trimmed.
pub fn format_number(v: f64) -> String {
    debug_assert!(v.is_finite());
    if v == 0.0 {
        return "0".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

pub fn trials_to_csv(trials: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(32 * (trials.len() + 1));
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for t in trials {
        let nk = t.nontarget_kind.map(|k| k.to_string()).unwrap_or_default();
        let nt = t.true_nontarget.map(format_number).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.trial_id,
            t.condition,
            t.target_kind,
            t.target_half,
            format_number(t.true_target),
            nk,
            nt,
            format_number(t.estimate),
        );
    }
    out
}

pub fn write_trials_csv(path: &Path, trials: &[TrialRecord]) -> Result<()> {
    std::fs::write(path, trials_to_csv(trials))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn parse_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_trials_str(&text, &path.display().to_string())
}

pub fn parse_trials_str(text: &str, origin: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRIALS_HEADER => {}
        got => {
            return Err(Error::Schema {
                path: origin.to_string(),
                line: 1,
                message: format!(
                    "header must be exactly `{TRIALS_HEADER}`, got `{}`",
                    got.unwrap_or("")
                ),
            })
        }
    }

    let mut trials = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.is_empty() {
            continue;
        }
        trials.push(parse_row(line, origin, lineno)?);
    }
    Ok(trials)
}

fn parse_row(line: &str, origin: &str, lineno: usize) -> Result<TrialRecord> {
    let row_err = |message: String| Error::Row {
        path: origin.to_string(),
        line: lineno,
        message,
    };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(row_err(format!("expected 8 fields, got {}", fields.len())));
    }

    let trial_id = fields[0]
        .parse::<u64>()
        .map_err(|_| row_err(format!("trial_id `{}` is not an integer", fields[0])))?;
    let condition = match fields[1] {
        "single" => Condition::Single,
        "compound" => Condition::Compound,
        other => return Err(row_err(format!("condition `{other}` not in {{single, compound}}"))),
    };
    let kind_of = |s: &str| match s {
        "line" => Ok(SeriesKind::Line),
        "bar" => Ok(SeriesKind::Bar),
        other => Err(row_err(format!("kind `{other}` not in {{line, bar}}"))),
    };
    let target_kind = kind_of(fields[2])?;
    let target_half = match fields[3] {
        "top" => Half::Top,
        "bottom" => Half::Bottom,
        other => return Err(row_err(format!("half `{other}` not in {{top, bottom}}"))),
    };
    let num_of = |name: &str, s: &str| {
        s.parse::<f64>()
            .map_err(|_| row_err(format!("{name} `{s}` is not a number")))
    };
    let true_target = num_of("true_target", fields[4])?;
    let estimate = num_of("estimate", fields[7])?;

    let consistency = |message: String| Error::Consistency {
        path: origin.to_string(),
        line: lineno,
        message,
    };
    let (nontarget_kind, true_nontarget) = match condition {
        Condition::Single => {
            if !fields[5].is_empty() || !fields[6].is_empty() {
                return Err(consistency(
                    "single rows must leave both nontarget fields empty".into(),
                ));
            }
            (None, None)
        }
        Condition::Compound => {
            if fields[5].is_empty() || fields[6].is_empty() {
                return Err(consistency(
                    "compound rows need both nontarget_kind and true_nontarget".into(),
                ));
            }
            (
                Some(kind_of(fields[5])?),
                Some(num_of("true_nontarget", fields[6])?),
            )
        }
    };

    Ok(TrialRecord {
        trial_id,
        condition,
        target_kind,
        target_half,
        true_target,
        nontarget_kind,
        true_nontarget,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observer::{simulate_dataset, ObserverParams, SimCounts};
    use crate::seed::rng_from;
    use crate::stimulus::{default_design, CompoundLayout};
    use approx::assert_abs_diff_eq;

    #[test]
    fn number_formatting_keeps_six_significant_digits() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(105.0), "105");
        assert_eq!(format_number(100.51), "100.51");
        assert_eq!(format_number(-4.49), "-4.49");
        assert_eq!(format_number(0.123456789), "0.123457");
        assert_eq!(format_number(139.999999), "140");
        assert_eq!(format_number(1234.5678), "1234.57");
    }

    #[test]
    fn formatting_is_idempotent_under_reparse() {
        let mut rng = rng_from(64);
        use rand::Rng;
        for _ in 0..500 {
            let v: f64 = rng.random_range(-200.0..200.0);
            let s1 = format_number(v);
            let s2 = format_number(s1.parse::<f64>().unwrap());
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn single_line_example_row_parses() {
        let text = format!("{TRIALS_HEADER}\n0,single,line,top,105,,,100.51\n");
        let trials = parse_trials_str(&text, "<test>").unwrap();
        assert_eq!(trials.len(), 1);
        let t = &trials[0];
        assert_eq!(t.condition, Condition::Single);
        assert_eq!(t.target_kind, SeriesKind::Line);
        assert!(t.nontarget_kind.is_none() && t.true_nontarget.is_none());
        assert_abs_diff_eq!(t.error(), -4.49, epsilon = 1e-12);
    }

    #[test]
    fn bad_header_is_a_schema_error() {
        let err = parse_trials_str("id,condition\n", "<test>").unwrap_err();
        assert!(matches!(err, Error::Schema { line: 1, .. }));
    }

    #[test]
    fn compound_without_nontarget_is_inconsistent_at_its_line() {
        let text = format!(
            "{TRIALS_HEADER}\n0,single,line,top,105,,,100.51\n1,compound,line,top,105,bar,,101\n"
        );
        let err = parse_trials_str(&text, "<test>").unwrap_err();
        match err {
            Error::Consistency { line, .. } => assert_eq!(line, 3),
            other => panic!("expected Consistency, got {other:?}"),
        }
    }

    #[test]
    fn single_with_nontarget_fields_is_inconsistent() {
        let text = format!("{TRIALS_HEADER}\n0,single,line,top,105,bar,35,100.51\n");
        assert!(matches!(
            parse_trials_str(&text, "<test>").unwrap_err(),
            Error::Consistency { line: 2, .. }
        ));
    }

    #[test]
    fn bad_fields_are_row_errors_with_line_numbers() {
        let text = format!("{TRIALS_HEADER}\nx,single,line,top,105,,,100.51\n");
        assert!(matches!(
            parse_trials_str(&text, "<test>").unwrap_err(),
            Error::Row { line: 2, .. }
        ));
        let text = format!("{TRIALS_HEADER}\n0,triple,line,top,105,,,100.51\n");
        assert!(matches!(
            parse_trials_str(&text, "<test>").unwrap_err(),
            Error::Row { line: 2, .. }
        ));
    }

    #[test]
    fn simulated_dataset_round_trips_to_identical_bytes() {
        let trials = simulate_dataset(
            &default_design(),
            &ObserverParams::default(),
            SimCounts {
                n_single_line: 40,
                n_single_bar: 40,
                n_compound_line_target: 30,
                n_compound_bar_target: 30,
            },
            CompoundLayout::LineAboveBar,
            &mut rng_from(17),
        )
        .unwrap();
        let csv1 = trials_to_csv(&trials);
        let reparsed = parse_trials_str(&csv1, "<test>").unwrap();
        let csv2 = trials_to_csv(&reparsed);
        assert_eq!(csv1, csv2);
        assert_eq!(reparsed.len(), trials.len());
    }
}
