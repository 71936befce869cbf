//! Browser bindings for the pullfit core: simulate an observer, overlay the
//! synthetic mixture density on its estimates at any weight, and run the
//! repeat fit, all client-side. `DemoCore` is plain Rust so the same code
//! runs natively in tests; `PullDemo` is the thin wasm-bindgen wrapper the
//! page talks to (strings in, JSON strings out).

use wasm_bindgen::prelude::*;

use pullfit::error::Error;
use pullfit::estimation::{fit_repeats, FitConfig};
use pullfit::observer::{
    simulate_dataset, summarize_errors, Condition, ObserverParams, SimCounts, TrialFilter,
    TrialRecord,
};
use pullfit::report::overlay_for_kind;
use pullfit::seed::rng_from;
use pullfit::stimulus::{default_design, CompoundLayout, SeriesKind};

pub struct DemoCore {
    trials: Vec<TrialRecord>,
    generator_w_line: f64,
    generator_w_bar: f64,
}

fn kind_of(name: &str) -> Result<SeriesKind, Error> {
    match name {
        "line" => Ok(SeriesKind::Line),
        "bar" => Ok(SeriesKind::Bar),
        other => Err(Error::Validation(format!("unknown target kind `{other}`"))),
    }
}

impl DemoCore {
    pub fn new(seed: u32, w_line: f64, w_bar: f64, n_compound: u32) -> Result<DemoCore, Error> {
        let params = ObserverParams {
            w_line_target: w_line,
            w_bar_target: w_bar,
            ..ObserverParams::default()
        };
        let n = n_compound as usize;
        let counts = SimCounts {
            n_single_line: 600,
            n_single_bar: 600,
            n_compound_line_target: n,
            n_compound_bar_target: n,
        };
        let trials = simulate_dataset(
            &default_design(),
            &params,
            counts,
            CompoundLayout::LineAboveBar,
            &mut rng_from(seed as u64),
        )?;
        Ok(DemoCore {
            trials,
            generator_w_line: w_line,
            generator_w_bar: w_bar,
        })
    }

    /// Mean error per condition/kind: the pull shows up as the compound rows
    /// drifting away from the single-series biases.
    pub fn summary(&self) -> Result<String, Error> {
        let mut rows = Vec::new();
        for condition in [Condition::Single, Condition::Compound] {
            for kind in [SeriesKind::Line, SeriesKind::Bar] {
                let filter = match condition {
                    Condition::Single => TrialFilter::single(kind),
                    Condition::Compound => TrialFilter::compound(kind),
                };
                let s = summarize_errors(&self.trials, &filter)?;
                rows.push(serde_json::json!({
                    "condition": condition.to_string(),
                    "kind": kind.to_string(),
                    "n": s.n,
                    "mean_error": s.mean_error,
                    "se": s.se,
                }));
            }
        }
        Ok(serde_json::json!({
            "generator_w_line": self.generator_w_line,
            "generator_w_bar": self.generator_w_bar,
            "rows": rows,
        })
        .to_string())
    }

    /// Observed estimate histogram for a target kind plus the model density
    /// synthesized at weight `w`.
    pub fn overlay(&self, target: &str, w: f64, m: u32, seed: u32) -> Result<String, Error> {
        let cfg = FitConfig {
            m: m as usize,
            base_seed: seed as u64,
            ..FitConfig::default()
        };
        let ov = overlay_for_kind(&self.trials, &cfg, kind_of(target)?, w, 0)?;
        Ok(serde_json::to_string(&ov).expect("overlay serializes"))
    }

    /// The repeat fit protocol at reduced size; returns the full result
    /// (per-repeat table included) as JSON.
    pub fn fit(&self, repeats: u32, m: u32, seed: u32) -> Result<String, Error> {
        let cfg = FitConfig {
            m: m as usize,
            repeats: repeats as usize,
            base_seed: seed as u64,
            ..FitConfig::default()
        };
        let result = fit_repeats(&self.trials, &cfg)?;
        Ok(serde_json::to_string(&result).expect("result serializes"))
    }
}

#[wasm_bindgen]
pub struct PullDemo(DemoCore);

#[wasm_bindgen]
impl PullDemo {
    /// Simulate a dataset: 600 single trials per kind plus `n_compound`
    /// compound trials per target kind, using the reference observer with
    /// the given generator weights.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, w_line: f64, w_bar: f64, n_compound: u32) -> Result<PullDemo, JsError> {
        Ok(PullDemo(DemoCore::new(seed, w_line, w_bar, n_compound)?))
    }

    pub fn summary(&self) -> Result<String, JsError> {
        Ok(self.0.summary()?)
    }

    pub fn overlay(&self, target: &str, w: f64, m: u32, seed: u32) -> Result<String, JsError> {
        Ok(self.0.overlay(target, w, m, seed)?)
    }

    pub fn fit(&self, repeats: u32, m: u32, seed: u32) -> Result<String, JsError> {
        Ok(self.0.fit(repeats, m, seed)?)
    }
}
