//! Stimulus frame, series design, and true-mean sampling.
//!
//! All vertical positions live in a 140 px data frame with 0 at the bottom.
//! A compound display stacks one series kind in the top half and the other
//! in the bottom half; true series means come in ascending triples with a
//! fixed kind-specific separation.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FRAME_MIN: f64 = 0.0;
pub const FRAME_MAX: f64 = 140.0;
pub const FRAME_MID: f64 = 70.0;

/// Adjacent line means differ by exactly this many pixels.
pub const LINE_SEPARATION: f64 = 12.0;
/// Adjacent bar means differ by exactly this many pixels.
pub const BAR_SEPARATION: f64 = 5.0;

pub const DEFAULT_POINT_NOISE_SD: f64 = 4.0;
pub const DEFAULT_POINTS_PER_SERIES: usize = 48;

const SEPARATION_EPS: f64 = 1e-9;

/// Vertical position within the data frame, pixels from the bottom.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameCoord(f64);

impl FrameCoord {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() || !(FRAME_MIN..=FRAME_MAX).contains(&v) {
            return Err(Error::InvalidSpec(format!(
                "frame coordinate {v} outside [{FRAME_MIN}, {FRAME_MAX}]"
            )));
        }
        Ok(FrameCoord(v))
    }

    pub fn clamped(v: f64) -> Self {
        FrameCoord(v.clamp(FRAME_MIN, FRAME_MAX))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Line,
    Bar,
}

impl SeriesKind {
    pub fn other(self) -> Self {
        match self {
            SeriesKind::Line => SeriesKind::Bar,
            SeriesKind::Bar => SeriesKind::Line,
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Line => "line",
            SeriesKind::Bar => "bar",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Top,
    Bottom,
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Half::Top => "top",
            Half::Bottom => "bottom",
        })
    }
}

/// Which kind occupies the top half of a compound display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompoundLayout {
    LineAboveBar,
    BarAboveLine,
}

impl CompoundLayout {
    pub fn half_of(self, kind: SeriesKind) -> Half {
        match (self, kind) {
            (CompoundLayout::LineAboveBar, SeriesKind::Line) => Half::Top,
            (CompoundLayout::LineAboveBar, SeriesKind::Bar) => Half::Bottom,
            (CompoundLayout::BarAboveLine, SeriesKind::Bar) => Half::Top,
            (CompoundLayout::BarAboveLine, SeriesKind::Line) => Half::Bottom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Points scattered around the mean with gaussian noise.
    Noisy,
    /// Every point exactly at the mean; consumes no rng draws.
    Uniform,
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesSpec {
    pub kind: SeriesKind,
    pub half: Half,
    pub profile: Profile,
    pub mean: FrameCoord,
    pub point_noise_sd: f64,
    pub n_points: usize,
}

impl SeriesSpec {
    fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::InvalidSpec("n_points must be at least 1".into()));
        }
        if !self.point_noise_sd.is_finite() || self.point_noise_sd < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "point_noise_sd {} must be finite and non-negative",
                self.point_noise_sd
            )));
        }
        let m = self.mean.get();
        let ok = match self.half {
            Half::Top => m >= FRAME_MID,
            Half::Bottom => m <= FRAME_MID,
        };
        if !ok {
            return Err(Error::InvalidSpec(format!(
                "mean {m} not in the {} half of the frame",
                self.half
            )));
        }
        Ok(())
    }
}

/// The four ascending mean triples of the reference design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMeans {
    line_top: [FrameCoord; 3],
    line_bottom: [FrameCoord; 3],
    bar_top: [FrameCoord; 3],
    bar_bottom: [FrameCoord; 3],
}

fn check_triple(name: &str, triple: [f64; 3], sep: f64, half: Half) -> Result<[FrameCoord; 3]> {
    let mut out = [FrameCoord(0.0); 3];
    for (slot, v) in out.iter_mut().zip(triple) {
        *slot = FrameCoord::new(v)
            .map_err(|_| Error::Validation(format!("{name}: mean {v} outside frame")))?;
    }
    for w in triple.windows(2) {
        if ((w[1] - w[0]) - sep).abs() > SEPARATION_EPS {
            return Err(Error::Validation(format!(
                "{name}: adjacent means {} and {} must differ by exactly {sep}",
                w[0], w[1]
            )));
        }
    }
    let half_ok = match half {
        Half::Top => triple[0] >= FRAME_MID,
        Half::Bottom => triple[2] <= FRAME_MID,
    };
    if !half_ok {
        return Err(Error::Validation(format!(
            "{name}: means must stay in the {half} half"
        )));
    }
    Ok(out)
}

impl DesignMeans {
    pub fn new(
        line_top: [f64; 3],
        line_bottom: [f64; 3],
        bar_top: [f64; 3],
        bar_bottom: [f64; 3],
    ) -> Result<Self> {
        Ok(DesignMeans {
            line_top: check_triple("design.line_top", line_top, LINE_SEPARATION, Half::Top)?,
            line_bottom: check_triple(
                "design.line_bottom",
                line_bottom,
                LINE_SEPARATION,
                Half::Bottom,
            )?,
            bar_top: check_triple("design.bar_top", bar_top, BAR_SEPARATION, Half::Top)?,
            bar_bottom: check_triple("design.bar_bottom", bar_bottom, BAR_SEPARATION, Half::Bottom)?,
        })
    }

    pub fn triple(&self, kind: SeriesKind, half: Half) -> &[FrameCoord; 3] {
        match (kind, half) {
            (SeriesKind::Line, Half::Top) => &self.line_top,
            (SeriesKind::Line, Half::Bottom) => &self.line_bottom,
            (SeriesKind::Bar, Half::Top) => &self.bar_top,
            (SeriesKind::Bar, Half::Bottom) => &self.bar_bottom,
        }
    }
}

pub fn default_design() -> DesignMeans {
    DesignMeans::new(
        [93.0, 105.0, 117.0],
        [23.0, 35.0, 47.0],
        [100.0, 105.0, 110.0],
        [30.0, 35.0, 40.0],
    )
    .expect("reference design is valid")
}

/// One compound trial's true means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruePair {
    pub target_kind: SeriesKind,
    pub target_true: FrameCoord,
    pub nontarget_kind: SeriesKind,
    pub nontarget_true: FrameCoord,
}

/// All 9 target x non-target mean combinations for one target kind under a
/// compound layout.
pub fn design_pairs(
    design: &DesignMeans,
    target_kind: SeriesKind,
    layout: CompoundLayout,
) -> Vec<TruePair> {
    let nontarget_kind = target_kind.other();
    let targets = design.triple(target_kind, layout.half_of(target_kind));
    let nontargets = design.triple(nontarget_kind, layout.half_of(nontarget_kind));
    let mut pairs = Vec::with_capacity(9);
    for &t in targets {
        for &n in nontargets {
            pairs.push(TruePair {
                target_kind,
                target_true: t,
                nontarget_kind,
                nontarget_true: n,
            });
        }
    }
    pairs
}

pub fn sample_true_pair<R: Rng>(pairs: &[TruePair], rng: &mut R) -> Result<TruePair> {
    if pairs.is_empty() {
        return Err(Error::EmptyDesign("no true pairs to sample from"));
    }
    Ok(pairs[rng.random_range(0..pairs.len())])
}

/// Draw the rendered y-values of one series. Uniform profiles are exact
/// copies of the mean and consume no rng state; noisy profiles add gaussian
/// point noise and clamp into the frame.
pub fn generate_series<R: Rng>(spec: &SeriesSpec, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let m = spec.mean.get();
    match spec.profile {
        Profile::Uniform => Ok(vec![m; spec.n_points]),
        Profile::Noisy => {
            if spec.point_noise_sd == 0.0 {
                return Ok(vec![m; spec.n_points]);
            }
            let noise = Normal::new(0.0, spec.point_noise_sd)
                .map_err(|e| Error::InvalidSpec(format!("point noise: {e}")))?;
            Ok((0..spec.n_points)
                .map(|_| FrameCoord::clamped(m + noise.sample(rng)).get())
                .collect())
        }
    }
}
