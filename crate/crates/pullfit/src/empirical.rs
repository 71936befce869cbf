//! Pooled empirical error distributions and bootstrap synthesis of the
//! compound-estimate distribution Y* for a candidate weight.

use rand::Rng;

use crate::error::{Error, Result};
use crate::observer::{compound_estimate, Condition, TrialRecord};
use crate::stimulus::{Half, SeriesKind, TruePair};

/// Estimation errors (estimate - true mean) pooled over means from
/// single-series trials of one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    errors: Vec<f64>,
    pub kind: SeriesKind,
}

impl EmpiricalDistribution {
    pub fn new(errors: Vec<f64>, kind: SeriesKind) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::InsufficientSingles { kind, found: 0 });
        }
        if errors.iter().any(|e| !e.is_finite()) {
            return Err(Error::Validation(format!(
                "empirical {kind} errors contain a non-finite value"
            )));
        }
        Ok(EmpiricalDistribution { errors, kind })
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }
}

/// An estimate is "obviously wrong" when it lands in the opposite quarter of
/// the frame: bottom quarter [0,35) for a top-half stimulus, top quarter
/// (105,140] for a bottom-half stimulus.
pub fn obviously_wrong(half: Half, estimate: f64) -> bool {
    match half {
        Half::Top => (0.0..35.0).contains(&estimate),
        Half::Bottom => estimate > 105.0 && estimate <= 140.0,
    }
}

/// Pool single-series errors of one kind, dropping obviously wrong
/// estimates. Needs at least 2 survivors.
pub fn empirical_from_trials(
    trials: &[TrialRecord],
    kind: SeriesKind,
) -> Result<EmpiricalDistribution> {
    let errors: Vec<f64> = trials
        .iter()
        .filter(|t| {
            t.condition == Condition::Single
                && t.target_kind == kind
                && !obviously_wrong(t.target_half, t.estimate)
        })
        .map(|t| t.error())
        .collect();
    if errors.len() < 2 {
        return Err(Error::InsufficientSingles {
            kind,
            found: errors.len(),
        });
    }
    EmpiricalDistribution::new(errors, kind)
}

/// Classic bootstrap draw: uniform with replacement.
pub fn draw_error<R: Rng>(dist: &EmpiricalDistribution, rng: &mut R) -> f64 {
    dist.errors[rng.random_range(0..dist.errors.len())]
}

/// M synthetic compound target estimates at weight w.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSamples {
    pub values: Vec<f64>,
    pub weight: f64,
    pub target_kind: SeriesKind,
}

/// Build Y*: for each of M samples draw (pair, target error, non-target
/// error) in that fixed order, then combine as w*x_t + (1-w)*x_nt. The fixed
/// consumption order is what makes common-random-number reuse across w
/// well defined.
pub fn synthesize_compound<R: Rng>(
    target_dist: &EmpiricalDistribution,
    nontarget_dist: &EmpiricalDistribution,
    pairs: &[TruePair],
    w: f64,
    m: usize,
    rng: &mut R,
) -> Result<SyntheticSamples> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::WeightOutOfRange { w, lo: 0.0, hi: 1.0 });
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDesign("no true pairs for synthesis"));
    }
    assert!(m >= 1, "sample count M must be at least 1");
    let mut values = Vec::with_capacity(m);
    for _ in 0..m {
        let pair = pairs[rng.random_range(0..pairs.len())];
        let x_t = pair.target_true.get() + draw_error(target_dist, rng);
        let x_nt = pair.nontarget_true.get() + draw_error(nontarget_dist, rng);
        values.push(compound_estimate(x_t, x_nt, w));
    }
    Ok(SyntheticSamples {
        values,
        weight: w,
        target_kind: target_dist.kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use crate::stimulus::FrameCoord;
    use approx::assert_abs_diff_eq;

    fn single(id: u64, half: Half, true_target: f64, estimate: f64) -> TrialRecord {
        TrialRecord {
            trial_id: id,
            condition: Condition::Single,
            target_kind: SeriesKind::Line,
            target_half: half,
            true_target,
            nontarget_kind: None,
            true_nontarget: None,
            estimate,
        }
    }

    fn pair(t: f64, nt: f64) -> TruePair {
        TruePair {
            target_kind: SeriesKind::Line,
            target_true: FrameCoord::new(t).unwrap(),
            nontarget_kind: SeriesKind::Bar,
            nontarget_true: FrameCoord::new(nt).unwrap(),
        }
    }

    fn point_mass(e: f64, kind: SeriesKind) -> EmpiricalDistribution {
        EmpiricalDistribution::new(vec![e], kind).unwrap()
    }

    #[test]
    fn one_survivor_is_insufficient() {
        let trials = [single(0, Half::Top, 105.0, 100.5)];
        assert!(matches!(
            empirical_from_trials(&trials, SeriesKind::Line),
            Err(Error::InsufficientSingles { found: 1, .. })
        ));
    }

    #[test]
    fn opposite_quarter_estimates_are_excluded() {
        let trials = [
            single(0, Half::Top, 105.0, 20.0),  // bottom quarter: dropped
            single(1, Half::Top, 105.0, 100.0),
            single(2, Half::Top, 105.0, 102.0),
            single(3, Half::Bottom, 35.0, 110.0), // top quarter: dropped
        ];
        let d = empirical_from_trials(&trials, SeriesKind::Line).unwrap();
        assert_eq!(d.errors(), &[-5.0, -3.0]);
    }

    #[test]
    fn exclusion_windows_are_half_open_as_documented() {
        assert!(obviously_wrong(Half::Top, 0.0));
        assert!(obviously_wrong(Half::Top, 34.999));
        assert!(!obviously_wrong(Half::Top, 35.0));
        assert!(!obviously_wrong(Half::Bottom, 105.0));
        assert!(obviously_wrong(Half::Bottom, 105.001));
        assert!(obviously_wrong(Half::Bottom, 140.0));
        assert!(!obviously_wrong(Half::Bottom, 140.001));
    }

    #[test]
    fn errors_are_plain_subtraction() {
        let trials = [
            single(0, Half::Top, 105.0, 100.0),
            single(1, Half::Top, 105.0, 101.0),
            single(2, Half::Top, 105.0, 102.0),
        ];
        let d = empirical_from_trials(&trials, SeriesKind::Line).unwrap();
        assert_eq!(d.errors(), &[-5.0, -4.0, -3.0]);
    }

    #[test]
    fn draw_error_singleton_and_frequencies() {
        let d = point_mass(-4.49, SeriesKind::Line);
        let mut rng = rng_from(2);
        for _ in 0..100 {
            assert_eq!(draw_error(&d, &mut rng), -4.49);
        }
        // Binomial: se = 0.5/sqrt(100_000) ~ 0.0016; 0.01 is > 6 se.
        let two = EmpiricalDistribution::new(vec![0.0, 10.0], SeriesKind::Line).unwrap();
        let mut tens = 0usize;
        let draws = 100_000;
        for _ in 0..draws {
            if draw_error(&two, &mut rng) == 10.0 {
                tens += 1;
            }
        }
        assert_abs_diff_eq!(tens as f64 / draws as f64, 0.5, epsilon = 0.01);
    }

    #[test]
    fn point_mass_synthesis_is_exact() {
        let t = point_mass(0.0, SeriesKind::Line);
        let nt = point_mass(0.0, SeriesKind::Bar);
        let s = synthesize_compound(&t, &nt, &[pair(100.0, 40.0)], 0.945, 500, &mut rng_from(4))
            .unwrap();
        assert_eq!(s.values.len(), 500);
        for v in &s.values {
            assert_eq!(*v, 0.945 * 100.0 + 0.055 * 40.0);
            assert_abs_diff_eq!(*v, 96.7, epsilon = 1e-9);
        }
    }

    #[test]
    fn w1_synthesis_ignores_nontarget_errors() {
        let t = point_mass(-4.49, SeriesKind::Line);
        let nt = EmpiricalDistribution::new(vec![-100.0, 3.0, 77.0], SeriesKind::Bar).unwrap();
        let s =
            synthesize_compound(&t, &nt, &[pair(105.0, 35.0)], 1.0, 200, &mut rng_from(8)).unwrap();
        for v in &s.values {
            assert_eq!(*v, 100.51);
        }
    }

    #[test]
    fn m_samples_exactly() {
        let t = point_mass(0.0, SeriesKind::Line);
        let nt = point_mass(0.0, SeriesKind::Bar);
        let s = synthesize_compound(&t, &nt, &[pair(100.0, 40.0)], 0.5, 10_000, &mut rng_from(1))
            .unwrap();
        assert_eq!(s.values.len(), 10_000);
    }

    #[test]
    fn weight_and_pair_preconditions() {
        let t = point_mass(0.0, SeriesKind::Line);
        let nt = point_mass(0.0, SeriesKind::Bar);
        assert!(matches!(
            synthesize_compound(&t, &nt, &[pair(100.0, 40.0)], 1.2, 10, &mut rng_from(0)),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            synthesize_compound(&t, &nt, &[], 0.5, 10, &mut rng_from(0)),
            Err(Error::EmptyDesign(_))
        ));
    }

    #[test]
    fn w1_matches_direct_target_resample_sample_by_sample() {
        let t = EmpiricalDistribution::new(vec![-6.0, -4.5, -3.0, 0.5], SeriesKind::Line).unwrap();
        let nt = EmpiricalDistribution::new(vec![2.0, 4.0, 6.0], SeriesKind::Bar).unwrap();
        let pairs = [pair(93.0, 30.0), pair(105.0, 35.0), pair(117.0, 40.0)];
        let s = synthesize_compound(&t, &nt, &pairs, 1.0, 1_000, &mut rng_from(21)).unwrap();

        // Direct resample with the same stream: consume (pair, target error,
        // non-target error) and drop the unused non-target draw.
        let mut rng = rng_from(21);
        for v in &s.values {
            let p = pairs[rng.random_range(0..pairs.len())];
            let x_t = p.target_true.get() + draw_error(&t, &mut rng);
            let _ = draw_error(&nt, &mut rng);
            assert_eq!(*v, 1.0 * x_t + 0.0 * (p.nontarget_true.get() + 0.0));
        }
    }

    #[test]
    fn mixture_respects_convex_bounds() {
        let t = EmpiricalDistribution::new(vec![-5.0, 5.0], SeriesKind::Line).unwrap();
        let nt = EmpiricalDistribution::new(vec![-2.0, 2.0], SeriesKind::Bar).unwrap();
        let pairs = [pair(93.0, 30.0), pair(117.0, 40.0)];
        let w = 0.8;
        let s = synthesize_compound(&t, &nt, &pairs, w, 5_000, &mut rng_from(30)).unwrap();
        let t_lo = 93.0 - 5.0;
        let t_hi = 117.0 + 5.0;
        let nt_lo = 30.0 - 2.0;
        let nt_hi = 40.0 + 2.0;
        let lo = w * t_lo + (1.0 - w) * nt_lo;
        let hi = w * t_hi + (1.0 - w) * nt_hi;
        for v in &s.values {
            assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }
}
