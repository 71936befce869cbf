//! Small shared statistics helpers.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator). Zero for a single value.
pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Type-7 quantile (linear interpolation between order statistics) of a
/// sorted slice, the convention R and NumPy default to.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn interquartile_range_sorted(sorted: &[f64]) -> f64 {
    quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)
}

/// Two-sample Kolmogorov-Smirnov statistic: the supremum distance between
/// the empirical cdfs, computed by a single merge walk.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quantiles_match_type7_convention() {
        // R: quantile(1:5, c(.25, .5, .75), type = 7) -> 2, 3, 4
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.25), 2.0);
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.75), 4.0);
        // R: quantile(c(1, 2, 4, 10), 0.25, type = 7) -> 1.75
        let ys = [1.0, 2.0, 4.0, 10.0];
        assert_abs_diff_eq!(quantile_sorted(&ys, 0.25), 1.75);
    }

    #[test]
    fn sd_uses_sample_denominator() {
        assert_abs_diff_eq!(sample_sd(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(sample_sd(&[5.0]), 0.0);
    }

    #[test]
    fn ks_identical_samples_is_zero_disjoint_is_one() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(two_sample_ks(&a, &a), 0.0);
        let b = [10.0, 11.0];
        assert_eq!(two_sample_ks(&a, &b), 1.0);
    }

    #[test]
    fn ks_handles_ties_across_samples() {
        // cdfs: at 1: 2/3 vs 1/2; at 2: 1 vs 1/2; at 3: 1 vs 1.
        let a = [1.0, 1.0, 2.0];
        let b = [1.0, 3.0];
        assert_abs_diff_eq!(two_sample_ks(&a, &b), 0.5);
    }
}
