//! Bounded derivative-free scalar minimization: Brent's golden-section /
//! parabolic-interpolation hybrid, seeded with an explicit starting point.

const GOLDEN: f64 = 0.381_966_011_250_105_2;

/// Minimize f over [a, b] starting from x0, to absolute tolerance xatol on
/// the argument. Returns (argmin, f(argmin)).
pub fn brent_min<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    x0: f64,
    xatol: f64,
    max_iter: usize,
) -> (f64, f64) {
    assert!(a < b && xatol > 0.0);
    let (mut a, mut b) = (a, b);
    let sqrt_eps = f64::EPSILON.sqrt();

    let mut x = x0.clamp(a, b);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + xatol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }

        let mut golden_step = true;
        if e.abs() > tol1 {
            // Parabola through (x, fx), (w, fw), (v, fv).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_minimum_found_from_either_side() {
        for x0 in [0.0, 0.2, 0.9, 1.0] {
            let (x, fx) = brent_min(|w| (w - 0.62) * (w - 0.62), 0.0, 1.0, x0, 1e-6, 200);
            assert_abs_diff_eq!(x, 0.62, epsilon = 1e-5);
            assert!(fx < 1e-9);
        }
    }

    #[test]
    fn boundary_minimum_is_approached() {
        let (x, _) = brent_min(|w| w, 0.0, 1.0, 0.95, 1e-5, 200);
        assert!(x < 1e-3);
        let (x, _) = brent_min(|w| -w, 0.0, 1.0, 0.95, 1e-5, 200);
        assert!(x > 1.0 - 1e-3);
    }

    #[test]
    fn nonsmooth_vee_minimum() {
        let (x, _) = brent_min(|w| (w - 0.31f64).abs(), 0.0, 1.0, 0.99, 1e-6, 200);
        assert_abs_diff_eq!(x, 0.31, epsilon = 1e-4);
    }

    #[test]
    fn evaluation_count_stays_modest_on_smooth_objectives() {
        let mut evals = 0usize;
        let _ = brent_min(
            |w| {
                evals += 1;
                (w - 0.945) * (w - 0.945)
            },
            0.0,
            1.0,
            0.93,
            1e-4,
            200,
        );
        assert!(evals < 40, "used {evals} evaluations");
    }
}
