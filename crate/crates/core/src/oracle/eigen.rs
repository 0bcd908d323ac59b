use super::discretize::Tridiagonal;

/// Number of eigenvalues strictly below `lambda`, from the signs of the
/// pivots of `T - lambda I = L D L^T`. A zero pivot means `lambda` is an
/// eigenvalue; it is nudged to `+pivmin` so that eigenvalue is not counted.
pub fn sturm_count(t: &Tridiagonal, lambda: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE
        * t.offdiag
            .iter()
            .fold(1.0f64, |m, b| m.max(b * b));
    let mut count = 0;
    let mut d = t.diag[0] - lambda;
    for i in 0..t.len() {
        if i > 0 {
            let b = t.offdiag[i - 1];
            d = (t.diag[i] - lambda) - b * b / d;
        }
        if d.abs() <= pivmin {
            d = pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Interval containing every eigenvalue.
pub fn gershgorin(t: &Tridiagonal) -> (f64, f64) {
    let n = t.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { t.offdiag[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { t.offdiag[i].abs() } else { 0.0 };
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    (lo, hi)
}

fn tolerance(e: f64) -> f64 {
    1e-10 * e.abs().max(1.0)
}

/// The `k`-th smallest eigenvalue (0-based) inside `[lo, hi]`, by bisection
/// on the Sturm count.
fn bisect(t: &Tridiagonal, k: usize, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > tolerance(0.5 * (lo + hi)) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The lowest `min(k_max, sturm_count(t, threshold))` eigenvalues, ascending.
/// An infinite threshold takes the `k_max` lowest.
pub fn eigenvalues_below(t: &Tridiagonal, threshold: f64, k_max: usize) -> Vec<f64> {
    let (lo, hi) = gershgorin(t);
    let top = if threshold.is_finite() { threshold.min(hi) } else { hi };
    let available = if threshold.is_finite() { sturm_count(t, top) } else { t.len() };
    let k = k_max.min(available);
    let mut out = Vec::with_capacity(k);
    let mut floor = lo - tolerance(lo);
    for i in 0..k {
        let e = bisect(t, i, floor, top + tolerance(top));
        out.push(e);
        floor = floor.max(e - tolerance(e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::discretize::discretize_potential;
    use crate::oracle::grid::Grid;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn box_laplacian(n: usize) -> Tridiagonal {
        discretize_potential(&Grid::new(0.0, PI, n).unwrap(), |_| 0.0).unwrap()
    }

    #[test]
    fn counts_on_the_box() {
        let t = box_laplacian(1000);
        assert_eq!(sturm_count(&t, 0.0), 0);
        assert_eq!(sturm_count(&t, 4.5), 2);
    }

    #[test]
    fn box_spectrum() {
        let n = 1000;
        let t = box_laplacian(n);
        let h = PI / (n + 1) as f64;
        let e = eigenvalues_below(&t, 10.0, 3);
        assert_eq!(e.len(), 3);
        for (k, v) in e.iter().enumerate() {
            let k = (k + 1) as f64;
            let exact = 4.0 / (h * h) * (k * h / 2.0).sin().powi(2);
            assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "{v} vs {exact}");
            assert!((v - k * k).abs() < k.powi(4) * h * h);
        }
        assert!(eigenvalues_below(&t, 0.5, 3).is_empty());
        assert_eq!(eigenvalues_below(&t, f64::INFINITY, 2).len(), 2);
    }

    #[test]
    fn brackets_agree_with_counts() {
        let t = box_laplacian(400);
        for (i, e) in eigenvalues_below(&t, 30.0, 5).iter().enumerate() {
            assert_eq!(sturm_count(&t, e - 1e-6), i);
            assert_eq!(sturm_count(&t, e + 1e-6), i + 1);
        }
    }

    #[test]
    fn zero_pivot_guard() {
        let t = Tridiagonal::new(vec![1.0, 1.0], vec![1.0]).unwrap();
        // eigenvalues 0 and 2; lambda = 1 makes the first pivot zero
        assert_eq!(sturm_count(&t, 1.0), 1);
        assert_eq!(sturm_count(&t, 0.0), 0);
    }

    proptest! {
        #[test]
        fn count_is_monotone(a in -50.0f64..50.0, b in -50.0f64..50.0, diag in proptest::collection::vec(-10.0f64..10.0, 20)) {
            let t = Tridiagonal::new(diag, vec![-1.5; 19]).unwrap();
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(sturm_count(&t, x) <= sturm_count(&t, y));
        }
    }
}
