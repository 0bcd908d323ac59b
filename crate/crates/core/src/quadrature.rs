//! Quadrature rules used for normalization and for assembling the oracle's
//! element integrals.

use crate::error::{Error, Result};

/// Composite Simpson over uniformly spaced samples. The count must be odd and at least 3.
pub fn simpson_samples(samples: &[f64], h: f64) -> Result<f64> {
    let n = samples.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "Simpson's rule needs an odd number of samples >= 3, got {n}"
        )));
    }
    let mut acc = samples[0] + samples[n - 1];
    for (i, v) in samples.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}

/// Uniform nodes `a + i h` for `i = 0..points`, with `points` rounded up to odd.
pub fn simpson_nodes(a: f64, b: f64, points: usize) -> (Vec<f64>, f64) {
    let points = points.max(3) | 1;
    let h = (b - a) / (points - 1) as f64;
    ((0..points).map(|i| a + i as f64 * h).collect(), h)
}

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let (xs, h) = simpson_nodes(a, b, points);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    simpson_samples(&ys, h).expect("node count is odd")
}

/// Four-point Gauss-Legendre on `[0, 1]`: (node, weight).
pub const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// Tanh-sinh nodes on `[0, 1]` as `(t, 1 - t, weight)`.
///
/// Both distances to the ends are returned directly so that integrands with
/// an endpoint singularity can be evaluated without cancellation.
pub fn tanh_sinh_nodes(level: u32) -> Vec<(f64, f64, f64)> {
    let step = 1.0 / (1u64 << level) as f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let t_max = 4.0;
    let count = (t_max / step) as i64;
    let mut out = Vec::with_capacity(2 * count as usize + 1);
    for k in -count..=count {
        let t = k as f64 * step;
        let u = half_pi * t.sinh();
        let left = 1.0 / (1.0 + (-2.0 * u).exp());
        let right = 1.0 / (1.0 + (2.0 * u).exp());
        let ch = u.cosh();
        // d/dt of (1 + tanh u)/2
        let w = step * 0.5 * half_pi * t.cosh() / (ch * ch);
        if w > 0.0 && left > 0.0 && right > 0.0 {
            out.push((left, right, w));
        }
    }
    out
}

/// Integrates `f(x, distance_from_a, distance_from_b)` over `[a, b]`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, nodes: &[(f64, f64, f64)]) -> f64 {
    let len = b - a;
    let mut acc = 0.0;
    for &(l, r, w) in nodes {
        let (dl, dr) = (l * len, r * len);
        let x = if dl <= dr { a + dl } else { b - dr };
        let v = f(x, dl, dr);
        if v.is_finite() {
            acc += w * v;
        }
    }
    acc * len
}
