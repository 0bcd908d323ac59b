//! Truncated Taylor jets.
//!
//! A jet of order `K` holds `f(x0), f'(x0), ..., f^(K)(x0)`. Coefficients are
//! raw derivatives, not divided by `k!`, so products use binomial weights
//! (Leibniz) and composition with elementary functions uses the first-order
//! ODE each function satisfies.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    d: Vec<f64>,
}

/// Row `k` of Pascal's triangle.
fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for i in 1..k {
        row[i] = row[i - 1] * (k + 1 - i) as f64 / i as f64;
    }
    row
}

/// Binomial rows `0..=k`, shared by the recurrences below.
fn pascal(k: usize) -> Vec<Vec<f64>> {
    (0..=k).map(binomial_row).collect()
}

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut d = vec![0.0; order + 1];
        d[0] = c;
        Self { d }
    }

    /// The identity function at `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut d = vec![0.0; order + 1];
        d[0] = x;
        if order >= 1 {
            d[1] = 1.0;
        }
        Self { d }
    }

    /// From `[f, f', f'', ...]`; must be non-empty.
    pub fn from_derivatives(d: Vec<f64>) -> Self {
        assert!(!d.is_empty(), "a jet needs at least the value");
        Self { d }
    }

    pub fn order(&self) -> usize {
        self.d.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.d[0]
    }

    pub fn derivative(&self, k: usize) -> Result<f64> {
        self.d.get(k).copied().ok_or(Error::OrderExhausted {
            requested: k,
            available: self.order(),
        })
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.d
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|v| v.is_finite())
    }

    /// Jet of `f'`, one order lower.
    pub fn differentiate(&self) -> Result<Jet> {
        if self.d.len() < 2 {
            return Err(Error::OrderExhausted {
                requested: 1,
                available: 0,
            });
        }
        Ok(Self {
            d: self.d[1..].to_vec(),
        })
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Self {
            d: self.d[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Self {
            d: self.d.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.d[0] += c;
        out
    }

    fn zip(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        let n = self.d.len().min(other.d.len());
        Self {
            d: (0..n).map(|k| op(self.d[k], other.d[k])).collect(),
        }
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let n = self.d.len().min(other.d.len());
        let rows = pascal(n - 1);
        let d = (0..n)
            .map(|k| (0..=k).map(|i| rows[k][i] * self.d[i] * other.d[k - i]).sum())
            .collect();
        Self { d }
    }

    pub fn div_jet(&self, other: &Jet) -> Jet {
        let n = self.d.len().min(other.d.len());
        let rows = pascal(n - 1);
        let b0 = other.d[0];
        let mut q = Vec::with_capacity(n);
        for k in 0..n {
            let s: f64 = (1..=k).map(|i| rows[k][i] * other.d[i] * q[k - i]).sum();
            q.push((self.d[k] - s) / b0);
        }
        Self { d: q }
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div_jet(self)
    }

    /// `h` with `h(x0) = value` and `h' = slope`, where `slope` has order `K - 1`.
    fn antiderivative(value: f64, slope: &Jet, order: usize) -> Jet {
        let mut d = Vec::with_capacity(order + 1);
        d.push(value);
        d.extend_from_slice(&slope.d[..order]);
        Self { d }
    }

    /// `f'` of this jet, or the empty slope for order 0.
    fn slope(&self) -> Option<Jet> {
        self.differentiate().ok()
    }

    pub fn exp(&self) -> Jet {
        let k_max = self.order();
        let rows = pascal(k_max);
        let mut h = Vec::with_capacity(k_max + 1);
        h.push(self.d[0].exp());
        for k in 1..=k_max {
            let s = (0..k).map(|i| rows[k - 1][i] * self.d[i + 1] * h[k - 1 - i]).sum();
            h.push(s);
        }
        Self { d: h }
    }

    /// `(sin f, cos f)` from `s' = c f'`, `c' = -s f'`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        self.coupled_trig(-1.0, self.d[0].sin(), self.d[0].cos())
    }

    /// `(sinh f, cosh f)` from `s' = c f'`, `c' = s f'`.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        self.coupled_trig(1.0, self.d[0].sinh(), self.d[0].cosh())
    }

    fn coupled_trig(&self, sign: f64, s0: f64, c0: f64) -> (Jet, Jet) {
        let k_max = self.order();
        let rows = pascal(k_max);
        let mut s = vec![s0];
        let mut c = vec![c0];
        for k in 1..=k_max {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for i in 0..k {
                let w = rows[k - 1][i] * self.d[i + 1];
                ds += w * c[k - 1 - i];
                dc += w * s[k - 1 - i];
            }
            s.push(ds);
            c.push(sign * dc);
        }
        (Self { d: s }, Self { d: c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    pub fn tan(&self) -> Jet {
        let (s, c) = self.sin_cos();
        s.div_jet(&c)
    }

    pub fn cot(&self) -> Jet {
        let (s, c) = self.sin_cos();
        c.div_jet(&s)
    }

    /// From `t' = (1 - t^2) f'`; finite for every real argument.
    pub fn tanh(&self) -> Jet {
        let k_max = self.order();
        let rows = pascal(k_max);
        let t0 = self.d[0].tanh();
        let mut t = vec![t0];
        let mut u = vec![1.0 - t0 * t0];
        for k in 1..=k_max {
            let tk = (0..k).map(|i| rows[k - 1][i] * self.d[i + 1] * u[k - 1 - i]).sum();
            t.push(tk);
            let uk: f64 = (0..=k).map(|i| rows[k][i] * t[i] * t[k - i]).sum();
            u.push(-uk);
        }
        Self { d: t }
    }

    pub fn coth(&self) -> Jet {
        self.tanh().recip()
    }

    pub fn ln(&self) -> Jet {
        let order = self.order();
        match self.slope() {
            Some(df) => Self::antiderivative(self.d[0].ln(), &df.div_jet(&self.truncate(order - 1)), order),
            None => Jet::constant(self.d[0].ln(), 0),
        }
    }

    /// `ln sinh f` without overflowing for large `f > 0`.
    pub fn ln_sinh(&self) -> Jet {
        let v = self.d[0];
        let value = v + (-(-2.0 * v).exp()).ln_1p() - std::f64::consts::LN_2;
        let order = self.order();
        match self.slope() {
            Some(df) => Self::antiderivative(value, &self.truncate(order - 1).coth().mul_jet(&df), order),
            None => Jet::constant(value, 0),
        }
    }

    /// `ln cosh f` without overflowing.
    pub fn ln_cosh(&self) -> Jet {
        let a = self.d[0].abs();
        let value = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
        let order = self.order();
        match self.slope() {
            Some(df) => Self::antiderivative(value, &self.truncate(order - 1).tanh().mul_jet(&df), order),
            None => Jet::constant(value, 0),
        }
    }

    /// `f^p` from `f h' = p h f'`; needs `f(x0) != 0` (and `> 0` unless `p`
    /// is an integer).
    pub fn powf(&self, p: f64) -> Jet {
        let k_max = self.order();
        let rows = pascal(k_max);
        let f0 = self.d[0];
        let mut h = vec![f0.powf(p)];
        for k in 1..=k_max {
            let r = &rows[k - 1];
            let a: f64 = (0..k).map(|i| r[i] * h[i] * self.d[k - i]).sum();
            let b: f64 = (1..k).map(|i| r[i] * self.d[i] * h[k - i]).sum();
            h.push((p * a - b) / f0);
        }
        Self { d: h }
    }

    /// Integer power by repeated multiplication; valid at `f(x0) = 0`.
    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n {
            out = out.mul_jet(self);
        }
        out
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.div_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { (&self).$m(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        self.add_scalar(c)
    }
}
