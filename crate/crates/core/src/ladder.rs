//! Ladder operators acting on concrete wavefunctions.
//!
//! A state of the potential algebra is a pair `(psi, j)`: the auxiliary angle
//! that carries `J3` is never materialized, and `J+-` act by applying
//! `A+-` to `psi` and shifting the label. All derivatives come from [`Jet`]s,
//! so operator chains are exact up to rounding.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{Family, ModelParams};
use crate::quadrature;
use crate::representation::{self, SpectrumMode};

type Evaluator = dyn Fn(f64, usize) -> Result<Jet> + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Label {
    pub family: Family,
    pub g: f64,
    pub j: Option<f64>,
    pub n: Option<usize>,
    pub description: String,
}

/// A real function on a family's domain, evaluated as jets.
#[derive(Clone)]
pub struct WaveFunction {
    eval: Arc<Evaluator>,
    family: Family,
    max_order: Option<usize>,
    label: Label,
}

impl fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunction")
            .field("label", &self.label)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl WaveFunction {
    pub fn new<F>(family: Family, label: Label, eval: F) -> Self
    where
        F: Fn(f64, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            family,
            max_order: None,
            label,
        }
    }

    /// Wraps an expression in the coordinate jet, e.g. `|x| (x * x).exp()`.
    pub fn from_expr<F>(family: Family, g: f64, description: &str, f: F) -> Self
    where
        F: Fn(&Jet) -> Jet + Send + Sync + 'static,
    {
        let label = Label {
            family,
            g,
            j: None,
            n: None,
            description: description.to_string(),
        };
        Self::new(family, label, move |x, k| Ok(f(&Jet::variable(x, k))))
    }

    /// Caps the jet order this function can supply.
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = Some(order);
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        self.family.domain()
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn max_order(&self) -> Option<usize> {
        self.max_order
    }

    pub fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        if let Some(max) = self.max_order {
            if order > max {
                return Err(Error::OrderExhausted {
                    requested: order,
                    available: max,
                });
            }
        }
        self.family.check_domain(x)?;
        (self.eval)(x, order)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x, 0)?.value())
    }

    pub fn scaled(&self, c: f64) -> WaveFunction {
        let inner = self.clone();
        Self {
            eval: Arc::new(move |x, k| Ok(inner.jet(x, k)?.scale(c))),
            family: self.family,
            max_order: self.max_order,
            label: self.label.clone(),
        }
    }

    fn derived(&self, order_cost: usize, description: String, eval: Arc<Evaluator>) -> Result<Self> {
        let max_order = match self.max_order {
            Some(m) if m < order_cost => {
                return Err(Error::OrderExhausted {
                    requested: order_cost,
                    available: m,
                })
            }
            Some(m) => Some(m - order_cost),
            None => None,
        };
        Ok(Self {
            eval,
            family: self.family,
            max_order,
            label: Label {
                description,
                ..self.label.clone()
            },
        })
    }

    fn relabel(mut self, j: Option<f64>, n: Option<usize>, description: String) -> Self {
        self.label.j = j;
        self.label.n = n;
        self.label.description = description;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

/// `f(x)` of the family as a jet.
pub fn profile_jet(family: Family, x: f64, order: usize) -> Result<Jet> {
    family.check_domain(x)?;
    let v = Jet::variable(x, order);
    Ok(match family {
        Family::FlatKepler => v.recip(),
        Family::SphericalKepler => v.cot(),
        Family::HyperbolicKepler => v.coth(),
        Family::RosenMorse => v.tanh(),
    })
}

/// `V(x)` as a jet, with the inverse-square factors taken as derivatives of
/// the profile so they stay finite at large `|x|`.
pub fn potential_jet(params: &ModelParams, x: f64, order: usize) -> Result<Jet> {
    let family = params.family;
    let c = params.centrifugal_coefficient();
    let g = params.g;
    let profile = profile_jet(family, x, order + 1)?;
    let f = profile.truncate(order);
    let df = profile.differentiate()?;
    // 1/x^2 = -(1/x)', 1/sin^2 = -(cot)', 1/sinh^2 = -(coth)' and
    // -1/cosh^2 = -(tanh)', so every family has V = -c f' - 2g f.
    Ok(&df.scale(-c) - &f.scale(2.0 * g))
}

/// `A+-(j) psi = +-psi' - j f psi + (g/j) psi`.
pub fn apply_a(family: Family, sign: Sign, j: f64, g: f64, psi: &WaveFunction) -> Result<WaveFunction> {
    if j == 0.0 {
        return Err(Error::SingularParameter("A(j) contains g/j; j = 0".into()));
    }
    if psi.family != family {
        return Err(Error::InvalidInput(format!(
            "operator for {family} applied to a {} wavefunction",
            psi.family
        )));
    }
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let inner = psi.clone();
    let eval = Arc::new(move |x: f64, k: usize| {
        let p = inner.jet(x, k + 1)?;
        let f = profile_jet(family, x, k)?;
        let base = p.truncate(k);
        let out = &p.differentiate()?.scale(s) - &(&f * &base).scale(j);
        Ok(&out + &base.scale(g / j))
    });
    let name = if s > 0.0 { "A+" } else { "A-" };
    psi.derived(1, format!("{name}({j}) {}", psi.label.description), eval)
}

/// `-psi'' + V psi` with `V` at the given parameters.
pub fn invariant_h(params: &ModelParams, psi: &WaveFunction) -> Result<WaveFunction> {
    let p = *params;
    let inner = psi.clone();
    let eval = Arc::new(move |x: f64, k: usize| {
        let jet = inner.jet(x, k + 2)?;
        let d2 = jet.differentiate()?.differentiate()?;
        let v = potential_jet(&p, x, k)?;
        Ok(&(&v * &jet.truncate(k)) - &d2)
    });
    psi.derived(2, format!("H(j={}) {}", params.j, psi.label.description), eval)
}

/// Annihilated end of a ladder chain, unnormalized.
///
/// Flat, spherical and hyperbolic: `rho^k exp(-g x / k)` with `rho = x, sin x,
/// sinh x`, annihilated by `A+(k)`. Rosen-Morse: `cosh^(1-k) exp(g x/(k-1))`,
/// annihilated by `A-(k-1)`.
pub fn base_state(family: Family, j_end: f64, g: f64) -> Result<WaveFunction> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidInput(format!("base states need g > 0, got {g}")));
    }
    let outside = |window: String| {
        Err(Error::NonNormalizable(format!(
            "{family} base state at j = {j_end}, g = {g}: j must lie in {window}"
        )))
    };
    let k = j_end;
    let label = Label {
        family,
        g,
        j: Some(j_end),
        n: None,
        description: format!("base({j_end})"),
    };
    let wf = match family {
        Family::FlatKepler | Family::SphericalKepler => {
            if !(k >= 0.5) {
                return outside("[1/2, inf)".into());
            }
            WaveFunction::new(family, label, move |x, order| {
                let v = Jet::variable(x, order);
                let ln_rho = if family == Family::FlatKepler { v.ln() } else { v.sin().ln() };
                Ok((&ln_rho.scale(k) - &v.scale(g / k)).exp())
            })
        }
        Family::HyperbolicKepler => {
            if !(k > 0.0 && k * k < g) {
                return outside(format!("(0, sqrt(g)) = (0, {})", g.sqrt()));
            }
            WaveFunction::new(family, label, move |x, order| {
                let v = Jet::variable(x, order);
                Ok((&v.ln_sinh().scale(k) - &v.scale(g / k)).exp())
            })
        }
        Family::RosenMorse => {
            let m = k - 1.0;
            if !(m > 0.0 && m * m > g) {
                return outside(format!("(1 + sqrt(g), inf) = ({}, inf)", 1.0 + g.sqrt()));
            }
            WaveFunction::new(family, label, move |x, order| {
                let v = Jet::variable(x, order);
                Ok((&v.ln_cosh().scale(-m) + &v.scale(g / m)).exp())
            })
        }
    };
    Ok(wf)
}

/// Level-`n` eigenfunction of `H(j)`, unnormalized. Flat, spherical and
/// hyperbolic chains lower from `base(j + n)`; Rosen-Morse raises from
/// `base(j - n)`.
pub fn rodrigues_chain(params: &ModelParams, n: usize) -> Result<WaveFunction> {
    let report = representation::spectrum(params, Some(n), SpectrumMode::Extended)?;
    if report.lines.len() <= n {
        return Err(Error::NoBoundState {
            family: params.family,
            j: params.j,
            g: params.g,
            window: format!("levels 0..={}", report.lines.len() - 1),
        });
    }
    let (family, j, g) = (params.family, params.j, params.g);
    let mut psi;
    match family {
        Family::RosenMorse => {
            psi = base_state(family, j - n as f64, g)?;
            for k in (1..=n).rev() {
                psi = apply_a(family, Sign::Plus, j - k as f64, g, &psi)?;
            }
        }
        _ => {
            psi = base_state(family, j + n as f64, g)?;
            for k in (0..n).rev() {
                psi = apply_a(family, Sign::Minus, j + k as f64, g, &psi)?;
            }
        }
    }
    Ok(psi.relabel(Some(j), Some(n), format!("{family} j={j} g={g} level {n}")))
}

/// A simultaneous eigenstate of `J3` (label `j`) and the invariant operator.
#[derive(Debug, Clone)]
pub struct LadderState {
    pub family: Family,
    pub psi: WaveFunction,
    pub j: f64,
}

impl LadderState {
    pub fn new(psi: WaveFunction, j: f64) -> Self {
        Self {
            family: psi.family,
            psi,
            j,
        }
    }
}

/// `J+ (psi, j) = (A+(j) psi, j + 1)`.
pub fn j_plus(state: &LadderState, g: f64) -> Result<LadderState> {
    if state.j == 0.0 {
        return Err(Error::SingularParameter("J+ needs 1/J3 at j = 0".into()));
    }
    Ok(LadderState {
        family: state.family,
        psi: apply_a(state.family, Sign::Plus, state.j, g, &state.psi)?,
        j: state.j + 1.0,
    })
}

/// `J- (psi, j) = (A-(j - 1) psi, j - 1)`.
pub fn j_minus(state: &LadderState, g: f64) -> Result<LadderState> {
    let shifted = state.j - 1.0;
    if shifted == 0.0 {
        return Err(Error::SingularParameter("J- needs 1/(J3 - 1) at j = 1".into()));
    }
    Ok(LadderState {
        family: state.family,
        psi: apply_a(state.family, Sign::Minus, shifted, g, &state.psi)?,
        j: shifted,
    })
}

/// The state `|E, j>` of the finite representation with top label `nu`:
/// level `nu - j` of `H(j)`, or of the mirror `H(1 - j)` when `j <= 0`.
pub fn orbit_state(family: Family, g: f64, nu: f64, j: f64) -> Result<LadderState> {
    let (level_j, n) = if j > 0.0 { (j, nu - j) } else { (1.0 - j, nu - (1.0 - j)) };
    if n < 0.0 || n.fract() != 0.0 {
        return Err(Error::InvalidInput(format!("j = {j} is not in the orbit of nu = {nu}")));
    }
    let params = ModelParams::new(family, level_j, g)?;
    let psi = rodrigues_chain(&params, n as usize)?;
    Ok(LadderState::new(psi, j))
}

/// Maximum deviation over samples, relative to a reference scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub scale: f64,
    pub relative: f64,
}

impl Deviation {
    fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut max_abs = 0.0f64;
        let mut scale = 0.0f64;
        for (dev, s) in pairs {
            max_abs = max_abs.max(dev.abs());
            scale = scale.max(s.abs());
        }
        let relative = if scale > 0.0 { max_abs / scale } else { max_abs };
        Self { max_abs, scale, relative }
    }
}

/// `([J+, J-] psi)(x) - c(j) psi(x)`, relative to `max |psi|`.
pub fn commutator_check(family: Family, g: f64, state: &LadderState, xs: &[f64]) -> Result<Deviation> {
    let c = family.commutator_constant(state.j, g)?;
    let up_down = j_plus(&j_minus(state, g)?, g)?;
    let down_up = j_minus(&j_plus(state, g)?, g)?;
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        let psi = state.psi.value(x)?;
        let lhs = up_down.psi.value(x)? - down_up.psi.value(x)?;
        pairs.push((lhs - c * psi, psi));
    }
    Ok(Deviation::from_pairs(pairs))
}

/// `H J+- psi - J+- H psi`, with each `H` taken at the label of the state it
/// acts on. Relative to the largest of `|H J psi|` and `|J H psi|`.
pub fn h_commutator_check(
    params: &ModelParams,
    psi: &WaveFunction,
    sign: Sign,
    xs: &[f64],
) -> Result<Deviation> {
    let g = params.g;
    let state = LadderState::new(psi.clone(), params.j);
    let moved = match sign {
        Sign::Plus => j_plus(&state, g)?,
        Sign::Minus => j_minus(&state, g)?,
    };
    let h_after = invariant_h(&ModelParams::new(params.family, moved.j, g)?, &moved.psi)?;
    let h_first = invariant_h(params, psi)?;
    let j_after = match sign {
        Sign::Plus => j_plus(&LadderState::new(h_first, params.j), g)?,
        Sign::Minus => j_minus(&LadderState::new(h_first, params.j), g)?,
    };
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        let a = h_after.value(x)?;
        let b = j_after.psi.value(x)?;
        pairs.push((a - b, a.abs().max(b.abs())));
    }
    Ok(Deviation::from_pairs(pairs))
}

/// `A-(j) A+(j) psi + eps(j) psi - H psi`, relative to `max |H psi|`.
pub fn factorization_check(params: &ModelParams, psi: &WaveFunction, xs: &[f64]) -> Result<Deviation> {
    let (family, j, g) = (params.family, params.j, params.g);
    let eps = params.factorization_energy()?;
    let product = apply_a(family, Sign::Minus, j, g, &apply_a(family, Sign::Plus, j, g, psi)?)?;
    let h = invariant_h(params, psi)?;
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        let want = h.value(x)?;
        let got = product.value(x)? + eps * psi.value(x)?;
        pairs.push((got - want, want.abs().max(psi.value(x)?.abs())));
    }
    Ok(Deviation::from_pairs(pairs))
}

/// `max |(H - E) psi| / max |psi|` over samples.
pub fn eigen_residual(params: &ModelParams, psi: &WaveFunction, energy: f64, xs: &[f64]) -> Result<Deviation> {
    let h = invariant_h(params, psi)?;
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        let v = psi.value(x)?;
        pairs.push((h.value(x)? - energy * v, v));
    }
    Ok(Deviation::from_pairs(pairs))
}

/// Pointwise `max |psi| ` and `max |A psi|` for annihilation checks.
pub fn annihilation(family: Family, sign: Sign, j: f64, g: f64, psi: &WaveFunction, xs: &[f64]) -> Result<Deviation> {
    let image = apply_a(family, sign, j, g, psi)?;
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        pairs.push((image.value(x)?, psi.value(x)?));
    }
    Ok(Deviation::from_pairs(pairs))
}

/// Quadrature interval and sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub a: f64,
    pub b: f64,
    pub points: usize,
}

impl Bounds {
    pub fn new(a: f64, b: f64, points: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!("bad quadrature interval ({a}, {b})")));
        }
        Ok(Self { a, b, points: points.max(3) | 1 })
    }

    /// Interval that holds the first `levels` states of `params` with their
    /// tails below roughly `1e-30` of the peak.
    pub fn for_levels(params: &ModelParams, levels: usize) -> Result<Self> {
        let top = levels.saturating_sub(1) as f64;
        let (j, g) = (params.j, params.g);
        let (a, b) = match params.family {
            Family::FlatKepler => (0.0, (40.0 * (j + top) / g).max(40.0)),
            Family::SphericalKepler => (0.0, std::f64::consts::PI),
            Family::HyperbolicKepler => {
                let k = j.max(1.0 - j) + top;
                let rate = g / k - k;
                (0.0, if rate > 0.0 { (40.0 / rate).clamp(20.0, 400.0) } else { 400.0 })
            }
            Family::RosenMorse => {
                let m = j - top - 1.0;
                let rate = if m > 0.0 { m - g / m } else { 0.0 };
                let right = if rate > 0.0 { (40.0 / rate).clamp(20.0, 400.0) } else { 400.0 };
                let left = (40.0 / (j - 1.0 + g / (j - 1.0)).max(1e-3)).clamp(20.0, 400.0);
                (-left, right)
            }
        };
        Self::new(a, b, 20_001)
    }

    pub fn nodes(&self) -> (Vec<f64>, f64) {
        quadrature::simpson_nodes(self.a, self.b, self.points)
    }
}

/// Samples at a closed endpoint of the domain use the evaluator's limit when
/// it is finite and zero otherwise (`x^j` terms vanish there).
fn samples(psi: &WaveFunction, bounds: &Bounds) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let (xs, h) = bounds.nodes();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        let y = if psi.family.in_domain(x) {
            psi.value(x)?
        } else {
            let (lo, hi) = psi.domain();
            if x < lo || x > hi {
                return Err(Error::Domain { family: psi.family, x, domain: psi.family.domain_description() });
            }
            (psi.eval)(x, 0).map(|j| j.value()).ok().filter(|v| v.is_finite()).unwrap_or(0.0)
        };
        ys.push(y);
    }
    Ok((xs, ys, h))
}

/// The quadrature nodes of `bounds` and `psi` sampled on them, with the
/// same endpoint convention as the inner product.
pub fn sample(psi: &WaveFunction, bounds: &Bounds) -> Result<(Vec<f64>, Vec<f64>)> {
    let (xs, ys, _) = samples(psi, bounds)?;
    Ok((xs, ys))
}

/// Simpson `<a, b>` over the bounds.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction, bounds: &Bounds) -> Result<f64> {
    let (_, ya, h) = samples(a, bounds)?;
    let (_, yb, _) = samples(b, bounds)?;
    let prod: Vec<f64> = ya.iter().zip(&yb).map(|(u, v)| u * v).collect();
    quadrature::simpson_samples(&prod, h)
}

pub fn norm(psi: &WaveFunction, bounds: &Bounds) -> Result<f64> {
    let (_, ys, h) = samples(psi, bounds)?;
    let sq: Vec<f64> = ys.iter().map(|v| v * v).collect();
    Ok(quadrature::simpson_samples(&sq, h)?.sqrt())
}

/// Scales `psi` to unit Simpson norm, positive at the first interior sample
/// where it is nonzero. Returns the scaled function and the original norm.
pub fn normalize(psi: &WaveFunction, bounds: &Bounds) -> Result<(WaveFunction, f64)> {
    let (_, ys, h) = samples(psi, bounds)?;
    let sq: Vec<f64> = ys.iter().map(|v| v * v).collect();
    let nrm = quadrature::simpson_samples(&sq, h)?.sqrt();
    if !nrm.is_finite() || nrm < 1e-300 {
        return Err(Error::Degenerate(format!("norm {nrm} cannot be normalized")));
    }
    let first = ys.iter().skip(1).find(|v| **v != 0.0).copied().unwrap_or(1.0);
    let c = first.signum() / nrm;
    Ok((psi.scaled(c), nrm))
}

/// Interior sample points that keep a guard band away from finite endpoints.
pub fn interior_samples(family: Family, a: f64, b: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = family.domain();
    let lo = a.max(lo);
    let hi = b.min(hi);
    let guard = 1e-3 * (hi - lo);
    let (lo, hi) = (lo + guard, hi - guard);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count.max(2) - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(family: Family, j: f64, g: f64) -> ModelParams {
        ModelParams::new(family, j, g).unwrap()
    }

    #[test]
    fn base_state_examples() {
        let flat = base_state(Family::FlatKepler, 1.0, 1.0).unwrap();
        let jet = flat.jet(1.0, 1).unwrap();
        assert!((jet.value() - (-1f64).exp()).abs() < 1e-15);
        assert!(jet.derivatives()[1].abs() < 1e-15);

        let sph = base_state(Family::SphericalKepler, 0.5, 1.0).unwrap();
        assert!((sph.value(PI / 2.0).unwrap() - (-PI).exp()).abs() < 1e-15);

        let rm = base_state(Family::RosenMorse, 3.0, 1.0).unwrap();
        for x in [-3.0f64, 0.0, 0.4, 5.0] {
            let want = x.cosh().powi(-2) * (x / 2.0).exp();
            assert!((rm.value(x).unwrap() - want).abs() < 1e-14 * want);
        }
        let n2 = norm(&rm, &Bounds::new(-30.0, 30.0, 20001).unwrap()).unwrap().powi(2);
        assert!(n2.is_finite() && n2 > 0.0);
    }

    #[test]
    fn base_state_windows() {
        assert!(matches!(base_state(Family::FlatKepler, 0.3, 1.0), Err(Error::NonNormalizable(_))));
        assert!(matches!(base_state(Family::HyperbolicKepler, 3.0, 9.0), Err(Error::NonNormalizable(_))));
        assert!(base_state(Family::HyperbolicKepler, 0.2, 0.16).is_ok());
        assert!(matches!(base_state(Family::RosenMorse, 2.0, 1.0), Err(Error::NonNormalizable(_))));
        assert!(base_state(Family::FlatKepler, 1.0, 0.0).is_err());
    }

    #[test]
    fn base_states_are_annihilated() {
        for (family, k, g, xs) in [
            (Family::FlatKepler, 1.5, 2.0, interior_samples(Family::FlatKepler, 0.0, 30.0, 50)),
            (Family::SphericalKepler, 0.5, 1.0, interior_samples(Family::SphericalKepler, 0.0, PI, 50)),
            (Family::HyperbolicKepler, 2.5, 9.0, interior_samples(Family::HyperbolicKepler, 0.0, 20.0, 50)),
        ] {
            let psi = base_state(family, k, g).unwrap();
            let d = annihilation(family, Sign::Plus, k, g, &psi, &xs).unwrap();
            assert!(d.relative < 1e-12, "{family}: {}", d.relative);
        }
        let rm = base_state(Family::RosenMorse, 3.0, 1.0).unwrap();
        let xs = interior_samples(Family::RosenMorse, -10.0, 10.0, 50);
        assert!(annihilation(Family::RosenMorse, Sign::Minus, 2.0, 1.0, &rm, &xs).unwrap().relative < 1e-12);
    }

    #[test]
    fn hand_computed_first_order_action() {
        let psi = WaveFunction::from_expr(Family::FlatKepler, 0.0, "x", |x| x.clone());
        let out = apply_a(Family::FlatKepler, Sign::Minus, 1.0, 0.0, &psi).unwrap();
        for x in [0.3, 1.0, 7.0] {
            assert!((out.value(x).unwrap() + 2.0).abs() < 1e-15);
        }
        assert!(apply_a(Family::FlatKepler, Sign::Plus, 0.0, 1.0, &psi).is_err());
    }

    #[test]
    fn order_budget_is_enforced() {
        let psi = WaveFunction::from_expr(Family::FlatKepler, 1.0, "x^2", |x| x * x).with_max_order(1);
        let once = apply_a(Family::FlatKepler, Sign::Plus, 1.0, 1.0, &psi).unwrap();
        assert_eq!(once.max_order(), Some(0));
        assert!(matches!(
            apply_a(Family::FlatKepler, Sign::Plus, 1.0, 1.0, &once),
            Err(Error::OrderExhausted { .. })
        ));
        assert!(matches!(invariant_h(&params(Family::FlatKepler, 1.0, 1.0), &psi), Err(Error::OrderExhausted { .. })));
    }

    #[test]
    fn commutator_matches_constant() {
        let psi = WaveFunction::from_expr(Family::FlatKepler, 1.0, "x^2 e^-x", |x| &(x * x) * &(-x).exp());
        let state = LadderState::new(psi, 2.0);
        let xs = interior_samples(Family::FlatKepler, 0.0, 10.0, 40);
        let d = commutator_check(Family::FlatKepler, 1.0, &state, &xs).unwrap();
        assert!(d.relative < 1e-9, "{}", d.relative);
        assert_eq!(Family::FlatKepler.commutator_constant(2.0, 1.0).unwrap(), 0.75);
        let free = commutator_check(Family::FlatKepler, 0.0, &state, &xs).unwrap();
        assert!(free.relative < 1e-10);
    }

    #[test]
    fn ladder_labels_shift_by_one() {
        let psi = WaveFunction::from_expr(Family::SphericalKepler, 1.0, "sin^2", |x| x.sin().powi(2));
        let s = LadderState::new(psi, 2.5);
        assert_eq!(j_plus(&s, 1.0).unwrap().j, 3.5);
        assert_eq!(j_minus(&s, 1.0).unwrap().j, 1.5);
        assert_eq!(j_minus(&j_plus(&s, 1.0).unwrap(), 1.0).unwrap().j, 2.5);
        assert!(j_plus(&LadderState::new(s.psi.clone(), 0.0), 1.0).is_err());
        assert!(j_minus(&LadderState::new(s.psi.clone(), 1.0), 1.0).is_err());
    }

    #[test]
    fn chains_are_eigenfunctions() {
        let cases = [
            (Family::FlatKepler, 0.5, 1.0, 3, 30.0),
            (Family::SphericalKepler, 0.5, 1.0, 3, PI),
            (Family::HyperbolicKepler, 1.5, 9.0, 1, 20.0),
            (Family::RosenMorse, 4.0, 1.0, 1, 15.0),
        ];
        for (family, j, g, top, len) in cases {
            let p = params(family, j, g);
            let report = representation::spectrum(&p, Some(top), SpectrumMode::Extended).unwrap();
            let lo = if family == Family::RosenMorse { -len } else { 0.0 };
            let xs = interior_samples(family, lo, len, 60);
            for line in report.lines {
                let psi = rodrigues_chain(&p, line.n).unwrap();
                let r = eigen_residual(&p, &psi, line.energy, &xs).unwrap();
                assert!(r.relative < 1e-8, "{family} n={}: {}", line.n, r.relative);
            }
        }
    }

    #[test]
    fn normalization() {
        let psi = WaveFunction::from_expr(Family::FlatKepler, 1.0, "e^-x", |x| (-x).exp());
        let b = Bounds::new(0.0, 40.0, 40001).unwrap();
        let n = norm(&psi, &b).unwrap();
        assert!((n * n - 0.5).abs() < 1e-10);
        let (unit, _) = normalize(&psi.scaled(-3.0), &b).unwrap();
        assert!(unit.value(1.0).unwrap() > 0.0);
        let (twice, n2) = normalize(&unit, &b).unwrap();
        assert!((n2 - 1.0).abs() < 1e-14);
        assert!((twice.value(1.0).unwrap() - unit.value(1.0).unwrap()).abs() < 1e-14);
        let zero = WaveFunction::from_expr(Family::FlatKepler, 1.0, "0", |x| x.scale(0.0));
        assert!(matches!(normalize(&zero, &b), Err(Error::Degenerate(_))));
    }

    #[test]
    fn flat_levels_are_orthogonal() {
        let p = params(Family::FlatKepler, 0.5, 1.0);
        let b = Bounds::for_levels(&p, 2).unwrap();
        let (u, _) = normalize(&rodrigues_chain(&p, 0).unwrap(), &b).unwrap();
        let (v, _) = normalize(&rodrigues_chain(&p, 1).unwrap(), &b).unwrap();
        assert!(inner_product(&u, &v, &b).unwrap().abs() < 1e-8);
    }

    #[test]
    fn chain_outside_spectrum_fails() {
        let p = params(Family::HyperbolicKepler, 1.5, 9.0);
        assert!(rodrigues_chain(&p, 2).is_err());
        assert!(rodrigues_chain(&params(Family::RosenMorse, 2.0, 1.0), 0).is_err());
    }
}
