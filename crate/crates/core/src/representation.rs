//! Representations of the potential algebras and the bound-state spectra
//! they predict.
//!
//! Everything here follows from two facts: `J+-` shift the `J3` eigenvalue by
//! one, and the squared norms `||J+- |E, j>||^2` must be non-negative. The
//! norms are `E - eps(j)` (up) and `E - eps(j - 1)` (down), where `eps` is the
//! factorization energy of the family.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::half_integer::HalfInteger;
use crate::model::{Family, ModelParams};

/// How many orbit entries are listed before the orbit is marked truncated.
pub const ORBIT_PREVIEW: usize = 64;
const INFINITE_ORBIT_PREVIEW: usize = 6;

/// Tolerance for recognising the one-dimensional representation from a float `j`.
const SPECIAL_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepKind {
    FiniteDim,
    InfiniteLowering,
    InfiniteRaising,
    OneDimSpecial,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Finite(u64),
    Infinite,
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(d) => s.serialize_u64(*d),
            Dimension::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// One classified representation (or the reason there is none).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepClass {
    pub kind: RepKind,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_exact: Option<HalfInteger>,
    pub dim: Option<Dimension>,
    /// `J3` eigenvalues in ladder order starting from `nu`.
    pub orbit: Vec<f64>,
    pub orbit_truncated: bool,
    /// Eigenvalue of the invariant operator, constant on the orbit.
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RepClass {
    fn excluded(nu: f64, note: impl Into<String>) -> Self {
        Self {
            kind: RepKind::Excluded,
            nu,
            nu_exact: HalfInteger::from_f64_exact(nu),
            dim: None,
            orbit: Vec::new(),
            orbit_truncated: false,
            energy: None,
            note: Some(note.into()),
        }
    }

    fn finite(family: Family, nu: HalfInteger, g: f64, note: Option<String>) -> Self {
        let dim = nu.twice_value() as u64;
        let listed = (dim as usize).min(ORBIT_PREVIEW);
        let orbit = (0..listed).map(|k| nu.value() - k as f64).collect();
        Self {
            kind: RepKind::FiniteDim,
            nu: nu.value(),
            nu_exact: Some(nu),
            dim: Some(Dimension::Finite(dim)),
            orbit,
            orbit_truncated: dim as usize > listed,
            // nu is half-odd, never zero
            energy: family.factorization_energy(nu.value(), g).ok(),
            note,
        }
    }

    fn infinite(kind: RepKind, nu: f64, energy: f64) -> Self {
        let step = if kind == RepKind::InfiniteLowering { -1.0 } else { 1.0 };
        Self {
            kind,
            nu,
            nu_exact: HalfInteger::from_f64_exact(nu),
            dim: Some(Dimension::Infinite),
            orbit: (0..INFINITE_ORBIT_PREVIEW).map(|k| nu + step * k as f64).collect(),
            orbit_truncated: true,
            energy: Some(energy),
            note: None,
        }
    }
}

/// `||J+ |E, j>||^2` or `||J- |E, j>||^2` for a normalized simultaneous eigenstate.
pub fn ladder_norm_sq(params: &ModelParams, energy: f64, direction: Direction) -> Result<f64> {
    let at = match direction {
        Direction::Up => params.j,
        Direction::Down => params.j - 1.0,
    };
    if at == 0.0 {
        return Err(Error::SingularParameter(format!(
            "{direction:?} norm at j = {} divides by zero",
            params.j
        )));
    }
    Ok(energy - params.family.factorization_energy(at, params.g)?)
}

/// The root `j = 1/2 - sqrt(1/4 - g)` carrying the one-dimensional
/// representation of the hyperbolic algebra, for `g` in `(0, 1/4)`.
pub fn one_dim_special_root(g: f64) -> Option<f64> {
    if g > 0.0 && g < 0.25 {
        Some(0.5 - (0.25 - g).sqrt())
    } else {
        None
    }
}

fn matches_special(g: f64, v: f64) -> Option<(f64, bool)> {
    let root = one_dim_special_root(g)?;
    let close = |a: f64, b: f64| (a - b).abs() <= SPECIAL_ROOT_TOL * a.abs().max(1.0);
    if close(v, root) {
        Some((root, false))
    } else if close(v, 1.0 - root) {
        Some((root, true))
    } else {
        None
    }
}

/// Largest half-odd `nu` with `nu^2 < g`, computed with exact comparisons.
pub fn nu_max(g: f64) -> Option<HalfInteger> {
    if !(g > 0.25) {
        return None;
    }
    let four_g = 4.0 * g;
    let mut t = four_g.sqrt().floor() as i64;
    while t > 0 && ((t * t) as f64) >= four_g {
        t -= 1;
    }
    while (((t + 1) * (t + 1)) as f64) < four_g {
        t += 1;
    }
    if t % 2 == 0 {
        t -= 1;
    }
    (t >= 1).then(|| HalfInteger::from_twice(t))
}

/// `nu` strictly inside `(1 - sqrt(g), sqrt(g))`, compared through squares.
fn in_finite_band(nu: f64, g: f64) -> bool {
    let below_top = nu <= 0.0 || nu * nu < g;
    let above_bottom = nu >= 1.0 || (1.0 - nu) * (1.0 - nu) < g;
    below_top && above_bottom
}

/// Classifies the representation labelled by `nu` for the family's algebra.
/// Only `params.family` and `params.g` are consulted.
pub fn classify(params: &ModelParams, nu: f64) -> Result<RepClass> {
    params.require_bound_state_coupling()?;
    if !nu.is_finite() {
        return Err(Error::InvalidInput(format!("nu must be finite, got {nu}")));
    }
    let g = params.g;
    let family = params.family;
    match family {
        Family::FlatKepler | Family::SphericalKepler => Ok(classify_compact(family, g, nu)),
        Family::HyperbolicKepler | Family::RosenMorse => Ok(classify_hyperbolic(family, g, nu)),
    }
}

fn classify_compact(family: Family, g: f64, nu: f64) -> RepClass {
    match HalfInteger::from_f64_exact(nu) {
        Some(h) if h.is_half_odd() => {
            if h.twice_value() > 0 {
                RepClass::finite(family, h, g, None)
            } else {
                RepClass::finite(
                    family,
                    h.mirror(),
                    g,
                    Some(format!("relabelled from nu = {nu} by j -> 1 - j")),
                )
            }
        }
        Some(_) => RepClass::excluded(
            nu,
            "integer nu: the orbit contains j = 0, where 1/J3 is undefined",
        ),
        None => RepClass::excluded(nu, "nu is not a half-integer: the ladder cannot terminate"),
    }
}

fn classify_hyperbolic(family: Family, g: f64, nu: f64) -> RepClass {
    if let Some((root, mirrored)) = matches_special(g, nu) {
        let energy = family.factorization_energy(root, g).ok();
        return RepClass {
            kind: RepKind::OneDimSpecial,
            nu: root,
            nu_exact: None,
            dim: Some(Dimension::Finite(1)),
            orbit: vec![root],
            orbit_truncated: false,
            energy,
            note: mirrored.then(|| format!("j -> 1 - j partner of nu = {nu}")),
        };
    }
    if nu < 0.0 && nu * nu > g {
        let energy = -nu * nu - g * g / (nu * nu);
        return RepClass::infinite(RepKind::InfiniteLowering, nu, energy);
    }
    let k = nu - 1.0;
    if k > 0.0 && k * k > g {
        let energy = -k * k - g * g / (k * k);
        return RepClass::infinite(RepKind::InfiniteRaising, nu, energy);
    }
    if in_finite_band(nu, g) {
        return match HalfInteger::from_f64_exact(nu) {
            Some(h) if h.is_half_odd() => {
                if h.twice_value() > 0 {
                    RepClass::finite(family, h, g, None)
                } else {
                    RepClass::finite(
                        family,
                        h.mirror(),
                        g,
                        Some(format!("relabelled from nu = {nu} by j -> 1 - j")),
                    )
                }
            }
            Some(_) => RepClass::excluded(
                nu,
                "integer nu: the orbit contains j = 0, where 1/J3 is undefined",
            ),
            None => RepClass::excluded(
                nu,
                "nu is not a half-integer: no finite orbit terminates here",
            ),
        };
    }
    RepClass::excluded(
        nu,
        "nu in [-sqrt(g), 1 - sqrt(g)] or [sqrt(g), 1 + sqrt(g)]: no bound state in this region",
    )
}

/// Every representation with a discrete label: finite ones up to `limit`
/// (required for the unbounded flat and spherical towers), plus the
/// one-dimensional representation when it exists.
pub fn enumerate_discrete(params: &ModelParams, limit: Option<HalfInteger>) -> Result<Vec<RepClass>> {
    params.require_bound_state_coupling()?;
    let g = params.g;
    let top = match params.family {
        Family::FlatKepler | Family::SphericalKepler => Some(limit.ok_or_else(|| {
            Error::InvalidInput(format!(
                "{} has infinitely many finite representations; give an upper nu",
                params.family
            ))
        })?),
        Family::HyperbolicKepler | Family::RosenMorse => match (nu_max(g), limit) {
            (Some(m), Some(l)) => Some(m.min(l)),
            (m, None) => m,
            (None, Some(_)) => None,
        },
    };
    let mut out = Vec::new();
    if let Some(top) = top {
        let mut nu = HalfInteger::HALF;
        while nu <= top {
            out.push(RepClass::finite(params.family, nu, g, None));
            nu = HalfInteger::from_twice(nu.twice_value() + 2);
        }
    }
    if matches!(params.family, Family::HyperbolicKepler | Family::RosenMorse) {
        if let Some(root) = one_dim_special_root(g) {
            out.push(classify_hyperbolic(params.family, g, root));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMode {
    #[default]
    Strict,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub n: usize,
    pub energy: f64,
    /// `J3` label of the annihilated end of the ladder chain for this level.
    pub j_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub params: ModelParams,
    pub mode: SpectrumMode,
    /// Set when the closed form is used away from the quantized `j` values.
    pub extension: bool,
    /// Index of the last bound state for families with finitely many.
    pub n_top: Option<usize>,
    pub n_max: Option<usize>,
    pub lines: Vec<SpectrumLine>,
}

impl SpectrumReport {
    pub fn energies(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.energy).collect()
    }
}

fn window_error(params: &ModelParams, window: String) -> Error {
    Error::NoBoundState {
        family: params.family,
        j: params.j,
        g: params.g,
        window,
    }
}

fn strict_half_odd(params: &ModelParams) -> Result<HalfInteger> {
    match params.j_exact {
        Some(h) if h.is_half_odd() && h.twice_value() > 0 => Ok(h),
        Some(h) if h.is_half_odd() => Err(Error::Quantization(format!(
            "j = {h} is negative; use the mirror label 1 - j = {}",
            h.mirror()
        ))),
        Some(h) => Err(Error::Quantization(format!(
            "j = {h} is an integer; strict mode needs j in {{1/2, 3/2, ...}}"
        ))),
        None => Err(Error::Quantization(format!(
            "j = {} is not an exact half-odd integer; strict mode needs j in {{1/2, 3/2, ...}} \
             (use extended mode for the closed form at other j)",
            params.j
        ))),
    }
}

/// Index of the last `n` with `(j + n)^2 < g`, or `None` if `j^2 >= g`.
fn hyperbolic_top(j: f64, g: f64) -> Option<usize> {
    if !(j > 0.0 && j * j < g) {
        return None;
    }
    let mut n = ((g.sqrt() - j).floor().max(0.0)) as usize;
    while n > 0 && {
        let t = j + n as f64;
        t * t >= g
    } {
        n -= 1;
    }
    while {
        let t = j + (n + 1) as f64;
        t * t < g
    } {
        n += 1;
    }
    Some(n)
}

/// Index of the last `n` with `j - n - 1 > sqrt(g)`.
fn rosen_morse_top(j: f64, g: f64) -> Option<usize> {
    let ok = |n: usize| {
        let k = j - n as f64 - 1.0;
        k > 0.0 && k * k > g
    };
    if !ok(0) {
        return None;
    }
    let mut n = ((j - 1.0 - g.sqrt()).floor().max(0.0)) as usize;
    while n > 0 && !ok(n) {
        n -= 1;
    }
    while ok(n + 1) {
        n += 1;
    }
    Some(n)
}

/// Energy of level `n` and the label of its annihilated end.
pub fn level(params: &ModelParams, n: usize) -> Result<SpectrumLine> {
    let (j_end, at) = match params.family {
        Family::RosenMorse => {
            let end = params.j - n as f64;
            (end, end - 1.0)
        }
        _ => {
            let end = params.j + n as f64;
            (end, end)
        }
    };
    Ok(SpectrumLine {
        n,
        energy: params.family.factorization_energy(at, params.g)?,
        j_end,
    })
}

/// Bound-state spectrum from the representation theory.
pub fn spectrum(params: &ModelParams, n_max: Option<usize>, mode: SpectrumMode) -> Result<SpectrumReport> {
    params.require_bound_state_coupling()?;
    let g = params.g;
    let j = params.j;
    let (n_top, extension) = match params.family {
        Family::FlatKepler | Family::SphericalKepler => {
            let extension = match mode {
                SpectrumMode::Strict => {
                    strict_half_odd(params)?;
                    false
                }
                SpectrumMode::Extended => {
                    if !(j >= 0.5) {
                        return Err(window_error(params, "[1/2, inf)".into()));
                    }
                    !params.j_exact.is_some_and(HalfInteger::is_half_odd)
                }
            };
            if n_max.is_none() {
                return Err(Error::InvalidInput(format!(
                    "{} has infinitely many levels; n_max is required",
                    params.family
                )));
            }
            (None, extension)
        }
        Family::HyperbolicKepler => {
            if matches_special(g, j).is_some_and(|(_, mirrored)| !mirrored) {
                (Some(0), false)
            } else {
                let window = format!("[1/2, sqrt(g)) = [0.5, {})", g.sqrt());
                if g <= 0.25 {
                    let special = one_dim_special_root(g)
                        .map(|r| format!(" except the one-dimensional state at j = {r}"))
                        .unwrap_or_default();
                    return Err(Error::NoBoundState {
                        family: params.family,
                        j,
                        g,
                        window: format!(
                            "the empty set: no finite-dimensional representation for g <= 1/4{special}"
                        ),
                    });
                }
                match mode {
                    SpectrumMode::Strict => {
                        let h = strict_half_odd(params)?;
                        if !h.square_lt(g) {
                            return Err(window_error(params, window));
                        }
                        let top = nu_max(g).expect("g > 1/4 and j^2 < g");
                        (Some(((top.twice_value() - h.twice_value()) / 2) as usize), false)
                    }
                    SpectrumMode::Extended => {
                        if !(j >= 0.5) {
                            return Err(window_error(params, window));
                        }
                        let top = hyperbolic_top(j, g).ok_or_else(|| window_error(params, window))?;
                        (Some(top), !params.j_exact.is_some_and(HalfInteger::is_half_odd))
                    }
                }
            }
        }
        Family::RosenMorse => {
            let top = rosen_morse_top(j, g).ok_or_else(|| {
                window_error(params, format!("(1 + sqrt(g), inf) = ({}, inf)", 1.0 + g.sqrt()))
            })?;
            (Some(top), false)
        }
    };
    let last = match (n_top, n_max) {
        (Some(t), Some(m)) => t.min(m),
        (Some(t), None) => t,
        (None, Some(m)) => m,
        (None, None) => unreachable!("infinite families require n_max"),
    };
    let lines = (0..=last).map(|n| level(params, n)).collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        params: *params,
        mode,
        extension,
        n_top,
        n_max,
        lines,
    })
}

/// One interval of the `nu` line with a single representation type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub kind: RepKind,
    /// `None` means unbounded.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Whether the finite endpoints belong to the region.
    pub closed: bool,
}

/// The `nu` line of the hyperbolic algebra cut into regions. Finite orbits
/// only exist at the half-odd points of the finite band. The flat and
/// spherical algebras have no continuous regions and give an empty list.
pub fn regions(params: &ModelParams) -> Result<Vec<Region>> {
    params.require_bound_state_coupling()?;
    if !matches!(params.family, Family::HyperbolicKepler | Family::RosenMorse) {
        return Ok(Vec::new());
    }
    let s = params.g.sqrt();
    let region = |kind, lower, upper, closed| Region { kind, lower, upper, closed };
    let mut out = vec![
        region(RepKind::InfiniteLowering, None, Some(-s), false),
        region(RepKind::Excluded, Some(-s), Some(1.0 - s), true),
    ];
    if 1.0 - s < s {
        out.push(region(RepKind::FiniteDim, Some(1.0 - s), Some(s), false));
    }
    out.push(region(RepKind::Excluded, Some(s), Some(1.0 + s), true));
    out.push(region(RepKind::InfiniteRaising, Some(1.0 + s), None, false));
    Ok(out)
}

/// Open interval of `j` for which the potential has an interior minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Window {
    /// `None` means unbounded.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Window {
    pub fn contains(&self, j: f64) -> bool {
        self.lower.is_none_or(|lo| j > lo) && self.upper.is_none_or(|hi| j < hi)
    }
}

pub fn bound_state_window(params: &ModelParams) -> Result<Window> {
    params.require_bound_state_coupling()?;
    let r = (params.g + 0.25).sqrt();
    Ok(match params.family {
        Family::FlatKepler => Window {
            lower: None,
            upper: None,
            note: Some("the Coulomb tail binds for every j; normalizability is the constraint".into()),
        },
        Family::SphericalKepler => Window {
            lower: None,
            upper: None,
            note: Some("compact domain: the spectrum is purely discrete".into()),
        },
        Family::HyperbolicKepler => Window {
            lower: Some(0.5 - r),
            upper: Some(0.5 + r),
            note: None,
        },
        Family::RosenMorse => Window {
            lower: Some(0.5 + r),
            upper: None,
            note: Some("j >= 1/2 branch; the j -> 1 - j mirror is equivalent".into()),
        },
    })
}
