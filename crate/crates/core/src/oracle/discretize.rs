//! Tridiagonal discretizations of `-d^2/dx^2 + V`.
//!
//! Two schemes are available. Central differences are the textbook choice and
//! work well for Rosen-Morse, whose potential is regular everywhere. On the
//! singular families they converge slowly or to the wrong self-adjoint
//! extension, because the eigenfunctions behave like `x^j` at the wall. The
//! weighted element scheme factors that behaviour out: with `psi = rho phi`
//! and `w = rho^2`, the problem becomes `-(w phi')' + w V_reg phi = E w phi`
//! with a bounded `V_reg`, discretized by linear elements with a lumped mass.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};
use crate::quadrature::{self, GAUSS4};

use super::grid::Grid;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Grid(format!(
                "tridiagonal needs n diagonal and n - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if let Some(i) = diag.iter().chain(&offdiag).position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite matrix entry at position {i}")));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    CentralDifference,
    WeightedElement,
}

impl Scheme {
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::RosenMorse => Scheme::CentralDifference,
            _ => Scheme::WeightedElement,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central-difference" | "fd" => Ok(Scheme::CentralDifference),
            "weighted-element" | "fe" => Ok(Scheme::WeightedElement),
            _ => Err(Error::InvalidInput(format!("unknown scheme {s:?}"))),
        }
    }
}

/// `diag_i = 2/h^2 + V(x_i)`, `off = -1/h^2`, Dirichlet at both walls.
pub fn discretize_potential<F: Fn(f64) -> f64>(grid: &Grid, v: F) -> Result<Tridiagonal> {
    let h2 = grid.h * grid.h;
    let mut diag = Vec::with_capacity(grid.n);
    for x in grid.interior() {
        let vx = v(x);
        if !vx.is_finite() {
            return Err(Error::Grid(format!("potential is not finite at x = {x}")));
        }
        diag.push(2.0 / h2 + vx);
    }
    Tridiagonal::new(diag, vec![-1.0 / h2; grid.n - 1])
}

/// Discretizes with the family's default scheme.
pub fn discretize(params: &ModelParams, grid: &Grid) -> Result<Tridiagonal> {
    discretize_with(params, grid, Scheme::default_for(params.family))
}

pub fn discretize_with(params: &ModelParams, grid: &Grid, scheme: Scheme) -> Result<Tridiagonal> {
    grid.check_within(params.family)?;
    match scheme {
        Scheme::CentralDifference => discretize_potential(grid, |x| {
            params.potential(x).unwrap_or(f64::NAN)
        }),
        Scheme::WeightedElement => weighted(params, grid),
    }
}

/// `ln rho`, `V_reg` and which walls are singular, for the substitution `psi = rho phi`.
struct Weight {
    family: Family,
    s: f64,
    g: f64,
}

impl Weight {
    fn new(params: &ModelParams) -> Self {
        // rho ~ x^s at a singular wall; s = j selects the x^j behaviour there
        // (for j <= 0 the mirror label 1 - j).
        let s = match params.family {
            Family::RosenMorse => 0.0,
            _ if params.j > 0.0 => params.j,
            _ => 1.0 - params.j,
        };
        Self { family: params.family, s, g: params.g }
    }

    fn ln_rho(&self, x: f64) -> f64 {
        match self.family {
            Family::FlatKepler => x.ln(),
            Family::SphericalKepler => x.sin().ln(),
            Family::HyperbolicKepler => x.tanh().ln(),
            Family::RosenMorse => 0.0,
        }
    }

    fn v_reg(&self, params: &ModelParams, x: f64) -> f64 {
        let (s, g) = (self.s, self.g);
        match self.family {
            Family::FlatKepler => -2.0 * g / x,
            Family::SphericalKepler => s * s - 2.0 * g * x.cos() / x.sin(),
            Family::HyperbolicKepler => {
                let c = x.cosh();
                s * (s + 1.0) / (c * c) - 2.0 * g / x.tanh()
            }
            Family::RosenMorse => params.potential(x).unwrap_or(f64::NAN),
        }
    }

    fn singular_left(&self, grid: &Grid) -> bool {
        self.family != Family::RosenMorse && grid.a == 0.0
    }

    fn singular_right(&self, grid: &Grid) -> bool {
        self.family == Family::SphericalKepler && (grid.b - std::f64::consts::PI).abs() < 1e-12
    }
}

#[derive(Default, Clone, Copy)]
struct Element {
    /// `ln` of the scale factored out of this element's integrals.
    log_ref: f64,
    stiff: f64,
    mass: [f64; 2],
    pot: [f64; 2],
}

fn weighted(params: &ModelParams, grid: &Grid) -> Result<Tridiagonal> {
    let weight = Weight::new(params);
    let nodes = grid.n + 2;
    let h = grid.h;
    let natural_left = weight.singular_left(grid);
    let natural_right = weight.singular_right(grid);
    let ts = quadrature::tanh_sinh_nodes(5);

    let mut elements = Vec::with_capacity(nodes - 1);
    for e in 0..nodes - 1 {
        let (xl, xr) = (grid.x(e), grid.x(e + 1));
        let log_ref = 2.0 * weight.s * weight.ln_rho(0.5 * (xl + xr));
        let mut el = Element { log_ref, ..Default::default() };
        let mut add = |x: f64, t: f64, wt: f64| {
            let w = (2.0 * weight.s * weight.ln_rho(x) - log_ref).exp();
            let wv = w * weight.v_reg(params, x);
            if !(w.is_finite() && wv.is_finite()) {
                return;
            }
            el.stiff += wt * w;
            el.mass[0] += wt * w * (1.0 - t);
            el.mass[1] += wt * w * t;
            el.pot[0] += wt * wv * (1.0 - t);
            el.pot[1] += wt * wv * t;
        };
        let singular = (e == 0 && natural_left) || (e == nodes - 2 && natural_right);
        if singular {
            for &(l, r, w) in &ts {
                let (dl, dr) = (l * h, r * h);
                let x = if dl <= dr { xl + dl } else { xr - dr };
                add(x, l, w * h);
            }
        } else {
            for &(t, w) in &GAUSS4 {
                add(xl + t * h, t, w * h);
            }
        }
        el.stiff /= h * h;
        elements.push(el);
    }

    // Node i touches elements i - 1 and i.
    let mut node_ref = vec![f64::NEG_INFINITY; nodes];
    for (e, el) in elements.iter().enumerate() {
        node_ref[e] = node_ref[e].max(el.log_ref);
        node_ref[e + 1] = node_ref[e + 1].max(el.log_ref);
    }
    let mut stiff = vec![0.0; nodes];
    let mut mass = vec![0.0; nodes];
    let mut pot = vec![0.0; nodes];
    for (e, el) in elements.iter().enumerate() {
        for (side, i) in [(0, e), (1, e + 1)] {
            let f = (el.log_ref - node_ref[i]).exp();
            stiff[i] += f * el.stiff;
            mass[i] += f * el.mass[side];
            pot[i] += f * el.pot[side];
        }
    }

    let lo = if natural_left { 0 } else { 1 };
    let hi = if natural_right { nodes - 1 } else { nodes - 2 };
    let mut diag = Vec::with_capacity(hi - lo + 1);
    let mut off = Vec::with_capacity(hi - lo);
    for i in lo..=hi {
        if !(mass[i] > 0.0) {
            return Err(Error::Grid(format!("vanishing mass at node x = {}", grid.x(i))));
        }
        diag.push((stiff[i] + pot[i]) / mass[i]);
        if i < hi {
            let el = &elements[i];
            let scale = (el.log_ref - 0.5 * (node_ref[i] + node_ref[i + 1])).exp();
            off.push(-el.stiff * scale / (mass[i] * mass[i + 1]).sqrt());
        }
    }
    Tridiagonal::new(diag, off)
}
