//! Families, parameters, potentials and the scalar constants of each
//! potential algebra.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half_integer::HalfInteger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `j(j-1)/x^2 - 2g/x` on `x > 0`.
    FlatKepler,
    /// `j(j-1)/sin^2 x - 2g cot x` on `0 < x < pi`.
    SphericalKepler,
    /// `j(j-1)/sinh^2 x - 2g coth x` on `x > 0`.
    HyperbolicKepler,
    /// `-j(j-1)/cosh^2 x - 2g tanh x` on the real line.
    RosenMorse,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::FlatKepler,
        Family::SphericalKepler,
        Family::HyperbolicKepler,
        Family::RosenMorse,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::FlatKepler => "flat",
            Family::SphericalKepler => "spherical",
            Family::HyperbolicKepler => "hyperbolic",
            Family::RosenMorse => "rosen-morse",
        }
    }

    /// Open natural domain `(lo, hi)`.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Family::FlatKepler | Family::HyperbolicKepler => (0.0, f64::INFINITY),
            Family::SphericalKepler => (0.0, PI),
            Family::RosenMorse => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn domain_description(self) -> &'static str {
        match self {
            Family::FlatKepler | Family::HyperbolicKepler => "(0, inf)",
            Family::SphericalKepler => "(0, pi)",
            Family::RosenMorse => "(-inf, inf)",
        }
    }

    pub fn in_domain(self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x.is_finite() && x > lo && x < hi
    }

    pub(crate) fn check_domain(self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                family: self,
                x,
                domain: self.domain_description(),
            })
        }
    }

    /// Hyperbolic Kepler and Rosen-Morse realize the same algebra.
    pub fn shares_algebra_with(self, other: Family) -> bool {
        self.algebra() == other.algebra()
    }

    fn algebra(self) -> u8 {
        match self {
            Family::FlatKepler => 0,
            Family::SphericalKepler => 1,
            Family::HyperbolicKepler | Family::RosenMorse => 2,
        }
    }

    /// `f(x)` in `A_pm(j) = pm d/dx - j f(x) + g/j`.
    pub fn superpotential_profile(self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self {
            Family::FlatKepler => 1.0 / x,
            Family::SphericalKepler => x.cos() / x.sin(),
            Family::HyperbolicKepler => 1.0 / x.tanh(),
            Family::RosenMorse => x.tanh(),
        })
    }

    /// The constant `eps(j)` in `H = A_-(j) A_+(j) + eps(j)`.
    pub fn factorization_energy(self, j: f64, g: f64) -> Result<f64> {
        if j == 0.0 {
            return Err(Error::SingularParameter(
                "factorization energy needs 1/j with j = 0".into(),
            ));
        }
        let coulomb = g * g / (j * j);
        Ok(match self {
            Family::FlatKepler => -coulomb,
            Family::SphericalKepler => j * j - coulomb,
            Family::HyperbolicKepler | Family::RosenMorse => -j * j - coulomb,
        })
    }

    /// `c(j, g)` such that `[J+, J-]` acts as `c` on the `J3 = j` eigenspace;
    /// equal to `eps(j) - eps(j - 1)`.
    pub fn commutator_constant(self, j: f64, g: f64) -> Result<f64> {
        if j == 0.0 || j == 1.0 {
            return Err(Error::SingularParameter(format!(
                "commutator constant needs 1/J3 and 1/(J3 - 1); j = {j}"
            )));
        }
        Ok(self.factorization_energy(j, g)? - self.factorization_energy(j - 1.0, g)?)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "flat" | "kepler" | "flat-kepler" => Ok(Family::FlatKepler),
            "spherical" | "spherical-kepler" => Ok(Family::SphericalKepler),
            "hyperbolic" | "hyperbolic-kepler" => Ok(Family::HyperbolicKepler),
            "rosen-morse" | "rosenmorse" | "rm" => Ok(Family::RosenMorse),
            other => Err(Error::InvalidInput(format!(
                "unknown family {other:?} (expected flat|spherical|hyperbolic|rosen-morse)"
            ))),
        }
    }
}

/// Family, coupling and angular parameter of one Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub family: Family,
    pub g: f64,
    pub j: f64,
    /// Exact backing for `j` when it is a half-integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_exact: Option<HalfInteger>,
}

impl ModelParams {
    /// Parameters with a float-only `j`. `g` must be finite and non-negative.
    pub fn new(family: Family, j: f64, g: f64) -> Result<Self> {
        if !j.is_finite() {
            return Err(Error::InvalidInput(format!("j must be finite, got {j}")));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidInput(format!(
                "g must be a finite non-negative coupling, got {g}"
            )));
        }
        Ok(Self {
            family,
            g,
            j,
            j_exact: None,
        })
    }

    pub fn with_half_integer(family: Family, j: HalfInteger, g: f64) -> Result<Self> {
        let mut p = Self::new(family, j.value(), g)?;
        p.j_exact = Some(j);
        Ok(p)
    }

    /// Parses `j` as an exact half-integer when possible, else as a real.
    pub fn parse(family: Family, j: &str, g: f64) -> Result<Self> {
        match j.parse::<HalfInteger>() {
            Ok(h) => Self::with_half_integer(family, h, g),
            Err(_) => {
                let v: f64 = j
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("cannot parse j = {j:?}")))?;
                Self::new(family, v, g)
            }
        }
    }

    /// Same family and coupling, different `j`. The exact backing is shifted
    /// along when `dj` is an integer.
    pub fn shifted(&self, dj: i64) -> Self {
        let j_exact = self.j_exact.and_then(|h| h.checked_add_int(dj));
        Self {
            j: j_exact.map_or(self.j + dj as f64, HalfInteger::value),
            j_exact,
            ..*self
        }
    }

    /// Rejects `g <= 0`; every bound-state computation goes through this.
    pub fn require_bound_state_coupling(&self) -> Result<()> {
        if self.g > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "bound-state analysis needs g > 0, got g = {}",
                self.g
            )))
        }
    }

    /// `j(j-1)`, evaluated in a form that is invariant under `j -> 1-j`.
    pub fn centrifugal_coefficient(&self) -> f64 {
        match self.j_exact {
            Some(h) => {
                let t = h.twice_value() as f64;
                t * (t - 2.0) / 4.0
            }
            None => {
                let s = self.j - 0.5;
                s * s - 0.25
            }
        }
    }

    pub fn potential(&self, x: f64) -> Result<f64> {
        self.family.check_domain(x)?;
        let c = self.centrifugal_coefficient();
        let g = self.g;
        Ok(match self.family {
            Family::FlatKepler => c / (x * x) - 2.0 * g / x,
            Family::SphericalKepler => {
                let s = x.sin();
                c / (s * s) - 2.0 * g * x.cos() / s
            }
            Family::HyperbolicKepler => {
                let s = x.sinh();
                c / (s * s) - 2.0 * g / x.tanh()
            }
            Family::RosenMorse => {
                let ch = x.cosh();
                -c / (ch * ch) - 2.0 * g * x.tanh()
            }
        })
    }

    pub fn factorization_energy(&self) -> Result<f64> {
        self.family.factorization_energy(self.j, self.g)
    }

    pub fn commutator_constant(&self) -> Result<CommutatorConstant> {
        self.family
            .commutator_constant(self.j, self.g)
            .map(CommutatorConstant)
    }

    /// Bottom of the continuous spectrum; `+inf` on the compact sphere.
    pub fn continuum_threshold(&self) -> f64 {
        match self.family {
            Family::FlatKepler => 0.0,
            Family::SphericalKepler => f64::INFINITY,
            Family::HyperbolicKepler | Family::RosenMorse => -2.0 * self.g,
        }
    }
}

/// The scalar value of `[J+, J-]` on a `J3` eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorConstant(pub f64);

impl CommutatorConstant {
    pub fn value(self) -> f64 {
        self.0
    }
}
