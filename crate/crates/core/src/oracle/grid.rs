use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};

pub const DEFAULT_POINTS: usize = 4000;
pub const MIN_POINTS: usize = 16;

/// Uniform grid with `n` interior points `a + i h`, `i = 1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Grid(format!("need finite a < b, got ({a}, {b})")));
        }
        if n < MIN_POINTS {
            return Err(Error::Grid(format!("need at least {MIN_POINTS} interior points, got {n}")));
        }
        Ok(Self { a, b, n, h: (b - a) / (n + 1) as f64 })
    }

    /// Parses `"a,b,n"`; `pi` is accepted for either endpoint.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Grid(format!("expected \"a,b,n\", got {spec:?}")));
        }
        let end = |s: &str| -> Result<f64> {
            match s.to_ascii_lowercase().as_str() {
                "pi" => Ok(std::f64::consts::PI),
                "-pi" => Ok(-std::f64::consts::PI),
                _ => s.parse().map_err(|_| Error::Grid(format!("bad endpoint {s:?}"))),
            }
        };
        let n = parts[2]
            .parse()
            .map_err(|_| Error::Grid(format!("bad point count {:?}", parts[2])))?;
        Self::new(end(parts[0])?, end(parts[1])?, n)
    }

    /// Node `i`, for `i = 0..=n+1` (the ends are the walls).
    pub fn x(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(|i| self.x(i))
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Self::new(self.a, self.b, 2 * self.n + 1).expect("refining keeps a valid grid")
    }

    pub fn with_points(&self, n: usize) -> Result<Self> {
        Self::new(self.a, self.b, n)
    }

    /// Rejects grids reaching outside the closure of the family's domain.
    pub fn check_within(&self, family: Family) -> Result<()> {
        let (lo, hi) = family.domain();
        if self.a < lo || self.b > hi + 1e-12 {
            return Err(Error::Grid(format!(
                "grid ({}, {}) leaves the {family} domain {}",
                self.a,
                self.b,
                family.domain_description()
            )));
        }
        Ok(())
    }
}

const CAP: f64 = 200.0;

/// Largest `h` times the ground-state decay rate the default grid allows;
/// about 3e-4 relative error on the ground state.
const RESOLUTION: f64 = 0.06;
const MAX_POINTS: usize = 200_000;

/// Raises `points` until the spacing resolves a state decaying like
/// `exp(-rate x)` over a domain of length `len`.
fn resolved(points: usize, len: f64, rate: f64) -> usize {
    if !(rate > 0.0 && rate.is_finite()) {
        return points;
    }
    let needed = (len * rate / RESOLUTION).ceil() as usize;
    points.max(needed.min(MAX_POINTS))
}

/// Truncated domain sized from the decay rate of the highest requested level.
///
/// `n_levels` counts levels `0..n_levels`; `0` asks for the floor length,
/// which is what excluded-region probes use. `points` is a floor: on the
/// flat and hyperbolic families it is raised until the ground state, the
/// narrowest level, is resolved.
pub fn default_grid(params: &ModelParams, n_levels: usize) -> Result<Grid> {
    default_grid_with(params, n_levels, DEFAULT_POINTS)
}

pub fn default_grid_with(params: &ModelParams, n_levels: usize, points: usize) -> Result<Grid> {
    params.require_bound_state_coupling()?;
    let (j, g) = (params.j, params.g);
    let top = n_levels.saturating_sub(1) as f64;
    let window = |w: &str| Error::NoBoundState {
        family: params.family,
        j,
        g,
        window: w.to_string(),
    };
    match params.family {
        Family::FlatKepler => {
            let k = j + top;
            if n_levels == 0 {
                return Grid::new(0.0, 40.0, points);
            }
            let len = (12.0 * k * k / g).max(40.0);
            Grid::new(0.0, len, resolved(points, len, g / j))
        }
        Family::SphericalKepler => Grid::new(0.0, std::f64::consts::PI, points),
        Family::HyperbolicKepler => {
            if n_levels == 0 {
                return Grid::new(0.0, 40.0, points);
            }
            let k = j + top;
            let rate = g / k - k;
            if !(k > 0.0 && rate > 0.0) {
                return Err(window("(0, sqrt(g)) for the top level label j + n"));
            }
            let len = (12.0 * k / rate).clamp(40.0, CAP);
            Grid::new(0.0, len, resolved(points, len, g / j - j))
        }
        Family::RosenMorse => {
            let len = if n_levels == 0 {
                30.0
            } else {
                let gap = j - top - 1.0 - g.sqrt();
                if !(gap > 0.0) {
                    return Err(window("j - n - 1 > sqrt(g) for the top level"));
                }
                (12.0 / gap).clamp(30.0, CAP)
            };
            Grid::new(-len, len, points)
        }
    }
}
