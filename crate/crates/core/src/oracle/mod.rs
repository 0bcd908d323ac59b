//! Numerical eigenvalue oracle, independent of the algebra: discretize the
//! Hamiltonian on a truncated domain and locate eigenvalues by Sturm-sequence
//! bisection.

mod discretize;
mod eigen;
mod grid;
mod verify;

pub use discretize::{discretize, discretize_potential, discretize_with, Scheme, Tridiagonal};
pub use eigen::{eigenvalues_below, gershgorin, sturm_count};
pub use grid::{default_grid, default_grid_with, Grid, DEFAULT_POINTS, MIN_POINTS};
pub use verify::{
    verify, verify_excluded, ConvergenceCheck, CountCheck, LevelCheck, Tolerances,
    VerificationReport, VerifyOptions, DEFAULT_REL_TOL,
};
