//! Bound-state spectra of the flat, spherical and hyperbolic Kepler problems
//! and the Rosen-Morse potential, obtained from the representation theory of
//! their potential algebras and checked against an independent eigenvalue
//! solver.
//!
//! * [`model`]: families, parameters, potentials and the scalar constants.
//! * [`representation`]: classification of representations and spectra.
//! * [`jet`] and [`ladder`]: ladder operators acting on wavefunctions,
//!   Rodrigues chains and identity checks, all with exact derivatives.
//! * [`oracle`]: discretized Hamiltonians and Sturm-sequence bisection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod half_integer;
pub mod jet;
pub mod ladder;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod representation;

pub use error::{Error, Result};
pub use half_integer::HalfInteger;
pub use jet::Jet;
pub use ladder::{LadderState, Sign, WaveFunction};
pub use model::{CommutatorConstant, Family, ModelParams};
pub use oracle::{Grid, Tolerances, Tridiagonal, VerificationReport};
pub use representation::{
    classify, ladder_norm_sq, regions, spectrum, Direction, Region, RepClass, RepKind, SpectrumMode,
    SpectrumReport,
};
