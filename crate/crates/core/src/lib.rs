//! Desk-scale laboratory for axisymmetric compressible MHD waves.
//!
//! The crate has three legs:
//!
//! * a finite-volume solver for the reduced `(r, z)` system of ideal
//!   compressible MHD with a purely azimuthal magnetic field
//!   ([`solver`], [`model`], [`grid`]),
//! * a diagnostics suite that evaluates the blow-up functionals
//!   `X(t) = ∫ F (ρ−1) dx`, `Y(t) = ∫ ρ u·∇F dx` and verifies the
//!   identities and inequalities they satisfy ([`diagnostics`],
//!   [`testfn`]),
//! * an ODE lab that integrates the comparison systems whose finite-time
//!   blow-up controls the lifespan of the wave problem ([`ode`]).
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the concrete aliases below fix `f64`, which is what the verification
//! tolerances are calibrated for.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod ode;
pub mod scalar;
pub mod solver;
pub mod testfn;
pub mod verify;

pub mod crosscheck;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` radial profile of the test function.
pub type Profile64 = testfn::RadialProfile<f64>;
/// `f64` equation-of-state parameters.
pub type Eos64 = model::EosParams<f64>;
/// `f64` primitive state (ρ, u^r, u^z, S, B^θ).
pub type Prim64 = model::PrimitiveState<f64>;
/// `f64` conserved state (ρ, ρu^r, ρu^z, ρS, B^θ).
pub type Cons64 = model::ConservedState<f64>;
/// `f64` uniform cell-centered (r, z) mesh.
pub type Grid64 = grid::Grid2D<f64>;
/// `f64` solver field state.
pub type State64 = solver::FieldState<f64>;
/// `f64` simulation configuration.
pub type SimConfig64 = solver::SimulationConfig<f64>;
/// `f64` comparison-ODE run record.
pub type OdeRun64 = ode::OdeRun<f64>;
