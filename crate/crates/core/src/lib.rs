//! Balanced-truncation model reduction for a nonlinear cable-mass system.
//!
//! The cable is a damped 1D wave equation on `[0, l]` whose endpoints are
//! attached to damped mass-spring oscillators. The left mass is driven by a
//! scalar input, the right spring carries a cubic stiffening term, and the
//! observed outputs are the position and velocity of the right mass.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerics:
//!
//! * [`linalg`]: dense matrices, real Schur form, SVD, symmetric eigenvalues,
//!   PSD factors and Bartels-Stewart Lyapunov solves.
//! * [`model`]: the finite-difference state-space system and discrete
//!   energy forms.
//! * [`signals`]: the forcing inputs used in the experiments.
//! * [`ode`]: an adaptive linearly implicit Rosenbrock integrator.
//! * [`balance`]: Gramians, Hankel singular values and square-root balancing.
//! * [`rom`]: the reduced nonlinear model and FOM/ROM simulation.
//! * [`analysis`]: energy, stability margins and error metrics.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod balance;
mod error;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod rom;
pub mod signals;

pub use error::{Error, Result};
