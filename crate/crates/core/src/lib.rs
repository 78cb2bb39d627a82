//! Fractional-order tuberculosis toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`fde`]: a fractional Adams–Bashforth–Moulton (PECE) solver for Caputo
//!   initial-value problems on uniform grids, plus the [`mittag_leffler`]
//!   function used to verify it.
//! - [`model`]: the four-compartment S/L/I/T dynamics, the basic reproduction
//!   number and the closed-form endemic equilibrium.
//! - [`sensitivity`]: normalized forward sensitivity indices of R0 and
//!   parameter perturbation experiments.
//! - [`focp`]: the fractional optimal control problem for the treatment rate,
//!   solved with a forward-backward PECE sweep.
//! - [`cost_eff`]: efficacy, averted cases, total cost, ACER and the weight sweep.

pub mod cost_eff;
mod error;
pub mod fde;
pub mod focp;
mod mittag_leffler;
pub mod model;
pub mod quadrature;
pub mod sensitivity;

pub use error::{Error, Result};
pub use fde::{solve_caputo_ivp, FnField, FracOrder, GridFunction, TimeGrid, VectorField};
pub use focp::{solve_focp, CostatePath, FocpConfig, FocpSolution};
pub use mittag_leffler::mittag_leffler;
pub use model::{
    endemic_equilibrium, r0, simulate, tb_rhs, ControlPath, ModelParams, Param, StateVec, Trajectory, Treatment,
};
