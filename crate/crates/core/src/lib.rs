//! Simulation and diagnostics for axially symmetric volume-preserving mean
//! curvature flow between two parallel planes.
//!
//! The crate evolves the generating curve `rho(x)` of a surface of revolution
//! under Neumann conditions, tracks geometric estimates along the run, counts
//! zeros of `rho'`, `rho''` and `H`, and fits the curvature blow-up rate near
//! the first singularity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod harness;
pub mod operators;
pub mod profile;
pub mod singularity;
pub mod sturm;

pub use error::{Error, Result};
pub use profile::{CurvatureField, GridSpec, RadialProfile};
