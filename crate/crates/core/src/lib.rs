//! Weighted three-phase fractional perimeter energies.
//!
//! Exact 1D interactions, 2D grid quadrature with a cell-pair weight table,
//! ε-strip competitors, `s -> 1` experiments and desk-scale minimizers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod competitor;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod kernel1d;
pub mod kernel2d;
pub mod limits;
pub mod minimize;
pub mod quad;
pub mod sum;

pub use error::{LabError, Result};
