//! Numerical core for studying the spectral gap `λ₂ − λ₁` of Dirichlet
//! Schrödinger operators `−Δ + V` on 1D intervals and 2D rectangles.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation on in-memory grids; file formats, configuration and the
//! command line live in the `gaplab` companion crate.
//!
//! Module map:
//!
//! * [`grid`]: domains, uniform grids, scalar fields, inner parallel sets, quadrature.
//! * [`potential`]: potential specifications, the expression parser, derivative statistics.
//! * [`eigen`]: finite-difference operator, iterative lowest-pair solver, dense oracle.
//! * [`ground_state`]: `φ = −log u₁`, its PDE residual, Hessian, the `g` certificate.
//! * [`ratio`]: `u = u₂/u₁`, `ψ = −log(c − u)`, the `F` functional and its case analysis.
//! * [`distance`]: fast marching, Agmon-type distances, anchor points.
//! * [`cutoff`]: quintic smoothstep cutoff functions `ρ`.
//! * [`bounds`]: assembled lower bounds on the gap with hypothesis flags.
//! * [`oscillation`]: integral inequalities over inner parallel sets.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod cutoff;
pub mod distance;
pub mod eigen;
mod error;
pub mod fd;
pub mod grid;
pub mod ground_state;
mod math;
pub mod oscillation;
pub mod potential;
pub mod ratio;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
