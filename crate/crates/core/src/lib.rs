//! Convex geometry of quantum state sets under the Hilbert–Schmidt metric.
//!
//! The set of N×N density matrices and its PPT subset are convex bodies of
//! dimension `D` (N²−1 complex, N(N+1)/2−1 real) around the maximally mixed
//! state. This crate certifies numerically that both are bodies of constant
//! height (every supporting face touches the inscribed ball, so
//! `γ = A·r/V = D`) and estimates the ratio `Ω = p_V/p_A` of interior and
//! boundary PPT probabilities, which equals 2.
//!
//! Modules:
//! * [`hermitian`]: HS algebra, partial transpose, PPT test, negativity;
//! * [`sampling`], [`metropolis`]: random states, directions, Haar matrices;
//! * [`body`]: insphere, radial function, boundary contacts, support height;
//! * [`estimators`]: Monte Carlo volumes, areas, γ, p_V, p_A, Ω;
//! * [`polytope`]: polars of finite point sets in `R^D`.

#![forbid(unsafe_code)]

pub mod body;
pub mod direction;
pub mod error;
pub mod estimators;
pub mod field;
pub mod hermitian;
pub mod metropolis;
pub mod polytope;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use field::{BipartiteShape, NumberField, StateSpace};
