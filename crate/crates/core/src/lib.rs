//! Cauchy data spaces, orthogonalized Calderón projections and the subspace
//! gap machinery needed to check their continuity, at desk scale.
//!
//! The numerical core is generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`); polynomial coefficient algebra in [`poly`] is generic
//! over any numeric ring, so exact rational tables are available where exact
//! identities are wanted. The aliases below fix `f64`, which is what the
//! experiment runner uses.

pub mod disk2d;
pub mod elliptic1d;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod scale;
pub mod subspace;

pub use error::{LabError, Result};
pub use scalar::Real;

pub type InnerSpace64 = subspace::InnerSpace<f64>;
pub type Subspace64 = subspace::Subspace<f64>;
pub type Projector64 = subspace::Projector<f64>;
pub type OperatorSpec64 = elliptic1d::OperatorSpec1D<f64>;
pub type ScaleOperator64 = scale::ScaleOperator<f64>;
pub type RadialOperatorSpec64 = disk2d::RadialOperatorSpec<f64>;
pub type CalderonBlocks64 = disk2d::CalderonBlocks<f64>;
