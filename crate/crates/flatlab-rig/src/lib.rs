//! Suspension dynamics for a representation `ρ` of `SL(2,Z)`: the flat bundle
//! `SL(2,R) ×_Γ R^n` with `γ·(g, v) = (gγ⁻¹, ρ(γ)v)`, pushed along expanding horocycle arcs
//! `g_t u(s)`, and the statistics used to probe invariance and equidistribution of the limits.

pub mod dictionary;
pub mod rep;
pub mod sample;
pub mod stats;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RigError {
    #[error("insufficient samples: {got} < {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numeric instability: {0}")]
    NumericInstability(String),
}

pub type Result<T> = std::result::Result<T, RigError>;

pub use dictionary::{Dictionary, DICTIONARY_ID};
pub use rep::{LatticeContext, Representation};
pub use sample::{arc_parameter, push_arc, push_samples, reduce, EmpiricalFiberDistribution, FiberSample};
pub use stats::{
    a_invariance_test, base_discrepancy, bounded_image_test, cocycle, cocycle_growth_fit, fiber_dispersion,
    group_tv, haar_reference, projective_distance, subpoly_divergence_probe,
    tv_fluctuation_scaling, AInvarianceReport, BoundedImageReport, DivergenceReport, FluctuationReport,
};
