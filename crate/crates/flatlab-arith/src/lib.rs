//! Exact arithmetic for the flat-surface toolkit: cyclotomic fields, trace-field degrees of the
//! regular `2n`-gon family, integer relation detection by lattice reduction, and the exact check
//! that the Matheus–Yoccoz generator actions have finite order.

pub mod cyclotomic;
pub mod fields;
pub mod lll;
pub mod matyoc;
pub mod poly;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("geometry: {0}")]
    Geometry(#[from] flatlab_core::FlatError),
}

pub type Result<T> = std::result::Result<T, ArithError>;

pub use cyclotomic::{CycloElem, CycloField, CycloMat2, RealCycloField};
pub use fields::{circumference_field, totient, trace_field_degree, CircumferenceField, TraceFieldReport};
pub use lll::{find_relation, minimal_polynomial, MinPoly};
pub use matyoc::{matheus_yoccoz_check, MatYocReport};
pub use poly::QPoly;
