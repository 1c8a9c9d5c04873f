//! Translation surfaces, their homology, cylinder decompositions and the `SL(2,R)` action.

pub mod canonical;
pub mod cylinders;
pub mod dynamics;
pub mod error;
pub mod flat;
pub mod geom;
pub mod homology;
pub mod intlin;
pub mod io;
pub mod kz;
pub mod marked;
pub mod origami;
pub mod sl2;
pub mod surface;

pub use canonical::{canonical_form, CanonicalForm};
pub use cylinders::{decompose, horizontal_decomposition, CylinderDecomposition, Direction};
pub use error::{FlatError, Result};
pub use geom::Vec2;
pub use flat::FlatTri;
pub use homology::{Homology, RelCohomClass};
pub use marked::MarkedSurface;
pub use origami::Origami;
pub use sl2::{IntMat2, Letter, Mat2, Word};
pub use surface::{build_regular_2ngon, Edge, Polygon, StratumSignature, TranslationSurface};
