//! Multiscale transforms for signals on the κ-simplices of a simplicial
//! complex: Hodge-Laplacian spectral bipartitioning, the κ-Haar basis, the
//! κ-HGLET and κ-GHWT dictionaries, best-basis and matching-pursuit
//! selection, and approximation/clustering analysis.

pub mod analysis;
pub mod citation;
pub mod complex;
pub mod dictionary;
pub mod eigen;
pub mod error;
pub mod hodge;
pub mod io;
pub mod mesh;
pub mod par;
pub mod partition;
pub mod pipeline;
pub mod selection;
pub mod sparse;

pub use complex::{close_under_faces, natural_parity, SimplicialComplex, SimplexSpec};
pub use error::{Error, Result};
pub use hodge::Variant;
