//! Hodgelets: spectral wavelet dictionaries for edge flows on simplicial
//! complexes.

pub mod clustering;
pub mod complex;
pub mod error;
pub mod experiments;
pub mod flows;
pub mod hodgelets;
pub mod io;
pub mod kernels;
pub mod sparse;
pub mod spectral;

pub use complex::{Cochain, Degree, Geometry, HexMeta, Point, Rect, Simplex, SimplicialComplex};
pub use error::{Error, Result};
pub use hodgelets::{Atom, AtomLabel, Dictionary, DictionaryKind, FrameBounds, Part};
pub use kernels::KernelBank;
pub use sparse::SparseApproximation;
pub use spectral::{HodgeComponents, HodgeOperators, HodgeSpectra, SpectralDecomposition};
