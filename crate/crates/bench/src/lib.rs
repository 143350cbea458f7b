//! Shared fixtures for the benchmarks.

use hodgelets::complex::{hex_complex_with_target, Rect};
use hodgelets::experiments::hodgelet_dictionaries;
use hodgelets::flows::{discretize_field, two_vortex_field};
use hodgelets::spectral::{HodgeOperators, HodgeSpectra};
use hodgelets::{Cochain, Dictionary, SimplicialComplex};

/// Hexagonal grid over `[-2, 2]^2` with about `target` hexagons.
pub fn hex_grid(target: usize) -> SimplicialComplex {
    hex_complex_with_target(Rect::new(-2.0, 2.0, -2.0, 2.0), target).unwrap().0
}

pub fn spectra(complex: &SimplicialComplex) -> HodgeSpectra {
    HodgeSpectra::new(&HodgeOperators::new(complex)).unwrap()
}

/// Separate dictionary (M = 4, R = 3, normalized) and the discretized
/// two-vortex field on a grid of about `target` hexagons.
pub fn field_fixture(target: usize) -> (Dictionary, Cochain) {
    let (x, _, meta) = hex_complex_with_target(Rect::new(-2.0, 2.0, -2.0, 2.0), target).unwrap();
    let dictionaries = hodgelet_dictionaries(&spectra(&x), 4, 3, true).unwrap();
    let flow = discretize_field(&two_vortex_field(), &x, &meta).unwrap();
    (dictionaries.separate, flow)
}
