//! Helpers shared by the unit tests.

use ndarray::Array2;
use rand::rngs::StdRng;
use rand::Rng;

use crate::linalg::{dagger, trace};
use crate::model::{Basis, DensityMatrix, DIM};
use crate::C64;

/// Generic full-rank random state, built as A A^dag normalized.
pub(crate) fn random_density(rng: &mut StdRng, basis: Basis) -> DensityMatrix {
    let a = Array2::from_shape_fn((DIM, DIM), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = a.dot(&dagger(&a));
    let tr = trace(&m).re;
    DensityMatrix::new(m / C64::new(tr, 0.0), basis).unwrap()
}

/// Random Hermitian matrix with entries of order one, not a state.
pub(crate) fn random_hermitian(rng: &mut StdRng) -> Array2<C64> {
    let a = Array2::from_shape_fn((DIM, DIM), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    crate::linalg::hermitize(&a)
}

/// Random Hermitian with unit trace (may be indefinite).
pub(crate) fn random_hermitian_unit_trace(rng: &mut StdRng) -> Array2<C64> {
    let mut m = random_hermitian(rng);
    let tr = trace(&m);
    let shift = (tr - C64::new(1.0, 0.0)) / C64::new(DIM as f64, 0.0);
    for i in 0..DIM {
        m[[i, i]] -= shift;
    }
    m
}
