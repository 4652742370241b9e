//! Shared fixtures for the benchmarks.

use mrlab_core::codes::{random_code, reed_solomon_default};
use mrlab_core::tensor::build_tensor;
use mrlab_core::{ErasurePattern, FieldSpec, LinearCode, Matrix, TensorCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(f: FieldSpec, rows: usize, cols: usize, seed: u64) -> Matrix {
    Matrix::random(f, rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The dual of RS(8,2) over F_13, which is not MDS(4).
pub fn rs_dual() -> LinearCode {
    reed_solomon_default(FieldSpec::prime(13).unwrap(), 8, 2).unwrap().dual()
}

pub fn generic_code(n: usize, k: usize) -> LinearCode {
    random_code(FieldSpec::generic(), n, k, 1).unwrap()
}

/// Single parity column code tensored with a generic (6,4) row code.
pub fn parity_tensor() -> TensorCode {
    let f = FieldSpec::generic();
    let col = LinearCode::new(Matrix::from_fn(f, 1, 3, |_, _| f.one())).unwrap().dual();
    build_tensor(&col, &generic_code(6, 4)).unwrap()
}

/// The complement of three diagonal blocks in a 5x5 grid.
pub fn block_pattern() -> ErasurePattern {
    let kept = [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 4), (4, 5), (5, 4), (5, 5)];
    ErasurePattern::from_one_based(5, 5, &kept).unwrap().complement()
}
