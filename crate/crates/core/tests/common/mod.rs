//! Reference implementations used as test oracles. Plain `u64` arithmetic
//! modulo a prime, written without any of the library's linear algebra.
#![allow(dead_code)]

use mrlab_core::{Matrix, TensorParams};
use rand::Rng;

pub const MERSENNE: u64 = (1 << 61) - 1;

pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

pub fn inv(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        e >>= 1;
    }
    acc
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(rows: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let iv = inv(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul(*x, iv, p);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in 0..width {
                    let sub = mul(factor, rows[r][j], p);
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut rows = rows.to_vec();
    echelon(&mut rows, p).len()
}

/// Basis of `{x : row · x = 0 for every row}` in `F_p^width`.
pub fn nullspace(rows: &[Vec<u64>], width: usize, p: u64) -> Vec<Vec<u64>> {
    if rows.is_empty() {
        return (0..width)
            .map(|i| (0..width).map(|j| u64::from(i == j)).collect())
            .collect();
    }
    let mut rows = rows.to_vec();
    let pivots = echelon(&mut rows, p);
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![0; width];
            x[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = (p - rows[r][free]) % p;
            }
            x
        })
        .collect()
}

/// Columns of a prime-field matrix as integer vectors.
pub fn columns(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.cols())
        .map(|j| m.column(j).iter().map(|x| x.a0()).collect())
        .collect()
}

/// `dim ∩_i span{cols[j] : j ∈ A_i}` by stacking the equations of each span.
pub fn intersection_dim(cols: &[Vec<u64>], k: usize, family: &[Vec<usize>], p: u64) -> usize {
    let mut equations = Vec::new();
    for set in family {
        let spanning: Vec<Vec<u64>> = set.iter().map(|&j| cols[j].clone()).collect();
        equations.extend(nullspace(&spanning, k, p));
    }
    k - rank(&equations, p)
}

/// `dim(span(a) ∩ span(b))` via `dim a + dim b - dim(a + b)`.
pub fn pair_intersection_dim(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> usize {
    let both: Vec<Vec<u64>> = a.iter().chain(b).cloned().collect();
    rank(a, p) + rank(b, p) - rank(&both, p)
}

pub fn random_columns<R: Rng>(k: usize, n: usize, p: u64, rng: &mut R) -> Vec<Vec<u64>> {
    (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(0..p)).collect())
        .collect()
}

/// Generic intersection dimension: the minimum over random matrices mod
/// `2^61 - 1`.
pub fn generic_intersection_dim<R: Rng>(k: usize, n: usize, family: &[Vec<usize>], rng: &mut R) -> usize {
    (0..3)
        .map(|_| intersection_dim(&random_columns(k, n, MERSENNE, rng), k, family, MERSENNE))
        .min()
        .unwrap()
}

/// All subsets of `0..n` as sorted vectors.
pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Every nonzero vector of `F_p^k` for tiny `p^k`.
pub fn all_vectors(k: usize, p: u64) -> Vec<Vec<u64>> {
    let total = p.pow(k as u32);
    (0..total)
        .map(|mut x| {
            (0..k)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        })
        .collect()
}

/// The complement of three diagonal blocks.
pub fn block_pattern_kept() -> Vec<(usize, usize)> {
    vec![(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 4), (4, 5), (5, 4), (5, 5)]
}

pub fn redundancy(p: TensorParams) -> usize {
    p.m * p.b + p.n * p.a - p.a * p.b
}

/// Tensor code correctability from generators alone: the map
/// `X ↦ (G_col^T X G_row)` restricted to kept cells must be injective.
/// `col` and `row` are the generator columns (`m` of length `m - a`, `n` of
/// length `n - b`).
pub fn tensor_correctable(col: &[Vec<u64>], row: &[Vec<u64>], erased: impl Fn(usize, usize) -> bool, p: u64) -> bool {
    let (ka, kb) = (col[0].len(), row[0].len());
    let mut equations = Vec::new();
    for (i, c) in col.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            if !erased(i, j) {
                equations.push(kron(c, r, p));
            }
        }
    }
    rank(&equations, p) == ka * kb
}

/// Generic tensor correctability: any of two random instantiations over
/// `2^61 - 1` corrects the pattern.
pub fn generic_tensor_correctable<R: Rng>(params: TensorParams, erased: impl Fn(usize, usize) -> bool + Copy, rng: &mut R) -> bool {
    let TensorParams { m, n, a, b } = params;
    (0..2).any(|_| {
        let col = random_columns(m - a, m, MERSENNE, rng);
        let row = random_columns(n - b, n, MERSENNE, rng);
        tensor_correctable(&col, &row, erased, MERSENNE)
    })
}

pub fn kron(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| mul(a, b, p))).collect()
}

/// `dim Σ span(X_i) ⊗ span(Y_i)` for spanning-column pairs.
pub fn kron_span_dim(terms: &[(Vec<Vec<u64>>, Vec<Vec<u64>>)], p: u64) -> usize {
    let vectors: Vec<Vec<u64>> = terms
        .iter()
        .flat_map(|(xs, ys)| xs.iter().flat_map(move |x| ys.iter().map(move |y| kron(x, y, p))))
        .collect();
    rank(&vectors, p)
}
