//! `(m, n, a, b)`-tensor codes `C_col ⊗ C_row` and erasure correction.
//!
//! A codeword is an `m x n` grid whose rows lie in the `(n, n-b)` row code
//! and whose columns lie in the `(m, m-a)` column code. Cell `(i, j)` is
//! flattened row-major to index `i * n + j`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::{is_mds_matrix, LinearCode};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::hmds::GenericOptions;
use crate::linalg::Matrix;
pub use crate::pattern::ErasurePattern;

/// Grid shape and redundancy parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorParams {
    pub m: usize,
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

impl TensorParams {
    pub fn new(m: usize, n: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a >= m || b >= n {
            return Err(Error::Precondition(format!(
                "need 1 <= a < m and 1 <= b < n, got m={m} n={n} a={a} b={b}"
            )));
        }
        if n > crate::pattern::MAX_COLUMNS {
            return Err(Error::Precondition(format!("n={n} exceeds 64 columns")));
        }
        Ok(TensorParams { m, n, a, b })
    }

    /// Number of independent parity checks, `mb + na - ab`.
    pub fn redundancy(&self) -> usize {
        self.m * self.b + self.n * self.a - self.a * self.b
    }

    fn check_pattern(&self, e: &ErasurePattern) -> Result<()> {
        if (e.m(), e.n()) != (self.m, self.n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} pattern for a {}x{} grid",
                e.m(),
                e.n(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }
}

/// Structured parity check `[I_m ⊗ H_row ; H_col ⊗ D]`, where `D` selects the
/// columns of an information set of the row code.
fn structured_parity(h_col: &Matrix, h_row: &Matrix, info_set: &[usize]) -> Result<Matrix> {
    let f = h_row.field();
    let m = h_col.cols();
    let n = h_row.cols();
    let d = Matrix::from_fn(f, info_set.len(), n, |r, c| {
        if info_set[r] == c {
            f.one()
        } else {
            f.zero()
        }
    });
    let top = Matrix::identity(f, m).kronecker(h_row)?;
    let bottom = h_col.kronecker(&d)?;
    top.vstack(&bottom)
}

/// Leftmost information set of the code with parity check `h`.
fn information_set(h: &Matrix) -> Vec<usize> {
    let g = h.kernel().transpose();
    let all: Vec<usize> = (0..g.cols()).collect();
    g.independent_columns(&all).expect("indices in range")
}

/// Whether the columns of `h` indexed by the pattern are independent.
fn columns_independent(h: &Matrix, e: &ErasurePattern, redundancy: usize) -> bool {
    let len = e.len();
    if len == 0 {
        return true;
    }
    if len > redundancy {
        return false;
    }
    h.select_columns(&e.flat_indices()).expect("indices in range").rank() == len
}

/// A tensor code with its cached structured parity check.
#[derive(Clone, Debug)]
pub struct TensorCode {
    col_code: LinearCode,
    row_code: LinearCode,
    params: TensorParams,
    parity: Matrix,
}

/// Result of erasure decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Codeword(Vec<Vec<FieldElement>>),
    Uncorrectable,
}

pub fn build_tensor(col: &LinearCode, row: &LinearCode) -> Result<TensorCode> {
    if col.field() != row.field() {
        return Err(Error::FieldMismatch);
    }
    let params = TensorParams::new(col.n(), row.n(), col.n() - col.k(), row.n() - row.k())?;
    let h_row = row.parity_check();
    let info = information_set(h_row);
    let parity = structured_parity(col.parity_check(), h_row, &info)?;
    Ok(TensorCode {
        col_code: col.clone(),
        row_code: row.clone(),
        params,
        parity,
    })
}

impl TensorCode {
    /// Builds the tensor code whose column and row codes have the given
    /// parity checks (`a x m` and `b x n`, full row rank).
    pub fn from_parity_checks(h_col: &Matrix, h_row: &Matrix) -> Result<Self> {
        let col = LinearCode::new(h_col.clone())?.dual();
        let row = LinearCode::new(h_row.clone())?.dual();
        build_tensor(&col, &row)
    }

    pub fn params(&self) -> TensorParams {
        self.params
    }

    pub fn field(&self) -> FieldSpec {
        self.parity.field()
    }

    pub fn col_code(&self) -> &LinearCode {
        &self.col_code
    }

    pub fn row_code(&self) -> &LinearCode {
        &self.row_code
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.parity
    }

    /// Whether the erasures `e` can be recovered from the remaining cells.
    pub fn is_correctable(&self, e: &ErasurePattern) -> Result<bool> {
        self.params.check_pattern(e)?;
        Ok(columns_independent(&self.parity, e, self.params.redundancy()))
    }

    /// Encodes an `(m-a) x (n-b)` message as `G_col^T M G_row`.
    pub fn encode(&self, message: &Matrix) -> Result<Matrix> {
        let g_col = self.col_code.generator();
        let g_row = self.row_code.generator();
        g_col.transpose().mul(message)?.mul(g_row)
    }

    /// Whether the grid satisfies every parity check.
    pub fn is_codeword(&self, grid: &Matrix) -> Result<bool> {
        let TensorParams { m, n, .. } = self.params;
        if (grid.rows(), grid.cols()) != (m, n) {
            return Err(Error::DimensionMismatch("grid shape".into()));
        }
        Ok(self.parity.apply(grid.entries())?.iter().all(|x| x.is_zero()))
    }

    /// Fills the erased (`None`) cells of a received grid.
    ///
    /// Returns `Uncorrectable` when the pattern is not correctable, and
    /// `Error::Inconsistent` when the known cells extend to no codeword.
    pub fn decode_erasures(&self, received: &[Vec<Option<FieldElement>>]) -> Result<Decoded> {
        let TensorParams { m, n, .. } = self.params;
        if received.len() != m || received.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("received grid is not {m}x{n}")));
        }
        let f = self.field();
        let mut e = ErasurePattern::new(m, n)?;
        for (i, row) in received.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                match x {
                    None => e.insert(i, j)?,
                    Some(v) if !f.contains(*v) => {
                        return Err(Error::Precondition(format!("{v:?} is not in {f}")));
                    }
                    Some(_) => {}
                }
            }
        }
        if !self.is_correctable(&e)? {
            return Ok(Decoded::Uncorrectable);
        }
        let erased = e.flat_indices();
        let known = e.complement().flat_indices();
        let h_e = self.parity.select_columns(&erased)?;
        let h_k = self.parity.select_columns(&known)?;
        let values: Vec<FieldElement> = known
            .iter()
            .map(|&x| received[x / n][x % n].expect("known cell"))
            .collect();
        let rhs: Vec<FieldElement> = h_k.apply(&values)?.into_iter().map(|x| f.neg(x)).collect();
        let Some(sol) = h_e.solve(&rhs)? else {
            return Err(Error::Inconsistent);
        };
        let mut out: Vec<Vec<FieldElement>> = received
            .iter()
            .map(|r| r.iter().map(|x| x.unwrap_or(FieldElement::ZERO)).collect())
            .collect();
        for (&x, v) in erased.iter().zip(sol) {
            out[x / n][x % n] = v;
        }
        Ok(Decoded::Codeword(out))
    }
}

/// Independent instantiations of a tensor code with generic `H_row`, `H_col`
/// over `F_{2^61-1}`. A pattern is generically correctable when any
/// instantiation corrects it, since generic rank is maximal.
#[derive(Clone, Debug)]
pub struct GenericTensor {
    params: TensorParams,
    samples: Vec<Matrix>,
}

impl GenericTensor {
    pub fn sample<R: Rng + ?Sized>(params: TensorParams, trials: usize, rng: &mut R) -> Self {
        let f = FieldSpec::generic();
        let TensorParams { m, n, a, b } = params;
        let samples = (0..trials.max(1))
            .map(|_| {
                let h_row = Matrix::random(f, b, n, rng);
                let h_col = Matrix::random(f, a, m, rng);
                let info = information_set(&h_row);
                structured_parity(&h_col, &h_row, &info).expect("same field")
            })
            .collect();
        GenericTensor { params, samples }
    }

    pub fn with_options(params: TensorParams, opts: &GenericOptions) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        Self::sample(params, opts.trials, &mut rng)
    }

    pub fn params(&self) -> TensorParams {
        self.params
    }

    pub fn is_correctable(&self, e: &ErasurePattern) -> Result<bool> {
        self.params.check_pattern(e)?;
        let r = self.params.redundancy();
        Ok(self.samples.iter().any(|h| columns_independent(h, e, r)))
    }
}

/// Generic correctability with `trials` instantiations drawn from `seed`.
pub fn is_generically_correctable(
    e: &ErasurePattern,
    params: TensorParams,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GenericTensor::sample(params, trials, &mut rng).is_correctable(e)
}

/// Checks maximal recoverability: returns the first pattern (in
/// lexicographic order of flat indices) that a generic code corrects but
/// `code` does not.
///
/// Only patterns of size `mb + na - ab` are tried. Generically correctable
/// patterns are the independent sets of a matroid of that rank, so each one
/// extends to a maximal one, and a code correcting a pattern corrects all of
/// its subsets.
pub fn verify_mr(code: &TensorCode) -> Result<Option<ErasurePattern>> {
    verify_mr_with(code, &GenericOptions::default())
}

pub fn verify_mr_with(code: &TensorCode, opts: &GenericOptions) -> Result<Option<ErasurePattern>> {
    let params = code.params();
    let generic = GenericTensor::with_options(params, opts);
    let TensorParams { m, n, .. } = params;
    let cells = m * n;
    let size = params.redundancy();
    let r = size;
    let found = (0..cells).into_par_iter().find_map_first(|first| {
        (first + 1..cells).combinations(size - 1).find_map(|rest| {
            let mut flat = Vec::with_capacity(size);
            flat.push(first);
            flat.extend(rest);
            let e = ErasurePattern::from_flat(m, n, &flat).expect("in range");
            if columns_independent(code.parity_check(), &e, r) {
                return None;
            }
            generic
                .is_correctable(&e)
                .expect("shapes agree")
                .then_some(e)
        })
    });
    Ok(found)
}

/// Nonempty patterns in which every nonempty row has at least `b + 1` cells
/// and every nonempty column at least `a + 1`.
pub fn enumerate_minimal_patterns(params: TensorParams) -> Vec<ErasurePattern> {
    minimal_patterns(params, params.n)
}

/// Minimal patterns occupying at most `b(m - a)` columns. Every minimal
/// pattern that is correctable by some code satisfies this bound, since
/// correctable patterns are regular.
pub fn enumerate_minimal_patterns_capped(params: TensorParams) -> Vec<ErasurePattern> {
    let cap = params.b * (params.m - params.a);
    minimal_patterns(params, cap.min(params.n))
}

fn minimal_patterns(params: TensorParams, max_cols: usize) -> Vec<ErasurePattern> {
    let TensorParams { m, n, a, b } = params;
    let mut out = Vec::new();
    for width in 1..=max_cols {
        for support in (0..n).combinations(width) {
            let mask = support.iter().fold(0u64, |acc, &j| acc | 1 << j);
            let mut options = vec![0u64];
            let mut sub = mask;
            // All submasks of the support, largest first.
            while sub != 0 {
                if sub.count_ones() as usize > b {
                    options.push(sub);
                }
                sub = (sub - 1) & mask;
            }
            options[1..].sort_unstable();
            let mut rows = vec![0u64; m];
            let mut counts = vec![0usize; n];
            fill_rows(0, &mut rows, &mut counts, &options, &support, a, &mut |rows| {
                out.push(ErasurePattern::from_row_masks(m, n, rows.to_vec()).expect("valid masks"));
            });
        }
    }
    out
}

fn fill_rows(
    i: usize,
    rows: &mut Vec<u64>,
    counts: &mut Vec<usize>,
    options: &[u64],
    support: &[usize],
    a: usize,
    emit: &mut impl FnMut(&[u64]),
) {
    let remaining = rows.len() - i;
    if support.iter().any(|&j| counts[j] + remaining < a + 1) {
        return;
    }
    if remaining == 0 {
        emit(rows);
        return;
    }
    for &opt in options {
        rows[i] = opt;
        for &j in support {
            counts[j] += (opt >> j & 1) as usize;
        }
        fill_rows(i + 1, rows, counts, options, support, a, emit);
        for &j in support {
            counts[j] -= (opt >> j & 1) as usize;
        }
    }
    rows[i] = 0;
}

/// Result of a randomized search: the code found, if any, and the number
/// of attempts made.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub code: Option<TensorCode>,
    pub attempts: usize,
}

/// Samples random `H_row`, `H_col` over `field` until both define MDS codes
/// and the tensor code corrects every generically correctable minimal pattern.
pub fn search_mr_random(
    params: TensorParams,
    field: FieldSpec,
    max_attempts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    search_mr_random_with(params, field, max_attempts, seed, &GenericOptions::default())
}

pub fn search_mr_random_with(
    params: TensorParams,
    field: FieldSpec,
    max_attempts: usize,
    seed: u64,
    opts: &GenericOptions,
) -> Result<SearchOutcome> {
    let TensorParams { m, n, a, b } = params;
    let generic = GenericTensor::with_options(params, opts);
    let targets: Vec<ErasurePattern> = enumerate_minimal_patterns_capped(params)
        .into_iter()
        .filter(|e| generic.is_correctable(e).expect("shapes agree"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let h_row = Matrix::random(field, b, n, &mut rng);
        let h_col = Matrix::random(field, a, m, &mut rng);
        if h_row.rank() < b || h_col.rank() < a || !is_mds_matrix(&h_row) || !is_mds_matrix(&h_col) {
            continue;
        }
        let code = TensorCode::from_parity_checks(&h_col, &h_row)?;
        let r = params.redundancy();
        if targets
            .par_iter()
            .all(|e| columns_independent(code.parity_check(), e, r))
        {
            return Ok(SearchOutcome {
                code: Some(code),
                attempts: attempt,
            });
        }
    }
    Ok(SearchOutcome {
        code: None,
        attempts: max_attempts,
    })
}
