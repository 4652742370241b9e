//! Dense exact linear algebra over a [`FieldSpec`].
//!
//! Besides the usual rank/kernel/solve machinery this module computes the
//! dimension of an intersection of column spans `V_{A_1} ∩ ... ∩ V_{A_l}`
//! through the rank of a block matrix, and emulates a generic `k x n` matrix
//! by sampling over `F_{2^61 - 1}`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Default number of independent instantiations for generic oracles.
pub const DEFAULT_GENERIC_TRIALS: usize = 2;

/// A dense row-major matrix over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !field.contains(**x)) {
            return Err(Error::Precondition(format!("{bad:?} is not an element of {field}")));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a prime-field matrix from signed integer rows.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(field, rows.len(), cols, |i, j| {
            field.from_i64(rows[i][j])
        }))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, columns: &[Vec<FieldElement>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("column length".into()));
        }
        Ok(Self::from_fn(field, rows, columns.len(), |i, j| columns[j][i]))
    }

    /// A matrix with independent uniform entries.
    pub fn random<R: Rng + ?Sized>(field: FieldSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.mul_add(out.get(i, j), a, other.get(l, j));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(f.zero(), |acc, (&a, &b)| f.mul_add(acc, a, b))
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let f = self.field;
        Ok(Matrix {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
            ..*self
        })
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
            ..*self
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.cols,
            });
        }
        Ok(Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| {
            self.get(i, cols[j])
        }))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.rows,
            });
        }
        Ok(Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| {
            self.get(rows[i], j)
        }))
    }

    /// Drops column `j`.
    pub fn without_column(&self, j: usize) -> Result<Matrix> {
        let keep: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        if j >= self.cols {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.cols,
            });
        }
        self.select_columns(&keep)
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts".into()));
        }
        Ok(Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    ///
    /// Pivots are the first nonzero entry found scanning down each column, so
    /// the pivot columns are the leftmost maximal independent column set.
    fn reduce(&mut self, full: bool) -> Vec<usize> {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.data[i * cols + c].is_zero()) else {
                continue;
            };
            if p != r {
                for j in c..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]).expect("pivot is nonzero");
            for j in c..cols {
                self.data[r * cols + j] = f.mul(inv, self.data[r * cols + j]);
            }
            let start = if full { 0 } else { r + 1 };
            for i in start..rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor.is_zero() {
                    continue;
                }
                let factor = f.neg(factor);
                for j in c..cols {
                    let v = f.mul_add(self.data[i * cols + j], factor, self.data[r * cols + j]);
                    self.data[i * cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Eliminate along the shorter side.
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        self.clone().reduce(false).len()
    }

    /// Reduced row echelon form together with its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce(true);
        (m, pivots)
    }

    /// Leftmost maximal set of linearly independent columns among `cols`.
    pub fn independent_columns(&self, cols: &[usize]) -> Result<Vec<usize>> {
        let sub = self.select_columns(cols)?;
        let (_, pivots) = sub.rref();
        Ok(pivots.into_iter().map(|p| cols[p]).collect())
    }

    /// A basis of `{x : Mx = 0}`, as the columns of a `cols x nullity` matrix.
    pub fn kernel(&self) -> Matrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                k.set(pc, idx, f.neg(r.get(row, fc)));
            }
        }
        k
    }

    /// A basis of `{y : y^T M = 0}`, as columns.
    pub fn left_kernel(&self) -> Matrix {
        self.transpose().kernel()
    }

    /// Some `x` with `Mx = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Option<Vec<FieldElement>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.field;
        let aug = Matrix::from_fn(f, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                b[i]
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Ok(Some(x))
    }

    /// Kronecker product: block `(i, j)` is `self[i, j] * other`.
    pub fn kronecker(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        let f = self.field;
        Ok(Matrix::from_fn(
            f,
            self.rows * other.rows,
            self.cols * other.cols,
            |i, j| {
                f.mul(
                    self.get(i / other.rows, j / other.cols),
                    other.get(i % other.rows, j % other.cols),
                )
            },
        ))
    }

    /// Whether `v` lies in the column span.
    pub fn span_contains(&self, v: &[FieldElement]) -> Result<bool> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok(self.solve(v)?.is_some())
    }

    /// Whether two matrices have the same row space.
    pub fn same_row_space(&self, other: &Matrix) -> Result<bool> {
        if self.cols != other.cols {
            return Ok(false);
        }
        let r = self.rank();
        Ok(r == other.rank() && self.vstack(other)?.rank() == r)
    }
}

impl fmt::Display for Matrix {
    /// The matrix text format: field literal, dimensions, then entries row by row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.field)?;
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|&x| self.field.format_element(x))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// An ordered family `A_1, ..., A_l` of subsets of `{0, ..., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    /// Builds a family from 0-based index sets; duplicates are removed.
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Precondition("a set family needs at least one set".into()));
        }
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                match s.iter().find(|&&x| x >= n) {
                    Some(&bad) => Err(Error::IndexOutOfRange { index: bad, bound: n }),
                    None => Ok(s),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFamily { n, sets })
    }

    /// Builds a family from 1-based index sets, as used in files and reports.
    pub fn from_one_based(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&x| {
                        x.checked_sub(1)
                            .ok_or(Error::IndexOutOfRange { index: 0, bound: n })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, sets: Vec<Vec<usize>>) -> Self {
        SetFamily { n, sets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Elements lying in every set.
    pub fn common_elements(&self) -> Vec<usize> {
        let mut common = self.sets[0].clone();
        for s in &self.sets[1..] {
            common.retain(|x| s.binary_search(x).is_ok());
        }
        common
    }

    /// Elements lying in at least one set.
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.sets.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

impl fmt::Display for SetFamily {
    /// One line per set, 1-based: `A1: 1 2 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sets.iter().enumerate() {
            let elems: Vec<String> = s.iter().map(|x| (x + 1).to_string()).collect();
            if elems.is_empty() {
                writeln!(f, "A{}:", i + 1)?;
            } else {
                writeln!(f, "A{}: {}", i + 1, elems.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Block matrix whose rank decides the intersection dimension:
///
/// ```text
/// [ V_{B_1} V_{B_2}                 ]
/// [ V_{B_1}         V_{B_3}         ]
/// [   ...                   ...     ]
/// [ V_{B_1}                 V_{B_l} ]
/// ```
///
/// where each `B_i` is the leftmost independent subset of `A_i`.
struct IntersectionSystem {
    reduced: Vec<Vec<usize>>,
    block: Matrix,
}

impl IntersectionSystem {
    fn build(v: &Matrix, family: &SetFamily) -> Result<Self> {
        if family.n() != v.cols() {
            return Err(Error::DimensionMismatch(format!(
                "family over [{}] for a matrix with {} columns",
                family.n(),
                v.cols()
            )));
        }
        let reduced = family
            .sets()
            .iter()
            .map(|s| {
                // A set of size <= 1 with a nonzero column is independent already.
                if s.len() == 1 && !v.column(s[0]).iter().all(|x| x.is_zero()) {
                    Ok(s.clone())
                } else {
                    v.independent_columns(s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_reduced(v, reduced))
    }

    fn from_reduced(v: &Matrix, reduced: Vec<Vec<usize>>) -> Self {
        let k = v.rows();
        let l = reduced.len();
        let widths: Vec<usize> = reduced.iter().map(Vec::len).collect();
        let total: usize = widths.iter().sum();
        let mut offsets = vec![0; l];
        for i in 1..l {
            offsets[i] = offsets[i - 1] + widths[i - 1];
        }
        let mut block = Matrix::zeros(v.field(), k * l.saturating_sub(1), total);
        for br in 0..l.saturating_sub(1) {
            for r in 0..k {
                let row = br * k + r;
                for (c, &col) in reduced[0].iter().enumerate() {
                    block.set(row, offsets[0] + c, v.get(r, col));
                }
                for (c, &col) in reduced[br + 1].iter().enumerate() {
                    block.set(row, offsets[br + 1] + c, v.get(r, col));
                }
            }
        }
        IntersectionSystem { reduced, block }
    }

    fn sum_of_dims(&self) -> usize {
        self.reduced.iter().map(Vec::len).sum()
    }
}

/// `dim(V_{A_1} ∩ ... ∩ V_{A_l})` via the block-matrix rank formula.
///
/// A single-set family is accepted and yields `dim V_{A_1}`.
pub fn intersection_dim(v: &Matrix, family: &SetFamily) -> Result<usize> {
    let sys = IntersectionSystem::build(v, family)?;
    if family.len() == 1 {
        return Ok(sys.sum_of_dims());
    }
    Ok(sys.sum_of_dims() - sys.block.rank())
}

/// Intersection dimension when every set is known to index independent
/// columns, e.g. sets of size at most `k` in an MDS matrix.
pub(crate) fn intersection_dim_independent(v: &Matrix, sets: &[Vec<usize>]) -> usize {
    if sets.iter().any(Vec::is_empty) {
        return 0;
    }
    let sys = IntersectionSystem::from_reduced(v, sets.to_vec());
    if sets.len() == 1 {
        return sys.sum_of_dims();
    }
    sys.sum_of_dims() - sys.block.rank()
}

/// Block matrix of the intersection formula for independent sets; used to
/// read off the coordinate-block subspaces during padding.
pub(crate) fn intersection_block_matrix(v: &Matrix, sets: &[Vec<usize>]) -> Matrix {
    IntersectionSystem::from_reduced(v, sets.to_vec()).block
}

/// A basis (as columns) of `V_{A_1} ∩ ... ∩ V_{A_l}`.
pub fn intersection_basis(v: &Matrix, family: &SetFamily) -> Result<Matrix> {
    let sys = IntersectionSystem::build(v, family)?;
    if family.len() == 1 {
        return v.select_columns(&sys.reduced[0]);
    }
    // x in the kernel splits as (x^1, ..., x^l) with -V x^1 = V x^2 = ...;
    // the map x -> V_{B_1} (-x^1) is a bijection onto the intersection.
    let ker = sys.block.kernel();
    let f = v.field();
    let first = v.select_columns(&sys.reduced[0])?;
    let w = sys.reduced[0].len();
    let mut cols = Vec::with_capacity(ker.cols());
    for c in 0..ker.cols() {
        let x1: Vec<FieldElement> = (0..w).map(|i| f.neg(ker.get(i, c))).collect();
        cols.push(first.apply(&x1)?);
    }
    Matrix::from_columns(f, v.rows(), &cols)
}

/// Independent instantiations of a generic `k x n` matrix over `F_{2^61-1}`.
///
/// Generic matrices minimize intersection dimensions, so the oracle reports
/// the minimum over its instantiations.
#[derive(Clone, Debug)]
pub struct GenericMatrix {
    k: usize,
    n: usize,
    samples: Vec<Matrix>,
}

impl GenericMatrix {
    pub fn sample<R: Rng + ?Sized>(k: usize, n: usize, trials: usize, rng: &mut R) -> Self {
        let field = FieldSpec::generic();
        let samples = (0..trials.max(1))
            .map(|_| Matrix::random(field, k, n, rng))
            .collect();
        GenericMatrix { k, n, samples }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn intersection_dim(&self, family: &SetFamily) -> Result<usize> {
        let mut best = usize::MAX;
        for m in &self.samples {
            best = best.min(intersection_dim(m, family)?);
            if best == 0 {
                break;
            }
        }
        Ok(best)
    }
}

/// Generic intersection dimension for a family over `[n]` in `F^k`.
pub fn generic_intersection_dim<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    family: &SetFamily,
    trials: usize,
    rng: &mut R,
) -> Result<usize> {
    if family.n() != n {
        return Err(Error::DimensionMismatch("family ground set".into()));
    }
    GenericMatrix::sample(k, n, trials, rng).intersection_dim(family)
}

/// Kronecker product of two column vectors.
fn kron_vec(f: FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| f.mul(x, y)))
        .collect()
}

/// `dim(Σ_i span(X_i) ⊗ span(Y_i))` for column-basis pairs `(X_i, Y_i)`.
pub fn tensor_span_dim(terms: &[(Matrix, Matrix)], dims: (usize, usize)) -> Result<usize> {
    let (d1, d2) = dims;
    let Some((first, _)) = terms.first() else {
        return Ok(0);
    };
    let f = first.field();
    let mut cols = Vec::new();
    for (x, y) in terms {
        if x.field() != f || y.field() != f {
            return Err(Error::FieldMismatch);
        }
        if x.rows() != d1 || y.rows() != d2 {
            return Err(Error::DimensionMismatch(format!(
                "term in F^{} ⊗ F^{} for ambient F^{d1} ⊗ F^{d2}",
                x.rows(),
                y.rows()
            )));
        }
        for a in 0..x.cols() {
            let xa = x.column(a);
            for b in 0..y.cols() {
                cols.push(kron_vec(f, &xa, &y.column(b)));
            }
        }
    }
    if cols.is_empty() {
        return Ok(0);
    }
    Ok(Matrix::from_columns(f, d1 * d2, &cols)?.rank())
}

/// Whether `Σ_i span(X_i) ⊗ span(Y_i)` is all of `F^{d1} ⊗ F^{d2}`.
pub fn tensor_span_full(terms: &[(Matrix, Matrix)], dims: (usize, usize)) -> Result<bool> {
    Ok(tensor_span_dim(terms, dims)? == dims.0 * dims.1)
}
