//! Linear codes given by a full-row-rank generator matrix.

use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg::Matrix;

/// An `(n, k)` linear code.
#[derive(Clone, Debug)]
pub struct LinearCode {
    generator: Matrix,
    parity: OnceLock<Matrix>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.generator == other.generator
    }
}

impl Eq for LinearCode {}

impl LinearCode {
    /// Wraps a generator; it must have full row rank and `1 <= k < n`.
    pub fn new(generator: Matrix) -> Result<Self> {
        let (k, n) = (generator.rows(), generator.cols());
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("need 1 <= k < n, got k={k}, n={n}")));
        }
        let r = generator.rank();
        if r != k {
            return Err(Error::InvalidCode(format!("generator has rank {r} < k={k}")));
        }
        Ok(LinearCode {
            generator,
            parity: OnceLock::new(),
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.generator.field()
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// Parity-check matrix: an `(n-k) x n` matrix `H` with `H G^T = 0`,
    /// in reduced row echelon form.
    pub fn parity_check(&self) -> &Matrix {
        self.parity.get_or_init(|| {
            let (r, _) = self.generator.kernel().transpose().rref();
            r
        })
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode::new(self.parity_check().clone()).expect("parity check has full row rank")
    }

    pub fn puncture(&self, i: usize) -> Result<LinearCode> {
        if self.n() < self.k() + 2 {
            return Err(Error::Precondition(format!(
                "puncturing an ({}, {}) code leaves k >= n",
                self.n(),
                self.k()
            )));
        }
        LinearCode::new(self.generator.without_column(i)?)
    }

    /// The `(n-1, k-1)` subcode of codewords vanishing at `i`, with `i` removed.
    pub fn shorten(&self, i: usize) -> Result<LinearCode> {
        let (k, n) = (self.k(), self.n());
        if k < 2 {
            return Err(Error::Precondition("shortening needs k >= 2".into()));
        }
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        let f = self.field();
        let g = &self.generator;
        let Some(pivot) = (0..k).find(|&r| !g.get(r, i).is_zero()) else {
            return Err(Error::Precondition(format!("column {} is zero", i + 1)));
        };
        // Row operations making column i equal to e_k.
        let mut rows: Vec<Vec<FieldElement>> = (0..k).map(|r| g.row(r).to_vec()).collect();
        let last = rows.remove(pivot);
        let inv = f.inv(last[i])?;
        let last: Vec<FieldElement> = last.iter().map(|&x| f.mul(inv, x)).collect();
        for row in &mut rows {
            let c = f.neg(row[i]);
            for (x, &y) in row.iter_mut().zip(&last) {
                *x = f.mul_add(*x, c, y);
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let sub = Matrix::from_fn(f, k - 1, n - 1, |r, c| rows[r][keep[c]]);
        LinearCode::new(sub)
    }

    /// The first `k`-subset of columns (in lexicographic order) that is
    /// linearly dependent, if any.
    pub fn first_dependent_set(&self) -> Option<Vec<usize>> {
        let (k, n) = (self.k(), self.n());
        let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
        subsets
            .into_par_iter()
            .find_first(|s| {
                self.generator
                    .select_columns(s)
                    .expect("indices in range")
                    .rank()
                    < k
            })
    }

    /// Whether every `k x k` minor of the generator is nonzero.
    pub fn is_mds(&self) -> bool {
        self.first_dependent_set().is_none()
    }

    /// Encodes a message of length `k`.
    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.generator.transpose().apply(message)
    }
}

impl fmt::Display for LinearCode {
    /// Code file format: a header comment, then the generator matrix.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# code n={} k={}", self.n(), self.k())?;
        write!(f, "{}", self.generator)
    }
}

/// Whether every square maximal minor of `m` (rows <= cols) is nonzero.
///
/// Works for matrices that are not generators of a code, e.g. `2 x n`
/// matrices sitting inside a larger space.
pub fn is_mds_matrix(m: &Matrix) -> bool {
    let r = m.rows();
    if r > m.cols() {
        return false;
    }
    let subsets: Vec<Vec<usize>> = (0..m.cols()).combinations(r).collect();
    subsets
        .into_par_iter()
        .all(|s| m.select_columns(&s).expect("indices in range").rank() == r)
}

/// Reed-Solomon code: the `k x n` Vandermonde matrix on distinct points.
pub fn reed_solomon(field: FieldSpec, n: usize, k: usize, evals: &[FieldElement]) -> Result<LinearCode> {
    if evals.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} evaluation points for n={n}",
            evals.len()
        )));
    }
    if (n as u128) > field.order() {
        return Err(Error::Precondition(format!("n={n} exceeds the field size")));
    }
    if let Some(x) = evals.iter().find(|x| !field.contains(**x)) {
        return Err(Error::Precondition(format!("{x:?} is not in {field}")));
    }
    if !evals.iter().all_unique() {
        return Err(Error::Precondition("repeated evaluation point".into()));
    }
    let g = Matrix::from_fn(field, k, n, |i, j| field.pow(evals[j], i as u128));
    LinearCode::new(g)
}

/// Reed-Solomon code on the first `n` field elements in enumeration order.
pub fn reed_solomon_default(field: FieldSpec, n: usize, k: usize) -> Result<LinearCode> {
    let evals: Vec<FieldElement> = field.elements().take(n).collect();
    reed_solomon(field, n, k, &evals)
}

/// A uniformly random `k x n` generator, resampled until it has full row rank.
pub fn random_code(field: FieldSpec, n: usize, k: usize, seed: u64) -> Result<LinearCode> {
    if k == 0 || k >= n {
        return Err(Error::InvalidCode(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = Matrix::random(field, k, n, &mut rng);
        if g.rank() == k {
            return LinearCode::new(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f13() -> FieldSpec {
        FieldSpec::prime(13).unwrap()
    }

    fn rs82() -> LinearCode {
        reed_solomon_default(f13(), 8, 2).unwrap()
    }

    #[test]
    fn reed_solomon_matches_vandermonde() {
        let g = rs82().generator().clone();
        let expected = Matrix::from_rows(
            f13(),
            &[vec![1, 1, 1, 1, 1, 1, 1, 1], vec![0, 1, 2, 3, 4, 5, 6, 7]],
        )
        .unwrap();
        assert_eq!(g, expected);
        let ones = reed_solomon_default(f13(), 5, 1).unwrap();
        assert!(ones.generator().row(0).iter().all(|&x| x == FieldElement::ONE));
    }

    #[test]
    fn reed_solomon_errors() {
        let f = FieldSpec::prime(5).unwrap();
        let e = |v: &[u64]| v.iter().map(|&x| f.from_u64(x)).collect::<Vec<_>>();
        assert!(reed_solomon(f, 3, 2, &e(&[1, 2, 1])).is_err());
        assert!(reed_solomon(f, 6, 2, &e(&[0, 1, 2, 3, 4, 5])).is_err());
        assert!(reed_solomon(f, 3, 2, &e(&[0, 1])).is_err());
    }

    #[test]
    fn dual_of_rs82_is_systematic() {
        let expected = Matrix::from_rows(
            f13(),
            &[
                vec![1, 0, 0, 0, 0, 0, 6, 6],
                vec![0, 1, 0, 0, 0, 0, 7, 5],
                vec![0, 0, 1, 0, 0, 0, 8, 4],
                vec![0, 0, 0, 1, 0, 0, 9, 3],
                vec![0, 0, 0, 0, 1, 0, 10, 2],
                vec![0, 0, 0, 0, 0, 1, 11, 1],
            ],
        )
        .unwrap();
        let d = rs82().dual();
        assert_eq!(d.generator(), &expected);
        assert!(d.generator().mul(&rs82().generator().transpose()).unwrap().is_zero());
    }

    #[test]
    fn dual_is_an_involution() {
        for seed in 0..10 {
            let c = random_code(f13(), 7, 3, seed).unwrap();
            let dd = c.dual().dual();
            assert!(dd.generator().same_row_space(c.generator()).unwrap());
        }
    }

    #[test]
    fn dual_of_parity_code_is_repetition() {
        let f = FieldSpec::prime(7).unwrap();
        let parity = Matrix::from_fn(f, 4, 5, |i, j| {
            if j == i {
                f.one()
            } else if j == 4 {
                f.neg(f.one())
            } else {
                f.zero()
            }
        });
        let d = LinearCode::new(parity).unwrap().dual();
        assert_eq!(d.k(), 1);
        let ones = Matrix::from_rows(f, &[vec![1; 5]]).unwrap();
        assert!(d.generator().same_row_space(&ones).unwrap());
    }

    #[test]
    fn puncture_and_shorten() {
        let p = rs82().puncture(7).unwrap();
        assert_eq!(p, reed_solomon_default(f13(), 7, 2).unwrap());
        for i in 0..8 {
            let s = rs82().shorten(i).unwrap();
            assert_eq!((s.n(), s.k()), (7, 1));
            assert!(s.is_mds());
            assert!(s.generator().row(0).iter().all(|x| !x.is_zero()));
        }
        let tiny = reed_solomon_default(f13(), 3, 2).unwrap();
        assert!(tiny.puncture(0).is_err());
        let with_zero = LinearCode::new(
            Matrix::from_rows(f13(), &[vec![1, 0, 1], vec![0, 0, 1]]).unwrap(),
        )
        .unwrap();
        assert!(with_zero.shorten(1).is_err());
        assert!(reed_solomon_default(f13(), 4, 1).unwrap().shorten(0).is_err());
    }

    #[test]
    fn shortened_code_vanishes_at_position() {
        // Shortening keeps exactly the codewords that are zero at i.
        let c = random_code(f13(), 7, 3, 4).unwrap();
        for i in 0..7 {
            let s = c.shorten(i).unwrap();
            for r in 0..s.k() {
                let mut word = s.generator().row(r).to_vec();
                word.insert(i, FieldElement::ZERO);
                let g = c.generator().transpose();
                assert!(g.span_contains(&word).unwrap());
            }
        }
    }

    #[test]
    fn mds_examples() {
        assert!(rs82().is_mds());
        let rep = Matrix::from_rows(f13(), &[vec![1, 1, 0, 1], vec![2, 2, 1, 3]]).unwrap();
        let c = LinearCode::new(rep).unwrap();
        assert!(!c.is_mds());
        assert_eq!(c.first_dependent_set(), Some(vec![0, 1]));
        for seed in 0..20 {
            let c = random_code(FieldSpec::prime(7).unwrap(), 6, 3, seed).unwrap();
            assert_eq!(c.is_mds(), c.dual().is_mds());
        }
    }

    #[test]
    fn random_code_is_reproducible() {
        let a = random_code(f13(), 8, 4, 99).unwrap();
        let b = random_code(f13(), 8, 4, 99).unwrap();
        assert_eq!(a, b);
        assert!(random_code(FieldSpec::generic(), 8, 4, 1).unwrap().is_mds());
        let f2 = FieldSpec::prime(2).unwrap();
        assert!((0..50).any(|s| !random_code(f2, 4, 2, s).unwrap().is_mds()));
    }

    #[test]
    fn code_display_has_header() {
        let text = rs82().to_string();
        assert!(text.starts_with("# code n=8 k=2\np=13\n2 8\n1 1 1"));
    }
}
