//! Erasure patterns on an `m x n` grid.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of grid columns; rows are stored as bitmasks.
pub const MAX_COLUMNS: usize = 64;

/// A set of erased cells `E ⊆ [m] x [n]`, stored as one column bitmask per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErasurePattern {
    m: usize,
    n: usize,
    rows: Vec<u64>,
}

impl ErasurePattern {
    /// The empty pattern.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n > MAX_COLUMNS {
            return Err(Error::Precondition(format!(
                "n={n} exceeds the supported {MAX_COLUMNS} columns"
            )));
        }
        Ok(ErasurePattern {
            m,
            n,
            rows: vec![0; m],
        })
    }

    pub fn full(m: usize, n: usize) -> Result<Self> {
        let mut p = Self::new(m, n)?;
        let mask = p.full_row();
        p.rows.iter_mut().for_each(|r| *r = mask);
        Ok(p)
    }

    /// Pattern from 0-based cells.
    pub fn from_cells(m: usize, n: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut p = Self::new(m, n)?;
        for (i, j) in cells {
            p.insert(i, j)?;
        }
        Ok(p)
    }

    /// Pattern from 1-based cells.
    pub fn from_one_based(m: usize, n: usize, cells: &[(usize, usize)]) -> Result<Self> {
        let shifted = cells
            .iter()
            .map(|&(i, j)| match (i.checked_sub(1), j.checked_sub(1)) {
                (Some(i), Some(j)) => Ok((i, j)),
                _ => Err(Error::IndexOutOfRange { index: 0, bound: m.max(n) }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_cells(m, n, shifted)
    }

    /// Pattern given by row bitmasks.
    pub fn from_row_masks(m: usize, n: usize, rows: Vec<u64>) -> Result<Self> {
        let p = Self::new(m, n)?;
        if rows.len() != m {
            return Err(Error::DimensionMismatch(format!("{} row masks for m={m}", rows.len())));
        }
        if rows.iter().any(|&r| r & !p.full_row() != 0) {
            return Err(Error::Precondition("row mask exceeds n columns".into()));
        }
        Ok(ErasurePattern { rows, ..p })
    }

    /// The pattern whose flat row-major indices are `flat`.
    pub fn from_flat(m: usize, n: usize, flat: &[usize]) -> Result<Self> {
        Self::from_cells(m, n, flat.iter().map(|&x| (x / n.max(1), x % n.max(1))))
    }

    fn full_row(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.m {
            return Err(Error::IndexOutOfRange { index: i, bound: self.m });
        }
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, bound: self.n });
        }
        self.rows[i] |= 1 << j;
        Ok(())
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        if i < self.m && j < self.n {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.m && j < self.n && self.rows[i] >> j & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Erased columns of row `i` as a bitmask.
    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    pub fn row_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn col_degree(&self, j: usize) -> usize {
        self.rows.iter().filter(|&&r| r >> j & 1 == 1).count()
    }

    /// Erased cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for (i, &r) in self.rows.iter().enumerate() {
            for j in 0..self.n {
                if r >> j & 1 == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Erased cells as row-major flat indices `i * n + j`.
    pub fn flat_indices(&self) -> Vec<usize> {
        self.cells().into_iter().map(|(i, j)| i * self.n + j).collect()
    }

    pub fn complement(&self) -> ErasurePattern {
        let full = self.full_row();
        ErasurePattern {
            rows: self.rows.iter().map(|&r| !r & full).collect(),
            ..*self
        }
    }

    /// Columns of row `i` that are not erased.
    pub fn kept_in_row(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.rows[i] >> j & 1 == 0).collect()
    }

    /// Rows of column `j` that are not erased.
    pub fn kept_in_col(&self, j: usize) -> Vec<usize> {
        (0..self.m).filter(|&i| self.rows[i] >> j & 1 == 0).collect()
    }

    pub fn nonempty_rows(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.rows[i] != 0).collect()
    }

    pub fn nonempty_cols(&self) -> Vec<usize> {
        let union = self.rows.iter().fold(0, |a, &r| a | r);
        (0..self.n).filter(|&j| union >> j & 1 == 1).collect()
    }

    /// Swaps the roles of rows and columns.
    pub fn transpose(&self) -> ErasurePattern {
        let mut t = ErasurePattern {
            m: self.n,
            n: self.m,
            rows: vec![0; self.n],
        };
        for (i, j) in self.cells() {
            t.rows[j] |= 1 << i;
        }
        t
    }

    /// Number of erased cells in the subgrid `rows x cols` (given as a column mask).
    pub fn count_in(&self, rows: &[usize], cols: u64) -> usize {
        rows.iter().map(|&i| (self.rows[i] & cols).count_ones() as usize).sum()
    }
}

impl fmt::Display for ErasurePattern {
    /// Pattern file format: `m n`, then one 1-based `i j` line per erased cell.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m, self.n)?;
        for (i, j) in self.cells() {
            writeln!(f, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

impl FromStr for ErasurePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse_pair = |line: &str| -> Result<(usize, usize)> {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad integer in {line:?}"))))
                .collect::<Result<_>>()?;
            match nums[..] {
                [a, b] => Ok((a, b)),
                _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
            }
        };
        let header = lines.next().ok_or_else(|| Error::Parse("empty pattern file".into()))?;
        let (m, n) = parse_pair(header)?;
        let cells = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
        Self::from_one_based(m, n, &cells)
    }
}
