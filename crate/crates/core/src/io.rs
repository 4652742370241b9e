//! Text formats: matrices, codes, decode grids and witnesses.
//!
//! Blank lines and lines starting with `#` are ignored by every parser.

use std::str::FromStr;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::hmds::MdsWitness;
use crate::linalg::{Matrix, SetFamily};

fn content_lines(s: &str) -> impl Iterator<Item = &str> {
    s.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(t: &str) -> Result<usize> {
    t.parse().map_err(|_| Error::Parse(format!("bad integer {t:?}")))
}

impl FromStr for Matrix {
    type Err = Error;

    /// Field literal, then `rows cols`, then the entries row-major.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = content_lines(s);
        let field: FieldSpec = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()?;
        let dims: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::Parse("missing matrix dimensions".into()))?
            .split_whitespace()
            .map(parse_usize)
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse("dimension line must be \"rows cols\"".into()));
        };
        let entries = lines
            .flat_map(str::split_whitespace)
            .map(|t| field.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != rows * cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                entries.len()
            )));
        }
        Matrix::new(field, rows, cols, entries)
    }
}

impl FromStr for LinearCode {
    type Err = Error;

    /// A matrix file holding the generator. A `# code n=.. k=..` header, if
    /// present, must match the matrix.
    fn from_str(s: &str) -> Result<Self> {
        let generator: Matrix = s.parse()?;
        let header = s.lines().map(str::trim).find(|l| l.starts_with("# code"));
        if let Some(h) = header {
            for tok in h.trim_start_matches("# code").split_whitespace() {
                let (key, val) = tok
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad code header {h:?}")))?;
                let want = match key {
                    "n" => generator.cols(),
                    "k" => generator.rows(),
                    _ => return Err(Error::Parse(format!("unknown code header key {key:?}"))),
                };
                if parse_usize(val)? != want {
                    return Err(Error::Parse(format!("header {tok} does not match the generator")));
                }
            }
        }
        LinearCode::new(generator)
    }
}

/// A received grid: `None` marks an erased cell.
pub type Grid = Vec<Vec<Option<FieldElement>>>;

/// Parses `m` lines of `n` element literals, with `?` for erasures.
pub fn parse_grid(field: FieldSpec, s: &str) -> Result<Grid> {
    let grid = content_lines(s)
        .map(|line| {
            line.split_whitespace()
                .map(|t| match t {
                    "?" => Ok(None),
                    _ => field.parse_element(t).map(Some),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    if grid.iter().any(|r| r.len() != grid[0].len()) {
        return Err(Error::Parse("grid rows have different lengths".into()));
    }
    Ok(grid)
}

pub fn format_grid(field: FieldSpec, grid: &Grid) -> String {
    let mut out = String::new();
    for row in grid {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.map_or_else(|| "?".to_string(), |x| field.format_element(x)))
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the `A1: 1 2 3` lines of a set family on `n` points.
pub fn parse_family(n: usize, s: &str) -> Result<SetFamily> {
    let mut sets = Vec::new();
    for line in content_lines(s) {
        let Some((label, rest)) = line.split_once(':') else {
            continue;
        };
        let idx = label
            .strip_prefix('A')
            .map(parse_usize)
            .transpose()?;
        if idx != Some(sets.len() + 1) {
            continue;
        }
        let set = rest
            .split_whitespace()
            .map(|t| {
                parse_usize(t)?
                    .checked_sub(1)
                    .ok_or(Error::IndexOutOfRange { index: 0, bound: n })
            })
            .collect::<Result<Vec<_>>>()?;
        sets.push(set);
    }
    SetFamily::new(n, sets)
}

/// Parses a printed witness: the family lines plus `actual=.. generic=..`.
pub fn parse_witness(n: usize, s: &str) -> Result<MdsWitness> {
    let family = parse_family(n, s)?;
    let dims = content_lines(s)
        .find(|l| l.starts_with("actual="))
        .ok_or_else(|| Error::Parse("missing actual=/generic= line".into()))?;
    let mut actual = None;
    let mut generic = None;
    for tok in dims.split_whitespace() {
        match tok.split_once('=') {
            Some(("actual", v)) => actual = Some(parse_usize(v)?),
            Some(("generic", v)) => generic = Some(parse_usize(v)?),
            _ => return Err(Error::Parse(format!("bad token {tok:?}"))),
        }
    }
    match (actual, generic) {
        (Some(actual_dim), Some(generic_dim)) => Ok(MdsWitness {
            family,
            actual_dim,
            generic_dim,
        }),
        _ => Err(Error::Parse("witness needs both actual= and generic=".into())),
    }
}
