//! Two explicit families of vectors in `F_{p^2}^3` with partial MDS(3)
//! behaviour, and exhaustive checks of their intersection properties.
//!
//! Three planes in `F^3` meet nontrivially exactly when their normals are
//! linearly dependent, so every triple test is a 3x3 determinant.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::codes::is_mds_matrix;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg::Matrix;

pub type Vec3 = [FieldElement; 3];

fn cross(f: FieldSpec, u: &Vec3, v: &Vec3) -> Vec3 {
    let c = |a: FieldElement, b: FieldElement, x: FieldElement, y: FieldElement| f.sub(f.mul(a, b), f.mul(x, y));
    [
        c(u[1], v[2], u[2], v[1]),
        c(u[2], v[0], u[0], v[2]),
        c(u[0], v[1], u[1], v[0]),
    ]
}

fn det3(f: FieldSpec, a: &Vec3, b: &Vec3, c: &Vec3) -> FieldElement {
    f.add(
        f.add(
            f.mul(a[0], f.sub(f.mul(b[1], c[2]), f.mul(b[2], c[1]))),
            f.mul(a[1], f.sub(f.mul(b[2], c[0]), f.mul(b[0], c[2]))),
        ),
        f.mul(a[2], f.sub(f.mul(b[0], c[1]), f.mul(b[1], c[0]))),
    )
}

fn columns_matrix(f: FieldSpec, vecs: &[Vec3]) -> Matrix {
    Matrix::from_fn(f, 3, vecs.len(), |i, j| vecs[j][i])
}

/// Planes `W_{α,β} = span(u_α, v_β)` with `u_α = (α, -1, 0)` and
/// `v_β = (β + β²X, 0, -1)` for `α, β ∈ F_p`.
#[derive(Clone, Debug)]
pub struct BipartiteFamily {
    field: FieldSpec,
    u: Vec<Vec3>,
    v: Vec<Vec3>,
}

pub fn build_bipartite(p: u64) -> Result<BipartiteFamily> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let f = FieldSpec::quadratic_smallest(p)?;
    let x = f.x()?;
    let minus_one = f.neg(f.one());
    let u = (0..p)
        .map(|a| [f.from_u64(a), minus_one, f.zero()])
        .collect();
    let v = (0..p)
        .map(|b| {
            let b = f.from_u64(b);
            [f.add(b, f.mul(f.mul(b, b), x)), f.zero(), minus_one]
        })
        .collect();
    Ok(BipartiteFamily { field: f, u, v })
}

/// A triple of `(α, β)` index pairs.
pub type BipartiteTriple = [(u64, u64); 3];

impl BipartiteFamily {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn u(&self) -> &[Vec3] {
        &self.u
    }

    pub fn v(&self) -> &[Vec3] {
        &self.v
    }

    /// Normal `u_α x v_β` of the plane `W_{α,β}`.
    pub fn normal(&self, alpha: u64, beta: u64) -> Vec3 {
        cross(self.field, &self.u[alpha as usize], &self.v[beta as usize])
    }

    /// `W_{α,β}` as a 3x2 matrix.
    pub fn plane(&self, alpha: u64, beta: u64) -> Matrix {
        columns_matrix(self.field, &[self.u[alpha as usize], self.v[beta as usize]])
    }

    /// All `u` followed by all `v`, as columns.
    pub fn to_matrix(&self) -> Matrix {
        let all: Vec<Vec3> = self.u.iter().chain(&self.v).copied().collect();
        columns_matrix(self.field, &all)
    }

    /// Whether the three planes share a nonzero vector.
    pub fn triple_intersects(&self, t: &BipartiteTriple) -> bool {
        let n: Vec<Vec3> = t.iter().map(|&(a, b)| self.normal(a, b)).collect();
        det3(self.field, &n[0], &n[1], &n[2]).is_zero()
    }
}

/// Triples that should meet generically: a common `α`, a common `β`, or a
/// repeated pair.
pub fn is_degenerate_triple(t: &BipartiteTriple) -> bool {
    let same_alpha = t[0].0 == t[1].0 && t[1].0 == t[2].0;
    let same_beta = t[0].1 == t[1].1 && t[1].1 == t[2].1;
    let repeated = t[0] == t[1] || t[1] == t[2] || t[0] == t[2];
    same_alpha || same_beta || repeated
}

/// First triple of distinct pairs (lexicographic) that meets nontrivially
/// without being degenerate.
pub fn verify_bipartite(family: &BipartiteFamily) -> Option<BipartiteTriple> {
    let p = family.p();
    let pairs: Vec<(u64, u64)> = (0..p).cartesian_product(0..p).collect();
    let normals: Vec<Vec3> = pairs.iter().map(|&(a, b)| family.normal(a, b)).collect();
    let f = family.field;
    let count = pairs.len();
    (0..count).into_par_iter().find_map_first(|i| {
        for j in i + 1..count {
            for k in j + 1..count {
                let t = [pairs[i], pairs[j], pairs[k]];
                if det3(f, &normals[i], &normals[j], &normals[k]).is_zero() && !is_degenerate_triple(&t) {
                    return Some(t);
                }
            }
        }
        None
    })
}

/// The three-part family `U`, `V`, `W` over `F_p[X]/(X² - c)`.
#[derive(Clone, Debug)]
pub struct TripartiteFamily {
    field: FieldSpec,
    zeta: u64,
    nonresidue: u64,
    subgroup: Vec<u64>,
    u: Vec<Vec3>,
    v: Vec<Vec3>,
    w: Vec<Vec3>,
}

/// Elements of the cyclic subgroup generated by `h` in `F_p^*`, sorted.
fn generated_subgroup(p: u64, h: u64) -> Vec<u64> {
    let mut out = vec![1];
    let mut x = h % p;
    while x != 1 {
        out.push(x);
        x = (x as u128 * h as u128 % p as u128) as u64;
    }
    out.sort_unstable();
    out
}

/// Builds the family for `p ≡ 1 (mod 3)`. The subgroup is the cubes of
/// `F_p^*` when they avoid `ζ`; otherwise every subgroup of order `(p-1)/3`
/// is tried, and the construction fails if all of them contain `ζ`.
pub fn build_tripartite(p: u64) -> Result<TripartiteFamily> {
    let base = FieldSpec::prime(p)?;
    let zeta = base.cube_root_of_unity()?.a0();
    let order = ((p - 1) / 3) as usize;
    let mut cubes: Vec<u64> = (1..p).map(|x| base.pow(base.from_u64(x), 3).a0()).collect();
    cubes.sort_unstable();
    cubes.dedup();
    let subgroup = if cubes.binary_search(&zeta).is_err() {
        cubes
    } else {
        (1..p)
            .map(|h| generated_subgroup(p, h))
            .filter(|s| s.len() == order)
            .find(|s| s.binary_search(&zeta).is_err())
            .ok_or_else(|| {
                Error::NoConstruction(format!(
                    "every subgroup of F_{p}^* of order {order} contains the cube root of unity {zeta}"
                ))
            })?
    };
    let c = base.smallest_non_residue();
    let f = FieldSpec::quadratic(p, c)?;
    let x = f.x()?;
    let z = f.from_u64(zeta);
    let moment = |t: FieldElement| [f.one(), t, f.mul(t, t)];
    let u = subgroup.iter().map(|&a| moment(f.from_u64(a))).collect();
    let v = subgroup
        .iter()
        .map(|&b| moment(f.mul(z, f.from_u64(b))))
        .collect();
    let w = (1..=(p - 1) / 2)
        .map(|g| moment(f.mul(x, f.from_u64(g))))
        .collect();
    Ok(TripartiteFamily {
        field: f,
        zeta,
        nonresidue: c,
        subgroup,
        u,
        v,
        w,
    })
}

/// Ways the tripartite family can fail its checks. Indices are 0-based
/// positions within `U`, `V`, `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripartiteViolation {
    /// Some three vectors of `U ∪ V ∪ W` are dependent.
    UnionNotMds,
    Intersecting {
        u: (usize, usize),
        v: (usize, usize),
        w: (usize, usize),
    },
}

impl fmt::Display for TripartiteViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripartiteViolation::UnionNotMds => write!(f, "U ∪ V ∪ W is not MDS"),
            TripartiteViolation::Intersecting { u, v, w } => write!(
                f,
                "span(u{}, u{}) ∩ span(v{}, v{}) ∩ span(w{}, w{}) != 0",
                u.0 + 1,
                u.1 + 1,
                v.0 + 1,
                v.1 + 1,
                w.0 + 1,
                w.1 + 1
            ),
        }
    }
}

impl TripartiteFamily {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.subgroup
    }

    pub fn u(&self) -> &[Vec3] {
        &self.u
    }

    pub fn v(&self) -> &[Vec3] {
        &self.v
    }

    pub fn w(&self) -> &[Vec3] {
        &self.w
    }

    /// `U`, then `V`, then `W`, as columns.
    pub fn to_matrix(&self) -> Matrix {
        let all: Vec<Vec3> = self.u.iter().chain(&self.v).chain(&self.w).copied().collect();
        columns_matrix(self.field, &all)
    }
}

/// Checks that `U ∪ V ∪ W` is MDS and that every choice of two vectors from
/// each part spans planes with zero common intersection.
pub fn verify_tripartite(family: &TripartiteFamily) -> Option<TripartiteViolation> {
    if !is_mds_matrix(&family.to_matrix()) {
        return Some(TripartiteViolation::UnionNotMds);
    }
    let f = family.field;
    let normals = |vs: &[Vec3]| -> Vec<((usize, usize), Vec3)> {
        (0..vs.len())
            .tuple_combinations()
            .map(|(i, j)| ((i, j), cross(f, &vs[i], &vs[j])))
            .collect()
    };
    let (nu, nv, nw) = (normals(&family.u), normals(&family.v), normals(&family.w));
    nu.par_iter().find_map_first(|(u, a)| {
        for (v, b) in &nv {
            for (w, c) in &nw {
                if det3(f, a, b, c).is_zero() {
                    return Some(TripartiteViolation::Intersecting { u: *u, v: *v, w: *w });
                }
            }
        }
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{intersection_dim, SetFamily};

    #[test]
    fn bipartite_sizes_and_normals() {
        let fam = build_bipartite(5).unwrap();
        assert_eq!(fam.field().order(), 25);
        assert_eq!((fam.u().len(), fam.v().len()), (5, 5));
        let f = fam.field();
        for a in 0..5 {
            for b in 0..5 {
                let bf = f.from_u64(b);
                let expected = [f.one(), f.from_u64(a), f.add(bf, f.mul(f.mul(bf, bf), f.x().unwrap()))];
                assert_eq!(fam.normal(a, b), expected);
                assert_eq!(fam.plane(a, b).rank(), 2);
            }
        }
        assert!(build_bipartite(2).is_err());
        assert_eq!(build_bipartite(13).unwrap().field().order(), 169);
    }

    #[test]
    fn bipartite_small_primes() {
        for p in [3, 5, 7] {
            assert_eq!(verify_bipartite(&build_bipartite(p).unwrap()), None, "p={p}");
        }
    }

    #[test]
    fn determinant_matches_span_intersection() {
        let fam = build_bipartite(5).unwrap();
        let m = fam.to_matrix();
        for t in [[(1, 1), (1, 2), (1, 3)], [(0, 1), (2, 3), (4, 4)], [(0, 0), (1, 0), (3, 0)], [(1, 2), (2, 1), (3, 4)]] {
            // Columns: u_α at α, v_β at p + β.
            let sets = t.iter().map(|&(a, b)| vec![a as usize, 5 + b as usize]).collect();
            let dim = intersection_dim(&m, &SetFamily::new(10, sets).unwrap()).unwrap();
            assert_eq!(dim > 0, fam.triple_intersects(&t), "{t:?}");
            assert_eq!(dim > 0, is_degenerate_triple(&t), "{t:?}");
        }
    }

    #[test]
    fn bipartite_sides_are_collinear() {
        let fam = build_bipartite(7).unwrap();
        let u = columns_matrix(fam.field(), fam.u());
        let v = columns_matrix(fam.field(), fam.v());
        assert!(!is_mds_matrix(&u));
        assert!(!is_mds_matrix(&v));
    }

    #[test]
    fn tripartite_parameters() {
        let fam = build_tripartite(7).unwrap();
        assert_eq!((fam.zeta(), fam.nonresidue()), (2, 3));
        assert_eq!(fam.subgroup(), &[1, 6]);
        assert_eq!((fam.u().len(), fam.v().len(), fam.w().len()), (2, 2, 3));
        let fam = build_tripartite(13).unwrap();
        assert_eq!(fam.zeta(), 3);
        assert_eq!((fam.u().len(), fam.v().len(), fam.w().len()), (4, 4, 6));
        assert!(build_tripartite(11).is_err());
    }

    #[test]
    fn tripartite_small_primes() {
        for p in [7, 13] {
            assert_eq!(verify_tripartite(&build_tripartite(p).unwrap()), None, "p={p}");
        }
    }

    #[test]
    fn tripartite_needs_nine_not_dividing_p_minus_one() {
        for p in [7u64, 13, 19, 31, 37, 43, 61, 67, 73, 79] {
            assert_eq!(build_tripartite(p).is_ok(), (p - 1) % 9 != 0, "p={p}");
        }
    }
}
