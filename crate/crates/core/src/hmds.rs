//! Deciders for higher-order MDS properties.
//!
//! A code with generator `V` is MDS(l) when every family `A_1, ..., A_l` has
//! `dim(V_{A_1} ∩ ... ∩ V_{A_l})` equal to the same dimension for a generic
//! matrix. Cycle-MDS and weak-MDS restrict the quantifier to cycle families
//! and to disjoint families respectively.

use std::fmt;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{
    intersection_block_matrix, intersection_dim, intersection_dim_independent, GenericMatrix,
    Matrix, SetFamily, DEFAULT_GENERIC_TRIALS,
};

/// A family on which the code and a generic matrix disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsWitness {
    pub family: SetFamily,
    pub actual_dim: usize,
    pub generic_dim: usize,
}

impl fmt::Display for MdsWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        writeln!(f, "actual={} generic={}", self.actual_dim, self.generic_dim)
    }
}

/// Outcome of a decider.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MdsCheck {
    Holds,
    Fails(MdsWitness),
}

impl MdsCheck {
    pub fn holds(&self) -> bool {
        matches!(self, MdsCheck::Holds)
    }

    pub fn witness(&self) -> Option<&MdsWitness> {
        match self {
            MdsCheck::Holds => None,
            MdsCheck::Fails(w) => Some(w),
        }
    }

    fn from_witness(w: Option<MdsWitness>) -> Self {
        w.map_or(MdsCheck::Holds, MdsCheck::Fails)
    }
}

/// How the generic side is instantiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for GenericOptions {
    fn default() -> Self {
        GenericOptions {
            trials: DEFAULT_GENERIC_TRIALS,
            seed: 0x6d64_735f_6c61_62,
        }
    }
}

impl GenericOptions {
    fn sample(&self, k: usize, n: usize) -> GenericMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        GenericMatrix::sample(k, n, self.trials, &mut rng)
    }
}

fn check_ell(ell: usize) -> Result<()> {
    if ell < 2 {
        return Err(Error::Precondition(format!("order l={ell} must be at least 2")));
    }
    Ok(())
}

fn check_ground_set(n: usize) -> Result<()> {
    if n > 64 {
        return Err(Error::Precondition(format!("n={n} exceeds the supported 64")));
    }
    Ok(())
}

fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Compares actual and generic intersection dimension on one family.
pub fn check_family(
    code: &LinearCode,
    family: &SetFamily,
    opts: &GenericOptions,
) -> Result<Option<MdsWitness>> {
    let generic = opts.sample(code.k(), code.n());
    check_family_with(code.generator(), family, &generic)
}

fn check_family_with(
    v: &Matrix,
    family: &SetFamily,
    generic: &GenericMatrix,
) -> Result<Option<MdsWitness>> {
    let actual = intersection_dim(v, family)?;
    let generic_dim = generic.intersection_dim(family)?;
    Ok((actual != generic_dim).then(|| MdsWitness {
        family: family.clone(),
        actual_dim: actual,
        generic_dim,
    }))
}

/// Family check for sets known to be independent (MDS code, sizes <= k).
/// Generic matrices never have larger intersections, so the generic side is
/// only sampled when the actual intersection is nonzero.
fn check_independent(
    v: &Matrix,
    sets: Vec<Vec<usize>>,
    generic: &GenericMatrix,
) -> Option<MdsWitness> {
    let actual = intersection_dim_independent(v, &sets);
    if actual == 0 {
        return None;
    }
    let family = SetFamily::from_sorted_unchecked(v.cols(), sets);
    let generic_dim = generic
        .intersection_dim(&family)
        .expect("family matches the generic matrix");
    (actual != generic_dim).then_some(MdsWitness {
        family,
        actual_dim: actual,
        generic_dim,
    })
}

/// An order-2 witness for a code that is not MDS.
///
/// With a dependent `k`-set `A` and a nonzero column `d` in the support of a
/// dependency, `({d}, A \ {d})` meets in `span(v_d)` while generically the
/// intersection is zero. A zero column `d` gives `({d}, {d})` instead, whose
/// actual dimension falls short of the generic one.
fn mds_failure(code: &LinearCode, generic: &GenericMatrix) -> Option<MdsWitness> {
    let dep = code.first_dependent_set()?;
    let v = code.generator();
    let sub = v.select_columns(&dep).expect("indices in range");
    let relation = sub.kernel().column(0);
    let nonzero_col = |j: usize| v.column(j).iter().any(|x| !x.is_zero());
    let sets = match dep
        .iter()
        .zip(&relation)
        .find(|(&j, c)| !c.is_zero() && nonzero_col(j))
    {
        Some((&d, _)) => vec![vec![d], dep.iter().copied().filter(|&j| j != d).collect()],
        None => {
            let d = (0..code.n()).find(|&j| !nonzero_col(j)).expect("zero column");
            vec![vec![d], vec![d]]
        }
    };
    let family = SetFamily::new(code.n(), sets).expect("valid family");
    check_family_with(v, &family, generic).expect("dimensions agree")
}

/// Non-decreasing size compositions of `total` into `parts` values in `1..=k`,
/// in lexicographic order.
fn sorted_compositions(total: usize, parts: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, min: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in min..=k.min(total) {
            if s * parts > total || k * parts < total {
                continue;
            }
            cur.push(s);
            rec(total - s, parts - 1, s, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, 1, k, &mut Vec::new(), &mut out);
    out
}

/// Enumerator for reduced families. Each family is produced once up to
/// reordering: sizes are non-decreasing and equal-size neighbours are in
/// lexicographic order. Empty sets are skipped since they meet in zero.
struct ReducedFamilies {
    n: usize,
    subsets_by_size: Vec<Vec<u64>>,
}

impl ReducedFamilies {
    fn new(n: usize, k: usize) -> Self {
        let subsets_by_size = (0..=k)
            .map(|s| {
                (0..n)
                    .combinations(s)
                    .map(|c| c.iter().fold(0u64, |m, &i| m | 1 << i))
                    .collect()
            })
            .collect();
        ReducedFamilies { n, subsets_by_size }
    }

    /// Depth-first search over families extending `chosen` (indices into
    /// `subsets_by_size`). `running` is a column basis of the intersection of
    /// the chosen spans; subtrees where it is zero are skipped, and leaves are
    /// passed to `visit` only when the final intersection is nonzero.
    fn search<T>(
        &self,
        v: &Matrix,
        sizes: &[usize],
        chosen: &mut Vec<usize>,
        common: u64,
        running: &Matrix,
        visit: &mut impl FnMut(&[u64]) -> Option<T>,
    ) -> Option<T> {
        let depth = chosen.len();
        let s = sizes[depth];
        let start = if sizes[depth - 1] == s { chosen[depth - 1] } else { 0 };
        let last = depth + 1 == sizes.len();
        for idx in start..self.subsets_by_size[s].len() {
            let mask = self.subsets_by_size[s][idx];
            if last && common & mask != 0 {
                continue;
            }
            let span = v.select_columns(&mask_to_set(mask)).expect("in range");
            let stacked = running.hstack(&span).expect("same field and height");
            chosen.push(idx);
            let found = if last {
                if stacked.rank() < stacked.cols() {
                    let masks: Vec<u64> = chosen
                        .iter()
                        .zip(sizes)
                        .map(|(&i, &s)| self.subsets_by_size[s][i])
                        .collect();
                    visit(&masks)
                } else {
                    None
                }
            } else {
                let next = meet(running, &stacked);
                if next.cols() == 0 {
                    None
                } else {
                    self.search(v, sizes, chosen, common & mask, &next, visit)
                }
            };
            chosen.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }
}

/// Decides MDS(l) with default generic options.
pub fn is_mds_ell(code: &LinearCode, ell: usize) -> Result<MdsCheck> {
    is_mds_ell_with(code, ell, &GenericOptions::default())
}

/// Reduced families (Σ|A_i| = (l-1)k, |A_i| <= k, empty common intersection)
/// are checked order by order. For an MDS code a set of size `k` spans
/// everything and drops out of the intersection, so families containing one
/// are exactly the families of the order below; each order therefore only
/// enumerates sizes below `k`. Order 2 then reduces to the MDS property.
pub fn is_mds_ell_with(code: &LinearCode, ell: usize, opts: &GenericOptions) -> Result<MdsCheck> {
    check_ell(ell)?;
    check_ground_set(code.n())?;
    let (n, k) = (code.n(), code.k());
    let generic = opts.sample(k, n);
    if let Some(w) = mds_failure(code, &generic) {
        return Ok(MdsCheck::Fails(w));
    }
    let fams = ReducedFamilies::new(n, k);
    let v = code.generator();
    for order in 3..=ell {
        let Some(w) = search_order(v, &fams, order, &generic) else {
            continue;
        };
        // Pad with full sets so that the witness has the requested order.
        let mut sets = w.family.sets().to_vec();
        sets.resize(ell, (0..k).collect());
        let family = SetFamily::from_sorted_unchecked(n, sets);
        let w = check_family_with(v, &family, &generic)?.expect("full sets leave dimensions unchanged");
        return Ok(MdsCheck::Fails(w));
    }
    Ok(MdsCheck::Holds)
}

fn search_order(v: &Matrix, fams: &ReducedFamilies, ell: usize, generic: &GenericMatrix) -> Option<MdsWitness> {
    let k = v.rows();
    let mut chunks = Vec::new();
    for sizes in sorted_compositions((ell - 1) * k, ell, k - 1) {
        for first in 0..fams.subsets_by_size[sizes[0]].len() {
            chunks.push((sizes.clone(), first));
        }
    }
    chunks.par_iter().find_map_first(|(sizes, first)| {
        let mut chosen = vec![*first];
        let mask = fams.subsets_by_size[sizes[0]][*first];
        let running = v.select_columns(&mask_to_set(mask)).expect("in range");
        fams.search(v, sizes, &mut chosen, mask & fams.full_mask(), &running, &mut |masks| {
            let sets = masks.iter().map(|&m| mask_to_set(m)).collect();
            check_independent(v, sets, generic)
        })
    })
}

/// Column basis of `span(w) ∩ span(b)` given `stacked = [w | b]`, where `w`
/// has independent columns.
fn meet(w: &Matrix, stacked: &Matrix) -> Matrix {
    let ker = stacked.kernel();
    let d = w.cols();
    let coeffs = ker
        .select_rows(&(0..d).collect::<Vec<_>>())
        .expect("in range");
    w.mul(&coeffs).expect("shapes agree")
}

/// The `2l` symmetries of the cycle `Z_l` acting on set indices.
fn dihedral_maps(ell: usize) -> Vec<Vec<usize>> {
    let mut maps = Vec::with_capacity(2 * ell);
    for r in 0..ell {
        maps.push((0..ell).map(|i| (i + r) % ell).collect());
        maps.push((0..ell).map(|i| (r + ell - i) % ell).collect());
    }
    maps
}

/// Index sets `T` that are nonempty proper intervals of `Z_l`.
fn proper_intervals(ell: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for len in 1..ell {
        for start in 0..ell {
            out.push((0..len).fold(0u64, |m, d| m | 1 << ((start + d) % ell)));
        }
    }
    out
}

struct CycleSearch<'a> {
    n: usize,
    k: usize,
    /// Number of sets in the families being enumerated.
    order: usize,
    /// The `l` being decided; `order < top_order` for stripped families.
    top_order: usize,
    budget: usize,
    /// `false` for the top order, where only maximal families are checked;
    /// `true` for stripped families, which must admit full sets in a gap.
    stripped: bool,
    choices: Vec<u64>,
    maps: Vec<Vec<usize>>,
    v: &'a Matrix,
    generic: &'a GenericMatrix,
}

impl<'a> CycleSearch<'a> {
    fn new(code: &'a LinearCode, generic: &'a GenericMatrix, order: usize, top_order: usize) -> Self {
        let mut choices = vec![0u64];
        choices.extend(proper_intervals(order));
        CycleSearch {
            n: code.n(),
            k: code.k(),
            order,
            top_order,
            budget: (order - 1) * code.k(),
            stripped: order < top_order,
            choices,
            maps: dihedral_maps(order),
            v: code.generator(),
            generic,
        }
    }

    fn is_canonical(&self, masks: &[u64]) -> bool {
        self.maps.iter().all(|map| {
            let mut image = vec![0u64; self.order];
            for (i, &m) in masks.iter().enumerate() {
                image[map[i]] = m;
            }
            masks <= &image[..]
        })
    }

    /// Violation check: the code's intersection is nonzero where the
    /// generic one is zero.
    fn violates(&self, sets: &[Vec<usize>]) -> bool {
        if intersection_dim_independent(self.v, sets) == 0 {
            return false;
        }
        let family = SetFamily::from_sorted_unchecked(self.n, sets.to_vec());
        self.generic.intersection_dim(&family).expect("family matches the generic matrix") == 0
    }

    /// A gap `g` (between sets `g` and `g+1`) and a `k`-set that can be
    /// inserted there: it must contain every element whose arc crosses the
    /// gap and may only use elements whose arc touches it or that are unused.
    fn full_set_slot(&self, masks: &[u64]) -> Option<(usize, Vec<usize>)> {
        let r = self.order;
        (0..r).find_map(|g| {
            let h = (g + 1) % r;
            let mut forced = Vec::new();
            let mut optional = Vec::new();
            for j in 0..self.n {
                let in_g = masks[g] >> j & 1 == 1;
                let in_h = masks[h] >> j & 1 == 1;
                let used = masks.iter().any(|m| m >> j & 1 == 1);
                if in_g && in_h {
                    forced.push(j);
                } else if in_g || in_h || !used {
                    optional.push(j);
                }
            }
            if forced.len() > self.k || forced.len() + optional.len() < self.k {
                return None;
            }
            let need = self.k - forced.len();
            forced.extend(optional.into_iter().take(need));
            forced.sort_unstable();
            Some((g, forced))
        })
    }

    /// For an MDS code, two disjoint sets of total size at most `k` already
    /// meet in zero.
    fn trivially_zero(&self, masks: &[u64]) -> bool {
        masks.iter().tuple_combinations().any(|(a, b)| {
            a & b == 0 && (a.count_ones() + b.count_ones()) as usize <= self.k
        })
    }

    fn leaf(&self, masks: &[u64], total: usize, skipped: bool) -> Option<Vec<Vec<usize>>> {
        if !self.stripped && total != self.budget && skipped {
            return None;
        }
        if self.trivially_zero(masks) {
            return None;
        }
        if !self.is_canonical(masks) {
            return None;
        }
        let sets: Vec<Vec<usize>> = masks.iter().map(|&m| mask_to_set(m)).collect();
        if !self.stripped {
            return self.violates(&sets).then_some(sets);
        }
        let (g, full) = self.full_set_slot(masks)?;
        if !self.violates(&sets) {
            return None;
        }
        let mut out = sets;
        let fill = std::iter::repeat_n(full, self.top_order - self.order);
        out.splice(g + 1..g + 1, fill);
        Some(out)
    }

    /// `skipped` records whether some earlier element was left out of every
    /// set.
    fn dfs(&self, elem: usize, masks: &mut [u64], total: usize, skipped: bool) -> Option<Vec<Vec<usize>>> {
        if elem == self.n || (!self.stripped && total == self.budget) {
            return self.leaf(masks, total, skipped);
        }
        let room = (self.n - elem - 1) * (self.order - 1);
        for &t in &self.choices {
            let add = t.count_ones() as usize;
            if total + add > self.budget {
                continue;
            }
            let now_skipped = skipped || t == 0;
            if !self.stripped && now_skipped && total + add + room < self.budget {
                continue;
            }
            let fits = (0..self.order)
                .all(|i| t >> i & 1 == 0 || (masks[i].count_ones() as usize) + 1 < self.k);
            if !fits {
                continue;
            }
            for (i, m) in masks.iter_mut().enumerate() {
                if t >> i & 1 == 1 {
                    *m |= 1 << elem;
                }
            }
            let found = self.dfs(elem + 1, masks, total + add, now_skipped);
            for m in masks.iter_mut() {
                *m &= !(1 << elem);
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Splits the search on the choices for the first two elements.
    fn run(&self) -> Option<Vec<Vec<usize>>> {
        let depth = self.n.min(2);
        let prefixes: Vec<Vec<u64>> = (0..depth)
            .map(|_| self.choices.iter().copied())
            .multi_cartesian_product()
            .collect();
        prefixes.par_iter().find_map_first(|prefix| {
            let mut masks = vec![0u64; self.order];
            let mut total = 0;
            for (elem, &t) in prefix.iter().enumerate() {
                for (i, m) in masks.iter_mut().enumerate() {
                    if t >> i & 1 == 1 {
                        *m |= 1 << elem;
                    }
                }
                total += t.count_ones() as usize;
            }
            if total > self.budget || masks.iter().any(|m| m.count_ones() as usize >= self.k) {
                return None;
            }
            self.dfs(depth, &mut masks, total, prefix.contains(&0))
        })
    }
}

/// Drops whole elements while the violation persists; the result is still a
/// cycle family.
fn shrink_cycle_witness(v: &Matrix, generic: &GenericMatrix, mut sets: Vec<Vec<usize>>) -> MdsWitness {
    let n = v.cols();
    let violates = |sets: &[Vec<usize>]| {
        let family = SetFamily::from_sorted_unchecked(n, sets.to_vec());
        intersection_dim(v, &family).expect("valid family") > 0
            && generic.intersection_dim(&family).expect("valid family") == 0
    };
    for j in 0..n {
        let without: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| s.iter().copied().filter(|&x| x != j).collect())
            .collect();
        if without != sets && violates(&without) {
            sets = without;
        }
    }
    let family = SetFamily::from_sorted_unchecked(n, sets);
    MdsWitness {
        actual_dim: intersection_dim(v, &family).expect("valid family"),
        generic_dim: 0,
        family,
    }
}

/// Decides cycle-MDS(l) with default generic options.
pub fn is_cycle_mds_ell(code: &LinearCode, ell: usize) -> Result<MdsCheck> {
    is_cycle_mds_ell_with(code, ell, &GenericOptions::default())
}

/// Cycle families assign each element `j` the index set `T_j = {i : j in S_i}`,
/// which must be empty or an interval of `Z_l` (never all of it, so the sets
/// share no element). Sizes satisfy `|S_i| <= k` and `Σ|S_i| <= (l-1)k`.
///
/// A violation is a family whose intersection is nonzero while the generic
/// one is zero. Two reductions keep the search small:
///
/// * A violating family with spare room and an unused element can be padded
///   by that element in a single set (a one-point interval) keeping the
///   generic intersection zero, so only families of total `(l-1)k` or using
///   every element are checked.
/// * A set of size `k` spans everything for an MDS code. Removing such sets
///   leaves a shorter cycle family with the same intersections, so families
///   with `r < l` sets of size below `k` are searched separately, keeping
///   those into which full sets can be inserted in some gap.
pub fn is_cycle_mds_ell_with(code: &LinearCode, ell: usize, opts: &GenericOptions) -> Result<MdsCheck> {
    check_ell(ell)?;
    check_ground_set(code.n())?;
    let (n, k) = (code.n(), code.k());
    let generic = opts.sample(k, n);
    if let Some(w) = mds_failure(code, &generic) {
        return Ok(MdsCheck::Fails(w));
    }
    let found = (2..=ell)
        .rev()
        .find_map(|order| CycleSearch::new(code, &generic, order, ell).run());
    Ok(MdsCheck::from_witness(
        found.map(|sets| shrink_cycle_witness(code.generator(), &generic, sets)),
    ))
}

/// Decides weak-MDS(l): every `l` pairwise-disjoint sets with `|S_i| <= k`
/// and `Σ|S_i| <= (l-1)k` meet in zero. Generically such sets always meet in
/// zero, so no sampling is needed.
///
/// Intersections only grow when sets grow, so it suffices to check families
/// that cannot be extended: total `(l-1)k` or every element used. A violation
/// found there is shrunk greedily to a minimal one.
pub fn is_weak_mds_ell(code: &LinearCode, ell: usize) -> Result<MdsCheck> {
    check_ell(ell)?;
    check_ground_set(code.n())?;
    let (n, k) = (code.n(), code.k());
    let budget = (ell - 1) * k;
    let v = code.generator();

    // Labels in restricted-growth order enumerate unordered families once.
    fn dfs(
        elem: usize,
        labels: &mut Vec<Option<usize>>,
        sizes: &mut Vec<usize>,
        used: usize,
        ctx: &(usize, usize, usize, usize, &Matrix),
    ) -> Option<Vec<Vec<usize>>> {
        let (n, k, ell, budget, v) = *ctx;
        let total: usize = sizes.iter().sum();
        if elem == n || total == budget {
            let all_used = labels.iter().all(Option::is_some) && elem == n;
            if used < ell || !(total == budget || all_used) {
                return None;
            }
            let mut sets = vec![Vec::new(); ell];
            for (j, l) in labels.iter().enumerate() {
                if let Some(l) = l {
                    sets[*l].push(j);
                }
            }
            let family = SetFamily::from_sorted_unchecked(n, sets.clone());
            let dim = intersection_dim(v, &family).expect("valid family");
            return (dim > 0).then_some(sets);
        }
        if used + (n - elem) < ell {
            return None;
        }
        let mut options: Vec<Option<usize>> = vec![None];
        options.extend((0..(used + 1).min(ell)).map(Some));
        for opt in options {
            if let Some(l) = opt {
                if sizes[l] == k {
                    continue;
                }
                sizes[l] += 1;
            }
            labels.push(opt);
            let next_used = if opt == Some(used) { used + 1 } else { used };
            let found = dfs(elem + 1, labels, sizes, next_used, ctx);
            labels.pop();
            if let Some(l) = opt {
                sizes[l] -= 1;
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }

    let ctx = (n, k, ell, budget, v);
    let Some(sets) = dfs(0, &mut Vec::new(), &mut vec![0; ell], 0, &ctx) else {
        return Ok(MdsCheck::Holds);
    };
    let mut sets = sets;
    let dim_of = |sets: &Vec<Vec<usize>>| {
        intersection_dim(v, &SetFamily::from_sorted_unchecked(n, sets.clone())).expect("valid family")
    };
    for i in 0..ell {
        let mut idx = 0;
        while idx < sets[i].len() {
            let removed = sets[i].remove(idx);
            if dim_of(&sets) == 0 {
                sets[i].insert(idx, removed);
                idx += 1;
            }
        }
    }
    let actual = dim_of(&sets);
    Ok(MdsCheck::Fails(MdsWitness {
        family: SetFamily::from_sorted_unchecked(n, sets),
        actual_dim: actual,
        generic_dim: 0,
    }))
}

/// Grows a family with zero intersection to total size `(l-1)k`, keeping the
/// intersection zero, by adding fresh elements one at a time.
///
/// Each step reads the block matrix of the intersection formula, finds the
/// first coordinate block `j` whose supported subspace has dimension below
/// `k`, and adds the smallest unused element to the set owning that block.
pub fn pad_sets(code: &LinearCode, family: &SetFamily) -> Result<SetFamily> {
    let (n, k, ell) = (code.n(), code.k(), family.len());
    check_ell(ell)?;
    if family.n() != n {
        return Err(Error::DimensionMismatch("family ground set".into()));
    }
    if family.sets().iter().any(|s| s.len() > k) {
        return Err(Error::Precondition("a set exceeds k elements".into()));
    }
    let target = (ell - 1) * k;
    if family.total_size() > target {
        return Err(Error::Precondition("total size exceeds (l-1)k".into()));
    }
    if n < target {
        return Err(Error::Precondition(format!("n={n} is smaller than (l-1)k={target}")));
    }
    if !code.is_mds() {
        return Err(Error::Precondition("padding needs an MDS code".into()));
    }
    let v = code.generator();
    if intersection_dim(v, family)? != 0 {
        return Err(Error::Precondition("the family has a nonzero intersection".into()));
    }
    let mut sets = family.sets().to_vec();
    let mut used = vec![false; n];
    for &x in sets.iter().flatten() {
        used[x] = true;
    }
    while sets.iter().map(Vec::len).sum::<usize>() < target {
        let block = intersection_block_matrix(v, &sets);
        let full = block.rank();
        let all_rows: Vec<usize> = (0..block.rows()).collect();
        let j = (0..ell - 1)
            .find(|&j| {
                let rest: Vec<usize> = all_rows
                    .iter()
                    .copied()
                    .filter(|r| r / k != j)
                    .collect();
                let supported = full - block.select_rows(&rest).expect("rows in range").rank();
                supported < k
            })
            .expect("some block is deficient while the total is below (l-1)k");
        let fresh = (0..n).find(|&x| !used[x]).expect("n >= (l-1)k leaves a fresh element");
        used[fresh] = true;
        let set = &mut sets[j + 1];
        set.push(fresh);
        set.sort_unstable();
    }
    let padded = SetFamily::new(n, sets)?;
    debug_assert_eq!(intersection_dim(v, &padded)?, 0);
    Ok(padded)
}

/// Randomized search for a weak-MDS(l) violation.
///
/// `[n]` is cut into `l` consecutive blocks of size `floor(n/l)` (trailing
/// elements unused). Each sample draws a nonzero `x ∈ F^k` and looks in
/// every block for a `(k-1)`-subset whose span contains `x`. Success yields
/// `l` disjoint sets of total size `l(k-1) <= (l-1)k` all containing `x`.
pub fn find_violation(code: &LinearCode, ell: usize, samples: usize, seed: u64) -> Result<Option<MdsWitness>> {
    let (n, k) = (code.n(), code.k());
    check_ell(ell)?;
    if ell > k {
        return Err(Error::Precondition(format!("need l <= k, got l={ell}, k={k}")));
    }
    let f = code.field();
    let v = code.generator();
    let s = n / ell;
    // For each block: (subset, annihilator rows) pairs; x is in the span iff
    // every annihilator row is orthogonal to x.
    let blocks: Vec<Vec<(Vec<usize>, Matrix)>> = (0..ell)
        .map(|b| {
            (b * s..(b + 1) * s)
                .combinations(k - 1)
                .map(|sub| {
                    let ann = v.select_columns(&sub).expect("in range").left_kernel().transpose();
                    (sub, ann)
                })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x: Vec<FieldElement> = (0..k).map(|_| f.random(&mut rng)).collect();
        if x.iter().all(|c| c.is_zero()) {
            continue;
        }
        let mut chosen = Vec::with_capacity(ell);
        for block in &blocks {
            let hit = block.iter().find(|(_, ann)| {
                ann.apply(&x).expect("lengths agree").iter().all(|c| c.is_zero())
            });
            match hit {
                Some((sub, _)) => chosen.push(sub.clone()),
                None => break,
            }
        }
        if chosen.len() < ell {
            continue;
        }
        let family = SetFamily::new(n, chosen)?;
        let actual = intersection_dim(v, &family)?;
        if actual == 0 {
            continue;
        }
        // Disjoint sets within the weak-MDS size bounds meet generically in zero.
        return Ok(Some(MdsWitness {
            family,
            actual_dim: actual,
            generic_dim: 0,
        }));
    }
    Ok(None)
}
