//! Regularity of erasure patterns and its max-flow test.
//!
//! `E` is regular for `(a, b)` when `|E ∩ (S x T)| <= |S| b + |T| a - ab`
//! for every `S` with `|S| >= a` and `T` with `|T| >= b`. Regularity is
//! equivalent to excess-compatibility, which is a family of max-flow problems.

use std::collections::VecDeque;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pattern::ErasurePattern;

/// A directed network with integral capacities.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    // Arc 2k is the k-th added arc, arc 2k+1 its residual reverse.
    to: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

/// Maximum flow with a per-arc assignment and the source side of a min cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: u64,
    /// Flow on each arc, in the order the arcs were added.
    pub arc_flows: Vec<u64>,
    /// Nodes reachable from the source in the final residual network.
    pub source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes {
            return Err(Error::IndexOutOfRange {
                index: source.max(sink),
                bound: nodes,
            });
        }
        if source == sink {
            return Err(Error::Precondition("source and sink coincide".into()));
        }
        Ok(FlowNetwork {
            nodes,
            source,
            sink,
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: u64) -> Result<usize> {
        if from >= self.nodes || to >= self.nodes {
            return Err(Error::IndexOutOfRange {
                index: from.max(to),
                bound: self.nodes,
            });
        }
        if to == self.source || from == self.sink {
            return Err(Error::Precondition("arcs may not enter the source or leave the sink".into()));
        }
        let id = self.to.len();
        self.to.extend([to, from]);
        self.cap.extend([capacity, 0]);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        Ok(id / 2)
    }

    /// Arcs as `(from, to, capacity)` in insertion order.
    pub fn arcs(&self) -> Vec<(usize, usize, u64)> {
        (0..self.to.len() / 2)
            .map(|k| (self.to[2 * k + 1], self.to[2 * k], self.cap[2 * k]))
            .collect()
    }

    /// Dinic's algorithm.
    pub fn max_flow(&self) -> MaxFlow {
        let mut residual = self.cap.clone();
        let mut value = 0;
        let mut level = vec![usize::MAX; self.nodes];
        loop {
            self.bfs_levels(&residual, &mut level);
            if level[self.sink] == usize::MAX {
                break;
            }
            let mut next = vec![0usize; self.nodes];
            loop {
                let pushed = self.augment(self.source, u64::MAX, &mut residual, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
        let arc_flows: Vec<u64> = (0..self.to.len() / 2).map(|k| residual[2 * k + 1]).collect();
        let source_side = level.iter().map(|&l| l != usize::MAX).collect();
        let result = MaxFlow {
            value,
            arc_flows,
            source_side,
        };
        debug_assert!(self.is_valid_flow(&result));
        result
    }

    fn bfs_levels(&self, residual: &[u64], level: &mut [usize]) {
        level.fill(usize::MAX);
        level[self.source] = 0;
        let mut queue = VecDeque::from([self.source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if residual[e] > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    fn augment(&self, u: usize, limit: u64, residual: &mut [u64], level: &[usize], next: &mut [usize]) -> u64 {
        if u == self.sink {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.to[e];
            if residual[e] > 0 && level[v] == level[u] + 1 {
                let pushed = self.augment(v, limit.min(residual[e]), residual, level, next);
                if pushed > 0 {
                    residual[e] -= pushed;
                    residual[e ^ 1] += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Capacity and conservation constraints, and value = net outflow of the source.
    pub fn is_valid_flow(&self, flow: &MaxFlow) -> bool {
        let mut balance = vec![0i128; self.nodes];
        for (k, (from, to, cap)) in self.arcs().into_iter().enumerate() {
            let f = flow.arc_flows[k];
            if f > cap {
                return false;
            }
            balance[from] -= f as i128;
            balance[to] += f as i128;
        }
        (0..self.nodes)
            .filter(|&v| v != self.source && v != self.sink)
            .all(|v| balance[v] == 0)
            && -balance[self.source] == flow.value as i128
            && balance[self.sink] == flow.value as i128
    }
}

/// A rectangle `S x T` on which the regularity inequality fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityViolation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl fmt::Display for RegularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).join(" ");
        writeln!(f, "S: {}", one_based(&self.rows))?;
        writeln!(f, "T: {}", one_based(&self.cols))
    }
}

/// How `is_regular_naive_with` enumerates rectangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NaiveMode {
    /// For each `S`, only the `T` maximizing the excess over the bound.
    #[default]
    Pruned,
    /// Every `S` and every `T`.
    Exhaustive,
}

fn mask_elems(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&b| mask >> b & 1 == 1).collect()
}

/// `|E ∩ (S x T)| <= sb + ta - ab`.
pub fn rectangle_bound_holds(e: &ErasurePattern, rows: &[usize], cols: &[usize], a: usize, b: usize) -> bool {
    let col_mask = cols.iter().fold(0u64, |m, &j| m | 1 << j);
    let (s, t) = (rows.len(), cols.len());
    e.count_in(rows, col_mask) + a * b <= s * b + t * a
}

/// The complement form `|Ē ∩ (S x T)| >= (s - a)(t - b)`.
pub fn complement_bound_holds(e: &ErasurePattern, rows: &[usize], cols: &[usize], a: usize, b: usize) -> bool {
    let col_mask = cols.iter().fold(0u64, |m, &j| m | 1 << j);
    let (s, t) = (rows.len() as i64, cols.len() as i64);
    let kept = e.complement().count_in(rows, col_mask) as i64;
    kept >= (s - a as i64) * (t - b as i64)
}

/// Naive regularity check over all rectangles with `|S| >= a`, `|T| >= b`.
pub fn is_regular_naive(e: &ErasurePattern, a: usize, b: usize) -> Result<Option<RegularityViolation>> {
    is_regular_naive_with(e, a, b, NaiveMode::default())
}

/// Row sets are visited in increasing bitmask order; the first violating
/// one is reported. The pruned mode pairs it with the `T` that maximizes
/// `Σ_{j∈T} (deg_S(j) - a)`: the `b` largest column degrees plus any further
/// column with degree above `a`.
pub fn is_regular_naive_with(
    e: &ErasurePattern,
    a: usize,
    b: usize,
    mode: NaiveMode,
) -> Result<Option<RegularityViolation>> {
    let (m, n) = (e.m(), e.n());
    if m > 24 || (mode == NaiveMode::Exhaustive && n > 24) {
        return Err(Error::Precondition("grid too large for naive enumeration".into()));
    }
    for s_mask in 0u64..1 << m {
        let rows = mask_elems(s_mask, m);
        if rows.len() < a {
            continue;
        }
        match mode {
            NaiveMode::Exhaustive => {
                for t_mask in 0u64..1 << n {
                    if (t_mask.count_ones() as usize) < b {
                        continue;
                    }
                    let cols = mask_elems(t_mask, n);
                    if !rectangle_bound_holds(e, &rows, &cols, a, b) {
                        return Ok(Some(RegularityViolation { rows, cols }));
                    }
                }
            }
            NaiveMode::Pruned => {
                if b > n {
                    continue;
                }
                let mut degs: Vec<(usize, usize)> = (0..n)
                    .map(|j| (rows.iter().filter(|&&i| e.contains(i, j)).count(), j))
                    .collect();
                degs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
                let mut cols: Vec<usize> = degs
                    .iter()
                    .enumerate()
                    .filter(|(rank, (d, _))| *rank < b || *d > a)
                    .map(|(_, &(_, j))| j)
                    .collect();
                cols.sort_unstable();
                if !rectangle_bound_holds(e, &rows, &cols, a, b) {
                    return Ok(Some(RegularityViolation { rows, cols }));
                }
            }
        }
    }
    Ok(None)
}

/// Row excesses `e(i) = max(deg(i) - b, 0)` and the column demand `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcessProfile {
    pub excess: Vec<usize>,
    pub demand: usize,
}

impl ExcessProfile {
    pub fn of(e: &ErasurePattern, a: usize, b: usize) -> Self {
        ExcessProfile {
            excess: (0..e.m()).map(|i| e.row_degree(i).saturating_sub(b)).collect(),
            demand: a,
        }
    }

    pub fn total(&self) -> usize {
        self.excess.iter().sum()
    }
}

/// A column set `V` with no `V`-excess flow, and a set of rows `U` whose
/// excess exceeds what the columns of `V` can absorb.
///
/// When `transposed` is set, the test ran on the transposed grid: `columns`
/// then lists grid rows and `rows` grid columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallBlocker {
    pub columns: Vec<usize>,
    pub rows: Vec<usize>,
    pub transposed: bool,
}

impl fmt::Display for HallBlocker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).join(" ");
        let (v_name, u_name) = if self.transposed {
            ("V (rows)", "U (columns)")
        } else {
            ("V (columns)", "U (rows)")
        };
        writeln!(f, "{v_name}: {}", one_based(&self.columns))?;
        writeln!(f, "{u_name}: {}", one_based(&self.rows))
    }
}

/// Outcome of an excess-compatibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExcessCheck {
    Compatible,
    Blocked(HallBlocker),
}

impl ExcessCheck {
    pub fn is_compatible(&self) -> bool {
        matches!(self, ExcessCheck::Compatible)
    }
}

/// The network for one column set `V`: source, rows, columns of `V`, sink.
pub fn excess_network(e: &ErasurePattern, a: usize, b: usize, v: &[usize]) -> Result<FlowNetwork> {
    let m = e.m();
    let profile = ExcessProfile::of(e, a, b);
    let (s, t) = (0, m + v.len() + 1);
    let mut net = FlowNetwork::new(m + v.len() + 2, s, t)?;
    for (i, &ex) in profile.excess.iter().enumerate() {
        net.add_arc(s, 1 + i, ex as u64)?;
    }
    for i in 0..m {
        for (jj, &j) in v.iter().enumerate() {
            if e.contains(i, j) {
                net.add_arc(1 + i, 1 + m + jj, 1)?;
            }
        }
    }
    for jj in 0..v.len() {
        net.add_arc(1 + m + jj, t, a as u64)?;
    }
    Ok(net)
}

/// The blocker inequality `Σ_{i∈U} e(i) > Σ_{j∈V} min(a, deg_{E∩(U x V)}(j))`.
pub fn is_hall_blocker(e: &ErasurePattern, a: usize, b: usize, v: &[usize], u: &[usize]) -> bool {
    let profile = ExcessProfile::of(e, a, b);
    let lhs: usize = u.iter().map(|&i| profile.excess[i]).sum();
    let rhs: usize = v
        .iter()
        .map(|&j| a.min(u.iter().filter(|&&i| e.contains(i, j)).count()))
        .sum();
    lhs > rhs
}

/// Checks every `V ⊆ [n]` with `|V| = n - b` (lexicographic order) for a
/// flow saturating all source arcs.
pub fn is_excess_compatible(e: &ErasurePattern, a: usize, b: usize) -> Result<ExcessCheck> {
    let (m, n) = (e.m(), e.n());
    if b > n {
        return Err(Error::Precondition(format!("b={b} exceeds n={n}")));
    }
    let need = ExcessProfile::of(e, a, b).total() as u64;
    if need == 0 {
        return Ok(ExcessCheck::Compatible);
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(n - b).collect();
    let blocked = subsets
        .par_iter()
        .map(|v| -> Result<Option<HallBlocker>> {
            let net = excess_network(e, a, b, v)?;
            let flow = net.max_flow();
            if flow.value == need {
                return Ok(None);
            }
            let rows: Vec<usize> = (0..m).filter(|&i| flow.source_side[1 + i]).collect();
            debug_assert!(is_hall_blocker(e, a, b, v, &rows));
            Ok(Some(HallBlocker {
                columns: v.clone(),
                rows,
                transposed: false,
            }))
        })
        .find_map_first(|r| r.transpose());
    match blocked.transpose()? {
        None => Ok(ExcessCheck::Compatible),
        Some(h) => Ok(ExcessCheck::Blocked(h)),
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Excess-compatibility in the cheaper orientation: `C(n, b)` column
/// subsets, or `C(m, a)` row subsets on the transposed grid with `a` and `b`
/// swapped (preferred on ties).
pub fn fast_check_certificate(e: &ErasurePattern, a: usize, b: usize) -> Result<ExcessCheck> {
    if binomial(e.m(), a) <= binomial(e.n(), b) {
        Ok(match is_excess_compatible(&e.transpose(), b, a)? {
            ExcessCheck::Blocked(h) => ExcessCheck::Blocked(HallBlocker {
                transposed: true,
                ..h
            }),
            ok => ok,
        })
    } else {
        is_excess_compatible(e, a, b)
    }
}

/// Whether `E` is regular, decided by max flow.
pub fn fast_check(e: &ErasurePattern, a: usize, b: usize) -> Result<bool> {
    Ok(fast_check_certificate(e, a, b)?.is_compatible())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_pattern() -> ErasurePattern {
        let kept = [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 4), (4, 5), (5, 4), (5, 5)];
        ErasurePattern::from_one_based(5, 5, &kept).unwrap().complement()
    }

    fn figure_pattern() -> ErasurePattern {
        let cells = [
            (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2),
            (3, 5), (4, 1), (4, 2), (4, 5), (5, 1), (5, 2), (5, 3), (5, 4),
        ];
        ErasurePattern::from_one_based(5, 5, &cells).unwrap()
    }

    #[test]
    fn flow_examples() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_arc(0, 1, 5).unwrap();
        assert_eq!(net.max_flow().value, 5);
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        for (u, v) in [(0, 1), (1, 3), (0, 2), (2, 3)] {
            net.add_arc(u, v, 1).unwrap();
        }
        let flow = net.max_flow();
        assert_eq!(flow.value, 2);
        assert!(net.is_valid_flow(&flow));
        assert!(net.add_arc(1, 0, 1).is_err());
        assert!(net.add_arc(3, 1, 1).is_err());
        assert!(FlowNetwork::new(3, 1, 1).is_err());
    }

    #[test]
    fn naive_examples() {
        let empty = ErasurePattern::new(3, 3).unwrap();
        assert_eq!(is_regular_naive(&empty, 1, 1).unwrap(), None);
        let full = ErasurePattern::full(3, 3).unwrap();
        let v = is_regular_naive_with(&full, 1, 1, NaiveMode::Exhaustive).unwrap().unwrap();
        assert!(!rectangle_bound_holds(&full, &v.rows, &v.cols, 1, 1));
        assert!(!rectangle_bound_holds(&full, &[0, 1, 2], &[0, 1, 2], 1, 1));
        assert_eq!(is_regular_naive(&block_pattern(), 2, 2).unwrap(), None);
        assert_eq!(
            is_regular_naive_with(&block_pattern(), 2, 2, NaiveMode::Exhaustive).unwrap(),
            None
        );
    }

    #[test]
    fn figure_flow_is_full() {
        let e = figure_pattern();
        let net = excess_network(&e, 2, 2, &[0, 1, 2]).unwrap();
        let need = ExcessProfile::of(&e, 2, 2).total() as u64;
        assert_eq!(need, 6);
        assert_eq!(net.max_flow().value, need);
    }

    #[test]
    fn excess_examples() {
        let empty = ErasurePattern::new(4, 4).unwrap();
        assert!(is_excess_compatible(&empty, 1, 1).unwrap().is_compatible());
        assert!(fast_check(&block_pattern(), 2, 2).unwrap());
        let full = ErasurePattern::full(3, 3).unwrap();
        assert!(!fast_check(&full, 1, 1).unwrap());
        let ExcessCheck::Blocked(h) = is_excess_compatible(&full, 1, 1).unwrap() else {
            panic!("full grid is not regular");
        };
        assert!(is_hall_blocker(&full, 1, 1, &h.columns, &h.rows));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(20, 10), 184_756);
    }
}
