mod common;

use std::collections::HashMap;

use itertools::Itertools;
use mrlab_core::codes::{random_code, reed_solomon_default};
use mrlab_core::hmds::{
    check_family, find_violation, is_cycle_mds_ell, is_mds_ell, is_weak_mds_ell, pad_sets, GenericOptions,
};
use mrlab_core::linalg::{generic_intersection_dim, intersection_basis, intersection_dim, tensor_span_dim};
use mrlab_core::{FieldSpec, LinearCode, Matrix, MdsCheck, SetFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_family<R: Rng>(n: usize, ell: usize, rng: &mut R) -> SetFamily {
    let sets = (0..ell)
        .map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    SetFamily::new(n, sets).unwrap()
}

#[test]
fn intersection_dim_matches_equation_stacking() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..500 {
        let p = [3, 5, 7, 13][round % 4];
        let f = FieldSpec::prime(p).unwrap();
        let k = rng.random_range(1..=5);
        let n = rng.random_range(1..=8);
        let ell = rng.random_range(1..=4);
        let v = Matrix::random(f, k, n, &mut rng);
        let fam = random_family(n, ell, &mut rng);
        let expected = common::intersection_dim(&common::columns(&v), k, fam.sets(), p);
        assert_eq!(intersection_dim(&v, &fam).unwrap(), expected, "round {round}: {v}{fam}");
        let basis = intersection_basis(&v, &fam).unwrap();
        assert_eq!(basis.cols(), expected);
        for j in 0..basis.cols() {
            for s in fam.sets() {
                assert!(v.select_columns(s).unwrap().span_contains(&basis.column(j)).unwrap());
            }
        }
    }
}

#[test]
fn mds_intersections_dominate_generic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = FieldSpec::prime(17).unwrap();
    for k in 2..=4 {
        let code = reed_solomon_default(f, 8, k).unwrap();
        for _ in 0..60 {
            let ell = rng.random_range(2..=4);
            let sets = (0..ell)
                .map(|_| (0..8).filter(|_| rng.random_bool(0.4)).take(k).collect())
                .collect();
            let fam = SetFamily::new(8, sets).unwrap();
            let actual = intersection_dim(code.generator(), &fam).unwrap();
            let generic = generic_intersection_dim(k, 8, &fam, 2, &mut rng).unwrap();
            assert!(actual >= generic, "{fam}");
        }
    }
}

#[test]
fn generic_dimension_is_seed_invariant() {
    let mut pick = ChaCha8Rng::seed_from_u64(13);
    let families: Vec<(usize, SetFamily)> = (0..200)
        .map(|_| {
            let k = pick.random_range(1..=5);
            let ell = pick.random_range(2..=4);
            (k, random_family(8, ell, &mut pick))
        })
        .collect();
    let dims = |seeds: std::ops::Range<u64>| -> Vec<usize> {
        families
            .iter()
            .zip(seeds)
            .map(|((k, fam), seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                generic_intersection_dim(*k, 8, fam, 2, &mut rng).unwrap()
            })
            .collect()
    };
    assert_eq!(dims(0..200), dims(1000..1200));
}

/// Random subspace of `F^d` as spanning columns; sometimes shares vectors
/// with `base` so intersections are not always trivial.
fn random_subspace<R: Rng>(f: FieldSpec, d: usize, base: Option<&Matrix>, rng: &mut R) -> Matrix {
    let count = rng.random_range(1..=d);
    let mut cols: Vec<Vec<_>> = (0..count)
        .map(|_| Matrix::random(f, d, 1, rng).column(0))
        .collect();
    if let Some(b) = base {
        for j in 0..b.cols() {
            if rng.random_bool(0.5) {
                cols.push(b.column(j));
            }
        }
    }
    Matrix::from_columns(f, d, &cols).unwrap()
}

#[test]
fn tensor_sum_dimension_identity() {
    let f = FieldSpec::prime(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let (d1, d2) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let u1 = random_subspace(f, d1, None, &mut rng);
        let u2 = random_subspace(f, d1, Some(&u1), &mut rng);
        let v1 = random_subspace(f, d2, None, &mut rng);
        let v2 = random_subspace(f, d2, Some(&v1), &mut rng);
        let cols = |m: &Matrix| common::columns(m);
        let dim = |m: &Matrix| common::rank(&cols(m), 13);
        let expected = dim(&u1) * dim(&v1) + dim(&u2) * dim(&v2)
            - common::pair_intersection_dim(&cols(&u1), &cols(&u2), 13)
                * common::pair_intersection_dim(&cols(&v1), &cols(&v2), 13);
        let got = tensor_span_dim(&[(u1, v1), (u2, v2)], (d1, d2)).unwrap();
        assert_eq!(got, expected);
    }
}

#[test]
fn kronecker_is_bilinear_and_rank_multiplicative() {
    let f = FieldSpec::prime(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let a = Matrix::random(f, 2, 3, &mut rng);
        let a2 = Matrix::random(f, 2, 3, &mut rng);
        let b = Matrix::random(f, 3, 2, &mut rng);
        let c = f.random(&mut rng);
        let lhs = a.add(&a2).unwrap().kronecker(&b).unwrap();
        let rhs = a.kronecker(&b).unwrap().add(&a2.kronecker(&b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(a.scale(c).kronecker(&b).unwrap(), a.kronecker(&b.scale(c)).unwrap());
        assert_eq!(a.kronecker(&b).unwrap().rank(), a.rank() * b.rank());
    }
}

#[test]
fn dual_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for seed in 0..40 {
        let n = rng.random_range(3..=8);
        let k = rng.random_range(1..n);
        let f = FieldSpec::prime([5, 7, 101][seed as usize % 3]).unwrap();
        let c = random_code(f, n, k, seed).unwrap();
        let product = c.parity_check().mul(&c.generator().transpose()).unwrap();
        assert!(product.is_zero());
        assert!(c.dual().dual().generator().same_row_space(c.generator()).unwrap());
        assert_eq!(c.dual().k(), n - k);
    }
}

/// Correctability three ways: information set of the kept columns,
/// independence of the erased parity columns, and no nonzero codeword
/// supported on the erasures (by enumerating all codewords).
#[test]
fn correctability_criteria_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..200 {
        let p = [2, 3, 5][round % 3];
        let f = FieldSpec::prime(p).unwrap();
        let n = rng.random_range(3..=7);
        let k = rng.random_range(1..n.min(4));
        let c = random_code(f, n, k, round as u64).unwrap();
        let size = rng.random_range(0..=n - k);
        let erased: Vec<usize> = rand::seq::index::sample(&mut rng, n, size).into_vec();
        let kept: Vec<usize> = (0..n).filter(|j| !erased.contains(j)).collect();
        let by_generator = c.generator().select_columns(&kept).unwrap().rank() == k;
        let by_parity = c.parity_check().select_columns(&erased).unwrap().rank() == erased.len();
        let g = common::columns(c.generator());
        let hidden = common::all_vectors(k, p).into_iter().skip(1).any(|msg| {
            kept.iter()
                .all(|&j| (0..k).map(|i| common::mul(msg[i], g[j][i], p)).sum::<u64>() % p == 0)
        });
        assert_eq!(by_generator, by_parity, "round {round}");
        assert_eq!(by_generator, !hidden, "round {round}");
    }
}

type GenericCache = HashMap<(usize, usize, Vec<Vec<usize>>), usize>;

/// MDS(ℓ) straight from the definition: every family of `ℓ` arbitrary
/// subsets, code dimension against generic dimension.
fn mds_by_definition(code: &LinearCode, ell: usize, generic: &mut GenericCache) -> bool {
    let p = code.field().p();
    let (k, n) = (code.k(), code.n());
    let cols = common::columns(code.generator());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    common::all_subsets(n)
        .into_iter()
        .combinations_with_replacement(ell)
        .all(|fam| {
            let g = *generic
                .entry((k, n, fam.clone()))
                .or_insert_with(|| common::generic_intersection_dim(k, n, &fam, &mut rng));
            common::intersection_dim(&cols, k, &fam, p) == g
        })
}

#[test]
fn higher_order_mds_matches_definition() {
    let mut corpus = Vec::new();
    for (p, n, k) in [(5, 4, 2), (5, 5, 2), (7, 6, 2), (7, 6, 3), (11, 6, 3), (13, 6, 3), (3, 4, 2), (7, 5, 3)] {
        let f = FieldSpec::prime(p).unwrap();
        if n as u64 <= p {
            corpus.push(reed_solomon_default(f, n, k).unwrap());
        }
        for seed in 0..3 {
            corpus.push(random_code(f, n, k, seed).unwrap());
        }
    }
    let mut seen = [0usize; 2];
    let mut cache = GenericCache::new();
    for ell in [2, 3] {
        for code in &corpus {
            let expected = mds_by_definition(code, ell, &mut cache);
            let got = is_mds_ell(code, ell).unwrap();
            assert_eq!(got.holds(), expected, "ell={ell} code:\n{code}");
            seen[usize::from(expected)] += 1;
            if let MdsCheck::Fails(w) = got {
                let p = code.field().p();
                let dim = common::intersection_dim(&common::columns(code.generator()), code.k(), w.family.sets(), p);
                assert_eq!(dim, w.actual_dim);
                assert_ne!(w.actual_dim, w.generic_dim);
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "corpus should mix outcomes: {seen:?}");
}

/// Whether `t` (a bitmask over `Z_l`) is a nonempty proper cyclic interval.
fn is_cyclic_interval(t: u32, ell: usize) -> bool {
    let full = (1u32 << ell) - 1;
    if t == 0 || t == full {
        return false;
    }
    let starts = (0..ell)
        .filter(|&i| t >> i & 1 == 1 && t >> ((i + ell - 1) % ell) & 1 == 0)
        .count();
    starts == 1
}

/// Families given by one membership mask per element, filtered by `allowed`,
/// with `|S_i| <= k` and `Σ|S_i| <= (l-1)k`.
fn families_by_membership(n: usize, k: usize, ell: usize, allowed: impl Fn(u32) -> bool) -> Vec<Vec<Vec<usize>>> {
    let options: Vec<u32> = (0..1u32 << ell).filter(|&t| allowed(t)).collect();
    (0..n)
        .map(|_| options.iter().copied())
        .multi_cartesian_product()
        .filter_map(|choice| {
            let sets: Vec<Vec<usize>> = (0..ell)
                .map(|i| (0..n).filter(|&j| choice[j] >> i & 1 == 1).collect())
                .collect();
            let fits = sets.iter().all(|s| s.len() <= k) && sets.iter().map(Vec::len).sum::<usize>() <= (ell - 1) * k;
            fits.then_some(sets)
        })
        .collect()
}

#[test]
fn cycle_and_weak_deciders_match_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut outcomes = [[0usize; 2]; 2];
    for (i, (p, n, k)) in [(7, 5, 2), (7, 5, 3), (11, 6, 3), (5, 5, 3), (13, 6, 2), (7, 6, 4), (3, 5, 2), (11, 6, 4)]
        .into_iter()
        .enumerate()
    {
        let f = FieldSpec::prime(p).unwrap();
        let mut codes = vec![random_code(f, n, k, i as u64).unwrap()];
        if n as u64 <= p {
            codes.push(reed_solomon_default(f, n, k).unwrap());
        }
        for code in codes.iter().filter(|c| c.is_mds()) {
            let cols = common::columns(code.generator());
            let max_ell = if n <= 5 { 4 } else { 3 };
            for ell in 3..=max_ell {
                let cycle = families_by_membership(n, k, ell, |t| t == 0 || is_cyclic_interval(t, ell))
                    .into_iter()
                    .all(|sets| {
                        let actual = common::intersection_dim(&cols, k, &sets, p);
                        actual == 0 || common::generic_intersection_dim(k, n, &sets, &mut rng) > 0
                    });
                let weak = families_by_membership(n, k, ell, |t| t.count_ones() <= 1)
                    .into_iter()
                    .all(|sets| common::intersection_dim(&cols, k, &sets, p) == 0);
                assert_eq!(is_cycle_mds_ell(code, ell).unwrap().holds(), cycle, "cycle ell={ell}\n{code}");
                assert_eq!(is_weak_mds_ell(code, ell).unwrap().holds(), weak, "weak ell={ell}\n{code}");
                outcomes[0][usize::from(cycle)] += 1;
                outcomes[1][usize::from(weak)] += 1;
            }
        }
    }
    assert!(outcomes.iter().all(|o| o[0] > 0 && o[1] > 0), "corpus should mix outcomes: {outcomes:?}");
}

fn code_corpus() -> Vec<LinearCode> {
    let mut out = Vec::new();
    for (i, (p, n, k)) in [(7, 6, 3), (11, 7, 3), (13, 8, 4), (17, 8, 3), (5, 5, 2), (13, 8, 2), (11, 8, 5), (7, 7, 4)]
        .into_iter()
        .enumerate()
    {
        let f = FieldSpec::prime(p).unwrap();
        out.push(reed_solomon_default(f, n, k).unwrap());
        out.push(random_code(f, n, k, i as u64).unwrap());
    }
    out
}

/// Order four only for small dimensions; the deciders grow quickly past that.
fn max_order(code: &LinearCode) -> usize {
    if code.k() <= 4 {
        4
    } else {
        3
    }
}

#[test]
fn hierarchy_and_order_reduction() {
    for code in code_corpus() {
        for ell in 2..=max_order(&code) {
            let full = is_mds_ell(&code, ell).unwrap().holds();
            let cycle = is_cycle_mds_ell(&code, ell).unwrap().holds();
            let weak = is_weak_mds_ell(&code, ell).unwrap().holds();
            assert!(!full || cycle, "full without cycle, ell={ell}\n{code}");
            assert!(!cycle || weak, "cycle without weak, ell={ell}\n{code}");
            if full && ell > 2 {
                assert!(is_mds_ell(&code, ell - 1).unwrap().holds());
            }
            if ell == 3 && code.is_mds() {
                assert_eq!(full, cycle, "cycle-MDS(3) and MDS(3) differ\n{code}");
            }
        }
    }
}

#[test]
fn puncture_and_shorten_preserve_higher_order_mds() {
    for code in code_corpus() {
        for ell in 2..=3 {
            if !is_mds_ell(&code, ell).unwrap().holds() {
                continue;
            }
            for i in 0..code.n() {
                if code.n() >= code.k() + 2 {
                    assert!(is_mds_ell(&code.puncture(i).unwrap(), ell).unwrap().holds());
                }
                if code.k() >= 2 {
                    assert!(is_mds_ell(&code.shorten(i).unwrap(), ell).unwrap().holds());
                }
            }
        }
    }
}

#[test]
fn duality_for_three_and_weak_duality() {
    let f = FieldSpec::generic();
    for seed in 0..8 {
        let n = 5 + seed as usize % 4;
        let k = 2 + seed as usize % (n - 3);
        let c = random_code(f, n, k, seed).unwrap();
        assert!(is_mds_ell(&c, 3).unwrap().holds());
        assert!(is_mds_ell(&c.dual(), 3).unwrap().holds());
    }
    for code in code_corpus() {
        for ell in 2..=max_order(&code).min(max_order(&code.dual())) {
            if is_mds_ell(&code, ell).unwrap().holds() {
                assert!(is_cycle_mds_ell(&code.dual(), ell).unwrap().holds(), "ell={ell}\n{code}");
            }
        }
    }
}

#[test]
fn small_dimension_and_codimension_codes_are_higher_order() {
    let f = FieldSpec::prime(13).unwrap();
    for n in 4..=8 {
        let mut codes = vec![reed_solomon_default(f, n, 2).unwrap()];
        if n <= 7 {
            codes.push(reed_solomon_default(f, n, n - 1).unwrap());
        }
        for code in codes {
            for ell in 2..=4 {
                assert!(is_mds_ell(&code, ell).unwrap().holds(), "n={n} k={} ell={ell}", code.k());
            }
        }
    }
}

#[test]
fn padding_meets_its_contract() {
    let f = FieldSpec::prime(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut padded = 0;
    for _ in 0..200 {
        let k = rng.random_range(2..=4);
        let ell = rng.random_range(2..=4);
        let n = ((ell - 1) * k).max(k + 1) + rng.random_range(0..3);
        if n > 12 {
            continue;
        }
        let code = reed_solomon_default(f, n, k).unwrap();
        let sets = (0..ell)
            .map(|_| {
                let size = rng.random_range(0..=k);
                rand::seq::index::sample(&mut rng, n, size).into_vec()
            })
            .collect();
        let fam = SetFamily::new(n, sets).unwrap();
        let fits = fam.sets().iter().all(|s| s.len() <= k) && fam.total_size() <= (ell - 1) * k;
        if !fits || intersection_dim(code.generator(), &fam).unwrap() != 0 {
            continue;
        }
        let out = pad_sets(&code, &fam).unwrap();
        let union = fam.union();
        let mut added = Vec::new();
        for (before, after) in fam.sets().iter().zip(out.sets()) {
            assert!(before.iter().all(|x| after.contains(x)));
            assert!(after.len() <= k);
            added.extend(after.iter().filter(|x| !before.contains(x)).copied());
        }
        let distinct = added.iter().unique().count();
        assert_eq!(distinct, added.len(), "added elements repeat");
        assert!(added.iter().all(|x| !union.contains(x)));
        assert_eq!(out.total_size(), (ell - 1) * k);
        assert_eq!(intersection_dim(code.generator(), &out).unwrap(), 0);
        padded += 1;
    }
    assert!(padded > 50);
}

#[test]
fn found_violations_are_sound() {
    let opts = GenericOptions::default();
    for q in [13, 17, 19] {
        let f = FieldSpec::prime(q).unwrap();
        let code = reed_solomon_default(f, 12, 3).unwrap();
        let w = find_violation(&code, 3, 100_000, 1).unwrap().expect("small field");
        assert!(w.actual_dim >= 1);
        assert_eq!(w.generic_dim, 0);
        assert_eq!(check_family(&code, &w.family, &opts).unwrap().as_ref(), Some(&w));
        assert!(!is_weak_mds_ell(&code, 3).unwrap().holds());
    }
    let big = reed_solomon_default(FieldSpec::generic(), 12, 3).unwrap();
    assert_eq!(find_violation(&big, 3, 1000, 1).unwrap(), None);
}

#[test]
fn repeated_column_fails_weakly_with_singletons() {
    let f = FieldSpec::prime(11).unwrap();
    let g = Matrix::from_rows(f, &[vec![1, 1, 0, 1, 1], vec![0, 0, 1, 2, 3]]).unwrap();
    let code = LinearCode::new(g).unwrap();
    let w = is_weak_mds_ell(&code, 3).unwrap();
    let w = w.witness().expect("columns 1 and 2 coincide");
    assert_eq!(intersection_dim(code.generator(), &w.family).unwrap(), w.actual_dim);
    assert!(w.actual_dim >= 1);
}
