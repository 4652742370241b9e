use itertools::Itertools;
use mrlab_core::constructions::{build_bipartite, build_tripartite, is_degenerate_triple, verify_bipartite, verify_tripartite};
use mrlab_core::linalg::intersection_dim;
use mrlab_core::SetFamily;

/// Every triple of planes by stacked-equation rank, against the
/// degenerate-triple classification.
#[test]
fn bipartite_triples_by_rank() {
    for p in [3u64, 5] {
        let fam = build_bipartite(p).unwrap();
        let pairs: Vec<(u64, u64)> = (0..p).cartesian_product(0..p).collect();
        let mut degenerate_meeting = 0;
        for t in pairs.iter().copied().combinations(3) {
            let triple = [t[0], t[1], t[2]];
            let planes: Vec<_> = triple.iter().map(|&(a, b)| fam.plane(a, b)).collect();
            let stacked = planes[0].hstack(&planes[1]).unwrap().hstack(&planes[2]).unwrap();
            let family = SetFamily::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
            let meets = intersection_dim(&stacked, &family).unwrap() > 0;
            assert_eq!(fam.triple_intersects(&triple), meets);
            if meets {
                assert!(is_degenerate_triple(&triple), "{triple:?} over p={p}");
                degenerate_meeting += 1;
            }
        }
        assert!(degenerate_meeting > 0);
        assert_eq!(verify_bipartite(&fam), None);
    }
}

#[test]
fn tripartite_triples_by_rank() {
    let fam = build_tripartite(7).unwrap();
    let m = fam.to_matrix();
    let (su, sv, sw) = (fam.u().len(), fam.v().len(), fam.w().len());
    for u in (0..su).combinations(2) {
        for v in (su..su + sv).combinations(2) {
            for w in (su + sv..su + sv + sw).combinations(2) {
                let family = SetFamily::new(m.cols(), vec![u.clone(), v.clone(), w]).unwrap();
                assert_eq!(intersection_dim(&m, &family).unwrap(), 0);
            }
        }
    }
    assert_eq!(verify_tripartite(&fam), None);
}
