use std::collections::BTreeSet;

use rubber_core::chambers::{sample_chambers, DEFAULT_SAMPLE_BUDGET};
use rubber_core::oracle::{
    cake_report, class_via_types, enumerate_combinatorial_types, local_calc_check, rrt_nu, tree_weight_sum,
};
use rubber_core::recursion::{chi_mbar0, nu_m, NuFamily};
use rubber_core::strata::{admissible_partitions, stratum_class, RamificationDatum};
use rubber_core::trees::enumerate_stable_trees;

/// The central datum plus three non-central chambers.
fn data(n: usize) -> Vec<RamificationDatum> {
    sample_chambers(n, 4, 0xbee + n as u64, DEFAULT_SAMPLE_BUDGET).unwrap()
}

#[test]
fn types_biject_with_admissible_partitions() {
    for n in 3..=6 {
        for x in data(n) {
            for t in enumerate_stable_trees(n).unwrap() {
                let g = t.graph();
                let mut from_types = BTreeSet::new();
                for ct in enumerate_combinatorial_types(&t, &x).unwrap() {
                    assert_eq!(ct.stabilization().unwrap(), t);
                    assert!(local_calc_check(&ct, &x), "{t}");
                    let r = ct.target_length();
                    let mut blocks = vec![0u64; r + 2];
                    for v in 0..g.vertex_count() {
                        blocks[ct.levels()[v]] |= 1u64 << v;
                    }
                    assert!(from_types.insert(blocks), "two types give one partition");
                    assert!(ct.weighted_edges().all(|(_, w)| w > 0));
                }
                let partitions: BTreeSet<Vec<u64>> =
                    admissible_partitions(&t, &x).unwrap().into_iter().map(|p| p.blocks).collect();
                assert_eq!(from_types, partitions, "{t} at {:?}", x.entries());
            }
        }
    }
}

#[test]
fn type_classes_sum_to_stratum_class() {
    for n in 3..=5 {
        for x in data(n) {
            for t in enumerate_stable_trees(n).unwrap() {
                assert_eq!(class_via_types(&t, &x).unwrap(), stratum_class(&t, &x).unwrap(), "{t}");
            }
        }
    }
}

#[test]
fn ribbon_sums_match_generating_functions() {
    let order = 10;
    let mut fam = NuFamily::new(order);
    fam.extend_to(4).unwrap();
    for m in 1..=4 {
        assert_eq!(rrt_nu(m, order).unwrap(), nu_m(m, &fam).unwrap(), "m = {m}");
    }
}

#[test]
fn regrouping_by_decomposition_type() {
    for m in 2..=3 {
        let report = cake_report(m, 8).unwrap();
        assert!(report.holds(), "m = {m}");
        assert!(report.tree_count > 0);
    }
}

#[test]
fn tree_weight_sum_matches_enumerator() {
    for n in 2..=6 {
        assert_eq!(tree_weight_sum(n + 1).unwrap(), chi_mbar0(n).unwrap(), "n = {n}");
    }
}
