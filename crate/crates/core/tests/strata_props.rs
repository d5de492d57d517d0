use num_bigint::BigInt;
use proptest::prelude::*;
use rubber_core::chambers::{same_chamber_representatives, sample_chambers, DEFAULT_SAMPLE_BUDGET};
use rubber_core::oracle::linear_extensions_brute;
use rubber_core::recursion::chi_table;
use rubber_core::strata::Poset;
use rubber_core::strata::{
    admissible_partitions, euler_char, euler_char_via_class, linear_extensions, stratum_class, total_class,
    x_directing, RamificationDatum,
};
use rubber_core::trees::{enumerate_stable_trees, vertex_weight};

fn samples(n: usize, count: usize) -> Vec<RamificationDatum> {
    sample_chambers(n, count, 0x5eed + n as u64, DEFAULT_SAMPLE_BUDGET).unwrap()
}

/// Every ordered set partition of the bits of `set`.
fn ordered_partitions(set: u64) -> Vec<Vec<u64>> {
    if set == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut sub = set;
    while sub != 0 {
        for mut rest in ordered_partitions(set & !sub) {
            rest.insert(0, sub);
            out.push(rest);
        }
        sub = (sub - 1) & set;
    }
    out
}

/// Reads the admissibility conditions straight off the reachability relation.
fn admissible_by_definition(reach: &dyn Fn(usize, usize) -> bool, blocks: &[u64]) -> bool {
    let members = |b: u64| (0..64).filter(move |i| b >> i & 1 == 1);
    let index_of = |v: usize| blocks.iter().position(|&b| b >> v & 1 == 1).unwrap();
    let k = blocks.len();
    for (i, &b) in blocks.iter().enumerate() {
        for u in members(b) {
            for v in members(b) {
                if u != v && reach(u, v) {
                    return false;
                }
            }
        }
        for u in members(b) {
            for (j, &c) in blocks.iter().enumerate() {
                for v in members(c) {
                    if reach(u, v) && j < i {
                        return false;
                    }
                }
            }
            if i > 0 && i + 1 < k {
                let has_below = (0..64).any(|v| blocks.iter().any(|&c| c >> v & 1 == 1) && reach(v, u) && index_of(v) < i);
                let has_above = (0..64).any(|v| blocks.iter().any(|&c| c >> v & 1 == 1) && reach(u, v) && index_of(v) > i);
                if !has_below || !has_above {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn central_datum_matches_table() {
    let table = chi_table(6, 8).unwrap();
    for n in 2..=6 {
        let x = RamificationDatum::central(n).unwrap();
        assert_eq!(euler_char(&x).unwrap(), table.total(n).unwrap(), "n = {n}");
    }
}

#[test]
fn euler_paths_agree() {
    for n in 3..=6 {
        for x in samples(n, 4) {
            assert_eq!(euler_char(&x).unwrap(), euler_char_via_class(&x).unwrap(), "{:?}", x.entries());
        }
    }
}

#[test]
fn per_tree_euler_is_weighted_extension_count() {
    for x in samples(6, 3) {
        for t in enumerate_stable_trees(6).unwrap() {
            let w: BigInt = t.internal_valences().into_iter().map(vertex_weight).product();
            let e = linear_extensions(&x_directing(&t, &x).unwrap()).unwrap();
            assert_eq!(stratum_class(&t, &x).unwrap().euler_characteristic(), w * e, "{t}");
        }
    }
}

#[test]
fn class_is_constant_on_chambers() {
    for n in 3..=6 {
        for x in samples(n, 3) {
            let base = total_class(&x).unwrap();
            for y in same_chamber_representatives(&x, 3, 17, DEFAULT_SAMPLE_BUDGET).unwrap() {
                assert_eq!(total_class(&y).unwrap(), base, "{:?} vs {:?}", x.entries(), y.entries());
            }
        }
    }
}

#[test]
fn directing_is_constant_on_chambers() {
    for n in 4..=6 {
        let trees = enumerate_stable_trees(n).unwrap();
        for x in samples(n, 3) {
            let reps = same_chamber_representatives(&x, 2, 99, DEFAULT_SAMPLE_BUDGET).unwrap();
            for t in &trees {
                let arcs = x_directing(t, &x).unwrap().arcs();
                for y in &reps {
                    assert_eq!(x_directing(t, y).unwrap().arcs(), arcs);
                }
            }
        }
    }
}

#[test]
fn admissible_partitions_match_definition() {
    for n in 4..=6 {
        let trees = enumerate_stable_trees(n).unwrap();
        for x in samples(n, 3) {
            for t in &trees {
                let d = x_directing(t, &x).unwrap();
                let order = rubber_core::strata::partial_order(&d);
                let reach = |u: usize, v: usize| order.lt(u, v);
                let internal = d.internal_mask();
                let mut expected: Vec<Vec<u64>> = ordered_partitions(internal)
                    .into_iter()
                    .map(|mut mid| {
                        mid.insert(0, x.positive_mask());
                        mid.push(x.negative_mask());
                        mid
                    })
                    .filter(|b| admissible_by_definition(&reach, b))
                    .collect();
                expected.sort();
                let mut got: Vec<Vec<u64>> =
                    admissible_partitions(t, &x).unwrap().into_iter().map(|p| p.blocks).collect();
                got.sort();
                assert_eq!(got, expected, "{t} at {:?}", x.entries());
                let size = internal.count_ones() as usize;
                let finest = got.iter().filter(|p| p.len() == size + 2).count();
                assert_eq!(BigInt::from(finest), linear_extensions(&d).unwrap(), "{t}");
                for p in &got {
                    assert!(p.len() <= size + 2);
                    if size >= 1 {
                        assert!(size + 2 - p.len() < size, "{t}");
                    }
                    for &b in &p[1..p.len() - 1] {
                        assert!(order.is_antichain(b));
                    }
                }
            }
        }
    }
}

#[test]
fn class_degree_is_bounded() {
    for n in 3..=6 {
        for x in samples(n, 3) {
            let c = total_class(&x).unwrap();
            assert_eq!(c.degree(), Some(n - 3), "{:?}", x.entries());
            for t in enumerate_stable_trees(n).unwrap() {
                let deg = stratum_class(&t, &x).unwrap().degree().unwrap();
                assert!(deg <= n - 3, "{t}");
            }
        }
    }
}

fn random_poset() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=8).prop_flat_map(|k| {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        let len = pairs.len();
        (Just(k), proptest::collection::vec(any::<bool>(), len))
            .prop_map(move |(k, keep)| (k, pairs.iter().zip(keep).filter(|(_, s)| *s).map(|(p, _)| *p).collect()))
    })
}

proptest! {
    #[test]
    fn extension_dp_matches_brute_force((k, rel) in random_poset()) {
        let p = Poset::from_relations(k, &rel).unwrap();
        prop_assert_eq!(p.linear_extensions().unwrap(), BigInt::from(linear_extensions_brute(&p).unwrap()));
    }
}
