use num_bigint::BigInt;
use rubber_core::recursion::{chi_mbar0, chi_mbar0_series, chi_table};
use rubber_core::series::factorial;
use rubber_core::trees::{enumerate_stable_trees, vertex_weight};

const EULER_MBAR: [&str; 18] = [
    "1",
    "2",
    "10",
    "84",
    "1108",
    "20824",
    "530528",
    "17578464",
    "734772384",
    "37814132256",
    "2349344349504",
    "173367352211520",
    "14989230432337536",
    "1500796146336385152",
    "172277450643084049920",
    "22474724472542045216256",
    "3306538057482623252067840",
    "544879611875655894561850368",
];

const EULER_MBAR0: [u64; 18] = [
    1,
    2,
    7,
    34,
    213,
    1630,
    14747,
    153946,
    1821473,
    24087590,
    352080111,
    5636451794,
    98081813581,
    1843315388078,
    37209072076483,
    802906142007946,
    18443166021077145,
    449326835001457846,
];

#[test]
fn table_totals_match_known_values() {
    let table = chi_table(19, 20).unwrap();
    for (i, want) in EULER_MBAR.iter().enumerate() {
        let n = i + 2;
        assert_eq!(table.total(n).unwrap(), want.parse::<BigInt>().unwrap(), "n = {n}");
    }
}

#[test]
fn first_column_is_signed_factorial() {
    let table = chi_table(15, 15).unwrap();
    for n in 2..=15 {
        let f = factorial(n - 2);
        let want = if n % 2 == 0 { f } else { -f };
        assert_eq!(table.entry(n, 1).unwrap(), &want);
    }
}

#[test]
fn series_fixed_point_matches_known_values() {
    let got = chi_mbar0_series(19).unwrap();
    for (i, &want) in EULER_MBAR0.iter().enumerate() {
        assert_eq!(got[i], BigInt::from(want), "n = {}", i + 2);
    }
}

#[test]
fn tree_sum_by_shape_for_five_leaves() {
    // shapes of the 26 trees on five leaves: the star, ten with one internal
    // edge, fifteen trivalent
    let mut by_shape = std::collections::BTreeMap::<Vec<usize>, (usize, BigInt)>::new();
    for t in enumerate_stable_trees(5).unwrap() {
        let mut v = t.internal_valences();
        v.sort();
        let w: BigInt = v.iter().map(|&d| vertex_weight(d)).product();
        let e = by_shape.entry(v).or_insert((0, BigInt::from(0)));
        e.0 += 1;
        e.1 += w;
    }
    let summary: Vec<(usize, BigInt)> = by_shape.into_values().collect();
    assert_eq!(
        summary,
        vec![(15, BigInt::from(15)), (10, BigInt::from(-10)), (1, BigInt::from(2))]
    );
    assert_eq!(chi_mbar0(4).unwrap(), BigInt::from(7));
}

#[test]
fn tree_sum_matches_fixed_point() {
    let series = chi_mbar0_series(7).unwrap();
    for n in 2..=7 {
        assert_eq!(chi_mbar0(n).unwrap(), series[n - 2], "n = {n}");
    }
}
