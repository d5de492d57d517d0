//! Property suites behind `rubber verify`, one per library module.
//!
//! Each check is evaluated as stated; a suite fails when any of its checks
//! fails. Where a stated property is known not to hold, a companion check
//! records the corrected statement next to it.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rubber_core::chambers::{
    ratio_trend, same_chamber, same_chamber_representatives, sample_chambers, signature, strictly_decreasing,
    DEFAULT_SAMPLE_BUDGET,
};
use rubber_core::oracle::{
    cake_check, class_via_types, enumerate_combinatorial_types, local_calc_check, rrt_nu,
};
use rubber_core::recursion::{chi_mbar0_series, chi_table, nu_m, pde_residual, NuFamily, PdeForm};
use rubber_core::series::factorial;
use rubber_core::strata::{
    admissible_partitions, euler_char, linear_extensions, partial_order, stratum_class, total_class, x_directing,
    RamificationDatum,
};
use rubber_core::trees::enumerate_stable_trees;
use rubber_core::Result;
use serde_json::json;

use crate::output::Report;
use crate::reference::EULER_MBAR;
use crate::Suite;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, failure: Option<String>) -> Check {
    Check { suite, name, passed: failure.is_none(), detail: failure.unwrap_or_else(|| "ok".into()) }
}

pub fn run_suites(suite: Suite, max_n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Recursion | Suite::All) {
        out.extend(recursion_suite(max_n)?);
    }
    if matches!(suite, Suite::Strata | Suite::All) {
        out.extend(strata_suite(max_n)?);
    }
    if matches!(suite, Suite::Chambers | Suite::All) {
        out.extend(chambers_suite(max_n)?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        out.extend(oracle_suite(max_n)?);
    }
    Ok(out)
}

pub fn report(checks: &[Check]) -> Report {
    let mut suites: Vec<&'static str> = checks.iter().map(|c| c.suite).collect();
    suites.dedup();
    let summary: Vec<_> = suites
        .iter()
        .map(|s| json!({ "suite": s, "passed": checks.iter().filter(|c| c.suite == *s).all(|c| c.passed) }))
        .collect();
    let detail: Vec<_> = checks
        .iter()
        .map(|c| json!({ "suite": c.suite, "check": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    let rows = checks
        .iter()
        .map(|c| vec![c.suite.to_string(), c.name.to_string(), c.passed.to_string(), c.detail.clone()])
        .collect();
    Report::new(
        json!({ "passed": checks.iter().all(|c| c.passed), "suites": summary, "checks": detail }),
        &["suite", "check", "passed", "detail"],
        rows,
    )
}

/// Central datum first, then random data from distinct chambers.
fn samples(n: usize, count: usize) -> Result<Vec<RamificationDatum>> {
    sample_chambers(n, count, 0x5eed ^ n as u64, DEFAULT_SAMPLE_BUDGET)
}

fn pde_failure(form: PdeForm) -> Result<Option<String>> {
    let residual = pde_residual(10, 19, form)?;
    Ok(residual.iter().position(|r| !r.is_zero()).map(|i| format!("residual nonzero at s^{i}")))
}

fn recursion_suite(max_n: usize) -> Result<Vec<Check>> {
    const S: &str = "recursion";
    // chi_table itself rejects non-integral coefficients
    let table = chi_table(19, 20);
    let integral = match &table {
        Ok(_) => None,
        Err(e) => Some(e.to_string()),
    };
    let table = table?;

    let first_column = (2..=19).find_map(|n| {
        let f = factorial(n - 2);
        let want = if n % 2 == 0 { f } else { -f };
        (table.entry(n, 1) != Some(&want)).then(|| format!("n = {n}"))
    });
    let reference = EULER_MBAR.iter().enumerate().find_map(|(i, want)| {
        let n = i + 2;
        let got = table.total(n).expect("row exists");
        (got.to_string() != *want).then(|| format!("n = {n}: {got} vs {want}"))
    });
    let series = chi_mbar0_series(max_n)?;
    let tree_sums = (2..max_n).find_map(|n| {
        let via_trees = rubber_core::recursion::chi_mbar0(n).ok()?;
        (via_trees != series[n - 2]).then(|| format!("n = {n}: {via_trees} vs {}", series[n - 2]))
    });

    Ok(vec![
        check(S, "table_integrality", integral),
        check(S, "first_column_signed_factorial", first_column),
        check(S, "table_matches_reference", reference),
        check(S, "pde_residual_printed_form", pde_failure(PdeForm::Printed)?),
        check(S, "pde_residual_exact_form", pde_failure(PdeForm::Exact)?),
        check(S, "tree_sum_matches_fixed_point", tree_sums),
    ])
}

/// Middle blocks are antichains, every middle vertex has a predecessor in an
/// earlier block and a successor in a later one, exponents lie in range and
/// exponent-zero partitions are as many as linear extensions.
fn partition_structure(n: usize) -> Result<(Option<String>, Option<String>)> {
    let mut structural = None;
    let mut exponent = None;
    for x in samples(n, 4)? {
        for t in enumerate_stable_trees(n)? {
            let d = x_directing(&t, &x)?;
            let order = partial_order(&d);
            let parts = admissible_partitions(&t, &x)?;
            let internal = d.internal_mask().count_ones() as i64;
            let mut zero_exponent = 0u64;
            for p in &parts {
                let k = p.blocks.len();
                for i in 1..k - 1 {
                    let earlier = p.blocks[..i].iter().fold(0u64, |a, b| a | b);
                    let later = p.blocks[i + 1..].iter().fold(0u64, |a, b| a | b);
                    let block = p.blocks[i];
                    let ok = order.is_antichain(block)
                        && (0..64).filter(|v| block >> v & 1 == 1).all(|v| {
                            order.strictly_below(v) & earlier != 0 && order.strictly_above(v) & later != 0
                        });
                    if !ok && structural.is_none() {
                        structural = Some(format!("{t} at {:?}: block {i}", x.entries()));
                    }
                }
                let e = internal - k as i64 + 2;
                if internal >= 1 && !(0..=internal - 1).contains(&e) && exponent.is_none() {
                    exponent = Some(format!("{t} at {:?}: exponent {e}", x.entries()));
                }
                if e == 0 {
                    zero_exponent += 1;
                }
            }
            let ext = linear_extensions(&d)?;
            if BigInt::from(zero_exponent) != ext && exponent.is_none() {
                exponent = Some(format!("{t} at {:?}: {zero_exponent} vs {ext} extensions", x.entries()));
            }
        }
    }
    Ok((structural, exponent))
}

/// Total classes and directings agree on same-chamber representatives.
fn chamber_invariance(n: usize) -> Result<(Option<String>, Option<String>)> {
    let trees = enumerate_stable_trees(n)?;
    let mut classes = None;
    let mut directings = None;
    for x in samples(n, 3)? {
        let base = total_class(&x)?;
        for y in same_chamber_representatives(&x, 3, 17, DEFAULT_SAMPLE_BUDGET)? {
            if classes.is_none() && total_class(&y)? != base {
                classes = Some(format!("{:?} vs {:?}", x.entries(), y.entries()));
            }
            for t in &trees {
                if directings.is_none() && x_directing(t, &x)?.arcs() != x_directing(t, &y)?.arcs() {
                    directings = Some(format!("{t}: {:?} vs {:?}", x.entries(), y.entries()));
                }
            }
        }
    }
    Ok((classes, directings))
}

fn strata_suite(max_n: usize) -> Result<Vec<Check>> {
    const S: &str = "strata";
    let mut structural = None;
    let mut exponent = None;
    let mut classes = None;
    let mut directings = None;
    for n in 3..=max_n.min(6) {
        let (a, b) = partition_structure(n)?;
        structural = structural.or(a);
        exponent = exponent.or(b);
    }
    for n in 4..=max_n {
        let (a, b) = chamber_invariance(n)?;
        classes = classes.or(a);
        directings = directings.or(b);
    }
    let table = chi_table(max_n, max_n.max(2))?;
    let mut central = None;
    for n in 2..=max_n {
        let got = euler_char(&RamificationDatum::central(n)?)?;
        let want = table.total(n).expect("row exists");
        if central.is_none() && got != want {
            central = Some(format!("n = {n}: {got} vs {want}"));
        }
    }
    Ok(vec![
        check(S, "admissible_blocks_structural", structural),
        check(S, "exponent_bound", exponent),
        check(S, "chamber_invariance", classes),
        check(S, "directing_invariance", directings),
        check(S, "central_agreement", central),
    ])
}

fn chambers_suite(max_n: usize) -> Result<Vec<Check>> {
    const S: &str = "chambers";
    let mut nonzero = None;
    let mut equivalence = None;
    for n in 3..=max_n {
        let xs = samples(n, 4)?;
        for x in &xs {
            for (subset, positive) in signature(x)?.entries() {
                let sum: i64 = subset.iter().map(|&i| x.get(i - 1)).sum();
                if nonzero.is_none() && (sum == 0 || (sum > 0) != positive) {
                    nonzero = Some(format!("{:?} on {subset:?}", x.entries()));
                }
            }
            let reps = same_chamber_representatives(x, 3, 5, DEFAULT_SAMPLE_BUDGET)?;
            for a in &reps {
                for b in &reps {
                    let symmetric = same_chamber(a, b)? && same_chamber(b, a)?;
                    let transitive = reps.iter().all(|c| same_chamber(b, c).unwrap_or(false));
                    if equivalence.is_none() && !(same_chamber(a, a)? && symmetric && transitive) {
                        equivalence = Some(format!("{:?} / {:?}", a.entries(), b.entries()));
                    }
                }
            }
            for y in &xs {
                if equivalence.is_none() && (x != y) && same_chamber(x, y)? {
                    equivalence = Some(format!("distinct samples {:?} / {:?} share a chamber", x.entries(), y.entries()));
                }
            }
        }
    }
    let mut classes = None;
    for n in 4..=max_n {
        classes = classes.or(chamber_invariance(n)?.0);
    }

    let ratios = ratio_trend(19)?;
    let first_break = |values: &[rubber_core::Rational], offset: usize| {
        values
            .windows(2)
            .position(|w| w[1] >= w[0])
            .map(|i| format!("ratio({}) = {} is not below ratio({}) = {}", i + offset + 1, values[i + 1], i + offset, values[i]))
    };
    let decreasing = (!strictly_decreasing(&ratios)).then(|| first_break(&ratios, 2).unwrap_or_default());
    let decreasing_from_3 = first_break(&ratios[1..], 3);
    let last = ratios.last().expect("nonempty").to_f64().unwrap_or(f64::NAN);
    let small = (last >= 1e-9).then(|| format!("final ratio {last:e}"));

    Ok(vec![
        check(S, "signature_nonzero", nonzero),
        check(S, "same_chamber_equivalence", equivalence),
        check(S, "same_chamber_class_equal", classes),
        check(S, "ratio_strictly_decreasing", decreasing),
        check(S, "ratio_strictly_decreasing_from_3", decreasing_from_3),
        check(S, "ratio_final_below_1e-9", small),
    ])
}

fn oracle_suite(max_n: usize) -> Result<Vec<Check>> {
    const S: &str = "oracle";
    let mut bijection = None;
    let mut local = None;
    let mut classes = None;
    for n in 3..=max_n.min(6) {
        for x in samples(n, 4)? {
            for t in enumerate_stable_trees(n)? {
                let types = enumerate_combinatorial_types(&t, &x)?;
                let parts = admissible_partitions(&t, &x)?;
                if bijection.is_none() && types.len() != parts.len() {
                    bijection = Some(format!("{t} at {:?}: {} types, {} partitions", x.entries(), types.len(), parts.len()));
                }
                if local.is_none() && !types.iter().all(|ct| local_calc_check(ct, &x)) {
                    local = Some(format!("{t} at {:?}", x.entries()));
                }
                if n <= 5 && classes.is_none() && class_via_types(&t, &x)? != stratum_class(&t, &x)? {
                    classes = Some(format!("{t} at {:?}", x.entries()));
                }
            }
        }
    }
    let mut fam = NuFamily::new(10);
    fam.extend_to(4)?;
    let mut ribbon = None;
    for m in 1..=4 {
        if ribbon.is_none() && rrt_nu(m, 10)? != nu_m(m, &fam)? {
            ribbon = Some(format!("m = {m}"));
        }
    }
    let mut cake = None;
    for m in 2..=3 {
        if cake.is_none() && !cake_check(m, 8)? {
            cake = Some(format!("m = {m}"));
        }
    }
    Ok(vec![
        check(S, "types_biject_with_partitions", bijection),
        check(S, "local_calculation", local),
        check(S, "class_equivalence", classes),
        check(S, "ribbon_sum_matches_nu", ribbon),
        check(S, "cake_regrouping", cake),
    ])
}
