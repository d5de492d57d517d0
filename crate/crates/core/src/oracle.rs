//! Slow, independent computations used to cross-check the fast paths.
//!
//! Nothing here reuses the partition enumerator in [`crate::strata`]:
//! combinatorial types are built from level assignments and balanced weight
//! functions, ribbon sums from explicit tree lists.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::recursion::nu1_derivative;
use crate::series::{factorial, Rational, TruncatedSeries};
use crate::strata::{self, class_m0m, GClass, Poset, RamificationDatum};
use crate::trees::{self, decomposition_type, enumerate_rrt, stats, MarkedTree, RibbonRootedTree, TreeGraph};

/// Why a level assignment admits no balanced positive weight function.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightFailure {
    #[error("vertex {vertex} is adjacent to a vertex on its own level")]
    SameLevel { vertex: usize },

    #[error("edge above vertex {vertex} would get weight {weight}")]
    NonPositive { vertex: usize, weight: i64 },

    #[error("end at leaf 1 gets weight {got}, expected {expected}")]
    EndMismatch { expected: i64, got: i64 },
}

/// A source tree (possibly with bivalent vertices) mapped level by level to a
/// path with `r` internal vertices, with its balanced edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialType {
    source: TreeGraph,
    target_length: usize,
    levels: Vec<usize>,
    edges: Vec<(usize, usize)>,
    weights: Vec<i64>,
}

impl CombinatorialType {
    pub fn source(&self) -> &TreeGraph {
        &self.source
    }

    /// `r`, the number of internal vertices of the target path.
    pub fn target_length(&self) -> usize {
        self.target_length
    }

    /// Level of every source vertex: `0` for positive ends, `r + 1` for
    /// negative ends.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// `((u, v), w)` for every edge.
    pub fn weighted_edges(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.edges.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn stabilization(&self) -> Result<MarkedTree> {
        trees::stabilize(&self.source)
    }

    fn weight_map(&self) -> HashMap<(usize, usize), i64> {
        self.weighted_edges().collect()
    }

    fn weight(&self, map: &HashMap<(usize, usize), i64>, u: usize, v: usize) -> i64 {
        map[&(u.min(v), u.max(v))]
    }

    /// Class of the stratum of maps with this type (coarse reading: trivial
    /// bubbles contribute nothing).
    pub fn class(&self) -> Result<GClass> {
        let mut out = GClass::one();
        let mut per_level = vec![0usize; self.target_length + 2];
        for v in self.source.internal_vertices() {
            let val = self.source.valence(v);
            if val >= 3 {
                out = &out * &class_m0m(val)?;
                per_level[self.levels[v]] += 1;
            }
        }
        let torus = GClass::punctured_line();
        for &count in &per_level[1..=self.target_length] {
            out = &out * &torus.pow(count - 1);
        }
        Ok(out)
    }
}

/// Balanced weights for a fixed level assignment, aligned with
/// `source.edges()`. Ends get `|x_i|`; bivalent vertices pass weights on.
pub fn weight_function(
    source: &TreeGraph,
    levels: &[usize],
    x: &RamificationDatum,
) -> std::result::Result<Vec<i64>, WeightFailure> {
    let (parent, order) = source.rooted();
    let mut up = vec![0i64; source.vertex_count()];
    for &v in order.iter().rev() {
        let Some(p) = parent[v] else { continue };
        if source.is_leaf(v) {
            up[v] = x.get(v).abs();
            continue;
        }
        let (mut left, mut right) = (0i64, 0i64);
        for &c in source.neighbors(v) {
            if c == p {
                continue;
            }
            match levels[c].cmp(&levels[v]) {
                std::cmp::Ordering::Less => left += up[c],
                std::cmp::Ordering::Greater => right += up[c],
                std::cmp::Ordering::Equal => return Err(WeightFailure::SameLevel { vertex: v }),
            }
        }
        let w = match levels[p].cmp(&levels[v]) {
            std::cmp::Ordering::Less => right - left,
            std::cmp::Ordering::Greater => left - right,
            std::cmp::Ordering::Equal => return Err(WeightFailure::SameLevel { vertex: v }),
        };
        if w <= 0 {
            return Err(WeightFailure::NonPositive { vertex: v, weight: w });
        }
        up[v] = w;
    }
    let base = source.neighbors(0)[0];
    if up[base] != x.get(0).abs() {
        return Err(WeightFailure::EndMismatch { expected: x.get(0).abs(), got: up[base] });
    }
    Ok(source
        .edges()
        .into_iter()
        .map(|(u, v)| if parent[v] == Some(u) { up[v] } else { up[u] })
        .collect())
}

/// Every combinatorial type whose source stabilises to `tree`: surjective
/// level assignments of the internal vertices onto `1..=r` (`r <= |I|`),
/// subdivided where an edge spans several levels, kept when the weight
/// function exists.
pub fn enumerate_combinatorial_types(tree: &MarkedTree, x: &RamificationDatum) -> Result<Vec<CombinatorialType>> {
    if tree.n() != x.n() {
        return Err(Error::LengthMismatch { left: tree.n(), right: x.n() });
    }
    let g = tree.graph();
    let n = g.leaf_count();
    let k = g.vertex_count() - n;
    let edges = g.edges();
    let mut out = Vec::new();
    for r in 1..=k {
        let mut assign = vec![0usize; k];
        loop {
            if let Some(ct) = try_assignment(&g, &edges, &assign, r, x) {
                out.push(ct);
            }
            // next assignment in base r
            let mut i = 0;
            while i < k {
                assign[i] += 1;
                if assign[i] < r {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(out)
}

fn try_assignment(
    g: &TreeGraph,
    edges: &[(usize, usize)],
    assign: &[usize],
    r: usize,
    x: &RamificationDatum,
) -> Option<CombinatorialType> {
    let n = g.leaf_count();
    let mut hit = vec![false; r];
    for &a in assign {
        hit[a] = true;
    }
    if hit.contains(&false) {
        return None;
    }
    let mut levels: Vec<usize> = (0..n).map(|i| if x.get(i) > 0 { 0 } else { r + 1 }).collect();
    levels.extend(assign.iter().map(|a| a + 1));
    let mut new_edges = Vec::with_capacity(edges.len());
    let mut next = g.vertex_count();
    for &(u, v) in edges {
        let (lu, lv) = (levels[u], levels[v]);
        if lu == lv {
            return None;
        }
        let span = lu.abs_diff(lv);
        let step: isize = if lv > lu { 1 } else { -1 };
        let mut prev = u;
        for s in 1..span {
            levels.push((lu as isize + step * s as isize) as usize);
            new_edges.push((prev, next));
            prev = next;
            next += 1;
        }
        new_edges.push((prev, v));
    }
    let source = TreeGraph::new(n, next, &new_edges).ok()?;
    let weights = weight_function(&source, &levels, x).ok()?;
    Some(CombinatorialType { edges: source.edges(), source, target_length: r, levels, weights })
}

/// For every internal vertex `v` and internal edge `e'` at `v`, the leaf sum
/// of the component of `T \ e'` containing `v` equals the incoming minus
/// outgoing weight at `v` inside that component.
pub fn local_calc_check(ct: &CombinatorialType, x: &RamificationDatum) -> bool {
    let g = &ct.source;
    let weights = ct.weight_map();
    for v in g.internal_vertices() {
        for &e_other in g.neighbors(v) {
            if g.is_leaf(e_other) {
                continue;
            }
            let leaf_sum = component_leaf_sum(g, v, e_other, x);
            let mut local = 0i64;
            for &u in g.neighbors(v) {
                if u == e_other {
                    continue;
                }
                let w = ct.weight(&weights, u, v);
                if ct.levels[u] < ct.levels[v] {
                    local += w;
                } else {
                    local -= w;
                }
            }
            if leaf_sum != local {
                return false;
            }
        }
    }
    true
}

fn component_leaf_sum(g: &TreeGraph, start: usize, cut: usize, x: &RamificationDatum) -> i64 {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    seen[cut] = true;
    let mut stack = vec![start];
    let mut total = 0;
    while let Some(w) = stack.pop() {
        if g.is_leaf(w) {
            total += x.get(w);
        }
        for &y in g.neighbors(w) {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    total
}

/// `[M_x(T)]` summed over combinatorial types.
pub fn class_via_types(tree: &MarkedTree, x: &RamificationDatum) -> Result<GClass> {
    enumerate_combinatorial_types(tree, x)?
        .iter()
        .try_fold(GClass::zero(), |acc, ct| Ok(&acc + &ct.class()?))
}

/// `o_T` computed from the central-chamber directing of the underlying
/// marked tree.
pub fn central_orderings(tree: &RibbonRootedTree) -> Result<BigInt> {
    let (g, _) = tree.embedding();
    let marked = MarkedTree::from_graph(&g)?;
    let x = RamificationDatum::central(tree.leaf_count())?;
    strata::linear_extensions(&strata::x_directing(&marked, &x)?)
}

/// `Σ_{T ∈ RRT(m), N_T <= order} a_T o_T t^{N_T}`.
pub fn rrt_nu(m: usize, order: usize) -> Result<TruncatedSeries> {
    if m == 0 {
        return Err(Error::InvalidArgument("RRT(0) is empty".into()));
    }
    let mut coeffs = vec![Rational::zero(); order + 1];
    for t in enumerate_rrt(m, order) {
        let (a, n) = stats(&t);
        coeffs[n] += a * Rational::from_integer(central_orderings(&t)?);
    }
    Ok(TruncatedSeries::from_coeffs(order, coeffs))
}

/// Result of regrouping `RRT(m)` by decomposition type.
#[derive(Clone, Debug)]
pub struct CakeReport {
    /// Right-hand side of the regrouped sum.
    pub regrouped: TruncatedSeries,
    /// Direct ribbon sum.
    pub direct: TruncatedSeries,
    /// Number of trees assigned to each `(k, j, λ)`.
    pub type_counts: BTreeMap<trees::DecompositionTypeRecord, usize>,
    pub tree_count: usize,
}

impl CakeReport {
    pub fn holds(&self) -> bool {
        self.regrouped == self.direct && self.type_counts.values().sum::<usize>() == self.tree_count
    }
}

/// Regroups `RRT(m)` by decomposition type and evaluates
/// `Σ_j ν_1^{(j)} / j! · Σ_λ (m-1)!/∏(i!)^{λ_i} · Σ_{tuples} ∏ a o t^N`.
pub fn cake_report(m: usize, order: usize) -> Result<CakeReport> {
    if m < 2 {
        return Err(Error::InvalidArgument("regrouping needs m >= 2".into()));
    }
    let all = enumerate_rrt(m, order);
    let mut type_counts = BTreeMap::new();
    let mut tuples: BTreeMap<(usize, Vec<usize>), BTreeSet<Vec<RibbonRootedTree>>> = BTreeMap::new();
    for t in &all {
        let d = decomposition_type(t);
        *type_counts.entry(d.record.clone()).or_insert(0) += 1;
        tuples.entry((d.record.j, d.record.lambda.clone())).or_default().insert(d.subtrees);
    }

    let mut regrouped = TruncatedSeries::zero(order);
    for ((j, lambda), group) in &tuples {
        let mut inner = TruncatedSeries::zero(order);
        for tuple in group {
            let mut term = TruncatedSeries::one(order);
            for sub in tuple {
                let (a, n) = stats(sub);
                let c = a * Rational::from_integer(sub.orderings());
                term = &term * &TruncatedSeries::monomial(c, n, order);
            }
            inner = &inner + &term;
        }
        let mut denom = factorial(*j);
        for (i, &count) in lambda.iter().enumerate() {
            denom *= num_traits::pow(factorial(i + 1), count);
        }
        let scale = Rational::new(factorial(m - 1), denom);
        regrouped = &regrouped + &(&nu1_derivative(*j, order) * &inner).scale(&scale);
    }
    Ok(CakeReport { regrouped, direct: rrt_nu(m, order)?, type_counts, tree_count: all.len() })
}

pub fn cake_check(m: usize, order: usize) -> Result<bool> {
    Ok(cake_report(m, order)?.holds())
}

/// Number of set partitions of `{1..m}` into exactly `j` blocks, by walking
/// restricted growth strings.
pub fn stirling2_brute(m: usize, j: usize) -> u64 {
    fn rec(pos: usize, m: usize, used: usize, j: usize) -> u64 {
        if pos == m {
            return u64::from(used == j);
        }
        let mut total = 0;
        for b in 0..=used.min(j.saturating_sub(1)) {
            total += rec(pos + 1, m, used.max(b + 1), j);
        }
        total
    }
    if m == 0 {
        return u64::from(j == 0);
    }
    rec(0, m, 0, j)
}

/// `g(f(t))` by expanding `Σ g_k f^k` term by term, truncated at `f`'s order.
pub fn substitute_naive(g: &[Rational], f: &TruncatedSeries) -> TruncatedSeries {
    let order = f.order();
    let mut acc = TruncatedSeries::zero(order);
    let mut power = TruncatedSeries::one(order);
    for c in g {
        acc = &acc + &power.scale(c);
        power = &power * f;
    }
    acc
}

/// Linear extensions by filtering all permutations (Heap's algorithm).
pub fn linear_extensions_brute(order: &Poset) -> Result<u64> {
    let k = order.len();
    if k > 10 {
        return Err(Error::BoundExceeded { what: "brute-force poset size", value: k, bound: 10 });
    }
    let respects = |perm: &[usize]| {
        perm.iter().enumerate().all(|(i, &a)| perm[i + 1..].iter().all(|&b| !order.lt(b, a)))
    };
    let mut perm: Vec<usize> = (0..k).collect();
    let mut count = u64::from(respects(&perm));
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            count += u64::from(respects(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(count)
}

/// `Σ_T ∏ A_val` over `Γ_{0,n}` computed from an explicit tree list.
pub fn tree_weight_sum(n: usize) -> Result<BigInt> {
    Ok(trees::enumerate_stable_trees(n)?
        .iter()
        .map(|t| t.internal_valences().into_iter().map(trees::vertex_weight).product::<BigInt>())
        .fold(BigInt::zero(), |a, b| a + b))
}
