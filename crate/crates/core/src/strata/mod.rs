//! x-dependent structure on stable trees and the resulting classes.
//!
//! For a ramification datum `x` each tree `T` in `Γ_{0,n}` is directed by the
//! signs of its subtree weights. The stratum of maps with stabilised source
//! `T` has class
//!
//! ```text
//! ∏_{v internal} [M_{0,val v}] · Σ_P (L - 1)^{|I(T)| - ℓ(P) + 2}
//! ```
//!
//! summed over admissible ordered partitions `P` of the vertices.

mod gclass;
mod poset;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::chambers;
use crate::error::{Error, Result};
use crate::trees::{self, vertex_weight, MarkedTree, TreeGraph};

pub use gclass::GClass;
pub use poset::{bits, Poset, MAX_DP_ELEMENTS};

/// A validated ramification datum: nonzero integers summing to zero with no
/// vanishing proper subset sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RamificationDatum {
    x: Vec<i64>,
}

impl RamificationDatum {
    /// Validates `x`; see [`chambers::validate`].
    pub fn new(x: Vec<i64>) -> Result<Self> {
        Ok(chambers::validate(&x)?)
    }

    pub(crate) fn from_validated(x: Vec<i64>) -> Self {
        Self { x }
    }

    /// `(n, -1, ..., -1)` with `n + 1` entries: the central chamber datum
    /// whose space of maps is the maximally ramified one over `0`.
    pub fn central(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("central datum needs n >= 2, got {n}")));
        }
        let mut x = vec![-1i64; n + 1];
        x[0] = n as i64;
        Self::new(x)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.x
    }

    pub fn get(&self, i: usize) -> i64 {
        self.x[i]
    }

    /// Sum of the entries selected by a leaf bitmask.
    pub fn mask_sum(&self, mask: u64) -> i64 {
        bits(mask).map(|i| self.x[i]).sum()
    }

    /// Bitmask of positive entries (the first block of every partition).
    pub fn positive_mask(&self) -> u64 {
        self.x.iter().enumerate().filter(|(_, &v)| v > 0).fold(0, |m, (i, _)| m | 1u64 << i)
    }

    pub fn negative_mask(&self) -> u64 {
        self.x.iter().enumerate().filter(|(_, &v)| v < 0).fold(0, |m, (i, _)| m | 1u64 << i)
    }
}

fn check_lengths(tree: &MarkedTree, x: &RamificationDatum) -> Result<()> {
    if tree.n() != x.n() {
        return Err(Error::LengthMismatch { left: tree.n(), right: x.n() });
    }
    Ok(())
}

/// Sum of `x_i` over the leaves in the component of `T \ {e}` containing
/// `side`, where `e = (u, v)` is an edge of `tree.graph()` and `side` is `u`
/// or `v`.
pub fn subtree_weight(tree: &MarkedTree, x: &RamificationDatum, edge: (usize, usize), side: usize) -> Result<i64> {
    check_lengths(tree, x)?;
    let g = tree.graph();
    let (u, v) = edge;
    if u >= g.vertex_count() || !g.neighbors(u).contains(&v) {
        return Err(Error::InvalidArgument(format!("({u}, {v}) is not an edge")));
    }
    if side != u && side != v {
        return Err(Error::InvalidArgument(format!("{side} is not an endpoint of ({u}, {v})")));
    }
    let other = if side == u { v } else { u };
    let mut stack = vec![side];
    let mut seen = vec![false; g.vertex_count()];
    seen[side] = true;
    seen[other] = true;
    let mut total = 0i64;
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
    Ok(total)
}

/// A stable tree with its x-directing. Vertex ids follow [`MarkedTree::graph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedMarkedTree {
    tree: MarkedTree,
    graph: TreeGraph,
    parent: Vec<Option<usize>>,
    /// `up[v]`: the edge between `v` and its parent (rooted at leaf 1)
    /// points towards the parent.
    up: Vec<bool>,
}

impl DirectedMarkedTree {
    pub fn tree(&self) -> &MarkedTree {
        &self.tree
    }

    pub fn graph(&self) -> &TreeGraph {
        &self.graph
    }

    /// All arcs as `(tail, head)`, ordered by the non-root endpoint.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.graph.vertex_count())
            .filter_map(|v| {
                self.parent[v].map(|p| if self.up[v] { (v, p) } else { (p, v) })
            })
            .collect()
    }

    /// Whether the edge `{u, v}` is directed from `u` to `v`.
    pub fn is_arc(&self, u: usize, v: usize) -> bool {
        if self.parent[v] == Some(u) {
            !self.up[v]
        } else if self.parent[u] == Some(v) {
            self.up[u]
        } else {
            false
        }
    }

    pub fn internal_mask(&self) -> u64 {
        let n = self.graph.leaf_count();
        let total = self.graph.vertex_count();
        (((1u128 << total) - 1) as u64) & !(((1u128 << n) - 1) as u64)
    }

    /// `≤ₓ` restricted to internal vertices, element `i` being vertex `n + i`.
    pub fn internal_poset(&self) -> Poset {
        partial_order(self).restrict(self.internal_mask())
    }
}

/// Directs every edge away from the component of positive weight.
pub fn x_directing(tree: &MarkedTree, x: &RamificationDatum) -> Result<DirectedMarkedTree> {
    check_lengths(tree, x)?;
    let graph = tree.graph();
    let (parent, below) = graph.leaf_sets_below();
    let up = (0..graph.vertex_count())
        .map(|v| parent[v].is_some() && x.mask_sum(below[v]) > 0)
        .collect();
    Ok(DirectedMarkedTree { tree: tree.clone(), graph, parent, up })
}

/// Reachability order on all vertices of the directed tree.
pub fn partial_order(d: &DirectedMarkedTree) -> Poset {
    Poset::from_relations(d.graph.vertex_count(), &d.arcs()).expect("a directed tree is acyclic")
}

/// Linear extensions of `≤ₓ` on the internal vertices.
pub fn linear_extensions(d: &DirectedMarkedTree) -> Result<BigInt> {
    d.internal_poset().linear_extensions()
}

/// Ordered partition of the vertex set, blocks as vertex bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    pub blocks: Vec<u64>,
}

impl OrderedPartition {
    /// `ℓ(P)`, including the two leaf blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as sorted vertex lists.
    pub fn block_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| bits(b).collect()).collect()
    }
}

/// Checks the three admissibility conditions on an arbitrary ordered
/// partition of the elements of `order`.
pub fn is_admissible(order: &Poset, p: &OrderedPartition) -> bool {
    let k = p.blocks.len();
    if k < 2 || p.blocks.contains(&0) {
        return false;
    }
    let union = p.blocks.iter().fold(0u64, |a, &b| a | b);
    let total: u32 = p.blocks.iter().map(|b| b.count_ones()).sum();
    if union != order.full() || total != union.count_ones() {
        return false;
    }
    let mut earlier = 0u64;
    for (i, &block) in p.blocks.iter().enumerate() {
        // (1) antichain
        if !order.is_antichain(block) {
            return false;
        }
        // (2) nothing in this block lies below anything earlier
        if bits(block).any(|a| order.strictly_above(a) & earlier != 0) {
            return false;
        }
        // (3) middle elements are sandwiched
        if i > 0 && i + 1 < k {
            let later = union & !earlier & !block;
            if bits(block).any(|a| order.strictly_below(a) & earlier == 0 || order.strictly_above(a) & later == 0) {
                return false;
            }
        }
        earlier |= block;
    }
    true
}

/// `P_x(T)`: the admissible ordered partitions with first block the positive
/// leaves and last block the negative leaves.
pub fn admissible_partitions(tree: &MarkedTree, x: &RamificationDatum) -> Result<Vec<OrderedPartition>> {
    let d = x_directing(tree, x)?;
    let order = partial_order(&d);
    let internal = d.internal_mask();
    let mut out = Vec::new();
    let mut blocks = vec![x.positive_mask()];
    middle_blocks(&order, internal, &mut blocks, &mut |blocks| {
        let mut b = blocks.to_vec();
        b.push(x.negative_mask());
        out.push(OrderedPartition { blocks: b });
    });
    out.retain(|p| is_admissible(&order, p));
    Ok(out)
}

/// Each block is a nonempty set of currently minimal remaining vertices.
fn middle_blocks<F>(order: &Poset, remaining: u64, blocks: &mut Vec<u64>, emit: &mut F)
where
    F: FnMut(&[u64]),
{
    if remaining == 0 {
        emit(blocks);
        return;
    }
    let minimal = order.minimal_in(remaining);
    let mut sub = minimal;
    while sub != 0 {
        blocks.push(sub);
        middle_blocks(order, remaining & !sub, blocks, emit);
        blocks.pop();
        sub = (sub - 1) & minimal;
    }
}

/// `[M_{0,m}] = ∏_{i=2}^{m-2} (L - i)`.
pub fn class_m0m(m: usize) -> Result<GClass> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("M_(0,{m}) is empty or unstable")));
    }
    Ok((2..=m - 2).fold(GClass::one(), |acc, i| &acc * &GClass::from_i64(&[-(i as i64), 1])))
}

/// Counts admissible partitions of `order` by number of blocks: entry `r`
/// is the number of ways to cut it into `r` consecutive antichains.
fn partition_counts(order: &Poset) -> Vec<BigInt> {
    fn go(order: &Poset, remaining: u64, memo: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
        if remaining == 0 {
            return vec![BigInt::one()];
        }
        if let Some(v) = memo.get(&remaining) {
            return v.clone();
        }
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); remaining.count_ones() as usize + 1];
        let minimal = order.minimal_in(remaining);
        let mut sub = minimal;
        while sub != 0 {
            let rest = go(order, remaining & !sub, memo);
            for (r, c) in rest.iter().enumerate() {
                acc[r + 1] += c;
            }
            sub = (sub - 1) & minimal;
        }
        memo.insert(remaining, acc.clone());
        acc
    }
    go(order, order.full(), &mut HashMap::new())
}

fn vertex_class_product(tree: &MarkedTree) -> Result<GClass> {
    tree.internal_valences()
        .into_iter()
        .try_fold(GClass::one(), |acc, v| Ok(&acc * &class_m0m(v)?))
}

/// `[M_x(T)]`.
pub fn stratum_class(tree: &MarkedTree, x: &RamificationDatum) -> Result<GClass> {
    let d = x_directing(tree, x)?;
    let internal = d.internal_poset();
    let size = internal.len();
    let counts = partition_counts(&internal);
    let torus = GClass::punctured_line();
    let mut sum = GClass::zero();
    for (r, c) in counts.iter().enumerate().skip(1) {
        if !c.is_zero() {
            sum = &sum + &(&GClass::constant(c.clone()) * &torus.pow(size - r));
        }
    }
    Ok(&vertex_class_product(tree)? * &sum)
}

/// `[M̄(x)]`, summed over `Γ_{0,n}` in parallel.
pub fn total_class(x: &RamificationDatum) -> Result<GClass> {
    total_class_with_bound(x, trees::DEFAULT_TREE_BOUND)
}

pub fn total_class_with_bound(x: &RamificationDatum, bound: usize) -> Result<GClass> {
    let all = trees::enumerate_stable_trees_with_bound(x.n(), bound)?;
    sum_classes(&all, x)
}

/// Sum of stratum classes over the given trees.
pub fn sum_classes(trees: &[MarkedTree], x: &RamificationDatum) -> Result<GClass> {
    trees
        .par_iter()
        .map(|t| stratum_class(t, x))
        .try_reduce(GClass::zero, |a, b| Ok(&a + &b))
}

/// `χ(M̄(x))` from the linear-extension formula: only the partitions with one
/// internal vertex per block survive at `L = 1`.
pub fn euler_char(x: &RamificationDatum) -> Result<BigInt> {
    euler_char_with_bound(x, trees::DEFAULT_TREE_BOUND)
}

pub fn euler_char_with_bound(x: &RamificationDatum, bound: usize) -> Result<BigInt> {
    let all = trees::enumerate_stable_trees_with_bound(x.n(), bound)?;
    all.par_iter()
        .map(|t| -> Result<BigInt> {
            let weight: BigInt = t.internal_valences().into_iter().map(vertex_weight).product();
            Ok(weight * linear_extensions(&x_directing(t, x)?)?)
        })
        .try_reduce(BigInt::zero, |a, b| Ok(a + b))
}

/// `χ(M̄(x))` by evaluating the class at `L = 1`.
pub fn euler_char_via_class(x: &RamificationDatum) -> Result<BigInt> {
    Ok(total_class(x)?.euler_characteristic())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(x: &[i64]) -> RamificationDatum {
        RamificationDatum::new(x.to_vec()).unwrap()
    }

    fn double_cherry() -> MarkedTree {
        MarkedTree::parse(5, "1,4,5|2,3;1,2,3|4,5").unwrap()
    }

    #[test]
    fn weights_of_sides() {
        let t = MarkedTree::parse(4, "1,2|3,4").unwrap();
        let x = datum(&[3, -1, -1, -1]);
        let g = t.graph();
        // base vertex 4 carries leaves 1, 2; vertex 5 carries 3, 4
        assert_eq!(subtree_weight(&t, &x, (4, 5), 4).unwrap(), 2);
        assert_eq!(subtree_weight(&t, &x, (4, 5), 5).unwrap(), -2);
        assert_eq!(subtree_weight(&t, &x, (2, g.neighbors(2)[0]), 2).unwrap(), -1);
        assert!(subtree_weight(&t, &x, (0, 5), 0).is_err());
    }

    #[test]
    fn tripod_directing_and_partition() {
        let t = MarkedTree::star(3).unwrap();
        let x = datum(&[2, -1, -1]);
        let d = x_directing(&t, &x).unwrap();
        assert!(d.is_arc(0, 3));
        assert!(d.is_arc(3, 1));
        assert!(d.is_arc(3, 2));
        let p = partial_order(&d);
        assert!(p.lt(0, 3) && p.lt(3, 1) && p.lt(0, 2));
        let parts = admissible_partitions(&t, &x).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].block_lists(), vec![vec![0], vec![3], vec![1, 2]]);
        assert_eq!(stratum_class(&t, &x).unwrap(), GClass::one());
    }

    #[test]
    fn central_directing_points_away_from_leaf_one() {
        for n in 3..=6 {
            let x = RamificationDatum::central(n - 1).unwrap();
            for t in trees::enumerate_stable_trees(n).unwrap() {
                let d = x_directing(&t, &x).unwrap();
                let (parent, _) = d.graph().rooted();
                for v in 1..d.graph().vertex_count() {
                    assert!(d.is_arc(parent[v].unwrap(), v));
                }
            }
        }
    }

    #[test]
    fn double_cherry_structure() {
        let t = double_cherry();
        let x = RamificationDatum::central(4).unwrap();
        let d = x_directing(&t, &x).unwrap();
        let p = d.internal_poset();
        assert_eq!(p.len(), 3);
        // element 0 is the base (centre), 1 and 2 the cherries
        assert!(p.lt(0, 1) && p.lt(0, 2) && !p.comparable(1, 2));
        assert_eq!(linear_extensions(&d).unwrap(), BigInt::from(2));
        let parts = admissible_partitions(&t, &x).unwrap();
        let mut lens: Vec<usize> = parts.iter().map(OrderedPartition::len).collect();
        lens.sort();
        assert_eq!(lens, vec![4, 5, 5]);
        assert_eq!(stratum_class(&t, &x).unwrap(), GClass::from_i64(&[1, 1]));
    }

    #[test]
    fn two_vertex_tree_single_partition() {
        let x = RamificationDatum::central(3).unwrap();
        for t in trees::enumerate_stable_trees(4).unwrap().into_iter().skip(1) {
            let parts = admissible_partitions(&t, &x).unwrap();
            assert_eq!(parts.len(), 1);
            assert_eq!(parts[0].len(), 4);
        }
    }

    #[test]
    fn m0m_classes() {
        assert_eq!(class_m0m(3).unwrap(), GClass::one());
        assert_eq!(class_m0m(4).unwrap(), GClass::from_i64(&[-2, 1]));
        let c5 = class_m0m(5).unwrap();
        assert_eq!(c5, GClass::from_i64(&[6, -5, 1]));
        for m in 3..=9 {
            assert_eq!(class_m0m(m).unwrap().euler_characteristic(), vertex_weight(m));
        }
        assert!(class_m0m(2).is_err());
    }

    #[test]
    fn star_and_totals() {
        let x = datum(&[3, -1, -1, -1]);
        assert_eq!(stratum_class(&MarkedTree::star(4).unwrap(), &x).unwrap(), GClass::from_i64(&[-2, 1]));
        assert_eq!(total_class(&x).unwrap(), GClass::from_i64(&[1, 1]));
        assert_eq!(total_class(&datum(&[2, -1, -1])).unwrap(), GClass::one());
        assert_eq!(euler_char_via_class(&RamificationDatum::central(4).unwrap()).unwrap(), BigInt::from(10));
        assert_eq!(euler_char(&RamificationDatum::central(5).unwrap()).unwrap(), BigInt::from(84));
        assert_eq!(euler_char(&datum(&[2, -1, -1])).unwrap(), BigInt::from(1));
    }

    #[test]
    fn counts_match_explicit_partitions() {
        let x = datum(&[3, 2, -1, -4]);
        for t in trees::enumerate_stable_trees(4).unwrap() {
            let d = x_directing(&t, &x).unwrap();
            let counts = partition_counts(&d.internal_poset());
            let parts = admissible_partitions(&t, &x).unwrap();
            let total: BigInt = counts.iter().sum();
            assert_eq!(total, BigInt::from(parts.len()));
        }
    }

    #[test]
    fn admissibility_rejects_bad_partitions() {
        let p = Poset::from_relations(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(is_admissible(&p, &OrderedPartition { blocks: vec![1, 2, 4] }));
        assert!(!is_admissible(&p, &OrderedPartition { blocks: vec![1, 6] }));
        assert!(!is_admissible(&p, &OrderedPartition { blocks: vec![2, 1, 4] }));
        assert!(!is_admissible(&p, &OrderedPartition { blocks: vec![1, 4] }));
    }
}
