//! Stable `n`-marked trees (the set `Γ_{0,n}`) and ribbon rooted trees.
//!
//! A stable marked tree has no label-fixing automorphisms, so it is
//! determined by its set of splits: the leaf bipartitions cut out by its
//! internal edges. [`MarkedTree`] stores exactly that, canonicalised as the
//! sorted list of sides containing leaf 1 (as bitmasks, bit `i` = leaf `i+1`).

mod ribbon;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::series::factorial;

pub use ribbon::{
    decomposition_type, enumerate_rrt, reassemble, stats, Decomposition, DecompositionTypeRecord,
    PlaneTree, RibbonRootedTree,
};

/// Leaves are stored as bits of a `u64` and vertices index `u64` masks in the
/// strata code, so `2n - 2 <= 64`.
pub const MAX_LEAVES: usize = 32;

/// Default feasibility bound for enumerating `Γ_{0,n}` (660032 trees at 9).
pub const DEFAULT_TREE_BOUND: usize = 9;

/// `A_d = χ(M_{0,d})`: `A_1 = 1` and `(-1)^{d-1} (d-3)!` for `d >= 3`.
///
/// # Panics
///
/// For `d = 0` or `d = 2`, which never occur in a stable tree.
pub fn vertex_weight(d: usize) -> BigInt {
    match d {
        1 => BigInt::from(1),
        0 | 2 => panic!("no vertex weight for valence {d}"),
        _ => {
            let f = factorial(d - 3);
            if d % 2 == 1 {
                f
            } else {
                -f
            }
        }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Plain adjacency for a tree whose vertices `0..leaves` are the leaves,
/// vertex `i` carrying label `i + 1`. Internal vertices follow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeGraph {
    leaves: usize,
    adj: Vec<Vec<usize>>,
}

impl TreeGraph {
    /// Builds the graph and checks that it is a tree whose first `leaves`
    /// vertices have valence one. Bivalent internal vertices are allowed.
    pub fn new(leaves: usize, vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count < leaves {
            return Err(Error::InvalidTree("fewer vertices than leaves".into()));
        }
        if edges.len() + 1 != vertex_count {
            return Err(Error::InvalidTree(format!(
                "{} edges on {} vertices is not a tree",
                edges.len(),
                vertex_count
            )));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let g = Self { leaves, adj };
        if g.preorder().len() != vertex_count {
            return Err(Error::InvalidTree("graph is disconnected".into()));
        }
        for v in 0..leaves {
            if g.adj[v].len() != 1 {
                return Err(Error::InvalidTree(format!("leaf {} has valence {}", v + 1, g.adj[v].len())));
            }
        }
        for v in leaves..vertex_count {
            if g.adj[v].len() < 2 {
                return Err(Error::Unstable(format!("unlabelled vertex {v} has valence {}", g.adj[v].len())));
            }
        }
        Ok(g)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.leaves
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn internal_vertices(&self) -> std::ops::Range<usize> {
        self.leaves..self.adj.len()
    }

    /// Every edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.adj.len().saturating_sub(1));
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices in depth-first preorder from leaf 1 (vertex 0).
    pub fn preorder(&self) -> Vec<usize> {
        self.rooted().1
    }

    /// Parent pointers and preorder for the tree rooted at vertex 0.
    pub fn rooted(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        let n = self.adj.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        if n == 0 {
            return (parent, order);
        }
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in self.adj[v].iter().rev() {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    stack.push(w);
                }
            }
        }
        (parent, order)
    }

    /// Leaf bitmask below each vertex when rooted at leaf 1.
    pub fn leaf_sets_below(&self) -> (Vec<Option<usize>>, Vec<u64>) {
        let (parent, order) = self.rooted();
        let mut below = vec![0u64; self.adj.len()];
        for &v in order.iter().rev() {
            if self.is_leaf(v) {
                below[v] |= 1u64 << v;
            }
            if let Some(p) = parent[v] {
                below[p] |= below[v];
            }
        }
        (parent, below)
    }
}

/// A stable tree with leaves labelled `1..=n`, stored by its splits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedTree {
    n: usize,
    splits: Vec<u64>,
}

impl MarkedTree {
    /// Canonicalises and validates a split set. Each split may be given by
    /// either side; trivial or incompatible splits are rejected.
    pub fn from_splits(n: usize, splits: &[u64]) -> Result<Self> {
        if !(3..=MAX_LEAVES).contains(&n) {
            return Err(Error::InvalidTree(format!("n = {n} outside 3..={MAX_LEAVES}")));
        }
        let full = full_mask(n);
        let mut canon = BTreeSet::new();
        for &s in splits {
            if s & !full != 0 {
                return Err(Error::InvalidTree(format!("split {s:#b} mentions leaves beyond {n}")));
            }
            let a = if s & 1 == 1 { s } else { full ^ s };
            let size = a.count_ones() as usize;
            if size < 2 || n - size < 2 {
                return Err(Error::InvalidTree(format!("trivial split {}", fmt_split(a, n))));
            }
            canon.insert(a);
        }
        let canon: Vec<u64> = canon.into_iter().collect();
        for (i, &a) in canon.iter().enumerate() {
            for &b in &canon[i + 1..] {
                if !compatible(a, b, full) {
                    return Err(Error::InvalidTree(format!(
                        "incompatible splits {} and {}",
                        fmt_split(a, n),
                        fmt_split(b, n)
                    )));
                }
            }
        }
        Ok(Self { n, splits: canon })
    }

    /// The star tree with a single internal vertex.
    pub fn star(n: usize) -> Result<Self> {
        Self::from_splits(n, &[])
    }

    /// Reads a stable tree from a graph. Bivalent vertices are rejected; use
    /// [`stabilize`] to smooth them first.
    pub fn from_graph(g: &TreeGraph) -> Result<Self> {
        if let Some(v) = g.internal_vertices().find(|&v| g.valence(v) == 2) {
            return Err(Error::InvalidTree(format!("vertex {v} is bivalent")));
        }
        let t = stabilize(g)?;
        if t.internal_count() != g.internal_vertices().len() {
            return Err(Error::InvalidTree("graph has repeated splits".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical splits: the side containing leaf 1, sorted.
    pub fn splits(&self) -> &[u64] {
        &self.splits
    }

    pub fn internal_edge_count(&self) -> usize {
        self.splits.len()
    }

    /// `|I(T)|`.
    pub fn internal_count(&self) -> usize {
        self.splits.len() + 1
    }

    pub fn has_split(&self, side: u64) -> bool {
        let full = full_mask(self.n);
        let a = if side & 1 == 1 { side } else { full ^ side };
        self.splits.binary_search(&a).is_ok()
    }

    /// Adjacency with leaves `0..n`, the base vertex (next to leaf 1) at `n`
    /// and the vertex below split `k` at `n + 1 + k`.
    pub fn graph(&self) -> TreeGraph {
        let n = self.n;
        let full = full_mask(n);
        // clusters: leaf sets away from leaf 1; index 0 is the base vertex
        let mut clusters = Vec::with_capacity(self.splits.len() + 1);
        clusters.push(full & !1);
        clusters.extend(self.splits.iter().map(|&a| full ^ a));

        let smallest_containing = |set: u64, skip: Option<usize>| -> usize {
            let mut best = 0usize;
            let mut best_size = u32::MAX;
            for (i, &c) in clusters.iter().enumerate() {
                if Some(i) == skip || c & set != set || c == set {
                    continue;
                }
                if c.count_ones() < best_size {
                    best = i;
                    best_size = c.count_ones();
                }
            }
            best
        };

        let mut edges = Vec::with_capacity(n + self.splits.len());
        edges.push((0, n));
        for leaf in 1..n {
            let c = smallest_containing(1u64 << leaf, None);
            edges.push((leaf, n + c));
        }
        for i in 1..clusters.len() {
            let c = smallest_containing(clusters[i], Some(i));
            edges.push((n + i, n + c));
        }
        TreeGraph::new(n, n + clusters.len(), &edges).expect("compatible splits form a tree")
    }

    /// Valences of the internal vertices, in the vertex order of [`graph`](Self::graph).
    pub fn internal_valences(&self) -> Vec<usize> {
        let g = self.graph();
        g.internal_vertices().map(|v| g.valence(v)).collect()
    }

    /// Parses the text form produced by `Display` (`*` for the star tree).
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "*" || text.is_empty() {
            return Self::star(n);
        }
        let mut splits = Vec::new();
        for part in text.split(';') {
            let (left, right) = part
                .split_once('|')
                .ok_or_else(|| Error::InvalidTree(format!("split `{part}` lacks `|`")))?;
            let l = parse_side(left, n)?;
            let r = parse_side(right, n)?;
            if l & r != 0 || (l | r) != full_mask(n) {
                return Err(Error::InvalidTree(format!("`{part}` is not a bipartition of 1..={n}")));
            }
            splits.push(l);
        }
        Self::from_splits(n, &splits)
    }
}

fn parse_side(side: &str, n: usize) -> Result<u64> {
    let mut mask = 0u64;
    for tok in side.split(',') {
        let label: usize = tok
            .trim()
            .parse()
            .map_err(|_| Error::InvalidTree(format!("bad leaf label `{tok}`")))?;
        if label == 0 || label > n {
            return Err(Error::InvalidTree(format!("leaf label {label} outside 1..={n}")));
        }
        mask |= 1u64 << (label - 1);
    }
    Ok(mask)
}

fn compatible(a: u64, b: u64, full: u64) -> bool {
    a & !b == 0 || b & !a == 0 || (a | b) == full
}

fn fmt_side(mask: u64) -> String {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_split(a: u64, n: usize) -> String {
    format!("{}|{}", fmt_side(a), fmt_side(full_mask(n) ^ a))
}

impl fmt::Display for MarkedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.splits.is_empty() {
            return write!(f, "*");
        }
        let parts: Vec<String> = self.splits.iter().map(|&a| fmt_split(a, self.n)).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Smooths bivalent vertices and returns the resulting stable tree.
pub fn stabilize(g: &TreeGraph) -> Result<MarkedTree> {
    let n = g.leaf_count();
    if n < 3 {
        return Err(Error::Unstable(format!("only {n} leaves")));
    }
    if n > MAX_LEAVES {
        return Err(Error::BoundExceeded { what: "leaves", value: n, bound: MAX_LEAVES });
    }
    let full = full_mask(n);
    let (parent, below) = g.leaf_sets_below();
    let mut splits = BTreeSet::new();
    for v in g.internal_vertices() {
        if let Some(p) = parent[v] {
            if g.is_leaf(p) {
                continue;
            }
            let a = full ^ below[v];
            let size = a.count_ones() as usize;
            if size >= 2 && n - size >= 2 {
                splits.insert(a);
            }
        }
    }
    MarkedTree::from_splits(n, &splits.into_iter().collect::<Vec<_>>())
}

/// Calls `visit` once for every tree in `Γ_{0,n}`, generated by inserting
/// leaves `4, 5, ..., n` into every edge and internal vertex of the tripod.
/// Each tree arises exactly once: deleting leaf `n` and smoothing recovers
/// the parent tree together with the insertion point.
pub fn for_each_stable_tree<F>(n: usize, bound: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&MarkedTree),
{
    if n < 3 {
        return Err(Error::InvalidArgument(format!("Γ_(0,{n}) needs n >= 3")));
    }
    let bound = bound.min(MAX_LEAVES);
    if n > bound {
        return Err(Error::BoundExceeded { what: "n", value: n, bound });
    }
    let mut clusters = Vec::with_capacity(n);
    insert_leaves(3, n, &mut clusters, &mut visit);
    Ok(())
}

/// `clusters` holds the nontrivial leaf sets away from leaf 1 for a tree on
/// leaves `0..k`; the base cluster `{1..k-1}` is implicit.
fn insert_leaves<F>(k: usize, n: usize, clusters: &mut Vec<u64>, visit: &mut F)
where
    F: FnMut(&MarkedTree),
{
    if k == n {
        let full = full_mask(n);
        let mut splits: Vec<u64> = clusters.iter().map(|&c| full ^ c).collect();
        splits.sort_unstable();
        visit(&MarkedTree { n, splits });
        return;
    }
    let bit = 1u64 << k;
    let base = full_mask(k) & !1;
    let saved = clusters.clone();

    // attach to an internal vertex: every cluster containing it gains the leaf
    let mut vertices = Vec::with_capacity(saved.len() + 1);
    vertices.push(base);
    vertices.extend(saved.iter().copied());
    for &x in &vertices {
        clusters.clear();
        clusters.extend(saved.iter().map(|&d| if d & x == x { d | bit } else { d }));
        insert_leaves(k + 1, n, clusters, visit);
    }

    // subdivide the edge above a vertex y: the new vertex has children y and
    // the new leaf
    let mut tops: Vec<u64> = (1..k).map(|i| 1u64 << i).collect();
    tops.extend(saved.iter().copied());
    for &y in &tops {
        clusters.clear();
        clusters.extend(saved.iter().map(|&d| if d & y == y && d != y { d | bit } else { d }));
        clusters.push(y | bit);
        insert_leaves(k + 1, n, clusters, visit);
    }
    // the edge between leaf 1 and the base: the old base becomes a cluster
    clusters.clear();
    clusters.extend(saved.iter().copied());
    clusters.push(base);
    insert_leaves(k + 1, n, clusters, visit);

    clusters.clear();
    clusters.extend(saved);
}

/// `Γ_{0,n}` in canonical order (sorted by split list), deduplicated.
pub fn enumerate_stable_trees(n: usize) -> Result<Vec<MarkedTree>> {
    enumerate_stable_trees_with_bound(n, DEFAULT_TREE_BOUND)
}

pub fn enumerate_stable_trees_with_bound(n: usize, bound: usize) -> Result<Vec<MarkedTree>> {
    let mut set = BTreeSet::new();
    for_each_stable_tree(n, bound, |t| {
        set.insert(t.clone());
    })?;
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(vertex_weight(1), BigInt::from(1));
        assert_eq!(vertex_weight(3), BigInt::from(1));
        assert_eq!(vertex_weight(4), BigInt::from(-1));
        assert_eq!(vertex_weight(5), BigInt::from(2));
        assert_eq!(vertex_weight(6), BigInt::from(-6));
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_stable_trees(3).unwrap().len(), 1);
        assert_eq!(enumerate_stable_trees(4).unwrap().len(), 4);
        assert_eq!(enumerate_stable_trees(5).unwrap().len(), 26);
        assert_eq!(enumerate_stable_trees(6).unwrap().len(), 236);
    }

    #[test]
    fn insertion_never_repeats() {
        for n in 4..=7 {
            let mut all = Vec::new();
            for_each_stable_tree(n, 9, |t| all.push(t.clone())).unwrap();
            let distinct: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(all.len(), distinct.len(), "n = {n}");
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(enumerate_stable_trees(10), Err(Error::BoundExceeded { .. })));
        assert!(enumerate_stable_trees(2).is_err());
    }

    #[test]
    fn n4_has_star_and_three_cherries() {
        let trees = enumerate_stable_trees(4).unwrap();
        assert_eq!(trees[0], MarkedTree::star(4).unwrap());
        let text: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
        assert_eq!(text, vec!["*", "1,2|3,4", "1,3|2,4", "1,4|2,3"]);
    }

    #[test]
    fn graph_shape_and_valences() {
        let t = MarkedTree::parse(5, "1,2,3|4,5;1,2|3,4,5").unwrap();
        let g = t.graph();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edges().len(), 7);
        assert_eq!(t.internal_valences(), vec![3, 3, 3]);
        assert_eq!(MarkedTree::from_graph(&g).unwrap(), t);
        for v in 0..5 {
            assert_eq!(g.valence(v), 1);
        }
    }

    #[test]
    fn parse_round_trip_and_errors() {
        for t in enumerate_stable_trees(6).unwrap() {
            assert_eq!(MarkedTree::parse(6, &t.to_string()).unwrap(), t);
            assert_eq!(MarkedTree::from_graph(&t.graph()).unwrap(), t);
        }
        assert!(MarkedTree::parse(4, "1|2,3,4").is_err());
        assert!(MarkedTree::parse(4, "1,2|3").is_err());
        assert!(MarkedTree::parse(5, "1,2|3,4,5;1,3|2,4,5").is_err());
    }

    #[test]
    fn either_side_gives_same_tree() {
        let a = MarkedTree::from_splits(5, &[0b00011]).unwrap();
        let b = MarkedTree::from_splits(5, &[0b11100]).unwrap();
        assert_eq!(a, b);
        assert!(a.has_split(0b11100));
    }

    #[test]
    fn stabilize_cases() {
        // tripod untouched
        let tripod = TreeGraph::new(3, 4, &[(0, 3), (1, 3), (2, 3)]).unwrap();
        assert_eq!(stabilize(&tripod).unwrap(), MarkedTree::star(3).unwrap());

        // 1,2 | 3,4 with the internal edge subdivided twice
        let g = TreeGraph::new(
            4,
            8,
            &[(0, 4), (1, 4), (4, 6), (6, 7), (7, 5), (2, 5), (3, 5)],
        )
        .unwrap();
        assert_eq!(stabilize(&g).unwrap(), MarkedTree::parse(4, "1,2|3,4").unwrap());
        assert!(MarkedTree::from_graph(&g).is_err());

        // bivalent vertex on a leaf edge
        let g = TreeGraph::new(3, 5, &[(0, 4), (4, 3), (1, 3), (2, 3)]).unwrap();
        assert_eq!(stabilize(&g).unwrap(), MarkedTree::star(3).unwrap());

        // a path between two leaves cannot be stabilised
        let path = TreeGraph::new(2, 3, &[(0, 2), (2, 1)]).unwrap();
        assert!(matches!(stabilize(&path), Err(Error::Unstable(_))));
        // nor can an unlabelled vertex of valence one
        assert!(TreeGraph::new(3, 5, &[(0, 3), (1, 3), (2, 3), (3, 4)]).is_err());
    }
}
