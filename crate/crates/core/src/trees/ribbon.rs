//! Ribbon rooted trees: stable rooted trees embedded in the plane.
//!
//! The root is a leaf; its neighbour is the base. Every internal vertex has
//! at least two children, and the cyclic order at a vertex, read starting
//! from the half-edge towards the root, is a linear order on its children.
//! So a ribbon rooted tree is the same thing as an ordered (plane) tree,
//! and isomorphism classes are generated directly without any dedup pass.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::{vertex_weight, TreeGraph};
use crate::error::{Error, Result};
use crate::series::{factorial, Rational};

/// A plane subtree hanging below some vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaneTree {
    Leaf,
    Node(Vec<PlaneTree>),
}

impl PlaneTree {
    pub fn internal_count(&self) -> usize {
        match self {
            PlaneTree::Leaf => 0,
            PlaneTree::Node(ch) => 1 + ch.iter().map(PlaneTree::internal_count).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PlaneTree::Leaf => 1,
            PlaneTree::Node(ch) => ch.iter().map(PlaneTree::leaf_count).sum(),
        }
    }

    fn is_stable(&self) -> bool {
        match self {
            PlaneTree::Leaf => true,
            PlaneTree::Node(ch) => ch.len() >= 2 && ch.iter().all(PlaneTree::is_stable),
        }
    }

    fn write_code(&self, out: &mut String) {
        match self {
            PlaneTree::Leaf => out.push('L'),
            PlaneTree::Node(ch) => {
                out.push('(');
                for c in ch {
                    c.write_code(out);
                }
                out.push(')');
            }
        }
    }

    /// Product of `A_val / (val-1)!` over internal vertices.
    fn weight(&self) -> Rational {
        match self {
            PlaneTree::Leaf => Rational::one(),
            PlaneTree::Node(ch) => {
                let mut w = vertex_factor(ch.len() + 1);
                for c in ch {
                    w *= c.weight();
                }
                w
            }
        }
    }

    /// Product of subtree sizes (internal vertices only) for the hook formula.
    fn hook_product(&self, acc: &mut BigInt) -> usize {
        match self {
            PlaneTree::Leaf => 0,
            PlaneTree::Node(ch) => {
                let size = 1 + ch.iter().map(|c| c.hook_product(acc)).sum::<usize>();
                *acc *= BigInt::from(size);
                size
            }
        }
    }
}

fn vertex_factor(val: usize) -> Rational {
    Rational::new(vertex_weight(val), factorial(val - 1))
}

/// A ribbon rooted tree, stored as the ordered children of its base.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RibbonRootedTree {
    base: Vec<PlaneTree>,
}

impl RibbonRootedTree {
    /// Checks stability: the base and every internal vertex need at least
    /// two children.
    pub fn new(base_children: Vec<PlaneTree>) -> Result<Self> {
        if base_children.len() < 2 || !base_children.iter().all(PlaneTree::is_stable) {
            return Err(Error::InvalidTree("ribbon tree has a vertex with fewer than two children".into()));
        }
        Ok(Self { base: base_children })
    }

    /// The one-vertex tree with `k` non-root leaves.
    pub fn corolla(k: usize) -> Result<Self> {
        Self::new(vec![PlaneTree::Leaf; k])
    }

    pub fn base_children(&self) -> &[PlaneTree] {
        &self.base
    }

    /// `m`, the number of internal vertices.
    pub fn internal_count(&self) -> usize {
        1 + self.base.iter().map(PlaneTree::internal_count).sum::<usize>()
    }

    /// `N_T`, the number of leaves other than the root.
    pub fn leaf_count(&self) -> usize {
        self.base.iter().map(PlaneTree::leaf_count).sum()
    }

    /// Canonical planar code: `L` for a leaf, parentheses around children.
    pub fn code(&self) -> String {
        let mut s = String::from("(");
        for c in &self.base {
            c.write_code(&mut s);
        }
        s.push(')');
        s
    }

    /// Number of orderings of the internal vertices in which every vertex
    /// comes after its parent (hook length formula on the internal forest).
    pub fn orderings(&self) -> BigInt {
        let mut hooks = BigInt::one();
        let m = PlaneTree::Node(self.base.clone()).hook_product(&mut hooks);
        factorial(m) / hooks
    }

    /// Underlying graph with the root as leaf 1 and the other leaves
    /// labelled `2, 3, ...`. Also returns, for each vertex,
    /// its neighbours in cyclic order starting from the parent.
    pub fn embedding(&self) -> (TreeGraph, Vec<Vec<usize>>) {
        let leaves = self.leaf_count() + 1;
        let internal = self.internal_count();
        let total = leaves + internal;
        let mut cyclic = vec![Vec::new(); total];
        let mut edges = Vec::with_capacity(total - 1);
        let mut next_leaf = 1usize;
        let mut next_internal = leaves + 1;
        let base = leaves;
        edges.push((0, base));
        cyclic[0].push(base);
        cyclic[base].push(0);

        // explicit stack of (vertex id, children) to keep the recursion flat
        let mut stack: Vec<(usize, &[PlaneTree])> = vec![(base, &self.base)];
        while let Some((v, children)) = stack.pop() {
            let mut pending = Vec::new();
            for c in children {
                let id = match c {
                    PlaneTree::Leaf => {
                        next_leaf += 1;
                        next_leaf - 1
                    }
                    PlaneTree::Node(ch) => {
                        next_internal += 1;
                        pending.push((next_internal - 1, ch.as_slice()));
                        next_internal - 1
                    }
                };
                edges.push((v, id));
                cyclic[v].push(id);
                cyclic[id].push(v);
            }
            stack.extend(pending.into_iter().rev());
        }
        let g = TreeGraph::new(leaves, total, &edges).expect("ribbon tree embeds as a tree");
        (g, cyclic)
    }
}

impl fmt::Display for RibbonRootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// `(a_T, N_T)`.
pub fn stats(tree: &RibbonRootedTree) -> (Rational, usize) {
    let mut a = vertex_factor(tree.base.len() + 1);
    for c in &tree.base {
        a *= c.weight();
    }
    (a, tree.leaf_count())
}

/// `(k, j, λ)`: leaves on the base, subtrees on the base, and `λ[i-1]` the
/// number of those subtrees with `i` internal vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecompositionTypeRecord {
    pub k: usize,
    pub j: usize,
    pub lambda: Vec<usize>,
}

/// A decomposition type together with what is needed to rebuild the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub record: DecompositionTypeRecord,
    /// Subtrees cut at the base, in the cyclic order after the root.
    pub subtrees: Vec<RibbonRootedTree>,
    /// Slot pattern at the base: `true` for a subtree, `false` for a leaf.
    pub pattern: Vec<bool>,
}

pub fn decomposition_type(tree: &RibbonRootedTree) -> Decomposition {
    let m = tree.internal_count();
    let mut lambda = vec![0usize; m - 1];
    let mut subtrees = Vec::new();
    let mut pattern = Vec::with_capacity(tree.base.len());
    for c in &tree.base {
        match c {
            PlaneTree::Leaf => pattern.push(false),
            PlaneTree::Node(ch) => {
                pattern.push(true);
                let sub = RibbonRootedTree { base: ch.clone() };
                lambda[sub.internal_count() - 1] += 1;
                subtrees.push(sub);
            }
        }
    }
    let j = subtrees.len();
    Decomposition {
        record: DecompositionTypeRecord { k: pattern.len() - j, j, lambda },
        subtrees,
        pattern,
    }
}

/// Inverse of [`decomposition_type`]: hang the subtrees and leaves off a new
/// base in the order given by `pattern`.
pub fn reassemble(pattern: &[bool], subtrees: &[RibbonRootedTree]) -> Result<RibbonRootedTree> {
    let slots = pattern.iter().filter(|&&p| p).count();
    if slots != subtrees.len() {
        return Err(Error::LengthMismatch { left: slots, right: subtrees.len() });
    }
    let mut subs = subtrees.iter();
    let children = pattern
        .iter()
        .map(|&p| {
            if p {
                PlaneTree::Node(subs.next().expect("counted above").base.clone())
            } else {
                PlaneTree::Leaf
            }
        })
        .collect();
    RibbonRootedTree::new(children)
}

#[derive(Default)]
struct Generator {
    trees: HashMap<(usize, usize), Vec<PlaneTree>>,
    seqs: HashMap<(usize, usize, usize), Vec<Vec<PlaneTree>>>,
}

impl Generator {
    /// Plane subtrees with `i` internal vertices and `l` leaves.
    fn trees(&mut self, i: usize, l: usize) -> Vec<PlaneTree> {
        if i == 0 {
            return if l == 1 { vec![PlaneTree::Leaf] } else { Vec::new() };
        }
        if l < i + 1 {
            return Vec::new();
        }
        if let Some(v) = self.trees.get(&(i, l)) {
            return v.clone();
        }
        let v: Vec<PlaneTree> = self.seqs(i - 1, l, 2).into_iter().map(PlaneTree::Node).collect();
        self.trees.insert((i, l), v.clone());
        v
    }

    /// Sequences of at least `min_len` subtrees with `i` internal vertices
    /// and `l` leaves in total.
    fn seqs(&mut self, i: usize, l: usize, min_len: usize) -> Vec<Vec<PlaneTree>> {
        if let Some(v) = self.seqs.get(&(i, l, min_len)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if i == 0 && l == 0 && min_len == 0 {
            out.push(Vec::new());
        }
        for l1 in 1..=l {
            for i1 in 0..=i {
                let firsts = self.trees(i1, l1);
                if firsts.is_empty() {
                    continue;
                }
                let rests = self.seqs(i - i1, l - l1, min_len.saturating_sub(1));
                for f in &firsts {
                    for r in &rests {
                        let mut s = Vec::with_capacity(r.len() + 1);
                        s.push(f.clone());
                        s.extend(r.iter().cloned());
                        out.push(s);
                    }
                }
            }
        }
        self.seqs.insert((i, l, min_len), out.clone());
        out
    }
}

/// `RRT(m)` truncated to `N_T <= max_leaves`, sorted by `(N_T, code)`.
pub fn enumerate_rrt(m: usize, max_leaves: usize) -> Vec<RibbonRootedTree> {
    if m == 0 {
        return Vec::new();
    }
    let mut gen = Generator::default();
    let mut out = Vec::new();
    for l in 2..=max_leaves {
        for base in gen.seqs(m - 1, l, 2) {
            out.push(RibbonRootedTree { base });
        }
    }
    out.sort_by_cached_key(|t| (t.leaf_count(), t.code()));
    out
}
