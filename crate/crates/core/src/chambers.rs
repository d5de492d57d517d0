//! The resonance arrangement: validation of ramification data, chamber
//! signatures, sampling across a single wall and wall-crossing differences.
//!
//! A wall `W_I` is the hyperplane `Σ_{i ∈ I} x_i = 0`. Since the entries sum
//! to zero, `W_I = W_{I^c}`, so walls are indexed by subsets containing leaf 1
//! (bit 0), excluding the full set.

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::recursion;
use crate::series::Rational;
use crate::strata::{self, bits, GClass, RamificationDatum};
use crate::trees::{self, MarkedTree};

/// Largest length accepted by [`validate`] (2^23 subset sums).
pub const VALIDATE_BOUND: usize = 24;

/// Largest length for which a full [`signature`] is materialised.
pub const SIGNATURE_BOUND: usize = 16;

/// Default attempt budget for [`sample_across_wall`].
pub const DEFAULT_SAMPLE_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("ramification datum needs at least 3 entries, got {len}")]
    TooShort { len: usize },

    #[error("ramification datum has {len} entries, more than the supported {bound}")]
    TooLong { len: usize, bound: usize },

    #[error("entries sum to {total}, not zero")]
    NonzeroTotal { total: i128 },

    #[error("entry {index} is zero")]
    ZeroEntry { index: usize },

    #[error("the entries {witness:?} sum to zero")]
    VanishingSubset { witness: Vec<usize> },
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Subset sums by splitting the index set in two halves, so that the sum
/// for any mask is two table lookups.
struct SubsetSums {
    low_bits: usize,
    low: Vec<i128>,
    high: Vec<i128>,
}

impl SubsetSums {
    fn new(x: &[i64]) -> Self {
        let n = x.len();
        let low_bits = n / 2;
        let table = |xs: &[i64]| {
            let mut t = vec![0i128; 1 << xs.len()];
            for mask in 1..t.len() {
                let i = mask.trailing_zeros() as usize;
                t[mask] = t[mask & (mask - 1)] + xs[i] as i128;
            }
            t
        };
        Self { low_bits, low: table(&x[..low_bits]), high: table(&x[low_bits..]) }
    }

    fn sum(&self, mask: u64) -> i128 {
        let lo = (mask & ((1u64 << self.low_bits) - 1)) as usize;
        let hi = (mask >> self.low_bits) as usize;
        self.low[lo] + self.high[hi]
    }
}

/// Canonical wall subsets: masks containing bit 0, excluding the full set,
/// in increasing order.
fn canonical_masks(n: usize) -> impl Iterator<Item = u64> {
    let full = full_mask(n);
    (0..(1u64 << (n - 1))).map(|k| k << 1 | 1).filter(move |&m| m != full)
}

fn to_indices(mask: u64) -> Vec<usize> {
    bits(mask).map(|i| i + 1).collect()
}

fn from_indices(n: usize, subset: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    for &i in subset {
        if i == 0 || i > n {
            return Err(Error::InvalidArgument(format!("index {i} outside 1..={n}")));
        }
        mask |= 1u64 << (i - 1);
    }
    Ok(mask)
}

/// Accepts `x` iff it has at least three nonzero entries summing to zero and
/// no proper nonempty subset sums to zero. The witness reported for a
/// vanishing subset is the first one containing index 1 in increasing
/// bitmask order.
pub fn validate(x: &[i64]) -> std::result::Result<RamificationDatum, ValidationError> {
    let n = x.len();
    if n < 3 {
        return Err(ValidationError::TooShort { len: n });
    }
    if n > VALIDATE_BOUND {
        return Err(ValidationError::TooLong { len: n, bound: VALIDATE_BOUND });
    }
    if let Some(index) = x.iter().position(|&v| v == 0) {
        return Err(ValidationError::ZeroEntry { index: index + 1 });
    }
    let total: i128 = x.iter().map(|&v| v as i128).sum();
    if total != 0 {
        return Err(ValidationError::NonzeroTotal { total });
    }
    let sums = SubsetSums::new(x);
    if let Some(mask) = canonical_masks(n).find(|&m| sums.sum(m) == 0) {
        return Err(ValidationError::VanishingSubset { witness: to_indices(mask) });
    }
    Ok(RamificationDatum::from_validated(x.to_vec()))
}

/// A proper nonempty subset `S`, stored by the side containing index 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WallSpec {
    n: usize,
    mask: u64,
}

impl WallSpec {
    /// `subset` uses 1-based indices; either side of the wall may be given.
    pub fn new(n: usize, subset: &[usize]) -> Result<Self> {
        if !(3..=VALIDATE_BOUND).contains(&n) {
            return Err(Error::InvalidArgument(format!("wall in dimension {n} is unsupported")));
        }
        Self::from_mask(n, from_indices(n, subset)?)
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let full = full_mask(n);
        if mask == 0 || mask & full == full || mask & !full != 0 {
            return Err(Error::InvalidArgument("a wall needs a proper nonempty subset".into()));
        }
        let mask = if mask & 1 == 1 { mask } else { full ^ mask };
        Ok(Self { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical side, as a bitmask containing bit 0.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Canonical side as sorted 1-based indices.
    pub fn indices(&self) -> Vec<usize> {
        to_indices(self.mask)
    }
}

/// Sign of `Σ_{i ∈ I} x_i` for every canonical subset `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChamberSignature {
    n: usize,
    /// `positive[k]` for the subset with mask `2k + 1`.
    positive: Vec<bool>,
}

impl ChamberSignature {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }

    /// Sign of the wall's canonical subset sum (`true` for positive).
    pub fn is_positive(&self, wall: &WallSpec) -> bool {
        self.positive[(wall.mask >> 1) as usize]
    }

    /// `(subset, positive)` pairs in increasing mask order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, bool)> + '_ {
        canonical_masks(self.n).zip(self.positive.iter()).map(|(m, &p)| (to_indices(m), p))
    }

    /// Compact text form, one `+` or `-` per canonical subset.
    pub fn to_sign_string(&self) -> String {
        self.positive.iter().map(|&p| if p { '+' } else { '-' }).collect()
    }
}

pub fn signature(x: &RamificationDatum) -> Result<ChamberSignature> {
    let n = x.n();
    if n > SIGNATURE_BOUND {
        return Err(Error::BoundExceeded { what: "signature length", value: n, bound: SIGNATURE_BOUND });
    }
    let sums = SubsetSums::new(x.entries());
    let positive = canonical_masks(n).map(|m| sums.sum(m) > 0).collect();
    Ok(ChamberSignature { n, positive })
}

/// First canonical subset on which the signs of `x` and `y` differ.
pub fn first_difference(x: &RamificationDatum, y: &RamificationDatum) -> Result<Option<WallSpec>> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch { left: x.n(), right: y.n() });
    }
    let (sx, sy) = (SubsetSums::new(x.entries()), SubsetSums::new(y.entries()));
    Ok(canonical_masks(x.n())
        .find(|&m| (sx.sum(m) > 0) != (sy.sum(m) > 0))
        .map(|mask| WallSpec { n: x.n(), mask }))
}

/// Whether `x` and `y` lie in the same resonance chamber. Stops at the first
/// differing sign.
pub fn same_chamber(x: &RamificationDatum, y: &RamificationDatum) -> Result<bool> {
    Ok(first_difference(x, y)?.is_none())
}

/// Every wall separating `x` from `y`.
pub fn walls_between(x: &RamificationDatum, y: &RamificationDatum) -> Result<Vec<WallSpec>> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch { left: x.n(), right: y.n() });
    }
    let (sx, sy) = (SubsetSums::new(x.entries()), SubsetSums::new(y.entries()));
    Ok(canonical_masks(x.n())
        .filter(|&m| (sx.sum(m) > 0) != (sy.sum(m) > 0))
        .map(|mask| WallSpec { n: x.n(), mask })
        .collect())
}

/// Two data separated by exactly the wall `W_S`, using a fixed seed and the
/// default budget.
pub fn sample_across_wall(wall: &WallSpec, base: &RamificationDatum) -> Result<(RamificationDatum, RamificationDatum)> {
    sample_across_wall_with(wall, base, 0x5eed, DEFAULT_SAMPLE_BUDGET)
}

/// Projects `base` onto `W_S` (inside the sum-zero hyperplane), perturbs the
/// projection inside `W_S` until it avoids every other wall, then steps off
/// by `±(e_a - e_b)` with `a ∈ S`, `b ∉ S`. After scaling the projection by
/// at least 2, a unit step cannot change the sign of any other subset sum.
pub fn sample_across_wall_with(
    wall: &WallSpec,
    base: &RamificationDatum,
    seed: u64,
    budget: usize,
) -> Result<(RamificationDatum, RamificationDatum)> {
    let n = base.n();
    if wall.n != n {
        return Err(Error::LengthMismatch { left: wall.n, right: n });
    }
    let s = wall.mask;
    let s_len = s.count_ones() as i128;
    let c_len = n as i128 - s_len;
    let in_s = |i: usize| s >> i & 1 == 1;
    // u lies in the sum-zero hyperplane with Σ_S u = |S||S^c|
    let u: Vec<i128> = (0..n).map(|i| if in_s(i) { c_len } else { -s_len }).collect();
    let project = |v: &[i128]| -> Vec<i128> {
        let vs: i128 = (0..n).filter(|&i| in_s(i)).map(|i| v[i]).sum();
        (0..n).map(|i| s_len * c_len * v[i] - vs * u[i]).collect()
    };
    let a = bits(s).next().expect("wall side is nonempty");
    let b = bits(full_mask(n) & !s).next().expect("wall complement is nonempty");

    let base_vec: Vec<i128> = base.entries().iter().map(|&v| v as i128).collect();
    let mut z = project(&base_vec);
    let mut rng = StdRng::seed_from_u64(seed);
    let spread = 4 * n as i64;
    for _ in 0..budget {
        if let Some(pair) = step_off(&z, s, a, b) {
            let (x, y) = pair;
            // postcondition: exactly one separating wall, and it is S
            if walls_between(&x, &y)? == vec![*wall] {
                return Ok((x, y));
            }
        }
        let mut v: Vec<i128> = (0..n).map(|_| rng.gen_range(-spread..=spread) as i128).collect();
        let total: i128 = v.iter().sum();
        v[n - 1] -= total;
        let p = project(&v);
        z = z.iter().zip(&p).map(|(zi, pi)| zi + pi).collect();
    }
    Err(Error::SearchExhausted { budget })
}

/// If `z` avoids every wall other than `S`, returns `(2z + δ, 2z - δ)`.
fn step_off(z: &[i128], s: u64, a: usize, b: usize) -> Option<(RamificationDatum, RamificationDatum)> {
    let n = z.len();
    let full = full_mask(n);
    let as_i64: Option<Vec<i64>> = z.iter().map(|&v| i64::try_from(v).ok()).collect();
    let sums = SubsetSums::new(&as_i64?);
    if canonical_masks(n).any(|m| m != s && m != full ^ s && sums.sum(m) == 0) {
        return None;
    }
    let shifted = |sign: i128| -> Option<Vec<i64>> {
        (0..n)
            .map(|i| {
                let d = if i == a { sign } else if i == b { -sign } else { 0 };
                i64::try_from(2 * z[i] + d).ok()
            })
            .collect()
    };
    let x = validate(&shifted(1)?).ok()?;
    let y = validate(&shifted(-1)?).ok()?;
    Some((x, y))
}

/// Whether `tree` has an edge (internal or leaf) whose leaf bipartition is
/// one of `walls`.
pub fn tree_meets_walls(tree: &MarkedTree, walls: &[WallSpec]) -> bool {
    let n = tree.n();
    let full = full_mask(n);
    let leaf_sides = (1..n).map(|i| full ^ (1u64 << i)).chain(std::iter::once(1u64));
    tree.splits()
        .iter()
        .copied()
        .chain(leaf_sides)
        .any(|side| walls.iter().any(|w| w.mask == side))
}

/// `[M̄(x)] - [M̄(y)]`, summing only over trees with an edge cut by a
/// separating wall; on every other tree the two directings coincide.
pub fn wallcross(x: &RamificationDatum, y: &RamificationDatum) -> Result<GClass> {
    let walls = walls_between(x, y)?;
    if walls.is_empty() {
        return Ok(GClass::zero());
    }
    let relevant: Vec<MarkedTree> = trees::enumerate_stable_trees(x.n())?
        .into_iter()
        .filter(|t| tree_meets_walls(t, &walls))
        .collect();
    Ok(strata::sum_classes(&relevant, x)? - strata::sum_classes(&relevant, y)?)
}

/// The unrestricted difference `total_class(x) - total_class(y)`.
pub fn wallcross_full(x: &RamificationDatum, y: &RamificationDatum) -> Result<GClass> {
    if x.n() != y.n() {
        return Err(Error::LengthMismatch { left: x.n(), right: y.n() });
    }
    Ok(strata::total_class(x)? - strata::total_class(y)?)
}

/// `χ(M̄_{0,n+1}) / χ(M̄_n)` for `n = 2..=max_n`.
pub fn ratio_trend(max_n: usize) -> Result<Vec<Rational>> {
    let table = recursion::chi_table(max_n, max_n)?;
    let mbar0 = recursion::chi_mbar0_series(max_n)?;
    (2..=max_n)
        .map(|n| {
            let den = table.total(n).expect("row exists");
            if den.is_zero() {
                return Err(Error::InvalidArgument(format!("χ vanishes at n = {n}")));
            }
            Ok(Rational::new(mbar0[n - 2].clone(), den))
        })
        .collect()
}

/// Whether a sequence is strictly decreasing.
pub fn strictly_decreasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Up to `count` data of length `n` from pairwise distinct chambers, the
/// central chamber first, the rest drawn at random (entries in `±3n`).
pub fn sample_chambers(n: usize, count: usize, seed: u64, budget: usize) -> Result<Vec<RamificationDatum>> {
    if !(3..=SIGNATURE_BOUND).contains(&n) {
        return Err(Error::InvalidArgument(format!("cannot sample chambers for n = {n}")));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let central = RamificationDatum::central(n - 1)?;
    let mut seen = vec![signature(&central)?];
    let mut out = vec![central];
    let spread = 3 * n as i64;
    for _ in 0..budget {
        if out.len() >= count {
            break;
        }
        let mut x: Vec<i64> = (0..n - 1)
            .map(|_| {
                let v = rng.gen_range(1..=spread);
                if rng.gen_bool(0.5) { v } else { -v }
            })
            .collect();
        x.push(-x.iter().sum::<i64>());
        let Ok(d) = validate(&x) else { continue };
        let sig = signature(&d)?;
        if !seen.contains(&sig) {
            seen.push(sig);
            out.push(d);
        }
    }
    if out.len() < count {
        return Err(Error::SearchExhausted { budget });
    }
    Ok(out)
}

/// `x` followed by further data in its chamber, found by scaling `x` and
/// adding small sum-zero noise, each checked with [`same_chamber`].
pub fn same_chamber_representatives(
    x: &RamificationDatum,
    count: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<RamificationDatum>> {
    let n = x.n();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = vec![x.clone()];
    for _ in 0..budget {
        if out.len() >= count {
            break;
        }
        let scale = rng.gen_range(2..=7i64);
        let mut y: Vec<i64> = x.entries().iter().map(|&v| scale * v + rng.gen_range(-2..=2)).collect();
        let total: i64 = y.iter().sum();
        y[n - 1] -= total;
        let Ok(d) = validate(&y) else { continue };
        if same_chamber(x, &d)? && !out.contains(&d) {
            out.push(d);
        }
    }
    if out.len() < count {
        return Err(Error::SearchExhausted { budget });
    }
    Ok(out)
}
