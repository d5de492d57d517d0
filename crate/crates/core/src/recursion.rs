//! Generating functions `ν_k(t) = Σ_n χ(M̄_n(k)) t^n / n!` for the maximally
//! ramified spaces `M̄_n = M̄(n, -1, ..., -1)`, computed by
//!
//! ```text
//! ν_1 = (1+t) log(1+t) - t
//! ν_m = Σ_{j=1}^{m-1} ν_1^{(j)} · B_{m-1,j}(ν_1, ..., ν_{m-j})      (m >= 2)
//! ```
//!
//! and assembled into the table of Euler characteristics `χ(M̄_n(k))`.
//!
//! The bivariate series `Ψ(s,t) = Σ_k ν_k s^k / k!` is never built as a
//! bivariate object: it is the list of its `s`-coefficients. The residual of
//! the differential equation for `Ψ` is evaluated on that graded list.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::{bell, compose, factorial, Rational, TruncatedSeries};
use crate::trees::{self, vertex_weight};

/// `(1+t) log(1+t) - t`; coefficient of `t^n` is `(-1)^n / (n(n-1))`.
pub fn nu1(order: usize) -> TruncatedSeries {
    let one_plus_t = TruncatedSeries::from_i64(order, &[1, 1]);
    &(&one_plus_t * &TruncatedSeries::log1p(order)) - &TruncatedSeries::variable(order)
}

/// `ν_1^{(j)}` to the full `order` (not `order - j`).
pub fn nu1_derivative(j: usize, order: usize) -> TruncatedSeries {
    nu1(order + j)
        .derivative(j)
        .expect("j <= order + j")
}

/// The members `ν_1, ..., ν_k` at a common truncation order.
#[derive(Clone, Debug)]
pub struct NuFamily {
    order: usize,
    members: Vec<TruncatedSeries>,
}

impl NuFamily {
    pub fn new(order: usize) -> Self {
        Self { order, members: vec![nu1(order)] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `ν_k`, 1-based.
    pub fn get(&self, k: usize) -> Option<&TruncatedSeries> {
        k.checked_sub(1).and_then(|i| self.members.get(i))
    }

    pub fn members(&self) -> &[TruncatedSeries] {
        &self.members
    }

    /// Appends `ν_{len+1}, ..., ν_{m}`.
    pub fn extend_to(&mut self, m: usize) -> Result<()> {
        while self.members.len() < m {
            let next = nu_m(self.members.len() + 1, self)?;
            self.members.push(next);
        }
        Ok(())
    }
}

/// `ν_m` from its predecessors by the Bell-polynomial recursion.
pub fn nu_m(m: usize, family: &NuFamily) -> Result<TruncatedSeries> {
    if m == 1 {
        return Ok(nu1(family.order));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("nu_0 is not defined".into()));
    }
    if family.len() < m - 1 {
        return Err(Error::MissingPredecessors { m, have: family.len() });
    }
    let order = family.order;
    let args = &family.members[..m - 1];
    let terms: Result<Vec<TruncatedSeries>> = (1..m)
        .into_par_iter()
        .map(|j| {
            let b = bell(m - 1, j, &args[..m - j])?;
            Ok(&nu1_derivative(j, order) * &b)
        })
        .collect();
    Ok(terms?
        .iter()
        .fold(TruncatedSeries::zero(order), |acc, t| &acc + t))
}

/// `χ(M̄_n(k))` for `2 <= n <= max_n`, `1 <= k <= n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTable {
    max_n: usize,
    rows: Vec<Vec<BigInt>>,
}

impl EulerTable {
    /// Rebuilds a table from stored rows; row `i` is `n = i + 2` and must hold
    /// exactly `n - 1` entries.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::InvalidArgument(format!(
                    "row for n = {} has {} entries, expected {}",
                    i + 2,
                    row.len(),
                    i + 1
                )));
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty table".into()));
        }
        Ok(Self { max_n: rows.len() + 1, rows })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// `χ(M̄_n(k))`, or `None` outside `2 <= n <= max_n`, `1 <= k < n`.
    pub fn entry(&self, n: usize, k: usize) -> Option<&BigInt> {
        if n < 2 || k == 0 {
            return None;
        }
        self.rows.get(n - 2).and_then(|row| row.get(k - 1))
    }

    /// `χ(M̄_n) = Σ_k χ(M̄_n(k))`.
    pub fn total(&self, n: usize) -> Option<BigInt> {
        if n < 2 {
            return None;
        }
        self.rows.get(n - 2).map(|row| row.iter().sum())
    }
}

fn integer_or_err(q: Rational, what: &str) -> Result<BigInt> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::InvalidArgument(format!("{what} = {q} is not an integer")))
    }
}

/// The full table of `χ(M̄_n(k))`, using truncation order `order >= max_n`.
pub fn chi_table(max_n: usize, order: usize) -> Result<EulerTable> {
    if max_n < 2 {
        return Err(Error::InvalidArgument(format!("max_n = {max_n} < 2")));
    }
    if order < max_n {
        return Err(Error::OrderTooSmall { order, n_max: max_n });
    }
    let mut family = NuFamily::new(order);
    family.extend_to(max_n - 1)?;
    let mut rows = Vec::with_capacity(max_n - 1);
    for n in 2..=max_n {
        let nf = Rational::from_integer(factorial(n));
        let row = (1..n)
            .map(|k| {
                let q = family.members[k - 1].coeff(n) * &nf;
                integer_or_err(q, &format!("chi(M_{n}({k}))"))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(EulerTable { max_n, rows })
}

/// Which closed form of the right-hand side to use in [`pde_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeForm {
    /// `(1+t)(log(1+t) + exp(-Ψ/(1+t))) + Ψ(log(1+t) + 1) - 2t - 1`.
    ///
    /// This expression sums `ν_1^{(j)}` as if it were `(-1)^j (1+t)^{1-j}`
    /// for `j >= 2`, dropping a factor `(j-2)!`. It agrees with the exact
    /// form through `s^3` and differs from `s^4` on.
    Printed,
    /// `G(t, Ψ)` with `G(t,s) = Σ_j ν_1^{(j)}(t) s^j / j!` in closed form:
    /// `ν_1 + s log(1+t) + (1+t+s) log(1 + s/(1+t)) - s`.
    Exact,
}

/// A polynomial in `s` with truncated-series coefficients, truncated above
/// `s^{len-1}`.
#[derive(Clone, Debug)]
struct SGraded(Vec<TruncatedSeries>);

impl SGraded {
    fn zero(s_terms: usize, order: usize) -> Self {
        Self(vec![TruncatedSeries::zero(order); s_terms])
    }

    fn constant(c: TruncatedSeries, s_terms: usize) -> Self {
        let order = c.order();
        let mut out = Self::zero(s_terms, order);
        out.0[0] = c;
        out
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn mul(&self, other: &Self) -> Self {
        let k = self.0.len();
        let order = self.0[0].order();
        let mut out = Self::zero(k, order);
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate().take(k - i) {
                out.0[i + j] = &out.0[i + j] + &(a * b);
            }
        }
        out
    }

    fn times_series(&self, c: &TruncatedSeries) -> Self {
        Self(self.0.iter().map(|a| a * c).collect())
    }

    fn scale(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|a| a.scale(c)).collect())
    }

    /// `Σ_{i>=0} coeff(i) · self^i`, for `self` without an `s^0` term.
    fn power_sum(&self, coeff: impl Fn(usize) -> Rational) -> Self {
        debug_assert!(self.0[0].is_zero());
        let k = self.0.len();
        let order = self.0[0].order();
        let mut out = Self::zero(k, order);
        let mut p = Self::constant(TruncatedSeries::one(order), k);
        for i in 0..k {
            let c = coeff(i);
            if !c.is_zero() {
                out = out.add(&p.scale(&c));
            }
            p = p.mul(self);
        }
        out
    }
}

fn psi_from_table(table: &EulerTable, s_terms: usize, order: usize) -> SGraded {
    // Ψ = Σ_k ν_k s^k / k!, with ν_k rebuilt from the table entries.
    let mut psi = SGraded::zero(s_terms, order);
    for k in 1..s_terms {
        psi.0[k] = nu_from_table(table, k, order).scale(&Rational::new(BigInt::one(), factorial(k)));
    }
    psi
}

fn nu_from_table(table: &EulerTable, k: usize, order: usize) -> TruncatedSeries {
    TruncatedSeries::from_coeffs(
        order,
        (0..=order).map(|n| match table.entry(n, k) {
            Some(chi) => Rational::new(chi.clone(), factorial(n)),
            None => Rational::zero(),
        }),
    )
}

/// `∂Ψ/∂s - RHS(Ψ)` through `s^{s_degree-1}` and `t^order`, with `Ψ` rebuilt
/// from [`chi_table`]. Entry `i` of the result is the `s^i` coefficient.
pub fn pde_residual(s_degree: usize, order: usize, form: PdeForm) -> Result<Vec<TruncatedSeries>> {
    if s_degree == 0 {
        return Err(Error::InvalidArgument("s-degree must be at least 1".into()));
    }
    let table = chi_table(order.max(2), order.max(2))?;
    // Ψ needs s^0..s^{K-1} on the right; ∂Ψ/∂s needs ν_1..ν_K on the left.
    let psi = psi_from_table(&table, s_degree, order);

    let lhs = SGraded(
        (0..s_degree)
            .map(|i| nu_from_table(&table, i + 1, order).scale(&Rational::new(BigInt::one(), factorial(i))))
            .collect(),
    );

    let one_plus_t = TruncatedSeries::from_i64(order, &[1, 1]);
    let inv_one_plus_t = one_plus_t.inverse()?;
    let log = TruncatedSeries::log1p(order);
    let u = psi.times_series(&inv_one_plus_t);

    let rhs = match form {
        PdeForm::Printed => {
            let neg_u = u.scale(&(-Rational::one()));
            let exp_neg_u = neg_u.power_sum(|i| Rational::new(BigInt::one(), factorial(i)));
            let inner = SGraded::constant(log.clone(), s_degree).add(&exp_neg_u);
            let two_t_plus_one = TruncatedSeries::from_i64(order, &[1, 2]);
            inner
                .times_series(&one_plus_t)
                .add(&psi.times_series(&(&log + &TruncatedSeries::one(order))))
                .sub(&SGraded::constant(two_t_plus_one, s_degree))
        }
        PdeForm::Exact => {
            let log1p_u = u.power_sum(|i| {
                if i == 0 {
                    Rational::zero()
                } else {
                    let sign = if i % 2 == 1 { 1 } else { -1 };
                    Rational::new(sign.into(), (i as i64).into())
                }
            });
            let one_plus_t_plus_psi = SGraded::constant(one_plus_t.clone(), s_degree).add(&psi);
            SGraded::constant(nu1(order), s_degree)
                .add(&psi.times_series(&log))
                .add(&one_plus_t_plus_psi.mul(&log1p_u))
                .sub(&psi)
        }
    };

    Ok(lhs.sub(&rhs).0)
}

/// `χ(M̄_{0,n+1}) = Σ_{T ∈ Γ_{0,n+1}} Π_v A_{val(v)}`, by enumerating trees.
pub fn chi_mbar0(n: usize) -> Result<BigInt> {
    chi_mbar0_with_bound(n, trees::DEFAULT_TREE_BOUND)
}

pub fn chi_mbar0_with_bound(n: usize, bound: usize) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} < 2")));
    }
    let mut total = BigInt::zero();
    trees::for_each_stable_tree(n + 1, bound, |tree| {
        let product: BigInt = tree
            .internal_valences()
            .into_iter()
            .map(vertex_weight)
            .product();
        total += product;
    })?;
    Ok(total)
}

/// `χ(M̄_{0,n+1})` for `2 <= n <= max_n` from the rooted-tree generating
/// function `φ(t) = Σ_n χ(M̄_{0,n+1}) t^n / n!`, which satisfies
/// `φ = ν_1(t + φ)`: the base vertex of a rooted tree carries leaves (`t`)
/// and subtrees (`φ`). Solved by fixed-point iteration with [`compose`].
pub fn chi_mbar0_series(max_n: usize) -> Result<Vec<BigInt>> {
    if max_n < 2 {
        return Err(Error::InvalidArgument(format!("max_n = {max_n} < 2")));
    }
    let order = max_n;
    let g = nu1(order).coeffs().to_vec();
    let t = TruncatedSeries::variable(order);
    let mut phi = TruncatedSeries::zero(order);
    // each pass fixes at least one more coefficient
    for _ in 0..=order {
        let next = compose(&g, &(&t + &phi))?;
        if next == phi {
            break;
        }
        phi = next;
    }
    (2..=max_n)
        .map(|n| integer_or_err(phi.coeff(n) * Rational::from_integer(factorial(n)), "chi(M_0,n+1)"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn nu1_coefficients() {
        let s = nu1(12);
        assert!(s.coeff(0).is_zero() && s.coeff(1).is_zero());
        for n in 2..=12i64 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(s.coeff(n as usize), rat(sign, n * (n - 1)));
        }
        // chi(M_{0,3}) = 1, chi(M_{0,4}) = -1, chi(M_{0,5}) = 2
        assert_eq!(s.coeff(2) * rat(2, 1), rat(1, 1));
        assert_eq!(s.coeff(3) * rat(6, 1), rat(-1, 1));
        assert_eq!(s.coeff(4) * rat(24, 1), rat(2, 1));
    }

    #[test]
    fn nu1_derivatives_match_vertex_weights() {
        // ν_1^{(j)} = Σ_k A_{k+j+1} t^k / k!
        for j in 1..=6 {
            let d = nu1_derivative(j, 8);
            assert_eq!(d.order(), 8);
            for k in 0..=8 {
                let deg = k + j + 1;
                let expect = if deg >= 3 {
                    Rational::new(vertex_weight(deg), factorial(k))
                } else {
                    Rational::zero()
                };
                assert_eq!(d.coeff(k), expect, "j = {j}, k = {k}");
            }
        }
    }

    #[test]
    fn nu2_and_nu3_small_coefficients() {
        let mut fam = NuFamily::new(10);
        fam.extend_to(3).unwrap();
        assert_eq!(fam.get(2).unwrap().coeff(3), rat(1, 2));
        assert_eq!(fam.get(3).unwrap().coeff(4), rat(3, 4));
        for m in 1..=3 {
            for n in 0..=m {
                assert!(fam.get(m).unwrap().coeff(n).is_zero(), "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn nu_m_needs_predecessors() {
        let fam = NuFamily::new(6);
        assert!(matches!(nu_m(3, &fam), Err(Error::MissingPredecessors { m: 3, have: 1 })));
        assert!(nu_m(2, &fam).is_ok());
    }

    #[test]
    fn table_small_rows() {
        let table = chi_table(6, 8).unwrap();
        assert_eq!(table.total(2), Some(BigInt::from(1)));
        assert_eq!(table.entry(3, 2), Some(&BigInt::from(3)));
        assert_eq!(table.entry(4, 3), Some(&BigInt::from(18)));
        assert_eq!(table.total(4), Some(BigInt::from(10)));
        assert_eq!(table.total(5), Some(BigInt::from(84)));
        assert_eq!(table.total(6), Some(BigInt::from(1108)));
        for n in 2..=6 {
            // first column is (-1)^n (n-2)!
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(table.entry(n, 1).unwrap(), &(factorial(n - 2) * sign));
        }
        assert!(table.entry(6, 6).is_none());
        assert!(matches!(chi_table(10, 9), Err(Error::OrderTooSmall { .. })));
    }

    #[test]
    fn pde_first_s_term_is_nu1() {
        for form in [PdeForm::Printed, PdeForm::Exact] {
            let r = pde_residual(1, 10, form).unwrap();
            assert_eq!(r.len(), 1);
            assert!(r[0].is_zero(), "{form:?}");
        }
    }

    #[test]
    fn pde_exact_residual_vanishes() {
        for s in pde_residual(5, 10, PdeForm::Exact).unwrap() {
            assert!(s.is_zero());
        }
    }

    #[test]
    fn pde_printed_residual_breaks_at_s4() {
        let r = pde_residual(6, 10, PdeForm::Printed).unwrap();
        for (i, s) in r.iter().enumerate().take(4) {
            assert!(s.is_zero(), "s^{i}");
        }
        assert!(!r[4].is_zero());
    }

    #[test]
    fn mbar0_series_matches_known_values() {
        let v = chi_mbar0_series(8).unwrap();
        let expect = [1, 2, 7, 34, 213, 1630, 14747];
        assert_eq!(v, expect.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
    }

    #[test]
    fn mbar0_by_trees_small() {
        assert_eq!(chi_mbar0(2).unwrap(), BigInt::from(1));
        assert_eq!(chi_mbar0(4).unwrap(), BigInt::from(7));
        assert_eq!(chi_mbar0(5).unwrap(), BigInt::from(34));
    }
}
