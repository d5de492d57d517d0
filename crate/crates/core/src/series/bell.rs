//! Partial exponential Bell polynomials and Faà di Bruno composition.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{factorial, Rational, TruncatedSeries};
use crate::error::{Error, Result};

/// All partitions of `m` with exactly `j` parts, as multiplicity vectors:
/// entry `i - 1` holds the number of parts equal to `i`. Emitted in
/// lexicographic order of the descending part sequence, largest first.
pub fn partitions_with_length(m: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(
        remaining: usize,
        parts_left: usize,
        max_part: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        m: usize,
    ) {
        if parts_left == 0 {
            if remaining == 0 {
                let mut mult = vec![0; m];
                for &p in current.iter() {
                    mult[p - 1] += 1;
                }
                out.push(mult);
            }
            return;
        }
        // each remaining part is at least 1 and at most max_part
        if remaining < parts_left || remaining > parts_left * max_part {
            return;
        }
        let hi = max_part.min(remaining - (parts_left - 1));
        for p in (1..=hi).rev() {
            current.push(p);
            rec(remaining - p, parts_left - 1, p, current, out, m);
            current.pop();
        }
    }

    let mut out = Vec::new();
    if j == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    if j > m {
        return out;
    }
    rec(m, j, m, &mut Vec::with_capacity(j), &mut out, m);
    out
}

/// `m! / prod_i ((i!)^{λ_i} λ_i!)`: the number of set partitions of an
/// m-set whose block sizes are given by the multiplicity vector `lambda`.
pub fn multinomial_weight(m: usize, lambda: &[usize]) -> BigInt {
    let mut denom = BigInt::one();
    for (idx, &count) in lambda.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let part = idx + 1;
        denom *= num_traits::pow(factorial(part), count);
        denom *= factorial(count);
    }
    factorial(m) / denom
}

/// Evaluates `B_{m,j}(args[0], args[1], ...)` for any commutative ring that
/// can be scaled by rationals. `args[i]` plays the role of `x_{i+1}`.
pub fn bell<T>(m: usize, j: usize, args: &[T]) -> Result<T>
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T> + Mul<&'a Rational, Output = T>,
{
    if j == 0 || j > m {
        return Err(Error::BellIndex { m, j });
    }
    let needed = m - j + 1;
    if args.len() < needed {
        return Err(Error::BellArity { m, j, needed, got: args.len() });
    }

    let mut powers: HashMap<(usize, usize), T> = HashMap::new();
    let mut total: Option<T> = None;
    for lambda in partitions_with_length(m, j) {
        let weight = Rational::from_integer(multinomial_weight(m, &lambda));
        let mut term: Option<T> = None;
        for (idx, &count) in lambda.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let p = power(&mut powers, args, idx, count);
            term = Some(match term {
                None => p,
                Some(t) => &t * &p,
            });
        }
        // j >= 1, so every partition has at least one part
        let term = term.expect("partition with no parts");
        let term = &term * &weight;
        total = Some(match total {
            None => term,
            Some(acc) => &acc + &term,
        });
    }
    Ok(total.expect("at least one partition when 1 <= j <= m"))
}

fn power<T>(cache: &mut HashMap<(usize, usize), T>, args: &[T], idx: usize, e: usize) -> T
where
    T: Clone,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    if let Some(p) = cache.get(&(idx, e)) {
        return p.clone();
    }
    let p = if e == 1 {
        args[idx].clone()
    } else {
        let lower = power(cache, args, idx, e - 1);
        &lower * &args[idx]
    };
    cache.insert((idx, e), p.clone());
    p
}

/// `g(f(t))` where `g = sum_k g_coeffs[k] t^k` (ordinary coefficients) and
/// `f` has zero constant term, via Faà di Bruno:
/// `n! [t^n] g∘f = sum_{k=1}^{n} b_k B_{n,k}(a_1, ..., a_{n-k+1})` with
/// `b_k = k! g_k` and `a_i = i! f_i`. The result has the order of `f`.
pub fn compose(g_coeffs: &[Rational], f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !f.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let order = f.order();
    let a: Vec<Rational> = (1..=order)
        .map(|i| f.coeff(i) * Rational::from_integer(factorial(i)))
        .collect();
    let b = |k: usize| -> Rational {
        g_coeffs
            .get(k)
            .map(|c| c * Rational::from_integer(factorial(k)))
            .unwrap_or_else(Rational::zero)
    };

    let mut out = Vec::with_capacity(order + 1);
    out.push(b(0));
    for n in 1..=order {
        let mut acc = Rational::zero();
        for k in 1..=n {
            let bk = b(k);
            if bk.is_zero() {
                continue;
            }
            acc += bk * bell(n, k, &a[..n - k + 1])?;
        }
        out.push(acc / Rational::from_integer(factorial(n)));
    }
    Ok(TruncatedSeries::from_coeffs(order, out))
}
