//! Extended simple sums and the recursive summation operator.
//!
//! Everything here is linear in the summand, so it is written over any
//! [`Value`] ring. Summands are fallible callbacks so that budget errors raised
//! deep inside a memoized `alpha` evaluation propagate out unchanged.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::scalar::Value;
use crate::Entry;

/// Bounds of an extended simple sum `sum_{i=a}^{b}`, in any relative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendedBounds {
    pub a: Entry,
    pub b: Entry,
}

impl ExtendedBounds {
    pub fn new(a: Entry, b: Entry) -> Self {
        ExtendedBounds { a, b }
    }

    /// The summation range and its sign: `a..=b` positively when `a <= b`,
    /// nothing when `b = a - 1`, and `b+1..=a-1` negatively otherwise.
    pub fn terms(self) -> (bool, RangeInclusive<Entry>) {
        let ExtendedBounds { a, b } = self;
        if a <= b {
            (false, a..=b)
        } else {
            // Empty when b = a - 1.
            (true, b + 1..=a - 1)
        }
    }
}

/// `sum_{i=a}^{b} f(i)` with the extended convention for `b < a`.
pub fn extended_sum<R: Value>(bounds: ExtendedBounds, mut f: impl FnMut(Entry) -> Result<R>) -> Result<R> {
    let (negated, range) = bounds.terms();
    let mut total = R::zero();
    for i in range {
        total = total + f(i)?;
    }
    Ok(if negated { -total } else { total })
}

pub type Summand<'a, R> = &'a dyn Fn(&[Entry]) -> Result<R>;

fn appended(l: &[Entry], x: Entry) -> Vec<Entry> {
    let mut v = Vec::with_capacity(l.len() + 1);
    v.extend_from_slice(l);
    v.push(x);
    v
}

/// Applies the summation operator over `k = (k_1, ..., k_n)` to a function of
/// `n - 1` integer arguments.
///
/// Recursion on the last argument:
/// `S^(k_1..k_n) A = S^(k_1..k_{n-1}) [l -> sum_{x=k_{n-1}+1}^{k_n} A(l, x)]
///                  + S^(k_1..k_{n-2}, k_{n-1}-1) [l -> A(l, k_{n-1})]`,
/// down to the extended sum at `n = 2`.
pub fn operator_apply<R: Value>(k: &[Entry], a: Summand<'_, R>) -> Result<R> {
    if k.len() < 2 {
        return Err(Error::usage("the summation operator needs at least two arguments"));
    }
    apply_rec(k, a)
}

fn apply_rec<R: Value>(k: &[Entry], a: Summand<'_, R>) -> Result<R> {
    let n = k.len();
    if n == 1 {
        return a(&[]);
    }
    if n == 2 {
        return extended_sum(ExtendedBounds::new(k[0], k[1]), |x| a(&[x]));
    }
    let (prev, last) = (k[n - 2], k[n - 1]);
    let summed = |l: &[Entry]| extended_sum(ExtendedBounds::new(prev + 1, last), |x| a(&appended(l, x)));
    let first = apply_rec(&k[..n - 1], &summed)?;

    let mut shifted = k[..n - 1].to_vec();
    shifted[n - 2] = prev - 1;
    let pinned = |l: &[Entry]| a(&appended(l, prev));
    let second = apply_rec(&shifted, &pinned)?;
    Ok(first + second)
}

/// The alternative recursion for the same operator, valid for `n >= 3`:
/// `S^(k_1..k_n) A = S^(k_1..k_{n-1}) [l -> sum_{x=k_{n-1}}^{k_n} A(l, x)]
///                  - S^(k_1..k_{n-2}) [l -> A(l, k_{n-1}, k_{n-1})]`.
pub fn operator_apply_alt<R: Value>(k: &[Entry], a: Summand<'_, R>) -> Result<R> {
    if k.len() < 3 {
        return Err(Error::usage(
            "the alternative operator recursion needs at least three arguments",
        ));
    }
    alt_rec(k, a)
}

fn alt_rec<R: Value>(k: &[Entry], a: Summand<'_, R>) -> Result<R> {
    let n = k.len();
    match n {
        1 => return a(&[]),
        2 => return extended_sum(ExtendedBounds::new(k[0], k[1]), |x| a(&[x])),
        _ => {}
    }
    let (prev, last) = (k[n - 2], k[n - 1]);
    let summed = |l: &[Entry]| extended_sum(ExtendedBounds::new(prev, last), |x| a(&appended(l, x)));
    let first = alt_rec(&k[..n - 1], &summed)?;

    let doubled = |l: &[Entry]| {
        let mut v = appended(l, prev);
        v.push(prev);
        a(&v)
    };
    let second = alt_rec(&k[..n - 2], &doubled)?;
    Ok(first + -second)
}

/// Non-adjacent subsets of `{2, ..., n-1}` (1-based positions in `k`), ordered by
/// size and then lexicographically. The empty set comes first.
pub fn nonadjacent_index_sets(n: usize) -> Vec<Vec<usize>> {
    fn grow(start: usize, hi: usize, cur: &mut Vec<usize>, size: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..=hi {
            cur.push(i);
            grow(i + 2, hi, cur, size, out);
            cur.pop();
        }
    }
    let mut out = vec![Vec::new()];
    if n < 3 {
        return out;
    }
    let hi = n - 1;
    for size in 1..=(n - 1) / 2 {
        let before = out.len();
        grow(2, hi, &mut Vec::new(), size, &mut out);
        if out.len() == before {
            break;
        }
    }
    out
}

/// The inclusion-exclusion form of the operator: a signed sum, over non-adjacent
/// index sets `I`, of nested extended sums with `l_j` ranging over `(k_j .. k_{j+1})`,
/// except that for each `i` in `I` both `l_{i-1}` and `l_i` are pinned to `k_i`.
pub fn third_extension_apply<R: Value>(k: &[Entry], a: Summand<'_, R>) -> Result<R> {
    let n = k.len();
    if n == 0 {
        return Err(Error::usage("the third-extension formula needs a non-empty row"));
    }
    if n == 1 {
        return a(&[]);
    }
    let mut total = R::zero();
    for set in nonadjacent_index_sets(n) {
        // bounds[j] for l_{j+1} (0-based j); pinned coordinates use a one-term sum.
        let mut bounds: Vec<ExtendedBounds> = k.windows(2).map(|w| ExtendedBounds::new(w[0], w[1])).collect();
        for &i in &set {
            let v = k[i - 1];
            bounds[i - 2] = ExtendedBounds::new(v, v);
            bounds[i - 1] = ExtendedBounds::new(v, v);
        }
        let term = nested_sum(&bounds, &mut Vec::with_capacity(n - 1), a)?;
        total = total + term.signed(set.len());
    }
    Ok(total)
}

fn nested_sum<R: Value>(bounds: &[ExtendedBounds], prefix: &mut Vec<Entry>, a: Summand<'_, R>) -> Result<R> {
    let depth = prefix.len();
    if depth == bounds.len() {
        return a(prefix);
    }
    extended_sum(bounds[depth], |x| {
        prefix.push(x);
        let r = nested_sum(bounds, prefix, a);
        prefix.pop();
        r
    })
}
