//! Admissible predecessor rows and bottom-up enumeration of triangles.
//!
//! Every triangle class here constrains a row only through the row directly
//! below it, so triangles are built from the bottom row upward by repeatedly
//! choosing an admissible row above. All orderings are lexicographic, which makes
//! enumeration output deterministic.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::triangle::{pair_statistics, Row, Triangle};
use crate::{Entry, SignedCount};

/// A row that may sit directly above a given row in a GMT, together with the
/// number of newcomers and sign-changing pairs it contributes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibleRow {
    pub row: Row,
    pub sc_contribution: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_rows_generated: u64,
    pub max_triangles: u64,
}

impl EnumerationLimits {
    pub fn new(max_rows_generated: u64, max_triangles: u64) -> Result<Self> {
        if max_rows_generated == 0 || max_triangles == 0 {
            return Err(Error::usage("enumeration budgets must be positive"));
        }
        Ok(EnumerationLimits {
            max_rows_generated,
            max_triangles,
        })
    }
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_rows_generated: 100_000_000,
            max_triangles: 100_000_000,
        }
    }
}

/// Whether `l_i = k_i` (the left endpoint) may be chosen, given the entry to its left.
///
/// `i` is 0-based in `l`; `k_i` and `k_{i+1}` sit below `l_i`.
fn left_endpoint_ok(k: &[Entry], i: usize, prev: Option<Entry>) -> bool {
    let (ki, kj) = (k[i], k[i + 1]);
    if ki > kj {
        // l_i = k_i over a strict descent needs an equal left neighbour.
        return prev == Some(ki);
    }
    match i.checked_sub(1).map(|h| k[h]) {
        None => true,
        Some(kh) if kh > ki => true,
        // k_{i-1} <= k_i <= k_{i+1}: the row above must increase strictly here.
        Some(_) => prev.is_none_or(|p| p < ki),
    }
}

/// Whether `l_i = k_{i+1}` (the right endpoint) may be chosen, given the entry to its right.
fn right_endpoint_ok(k: &[Entry], i: usize, next: Option<Entry>) -> bool {
    let (ki, kj) = (k[i], k[i + 1]);
    if ki > kj {
        return next == Some(kj);
    }
    match k.get(i + 2) {
        None => true,
        Some(&kl) if kj > kl => true,
        Some(_) => next.is_none_or(|x| x > kj),
    }
}

/// Candidate values for `l_i` once `l_{i-1}` is fixed, in increasing order.
///
/// Forced value first: if `k_{i-1} > l_{i-1} = k_i`, only `l_i = k_i` is possible.
/// Otherwise the values strictly between `k_i` and `k_{i+1}` are free, and each
/// endpoint is admitted by [`left_endpoint_ok`]. The right-endpoint rule and the
/// symmetric forcing `k_{i+1} = l_{i+1} > k_{i+2}` depend on `l_{i+1}`; they are
/// checked once `l_{i+1}` is placed (see [`gmt_admissible_rows`]).
fn entry_candidates(k: &[Entry], i: usize, prev: Option<Entry>) -> Vec<Entry> {
    let (ki, kj) = (k[i], k[i + 1]);
    if i > 0 {
        let p = prev.expect("left neighbour placed");
        if k[i - 1] > ki && p == ki {
            return if left_endpoint_ok(k, i, prev) { vec![ki] } else { vec![] };
        }
    }
    let (lo, hi) = (ki.min(kj), ki.max(kj));
    (lo..=hi).filter(|&v| v != ki || left_endpoint_ok(k, i, prev)).collect()
}

/// All rows `l` of length `m - 1` that can sit directly above `lower` in a GMT,
/// in lexicographic order, with their sign contributions.
///
/// Fill order is left to right. `l_i` draws from [`entry_candidates`]; when
/// `l_{i+1}` is placed the right-endpoint rule for `l_i` is checked against it,
/// and the rightmost entry is checked against a missing right neighbour.
///
/// Rows with three consecutive equal entries are left out: no row can sit above
/// them, so they never occur in a GMT.
pub fn gmt_admissible_rows(lower: &[Entry]) -> Result<Vec<AdmissibleRow>> {
    if lower.len() < 2 {
        return Err(Error::usage("admissible rows need a lower row of length at least 2"));
    }
    let width = lower.len() - 1;
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(width);
    fill_gmt(lower, width, &mut partial, &mut out);
    Ok(out)
}

fn fill_gmt(k: &[Entry], width: usize, partial: &mut Vec<Entry>, out: &mut Vec<AdmissibleRow>) {
    let i = partial.len();
    if i == width {
        let last = i - 1;
        if partial[last] == k[last + 1] && !right_endpoint_ok(k, last, None) {
            return;
        }
        let (newcomers, pairs) = pair_statistics(partial, k);
        out.push(AdmissibleRow {
            row: Row::new(partial.clone()).expect("width >= 1"),
            sc_contribution: newcomers + pairs,
        });
        return;
    }
    let prev = partial.last().copied();
    for v in entry_candidates(k, i, prev) {
        if i > 0 {
            let p = partial[i - 1];
            if p == k[i] && !right_endpoint_ok(k, i - 1, Some(v)) {
                continue;
            }
        }
        if i >= 2 && partial[i - 2] == v && partial[i - 1] == v {
            continue;
        }
        partial.push(v);
        fill_gmt(k, width, partial, out);
        partial.pop();
    }
}

/// Strictly increasing rows interlacing a strictly increasing `lower`, lexicographic.
pub fn mt_admissible_rows(lower: &[Entry]) -> Result<Vec<Row>> {
    if lower.len() < 2 {
        return Err(Error::usage("admissible rows need a lower row of length at least 2"));
    }
    if !lower.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::usage("Monotone Triangle rows must be strictly increasing"));
    }
    let ranges: Vec<_> = lower.windows(2).map(|w| (w[0], w[1])).collect();
    let mut out = Vec::new();
    product_filtered(&ranges, &mut Vec::new(), &|p, v| p.is_none_or(|p| p < v), &mut out);
    Ok(out.into_iter().map(|r| Row::new(r).expect("non-empty")).collect())
}

/// Rows that can sit above a weakly decreasing `lower` in a DMT, lexicographic.
pub fn dmt_admissible_rows(lower: &[Entry]) -> Result<Vec<Row>> {
    if lower.len() < 2 {
        return Err(Error::usage("admissible rows need a lower row of length at least 2"));
    }
    if !lower.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::usage("DMT rows must be weakly decreasing"));
    }
    let ranges: Vec<_> = lower.windows(2).map(|w| (w[1], w[0])).collect();
    let mut candidates = Vec::new();
    product_filtered(&ranges, &mut Vec::new(), &|_, _| true, &mut candidates);
    let lower_counts = counts(lower);
    Ok(candidates
        .into_iter()
        .filter(|l| {
            let c = counts(l);
            c.values().all(|&x| x <= 2)
                && c.iter()
                    .all(|(v, &x)| x != 1 || lower_counts.get(v).copied() != Some(1))
        })
        .map(|r| Row::new(r).expect("non-empty"))
        .collect())
}

fn counts(row: &[Entry]) -> HashMap<Entry, usize> {
    let mut m = HashMap::new();
    for &x in row {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

fn product_filtered(
    ranges: &[(Entry, Entry)],
    partial: &mut Vec<Entry>,
    keep: &dyn Fn(Option<Entry>, Entry) -> bool,
    out: &mut Vec<Vec<Entry>>,
) {
    let i = partial.len();
    if i == ranges.len() {
        out.push(partial.clone());
        return;
    }
    let (lo, hi) = ranges[i];
    for v in lo..=hi {
        if keep(partial.last().copied(), v) {
            partial.push(v);
            product_filtered(ranges, partial, keep, out);
            partial.pop();
        }
    }
}

/// Lazy depth-first enumeration of chains `bottom, above, above-that, ...` down
/// to a node of the given terminal size. `T` is whatever one level carries.
pub(crate) struct BottomUp<T, F> {
    path: Vec<T>,
    pending: Vec<std::vec::IntoIter<T>>,
    children: F,
    is_terminal: fn(&T) -> bool,
    limits: EnumerationLimits,
    rows_generated: u64,
    yielded: u64,
    started: bool,
    done: bool,
}

impl<T: Clone, F: FnMut(&T) -> Result<Vec<T>>> BottomUp<T, F> {
    pub(crate) fn new(root: T, children: F, is_terminal: fn(&T) -> bool, limits: EnumerationLimits) -> Self {
        BottomUp {
            path: vec![root],
            pending: Vec::new(),
            children,
            is_terminal,
            limits,
            rows_generated: 0,
            yielded: 0,
            started: false,
            done: false,
        }
    }

    fn expand(&mut self) -> Result<()> {
        let top = self.path.last().expect("path non-empty");
        let kids = (self.children)(top)?;
        self.rows_generated += kids.len() as u64;
        if self.rows_generated > self.limits.max_rows_generated {
            return Err(Error::budget(format!(
                "more than {} rows generated",
                self.limits.max_rows_generated
            )));
        }
        self.pending.push(kids.into_iter());
        Ok(())
    }

    fn emit(&mut self) -> Option<Result<Vec<T>>> {
        self.yielded += 1;
        if self.yielded > self.limits.max_triangles {
            self.done = true;
            return Some(Err(Error::budget(format!(
                "more than {} triangles",
                self.limits.max_triangles
            ))));
        }
        Some(Ok(self.path.clone()))
    }
}

impl<T: Clone, F: FnMut(&T) -> Result<Vec<T>>> Iterator for BottomUp<T, F> {
    type Item = Result<Vec<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if (self.is_terminal)(&self.path[0]) {
                self.done = true;
                return self.emit();
            }
            if let Err(e) = self.expand() {
                self.done = true;
                return Some(Err(e));
            }
        }
        loop {
            let Some(level) = self.pending.last_mut() else {
                self.done = true;
                return None;
            };
            match level.next() {
                None => {
                    self.pending.pop();
                    self.path.pop();
                    if self.pending.is_empty() {
                        self.done = true;
                        return None;
                    }
                }
                Some(child) => {
                    let terminal = (self.is_terminal)(&child);
                    self.path.push(child);
                    if terminal {
                        let item = self.emit();
                        self.path.pop();
                        return item;
                    }
                    if let Err(e) = self.expand() {
                        self.done = true;
                        return Some(Err(e));
                    }
                }
            }
        }
    }
}

fn single_entry(r: &Row) -> bool {
    r.len() == 1
}

fn rows_to_triangle(path: Vec<Row>) -> Triangle {
    Triangle::from_bottom_up(path.into_iter().map(Row::into_vec).collect())
}

type TriangleStream = Box<dyn Iterator<Item = Result<Triangle>> + Send>;

/// Every GMT with the given bottom row, depth first in lexicographic order of
/// successive rows. Budget exhaustion surfaces as a final `Err(Error::Budget)`.
pub fn enumerate_gmt(bottom: &Row, limits: EnumerationLimits) -> TriangleStream {
    let children = |r: &Row| Ok(gmt_admissible_rows(r)?.into_iter().map(|a| a.row).collect());
    Box::new(BottomUp::new(bottom.clone(), children, single_entry, limits).map(|p| p.map(rows_to_triangle)))
}

/// Every Monotone Triangle with the given strictly increasing bottom row.
pub fn enumerate_mt(bottom: &Row, limits: EnumerationLimits) -> Result<TriangleStream> {
    if !bottom.is_strictly_increasing() {
        return Err(Error::usage("Monotone Triangles need a strictly increasing bottom row"));
    }
    let children = |r: &Row| mt_admissible_rows(r);
    Ok(Box::new(
        BottomUp::new(bottom.clone(), children, single_entry, limits).map(|p| p.map(rows_to_triangle)),
    ))
}

/// Every Decreasing Monotone Triangle with the given weakly decreasing bottom row.
pub fn enumerate_dmt(bottom: &Row, limits: EnumerationLimits) -> Result<TriangleStream> {
    if !bottom.is_weakly_decreasing() {
        return Err(Error::usage(
            "Decreasing Monotone Triangles need a weakly decreasing bottom row",
        ));
    }
    if counts(bottom).values().any(|&c| c > 2) {
        return Ok(Box::new(std::iter::empty()));
    }
    let children = |r: &Row| dmt_admissible_rows(r);
    Ok(Box::new(
        BottomUp::new(bottom.clone(), children, single_entry, limits).map(|p| p.map(rows_to_triangle)),
    ))
}

/// `sum over GMTs A with bottom row k of (-1)^sc(A)`, as a running sum over
/// admissible rows. Triangles are never materialized; signed counts of
/// intermediate rows are memoized for the duration of the call.
pub fn signed_gmt_count(bottom: &Row) -> SignedCount {
    let mut memo = HashMap::new();
    signed_gmt_rec(bottom, &mut memo)
}

fn signed_gmt_rec(k: &[Entry], memo: &mut HashMap<Vec<Entry>, SignedCount>) -> SignedCount {
    if k.len() == 1 {
        return SignedCount::from(1);
    }
    if let Some(v) = memo.get(k) {
        return v.clone();
    }
    let mut total = SignedCount::zero();
    for adm in gmt_admissible_rows(k).expect("length >= 2") {
        let sub = signed_gmt_rec(&adm.row, memo);
        if adm.sc_contribution % 2 == 0 {
            total += sub;
        } else {
            total -= sub;
        }
    }
    memo.insert(k.to_vec(), total.clone());
    total
}
