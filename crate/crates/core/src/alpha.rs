//! Evaluation of `alpha(n; k)` by each of the independent methods.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_traits::One;
use parking_lot::RwLock;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{operator_apply, operator_apply_alt, third_extension_apply};
use crate::rows::{enumerate_mt, signed_gmt_count, EnumerationLimits};
use crate::triangle::Row;
use crate::{Entry, SignedCount};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Summation-operator recursion on the last argument.
    Operator,
    /// The alternative operator recursion.
    OperatorAlt,
    /// Signed enumeration of Generalized Monotone Triangles.
    Gmt,
    /// Inclusion-exclusion over simple sums.
    Third,
    /// Plain Monotone-Triangle count; strictly increasing rows only.
    Mt,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Operator,
        Method::OperatorAlt,
        Method::Gmt,
        Method::Third,
        Method::Mt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Operator => "operator",
            Method::OperatorAlt => "operator-alt",
            Method::Gmt => "gmt",
            Method::Third => "third",
            Method::Mt => "mt",
        }
    }

    /// Methods that apply to `k`: all of them for strictly increasing rows, all but `mt` otherwise.
    pub fn applicable(k: &[Entry]) -> Vec<Method> {
        let increasing = k.windows(2).all(|w| w[0] < w[1]);
        Method::ALL
            .into_iter()
            .filter(|&m| m != Method::Mt || increasing)
            .collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s || (s == "operator_alt" && *m == Method::OperatorAlt))
            .ok_or_else(|| Error::usage(format!("unknown method {s:?}")))
    }
}

/// Memo table for `alpha`, shared across threads.
///
/// Entries are keyed by method and row, so each method's recursion only ever
/// reuses its own results. With translation normalization on, rows are shifted
/// so their first entry is 0 before lookup.
pub struct EvalCache {
    table: RwLock<HashMap<(Method, Vec<Entry>), SignedCount>>,
    hits: AtomicU64,
    misses: AtomicU64,
    normalize: bool,
    enabled: bool,
    max_entries: usize,
    mt_limits: EnumerationLimits,
    deadline: RwLock<Option<Instant>>,
}

impl Default for EvalCache {
    fn default() -> Self {
        EvalCache::new()
    }
}

impl EvalCache {
    pub fn new() -> Self {
        EvalCache {
            table: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            normalize: true,
            enabled: true,
            max_entries: 50_000_000,
            mt_limits: EnumerationLimits::default(),
            deadline: RwLock::new(None),
        }
    }

    /// A cache that never stores anything; every lookup recomputes.
    pub fn disabled() -> Self {
        EvalCache {
            enabled: false,
            ..EvalCache::new()
        }
    }

    pub fn with_translation_normalization(mut self, on: bool) -> Self {
        self.normalize = on;
        self
    }

    /// Caps the number of memoized rows; exceeding it is a budget error.
    pub fn with_max_entries(mut self, max_entries: usize) -> Self {
        self.max_entries = max_entries;
        self
    }

    pub fn with_mt_limits(mut self, limits: EnumerationLimits) -> Self {
        self.mt_limits = limits;
        self
    }

    /// Evaluations after `deadline` fail with a budget error; `None` lifts the limit.
    /// Stored values are unaffected.
    pub fn set_deadline(&self, deadline: Option<Instant>) {
        *self.deadline.write() = deadline;
    }

    pub(crate) fn check_deadline(&self) -> Result<()> {
        match *self.deadline.read() {
            Some(d) if Instant::now() >= d => Err(Error::budget("time budget exhausted")),
            _ => Ok(()),
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.table.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(&self, method: Method, k: &[Entry]) -> (Method, Vec<Entry>) {
        if self.normalize {
            let t = k[0];
            (method, k.iter().map(|x| x - t).collect())
        } else {
            (method, k.to_vec())
        }
    }

    fn get(&self, method: Method, k: &[Entry]) -> Option<SignedCount> {
        if !self.enabled {
            return None;
        }
        let found = self.table.read().get(&self.key(method, k)).cloned();
        match found {
            Some(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            None => self.misses.fetch_add(1, Ordering::Relaxed),
        };
        found
    }

    fn put(&self, method: Method, k: &[Entry], v: &SignedCount) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        let key = self.key(method, k);
        let mut table = self.table.write();
        if table.len() >= self.max_entries && !table.contains_key(&key) {
            return Err(Error::budget(format!(
                "evaluation cache exceeded {} entries",
                self.max_entries
            )));
        }
        table.insert(key, v.clone());
        Ok(())
    }

    /// Writes the entries of one method, one record per line: `n row value`,
    /// e.g. `4 0,-2,-3,-1 -2`. Records are sorted, so output is reproducible.
    pub fn save(&self, method: Method, mut out: impl Write) -> Result<()> {
        let table = self.table.read();
        let mut records: Vec<_> = table.iter().filter(|((m, _), _)| *m == method).collect();
        records.sort_by(|a, b| (a.0 .1.len(), &a.0 .1).cmp(&(b.0 .1.len(), &b.0 .1)));
        for ((_, row), value) in records {
            let row = row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            writeln!(out, "{} {} {}", row.split(',').count(), row, value)?;
        }
        Ok(())
    }

    /// Loads records written by [`EvalCache::save`] into the given method's table.
    pub fn load(&self, method: Method, input: impl BufRead) -> Result<usize> {
        let mut count = 0;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("cache line {}: {line:?}", lineno + 1));
            let mut fields = line.split_whitespace();
            let (Some(n), Some(row), Some(value), None) = (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            let n: usize = n.parse().map_err(|_| bad())?;
            let row: Row = row.parse().map_err(|_| bad())?;
            let value: SignedCount = value.parse().map_err(|_| bad())?;
            if row.len() != n {
                return Err(bad());
            }
            self.put(method, &row, &value)?;
            count += 1;
        }
        Ok(count)
    }
}

/// `alpha(n; k_1, ..., k_n)` by the chosen method.
///
/// `alpha(1; k_1) = 1`. For `n >= 2` the operator methods recurse through the
/// memoized `alpha(n-1; .)` of the same method; `gmt`, `third` and `mt` use
/// their own routes.
pub fn alpha(k: &[Entry], method: Method, cache: &EvalCache) -> Result<SignedCount> {
    if k.is_empty() {
        return Err(Error::usage("alpha needs at least one argument"));
    }
    if method == Method::Mt && !k.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::usage("the mt method needs a strictly increasing row"));
    }
    alpha_rec(k, method, cache)
}

fn alpha_rec(k: &[Entry], method: Method, cache: &EvalCache) -> Result<SignedCount> {
    if k.len() == 1 {
        return Ok(SignedCount::one());
    }
    cache.check_deadline()?;
    if let Some(v) = cache.get(method, k) {
        return Ok(v);
    }
    let smaller = |l: &[Entry]| alpha_rec(l, method, cache);
    let value = match method {
        Method::Operator => operator_apply(k, &smaller)?,
        Method::OperatorAlt if k.len() == 2 => operator_apply(k, &smaller)?,
        Method::OperatorAlt => operator_apply_alt(k, &smaller)?,
        Method::Third => third_extension_apply(k, &smaller)?,
        Method::Gmt => signed_gmt_count(&Row::new(k.to_vec())?),
        Method::Mt => {
            let mut count = 0u64;
            for t in enumerate_mt(&Row::new(k.to_vec())?, cache.mt_limits)? {
                t?;
                count += 1;
                if count.is_multiple_of(65_536) {
                    cache.check_deadline()?;
                }
            }
            SignedCount::from(count)
        }
    };
    cache.put(method, k, &value)?;
    Ok(value)
}

/// `alpha(n; k)` by the inclusion-exclusion formula over simple sums, recursing
/// through memoized evaluations of the same formula.
pub fn third_extension_eval(k: &[Entry], cache: &EvalCache) -> Result<SignedCount> {
    alpha(k, Method::Third, cache)
}
