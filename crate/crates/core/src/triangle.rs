//! Triangular integer arrays, membership tests for the triangle classes, and
//! the sign statistics attached to them.
//!
//! Rows are stored top to bottom: row 1 is the apex, row `n` is the bottom row
//! `(k_1, ..., k_n)`. Positions are 1-indexed `(row, col)` with
//! `1 <= col <= row <= n`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Entry;

/// A non-empty integer tuple: a bottom row, a penultimate row, or an operator argument.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Entry>", into = "Vec<Entry>")]
pub struct Row(Vec<Entry>);

impl Row {
    pub fn new(entries: Vec<Entry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::usage("a row needs at least one entry"));
        }
        Ok(Row(entries))
    }

    pub fn entries(&self) -> &[Entry] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Entry> {
        self.0
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// The row shifted by `t` in every entry.
    pub fn translated(&self, t: Entry) -> Row {
        Row(self.0.iter().map(|&x| x + t).collect())
    }
}

impl Deref for Row {
    type Target = [Entry];

    fn deref(&self) -> &[Entry] {
        &self.0
    }
}

impl TryFrom<Vec<Entry>> for Row {
    type Error = Error;

    fn try_from(v: Vec<Entry>) -> Result<Self> {
        Row::new(v)
    }
}

impl From<Row> for Vec<Entry> {
    fn from(r: Row) -> Self {
        r.0
    }
}

/// Parses comma-separated integers, e.g. `"4,2,1,3"` or `"-1, 0, 2"`.
impl FromStr for Row {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<Entry>()
                    .map_err(|e| Error::Parse(format!("bad row entry {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Row::new(entries)
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// 1-indexed position `(row, col)` in a triangle. Serialized as `[row, col]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

impl From<(usize, usize)> for Position {
    fn from((row, col): (usize, usize)) -> Self {
        Position { row, col }
    }
}

impl From<Position> for (usize, usize) {
    fn from(p: Position) -> Self {
        (p.row, p.col)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// A triangular array of integers. Serialized as a JSON array of rows, apex first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Entry>>", into = "Vec<Vec<Entry>>")]
pub struct Triangle {
    rows: Vec<Vec<Entry>>,
}

impl Triangle {
    /// Builds a triangle from rows listed apex first. Row `i` must have `i` entries.
    pub fn new(rows: Vec<Vec<Entry>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::usage("a triangle needs at least one row"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::usage(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
        }
        Ok(Triangle { rows })
    }

    /// Builds a triangle from rows listed bottom first, the order enumeration produces them in.
    pub(crate) fn from_bottom_up(mut rows: Vec<Vec<Entry>>) -> Self {
        rows.reverse();
        debug_assert!(rows.iter().enumerate().all(|(i, r)| r.len() == i + 1));
        Triangle { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Entry `a(i, j)`, 1-indexed.
    pub fn get(&self, i: usize, j: usize) -> Option<Entry> {
        if i == 0 || j == 0 {
            return None;
        }
        self.rows.get(i - 1).and_then(|r| r.get(j - 1)).copied()
    }

    /// Row `i`, 1-indexed from the apex.
    pub fn row(&self, i: usize) -> &[Entry] {
        &self.rows[i - 1]
    }

    pub fn rows(&self) -> &[Vec<Entry>] {
        &self.rows
    }

    pub fn bottom(&self) -> &[Entry] {
        self.rows.last().expect("triangle is non-empty")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("triangle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Adjacent row pairs `(upper, lower)` with the 1-based index of the upper row.
    fn row_pairs(&self) -> impl Iterator<Item = (usize, &[Entry], &[Entry])> {
        self.rows
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i + 1, w[0].as_slice(), w[1].as_slice()))
    }
}

impl TryFrom<Vec<Vec<Entry>>> for Triangle {
    type Error = Error;

    fn try_from(rows: Vec<Vec<Entry>>) -> Result<Self> {
        Triangle::new(rows)
    }
}

impl From<Triangle> for Vec<Vec<Entry>> {
    fn from(t: Triangle) -> Self {
        t.rows
    }
}

/// Newcomer and sign-changing-pair counts of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignStatistics {
    pub newcomers: usize,
    pub sign_changing_pairs: usize,
    pub sc: usize,
    pub sign: i8,
}

impl SignStatistics {
    pub fn new(newcomers: usize, sign_changing_pairs: usize) -> Self {
        let sc = newcomers + sign_changing_pairs;
        SignStatistics {
            newcomers,
            sign_changing_pairs,
            sc,
            sign: if sc.is_multiple_of(2) { 1 } else { -1 },
        }
    }
}

/// Outcome of a GMT membership test: the first violated condition in
/// row-major order from the apex, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Index of the violated GMT condition, 1 to 3.
    pub condition: Option<u8>,
    pub position: Option<Position>,
}

impl ValidationReport {
    fn ok() -> Self {
        ValidationReport {
            valid: true,
            condition: None,
            position: None,
        }
    }

    fn violated(condition: u8, row: usize, col: usize) -> Self {
        ValidationReport {
            valid: false,
            condition: Some(condition),
            position: Some(Position::new(row, col)),
        }
    }
}

/// Strict increase along rows, weak increase along both diagonals.
pub fn validate_monotone_triangle(t: &Triangle) -> bool {
    t.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]))
        && t.row_pairs().all(|(_, upper, lower)| {
            upper
                .iter()
                .enumerate()
                .all(|(c, &x)| lower[c] <= x && x <= lower[c + 1])
        })
}

fn multiplicities(row: &[Entry]) -> HashMap<Entry, usize> {
    let mut counts = HashMap::new();
    for &x in row {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts
}

/// Decreasing Monotone Triangle membership: weakly decreasing diagonals, no integer
/// more than twice in a row, and no integer exactly once in each of two consecutive rows.
pub fn validate_dmt(t: &Triangle) -> bool {
    let diagonals = t.row_pairs().all(|(_, upper, lower)| {
        upper
            .iter()
            .enumerate()
            .all(|(c, &x)| lower[c] >= x && x >= lower[c + 1])
    });
    if !diagonals {
        return false;
    }
    let counts: Vec<_> = t.rows.iter().map(|r| multiplicities(r)).collect();
    if counts.iter().any(|m| m.values().any(|&c| c > 2)) {
        return false;
    }
    counts
        .windows(2)
        .all(|w| w[0].iter().all(|(v, &c)| c != 1 || w[1].get(v).copied() != Some(1)))
}

/// Checks the three GMT conditions between one upper row and the row below it.
/// `upper_index` is the 1-based index of the upper row, used for reporting.
pub(crate) fn check_gmt_pair(upper_index: usize, upper: &[Entry], lower: &[Entry]) -> ValidationReport {
    let m = upper.len();
    for c in 0..m {
        let (x, lo, hi) = (upper[c], lower[c], lower[c + 1]);
        let (row, col) = (upper_index, c + 1);
        if x < lo.min(hi) || x > lo.max(hi) {
            return ValidationReport::violated(1, row, col);
        }
        if c + 1 < m && lo <= hi && hi <= lower[c + 2] && x >= upper[c + 1] {
            return ValidationReport::violated(2, row, col);
        }
        if lo > hi {
            if x == lo && (c == 0 || upper[c - 1] != x) {
                return ValidationReport::violated(3, row, col);
            }
            if x == hi && (c + 1 == m || upper[c + 1] != x) {
                return ValidationReport::violated(3, row, col);
            }
        }
    }
    ValidationReport::ok()
}

/// Generalized Monotone Triangle membership with the first violation reported.
///
/// Condition (3) with a missing left or right neighbour counts as a violation.
pub fn validate_gmt(t: &Triangle) -> ValidationReport {
    for (i, upper, lower) in t.row_pairs() {
        let report = check_gmt_pair(i, upper, lower);
        if !report.valid {
            return report;
        }
    }
    ValidationReport::ok()
}

/// Newcomers and sign-changing pairs of `upper` relative to `lower`.
pub(crate) fn pair_statistics(upper: &[Entry], lower: &[Entry]) -> (usize, usize) {
    let newcomers = upper
        .iter()
        .enumerate()
        .filter(|&(c, &x)| lower[c] > x && x > lower[c + 1])
        .count();
    let pairs = upper
        .windows(2)
        .enumerate()
        .filter(|&(c, w)| w[0] == w[1] && w[1] == lower[c + 1])
        .count();
    (newcomers, pairs)
}

/// Counts newcomers and sign-changing pairs over every row above the bottom.
///
/// Defined on any triangle; the counts are taken literally even when `t` is not a GMT.
pub fn sc_statistic(t: &Triangle) -> SignStatistics {
    let (newcomers, pairs) = t
        .row_pairs()
        .map(|(_, upper, lower)| pair_statistics(upper, lower))
        .fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    SignStatistics::new(newcomers, pairs)
}

/// A triangle decorated with special entries.
///
/// Special entries sit at interior positions `1 < col < row` and are never
/// horizontally adjacent. Serialized as `{"triangle": [...], "special": [[i,j], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TnObjectRepr", into = "TnObjectRepr")]
pub struct TnObject {
    triangle: Triangle,
    special: BTreeSet<Position>,
}

#[derive(Serialize, Deserialize)]
struct TnObjectRepr {
    triangle: Triangle,
    special: Vec<Position>,
}

impl TryFrom<TnObjectRepr> for TnObject {
    type Error = Error;

    fn try_from(r: TnObjectRepr) -> Result<Self> {
        TnObject::new(r.triangle, r.special)
    }
}

impl From<TnObject> for TnObjectRepr {
    fn from(o: TnObject) -> Self {
        TnObjectRepr {
            triangle: o.triangle,
            special: o.special.into_iter().collect(),
        }
    }
}

impl TnObject {
    pub fn new(triangle: Triangle, special: impl IntoIterator<Item = Position>) -> Result<Self> {
        let special: BTreeSet<Position> = special.into_iter().collect();
        let n = triangle.size();
        for p in &special {
            if !(1 < p.col && p.col < p.row && p.row <= n) {
                return Err(Error::usage(format!("special position {p} is not interior")));
            }
            if special.contains(&Position::new(p.row, p.col + 1)) {
                return Err(Error::usage(format!("special positions adjacent at {p}")));
            }
        }
        Ok(TnObject { triangle, special })
    }

    pub fn triangle(&self) -> &Triangle {
        &self.triangle
    }

    pub fn special(&self) -> &BTreeSet<Position> {
        &self.special
    }

    pub fn is_special(&self, row: usize, col: usize) -> bool {
        self.special.contains(&Position::new(row, col))
    }

    /// Whether `a(row, col)` is a parent of some special entry in the row below.
    pub fn is_parent_of_special(&self, row: usize, col: usize) -> bool {
        self.is_special(row + 1, col) || self.is_special(row + 1, col + 1)
    }

    /// Entries strictly between a strictly decreasing pair below, excluding parents of specials.
    pub fn inversions(&self) -> usize {
        let t = &self.triangle;
        let mut count = 0;
        for (i, upper, lower) in t.row_pairs() {
            for (c, &x) in upper.iter().enumerate() {
                if !self.is_parent_of_special(i, c + 1) && lower[c] > x && x > lower[c + 1] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Toggles the special mark at a position, re-checking the decoration invariants.
    pub(crate) fn toggled(&self, p: Position) -> Result<TnObject> {
        let mut special = self.special.clone();
        if !special.remove(&p) {
            special.insert(p);
        }
        TnObject::new(self.triangle.clone(), special)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decorated triangle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `s(A)`: number of special entries plus number of inversions.
pub fn s_statistic(o: &TnObject) -> usize {
    o.special.len() + o.inversions()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(rows: &[&[Entry]]) -> Triangle {
        Triangle::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn fig1() -> Triangle {
        tri(&[&[4], &[4, 5], &[3, 5, 7], &[2, 5, 6, 8], &[2, 4, 5, 8, 9]])
    }

    fn fig2() -> Vec<Triangle> {
        vec![
            tri(&[&[2], &[2, 2], &[2, 2, 1], &[4, 2, 1, 3]]),
            tri(&[&[2], &[2, 3], &[2, 2, 3], &[4, 2, 1, 3]]),
            tri(&[&[3], &[2, 3], &[2, 2, 3], &[4, 2, 1, 3]]),
            tri(&[&[1], &[1, 1], &[3, 1, 1], &[4, 2, 1, 3]]),
        ]
    }

    #[test]
    fn malformed_triangles_are_rejected() {
        assert!(Triangle::new(vec![]).is_err());
        assert!(Triangle::new(vec![vec![1], vec![1]]).is_err());
        assert!(Row::new(vec![]).is_err());
        assert!("1,,2".parse::<Row>().is_err());
        assert_eq!("-1, 0,2".parse::<Row>().unwrap().entries(), &[-1, 0, 2]);
    }

    #[test]
    fn monotone_triangle_examples() {
        assert!(validate_monotone_triangle(&fig1()));
        assert!(validate_monotone_triangle(&tri(&[&[7]])));
        assert!(!validate_monotone_triangle(&tri(&[&[2], &[2, 2]])));
        assert_eq!(sc_statistic(&fig1()).sc, 0);
    }

    #[test]
    fn dmt_examples() {
        assert!(validate_dmt(&tri(&[&[2], &[2, 2], &[2, 2, 1]])));
        assert!(!validate_dmt(&tri(&[&[1], &[2, 1]])));
        assert!(!validate_dmt(&tri(&[&[3], &[3, 3], &[3, 3, 3]])));
    }

    #[test]
    fn gmt_examples() {
        for t in fig2() {
            assert!(validate_gmt(&t).valid, "{t:?}");
        }
        assert!(validate_gmt(&fig1()).valid);
        // The apex 2 equals its SW-neighbour above a strict descent 2 > 1, and has no left neighbour.
        let report = validate_gmt(&tri(&[&[2], &[2, 1], &[3, 1, 1]]));
        assert!(!report.valid);
        assert_eq!(report.condition, Some(3));
        assert_eq!(report.position, Some(Position::new(1, 1)));
    }

    #[test]
    fn gmt_condition_one_and_two_reported() {
        let r = validate_gmt(&tri(&[&[5], &[1, 2]]));
        assert_eq!((r.condition, r.position), (Some(1), Some(Position::new(1, 1))));
        let r = validate_gmt(&tri(&[&[2], &[2, 2], &[1, 2, 3]]));
        assert_eq!((r.condition, r.position), (Some(2), Some(Position::new(2, 1))));
    }

    #[test]
    fn fig2_sign_statistics() {
        let stats: Vec<_> = fig2().iter().map(sc_statistic).collect();
        assert_eq!(stats[0], SignStatistics::new(0, 2));
        assert_eq!(stats[0].sign, 1);
        assert_eq!(stats[3], SignStatistics::new(1, 2));
        assert_eq!(stats[3].sign, -1);
        let signs: Vec<i8> = stats.iter().map(|s| s.sign).collect();
        assert_eq!(signs, vec![1, -1, -1, -1]);
        assert_eq!(signs.iter().map(|&s| s as i32).sum::<i32>(), -2);
    }

    #[test]
    fn s_statistic_examples() {
        let plain = TnObject::new(fig1(), []).unwrap();
        assert_eq!(s_statistic(&plain), 0);

        // Literal count; this decoration does not make a valid member of T_4(4,2,1,3).
        let decorated = TnObject::new(fig2()[0].clone(), [Position::new(3, 2)]).unwrap();
        assert_eq!(s_statistic(&decorated), 1);

        let inversion = TnObject::new(tri(&[&[2], &[3, 1]]), []).unwrap();
        assert_eq!(s_statistic(&inversion), 1);
    }

    #[test]
    fn tn_decoration_invariants() {
        let t = tri(&[&[1], &[1, 1], &[1, 1, 1], &[1, 1, 1, 1]]);
        assert!(TnObject::new(t.clone(), [Position::new(2, 1)]).is_err());
        assert!(TnObject::new(t.clone(), [Position::new(3, 3)]).is_err());
        assert!(TnObject::new(t.clone(), [Position::new(4, 2), Position::new(4, 3)]).is_err());
        assert!(TnObject::new(t, [Position::new(3, 2), Position::new(4, 3)]).is_ok());
    }

    #[test]
    fn json_is_bit_exact() {
        let s = "[[2],[2,2],[2,2,1],[4,2,1,3]]";
        let t = Triangle::from_json(s).unwrap();
        assert_eq!(t, fig2()[0]);
        assert_eq!(t.to_json(), s);
        assert!(Triangle::from_json("[[1],[2]]").is_err());

        let s = r#"{"triangle":[[2],[2,2],[2,2,1],[4,2,1,3]],"special":[[3,2]]}"#;
        let o = TnObject::from_json(s).unwrap();
        assert_eq!(o.to_json(), s);
        assert!(TnObject::from_json(r#"{"triangle":[[1],[1,1]],"special":[[2,1]]}"#).is_err());
    }
}
