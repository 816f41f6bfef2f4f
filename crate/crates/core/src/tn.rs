//! Triangles decorated with special entries, their signed enumeration, and the
//! sign-reversing involution that reduces them to Generalized Monotone Triangles.
//!
//! The parents of `a(i,j)` are `a(i-1,j-1)` and `a(i-1,j)`. A special entry equals
//! both parents; entries that are not a parent of a special entry are weakly
//! between their two lower neighbours when those increase weakly, and strictly
//! between them (an inversion) when they decrease strictly.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::nonadjacent_index_sets;
use crate::report::{ClaimStatus, PointResult, VerificationReport};
use crate::rows::{enumerate_gmt, signed_gmt_count, BottomUp, EnumerationLimits};
use crate::triangle::{s_statistic, sc_statistic, Position, Row, TnObject, Triangle};
use crate::{Entry, SignedCount};

/// One level of a decorated triangle under construction: a row, and the
/// 0-based positions of the special entries in the row directly below it.
#[derive(Clone, Debug)]
struct Level {
    row: Vec<Entry>,
    specials_below: Vec<usize>,
}

/// Rows that may sit above `lower`, each with the special positions it implies
/// in `lower` and its contribution to `s`. Special-position sets come first
/// (by size, then lexicographically); rows are lexicographic within a set.
fn tn_children(lower: &[Entry]) -> Vec<(Vec<Entry>, Vec<usize>, usize)> {
    let m = lower.len();
    let mut out = Vec::new();
    for set in nonadjacent_index_sets(m) {
        // 1-based position i in `lower` pins l_{i-1} = l_i = k_i.
        let mut pinned: Vec<Option<Entry>> = vec![None; m - 1];
        for &i in &set {
            pinned[i - 2] = Some(lower[i - 1]);
            pinned[i - 1] = Some(lower[i - 1]);
        }
        let mut choices = Vec::with_capacity(m - 1);
        let mut inversions = 0;
        for j in 0..m - 1 {
            let (lo, hi) = (lower[j], lower[j + 1]);
            let values: Vec<Entry> = match pinned[j] {
                Some(v) => vec![v],
                None if lo <= hi => (lo..=hi).collect(),
                None => {
                    inversions += 1;
                    (hi + 1..lo).collect()
                }
            };
            choices.push(values);
        }
        let specials: Vec<usize> = set.iter().map(|&i| i - 1).collect();
        let weight = set.len() + inversions;
        let mut rows = vec![Vec::with_capacity(m - 1)];
        for values in &choices {
            rows = rows
                .into_iter()
                .flat_map(|prefix: Vec<Entry>| {
                    values.iter().map(move |&v| {
                        let mut r = prefix.clone();
                        r.push(v);
                        r
                    })
                })
                .collect();
        }
        out.extend(rows.into_iter().map(|r| (r, specials.clone(), weight)));
    }
    out
}

fn level_to_object(path: Vec<Level>) -> TnObject {
    let n = path[0].row.len();
    let mut special = BTreeSet::new();
    for level in &path[1..] {
        // Specials of this level sit in the row below, which has row.len() + 1 entries.
        let below = level.row.len() + 1;
        special.extend(level.specials_below.iter().map(|&c| Position::new(below, c + 1)));
    }
    debug_assert_eq!(path.len(), n);
    let triangle = Triangle::from_bottom_up(path.into_iter().map(|l| l.row).collect());
    TnObject::new(triangle, special).expect("generated decorations are interior and non-adjacent")
}

/// Every decorated triangle with the given bottom row.
pub fn enumerate_tn(bottom: &Row, limits: EnumerationLimits) -> Box<dyn Iterator<Item = Result<TnObject>> + Send> {
    let root = Level {
        row: bottom.to_vec(),
        specials_below: Vec::new(),
    };
    let children = |l: &Level| {
        Ok(tn_children(&l.row)
            .into_iter()
            .map(|(row, specials_below, _)| Level { row, specials_below })
            .collect())
    };
    let terminal: fn(&Level) -> bool = |l| l.row.len() == 1;
    Box::new(BottomUp::new(root, children, terminal, limits).map(|p| p.map(level_to_object)))
}

/// `sum over decorated triangles A of (-1)^s(A)`, without materializing them.
pub fn signed_tn_count(bottom: &Row) -> SignedCount {
    fn rec(k: &[Entry], memo: &mut HashMap<Vec<Entry>, SignedCount>) -> SignedCount {
        if k.len() == 1 {
            return SignedCount::one();
        }
        if let Some(v) = memo.get(k) {
            return v.clone();
        }
        let mut total = SignedCount::zero();
        for (row, _, weight) in tn_children(k) {
            let sub = rec(&row, memo);
            if weight % 2 == 0 {
                total += sub;
            } else {
                total -= sub;
            }
        }
        memo.insert(k.to_vec(), total.clone());
        total
    }
    rec(bottom, &mut HashMap::new())
}

/// Checks the three defining conditions of a decorated triangle.
pub fn validate_tn(o: &TnObject) -> bool {
    let t = o.triangle();
    let n = t.size();
    let get = |i, j| t.get(i, j).expect("in range");
    for p in o.special() {
        let x = get(p.row, p.col);
        if get(p.row - 1, p.col - 1) != x || get(p.row - 1, p.col) != x {
            return false;
        }
    }
    for i in 1..n {
        for j in 1..=i {
            if o.is_parent_of_special(i, j) {
                continue;
            }
            let (x, lo, hi) = (get(i, j), get(i + 1, j), get(i + 1, j + 1));
            let ok = if lo <= hi { lo <= x && x <= hi } else { hi < x && x < lo };
            if !ok {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Involution {
    /// The partner object, whose `s` differs by one.
    Partner(TnObject),
    /// No entry qualifies for toggling.
    Fixed,
}

/// The first position, scanning rows from the apex and then columns from the
/// left, with `a(i,j-1) <= a(i,j) <= a(i,j+1)` and both parents equal to `a(i,j)`.
/// Both horizontal neighbours must exist.
pub fn toggle_position(o: &TnObject) -> Option<Position> {
    let t = o.triangle();
    for i in 2..=t.size() {
        let row = t.row(i);
        let parents = t.row(i - 1);
        for j in 2..i {
            let (left, x, right) = (row[j - 2], row[j - 1], row[j]);
            if left <= x && x <= right && parents[j - 2] == x && parents[j - 1] == x {
                return Some(Position::new(i, j));
            }
        }
    }
    None
}

/// Toggles the special mark of the entry found by [`toggle_position`].
pub fn involution_step(o: &TnObject) -> Result<Involution> {
    let Some(p) = toggle_position(o) else {
        return Ok(Involution::Fixed);
    };
    let partner = o
        .toggled(p)
        .map_err(|e| Error::Internal(format!("toggling {p} in {}: {e}", o.to_json())))?;
    if !validate_tn(&partner) {
        return Err(Error::Internal(format!(
            "toggling {p} in {} leaves the set",
            o.to_json()
        )));
    }
    Ok(Involution::Partner(partner))
}

/// Special positions forced by the reduced set: interior entries equal to both parents.
fn inferred_specials(t: &Triangle) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    for i in 3..=t.size() {
        for j in 2..i {
            let x = t.get(i, j).expect("in range");
            if t.get(i - 1, j - 1) == Some(x) && t.get(i - 1, j) == Some(x) {
                out.insert(Position::new(i, j));
            }
        }
    }
    out
}

/// Checks the reduction from decorated triangles to GMTs for one bottom row:
/// the involution pairs every non-fixed object with a partner of opposite sign,
/// the fixed points are exactly the GMTs (with specials given by the equal-parents
/// rule and `s = sc`), and the two signed counts agree.
pub fn verify_reduction(bottom: &Row, limits: EnumerationLimits) -> Result<VerificationReport> {
    let objects: Vec<TnObject> = enumerate_tn(bottom, limits).collect::<Result<_>>()?;
    let members: HashSet<&TnObject> = objects.iter().collect();
    let gmts: BTreeSet<Triangle> = enumerate_gmt(bottom, limits).collect::<Result<_>>()?;
    let label = format!("k=({bottom})");

    let mut violators = 0usize;
    let mut paired = 0usize;
    let mut pairing_witness = None;
    let mut fixed = Vec::new();
    for o in &objects {
        match involution_step(o)? {
            Involution::Fixed => fixed.push(o),
            Involution::Partner(p) => {
                violators += 1;
                let back = involution_step(&p)?;
                let flips = s_statistic(&p).abs_diff(s_statistic(o)) == 1;
                if members.contains(&p) && back == Involution::Partner(o.clone()) && flips {
                    paired += 1;
                } else if pairing_witness.is_none() {
                    pairing_witness = Some(o.to_json());
                }
            }
        }
    }

    let mut fixed_witness = None;
    let mut fixed_triangles = BTreeSet::new();
    for o in &fixed {
        let t = o.triangle();
        let consistent =
            *o.special() == inferred_specials(t) && gmts.contains(t) && s_statistic(o) == sc_statistic(t).sc;
        if !consistent && fixed_witness.is_none() {
            fixed_witness = Some(o.to_json());
        }
        fixed_triangles.insert(t.clone());
    }
    let bijective = fixed_triangles.len() == fixed.len() && fixed_triangles == gmts;

    let mut signed_tn = SignedCount::zero();
    for o in &objects {
        if s_statistic(o).is_multiple_of(2) {
            signed_tn += 1;
        } else {
            signed_tn -= 1;
        }
    }
    let mut points = vec![PointResult::compare(
        format!("{label} violators paired"),
        paired,
        violators,
    )];
    if let Some(w) = pairing_witness {
        points[0] = points[0].clone().with_witness(w);
    }
    let mut fixed_point = PointResult::compare(format!("{label} fixed points = GMTs"), fixed.len(), gmts.len());
    if !bijective || fixed_witness.is_some() {
        fixed_point.pass = false;
        fixed_point =
            fixed_point.with_witness(fixed_witness.unwrap_or_else(|| "fixed-point set differs from GMT set".into()));
    }
    points.push(fixed_point);
    points.push(PointResult::compare(
        format!("{label} signed T count = recursive T count"),
        &signed_tn,
        signed_tn_count(bottom),
    ));
    points.push(PointResult::compare(
        format!("{label} signed T count = signed GMT count"),
        &signed_tn,
        signed_gmt_count(bottom),
    ));
    Ok(
        VerificationReport::new("reduction", ClaimStatus::Proven, label, points).with_note(format!(
            "{} objects, {} violators, {} fixed points",
            objects.len(),
            violators,
            fixed.len()
        )),
    )
}
