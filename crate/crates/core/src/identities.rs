//! ASM-related quantities and the identity / conjecture verification suite.
//!
//! Each check evaluates both sides exactly and records one [`PointResult`] per
//! parameter point. Points are generated sequentially (including all seeded
//! sampling), evaluated in parallel, and collected in generation order, so a
//! report does not depend on the number of worker threads.
//!
//! Identifiers are stable strings:
//!
//! | id | claim |
//! |----|-------|
//! | `theorem1` | operator = operator-alt = gmt = third (= mt on increasing rows) |
//! | `lemma1` | operator applied to `A` = signed sum of `A` over admissible rows, any `A` |
//! | `lemma1-reduced` | the same for `A` vanishing on rows with three consecutive equal entries |
//! | `operator-alt` | both operator recursions agree on arbitrary `A` |
//! | `reduction` | decorated triangles reduce to GMTs by the involution |
//! | `cyclic` | `alpha(k_1..k_n) = (-1)^(n-1) alpha(k_2..k_n, k_1 - n)` |
//! | `neighbor-split` | `t(x, x+1) = t(x, x) + t(x+1, x+1)` |
//! | `two-step-split` | `t(x, x+2) = t(x,x) + t(x+1,x+1) + t(x+2,x+2) + t(x+2,x+1) + t(x+1,x)` |
//! | `shift-antisymmetry` | `f_i(k) = -f_i(.., k_{i+1}+1, k_i-1, ..)` with `f_i = V alpha` |
//! | `comb-rec` | `A_n = alpha(2n; n,n,n-1,n-1,..,1,1)` |
//! | `hole-one-desc-i1` | the `i = 1` case of `hole-one-desc` |
//! | `asm-chain` | `A_n`, refined sums and VSASM counts against plain enumeration |
//! | `vsasm-reverse` | `alpha(2n+1; 2n+1,..,1) = (-1)^n alpha(n; 2,4,..,2n)` |
//! | `vsasm-dup` | `alpha(n; 2,4,..,2n) = alpha(2n; 2n,2n,..,2,2)` |
//! | `prefix-concat` | `A_n = alpha(n+i; 1..i, 1..n)`, `i = 0..n` |
//! | `prefix-concat-signed` | `A_n = (-1)^n alpha(2n+1; 1..n+1, 1..n)` |
//! | `w-symmetry` | `W_{n,i} = W_{n,3n+3-i}` |
//! | `one-desc` | `A_n = alpha(n+2; 1..i+1, i..n)` |
//! | `rev-dup` | `A_n = alpha(n+k; 1..i-1, i+k-1,i+k-1,..,i,i, i+k..n)` |
//! | `hole-one-desc` | `alpha(n+1; 1..i-1, i+1, i, i+1..n) = -sum_j (j-i) A_{n,j}` |
//! | `ratio-k4`, `ratio-k5`, `ratio-k6` | `alpha(n+1; ratio row) = p_k(n)/q_k(n) A_{n-1}` |
//! | `ratio-raw` | the raw ratio `alpha / A_{n-1}` for a chosen `k` (no claim) |

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rayon::prelude::*;

use crate::alpha::{alpha, EvalCache, Method};
use crate::error::{Error, Result};
use crate::operator::{operator_apply, operator_apply_alt};
use crate::report::{ClaimStatus, PointResult, VerificationReport};
use crate::rows::{enumerate_mt, gmt_admissible_rows, EnumerationLimits};
use crate::sampling::{exhaustive_rows, random_row, rng, RandomFunction, Window};
use crate::scalar::Value;
use crate::tn::verify_reduction;
use crate::triangle::Row;
use crate::{Entry, RationalCount, SignedCount};

/// Evaluates `alpha` with a fixed method through a shared cache.
#[derive(Clone, Copy)]
pub struct Evaluator<'a> {
    pub method: Method,
    pub cache: &'a EvalCache,
}

impl<'a> Evaluator<'a> {
    pub fn new(method: Method, cache: &'a EvalCache) -> Self {
        Evaluator { method, cache }
    }

    pub fn alpha(&self, k: &[Entry]) -> Result<SignedCount> {
        alpha(k, self.method, self.cache)
    }
}

fn fmt_row(k: &[Entry]) -> String {
    k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn range_to(n: usize) -> impl Iterator<Item = Entry> {
    1..=n as Entry
}

/// `A_n = alpha(n; 1, 2, ..., n)`.
pub fn asm_number(n: usize, ev: &Evaluator) -> Result<SignedCount> {
    if n == 0 {
        return Err(Error::usage("asm_number needs n >= 1"));
    }
    ev.alpha(&range_to(n).collect::<Vec<_>>())
}

/// `A_{n,i} = alpha(n-1; 1, ..., i-1, i+1, ..., n)`: ASMs of size `n` whose
/// first-row 1 is in column `i`.
pub fn refined_asm(n: usize, i: usize, ev: &Evaluator) -> Result<SignedCount> {
    if n < 2 || i == 0 || i > n {
        return Err(Error::usage(format!(
            "refined_asm needs n >= 2 and 1 <= i <= n, got n={n}, i={i}"
        )));
    }
    let k: Vec<Entry> = range_to(n).filter(|&x| x != i as Entry).collect();
    ev.alpha(&k)
}

/// `alpha(n; 2, 4, ..., 2n)`, the number of vertically symmetric ASMs of size `2n+1`.
pub fn vsasm_number(n: usize, ev: &Evaluator) -> Result<SignedCount> {
    if n == 0 {
        return Err(Error::usage("vsasm_number needs n >= 1"));
    }
    ev.alpha(&range_to(n).map(|x| 2 * x).collect::<Vec<_>>())
}

/// `W_{n,i} = alpha(2n+1; i, 2, ..., n+1, 1, 2, ..., n)`.
pub fn w_refinement(n: usize, i: usize, ev: &Evaluator) -> Result<SignedCount> {
    if n == 0 || i == 0 || i > 3 * n + 2 {
        return Err(Error::usage(format!(
            "w_refinement needs n >= 1 and 1 <= i <= 3n+2, got n={n}, i={i}"
        )));
    }
    let mut k = vec![i as Entry];
    k.extend(2..=n as Entry + 1);
    k.extend(range_to(n));
    ev.alpha(&k)
}

fn with_pair(k: &[Entry], i: usize, x: Entry, y: Entry) -> Vec<Entry> {
    let mut v = k.to_vec();
    v[i - 1] = x;
    v[i] = y;
    v
}

fn check_index(k: &[Entry], i: usize) -> Result<()> {
    if i == 0 || i >= k.len() {
        return Err(Error::usage(format!(
            "index i={i} needs 1 <= i <= n-1 for n={}",
            k.len()
        )));
    }
    Ok(())
}

/// `alpha(k_1..k_n)` against `(-1)^(n-1) alpha(k_2, ..., k_n, k_1 - n)`.
pub fn cyclic_point(k: &[Entry], ev: &Evaluator) -> Result<PointResult> {
    let n = k.len();
    let mut rotated = k[1..].to_vec();
    rotated.push(k[0] - n as Entry);
    let rhs = ev.alpha(&rotated)?.signed(n - 1);
    Ok(PointResult::compare(format!("k=({})", fmt_row(k)), ev.alpha(k)?, rhs))
}

/// `t(x, x+1) = t(x, x) + t(x+1, x+1)` at positions `i, i+1`, with `x = k_i`.
/// The given `k_{i+1}` is ignored.
pub fn neighbor_split_point(k: &[Entry], i: usize, ev: &Evaluator) -> Result<PointResult> {
    check_index(k, i)?;
    let x = k[i - 1];
    let t = |a, b| ev.alpha(&with_pair(k, i, a, b));
    let rhs = t(x, x)? + t(x + 1, x + 1)?;
    Ok(PointResult::compare(
        format!("k=({}) i={i} x={x}", fmt_row(k)),
        t(x, x + 1)?,
        rhs,
    ))
}

/// `t(x, x+2)` as the five-term sum, at positions `i, i+1`, with `x = k_i`.
pub fn two_step_split_point(k: &[Entry], i: usize, ev: &Evaluator) -> Result<PointResult> {
    check_index(k, i)?;
    let x = k[i - 1];
    let t = |a, b| ev.alpha(&with_pair(k, i, a, b));
    let rhs = t(x, x)? + t(x + 1, x + 1)? + t(x + 2, x + 2)? + t(x + 2, x + 1)? + t(x + 1, x)?;
    Ok(PointResult::compare(
        format!("k=({}) i={i} x={x}", fmt_row(k)),
        t(x, x + 2)?,
        rhs,
    ))
}

/// `f_i(k) = alpha(.., k_i - 1, k_{i+1}, ..) + alpha(.., k_i, k_{i+1} + 1, ..) - alpha(.., k_i - 1, k_{i+1} + 1, ..)`.
pub fn shift_operator(k: &[Entry], i: usize, ev: &Evaluator) -> Result<SignedCount> {
    check_index(k, i)?;
    let (x, y) = (k[i - 1], k[i]);
    let t = |a, b| ev.alpha(&with_pair(k, i, a, b));
    Ok(t(x - 1, y)? + t(x, y + 1)? - t(x - 1, y + 1)?)
}

/// `f_i(k)` against `-f_i(.., k_{i+1} + 1, k_i - 1, ..)`.
pub fn shift_antisymmetry_point(k: &[Entry], i: usize, ev: &Evaluator) -> Result<PointResult> {
    let (x, y) = (k[i.max(1) - 1], k.get(i).copied().unwrap_or_default());
    let lhs = shift_operator(k, i, ev)?;
    let rhs = -shift_operator(&with_pair(k, i, y + 1, x - 1), i, ev)?;
    Ok(PointResult::compare(format!("k=({}) i={i}", fmt_row(k)), lhs, rhs))
}

/// The antisymmetry at `k_{i+1} = k_i - 1` and `k_{i+1} = k_i - 2`, next to the two
/// split identities it specializes to (at `x = k_i - 1` and `x = k_i - 2`).
pub fn shift_antisymmetry_specializations(k: &[Entry], i: usize, ev: &Evaluator) -> Result<Vec<PointResult>> {
    check_index(k, i)?;
    let x = k[i - 1];
    let one = with_pair(k, i, x, x - 1);
    let two = with_pair(k, i, x, x - 2);
    let label = |p: PointResult, what: &str| PointResult {
        params: format!("{} [{what}]", p.params),
        ..p
    };
    Ok(vec![
        label(shift_antisymmetry_point(&one, i, ev)?, "antisymmetry at k_(i+1)=k_i-1"),
        label(
            neighbor_split_point(&with_pair(k, i, x - 1, x), i, ev)?,
            "neighbor-split at k_i-1",
        ),
        label(shift_antisymmetry_point(&two, i, ev)?, "antisymmetry at k_(i+1)=k_i-2"),
        label(
            two_step_split_point(&with_pair(k, i, x - 2, x), i, ev)?,
            "two-step-split at k_i-2",
        ),
    ])
}

/// Every method applicable to `k` agrees with the operator value.
pub fn method_agreement_point(k: &[Entry], cache: &EvalCache) -> Result<PointResult> {
    let methods = Method::applicable(k);
    let reference = alpha(k, Method::Operator, cache)?;
    let mut disagreeing = None;
    for &m in &methods[1..] {
        let v = alpha(k, m, cache)?;
        if v != reference && disagreeing.is_none() {
            disagreeing = Some((m, v));
        }
    }
    let names = methods.iter().map(|m| m.name()).collect::<Vec<_>>().join("=");
    let params = format!("k=({}) {names}", fmt_row(k));
    Ok(match disagreeing {
        None => PointResult::compare(params, &reference, &reference),
        Some((m, v)) => PointResult::compare(params, &reference, &v).with_witness(format!("{m} differs")),
    })
}

/// True if some three consecutive entries are equal.
pub fn has_triple(l: &[Entry]) -> bool {
    l.windows(3).any(|w| w[0] == w[1] && w[1] == w[2])
}

/// Operator applied to `f` against the signed sum of `f` over the admissible rows of `k`.
///
/// For `n >= 4` the operator also weights rows with three consecutive equal
/// entries, which are never admissible, so the identity can fail for arbitrary
/// `f` (e.g. `k = (0,0,0,0)`, where the operator gives `-f(0,0,0)`). With
/// `reduced`, `f` is replaced by `0` on such rows; `alpha` itself vanishes there.
pub fn lemma1_point(k: &[Entry], f: &RandomFunction, reduced: bool) -> Result<PointResult> {
    let value = |l: &[Entry]| {
        if reduced && has_triple(l) {
            SignedCount::zero()
        } else {
            f.eval(l)
        }
    };
    let eval = |l: &[Entry]| Ok(value(l));
    let lhs = operator_apply(k, &eval)?;
    let mut rhs = SignedCount::zero();
    for adm in gmt_admissible_rows(k)? {
        rhs += value(&adm.row).signed(adm.sc_contribution);
    }
    Ok(PointResult::compare(format!("k=({}) A={f:?}", fmt_row(k)), lhs, rhs))
}

pub fn operator_alt_point(k: &[Entry], f: &RandomFunction) -> Result<PointResult> {
    let eval = |l: &[Entry]| Ok(f.eval(l));
    let lhs = operator_apply(k, &eval)?;
    let rhs = operator_apply_alt(k, &eval)?;
    Ok(PointResult::compare(format!("k=({}) A={f:?}", fmt_row(k)), lhs, rhs))
}

macro_rules! single_point_check {
    ($(#[$m:meta])* $name:ident, $id:literal, $point:ident $(, $i:ident)?) => {
        $(#[$m])*
        pub fn $name(k: &[Entry], $($i: usize,)? ev: &Evaluator) -> Result<VerificationReport> {
            let p = $point(k, $($i,)? ev)?;
            Ok(VerificationReport::new($id, ClaimStatus::Proven, p.params.clone(), vec![p]))
        }
    };
}

single_point_check!(
    /// The cyclic identity at one row.
    check_cyclic, "cyclic", cyclic_point
);
single_point_check!(
    /// The one-step split identity at one row and index.
    check_neighbor_split, "neighbor-split", neighbor_split_point, i
);
single_point_check!(
    /// The two-step split identity at one row and index.
    check_two_step_split, "two-step-split", two_step_split_point, i
);

/// Shift antisymmetry at one row and index, plus its two split specializations.
pub fn check_shift_antisymmetry(k: &[Entry], i: usize, ev: &Evaluator) -> Result<VerificationReport> {
    let mut points = vec![shift_antisymmetry_point(k, i, ev)?];
    points.extend(shift_antisymmetry_specializations(k, i, ev)?);
    Ok(VerificationReport::new(
        "shift-antisymmetry",
        ClaimStatus::Proven,
        format!("k=({}) i={i}", fmt_row(k)),
        points,
    ))
}

/// The verifiable claims, by stable identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Theorem1,
    Lemma1,
    Lemma1Reduced,
    OperatorAlt,
    Reduction,
    Cyclic,
    NeighborSplit,
    TwoStepSplit,
    ShiftAntisymmetry,
    CombRec,
    HoleOneDescI1,
    AsmChain,
    VsasmReverse,
    VsasmDup,
    PrefixConcat,
    PrefixConcatSigned,
    WSymmetry,
    OneDesc,
    RevDup,
    HoleOneDesc,
    RatioK4,
    RatioK5,
    RatioK6,
    RatioRaw,
}

impl IdentityId {
    pub const ALL: [IdentityId; 24] = [
        IdentityId::Theorem1,
        IdentityId::Lemma1,
        IdentityId::Lemma1Reduced,
        IdentityId::OperatorAlt,
        IdentityId::Reduction,
        IdentityId::Cyclic,
        IdentityId::NeighborSplit,
        IdentityId::TwoStepSplit,
        IdentityId::ShiftAntisymmetry,
        IdentityId::CombRec,
        IdentityId::HoleOneDescI1,
        IdentityId::AsmChain,
        IdentityId::VsasmReverse,
        IdentityId::VsasmDup,
        IdentityId::PrefixConcat,
        IdentityId::PrefixConcatSigned,
        IdentityId::WSymmetry,
        IdentityId::OneDesc,
        IdentityId::RevDup,
        IdentityId::HoleOneDesc,
        IdentityId::RatioK4,
        IdentityId::RatioK5,
        IdentityId::RatioK6,
        IdentityId::RatioRaw,
    ];

    pub fn name(self) -> &'static str {
        use IdentityId::*;
        match self {
            Theorem1 => "theorem1",
            Lemma1 => "lemma1",
            Lemma1Reduced => "lemma1-reduced",
            OperatorAlt => "operator-alt",
            Reduction => "reduction",
            Cyclic => "cyclic",
            NeighborSplit => "neighbor-split",
            TwoStepSplit => "two-step-split",
            ShiftAntisymmetry => "shift-antisymmetry",
            CombRec => "comb-rec",
            HoleOneDescI1 => "hole-one-desc-i1",
            AsmChain => "asm-chain",
            VsasmReverse => "vsasm-reverse",
            VsasmDup => "vsasm-dup",
            PrefixConcat => "prefix-concat",
            PrefixConcatSigned => "prefix-concat-signed",
            WSymmetry => "w-symmetry",
            OneDesc => "one-desc",
            RevDup => "rev-dup",
            HoleOneDesc => "hole-one-desc",
            RatioK4 => "ratio-k4",
            RatioK5 => "ratio-k5",
            RatioK6 => "ratio-k6",
            RatioRaw => "ratio-raw",
        }
    }

    pub fn status(self) -> ClaimStatus {
        use IdentityId::*;
        match self {
            Theorem1 | Lemma1 | Lemma1Reduced | OperatorAlt | Reduction | Cyclic | NeighborSplit | TwoStepSplit
            | ShiftAntisymmetry | CombRec | HoleOneDescI1 | AsmChain => ClaimStatus::Proven,
            RatioRaw => ClaimStatus::Informational,
            _ => ClaimStatus::Conjecture,
        }
    }

    /// Checks driven by a grid of rows rather than a parameter `n`.
    pub fn is_grid(self) -> bool {
        use IdentityId::*;
        matches!(
            self,
            Theorem1
                | Lemma1
                | Lemma1Reduced
                | OperatorAlt
                | Reduction
                | Cyclic
                | NeighborSplit
                | TwoStepSplit
                | ShiftAntisymmetry
        )
    }

    /// Smallest parameter value for parametric families.
    pub fn min_n(self) -> usize {
        use IdentityId::*;
        match self {
            OneDesc | HoleOneDesc | HoleOneDescI1 => 2,
            RatioK4 => 4,
            RatioK5 => 5,
            RatioK6 => 6,
            _ => 1,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown identity {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Rows of one length drawn from a window, exhaustively or by seeded sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub window: Window,
    pub sampling: Sampling,
}

impl Grid {
    pub fn describe(&self) -> String {
        match self.sampling {
            Sampling::Exhaustive => format!("n={} window {} exhaustive", self.n, self.window),
            Sampling::Sampled { samples, seed } => {
                format!("n={} window {} samples={samples} seed={seed}", self.n, self.window)
            }
        }
    }
}

/// What to verify and over which parameters.
#[derive(Clone, Debug)]
pub struct ConjectureSpec {
    pub id: IdentityId,
    /// Row grid for grid checks.
    pub grid: Option<Grid>,
    /// Inclusive parameter range for parametric families. With no upper bound the
    /// family grows until `time_budget` is spent or `max_auto_n` is reached.
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub method: Method,
    /// Random functions per row for `lemma1` and `operator-alt`.
    pub functions_per_row: usize,
    /// `k` for `ratio-raw`.
    pub ratio_k: Option<usize>,
    pub time_budget: Duration,
    pub max_auto_n: usize,
    pub limits: EnumerationLimits,
}

impl ConjectureSpec {
    pub fn new(id: IdentityId) -> Self {
        ConjectureSpec {
            id,
            grid: None,
            n_min: None,
            n_max: None,
            method: Method::Operator,
            functions_per_row: 10,
            ratio_k: None,
            time_budget: Duration::from_secs(60),
            max_auto_n: 12,
            limits: EnumerationLimits::default(),
        }
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_n_range(mut self, lo: usize, hi: usize) -> Self {
        self.n_min = Some(lo);
        self.n_max = Some(hi);
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Work item for grid checks: a row, optionally an index or a random function.
enum GridItem {
    Row(Vec<Entry>),
    Indexed(Vec<Entry>, usize),
    WithFunction(Vec<Entry>, RandomFunction),
}

fn grid_items(spec: &ConjectureSpec, grid: &Grid) -> Result<Vec<GridItem>> {
    let id = spec.id;
    let min_n = match id {
        IdentityId::OperatorAlt => 3,
        IdentityId::Lemma1
        | IdentityId::Lemma1Reduced
        | IdentityId::NeighborSplit
        | IdentityId::TwoStepSplit
        | IdentityId::ShiftAntisymmetry => 2,
        _ => 1,
    };
    if grid.n < min_n {
        return Err(Error::usage(format!("{id} needs rows of length at least {min_n}")));
    }
    let mut r = None;
    let rows = match grid.sampling {
        Sampling::Exhaustive => exhaustive_rows(grid.n, grid.window),
        Sampling::Sampled { samples, seed } => {
            let g = r.insert(rng(seed));
            (0..samples).map(|_| random_row(g, grid.n, grid.window)).collect()
        }
    };
    let mut fun_rng = rng(match grid.sampling {
        Sampling::Sampled { seed, .. } => seed ^ 0x5EED_F00D,
        Sampling::Exhaustive => 0x5EED_F00D,
    });
    let mut items = Vec::new();
    for k in rows {
        match id {
            IdentityId::NeighborSplit | IdentityId::TwoStepSplit | IdentityId::ShiftAntisymmetry => {
                items.extend((1..grid.n).map(|i| GridItem::Indexed(k.clone(), i)));
            }
            IdentityId::Lemma1 | IdentityId::Lemma1Reduced | IdentityId::OperatorAlt => {
                for _ in 0..spec.functions_per_row {
                    let f = RandomFunction::sample(&mut fun_rng, grid.n - 1);
                    items.push(GridItem::WithFunction(k.clone(), f));
                }
            }
            _ => items.push(GridItem::Row(k)),
        }
    }
    Ok(items)
}

fn run_grid(spec: &ConjectureSpec, grid: &Grid, cache: &EvalCache) -> Result<Vec<PointResult>> {
    let items = grid_items(spec, grid)?;
    let ev = Evaluator::new(spec.method, cache);
    let results: Vec<Vec<PointResult>> = items
        .par_iter()
        .map(|item| -> Result<Vec<PointResult>> {
            Ok(match (spec.id, item) {
                (IdentityId::Theorem1, GridItem::Row(k)) => vec![method_agreement_point(k, cache)?],
                (IdentityId::Cyclic, GridItem::Row(k)) => vec![cyclic_point(k, &ev)?],
                (IdentityId::Reduction, GridItem::Row(k)) => {
                    verify_reduction(&Row::new(k.clone())?, spec.limits)?.points
                }
                (IdentityId::NeighborSplit, GridItem::Indexed(k, i)) => vec![neighbor_split_point(k, *i, &ev)?],
                (IdentityId::TwoStepSplit, GridItem::Indexed(k, i)) => vec![two_step_split_point(k, *i, &ev)?],
                (IdentityId::ShiftAntisymmetry, GridItem::Indexed(k, i)) => {
                    let mut v = vec![shift_antisymmetry_point(k, *i, &ev)?];
                    v.extend(shift_antisymmetry_specializations(k, *i, &ev)?);
                    v
                }
                (IdentityId::Lemma1, GridItem::WithFunction(k, f)) => vec![lemma1_point(k, f, false)?],
                (IdentityId::Lemma1Reduced, GridItem::WithFunction(k, f)) => vec![lemma1_point(k, f, true)?],
                (IdentityId::OperatorAlt, GridItem::WithFunction(k, f)) => vec![operator_alt_point(k, f)?],
                _ => return Err(Error::Internal(format!("no grid item handler for {}", spec.id))),
            })
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Work item for parametric families.
#[derive(Clone, Debug)]
struct FamilyPoint {
    params: String,
    kind: FamilyKind,
}

#[derive(Clone, Debug)]
enum FamilyKind {
    /// `lhs_sign * alpha(lhs) = rhs_sign * alpha(rhs)`.
    AlphaEq {
        lhs: Vec<Entry>,
        lhs_sign: usize,
        rhs: Vec<Entry>,
        rhs_sign: usize,
    },
    /// `alpha(row) = -sum_j (j - i) A_{n,j}`.
    HoleOneDesc { row: Vec<Entry>, n: usize, i: usize },
    /// `alpha(row) = p(n)/q(n) * A_{n-1}`.
    Ratio {
        row: Vec<Entry>,
        n: usize,
        p: Vec<i64>,
        q: Vec<i64>,
    },
    /// Raw `alpha(row) / A_{n-1}`.
    RawRatio { row: Vec<Entry>, n: usize },
    /// `A_n` by the chosen method against a plain Monotone-Triangle count.
    AsmByEnumeration { n: usize },
    /// `sum_i A_{n,i} = A_n`.
    RefinedSum { n: usize },
    /// `alpha(n; 2, ..., 2n)` against a plain Monotone-Triangle count.
    VsasmByEnumeration { n: usize },
}

fn ones_to(n: usize) -> Vec<Entry> {
    range_to(n).collect()
}

/// The row `1, ..., k-3, k-1, k, k-1, k, k+1, ..., n` of the ratio family.
pub fn ratio_row(k: usize, n: usize) -> Vec<Entry> {
    let (k, n) = (k as Entry, n as Entry);
    let mut v: Vec<Entry> = (1..=k - 3).collect();
    v.extend([k - 1, k]);
    v.extend(k - 1..=n);
    v
}

/// `p_k(n)` and `q_k(n)` as coefficient lists, highest degree first.
pub fn ratio_polynomials(k: usize) -> Option<(Vec<i64>, Vec<i64>)> {
    match k {
        4 => Some((vec![1, 4], vec![2])),
        5 => Some((vec![1, 7, 10, -36], vec![8, -12])),
        6 => Some((vec![1, 12, 53, 54, -288], vec![48, -72])),
        _ => None,
    }
}

fn horner(coeffs: &[i64], x: usize) -> SignedCount {
    coeffs.iter().fold(SignedCount::zero(), |acc, &c| {
        acc * SignedCount::from(x) + SignedCount::from(c)
    })
}

fn family_points(id: IdentityId, n: usize, ratio_k: Option<usize>) -> Result<Vec<FamilyPoint>> {
    use IdentityId::*;
    let asm_row = ones_to(n);
    let eq = |params: String, lhs: Vec<Entry>, lhs_sign: usize, rhs: Vec<Entry>, rhs_sign: usize| FamilyPoint {
        params,
        kind: FamilyKind::AlphaEq {
            lhs,
            lhs_sign,
            rhs,
            rhs_sign,
        },
    };
    let ni = n as Entry;
    let mut out = Vec::new();
    match id {
        CombRec => {
            let doubled: Vec<Entry> = (1..=ni).rev().flat_map(|x| [x, x]).collect();
            out.push(eq(format!("n={n}"), asm_row, 0, doubled, 0));
        }
        HoleOneDescI1 => {
            let mut row = vec![2, 1];
            row.extend(2..=ni);
            out.push(FamilyPoint {
                params: format!("n={n} i=1"),
                kind: FamilyKind::HoleOneDesc { row, n, i: 1 },
            });
        }
        HoleOneDesc => {
            for i in 1..n {
                let ie = i as Entry;
                let mut row: Vec<Entry> = (1..ie).collect();
                row.extend([ie + 1, ie]);
                row.extend(ie + 1..=ni);
                out.push(FamilyPoint {
                    params: format!("n={n} i={i}"),
                    kind: FamilyKind::HoleOneDesc { row, n, i },
                });
            }
        }
        AsmChain => {
            out.push(FamilyPoint {
                params: format!("n={n} A_n"),
                kind: FamilyKind::AsmByEnumeration { n },
            });
            if n >= 2 {
                out.push(FamilyPoint {
                    params: format!("n={n} refined"),
                    kind: FamilyKind::RefinedSum { n },
                });
            }
            out.push(FamilyPoint {
                params: format!("n={n} vsasm"),
                kind: FamilyKind::VsasmByEnumeration { n },
            });
        }
        VsasmReverse => {
            let rev: Vec<Entry> = (1..=2 * ni + 1).rev().collect();
            let evens: Vec<Entry> = (1..=ni).map(|x| 2 * x).collect();
            out.push(eq(format!("n={n}"), rev, 0, evens, n));
        }
        VsasmDup => {
            let evens: Vec<Entry> = (1..=ni).map(|x| 2 * x).collect();
            let dup: Vec<Entry> = (1..=ni).rev().flat_map(|x| [2 * x, 2 * x]).collect();
            out.push(eq(format!("n={n}"), evens, 0, dup, 0));
        }
        PrefixConcat => {
            for i in 0..=n {
                let mut row: Vec<Entry> = (1..=i as Entry).collect();
                row.extend(1..=ni);
                out.push(eq(format!("n={n} i={i}"), asm_row.clone(), 0, row, 0));
            }
        }
        PrefixConcatSigned => {
            let mut row: Vec<Entry> = (1..=ni + 1).collect();
            row.extend(1..=ni);
            out.push(eq(format!("n={n}"), asm_row, 0, row, n));
        }
        WSymmetry => {
            let top = 3 * n + 2;
            let w_row = |i: usize| {
                let mut k = vec![i as Entry];
                k.extend(2..=ni + 1);
                k.extend(1..=ni);
                k
            };
            for i in 1..=top {
                let j = 3 * n + 3 - i;
                if i <= j {
                    out.push(eq(format!("n={n} i={i} vs {j}"), w_row(i), 0, w_row(j), 0));
                }
            }
        }
        OneDesc => {
            for i in 1..n {
                let ie = i as Entry;
                let mut row: Vec<Entry> = (1..=ie + 1).collect();
                row.extend(ie..=ni);
                out.push(eq(format!("n={n} i={i}"), asm_row.clone(), 0, row, 0));
            }
        }
        RevDup => {
            for k in 1..=n {
                for i in 1..=n - k + 1 {
                    let (ie, ke) = (i as Entry, k as Entry);
                    let mut row: Vec<Entry> = (1..ie).collect();
                    row.extend((ie..ie + ke).rev().flat_map(|x| [x, x]));
                    row.extend(ie + ke..=ni);
                    out.push(eq(format!("n={n} k={k} i={i}"), asm_row.clone(), 0, row, 0));
                }
            }
        }
        RatioK4 | RatioK5 | RatioK6 => {
            let k = match id {
                RatioK4 => 4,
                RatioK5 => 5,
                _ => 6,
            };
            let (p, q) = ratio_polynomials(k).expect("explicit formula");
            out.push(FamilyPoint {
                params: format!("k={k} n={n}"),
                kind: FamilyKind::Ratio {
                    row: ratio_row(k, n),
                    n,
                    p,
                    q,
                },
            });
        }
        RatioRaw => {
            let k = ratio_k.ok_or_else(|| Error::usage("ratio-raw needs k"))?;
            if k < 4 || n < k {
                return Err(Error::usage(format!("ratio-raw needs n >= k >= 4, got k={k}, n={n}")));
            }
            out.push(FamilyPoint {
                params: format!("k={k} n={n}"),
                kind: FamilyKind::RawRatio {
                    row: ratio_row(k, n),
                    n,
                },
            });
        }
        _ => return Err(Error::Internal(format!("{id} is not a parametric family"))),
    }
    Ok(out)
}

fn eval_family_point(pt: &FamilyPoint, ev: &Evaluator) -> Result<PointResult> {
    let p = pt.params.clone();
    Ok(match &pt.kind {
        FamilyKind::AlphaEq {
            lhs,
            lhs_sign,
            rhs,
            rhs_sign,
        } => PointResult::compare(p, ev.alpha(lhs)?.signed(*lhs_sign), ev.alpha(rhs)?.signed(*rhs_sign)),
        FamilyKind::HoleOneDesc { row, n, i } => {
            let mut rhs = SignedCount::zero();
            for j in 1..=*n {
                rhs -= SignedCount::from(j as i64 - *i as i64) * refined_asm(*n, j, ev)?;
            }
            PointResult::compare(p, ev.alpha(row)?, rhs)
        }
        FamilyKind::Ratio { row, n, p: pc, q: qc } => {
            let a_prev = asm_number(n - 1, ev)?;
            let rhs = RationalCount::new(horner(pc, *n) * a_prev, horner(qc, *n));
            let lhs = ev.alpha(row)?;
            let mut point = PointResult::compare(p, &lhs, &rhs);
            point.pass = rhs.is_integer() && rhs.to_integer() == lhs;
            point
        }
        FamilyKind::RawRatio { row, n } => {
            let ratio = RationalCount::new(ev.alpha(row)?, asm_number(n - 1, ev)?);
            let mut point = PointResult::compare(p, &ratio, &ratio);
            point.witness = Some(format!("alpha = {}", ev.alpha(row)?));
            point
        }
        FamilyKind::AsmByEnumeration { n } => {
            let count = alpha(&ones_to(*n), Method::Mt, ev.cache)?;
            PointResult::compare(p, asm_number(*n, ev)?, count)
        }
        FamilyKind::RefinedSum { n } => {
            let mut total = SignedCount::zero();
            for i in 1..=*n {
                total += refined_asm(*n, i, ev)?;
            }
            PointResult::compare(p, total, asm_number(*n, ev)?)
        }
        FamilyKind::VsasmByEnumeration { n } => {
            let evens: Vec<Entry> = range_to(*n).map(|x| 2 * x).collect();
            PointResult::compare(p, vsasm_number(*n, ev)?, alpha(&evens, Method::Mt, ev.cache)?)
        }
    })
}

/// Number of Monotone Triangles with a strictly increasing bottom row, by enumeration.
pub fn mt_count(bottom: &[Entry], limits: EnumerationLimits) -> Result<SignedCount> {
    let mut count = 0u64;
    for t in enumerate_mt(&Row::new(bottom.to_vec())?, limits)? {
        t?;
        count += 1;
    }
    Ok(SignedCount::from(count))
}

/// Raw ratios `alpha(n+1; ratio row) / A_{n-1}` for inspection.
pub fn ratio_sequence(
    k: usize,
    ns: impl IntoIterator<Item = usize>,
    ev: &Evaluator,
) -> Result<Vec<(usize, RationalCount)>> {
    ns.into_iter()
        .map(|n| {
            if k < 4 || n < k {
                return Err(Error::usage(format!("ratio needs n >= k >= 4, got k={k}, n={n}")));
            }
            Ok((
                n,
                RationalCount::new(ev.alpha(&ratio_row(k, n))?, asm_number(n - 1, ev)?),
            ))
        })
        .collect()
}

/// Runs one identity or conjecture over its parameter range and reports every point.
pub fn run_conjecture_suite(spec: &ConjectureSpec, cache: &EvalCache) -> Result<VerificationReport> {
    let start = Instant::now();
    let id = spec.id;
    let mut report = if id.is_grid() {
        let grid = spec.grid.unwrap_or(Grid {
            n: 3,
            window: Window::new(-2, 2).expect("non-empty"),
            sampling: Sampling::Exhaustive,
        });
        let points = run_grid(spec, &grid, cache)?;
        VerificationReport::new(id.name(), id.status(), grid.describe(), points)
    } else {
        let ev = Evaluator::new(spec.method, cache);
        let lo = spec.n_min.unwrap_or(id.min_n()).max(id.min_n());
        let lo = match (id, spec.ratio_k) {
            (IdentityId::RatioRaw, Some(k)) => lo.max(k),
            _ => lo,
        };
        let mut points = Vec::new();
        let mut n = lo;
        let mut stopped_early = None;
        let auto = spec.n_max.is_none();
        if auto {
            cache.set_deadline(Some(start + spec.time_budget));
        }
        loop {
            match spec.n_max {
                Some(hi) if n > hi => break,
                None if n > spec.max_auto_n => break,
                _ => {}
            }
            let evaluated = family_points(id, n, spec.ratio_k).and_then(|pts| {
                pts.par_iter()
                    .map(|pt| eval_family_point(pt, &ev))
                    .collect::<Result<Vec<_>>>()
            });
            match evaluated {
                Ok(v) => points.extend(v),
                Err(Error::Budget(msg)) if auto && n > lo => {
                    stopped_early = Some(format!("stopped before n={n}: {msg}"));
                    break;
                }
                Err(e) => {
                    cache.set_deadline(None);
                    return Err(e);
                }
            }
            n += 1;
        }
        cache.set_deadline(None);
        let grid = format!("n={}..{} method={}", lo, n - 1, spec.method);
        let mut r = VerificationReport::new(id.name(), id.status(), grid, points);
        if let Some(note) = stopped_early {
            r = r.with_note(note);
        }
        if matches!(id, IdentityId::RatioK6) {
            r = r.with_note("p_6 read as n^4 + 12n^3 + 53n^2 + 54n - 288");
        }
        r
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(cache: &EvalCache) -> Evaluator<'_> {
        Evaluator::new(Method::Operator, cache)
    }

    #[test]
    fn asm_numbers() {
        let c = EvalCache::new();
        let e = ev(&c);
        let values: Vec<_> = (1..=5).map(|n| asm_number(n, &e).unwrap()).collect();
        assert_eq!(values, [1, 2, 7, 42, 429].map(SignedCount::from));
        let refined: Vec<_> = (1..=3).map(|i| refined_asm(3, i, &e).unwrap()).collect();
        assert_eq!(refined, [2, 3, 2].map(SignedCount::from));
        let refined: Vec<_> = (1..=2).map(|i| refined_asm(2, i, &e).unwrap()).collect();
        assert_eq!(refined, [1, 1].map(SignedCount::from));
        let vs: Vec<_> = (1..=3).map(|n| vsasm_number(n, &e).unwrap()).collect();
        assert_eq!(vs, [1, 3, 26].map(SignedCount::from));
        assert!(refined_asm(3, 4, &e).is_err());
        assert!(asm_number(0, &e).is_err());
    }

    #[test]
    fn single_point_checks() {
        let c = EvalCache::new();
        let e = ev(&c);
        let r = check_cyclic(&[0, 0], &e).unwrap();
        assert!(r.passed());
        assert_eq!((r.points[0].lhs.as_str(), r.points[0].rhs.as_str()), ("1", "1"));
        assert!(check_cyclic(&[1, 2, 3], &e).unwrap().passed());

        let r = check_neighbor_split(&[0, 5], 1, &e).unwrap();
        assert_eq!((r.points[0].lhs.as_str(), r.points[0].rhs.as_str()), ("2", "2"));
        assert!(check_neighbor_split(&[4, 2, 1, 2], 3, &e).unwrap().passed());
        assert!(check_two_step_split(&[0, 0], 1, &e).unwrap().passed());
        assert!(check_two_step_split(&[3, -1, 2, 0], 2, &e).unwrap().passed());
        assert!(check_shift_antisymmetry(&[1, 2, 3], 1, &e).unwrap().passed());
        assert!(check_neighbor_split(&[1, 2], 2, &e).is_err());
    }

    #[test]
    fn shift_operator_two_arguments() {
        // alpha(2; a, b) = b - a + 1, so f(a, b) = b - a + 1.
        let c = EvalCache::new();
        let e = ev(&c);
        for a in -3..=3 {
            for b in -3..=3 {
                assert_eq!(shift_operator(&[a, b], 1, &e).unwrap(), SignedCount::from(b - a + 1));
                assert_eq!(
                    shift_operator(&[b + 1, a - 1], 1, &e).unwrap(),
                    SignedCount::from(a - b - 1)
                );
            }
        }
    }

    #[test]
    fn w_refinement_small() {
        let c = EvalCache::new();
        let e = ev(&c);
        let w: Vec<_> = (1..=5).map(|i| w_refinement(1, i, &e).unwrap()).collect();
        assert_eq!(w[0], w[4]);
        assert_eq!(w[1], w[3]);
        assert!(w_refinement(1, 6, &e).is_err());
    }

    #[test]
    fn family_rows() {
        assert_eq!(ratio_row(4, 6), vec![1, 3, 4, 3, 4, 5, 6]);
        assert_eq!(ratio_row(5, 6), vec![1, 2, 4, 5, 4, 5, 6]);
        assert_eq!(ratio_row(6, 6), vec![1, 2, 3, 5, 6, 5, 6]);
        let pts = family_points(IdentityId::RevDup, 3, None).unwrap();
        assert_eq!(pts.len(), 6);
        match &pts.last().unwrap().kind {
            FamilyKind::AlphaEq { rhs, .. } => assert_eq!(rhs, &vec![3, 3, 2, 2, 1, 1]),
            other => panic!("{other:?}"),
        }
        match &family_points(IdentityId::OneDesc, 3, None).unwrap()[1].kind {
            FamilyKind::AlphaEq { rhs, .. } => assert_eq!(rhs, &vec![1, 2, 3, 2, 3]),
            other => panic!("{other:?}"),
        }
        match &family_points(IdentityId::HoleOneDesc, 3, None).unwrap()[1].kind {
            FamilyKind::HoleOneDesc { row, .. } => assert_eq!(row, &vec![1, 3, 2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn suite_runs_small_families() {
        let c = EvalCache::new();
        for id in [
            IdentityId::CombRec,
            IdentityId::HoleOneDescI1,
            IdentityId::RevDup,
            IdentityId::VsasmReverse,
        ] {
            let spec = ConjectureSpec::new(id).with_n_range(id.min_n(), 3);
            let r = run_conjecture_suite(&spec, &c).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let spec = ConjectureSpec::new(IdentityId::Cyclic).with_grid(Grid {
            n: 3,
            window: Window::new(-4, 4).unwrap(),
            sampling: Sampling::Sampled { samples: 20, seed: 7 },
        });
        assert!(run_conjecture_suite(&spec, &c).unwrap().passed());
    }

    #[test]
    fn ratio_raw_is_informational() {
        let c = EvalCache::new();
        let mut spec = ConjectureSpec::new(IdentityId::RatioRaw).with_n_range(4, 5);
        spec.ratio_k = Some(4);
        let r = run_conjecture_suite(&spec, &c).unwrap();
        assert_eq!(r.status, ClaimStatus::Informational);
        assert_eq!(r.points.len(), 2);
        // k = 4 ratio is (n + 4) / 2.
        assert_eq!(r.points[0].lhs, "4");
        assert_eq!(r.points[1].lhs, "9/2");
        let seq = ratio_sequence(4, [4, 5], &ev(&c)).unwrap();
        assert_eq!(seq[1].1, RationalCount::new(9.into(), 2.into()));
        let mut missing = ConjectureSpec::new(IdentityId::RatioRaw).with_n_range(4, 4);
        missing.ratio_k = None;
        assert!(run_conjecture_suite(&missing, &c).is_err());
    }

    #[test]
    fn identity_ids_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!("nope".parse::<IdentityId>().is_err());
    }
}
