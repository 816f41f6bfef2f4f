//! Seeded input generation for the verification grids.
//!
//! All randomness flows from a `u64` seed through ChaCha8, so a given seed
//! produces the same points on every platform and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{Entry, SignedCount};

/// Inclusive integer window `lo..=hi` for row entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Entry,
    pub hi: Entry,
}

impl Window {
    pub fn new(lo: Entry, hi: Entry) -> Result<Self> {
        if lo > hi {
            return Err(Error::usage(format!("empty window {lo}..{hi}")));
        }
        Ok(Window { lo, hi })
    }

    pub fn width(self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    /// Parses `a..b`, inclusive at both ends; negative bounds allowed (`-4..4`).
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::Parse(format!("window {s:?} is not of the form a..b")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<Entry>()
                .map_err(|e| Error::Parse(format!("window bound {x:?}: {e}")))
        };
        Window::new(parse(a)?, parse(b.trim_start_matches('='))?)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every row of length `n` with entries in the window, in lexicographic order.
pub fn exhaustive_rows(n: usize, w: Window) -> Vec<Vec<Entry>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (w.lo..=w.hi).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn random_row(rng: &mut impl Rng, n: usize, w: Window) -> Vec<Entry> {
    (0..n).map(|_| rng.gen_range(w.lo..=w.hi)).collect()
}

/// A deterministic pseudo-random integer-valued function on `Z^m`.
#[derive(Clone, Debug)]
pub enum RandomFunction {
    /// Hash of the argument mixed with a key, mapped into `[-range, range]`.
    Table { key: u64, range: i64 },
    /// `coeff * prod l_j^{exp_j}`.
    Monomial { coeff: i64, exponents: Vec<u32> },
}

impl RandomFunction {
    /// Half hashed tables, half monomials of degree at most 2 per variable.
    pub fn sample(rng: &mut impl Rng, arity: usize) -> Self {
        if rng.gen_bool(0.5) {
            RandomFunction::Table {
                key: rng.gen(),
                range: 50,
            }
        } else {
            RandomFunction::Monomial {
                coeff: rng.gen_range(-5..=5),
                exponents: (0..arity).map(|_| rng.gen_range(0..=2)).collect(),
            }
        }
    }

    pub fn eval(&self, l: &[Entry]) -> SignedCount {
        match self {
            RandomFunction::Table { key, range } => {
                let mut h = *key ^ (l.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                for &x in l {
                    h = splitmix(h ^ x as u64);
                }
                let span = (2 * range + 1) as u64;
                SignedCount::from((h % span) as i64 - range)
            }
            RandomFunction::Monomial { coeff, exponents } => {
                let mut v = SignedCount::from(*coeff);
                for (&x, &e) in l.iter().zip(exponents) {
                    v *= SignedCount::from(x).pow(e);
                }
                v
            }
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
