//! The value ring the summation operators work over.
//!
//! The operators are linear: they only add, negate and clone values. Any
//! abelian group with a zero qualifies. `alpha` itself is evaluated in
//! [`SignedCount`](crate::SignedCount); the ratio checks use
//! [`RationalCount`](crate::RationalCount).

use std::ops::{Add, Neg};

use num_traits::Zero;

pub trait Value: Clone + Zero + Add<Output = Self> + Neg<Output = Self> + Send + Sync {
    /// `(-1)^exponent * self`.
    fn signed(self, exponent: usize) -> Self {
        if exponent.is_multiple_of(2) {
            self
        } else {
            -self
        }
    }
}

impl<T> Value for T where T: Clone + Zero + Add<Output = T> + Neg<Output = T> + Send + Sync {}

/// `(-1)^exponent` as a value of the ring.
pub fn sign<R: Value + num_traits::One>(exponent: usize) -> R {
    R::one().signed(exponent)
}
