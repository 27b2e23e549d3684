//! All-success probability sequences.
//!
//! A random phenomenon is determined by the probabilities `ω_h^(h)` that `h`
//! given trials are all successes. These are the moments of the mixing
//! measure on `[0, 1]`, so a valid sequence must be completely monotone
//! (Hausdorff): every iterated forward difference
//! `Δ^j a_h = Σ_i (-1)^i C(j, i) a_{h+i}` is nonnegative.
//!
//! ```
//! use finetti::{Exact, MomentSequence, Scalar};
//!
//! let uniform: Vec<Exact> = (0..4).map(|h| Exact::from_ratio(1, h + 1)).collect();
//! let seq = MomentSequence::new(uniform).unwrap();
//! assert_eq!(seq.depth(), 3);
//! assert_eq!(seq.finite_difference(2, 1).unwrap(), Exact::from_ratio(1, 12));
//! ```

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Validated prefix `[ω_0^(0), ω_1^(1), …, ω_N^(N)]` of an all-success
/// sequence. `N` is the depth budget: nothing deeper is ever extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<S> {
    values: Vec<S>,
}

impl<S: Scalar> MomentSequence<S> {
    /// Builds a sequence, checking range, normalization, and complete
    /// monotonicity to the full available depth.
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotUnitAtZero);
        }
        for (index, v) in values.iter().enumerate() {
            if !in_unit_interval(v) {
                return Err(Error::NotAProbability { index });
            }
        }
        if !values[0].approx_eq(&S::one()) {
            return Err(Error::NotUnitAtZero);
        }
        // Row j holds Δ^j a_h for h = 0..=N-j.
        let mut row = values.clone();
        for j in 1..values.len() {
            row = forward_difference(&row);
            if let Some(h) = row.iter().position(S::is_clearly_negative) {
                return Err(Error::NotCompletelyMonotone { h, j });
            }
        }
        Ok(MomentSequence { values })
    }

    /// Skips the O(N²) monotonicity check. Callers must pass the result of a
    /// transform that preserves complete monotonicity.
    pub(crate) fn from_trusted(values: Vec<S>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.iter().all(in_unit_interval));
        MomentSequence { values }
    }

    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    /// `ω_m^(m)`: the limiting `m`-th moment of the observed frequency.
    pub fn mixing_moment(&self, m: usize) -> Result<S> {
        self.require(m)?;
        Ok(self.values[m].clone())
    }

    /// `Δ^j a_h = Σ_{i=0}^{j} (-1)^i C(j, i) a_{h+i}`.
    pub fn finite_difference(&self, order: usize, index: usize) -> Result<S> {
        self.require(index + order)?;
        let mut acc = S::zero();
        let mut coeff = BigUint::one();
        for i in 0..=order {
            let term = S::from_biguint(&coeff) * self.values[index + i].clone();
            if i % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
            // C(j, i+1) = C(j, i) (j - i) / (i + 1)
            coeff = coeff * (order - i) / (i + 1);
        }
        Ok(acc)
    }

    /// Keeps the first `depth + 1` values.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        self.require(depth)?;
        Ok(MomentSequence {
            values: self.values[..=depth].to_vec(),
        })
    }

    pub(crate) fn require(&self, needed: usize) -> Result<()> {
        if needed > self.depth() {
            Err(Error::DepthExceeded {
                needed,
                available: self.depth(),
            })
        } else {
            Ok(())
        }
    }
}

/// `Δa_h = a_h − a_{h+1}` over a slice; the result is one shorter.
pub(crate) fn forward_difference<S: Scalar>(row: &[S]) -> Vec<S> {
    row.windows(2)
        .map(|w| w[0].clone() - w[1].clone())
        .collect()
}

pub(crate) fn in_unit_interval<S: Scalar>(v: &S) -> bool {
    // Written so that NaN fails.
    *v >= -S::tolerance() && *v <= S::one() + S::tolerance()
}
