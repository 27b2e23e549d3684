use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::mixtures::AtomicMixture;
use crate::moments::MomentSequence;
use crate::scalar::Scalar;

/// An exchangeable binary process, held either as a finite mixture of
/// constant-probability phenomena (exact at any depth) or as a truncated
/// all-success sequence with an explicit depth budget.
#[derive(Debug, Clone, PartialEq)]
pub enum Phenomenon<S> {
    Atomic(AtomicMixture<S>),
    Moments(MomentSequence<S>),
}

impl<S: Scalar> Phenomenon<S> {
    /// `None` for atomic mixtures, which have moments of every order.
    pub fn depth(&self) -> Option<usize> {
        match self {
            Phenomenon::Atomic(_) => None,
            Phenomenon::Moments(m) => Some(m.depth()),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Phenomenon::Atomic(_))
    }

    pub fn as_atomic(&self) -> Result<&AtomicMixture<S>> {
        match self {
            Phenomenon::Atomic(a) => Ok(a),
            Phenomenon::Moments(_) => Err(Error::NotAtomic),
        }
    }

    /// Fails with `DepthExceeded` unless moments up to `needed` exist.
    pub fn require_depth(&self, needed: usize) -> Result<()> {
        match self {
            Phenomenon::Atomic(_) => Ok(()),
            Phenomenon::Moments(m) => m.require(needed),
        }
    }

    /// `ω_h^(h)`.
    pub fn moment(&self, h: usize) -> Result<S> {
        match self {
            Phenomenon::Atomic(a) => Ok(a.moment(h)),
            Phenomenon::Moments(m) => m.mixing_moment(h),
        }
    }

    /// Materializes the first `depth + 1` all-success probabilities.
    pub fn moments(&self, depth: usize) -> Result<MomentSequence<S>> {
        match self {
            Phenomenon::Atomic(a) => Ok(a.moment_sequence(depth)),
            Phenomenon::Moments(m) => m.truncate(depth),
        }
    }

    /// Probability of one particular ordered sequence with `r` successes and
    /// `s` failures: `Δ^s ω` at index `r`, or `Σ λ_i p_i^r (1 − p_i)^s`.
    pub fn sequence_probability(&self, r: usize, s: usize) -> Result<S> {
        match self {
            Phenomenon::Atomic(a) => Ok(a.likelihood(r, s)),
            Phenomenon::Moments(m) => m.finite_difference(s, r),
        }
    }

    /// `scale · sequence_probability(r, s)`.
    pub(crate) fn scaled_sequence_probability(&self, r: usize, s: usize, scale: &BigUint) -> Result<S> {
        match self {
            Phenomenon::Atomic(a) => Ok(a.scaled_likelihood(r, s, scale)),
            Phenomenon::Moments(m) => Ok(S::from_biguint(scale) * m.finite_difference(s, r)?),
        }
    }
}

impl<S> From<AtomicMixture<S>> for Phenomenon<S> {
    fn from(a: AtomicMixture<S>) -> Self {
        Phenomenon::Atomic(a)
    }
}

impl<S> From<MomentSequence<S>> for Phenomenon<S> {
    fn from(m: MomentSequence<S>) -> Self {
        Phenomenon::Moments(m)
    }
}
