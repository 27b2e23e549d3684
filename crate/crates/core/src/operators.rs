//! The operator algebra acting on phenomena.
//!
//! * complement `K`: swap success and failure,
//! * `R` and `S`: condition on one more success or failure,
//! * `R^r S^s`: condition on `r` successes and `s` failures in any order,
//! * the bracket `[h over n]`: extract `ω_h^(n)`.
//!
//! Operators act on the stored representation and preserve its kind. On a
//! truncated sequence, conditioning shifts the sequence and so consumes one
//! order of depth per observed trial.

use std::fmt;

use crate::error::{Error, Result};
use crate::moments::{forward_difference, MomentSequence};
use crate::occupancy::occupancy_probability;
use crate::phenomenon::Phenomenon;
use crate::scalar::{binomial, Scalar};

/// Observed successes `r` and failures `s`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EvidenceCount {
    pub r: usize,
    pub s: usize,
}

impl EvidenceCount {
    pub fn new(r: usize, s: usize) -> Self {
        EvidenceCount { r, s }
    }

    pub fn total(&self) -> usize {
        self.r + self.s
    }

    pub fn record(&mut self, success: bool) {
        if success {
            self.r += 1;
        } else {
            self.s += 1;
        }
    }

    /// Counts a draw string such as `"WWBWBB"` (`W` success, `B` failure).
    pub fn from_draws(draws: &str) -> Result<Self> {
        parse_draws(draws).map(|d| {
            let mut ev = EvidenceCount::default();
            d.into_iter().for_each(|x| ev.record(x));
            ev
        })
    }
}

impl fmt::Display for EvidenceCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, s={})", self.r, self.s)
    }
}

/// Parses `W`/`B` draw strings into successes (`true`) and failures.
pub fn parse_draws(draws: &str) -> Result<Vec<bool>> {
    draws
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'W' | 'w' => Ok(true),
            'B' | 'b' => Ok(false),
            other => Err(Error::Parse(format!(
                "draw {other:?} is neither W nor B"
            ))),
        })
        .collect()
}

/// `K`: the phenomenon of the complementary event. Atoms reflect
/// `p → 1 − p`; on a sequence the new all-success values are the old
/// all-failure probabilities `ω_0^(h) = Δ^h ω` at index 0.
pub fn complement<S: Scalar>(ph: &Phenomenon<S>) -> Phenomenon<S> {
    match ph {
        Phenomenon::Atomic(a) => Phenomenon::Atomic(a.reflected()),
        Phenomenon::Moments(m) => {
            let mut values = Vec::with_capacity(m.depth() + 1);
            let mut row = m.values().to_vec();
            while let Some(first) = row.first() {
                values.push(first.clone());
                row = forward_difference(&row);
            }
            Phenomenon::Moments(MomentSequence::from_trusted(values))
        }
    }
}

/// `R`: condition on a success.
pub fn condition_success<S: Scalar>(ph: &Phenomenon<S>) -> Result<Phenomenon<S>> {
    condition_evidence(ph, EvidenceCount::new(1, 0))
}

/// `S`: condition on a failure.
pub fn condition_failure<S: Scalar>(ph: &Phenomenon<S>) -> Result<Phenomenon<S>> {
    condition_evidence(ph, EvidenceCount::new(0, 1))
}

/// `R^r S^s`. On a sequence, `values'[h] = Δ^s ω_{r+h} / Δ^s ω_r` and the
/// depth drops by `r + s`; atom weights become `∝ λ_i p_i^r (1 − p_i)^s`.
pub fn condition_evidence<S: Scalar>(ph: &Phenomenon<S>, ev: EvidenceCount) -> Result<Phenomenon<S>> {
    let EvidenceCount { r, s } = ev;
    match ph {
        Phenomenon::Atomic(a) => a
            .reweighted(|p| p.powu(r) * (S::one() - p.clone()).powu(s))
            .map(Phenomenon::Atomic),
        Phenomenon::Moments(m) => {
            m.require(r + s)?;
            let mut row = m.values().to_vec();
            for _ in 0..s {
                row = forward_difference(&row);
            }
            let shifted = &row[r..];
            let norm = shifted[0].clone();
            if !(norm > S::zero()) {
                return Err(Error::ImpossibleEvidence);
            }
            let values = shifted
                .iter()
                .map(|v| clamp_unit(v.clone() / norm.clone()))
                .collect();
            Ok(Phenomenon::Moments(MomentSequence::from_trusted(values)))
        }
    }
}

fn clamp_unit<S: Scalar>(v: S) -> S {
    if v < S::zero() {
        S::zero()
    } else if v > S::one() {
        S::one()
    } else {
        v
    }
}

/// `[h over n]ψ = ω_h^(n)`.
pub fn bracket<S: Scalar>(ph: &Phenomenon<S>, h: usize, n: usize) -> Result<S> {
    occupancy_probability(ph, n, h)
}

/// Probability of `h` successes in `n` further trials after evidence `ev`:
/// `C(h+r, r) C(n−h+s, s) / C(n+r+s, n) · [h+r over n+r+s]ψ / [r over r+s]ψ`.
pub fn conditional_occupancy<S: Scalar>(
    ph: &Phenomenon<S>,
    ev: EvidenceCount,
    n: usize,
    h: usize,
) -> Result<S> {
    let EvidenceCount { r, s } = ev;
    if h > n {
        return Err(Error::IndexOutOfRange { index: h, max: n });
    }
    ph.require_depth(n + r + s)?;
    // Both brackets carry their binomial factors in with the counting factors.
    let evidence = ph.scaled_sequence_probability(r, s, &(binomial(n + r + s, n) * binomial(r + s, r)))?;
    if !(evidence > S::zero()) {
        return Err(Error::ImpossibleEvidence);
    }
    let ways = binomial(h + r, r) * binomial(n - h + s, s) * binomial(n + r + s, h + r);
    let joint = ph.scaled_sequence_probability(h + r, n - h + s, &ways)?;
    Ok(joint / evidence)
}

/// Probability that trial `r + s + 1` succeeds given the evidence.
pub fn predictive_probability<S: Scalar>(ph: &Phenomenon<S>, ev: EvidenceCount) -> Result<S> {
    conditional_occupancy(ph, ev, 1, 1)
}
