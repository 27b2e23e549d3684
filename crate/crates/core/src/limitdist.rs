//! Limiting distribution `Φ` of the success frequency.
//!
//! For an atomic mixture `Φ` is a step function with a jump of `λ_i` at each
//! atom `p_i`; following the half-mass convention `Φ(p_i)` sits in the middle
//! of its jump. For a general phenomenon `Φ` is approached by the finite-`n`
//! distribution of `h/n`, `Φ(ξ) = lim Φ_n(nξ)`, with the same midpoint rule at
//! lattice points so that the uniform phenomenon gives `(h + 1/2)/(n + 1)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::mixtures::AtomicMixture;
use crate::occupancy::occupancy_row;
use crate::operators::{condition_evidence, EvidenceCount};
use crate::phenomenon::Phenomenon;
use crate::scalar::Scalar;

/// Default number of points in an exported `(ξ, Φ)` grid.
pub const DEFAULT_GRID_POINTS: usize = 1001;

/// A limiting frequency distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitCdf<S> {
    /// Exact step function of a finite mixture.
    Atomic(AtomicMixture<S>),
    /// `Φ(ξ) = ξ` on `[0, 1]`.
    Uniform,
    /// `(ξ, Φ_n(nξ))` pairs from the finite-`n` approximation, sorted by `ξ`.
    Sampled { n: usize, grid: Vec<(S, S)> },
}

impl<S: Scalar> LimitCdf<S> {
    /// Exact limit of an atomic phenomenon.
    pub fn exact(ph: &Phenomenon<S>) -> Result<Self> {
        ph.as_atomic().cloned().map(LimitCdf::Atomic)
    }

    /// Finite-`n` approximation on `points` evenly spaced `ξ` in `[0, 1]`.
    pub fn sampled(ph: &Phenomenon<S>, n: usize, points: usize) -> Result<Self> {
        if n == 0 || points < 2 {
            return Err(Error::InvalidArgument(
                "sampled CDF needs n >= 1 and at least two grid points".into(),
            ));
        }
        let row = occupancy_row(ph, n)?;
        let grid = unit_grid::<S>(points)
            .into_iter()
            .map(|xi| {
                let phi = cdf_from_row(row.probs(), &xi);
                (xi, phi)
            })
            .collect();
        Ok(LimitCdf::Sampled { n, grid })
    }

    /// `Φ(ξ)`. Sampled grids interpolate linearly between points.
    pub fn eval(&self, xi: &S) -> S {
        match self {
            LimitCdf::Atomic(a) => atomic_cdf(a, xi),
            LimitCdf::Uniform => clamp_unit(xi.clone()),
            LimitCdf::Sampled { grid, .. } => {
                if *xi < S::zero() {
                    return S::zero();
                }
                if *xi > S::one() {
                    return S::one();
                }
                let upper = grid.partition_point(|(x, _)| x < xi);
                if upper == 0 {
                    return grid[0].1.clone();
                }
                if upper == grid.len() {
                    return grid[grid.len() - 1].1.clone();
                }
                let (x0, y0) = &grid[upper - 1];
                let (x1, y1) = &grid[upper];
                if x1 == xi {
                    return y1.clone();
                }
                let t = (xi.clone() - x0.clone()) / (x1.clone() - x0.clone());
                y0.clone() + t * (y1.clone() - y0.clone())
            }
        }
    }

    /// `(ξ, Φ(ξ))` on `points` evenly spaced `ξ` (the stored grid when sampled).
    pub fn grid(&self, points: usize) -> Vec<(S, S)> {
        match self {
            LimitCdf::Sampled { grid, .. } => grid.clone(),
            _ => unit_grid::<S>(points.max(2))
                .into_iter()
                .map(|xi| {
                    let phi = self.eval(&xi);
                    (xi, phi)
                })
                .collect(),
        }
    }

    /// CSV with header `xi,phi`.
    pub fn to_csv(&self, points: usize) -> String {
        let mut out = String::from("xi,phi\n");
        for (xi, phi) in self.grid(points) {
            out.push_str(&format!("{},{}\n", xi.render(), phi.render()));
        }
        out
    }
}

fn unit_grid<S: Scalar>(points: usize) -> Vec<S> {
    let last = points - 1;
    (0..points)
        .map(|k| S::from_usize(k) / S::from_usize(last))
        .collect()
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

fn atomic_cdf<S: Scalar>(a: &AtomicMixture<S>, xi: &S) -> S {
    a.atoms().iter().fold(S::zero(), |acc, atom| {
        match atom.p.partial_cmp(xi) {
            Some(Ordering::Less) => acc + atom.weight.clone(),
            Some(Ordering::Equal) => acc + atom.weight.clone() * S::half(),
            _ => acc,
        }
    })
}

/// `Σ_{h < nξ} ω_h + ½ Σ_{h = nξ} ω_h` for a row at `n = row.len() − 1`.
fn cdf_from_row<S: Scalar>(row: &[S], xi: &S) -> S {
    let n = S::from_usize(row.len() - 1);
    let threshold = n * xi.clone();
    row.iter().enumerate().fold(S::zero(), |acc, (h, w)| {
        match S::from_usize(h).partial_cmp(&threshold) {
            Some(Ordering::Less) => acc + w.clone(),
            Some(Ordering::Equal) => acc + w.clone() * S::half(),
            _ => acc,
        }
    })
}

/// `Φ(ξ) = Σ_{p_i < ξ} λ_i + ½ Σ_{p_i = ξ} λ_i`.
pub fn limiting_cdf_exact<S: Scalar>(ph: &Phenomenon<S>, xi: &S) -> Result<S> {
    Ok(atomic_cdf(ph.as_atomic()?, xi))
}

/// `Φ_n(nξ)`: CDF of the number of successes in `n` trials at `nξ`, with the
/// midpoint rule at `h = nξ`.
pub fn cdf_finite_n<S: Scalar>(ph: &Phenomenon<S>, xi: &S, n: usize) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidArgument("frequency needs n >= 1".into()));
    }
    let row = occupancy_row(ph, n)?;
    Ok(cdf_from_row(row.probs(), xi))
}

/// Probability that the frequency lies between `ξ1` and `ξ2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalProbability<S> {
    /// `Φ_n(nξ2) − Φ_n(nξ1)`.
    pub finite: S,
    /// `Φ(ξ2) − Φ(ξ1)`; present only when the limit is known exactly.
    pub limit: Option<S>,
}

/// Finite-`n` probability that `h/n` falls between `ξ1` and `ξ2`, next to its
/// limit `Φ(ξ2) − Φ(ξ1)` when the phenomenon is atomic.
pub fn theorem1_interval<S: Scalar>(
    ph: &Phenomenon<S>,
    xi1: &S,
    xi2: &S,
    n: usize,
) -> Result<IntervalProbability<S>> {
    if !(xi1 < xi2) {
        return Err(Error::InvalidArgument(format!(
            "interval ({}, {}) is empty",
            xi1.render(),
            xi2.render()
        )));
    }
    let finite = cdf_finite_n(ph, xi2, n)? - cdf_finite_n(ph, xi1, n)?;
    let limit = match ph {
        Phenomenon::Atomic(a) => Some(atomic_cdf(a, xi2) - atomic_cdf(a, xi1)),
        Phenomenon::Moments(_) => None,
    };
    Ok(IntervalProbability { finite, limit })
}

/// `K_Φ Φ(ξ) = 1 − Φ(1 − ξ)`.
pub fn cdf_complement<S: Scalar>(cdf: &LimitCdf<S>) -> LimitCdf<S> {
    match cdf {
        LimitCdf::Atomic(a) => LimitCdf::Atomic(a.reflected()),
        LimitCdf::Uniform => LimitCdf::Uniform,
        LimitCdf::Sampled { n, grid } => LimitCdf::Sampled {
            n: *n,
            grid: grid
                .iter()
                .rev()
                .map(|(xi, phi)| (S::one() - xi.clone(), S::one() - phi.clone()))
                .collect(),
        },
    }
}

/// `R_Φ^r S_Φ^s`: reweights the mixing measure by `ξ^r (1 − ξ)^s`.
pub fn cdf_condition<S: Scalar>(cdf: &LimitCdf<S>, ev: EvidenceCount) -> Result<LimitCdf<S>> {
    match cdf {
        LimitCdf::Atomic(a) => {
            let EvidenceCount { r, s } = ev;
            a.reweighted(|p| p.powu(r) * (S::one() - p.clone()).powu(s))
                .map(LimitCdf::Atomic)
        }
        _ => Err(Error::NotAtomic),
    }
}

/// `m`-th moment of `h/n` at finite `n`, next to its limit `ω_m^(m)`.
pub fn moment_convergence<S: Scalar>(ph: &Phenomenon<S>, m: usize, n: usize) -> Result<(S, S)> {
    if n == 0 {
        return Err(Error::InvalidArgument("frequency needs n >= 1".into()));
    }
    let limit = ph.moment(m)?;
    let row = occupancy_row(ph, n)?;
    let denom = S::from_usize(n).powu(m);
    let finite = row
        .probs()
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (h, w)| acc + S::from_usize(h).powu(m) * w.clone())
        / denom;
    Ok((finite, limit))
}

/// Whether some atom sits at or around the target frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    /// An atom equals `f`: mass flows to it.
    AtomAtF,
    /// Atoms lie on both sides of `f` but none at it.
    Bracketed,
    /// All atoms lie on one side of `f`.
    Violated,
}

/// Result of iterating `R^r S^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Concentration<S> {
    pub phenomenon: Phenomenon<S>,
    /// `f = r / (r + s)`.
    pub frequency: S,
    pub status: HypothesisStatus,
    /// Total weight within `±δ` of `f`.
    pub weight_near: S,
    /// Atom carrying the largest weight after conditioning.
    pub dominant_atom: S,
}

/// Applies `(R^r S^s)^rounds` to an atomic phenomenon. Runs whatever the
/// status says; the status is a diagnostic.
pub fn concentration<S: Scalar>(
    ph: &Phenomenon<S>,
    ev: EvidenceCount,
    rounds: usize,
    delta: &S,
) -> Result<Concentration<S>> {
    let atoms = ph.as_atomic()?;
    if ev.total() == 0 {
        return Err(Error::InvalidArgument(
            "concentration needs at least one observed trial".into(),
        ));
    }
    let frequency = S::from_ratio(ev.r as i64, ev.total() as i64);
    let status = if atoms.atoms().iter().any(|a| a.p == frequency) {
        HypothesisStatus::AtomAtF
    } else if atoms.atoms().iter().any(|a| a.p < frequency)
        && atoms.atoms().iter().any(|a| a.p > frequency)
    {
        HypothesisStatus::Bracketed
    } else {
        HypothesisStatus::Violated
    };
    let repeated = EvidenceCount::new(ev.r * rounds, ev.s * rounds);
    let phenomenon = condition_evidence(ph, repeated)?;
    let result = phenomenon.as_atomic()?;
    let weight_near = result.mass_between(
        &(frequency.clone() - delta.clone()),
        &(frequency.clone() + delta.clone()),
    );
    let dominant_atom = result
        .atoms()
        .iter()
        .max_by(|a, b| a.weight.partial_cmp(&b.weight).unwrap_or(Ordering::Equal))
        .map(|a| a.p.clone())
        .expect("conditioning keeps at least one atom");
    Ok(Concentration {
        phenomenon,
        frequency,
        status,
        weight_near,
        dominant_atom,
    })
}
