//! Phenomena built from hypotheses.
//!
//! A finite mixture of constant-probability phenomena has characteristic
//! function `Σ λ_i e^{i p_i t}`; every quantity in the crate has a closed form
//! on it. This module builds such mixtures, combines independent phenomena,
//! and answers the hypothesis questions: given evidence, how probable is each
//! cause, and where does that probability go as evidence accumulates.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::operators::{bracket, EvidenceCount};
use crate::phenomenon::Phenomenon;
use crate::scalar::{binomial, Exact, Scalar};

/// One probability atom `p` of a mixture with its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<S> {
    pub p: S,
    pub weight: S,
}

/// Finite mixing measure: atoms sorted by `p`, pairwise distinct, with
/// positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMixture<S> {
    atoms: Vec<Atom<S>>,
}

impl<S: Scalar> AtomicMixture<S> {
    /// Validates and normalizes the atom list. Zero weights are dropped and
    /// repeated atoms merged.
    pub fn new(atoms: impl IntoIterator<Item = (S, S)>) -> Result<Self> {
        let mut list = Vec::new();
        let mut sum = S::zero();
        for (p, weight) in atoms {
            if !(p >= S::zero() && p <= S::one()) {
                return Err(Error::AtomOutOfRange { value: p.render() });
            }
            if !(weight >= S::zero()) {
                return Err(Error::WeightsNotNormalized {
                    sum: weight.render(),
                });
            }
            sum = sum + weight.clone();
            list.push(Atom { p, weight });
        }
        if list.is_empty() || !sum.approx_eq(&S::one()) {
            return Err(Error::WeightsNotNormalized { sum: sum.render() });
        }
        Ok(Self::canonical(list))
    }

    /// The constant phenomenon `p`.
    pub fn point(p: S) -> Result<Self> {
        Self::new([(p, S::one())])
    }

    /// Sorts, merges, and drops zero-weight atoms.
    fn canonical(mut list: Vec<Atom<S>>) -> Self {
        list.retain(|a| !a.weight.is_zero());
        list.sort_by(|a, b| a.p.partial_cmp(&b.p).unwrap_or(Ordering::Equal));
        let mut atoms: Vec<Atom<S>> = Vec::with_capacity(list.len());
        for atom in list {
            match atoms.last_mut() {
                Some(last) if last.p == atom.p => {
                    last.weight = last.weight.clone() + atom.weight;
                }
                _ => atoms.push(atom),
            }
        }
        AtomicMixture { atoms }
    }

    /// Builds from nonnegative masses, rescaling them to sum to one.
    pub(crate) fn from_masses(list: Vec<Atom<S>>) -> Result<Self> {
        let total = list
            .iter()
            .fold(S::zero(), |acc, a| acc + a.weight.clone());
        if total.is_zero() {
            return Err(Error::ImpossibleEvidence);
        }
        let list = list
            .into_iter()
            .map(|a| Atom {
                p: a.p,
                weight: a.weight / total.clone(),
            })
            .collect();
        Ok(Self::canonical(list))
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ λ_i p_i^h`.
    pub fn moment(&self, h: usize) -> S {
        self.atoms.iter().fold(S::zero(), |acc, a| {
            acc + a.weight.clone() * a.p.powu(h)
        })
    }

    pub fn moment_sequence(&self, depth: usize) -> MomentSequence<S> {
        let mut powers: Vec<S> = vec![S::one(); self.atoms.len()];
        let mut values = Vec::with_capacity(depth + 1);
        for _ in 0..=depth {
            let value = self
                .atoms
                .iter()
                .zip(&powers)
                .fold(S::zero(), |acc, (a, pw)| acc + a.weight.clone() * pw.clone());
            values.push(clamp_unit(value));
            for (pw, a) in powers.iter_mut().zip(&self.atoms) {
                *pw = pw.clone() * a.p.clone();
            }
        }
        MomentSequence::from_trusted(values)
    }

    /// `Σ λ_i p_i^r (1 − p_i)^s`: probability of one ordered sequence.
    pub fn likelihood(&self, r: usize, s: usize) -> S {
        self.scaled_likelihood(r, s, &BigUint::one())
    }

    /// `scale · likelihood(r, s)`, with the product formed before reducing.
    pub(crate) fn scaled_likelihood(&self, r: usize, s: usize, scale: &BigUint) -> S {
        let pairs: Vec<(&S, &S)> = self.atoms.iter().map(|a| (&a.p, &a.weight)).collect();
        S::weighted_likelihood(&pairs, r, s, scale)
    }

    /// Multiplies each weight by `factor(p)` and renormalizes.
    pub fn reweighted(&self, factor: impl Fn(&S) -> S) -> Result<Self> {
        let list = self
            .atoms
            .iter()
            .map(|a| Atom {
                p: a.p.clone(),
                weight: a.weight.clone() * factor(&a.p),
            })
            .collect();
        Self::from_masses(list)
    }

    /// Maps each atom `p` to `1 − p`.
    pub fn reflected(&self) -> Self {
        let list = self
            .atoms
            .iter()
            .map(|a| Atom {
                p: S::one() - a.p.clone(),
                weight: a.weight.clone(),
            })
            .collect();
        Self::canonical(list)
    }

    /// Mass within the closed interval `[lo, hi]`.
    pub fn mass_between(&self, lo: &S, hi: &S) -> S {
        self.atoms
            .iter()
            .filter(|a| a.p >= *lo && a.p <= *hi)
            .fold(S::zero(), |acc, a| acc + a.weight.clone())
    }
}

fn clamp_unit<S: Scalar>(v: S) -> S {
    if v > S::one() {
        S::one()
    } else if v < S::zero() {
        S::zero()
    } else {
        v
    }
}

/// Mixture of constant phenomena from `(p, weight)` pairs.
pub fn atomic_mixture<S: Scalar>(atoms: impl IntoIterator<Item = (S, S)>) -> Result<Phenomenon<S>> {
    AtomicMixture::new(atoms).map(Phenomenon::Atomic)
}

/// Independent trials with success probability `p` throughout.
pub fn constant_phenomenon<S: Scalar>(p: S) -> Result<Phenomenon<S>> {
    AtomicMixture::point(p).map(Phenomenon::Atomic)
}

/// Every limiting frequency equally likely: `ω_h^(h) = 1/(h+1)` up to `depth`.
pub fn uniform_phenomenon<S: Scalar>(depth: usize) -> Phenomenon<S> {
    let values = (0..=depth)
        .map(|h| S::one() / S::from_usize(h + 1))
        .collect();
    Phenomenon::Moments(MomentSequence::from_trusted(values))
}

/// The phenomenon "both succeed" for two independent phenomena: all-success
/// probabilities multiply index-wise.
pub fn product_independent<S: Scalar>(first: &Phenomenon<S>, second: &Phenomenon<S>) -> Phenomenon<S> {
    match (first, second) {
        (Phenomenon::Atomic(a), Phenomenon::Atomic(b)) => {
            let list = a
                .atoms()
                .iter()
                .flat_map(|x| {
                    b.atoms().iter().map(move |y| Atom {
                        p: x.p.clone() * y.p.clone(),
                        weight: x.weight.clone() * y.weight.clone(),
                    })
                })
                .collect();
            Phenomenon::Atomic(AtomicMixture::canonical(list))
        }
        _ => {
            let depth = match (first.depth(), second.depth()) {
                (Some(x), Some(y)) => x.min(y),
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => unreachable!("both atomic handled above"),
            };
            let values = (0..=depth)
                .map(|h| {
                    // Depth was checked against both inputs.
                    first.moment(h).expect("depth checked") * second.moment(h).expect("depth checked")
                })
                .collect();
            Phenomenon::Moments(MomentSequence::from_trusted(values))
        }
    }
}

/// A labelled cause with its prior probability and the phenomenon it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis<S> {
    pub label: String,
    pub prior: S,
    pub phenomenon: Phenomenon<S>,
}

/// Mutually exclusive hypotheses with priors summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisModel<S> {
    components: Vec<Hypothesis<S>>,
}

impl<S: Scalar> HypothesisModel<S> {
    pub fn new(components: Vec<Hypothesis<S>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("no hypotheses".into()));
        }
        let mut seen = HashSet::new();
        let mut sum = S::zero();
        for c in &components {
            if !seen.insert(c.label.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate label {:?}", c.label)));
            }
            if !(c.prior > S::zero()) {
                return Err(Error::WeightsNotNormalized {
                    sum: c.prior.render(),
                });
            }
            sum = sum + c.prior.clone();
        }
        if !sum.approx_eq(&S::one()) {
            return Err(Error::WeightsNotNormalized { sum: sum.render() });
        }
        Ok(HypothesisModel { components })
    }

    pub fn components(&self) -> &[Hypothesis<S>] {
        &self.components
    }

    pub fn labels(&self) -> Vec<String> {
        self.components.iter().map(|c| c.label.clone()).collect()
    }

    pub fn priors(&self) -> Vec<(String, S)> {
        self.components
            .iter()
            .map(|c| (c.label.clone(), c.prior.clone()))
            .collect()
    }
}

/// `ψ = Σ λ_i ψ^(i)`. Stays atomic when every component is; otherwise the
/// result carries the smallest component depth.
pub fn mixture_of_hypotheses<S: Scalar>(model: &HypothesisModel<S>) -> Result<Phenomenon<S>> {
    let components = model.components();
    if components.iter().all(|c| c.phenomenon.is_atomic()) {
        let list = components
            .iter()
            .flat_map(|c| {
                let atoms = c.phenomenon.as_atomic().expect("checked atomic").atoms();
                atoms.iter().map(move |a| Atom {
                    p: a.p.clone(),
                    weight: c.prior.clone() * a.weight.clone(),
                })
            })
            .collect();
        return Ok(Phenomenon::Atomic(AtomicMixture::canonical(list)));
    }
    let depth = components
        .iter()
        .filter_map(|c| c.phenomenon.depth())
        .min()
        .expect("at least one truncated component");
    let mut values = Vec::with_capacity(depth + 1);
    for h in 0..=depth {
        let mut acc = S::zero();
        for c in components {
            acc = acc + c.prior.clone() * c.phenomenon.moment(h)?;
        }
        values.push(clamp_unit(acc));
    }
    Ok(Phenomenon::Moments(MomentSequence::from_trusted(values)))
}

/// Posterior probability of each hypothesis after `r` successes and `s`
/// failures: `λ_i [r over r+s]ψ^(i) / [r over r+s]ψ`.
pub fn hypothesis_posterior<S: Scalar>(
    model: &HypothesisModel<S>,
    ev: EvidenceCount,
) -> Result<Vec<(String, S)>> {
    let mixture = mixture_of_hypotheses(model)?;
    posterior_against(model, &mixture, ev)
}

fn posterior_against<S: Scalar>(
    model: &HypothesisModel<S>,
    mixture: &Phenomenon<S>,
    ev: EvidenceCount,
) -> Result<Vec<(String, S)>> {
    let n = ev.total();
    let evidence = bracket(mixture, ev.r, n)?;
    if evidence.is_zero() {
        return Err(Error::ImpossibleEvidence);
    }
    let mut out = Vec::with_capacity(model.components().len());
    for c in model.components() {
        let likelihood = bracket(&c.phenomenon, ev.r, n)?;
        out.push((c.label.clone(), c.prior.clone() * likelihood / evidence.clone()));
    }
    Ok(out)
}

/// Builds the two-hypothesis urn model: an urn of `urn_size` balls filled
/// from `total` balls of which `white` are white, either (a) by drawing
/// `urn_size` of them at random, or (b) preserving the white proportion.
pub fn urn_scenario<S: Scalar>(
    total: usize,
    white: usize,
    urn_size: usize,
    alpha: S,
    beta: S,
) -> Result<HypothesisModel<S>> {
    let geometry = |msg: String| Err(Error::InvalidUrnGeometry(msg));
    if urn_size == 0 {
        return geometry("urn size must be positive".into());
    }
    if !total.is_multiple_of(urn_size) || total / urn_size < 2 {
        return geometry(format!(
            "total {total} must be an integer multiple c > 1 of urn size {urn_size}"
        ));
    }
    if white > total {
        return geometry(format!("{white} white balls exceed the total {total}"));
    }
    if !(white * urn_size).is_multiple_of(total) {
        return geometry(format!(
            "white proportion {white}/{total} cannot be preserved in an urn of {urn_size}"
        ));
    }
    if !(alpha > S::zero() && beta > S::zero()) || !(alpha.clone() + beta.clone()).approx_eq(&S::one()) {
        return Err(Error::WeightsNotNormalized {
            sum: (alpha + beta).render(),
        });
    }
    let all = binomial(total, urn_size);
    let random_fill = (0..=urn_size).map(|l| {
        let ways = binomial(white, l) * binomial(total - white, urn_size - l);
        (
            S::from_ratio(l as i64, urn_size as i64),
            S::from_biguint(&ways) / S::from_biguint(&all),
        )
    });
    let random_fill = AtomicMixture::new(random_fill)?;
    let kept = AtomicMixture::point(S::from_ratio((white * urn_size / total) as i64, urn_size as i64))?;
    HypothesisModel::new(vec![
        Hypothesis {
            label: "a".into(),
            prior: alpha,
            phenomenon: Phenomenon::Atomic(random_fill),
        },
        Hypothesis {
            label: "b".into(),
            prior: beta,
            phenomenon: Phenomenon::Atomic(kept),
        },
    ])
}

/// Posterior vectors after each prefix of `draws` (`true` = success); entry
/// `k` uses the counts of the first `k` draws, so entry 0 is the prior.
pub fn posterior_trajectory<S: Scalar>(
    model: &HypothesisModel<S>,
    draws: &[bool],
) -> Result<Vec<Vec<(String, S)>>> {
    if model.components().iter().all(|c| c.phenomenon.is_atomic()) {
        return atomic_trajectory(model, draws);
    }
    let mixture = mixture_of_hypotheses(model)?;
    let mut ev = EvidenceCount::default();
    let mut out = Vec::with_capacity(draws.len() + 1);
    out.push(posterior_against(model, &mixture, ev)?);
    for &success in draws {
        ev.record(success);
        out.push(posterior_against(model, &mixture, ev)?);
    }
    Ok(out)
}

/// Same result for all-atomic models by updating each atom's mass one draw at
/// a time. Binomial factors cancel from the posterior ratio.
fn atomic_trajectory<S: Scalar>(
    model: &HypothesisModel<S>,
    draws: &[bool],
) -> Result<Vec<Vec<(String, S)>>> {
    let mut masses: Vec<Vec<(S, S)>> = model
        .components()
        .iter()
        .map(|c| {
            let atoms = c.phenomenon.as_atomic().expect("checked atomic").atoms();
            atoms
                .iter()
                .map(|a| (a.p.clone(), c.prior.clone() * a.weight.clone()))
                .collect()
        })
        .collect();
    let snapshot = |masses: &[Vec<(S, S)>]| -> Result<Vec<(String, S)>> {
        let shares: Vec<S> = masses
            .iter()
            .map(|atoms| atoms.iter().fold(S::zero(), |acc, (_, m)| acc + m.clone()))
            .collect();
        let total = shares.iter().fold(S::zero(), |acc, s| acc + s.clone());
        if total.is_zero() {
            return Err(Error::ImpossibleEvidence);
        }
        Ok(model
            .labels()
            .into_iter()
            .zip(shares)
            .map(|(label, share)| (label, share / total.clone()))
            .collect())
    };
    let mut out = Vec::with_capacity(draws.len() + 1);
    out.push(snapshot(&masses)?);
    for &success in draws {
        for (p, m) in masses.iter_mut().flatten() {
            let factor = if success { p.clone() } else { S::one() - p.clone() };
            *m = m.clone() * factor;
        }
        out.push(snapshot(&masses)?);
    }
    Ok(out)
}

/// An asymptotic success frequency for [`posterior_limit`].
#[derive(Debug, Clone, PartialEq)]
pub enum Frequency {
    /// Rate ties between atoms are decided exactly.
    Rational(Exact),
    /// Rates within 1e-12 of each other count as tied.
    Float(f64),
    /// The (generally irrational) frequency at which the two atoms have
    /// equal likelihood rates; that tie is honoured exactly.
    Tie(Exact, Exact),
}

impl Frequency {
    pub fn value(&self) -> f64 {
        match self {
            Frequency::Rational(q) => Scalar::to_f64(q),
            Frequency::Float(f) => *f,
            Frequency::Tie(p, q) => tie_frequency(Scalar::to_f64(p), Scalar::to_f64(q)),
        }
    }
}

/// Frequency `f` solving `f ln p + (1−f) ln(1−p) = f ln q + (1−f) ln(1−q)`.
pub fn tie_frequency(p: f64, q: f64) -> f64 {
    let fail = ((1.0 - q) / (1.0 - p)).ln();
    let succ = (p / q).ln();
    fail / (succ + fail)
}

/// Exponential rate of `p^{fn} (1−p)^{(1−f)n}` with `0 · ln 0 = 0`.
pub fn likelihood_rate(p: f64, f: f64) -> f64 {
    let success = if f > 0.0 { f * p.ln() } else { 0.0 };
    let failure = if f < 1.0 { (1.0 - f) * (1.0 - p).ln() } else { 0.0 };
    success + failure
}

/// Limiting hypothesis weights when the observed frequency tends to `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorLimit<S> {
    pub weights: Vec<(String, S)>,
    /// Atoms sharing the maximal likelihood rate.
    pub dominant_atoms: Vec<S>,
    /// Set when another rate lies within 1e-9 of the maximum without being
    /// tied to it, or when a tie was decided by tolerance rather than exactly.
    pub near_tie: bool,
}

const EXACT_EXPONENT_LIMIT: u64 = 4096;
const SCREEN_TOLERANCE: f64 = 1e-9;
const TIE_TOLERANCE: f64 = 1e-12;

/// Posterior mass concentrates on the atoms maximizing
/// `f ln p + (1−f) ln(1−p)`; each hypothesis keeps its prior-weighted share of
/// those atoms.
pub fn posterior_limit<S: Scalar>(
    model: &HypothesisModel<S>,
    frequency: &Frequency,
) -> Result<PosteriorLimit<S>> {
    let f = frequency.value();
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!(
            "frequency {f} outside [0, 1]"
        )));
    }
    struct Entry<S> {
        hypothesis: usize,
        p: S,
        mass: S,
        rate: f64,
    }
    let mut entries = Vec::new();
    for (i, c) in model.components().iter().enumerate() {
        for atom in c.phenomenon.as_atomic()?.atoms() {
            entries.push(Entry {
                hypothesis: i,
                p: atom.p.clone(),
                mass: c.prior.clone() * atom.weight.clone(),
                rate: likelihood_rate(atom.p.to_f64(), f),
            });
        }
    }
    if let Frequency::Tie(a, b) = frequency {
        // Both members of the pair share one rate by construction.
        let shared = likelihood_rate(Scalar::to_f64(a), f);
        for e in entries.iter_mut() {
            let pe = e.p.to_exact();
            if pe == *a || pe == *b {
                e.rate = shared;
            }
        }
    }

    let best = entries
        .iter()
        .map(|e| e.rate)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::ImpossibleEvidence);
    }
    let leader = entries
        .iter()
        .position(|e| e.rate == best)
        .expect("finite maximum is attained");
    let leader_p = entries[leader].p.clone();
    let in_tie_pair = |x: &S| match frequency {
        Frequency::Tie(p, q) => {
            let x = x.to_exact();
            x == *p || x == *q
        }
        _ => false,
    };
    let scale = best.abs().max(1.0);
    let mut near_tie = false;
    let mut dominant = vec![false; entries.len()];
    for (k, e) in entries.iter().enumerate() {
        if e.p == leader_p || (in_tie_pair(&leader_p) && in_tie_pair(&e.p)) {
            dominant[k] = true;
            continue;
        }
        let gap = best - e.rate;
        if !(gap <= SCREEN_TOLERANCE * scale) {
            continue;
        }
        let decided = match frequency {
            Frequency::Rational(q) => exact_rate_cmp(&e.p, &leader_p, q),
            _ => None,
        };
        match decided {
            Some(Ordering::Equal) => dominant[k] = true,
            Some(Ordering::Less) => {}
            _ => {
                near_tie = true;
                if gap <= TIE_TOLERANCE * scale {
                    dominant[k] = true;
                }
            }
        }
    }

    let mut shares = vec![S::zero(); model.components().len()];
    let mut total = S::zero();
    let mut atoms: Vec<S> = Vec::new();
    for (e, keep) in entries.iter().zip(&dominant) {
        if *keep {
            shares[e.hypothesis] = shares[e.hypothesis].clone() + e.mass.clone();
            total = total + e.mass.clone();
            if !atoms.contains(&e.p) {
                atoms.push(e.p.clone());
            }
        }
    }
    atoms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let weights = model
        .components()
        .iter()
        .zip(shares)
        .map(|(c, share)| (c.label.clone(), share / total.clone()))
        .collect();
    Ok(PosteriorLimit {
        weights,
        dominant_atoms: atoms,
        near_tie,
    })
}

/// Compares the rates of `p` and `q` at rational `f = a/b` exactly through
/// `p^a (1−p)^{b−a}`. `None` when the exponents are too large to be worth it.
fn exact_rate_cmp<S: Scalar>(p: &S, q: &S, f: &Exact) -> Option<Ordering> {
    let a = f.numer().to_u64()?;
    let b = f.denom().to_u64()?;
    if b > EXACT_EXPONENT_LIMIT || f.is_negative() {
        return None;
    }
    let score = |x: &Exact| -> Exact {
        num_traits::pow(x.clone(), a as usize)
            * num_traits::pow(Exact::one() - x.clone(), (b - a) as usize)
    };
    let (p, q) = (p.to_exact(), q.to_exact());
    score(&p).partial_cmp(&score(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    fn urn() -> HypothesisModel<Exact> {
        urn_scenario(12, 4, 6, q(2, 3), q(1, 3)).unwrap()
    }

    fn weights(ph: &Phenomenon<Exact>) -> Vec<(Exact, Exact)> {
        ph.as_atomic()
            .unwrap()
            .atoms()
            .iter()
            .map(|a| (a.p.clone(), a.weight.clone()))
            .collect()
    }

    #[test]
    fn builds_and_validates_mixtures() {
        let coin = atomic_mixture([(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]).unwrap();
        let m = coin.moments(4).unwrap();
        assert_eq!(m.values()[1..], vec![q(1, 2); 4][..]);
        assert!(matches!(
            atomic_mixture([(q(1, 2), q(1, 2))]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        assert!(matches!(
            atomic_mixture([(q(3, 2), q(1, 1))]),
            Err(Error::AtomOutOfRange { .. })
        ));
        assert!(matches!(
            atomic_mixture([(q(1, 2), q(3, 2)), (q(1, 3), q(-1, 2))]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        assert!(matches!(
            constant_phenomenon(q(-1, 5)),
            Err(Error::AtomOutOfRange { .. })
        ));
        // duplicates merge, zero weights vanish
        let merged = atomic_mixture([
            (q(1, 3), q(1, 4)),
            (q(1, 3), q(1, 4)),
            (q(1, 5), q(1, 2)),
            (q(4, 5), q(0, 1)),
        ])
        .unwrap();
        assert_eq!(weights(&merged), vec![(q(1, 5), q(1, 2)), (q(1, 3), q(1, 2))]);
    }

    #[test]
    fn urn_fixture_components() {
        let model = urn();
        let a = &model.components()[0];
        assert_eq!(a.prior, q(2, 3));
        assert_eq!(
            weights(&a.phenomenon),
            vec![
                (q(0, 1), q(1, 33)),
                (q(1, 6), q(8, 33)),
                (q(1, 3), q(15, 33)),
                (q(1, 2), q(8, 33)),
                (q(2, 3), q(1, 33)),
            ]
        );
        let b = &model.components()[1];
        assert_eq!(weights(&b.phenomenon), vec![(q(1, 3), q(1, 1))]);
        let mix = mixture_of_hypotheses(&model).unwrap();
        assert_eq!(
            weights(&mix),
            vec![
                (q(0, 1), q(2, 99)),
                (q(1, 6), q(16, 99)),
                (q(1, 3), q(63, 99)),
                (q(1, 2), q(16, 99)),
                (q(2, 3), q(2, 99)),
            ]
        );
    }

    #[test]
    fn small_and_degenerate_urns() {
        let model = urn_scenario(4, 2, 2, q(1, 2), q(1, 2)).unwrap();
        assert_eq!(
            weights(&model.components()[0].phenomenon),
            vec![(q(0, 1), q(1, 6)), (q(1, 2), q(4, 6)), (q(1, 1), q(1, 6))]
        );
        let empty = urn_scenario(12, 0, 6, q(1, 2), q(1, 2)).unwrap();
        for c in empty.components() {
            assert_eq!(weights(&c.phenomenon), vec![(q(0, 1), q(1, 1))]);
        }
        for (total, white, size) in [(12, 4, 5), (6, 2, 6), (12, 5, 6), (12, 13, 6), (0, 0, 0)] {
            assert!(matches!(
                urn_scenario(total, white, size, q(1, 2), q(1, 2)),
                Err(Error::InvalidUrnGeometry(_))
            ));
        }
        assert!(matches!(
            urn_scenario(12, 4, 6, q(1, 2), q(1, 3)),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn printed_posteriors_for_positive_white_counts() {
        let printed = [
            (6, "0.088353"),
            (5, "0.176707"),
            (4, "0.279365"),
            (3, "0.359918"),
            (2, "0.389812"),
            (1, "0.353947"),
        ];
        let model = urn();
        for (r, text) in printed {
            let post = hypothesis_posterior(&model, EvidenceCount::new(r, 6 - r)).unwrap();
            assert_eq!(post[1].1.to_decimal(6), text, "r = {r}");
        }
        let six_white = hypothesis_posterior(&model, EvidenceCount::new(6, 0)).unwrap();
        assert_eq!(six_white[1].1, q(2112, 23904));
    }

    #[test]
    fn all_black_draws_include_the_empty_urn() {
        // The p = 0 atom (weight 2/99) survives six failures.
        let post = hypothesis_posterior(&urn(), EvidenceCount::new(0, 6)).unwrap();
        assert_eq!(post[1].1, q(1408, 6387));
    }

    #[test]
    fn empty_evidence_returns_priors() {
        let model = urn();
        assert_eq!(
            hypothesis_posterior(&model, EvidenceCount::default()).unwrap(),
            model.priors()
        );
    }

    #[test]
    fn trajectories() {
        let model = urn();
        let path = posterior_trajectory(&model, &[true; 6]).unwrap();
        assert_eq!(path.len(), 7);
        assert_eq!(path[0], model.priors());
        assert_eq!(path[6][1].1.to_decimal(6), "0.088353");
        let alternating = [true, false, true, false, true, false];
        let path = posterior_trajectory(&model, &alternating).unwrap();
        assert_eq!(path[6][1].1.to_decimal(6), "0.359918");

        let single = HypothesisModel::new(vec![Hypothesis {
            label: "only".into(),
            prior: q(1, 1),
            phenomenon: constant_phenomenon(q(1, 2)).unwrap(),
        }])
        .unwrap();
        for step in posterior_trajectory(&single, &[true, false, false]).unwrap() {
            assert_eq!(step[0].1, q(1, 1));
        }
    }

    #[test]
    fn impossible_evidence_is_an_error() {
        let model = HypothesisModel::new(vec![Hypothesis {
            label: "zero".into(),
            prior: q(1, 1),
            phenomenon: constant_phenomenon(q(0, 1)).unwrap(),
        }])
        .unwrap();
        assert_eq!(
            hypothesis_posterior(&model, EvidenceCount::new(1, 0)),
            Err(Error::ImpossibleEvidence)
        );
    }

    #[test]
    fn model_validation() {
        let ph = constant_phenomenon(q(1, 2)).unwrap();
        let h = |label: &str, prior| Hypothesis {
            label: label.into(),
            prior,
            phenomenon: ph.clone(),
        };
        assert!(matches!(
            HypothesisModel::new(vec![h("x", q(1, 2)), h("x", q(1, 2))]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            HypothesisModel::new(vec![h("x", q(1, 2)), h("y", q(1, 3))]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        assert!(matches!(
            HypothesisModel::<Exact>::new(vec![]),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn limits_follow_the_dominant_atom() {
        let model = urn();
        let inside = posterior_limit(&model, &Frequency::Rational(q(3, 10))).unwrap();
        assert_eq!(inside.weights[1].1, q(33, 63));
        assert_eq!(inside.dominant_atoms, vec![q(1, 3)]);
        assert!(!inside.near_tie);
        let outside = posterior_limit(&model, &Frequency::Rational(q(9, 10))).unwrap();
        assert_eq!(outside.weights[1].1, q(0, 1));
        let low = posterior_limit(&model, &Frequency::Tie(q(1, 6), q(1, 3))).unwrap();
        assert_eq!(low.weights[1].1, q(33, 79));
        assert_eq!(low.dominant_atoms, vec![q(1, 6), q(1, 3)]);
        let high = posterior_limit(&model, &Frequency::Tie(q(1, 3), q(1, 2))).unwrap();
        assert_eq!(high.weights[1].1, q(33, 79));
        let zero = posterior_limit(&model, &Frequency::Rational(q(0, 1))).unwrap();
        assert_eq!(zero.dominant_atoms, vec![q(0, 1)]);
        assert_eq!(zero.weights[1].1, q(0, 1));
    }

    #[test]
    fn tie_frequencies_match_printed_thresholds() {
        let low = tie_frequency(1.0 / 6.0, 1.0 / 3.0);
        let high = tie_frequency(1.0 / 3.0, 0.5);
        assert!((low - (1.25f64).ln() / (2.5f64).ln()).abs() < 1e-15);
        assert!((high - (4.0f64 / 3.0).ln() / 2f64.ln()).abs() < 1e-15);
        assert_eq!(format!("{low:.6}"), "0.243529");
        assert_eq!(format!("{high:.6}"), "0.415037");
    }

    #[test]
    fn float_frequency_near_threshold_is_flagged() {
        let f = tie_frequency(1.0 / 6.0, 1.0 / 3.0);
        let lim = posterior_limit(&urn(), &Frequency::Float(f)).unwrap();
        assert!(lim.near_tie);
        let lim = posterior_limit(&urn(), &Frequency::Float(0.3)).unwrap();
        assert!(!lim.near_tie);
    }

    #[test]
    fn exact_rate_ties_on_rational_frequency() {
        // p and 1 − p tie at f = 1/2.
        let model = HypothesisModel::new(vec![Hypothesis {
            label: "sym".into(),
            prior: q(1, 1),
            phenomenon: atomic_mixture([(q(1, 4), q(1, 3)), (q(3, 4), q(2, 3))]).unwrap(),
        }])
        .unwrap();
        let lim = posterior_limit(&model, &Frequency::Rational(q(1, 2))).unwrap();
        assert_eq!(lim.dominant_atoms, vec![q(1, 4), q(3, 4)]);
        assert!(!lim.near_tie);
    }

    #[test]
    fn products() {
        let p = constant_phenomenon(q(1, 2)).unwrap();
        let one = constant_phenomenon(q(1, 1)).unwrap();
        assert_eq!(product_independent(&p, &one), p);
        let r = constant_phenomenon(q(2, 3)).unwrap();
        assert_eq!(product_independent(&p, &r), constant_phenomenon(q(1, 3)).unwrap());
        let u = uniform_phenomenon::<Exact>(6);
        let pu = product_independent(&p, &u);
        let expect: Vec<Exact> = (0..=6).map(|h| q(1, 2).powu(h) / q(h as i64 + 1, 1)).collect();
        assert_eq!(pu.moments(6).unwrap().values(), &expect[..]);
        assert_eq!(pu.depth(), Some(6));
    }

    #[test]
    fn mixture_with_truncated_component() {
        let model = HypothesisModel::new(vec![
            Hypothesis {
                label: "u".into(),
                prior: q(1, 2),
                phenomenon: uniform_phenomenon(5),
            },
            Hypothesis {
                label: "c".into(),
                prior: q(1, 2),
                phenomenon: constant_phenomenon(q(1, 1)).unwrap(),
            },
        ])
        .unwrap();
        let mix = mixture_of_hypotheses(&model).unwrap();
        assert_eq!(mix.depth(), Some(5));
        assert_eq!(mix.moment(3).unwrap(), q(1, 2) * q(1, 4) + q(1, 2));
        let single = HypothesisModel::new(vec![Hypothesis {
            label: "u".into(),
            prior: q(1, 1),
            phenomenon: uniform_phenomenon(5),
        }])
        .unwrap();
        assert_eq!(mixture_of_hypotheses(&single).unwrap(), uniform_phenomenon(5));
    }
}
