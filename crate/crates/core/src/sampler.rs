//! Sequential sampling of exchangeable sequences.
//!
//! A sequence is drawn trial by trial: after `r` successes and `s` failures
//! the next trial succeeds with the predictive probability
//! `P(r+1, s) / P(r, s)`, where `P(r, s)` is the probability of one particular
//! ordered sequence with those counts. This works on truncated all-success
//! sequences too, which have no mixing measure to draw from.
//!
//! Randomness comes from ChaCha20 (Bernstein, 20 rounds) as implemented by
//! `rand_chacha`, which is counter based: a run of `T` sequences is cut into
//! blocks of [`BLOCK_LEN`] sequences and block `b` uses stream `b` of the
//! seeded generator. Results therefore depend on the seed alone, not on how
//! many threads process the blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::limitdist::theorem1_interval;
use crate::moments::forward_difference;
use crate::occupancy::occupancy_row;
use crate::phenomenon::Phenomenon;
use crate::scalar::Scalar;

/// Sequences per RNG stream.
pub const BLOCK_LEN: usize = 1024;

/// Precomputed predictive probabilities for sequences of a fixed length.
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    /// `table[k][r]`: success probability after `r` successes in `k` trials.
    table: Vec<Vec<f64>>,
}

impl Sampler {
    pub fn new<S: Scalar>(ph: &Phenomenon<S>, n: usize) -> Result<Self> {
        ph.require_depth(n)?;
        // seq[s][r] = probability of one ordered sequence with r successes and
        // s failures, for r + s <= n.
        let seq: Vec<Vec<S>> = match ph {
            Phenomenon::Moments(m) => {
                let mut rows = Vec::with_capacity(n + 1);
                let mut row = m.values()[..=n].to_vec();
                for _ in 0..=n {
                    let next = forward_difference(&row);
                    rows.push(row);
                    row = next;
                }
                rows
            }
            Phenomenon::Atomic(a) => {
                let atoms = a.atoms();
                let powers = |x: &S| {
                    let mut out = Vec::with_capacity(n + 1);
                    let mut acc = S::one();
                    for _ in 0..=n {
                        out.push(acc.clone());
                        acc = acc * x.clone();
                    }
                    out
                };
                let p_pow: Vec<Vec<S>> = atoms.iter().map(|x| powers(&x.p)).collect();
                let q_pow: Vec<Vec<S>> = atoms
                    .iter()
                    .map(|x| powers(&(S::one() - x.p.clone())))
                    .collect();
                (0..=n)
                    .map(|s| {
                        (0..=n - s)
                            .map(|r| {
                                atoms.iter().enumerate().fold(S::zero(), |acc, (i, x)| {
                                    acc + x.weight.clone() * p_pow[i][r].clone() * q_pow[i][s].clone()
                                })
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        let table = (0..n)
            .map(|k| {
                (0..=k)
                    .map(|r| {
                        let s = k - r;
                        let here = &seq[s][r];
                        if here.is_zero() {
                            // Unreachable state.
                            0.0
                        } else {
                            (seq[s][r + 1].clone() / here.clone()).to_f64()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Sampler { n, table })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Success probability of the next trial after `r` successes and `s`
    /// failures, as used by the sampler.
    pub fn predictive(&self, r: usize, s: usize) -> Option<f64> {
        self.table.get(r + s).map(|row| row[r])
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.n);
        let mut r = 0;
        for k in 0..self.n {
            let success = rng.random::<f64>() < self.table[k][r];
            if success {
                r += 1;
            }
            out.push(success);
        }
        out
    }

    /// Number of successes in one drawn sequence.
    pub fn draw_count<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut r = 0;
        for k in 0..self.n {
            if rng.random::<f64>() < self.table[k][r] {
                r += 1;
            }
        }
        r
    }

    /// Runs `sequences` draws in blocks of [`BLOCK_LEN`], block `b` on
    /// stream `b`, and collects `visit`'s outputs in sequence order.
    fn run<T: Send>(
        &self,
        sequences: usize,
        seed: u64,
        visit: impl Fn(&Self, &mut ChaCha20Rng) -> T + Sync,
    ) -> Vec<T> {
        let blocks = sequences.div_ceil(BLOCK_LEN);
        let per_block: Vec<Vec<T>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = stream_rng(seed, b as u64);
                let len = BLOCK_LEN.min(sequences - b * BLOCK_LEN);
                (0..len).map(|_| visit(self, &mut rng)).collect()
            })
            .collect();
        per_block.into_iter().flatten().collect()
    }
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One exchangeable sequence of length `n`.
pub fn sample_sequence<S: Scalar, R: Rng + ?Sized>(
    ph: &Phenomenon<S>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    Ok(Sampler::new(ph, n)?.draw(rng))
}

/// Draws `p` from the mixing measure, then `n` independent trials. Only for
/// atomic phenomena; used to cross-check the predictive route.
pub fn sample_sequence_two_stage<S: Scalar, R: Rng + ?Sized>(
    ph: &Phenomenon<S>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let atoms = ph.as_atomic()?.atoms();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut p = atoms[atoms.len() - 1].p.to_f64();
    for a in atoms {
        acc += a.weight.to_f64();
        if u < acc {
            p = a.p.to_f64();
            break;
        }
    }
    Ok((0..n).map(|_| rng.random::<f64>() < p).collect())
}

/// Success counts of a reproducible batch of sampled sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRun {
    pub seed: u64,
    pub length: usize,
    pub sequences: usize,
    pub results: Vec<usize>,
}

impl SampleRun {
    pub fn generate<S: Scalar>(
        ph: &Phenomenon<S>,
        length: usize,
        sequences: usize,
        seed: u64,
    ) -> Result<Self> {
        let sampler = Sampler::new(ph, length)?;
        let results = sampler.run(sequences, seed, |s, rng| s.draw_count(rng));
        Ok(SampleRun {
            seed,
            length,
            sequences,
            results,
        })
    }
}

/// How often each of the `2^n` outcome patterns occurs; bit `i` of the index
/// is trial `i`. Limited to `n <= 20`.
pub fn pattern_counts<S: Scalar>(
    ph: &Phenomenon<S>,
    n: usize,
    sequences: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    if n > 20 {
        return Err(Error::InvalidArgument(format!(
            "{n} trials give too many patterns to tabulate"
        )));
    }
    let sampler = Sampler::new(ph, n)?;
    let codes = sampler.run(sequences, seed, |s, rng| {
        s.draw(rng)
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i))
    });
    let mut counts = vec![0u64; 1 << n];
    for c in codes {
        counts[c] += 1;
    }
    Ok(counts)
}

/// Empirical check of the frequency law at a finite `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport<S> {
    pub seed: u64,
    pub n: usize,
    pub trials: usize,
    /// Fraction of sampled sequences with `ξ1 < h/n ≤ ξ2`.
    pub empirical: f64,
    /// Exact probability of the same event, `Σ_{ξ1 < h/n ≤ ξ2} ω_h^(n)`.
    pub exact: S,
    /// `Φ_n(nξ2) − Φ_n(nξ1)` under the midpoint rule.
    pub interval: S,
    /// `√(q (1 − q) / T)` with `q` the exact value.
    pub stderr: f64,
}

impl<S: Scalar> MonteCarloReport<S> {
    /// Distance from the exact value in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.empirical == self.exact.to_f64() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.empirical - self.exact.to_f64()) / self.stderr
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "empirical": self.empirical,
            "exact": self.exact.to_json(),
            "stderr": self.stderr,
        })
    }
}

/// Samples `trials` sequences of length `n` and compares the fraction whose
/// frequency lies in `(ξ1, ξ2]` with its exact probability.
pub fn monte_carlo_theorem1<S: Scalar>(
    ph: &Phenomenon<S>,
    n: usize,
    trials: usize,
    xi1: &S,
    xi2: &S,
    seed: u64,
) -> Result<MonteCarloReport<S>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let interval = theorem1_interval(ph, xi1, xi2, n)?.finite;
    let lo = S::from_usize(n) * xi1.clone();
    let hi = S::from_usize(n) * xi2.clone();
    let inside = |h: usize| {
        let h = S::from_usize(h);
        h > lo && h <= hi
    };
    let row = occupancy_row(ph, n)?;
    let exact = row
        .probs()
        .iter()
        .enumerate()
        .filter(|(h, _)| inside(*h))
        .fold(S::zero(), |acc, (_, w)| acc + w.clone());
    let run = SampleRun::generate(ph, n, trials, seed)?;
    let hits = run.results.iter().filter(|&&h| inside(h)).count();
    let empirical = hits as f64 / trials as f64;
    let q = exact.to_f64();
    let stderr = (q * (1.0 - q) / trials as f64).max(0.0).sqrt();
    Ok(MonteCarloReport {
        seed,
        n,
        trials,
        empirical,
        exact,
        interval,
        stderr,
    })
}
