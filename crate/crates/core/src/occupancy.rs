//! Finite-`n` quantities: occupancy probabilities, generating polynomials and
//! characteristic functions.
//!
//! `ω_h^(n)` is the probability of exactly `h` successes in `n` trials. On a
//! truncated sequence it comes from finite differences,
//! `ω_h^(n) = C(n, h) Δ^{n−h} ω_h^(h)`, which is the coefficient expansion of
//! `Ω_n(z) = Ω_n(1 + (z − 1))`. Atomic mixtures use the binomial sum
//! `Σ λ_i C(n, h) p_i^h (1 − p_i)^{n−h}` directly, so each route checks the
//! other.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::forward_difference;
use crate::phenomenon::Phenomenon;
use crate::scalar::{binomial, binomial_row, Scalar};

/// Distribution of the success count over `n` trials.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyRow<S> {
    probs: Vec<S>,
}

impl<S: Scalar> OccupancyRow<S> {
    /// Checks nonnegativity and that the entries sum to one.
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty occupancy row".into()));
        }
        if let Some(index) = probs.iter().position(|p| p.is_clearly_negative()) {
            return Err(Error::NotAProbability { index });
        }
        let sum = probs.iter().fold(S::zero(), |acc, p| acc + p.clone());
        if !sum.approx_eq(&S::one()) {
            return Err(Error::WeightsNotNormalized { sum: sum.render() });
        }
        Ok(OccupancyRow { probs })
    }

    pub fn n(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn get(&self, h: usize) -> Result<&S> {
        self.probs.get(h).ok_or(Error::IndexOutOfRange {
            index: h,
            max: self.n(),
        })
    }

    /// Marginal distribution over the first `m` of the `n` trials:
    /// `ω_k^(m) = Σ_h ω_h^(n) C(h, k) C(n−h, m−k) / C(n, m)`.
    pub fn aggregate(&self, m: usize) -> Result<OccupancyRow<S>> {
        let n = self.n();
        if m > n {
            return Err(Error::IndexOutOfRange { index: m, max: n });
        }
        let total = S::from_biguint(&binomial(n, m));
        let probs = (0..=m)
            .map(|k| {
                (k..=n - m + k).fold(S::zero(), |acc, h| {
                    let ways = binomial(h, k) * binomial(n - h, m - k);
                    acc + self.probs[h].clone() * S::from_biguint(&ways)
                }) / total.clone()
            })
            .collect();
        Ok(OccupancyRow { probs })
    }

    /// `Ω_n(e^{it}) = Σ ω_h^(n) e^{iht}`, in floating point.
    pub fn characteristic(&self, t: f64) -> Complex64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(h, w)| Complex64::from_polar(w.to_f64(), h as f64 * t))
            .sum()
    }

    /// CSV with header `h,omega`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,omega\n");
        for (h, w) in self.probs.iter().enumerate() {
            out.push_str(&format!("{h},{}\n", w.render()));
        }
        out
    }
}

/// `ω_h^(n)`.
pub fn occupancy_probability<S: Scalar>(ph: &Phenomenon<S>, n: usize, h: usize) -> Result<S> {
    if h > n {
        return Err(Error::IndexOutOfRange { index: h, max: n });
    }
    ph.scaled_sequence_probability(h, n - h, &binomial(n, h))
}

/// `[ω_0^(n), …, ω_n^(n)]`.
pub fn occupancy_row<S: Scalar>(ph: &Phenomenon<S>, n: usize) -> Result<OccupancyRow<S>> {
    let probs = match ph {
        Phenomenon::Atomic(a) => binomial_row(n)
            .iter()
            .enumerate()
            .map(|(h, c)| a.scaled_likelihood(h, n - h, c))
            .collect(),
        Phenomenon::Moments(m) => {
            m.require(n)?;
            let ways = binomial_row(n);
            let mut probs = vec![S::zero(); n + 1];
            let mut row = m.values()[..=n].to_vec();
            for j in 0..=n {
                // row holds Δ^j a_0 ..= Δ^j a_{n-j}
                let h = n - j;
                probs[h] = S::from_biguint(&ways[h]) * row[h].clone();
                row = forward_difference(&row);
            }
            probs
        }
    };
    Ok(OccupancyRow { probs })
}

/// Outcome of checking `n ω_k^(n−1) = (n−k) ω_k^(n) + (k+1) ω_{k+1}^(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PascalCheck<S> {
    Pass,
    Fail { k: usize, lhs: S, rhs: S },
}

impl<S> PascalCheck<S> {
    pub fn passed(&self) -> bool {
        matches!(self, PascalCheck::Pass)
    }
}

/// Checks the one-step recurrence between a row at `n` (`upper`) and a row at
/// `n − 1` (`lower`), returning the first failing `k`.
pub fn pascal_witness<S: Scalar>(upper: &[S], lower: &[S]) -> Result<PascalCheck<S>> {
    let n = upper.len().saturating_sub(1);
    if n == 0 || lower.len() != n {
        return Err(Error::InvalidArgument(format!(
            "rows of length {} and {} are not consecutive",
            upper.len(),
            lower.len()
        )));
    }
    for k in 0..n {
        let lhs = S::from_usize(n) * lower[k].clone();
        let rhs = S::from_usize(n - k) * upper[k].clone() + S::from_usize(k + 1) * upper[k + 1].clone();
        if !lhs.approx_eq(&rhs) {
            return Ok(PascalCheck::Fail { k, lhs, rhs });
        }
    }
    Ok(PascalCheck::Pass)
}

/// Verifies the recurrence between `occupancy_row(n)` and `occupancy_row(n−1)`.
pub fn check_pascal_recurrence<S: Scalar>(ph: &Phenomenon<S>, n: usize) -> Result<PascalCheck<S>> {
    if n == 0 {
        return Err(Error::InvalidArgument("recurrence needs n >= 1".into()));
    }
    let upper = occupancy_row(ph, n)?;
    let lower = occupancy_row(ph, n - 1)?;
    pascal_witness(upper.probs(), lower.probs())
}

/// Coefficients of `Ω_n(1 + z)`: `C(n, h) ω_h^(h)`.
pub fn omega_polynomial<S: Scalar>(ph: &Phenomenon<S>, n: usize) -> Result<Vec<S>> {
    ph.require_depth(n)?;
    (0..=n)
        .map(|h| Ok(S::from_biguint(&binomial(n, h)) * ph.moment(h)?))
        .collect()
}

/// Coefficients of `P(x + shift)` given those of `P(x)`.
pub fn taylor_shift<S: Scalar>(coeffs: &[S], shift: &S) -> Vec<S> {
    // Horner: P(x+c) = (((a_n)(x+c) + a_{n-1})(x+c) + …)
    let mut out: Vec<S> = Vec::with_capacity(coeffs.len());
    for a in coeffs.iter().rev() {
        // out <- out * (x + c) + a
        let mut next = vec![S::zero(); out.len() + 1];
        for (i, b) in out.iter().enumerate() {
            next[i + 1] = next[i + 1].clone() + b.clone();
            next[i] = next[i].clone() + b.clone() * shift.clone();
        }
        next[0] = next[0].clone() + a.clone();
        out = next;
    }
    out
}

/// `ψ_n(t) = Ω_n(e^{it})`.
pub fn psi_n_eval<S: Scalar>(ph: &Phenomenon<S>, n: usize, t: f64) -> Result<Complex64> {
    let row = occupancy_row(ph, n)?;
    if t == 0.0 {
        // The row sums to one; skip the rounding of the float sum.
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(row.characteristic(t))
}

/// `ψ(t) = Σ ω_h^(h) (it)^h / h!` with a rigorous bound on the neglected tail.
///
/// Atomic mixtures use `Σ λ_i e^{i p_i t}` with a zero bound. Truncated
/// sequences sum to order `truncation` and bound the rest by
/// `Σ_{h > N} |t|^h / h!`, since every `ω_h^(h) ≤ 1`.
pub fn psi_eval<S: Scalar>(ph: &Phenomenon<S>, t: f64, truncation: usize) -> Result<(Complex64, f64)> {
    match ph {
        Phenomenon::Atomic(a) => {
            let value = a
                .atoms()
                .iter()
                .map(|atom| Complex64::from_polar(atom.weight.to_f64(), atom.p.to_f64() * t))
                .sum();
            Ok((value, 0.0))
        }
        Phenomenon::Moments(m) => {
            m.require(truncation)?;
            if t == 0.0 {
                return Ok((Complex64::new(1.0, 0.0), 0.0));
            }
            let mut value = Complex64::new(0.0, 0.0);
            let mut term = Complex64::new(1.0, 0.0); // (it)^h / h!
            for (h, w) in m.values()[..=truncation].iter().enumerate() {
                if h > 0 {
                    term = term * Complex64::new(0.0, t) / h as f64;
                }
                value += term * w.to_f64();
            }
            Ok((value, exp_tail(t.abs(), truncation)))
        }
    }
}

/// `Σ_{h > n} x^h / h!` for `x ≥ 0`.
fn exp_tail(x: f64, n: usize) -> f64 {
    let mut term = 1.0;
    for h in 1..=n + 1 {
        term *= x / h as f64;
    }
    let mut sum = 0.0;
    let mut h = n + 1;
    loop {
        sum += term;
        h += 1;
        term *= x / h as f64;
        if (h as f64) > x && term <= sum * 1e-17 {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}
