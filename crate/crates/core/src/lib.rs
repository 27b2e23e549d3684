//! Exact calculus for exchangeable binary phenomena.
//!
//! A random phenomenon is a sequence of trials whose outcome probabilities
//! depend only on how many successes occur, never on their order. Such a
//! phenomenon is determined by the probabilities `ω_h^(h)` that `h` trials
//! all succeed, equivalently by the characteristic function
//! `ψ(t) = Σ ω_h^(h) (it)^h / h!` of the limiting frequency.
//!
//! The crate works on two representations ([`Phenomenon`]): finite mixtures
//! of constant-probability phenomena, exact at any depth, and truncated
//! all-success sequences with an explicit depth budget. Every computation is
//! generic over a [`Scalar`] backend, exact rationals by default.
//!
//! ```
//! use finetti::{uniform_phenomenon, predictive_probability, EvidenceCount, Exact, Scalar};
//!
//! let uniform = uniform_phenomenon::<Exact>(32);
//! let next = predictive_probability(&uniform, EvidenceCount::new(7, 2)).unwrap();
//! assert_eq!(next, Exact::from_ratio(8, 11));
//! ```

// `!(a < b)` also rejects NaN on the float backend.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod limitdist;
pub mod mixtures;
pub mod moments;
pub mod occupancy;
pub mod operators;
pub mod phenomenon;
pub mod sampler;
pub mod scalar;
pub mod serial;

pub use error::{Error, Result};
pub use limitdist::{
    cdf_complement, cdf_condition, cdf_finite_n, concentration, limiting_cdf_exact,
    moment_convergence, theorem1_interval, Concentration, HypothesisStatus, LimitCdf,
};
pub use mixtures::{
    atomic_mixture, constant_phenomenon, hypothesis_posterior, mixture_of_hypotheses,
    posterior_limit, posterior_trajectory, product_independent, uniform_phenomenon, urn_scenario,
    Atom, AtomicMixture, Frequency, Hypothesis, HypothesisModel, PosteriorLimit,
};
pub use moments::MomentSequence;
pub use occupancy::{
    check_pascal_recurrence, occupancy_probability, occupancy_row, omega_polynomial, psi_eval,
    psi_n_eval, OccupancyRow, PascalCheck,
};
pub use operators::{
    bracket, complement, condition_evidence, condition_failure, condition_success,
    conditional_occupancy, predictive_probability, EvidenceCount,
};
pub use phenomenon::Phenomenon;
pub use sampler::{
    monte_carlo_theorem1, pattern_counts, sample_sequence, MonteCarloReport, SampleRun, Sampler,
};
pub use scalar::{Backend, Exact, Scalar};
pub use serial::{
    document_backend, limit_cdf_from_json, limit_cdf_to_json, model_from_json, model_to_json,
    phenomenon_from_json, phenomenon_to_json,
};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/phenomena.md")]
    pub mod phenomena {}
    #[doc = include_str!("../../../book/src/occupancy.md")]
    pub mod occupancy {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/hypotheses.md")]
    pub mod hypotheses {}
    #[doc = include_str!("../../../book/src/limits.md")]
    pub mod limits {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub mod sampling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
