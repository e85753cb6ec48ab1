//! Parameter bundles for the two system models and the per-user activity
//! chain they share.
//!
//! Every constructor validates its invariants, so downstream code can take a
//! model by reference and evaluate without re-checking.

use thiserror::Error;

/// Parameter-validation failure raised by the model constructors.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModelError {
    #[error("user count must be at least 1")]
    NoUsers,
    #[error("arrival probability q must lie in (0, 1), got {0}")]
    ArrivalProbability(f64),
    #[error("noise probability epsilon must lie in [0, 1), got {0}")]
    NoiseProbability(f64),
    #[error("arrival rate lambda must be positive and finite, got {0}")]
    ArrivalRate(f64),
}

fn check_epsilon(epsilon: f64) -> Result<(), ModelError> {
    if !(0.0..1.0).contains(&epsilon) || !epsilon.is_finite() {
        return Err(ModelError::NoiseProbability(epsilon));
    }
    Ok(())
}

/// Finite-user system: `n_users` independent two-state Markov sources share
/// the slotted channel, and every new message is transmitted `k_retx + 1`
/// times (the arrival slot plus `k_retx` retransmissions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteModel {
    n_users: u32,
    q: f64,
    epsilon: f64,
    k_retx: u32,
}

impl FiniteModel {
    pub fn new(n_users: u32, q: f64, epsilon: f64, k_retx: u32) -> Result<Self, ModelError> {
        if n_users == 0 {
            return Err(ModelError::NoUsers);
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(ModelError::ArrivalProbability(q));
        }
        check_epsilon(epsilon)?;
        Ok(Self {
            n_users,
            q,
            epsilon,
            k_retx,
        })
    }

    pub fn n_users(&self) -> u32 {
        self.n_users
    }

    /// Per-slot probability that an idle user receives a new message.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Probability that a collision-free transmission is corrupted by noise.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of retransmissions after the first attempt.
    pub fn k_retx(&self) -> u32 {
        self.k_retx
    }

    /// Same source parameters with a different retransmission count.
    pub fn with_k(&self, k_retx: u32) -> Self {
        Self { k_retx, ..*self }
    }

    /// Long-run message arrivals per slot, `N·q/(1+q)`.
    pub fn arrival_rate(&self) -> f64 {
        self.n_users as f64 * self.q / (1.0 + self.q)
    }

    pub fn stationary(&self) -> StationaryDistribution {
        StationaryDistribution::for_q(self.q)
    }
}

/// Infinite-user limit: arrivals per slot are Poisson with rate `lambda`,
/// each message owned by a fresh source transmitting `k_retx + 1` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonModel {
    lambda: f64,
    epsilon: f64,
    k_retx: u32,
}

impl PoissonModel {
    pub fn new(lambda: f64, epsilon: f64, k_retx: u32) -> Result<Self, ModelError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(ModelError::ArrivalRate(lambda));
        }
        check_epsilon(epsilon)?;
        Ok(Self {
            lambda,
            epsilon,
            k_retx,
        })
    }

    /// Mean message arrivals per slot.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k_retx(&self) -> u32 {
        self.k_retx
    }

    pub fn with_k(&self, k_retx: u32) -> Self {
        Self { k_retx, ..*self }
    }
}

/// Stationary law of the activity chain with `p01 = q`, `p00 = 1-q`,
/// `p10 = 1`, `p11 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryDistribution {
    /// Probability of the idle state.
    pub pi0: f64,
    /// Probability of the active (new message) state.
    pub pi1: f64,
}

impl StationaryDistribution {
    /// `pi1 = q/(1+q)`; `pi0` is derived as `1 - pi1` so the pair sums to
    /// one exactly in floating point.
    pub fn for_q(q: f64) -> Self {
        let pi1 = q / (1.0 + q);
        Self {
            pi0: 1.0 - pi1,
            pi1,
        }
    }
}

/// How a user treats retransmissions of an earlier message when a new one
/// arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// A new arrival cancels the remaining retransmissions of the previous
    /// message.
    Preemptive,
    /// Messages carry the user's recent state history, so every activation
    /// completes all `K+1` transmissions.
    History,
}

impl core::fmt::Display for Variant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Variant::Preemptive => f.write_str("preemptive"),
            Variant::History => f.write_str("history"),
        }
    }
}
