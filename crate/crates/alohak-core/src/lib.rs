//! Delivery-probability analysis for slotted random multiple access with
//! repeated transmissions over a noisy collision channel.
//!
//! A population of monitoring devices shares a slotted channel. Each new
//! message is transmitted `K+1` times; simultaneous transmissions collide,
//! and even a collision-free transmission is lost to noise with probability
//! ε. This crate provides:
//!
//! - [`analytic`]: closed forms for the individual delivery probability `V`
//!   and the system delivery rate `W`, for a finite user population
//!   ([`FiniteModel`]) and its infinite-user Poisson limit
//!   ([`PoissonModel`]), each with an independent inclusion-exclusion
//!   evaluation path for cross-checking.
//! - [`optimizer`]: the retransmission count `K*` maximizing delivery, by
//!   exact integer scan, plus the Newton-Raphson continuous relaxation and
//!   the (ε, λ) optimal-region partition.
//! - [`simulator`]: a reproducible slot-synchronous Monte Carlo of the same
//!   protocol, used as the stochastic oracle for the formulas.
//! - [`enumerate`]: exhaustive ground truth on small instances.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable default
//! features and enable `libm` for embedded use.
//!
//! ```
//! use alohak_core::{optimal_k_infinite, v_infinite, PoissonModel};
//!
//! // Rare events (2 messages per 100 slots) on a noisy channel.
//! let k_star = optimal_k_infinite(0.02, 0.4)?;
//! assert_eq!(k_star, 6);
//!
//! let best = PoissonModel::new(0.02, 0.4, k_star)?;
//! let none = PoissonModel::new(0.02, 0.4, 0)?;
//! let improvement = (1.0 - v_infinite(&none)) / (1.0 - v_infinite(&best));
//! assert!(improvement > 7.8); // retransmitting cuts non-delivery ~8x
//! # Ok::<(), Box<dyn core::error::Error>>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod enumerate;
mod math;
pub mod model;
pub mod optimizer;
pub mod simulator;

pub use analytic::{
    v_finite, v_finite_history, v_finite_incl_excl, v_finite_noiseless, v_infinite,
    v_infinite_incl_excl, w_finite, w_finite_history, w_infinite, EvalOptions, SystemProbability,
};
pub use enumerate::{exact_v_enumerate, EnumerateError};
pub use math::DEFAULT_LOG_POW_THRESHOLD;
pub use model::{FiniteModel, ModelError, PoissonModel, StationaryDistribution, Variant};
pub use optimizer::{
    default_k_cap, f_derivative, f_objective, optimal_k_finite, optimal_k_finite_capped,
    optimal_k_infinite, optimal_k_infinite_capped, region_grid, solve_xstar, solve_xstar_with,
    OptimizerError, RegionGrid, RootSolveResult,
};
pub use simulator::{
    compare_with_analytic, run_finite, run_poisson, ComparisonReport, DeliveryStats,
    ReplicationSummary, SimConfig, SimError, SimModel, SlotKind, SlotOutcome, SlotTallies,
};
