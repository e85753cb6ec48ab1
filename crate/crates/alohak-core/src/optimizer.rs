//! Optimal retransmission count: exact integer scans of the closed forms,
//! the Newton-Raphson continuous relaxation, and the (ε, λ) optimal-region
//! grid.
//!
//! The integer scan is authoritative everywhere; the Newton root is an
//! approximation (`K + 1 ≈ x*`) reported for diagnostics.

use crate::analytic::{v_finite, v_infinite};
use crate::math::{self, ceil, exp, expm1, ln, one_minus_scaled_exp};
use crate::model::{FiniteModel, ModelError, PoissonModel};
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OptimizerError {
    /// The root equation degenerates at ε = 0 and ε ≥ 1.
    #[error("root solve requires epsilon in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("lambda must be positive and finite, got {0}")]
    LambdaOutOfRange(f64),
    #[error("x must be non-negative and finite, got {0}")]
    XOutOfRange(f64),
    #[error("axis range [{0}, {1}] is empty or out of domain")]
    BadRange(f64, f64),
    #[error("grid needs at least 2 points per axis, got {0}")]
    BadResolution(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Residual tolerance the solver targets by default.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: u32 = 100;

/// Values of V within this absolute distance are treated as tied during the
/// integer scan; ties resolve toward smaller K (fewer transmissions).
pub const ARGMAX_TIE_EPS: f64 = 1e-12;

/// Outcome of the Newton-Raphson solve of F(x) = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolveResult {
    pub x_star: f64,
    pub iterations: u32,
    /// |F(x_star)| at the returned point.
    pub residual: f64,
    pub converged: bool,
}

fn check_root_domain(lambda: f64, epsilon: f64) -> Result<(), OptimizerError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(OptimizerError::LambdaOutOfRange(lambda));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(OptimizerError::EpsilonOutOfRange(epsilon));
    }
    Ok(())
}

/// Constant `A = (1-ε)/(1-εe^{-λ}) · e^{-λ}/(1-e^{-λ})` of the root
/// equation.
fn a_const(lambda: f64, epsilon: f64) -> f64 {
    (1.0 - epsilon) / one_minus_scaled_exp(epsilon, -lambda) * exp(-lambda) / -expm1(-lambda)
}

/// Objective whose unique positive root `x*` approximates the optimal
/// transmission count: `F(x) = x - 1/λ + A(1 - (1 - λ⁻¹·ln(εe^{-λ}))·(εe^{-λ})^x)`.
///
/// `F(0) < 0`, and F increases without bound, so the root exists and is
/// unique on the positive half-line.
pub fn f_objective(x: f64, lambda: f64, epsilon: f64) -> Result<f64, OptimizerError> {
    check_root_domain(lambda, epsilon)?;
    if !x.is_finite() || x < 0.0 {
        return Err(OptimizerError::XOutOfRange(x));
    }
    let ln_z = ln(epsilon) - lambda;
    let zx = exp(x * ln_z);
    Ok(x - 1.0 / lambda + a_const(lambda, epsilon) * (1.0 - (1.0 - ln_z / lambda) * zx))
}

/// `F'(x) = 1 + A(2 - ln(ε)/λ)(λ - ln(ε))·(εe^{-λ})^x`, positive everywhere.
pub fn f_derivative(x: f64, lambda: f64, epsilon: f64) -> Result<f64, OptimizerError> {
    check_root_domain(lambda, epsilon)?;
    if !x.is_finite() || x < 0.0 {
        return Err(OptimizerError::XOutOfRange(x));
    }
    let ln_eps = ln(epsilon);
    let zx = exp(x * (ln_eps - lambda));
    Ok(1.0 + a_const(lambda, epsilon) * (2.0 - ln_eps / lambda) * (lambda - ln_eps) * zx)
}

/// Newton-Raphson solve of F(x) = 0 from `x0 = 1/λ` with the default
/// tolerance and iteration cap.
pub fn solve_xstar(lambda: f64, epsilon: f64) -> Result<RootSolveResult, OptimizerError> {
    let x0 = check_root_domain(lambda, epsilon).map(|_| 1.0 / lambda)?;
    solve_xstar_with(lambda, epsilon, x0, DEFAULT_ROOT_TOL, DEFAULT_MAX_ITER)
}

/// Newton-Raphson with explicit start, residual tolerance, and iteration
/// cap. A step that would go negative falls back to halving toward the
/// origin bracket (F(0) < 0 guarantees the root sits to the right).
pub fn solve_xstar_with(
    lambda: f64,
    epsilon: f64,
    x0: f64,
    tol: f64,
    max_iter: u32,
) -> Result<RootSolveResult, OptimizerError> {
    check_root_domain(lambda, epsilon)?;
    if !x0.is_finite() || x0 < 0.0 {
        return Err(OptimizerError::XOutOfRange(x0));
    }

    let mut x = x0;
    let mut fx = f_objective(x, lambda, epsilon)?;
    for it in 0..max_iter {
        if math::abs(fx) <= tol {
            return Ok(RootSolveResult {
                x_star: x,
                iterations: it,
                residual: math::abs(fx),
                converged: x > 0.0,
            });
        }
        let dfx = f_derivative(x, lambda, epsilon)?;
        let mut next = x - fx / dfx;
        if next < 0.0 {
            next = x / 2.0;
        }
        x = next;
        fx = f_objective(x, lambda, epsilon)?;
    }
    let residual = math::abs(fx);
    Ok(RootSolveResult {
        x_star: x,
        iterations: max_iter,
        residual,
        converged: residual <= tol && x > 0.0,
    })
}

/// Default scan cap `max(64, ceil(4/λ))`: V decays like `e^{-(K+1)λ}`, so
/// the optimum sits well below `4/λ` in the supported regimes.
pub fn default_k_cap(lambda: f64) -> u32 {
    let by_rate = ceil(4.0 / lambda);
    if by_rate > u32::MAX as f64 {
        u32::MAX
    } else {
        (by_rate as u32).max(64)
    }
}

fn scan_argmax(mut value_at: impl FnMut(u32) -> f64, k_cap: u32) -> u32 {
    let mut best_k = 0;
    let mut best_v = value_at(0);
    for k in 1..=k_cap {
        let v = value_at(k);
        if v > best_v + ARGMAX_TIE_EPS {
            best_k = k;
            best_v = v;
        }
    }
    best_k
}

/// Integer argmax of `V∞` over `K ∈ [0, k_cap]` by exact scan; ties break
/// toward smaller K. ε = 0 short-circuits to 0 (retransmissions never help
/// on a noiseless channel).
pub fn optimal_k_infinite_capped(
    lambda: f64,
    epsilon: f64,
    k_cap: u32,
) -> Result<u32, OptimizerError> {
    let probe = PoissonModel::new(lambda, epsilon, 0)?;
    if epsilon == 0.0 {
        return Ok(0);
    }
    Ok(scan_argmax(|k| v_infinite(&probe.with_k(k)), k_cap))
}

/// [`optimal_k_infinite_capped`] with the default cap for `lambda`.
pub fn optimal_k_infinite(lambda: f64, epsilon: f64) -> Result<u32, OptimizerError> {
    optimal_k_infinite_capped(lambda, epsilon, default_k_cap(lambda))
}

/// Integer argmax of V over `K ∈ [0, k_cap]` for the finite model. The same
/// K maximizes W, since W/V = N·q/(1+q) does not depend on K.
pub fn optimal_k_finite_capped(
    n_users: u32,
    q: f64,
    epsilon: f64,
    k_cap: u32,
) -> Result<u32, OptimizerError> {
    let probe = FiniteModel::new(n_users, q, epsilon, 0)?;
    if epsilon == 0.0 {
        return Ok(0);
    }
    Ok(scan_argmax(|k| v_finite(&probe.with_k(k)), k_cap))
}

/// [`optimal_k_finite_capped`] with the cap derived from the arrival rate
/// `N·q/(1+q)`.
pub fn optimal_k_finite(n_users: u32, q: f64, epsilon: f64) -> Result<u32, OptimizerError> {
    let probe = FiniteModel::new(n_users, q, epsilon, 0)?;
    optimal_k_finite_capped(n_users, q, epsilon, default_k_cap(probe.arrival_rate()))
}

/// Rectangular (ε, λ) grid with the optimal K per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    epsilon_axis: Vec<f64>,
    lambda_axis: Vec<f64>,
    /// Row-major over (epsilon index, lambda index).
    k_star: Vec<u32>,
}

impl RegionGrid {
    pub fn epsilon_axis(&self) -> &[f64] {
        &self.epsilon_axis
    }

    pub fn lambda_axis(&self) -> &[f64] {
        &self.lambda_axis
    }

    pub fn k_star(&self) -> &[u32] {
        &self.k_star
    }

    pub fn k_at(&self, eps_idx: usize, lambda_idx: usize) -> u32 {
        self.k_star[eps_idx * self.lambda_axis.len() + lambda_idx]
    }

    /// Cells as `(epsilon, lambda, k_star)` rows, epsilon-major.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, u32)> + '_ {
        self.epsilon_axis
            .iter()
            .enumerate()
            .flat_map(move |(i, &e)| {
                self.lambda_axis
                    .iter()
                    .enumerate()
                    .map(move |(j, &l)| (e, l, self.k_at(i, j)))
            })
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Fill the optimal-region partition by running the integer scan in every
/// cell. `k_cap = None` uses the per-λ default cap.
pub fn region_grid(
    epsilon_range: (f64, f64),
    lambda_range: (f64, f64),
    resolution: (usize, usize),
    k_cap: Option<u32>,
) -> Result<RegionGrid, OptimizerError> {
    let (eps_lo, eps_hi) = epsilon_range;
    let (lam_lo, lam_hi) = lambda_range;
    if !(eps_lo > 0.0 && eps_hi < 1.0 && eps_lo <= eps_hi) {
        return Err(OptimizerError::BadRange(eps_lo, eps_hi));
    }
    if !(lam_lo > 0.0 && lam_lo <= lam_hi) || !lam_hi.is_finite() {
        return Err(OptimizerError::BadRange(lam_lo, lam_hi));
    }
    let (eps_n, lam_n) = resolution;
    if eps_n < 2 {
        return Err(OptimizerError::BadResolution(eps_n));
    }
    if lam_n < 2 {
        return Err(OptimizerError::BadResolution(lam_n));
    }

    let epsilon_axis = linspace(eps_lo, eps_hi, eps_n);
    let lambda_axis = linspace(lam_lo, lam_hi, lam_n);
    let mut k_star = Vec::with_capacity(eps_n * lam_n);
    for &eps in &epsilon_axis {
        for &lam in &lambda_axis {
            let cap = k_cap.unwrap_or_else(|| default_k_cap(lam));
            k_star.push(optimal_k_infinite_capped(lam, eps, cap)?);
        }
    }
    Ok(RegionGrid {
        epsilon_axis,
        lambda_axis,
        k_star,
    })
}
