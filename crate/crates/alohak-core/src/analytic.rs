//! Closed-form delivery probabilities for both system models.
//!
//! Each quantity has two independent computation paths: the simplified
//! closed form (`v_finite`, `v_infinite`, ...) and the inclusion-exclusion
//! expansion it was derived from (`v_finite_incl_excl`,
//! `v_infinite_incl_excl`). The pairs must agree to ~1e-10 relative and the
//! test suites hold them to that.

use crate::math::{
    self, exp, expm1, geom_sum, ln, ln_1p, one_minus_scaled_exp, pow_int, DEFAULT_LOG_POW_THRESHOLD,
};
use crate::model::{FiniteModel, PoissonModel};

/// Evaluation knobs for the finite-model formulas.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Powers with an integer exponent above this are taken in log space.
    pub log_pow_threshold: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            log_pow_threshold: DEFAULT_LOG_POW_THRESHOLD,
        }
    }
}

/// System delivery rate together with a range flag.
///
/// `W = N·q/(1+q)·V` is a long-run frequency; outside the rare-event regime
/// the formula can exceed 1. The raw value is returned unclamped and
/// `exceeds_one` is set instead, so misuse stays visible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemProbability {
    pub value: f64,
    pub exceeds_one: bool,
}

impl SystemProbability {
    fn from_value(value: f64) -> Self {
        Self {
            value,
            exceeds_one: value > 1.0,
        }
    }
}

/// Probability that a tagged message generated at slot 0 is delivered at
/// least once during its (possibly preempted) transmission window.
pub fn v_finite(model: &FiniteModel) -> f64 {
    v_finite_with(model, &EvalOptions::default())
}

pub fn v_finite_with(model: &FiniteModel, opts: &EvalOptions) -> f64 {
    let q = model.q();
    let eps = model.epsilon();
    let k = model.k_retx() as u64;
    let nm1 = (model.n_users() - 1) as u64;
    let thr = opts.log_pow_threshold;

    let ln_a = ln_1p(-q); // ln(1-q)
    let a = 1.0 - q;
    let pow_a = |e: u64| pow_int(a, e, thr);

    let prefactor = (1.0 - eps) * pow_int(1.0 / (1.0 + q), nm1, thr) * pow_a(nm1 * k);

    // r1 = eps (1-q)^N, r2 = eps (1-q)^{N-1}; their complements via expm1.
    let r1 = eps * pow_a(nm1 + 1);
    let r2 = eps * pow_a(nm1);
    let one_m_r1 = one_minus_scaled_exp(eps, (nm1 + 1) as f64 * ln_a);
    let one_m_r2 = one_minus_scaled_exp(eps, nm1 as f64 * ln_a);

    let g1 = geom_sum(r1, k, one_m_r1, thr);
    let g2 = geom_sum(r2, k, one_m_r2, thr);

    let one_m_a_nm1 = -expm1(nm1 as f64 * ln_a); // 1 - (1-q)^{N-1}
    let one_m_a_k = -expm1(k as f64 * ln_a); // 1 - (1-q)^K

    let noise_recovery = eps * pow_a(nm1) * g1;
    let collision_tail = one_m_a_nm1 / one_m_r1 * (one_m_a_k / q - eps * pow_a(nm1 + k) * g2);

    prefactor * (1.0 + noise_recovery + collision_tail)
}

/// System delivery rate `W = N·q/(1+q) · V` for the finite model.
pub fn w_finite(model: &FiniteModel) -> SystemProbability {
    SystemProbability::from_value(model.arrival_rate() * v_finite(model))
}

/// Delivery probability for the non-preemptive variant, where each message
/// carries the user's state over the preceding `K` slots and every
/// activation completes all `K+1` transmissions.
pub fn v_finite_history(model: &FiniteModel) -> f64 {
    v_finite_history_with(model, &EvalOptions::default())
}

pub fn v_finite_history_with(model: &FiniteModel, opts: &EvalOptions) -> f64 {
    let q = model.q();
    let eps = model.epsilon();
    let k = model.k_retx() as u64;
    let nm1 = (model.n_users() - 1) as u64;
    let thr = opts.log_pow_threshold;

    let ln_a = ln_1p(-q);
    let a = 1.0 - q;

    let prefactor = (1.0 - eps) * pow_int(1.0 / (1.0 + q), nm1, thr) * pow_int(a, nm1 * k, thr);

    let u = eps * pow_int(a, nm1, thr); // eps (1-q)^{N-1}
    let one_m_u = one_minus_scaled_exp(eps, nm1 as f64 * ln_a);
    let one_m_a_nm1 = -expm1(nm1 as f64 * ln_a);

    let g_full = geom_sum(u, k + 1, one_m_u, thr);
    let g_k = geom_sum(u, k, one_m_u, thr);

    prefactor * (g_full + one_m_a_nm1 * (k as f64 - u * g_k) / one_m_u)
}

/// System delivery rate for the non-preemptive variant.
pub fn w_finite_history(model: &FiniteModel) -> SystemProbability {
    SystemProbability::from_value(model.arrival_rate() * v_finite_history(model))
}

/// Noiseless-channel delivery probability. The model's `epsilon` is ignored
/// (treated as 0); `v_finite` with `epsilon = 0` must reduce to this.
pub fn v_finite_noiseless(model: &FiniteModel) -> f64 {
    v_finite_noiseless_with(model, &EvalOptions::default())
}

pub fn v_finite_noiseless_with(model: &FiniteModel, opts: &EvalOptions) -> f64 {
    let q = model.q();
    let k = model.k_retx() as u64;
    let nm1 = (model.n_users() - 1) as u64;
    let thr = opts.log_pow_threshold;

    let ln_a = ln_1p(-q);
    let one_m_a_nm1 = -expm1(nm1 as f64 * ln_a);
    let one_m_a_k = -expm1(k as f64 * ln_a);

    pow_int(1.0 / (1.0 + q), nm1, thr)
        * pow_int(1.0 - q, nm1 * k, thr)
        * (1.0 + one_m_a_nm1 * one_m_a_k / q)
}

/// `v_finite` recomputed from the inclusion-exclusion expansion
/// `(1-ε)·Σ_i P(F_i) - (1-ε)²·Σ_j ε^{j-1} Σ_i P(F_i F_{i+j})`, with the
/// pairwise terms evaluated literally. Kept deliberately naive so it stays
/// an independent check on the closed form.
pub fn v_finite_incl_excl(model: &FiniteModel) -> f64 {
    v_finite_incl_excl_with(model, &EvalOptions::default())
}

pub fn v_finite_incl_excl_with(model: &FiniteModel, opts: &EvalOptions) -> f64 {
    let q = model.q();
    let eps = model.epsilon();
    let k = model.k_retx() as u64;
    let nm1 = (model.n_users() - 1) as u64;
    let thr = opts.log_pow_threshold;
    let a = 1.0 - q;

    // P(F_0) = C with C = [(1-q)^K/(1+q)]^{N-1}; P(F_i) = C (1-q)^{i-1}.
    let c = pow_int(pow_int(a, k, thr) / (1.0 + q), nm1, thr);
    let mut singles = c;
    let mut apow = 1.0; // (1-q)^{i-1}
    for _i in 1..=k {
        singles += c * apow;
        apow *= a;
    }

    // P(F_i F_{i+j}) = (1+q)^{-(N-1)} (1-q)^{(N-1)(K+j)} (1-q)^{i+j-1}.
    let inv1q_pow = pow_int(1.0 / (1.0 + q), nm1, thr);
    let mut pairs = 0.0;
    let mut eps_pow = 1.0; // eps^{j-1}
    for j in 1..=k {
        let shared = inv1q_pow * pow_int(a, nm1 * (k + j), thr);
        let mut inner = 0.0;
        let mut tail = pow_int(a, j - 1, thr); // (1-q)^{i+j-1} at i = 0
        for _i in 0..=(k - j) {
            inner += tail;
            tail *= a;
        }
        pairs += eps_pow * shared * inner;
        eps_pow *= eps;
    }

    (1.0 - eps) * singles - (1.0 - eps) * (1.0 - eps) * pairs
}

/// Delivery probability in the infinite-user (Poisson) model.
pub fn v_infinite(model: &PoissonModel) -> f64 {
    let lam = model.lambda();
    let eps = model.epsilon();
    let k1 = (model.k_retx() as u64 + 1) as f64;

    let e_lam = exp(-lam);
    let ln_z = ln(eps) - lam; // ln(eps e^{-lam}); -inf for eps = 0
    let one_m_z = -expm1(ln_z);
    let b = (1.0 - eps) / one_m_z;

    let one_m_e_lam = -expm1(-lam);
    let one_m_z_k1 = -expm1(k1 * ln_z);

    b * exp(-k1 * lam) * (one_m_e_lam * k1 + b * e_lam * one_m_z_k1)
}

/// System delivery rate `W∞ = λ · V∞`.
pub fn w_infinite(model: &PoissonModel) -> f64 {
    model.lambda() * v_infinite(model)
}

/// `v_infinite` recomputed from the inclusion-exclusion expansion with
/// Poisson pairwise probabilities `P(F_i F_{i+j}) = e^{-λ(K+j+1)}`: the two
/// success slots force every slot of `[i-K, i+j]` — `K+j+1` of them — to be
/// free of competing arrivals.
pub fn v_infinite_incl_excl(model: &PoissonModel) -> f64 {
    let lam = model.lambda();
    let eps = model.epsilon();
    let k = model.k_retx() as u64;

    let single = exp(-lam * (k + 1) as f64);
    let mut singles = 0.0;
    for _i in 0..=k {
        singles += single;
    }

    let mut pairs = 0.0;
    let mut eps_pow = 1.0;
    for j in 1..=k {
        let p = exp(-lam * (k + j + 1) as f64);
        let mut inner = 0.0;
        for _i in 0..=(k - j) {
            inner += p;
        }
        pairs += eps_pow * inner;
        eps_pow *= eps;
    }

    (1.0 - eps) * singles - (1.0 - eps) * (1.0 - eps) * pairs
}

/// Helper for comparing two probability routes in tests and reports.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = math::abs(a).max(math::abs(b)).max(f64::MIN_POSITIVE);
    math::abs(a - b) / scale
}
