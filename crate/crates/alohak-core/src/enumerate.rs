//! Exhaustive ground-truth evaluation of the delivery probability on small
//! instances.
//!
//! This walks the process directly — every Markov-weighted state path of the
//! other users, every arrival pattern of the tagged user, every noise-bit
//! assignment — and therefore shares no algebra with the closed forms in
//! [`crate::analytic`]. It is the reference the closed forms are tested
//! against.

use crate::model::{FiniteModel, StationaryDistribution, Variant};
use alloc::vec::Vec;
use thiserror::Error;

/// Largest instance the enumeration accepts.
pub const MAX_ENUM_USERS: u32 = 3;
pub const MAX_ENUM_K: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("enumeration supports at most {MAX_ENUM_USERS} users, got {0}")]
    TooManyUsers(u32),
    #[error("enumeration supports at most K = {MAX_ENUM_K}, got {0}")]
    KTooLarge(u32),
}

/// One fully-resolved state path of an interfering user: its probability
/// weight and the slots in `0..=K` where it transmits, as a bitmask.
#[derive(Clone, Copy)]
struct OtherPath {
    weight: f64,
    busy_mask: u16,
}

/// Exact delivery probability of a message generated at slot 0, by summing
/// over the complete joint outcome space.
///
/// Other users' paths run over slots `-2K..K` with a stationary start at
/// slot `-2K-1`: an arrival as early as `-K` can still collide with the
/// tagged transmission at slot 0, and the extra history just marginalizes
/// out. The tagged user's own later arrivals start at slot 2 (`p10 = 1`
/// forces slot 1 idle) and, in the preemptive variant, truncate the
/// message's window.
pub fn exact_v_enumerate(model: &FiniteModel, variant: Variant) -> Result<f64, EnumerateError> {
    if model.n_users() > MAX_ENUM_USERS {
        return Err(EnumerateError::TooManyUsers(model.n_users()));
    }
    if model.k_retx() > MAX_ENUM_K {
        return Err(EnumerateError::KTooLarge(model.k_retx()));
    }

    let q = model.q();
    let eps = model.epsilon();
    let k = model.k_retx() as i64;
    let others = model.n_users() as usize - 1;

    let paths = other_user_paths(q, k);
    let tagged = tagged_patterns(q, k);

    // Joint enumeration over the independent interferers.
    let mut total = 0.0;
    let mut stack_mask = [0_u16; MAX_ENUM_USERS as usize];
    let mut stack_weight = [1.0_f64; MAX_ENUM_USERS as usize + 1];
    enumerate_joint(
        &paths,
        others,
        0,
        &mut stack_mask,
        &mut stack_weight,
        &mut |others_mask, others_weight| {
            for t in &tagged {
                let window_end = match variant {
                    Variant::Preemptive => t.first_arrival.map_or(k, |s| s - 1),
                    Variant::History => k,
                };
                let window: u16 = ((1u32 << (window_end + 1)) - 1) as u16;
                let success_slots = window & !others_mask;
                total += others_weight
                    * t.weight
                    * prob_some_noise_pass(success_slots.count_ones(), eps);
            }
        },
    );
    Ok(total)
}

fn enumerate_joint(
    paths: &[OtherPath],
    others: usize,
    depth: usize,
    masks: &mut [u16; MAX_ENUM_USERS as usize],
    weights: &mut [f64; MAX_ENUM_USERS as usize + 1],
    visit: &mut impl FnMut(u16, f64),
) {
    if depth == others {
        let mut mask = 0_u16;
        for m in masks.iter().take(others) {
            mask |= m;
        }
        visit(mask, weights[others]);
        return;
    }
    for p in paths {
        masks[depth] = p.busy_mask;
        weights[depth + 1] = weights[depth] * p.weight;
        enumerate_joint(paths, others, depth + 1, masks, weights, visit);
    }
}

/// All state paths of one interfering user over slots `-2K-1..=K`, with the
/// stationary weight at the first slot and chain-transition weights after.
fn other_user_paths(q: f64, k: i64) -> Vec<OtherPath> {
    let lo = -2 * k - 1;
    let n_slots = (k - lo + 1) as usize;
    let pi = StationaryDistribution::for_q(q);

    let mut out = Vec::new();
    let mut states = alloc::vec![false; n_slots];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        q: f64,
        k: i64,
        lo: i64,
        idx: usize,
        n_slots: usize,
        weight: f64,
        states: &mut [bool],
        out: &mut Vec<OtherPath>,
    ) {
        if idx == n_slots {
            // transmit at slot n iff some arrival lies in [n-K, n]
            let mut mask = 0_u16;
            for n in 0..=k {
                let from = (n - k).max(lo);
                for t in from..=n {
                    if states[(t - lo) as usize] {
                        mask |= 1 << n;
                        break;
                    }
                }
            }
            out.push(OtherPath {
                weight,
                busy_mask: mask,
            });
            return;
        }
        let prev = idx > 0 && states[idx - 1];
        if prev {
            // p11 = 0: forced idle
            states[idx] = false;
            rec(q, k, lo, idx + 1, n_slots, weight, states, out);
        } else {
            states[idx] = false;
            rec(q, k, lo, idx + 1, n_slots, weight * (1.0 - q), states, out);
            states[idx] = true;
            rec(q, k, lo, idx + 1, n_slots, weight * q, states, out);
        }
    }

    // First slot carries the stationary marginal instead of a transition.
    states[0] = false;
    rec(q, k, lo, 1, n_slots, pi.pi0, &mut states, &mut out);
    states[0] = true;
    rec(q, k, lo, 1, n_slots, pi.pi1, &mut states, &mut out);
    out
}

struct TaggedPattern {
    weight: f64,
    first_arrival: Option<i64>,
}

/// Arrival patterns of the tagged user after its slot-0 activation. Slot 1
/// is forced idle, so candidate arrivals live on slots `2..=K` with no two
/// adjacent.
fn tagged_patterns(q: f64, k: i64) -> Vec<TaggedPattern> {
    let mut out = Vec::new();
    fn rec(
        q: f64,
        slot: i64,
        k: i64,
        prev_active: bool,
        weight: f64,
        first: Option<i64>,
        out: &mut Vec<TaggedPattern>,
    ) {
        if slot > k {
            out.push(TaggedPattern {
                weight,
                first_arrival: first,
            });
            return;
        }
        if prev_active {
            rec(q, slot + 1, k, false, weight, first, out);
        } else {
            rec(q, slot + 1, k, false, weight * (1.0 - q), first, out);
            rec(q, slot + 1, k, true, weight * q, first.or(Some(slot)), out);
        }
    }
    rec(q, 2, k, false, 1.0, None, &mut out);
    out
}

/// P(at least one of `successes` independent noise draws passes), summed
/// literally over every pass/fail assignment.
fn prob_some_noise_pass(successes: u32, eps: f64) -> f64 {
    let mut total = 0.0;
    for bits in 1_u32..(1 << successes) {
        let passes = bits.count_ones();
        total += fpow(1.0 - eps, passes) * fpow(eps, successes - passes);
    }
    total
}

fn fpow(base: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{relative_gap, v_finite, v_finite_history};
    use crate::model::FiniteModel;

    fn fm(n: u32, q: f64, eps: f64, k: u32) -> FiniteModel {
        FiniteModel::new(n, q, eps, k).unwrap()
    }

    #[test]
    fn rejects_large_instances() {
        assert_eq!(
            exact_v_enumerate(&fm(4, 0.1, 0.0, 0), Variant::Preemptive),
            Err(EnumerateError::TooManyUsers(4))
        );
        assert_eq!(
            exact_v_enumerate(&fm(2, 0.1, 0.0, 4), Variant::Preemptive),
            Err(EnumerateError::KTooLarge(4))
        );
    }

    #[test]
    fn single_user_single_attempt() {
        let v = exact_v_enumerate(&fm(1, 0.3, 0.25, 0), Variant::Preemptive).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn noise_pass_enumeration_closes() {
        // The literal bit loop must equal 1 - eps^s.
        for s in 0..5 {
            for &eps in &[0.0, 0.3, 0.99] {
                let lit = prob_some_noise_pass(s, eps);
                let closed = 1.0 - fpow(eps, s);
                assert!((lit - closed).abs() < 1e-14, "s={s} eps={eps}");
            }
        }
    }

    #[test]
    fn tagged_pattern_weights_sum_to_one() {
        for k in 0..=3 {
            let total: f64 = tagged_patterns(0.3, k).iter().map(|p| p.weight).sum();
            assert!((total - 1.0).abs() < 1e-14, "K={k}");
        }
    }

    #[test]
    fn other_path_weights_sum_to_one() {
        for k in 0..=3 {
            let total: f64 = other_user_paths(0.2, k).iter().map(|p| p.weight).sum();
            assert!((total - 1.0).abs() < 1e-12, "K={k}");
        }
    }

    #[test]
    fn matches_closed_forms_spot() {
        let m = fm(2, 0.1, 0.2, 2);
        let e = exact_v_enumerate(&m, Variant::Preemptive).unwrap();
        assert!(relative_gap(e, v_finite(&m)) < 1e-10, "{e}");
        let eh = exact_v_enumerate(&m, Variant::History).unwrap();
        assert!(relative_gap(eh, v_finite_history(&m)) < 1e-10, "{eh}");

        let m = fm(3, 0.5, 0.7, 3);
        let e = exact_v_enumerate(&m, Variant::Preemptive).unwrap();
        assert!(relative_gap(e, v_finite(&m)) < 1e-10, "{e}");
    }
}
