//! Slot-synchronous Monte Carlo simulation of the random-access protocol,
//! for both the finite-user Markov sources and the Poisson arrival limit.
//!
//! Replications run on independent ChaCha8 streams keyed by
//! `(seed, replication, lane)`, so results are reproducible bit for bit and
//! independent of how replications are scheduled across threads. Standard
//! errors come from batch means across replications, since message outcomes
//! within one replication are temporally correlated.

use crate::analytic::{
    v_finite, v_finite_history, v_infinite, w_finite, w_finite_history, w_infinite,
};
use crate::math::{self, sqrt};
use crate::model::{FiniteModel, ModelError, PoissonModel, Variant};
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Horizons below this produce estimates too noisy to mean anything;
/// configuration rejects them.
pub const MIN_HORIZON_SLOTS: u64 = 1000;

/// Two-sided z-score bound used by [`compare_with_analytic`].
pub const Z_PASS_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SimError {
    #[error("horizon must be at least {MIN_HORIZON_SLOTS} slots, got {0}")]
    HorizonTooShort(u64),
    #[error("warmup ({0} slots) must be shorter than the horizon ({1})")]
    WarmupTooLong(u64, u64),
    #[error("replications must be at least 1")]
    NoReplications,
    #[error("operation requires a finite-user model")]
    ExpectedFinite,
    #[error("operation requires a Poisson model")]
    ExpectedPoisson,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which system the simulation drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimModel {
    Finite(FiniteModel),
    Poisson(PoissonModel),
}

impl SimModel {
    pub fn k_retx(&self) -> u32 {
        match self {
            SimModel::Finite(m) => m.k_retx(),
            SimModel::Poisson(m) => m.k_retx(),
        }
    }

    /// Expected message arrivals per slot.
    pub fn arrival_rate(&self) -> f64 {
        match self {
            SimModel::Finite(m) => m.arrival_rate(),
            SimModel::Poisson(m) => m.lambda(),
        }
    }
}

/// Validated simulation run description. The RNG seed is always explicit;
/// there is no ambient-entropy fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    model: SimModel,
    variant: Variant,
    horizon_slots: u64,
    warmup_slots: u64,
    seed: u64,
    replications: u32,
}

impl SimConfig {
    pub fn new(
        model: SimModel,
        variant: Variant,
        horizon_slots: u64,
        warmup_slots: u64,
        seed: u64,
        replications: u32,
    ) -> Result<Self, SimError> {
        if horizon_slots < MIN_HORIZON_SLOTS {
            return Err(SimError::HorizonTooShort(horizon_slots));
        }
        if warmup_slots >= horizon_slots {
            return Err(SimError::WarmupTooLong(warmup_slots, horizon_slots));
        }
        if replications == 0 {
            return Err(SimError::NoReplications);
        }
        Ok(Self {
            model,
            variant,
            horizon_slots,
            warmup_slots,
            seed,
            replications,
        })
    }

    /// Default warmup of `10·(K+1)` slots.
    pub fn default_warmup(k_retx: u32) -> u64 {
        10 * (k_retx as u64 + 1)
    }

    pub fn model(&self) -> &SimModel {
        &self.model
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn horizon_slots(&self) -> u64 {
        self.horizon_slots
    }

    pub fn warmup_slots(&self) -> u64 {
        self.warmup_slots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replications(&self) -> u32 {
        self.replications
    }
}

/// Channel outcome of one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// Nobody transmitted.
    Idle,
    /// Two or more simultaneous transmissions; nothing received.
    Conflict,
    /// Exactly one transmission, corrupted by noise.
    Success,
    /// Exactly one transmission, received intact.
    Delivered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotOutcome {
    pub kind: SlotKind,
    pub transmitter_count: u32,
}

impl SlotOutcome {
    /// Classify a slot. `noise_pass` must be `Some` exactly when one user
    /// transmitted (noise is only drawn on success slots).
    pub fn classify(transmitter_count: u32, noise_pass: Option<bool>) -> Self {
        debug_assert_eq!(noise_pass.is_some(), transmitter_count == 1);
        let kind = match (transmitter_count, noise_pass) {
            (0, _) => SlotKind::Idle,
            (1, Some(true)) => SlotKind::Delivered,
            (1, _) => SlotKind::Success,
            (_, _) => SlotKind::Conflict,
        };
        SlotOutcome {
            kind,
            transmitter_count,
        }
    }
}

/// Per-kind slot counts over all simulated slots. `success` counts every
/// single-transmitter slot, delivered or not, so `delivered <= success` and
/// `idle + conflict + success` equals the simulated slot total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlotTallies {
    pub idle: u64,
    pub conflict: u64,
    pub success: u64,
    pub delivered: u64,
}

impl SlotTallies {
    fn record(&mut self, kind: SlotKind) {
        match kind {
            SlotKind::Idle => self.idle += 1,
            SlotKind::Conflict => self.conflict += 1,
            SlotKind::Success => self.success += 1,
            SlotKind::Delivered => {
                self.success += 1;
                self.delivered += 1;
            }
        }
    }

    fn merge(&mut self, other: &SlotTallies) {
        self.idle += other.idle;
        self.conflict += other.conflict;
        self.success += other.success;
        self.delivered += other.delivered;
    }
}

/// Monte Carlo tallies and estimates.
///
/// Only messages whose full potential window `[arrival, arrival+K]` lies
/// after warmup and inside the horizon enter `arrivals` and
/// `delivered_messages`. `w_hat` divides by the post-warmup slot count, so
/// it carries an O(K/horizon) edge deficit — negligible against its
/// standard error for any sane horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryStats {
    /// Countable message arrivals over all replications.
    pub arrivals: u64,
    /// Countable messages delivered at least once.
    pub delivered_messages: u64,
    /// Simulated slots over all replications (horizon × replications).
    pub total_slots: u64,
    /// Warmup slots over all replications.
    pub warmup_slots: u64,
    /// `delivered_messages / arrivals`.
    pub v_hat: f64,
    /// `delivered_messages / (total_slots - warmup_slots)`.
    pub w_hat: f64,
    pub v_stderr: f64,
    pub w_stderr: f64,
    pub slot_tallies: SlotTallies,
    /// Arrival count per user (finite model; empty for Poisson runs).
    pub per_user_arrivals: Vec<u64>,
    /// Messages whose retransmissions were cut short by a newer arrival
    /// (preemptive variant only).
    pub preemptions: u64,
    /// Raw per-replication tallies, in replication order; these are the
    /// batches behind `v_stderr`/`w_stderr`.
    pub replication_summaries: Vec<ReplicationSummary>,
}

/// Tallies of a single replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationSummary {
    pub replication: u32,
    pub arrivals: u64,
    pub delivered_messages: u64,
    pub v_hat: f64,
    pub w_hat: f64,
}

/// Simulation next to its matching closed form, with z-scores at the
/// [`Z_PASS_THRESHOLD`] level.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub stats: DeliveryStats,
    pub analytic_v: f64,
    pub analytic_w: f64,
    pub z_v: f64,
    pub z_w: f64,
    pub pass: bool,
}

#[derive(Clone)]
struct Msg {
    arrival: u64,
    countable: bool,
    delivered: bool,
}

struct RepTally {
    arrivals: u64,
    delivered: u64,
    slots: SlotTallies,
    per_user_arrivals: Vec<u64>,
    preemptions: u64,
}

impl RepTally {
    fn new(n_users: usize) -> Self {
        Self {
            arrivals: 0,
            delivered: 0,
            slots: SlotTallies::default(),
            per_user_arrivals: vec![0; n_users],
            preemptions: 0,
        }
    }

    fn mark(&mut self, msg: &mut Msg) {
        if !msg.delivered {
            msg.delivered = true;
            if msg.countable {
                self.delivered += 1;
            }
        }
    }
}

fn stream_rng(seed: u64, replication: u32, lane: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((replication as u64) << 32) | lane as u64);
    rng
}

/// Exact Poisson sample by the product-of-uniforms method. Cheap for the
/// per-slot rates this system runs at (expected 1 + λ uniforms per draw).
fn poisson_draw<R: Rng>(rng: &mut R, exp_neg_lambda: f64) -> u32 {
    let mut product = 1.0;
    let mut count = 0;
    loop {
        product *= rng.random::<f64>();
        if product <= exp_neg_lambda {
            return count;
        }
        count += 1;
    }
}

/// Simulate the finite-user system described by the configuration.
pub fn run_finite(config: &SimConfig) -> Result<DeliveryStats, SimError> {
    let SimModel::Finite(model) = config.model else {
        return Err(SimError::ExpectedFinite);
    };
    let tallies = run_replications(config, |rep| finite_replication(&model, config, rep));
    Ok(merge(config, tallies))
}

/// Simulate the Poisson-arrival system described by the configuration.
/// The variant is irrelevant here: each message has its own source, so
/// preemption cannot occur.
pub fn run_poisson(config: &SimConfig) -> Result<DeliveryStats, SimError> {
    let SimModel::Poisson(model) = config.model else {
        return Err(SimError::ExpectedPoisson);
    };
    let tallies = run_replications(config, |rep| poisson_replication(&model, config, rep));
    Ok(merge(config, tallies))
}

/// Run the matching simulation and closed form, and compare at the 3σ
/// level for both V and W.
pub fn compare_with_analytic(config: &SimConfig) -> Result<ComparisonReport, SimError> {
    let (analytic_v, analytic_w, stats) = match (&config.model, config.variant) {
        (SimModel::Finite(m), Variant::Preemptive) => {
            (v_finite(m), w_finite(m).value, run_finite(config)?)
        }
        (SimModel::Finite(m), Variant::History) => (
            v_finite_history(m),
            w_finite_history(m).value,
            run_finite(config)?,
        ),
        (SimModel::Poisson(m), _) => (v_infinite(m), w_infinite(m), run_poisson(config)?),
    };
    let z_v = z_score(stats.v_hat, analytic_v, stats.v_stderr);
    let z_w = z_score(stats.w_hat, analytic_w, stats.w_stderr);
    let pass = math::abs(z_v) <= Z_PASS_THRESHOLD && math::abs(z_w) <= Z_PASS_THRESHOLD;
    Ok(ComparisonReport {
        stats,
        analytic_v,
        analytic_w,
        z_v,
        z_w,
        pass,
    })
}

fn z_score(estimate: f64, reference: f64, stderr: f64) -> f64 {
    if stderr > 0.0 {
        (estimate - reference) / stderr
    } else if estimate == reference {
        0.0
    } else if estimate > reference {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

fn finite_replication(model: &FiniteModel, config: &SimConfig, rep: u32) -> RepTally {
    let n = model.n_users() as usize;
    let q = model.q();
    let k = model.k_retx() as u64;
    let pi1 = model.stationary().pi1;
    let pass_p = 1.0 - model.epsilon();
    let horizon = config.horizon_slots;
    let warmup = config.warmup_slots;
    let variant = config.variant;

    let mut chains: Vec<ChaCha8Rng> = (0..n)
        .map(|u| stream_rng(config.seed, rep, u as u32))
        .collect();
    let mut noise = stream_rng(config.seed, rep, n as u32);

    let mut state = vec![false; n];
    let mut last_arrival: Vec<Option<u64>> = vec![None; n];
    // Preemptive bookkeeping: at most one live message per user.
    let mut current: Vec<Option<Msg>> = vec![None; n];
    // History bookkeeping: all messages whose window is still open.
    let mut open: Vec<VecDeque<Msg>> = vec![VecDeque::new(); n];

    let mut tally = RepTally::new(n);

    for slot in 0..horizon {
        for u in 0..n {
            let active = if slot == 0 {
                chains[u].random::<f64>() < pi1
            } else if state[u] {
                false // p11 = 0: an active slot is always followed by idle
            } else {
                chains[u].random::<f64>() < q
            };
            state[u] = active;
            if !active {
                continue;
            }
            tally.per_user_arrivals[u] += 1;
            let countable = slot >= warmup && slot + k < horizon;
            if countable {
                tally.arrivals += 1;
            }
            let msg = Msg {
                arrival: slot,
                countable,
                delivered: false,
            };
            match variant {
                Variant::Preemptive => {
                    if let Some(old) = current[u].replace(msg) {
                        if old.arrival + k >= slot {
                            tally.preemptions += 1;
                        }
                    }
                }
                Variant::History => open[u].push_back(msg),
            }
            last_arrival[u] = Some(slot);
        }

        if variant == Variant::History {
            for dq in open.iter_mut() {
                while dq.front().is_some_and(|m| m.arrival + k < slot) {
                    dq.pop_front();
                }
            }
        }

        let mut transmitters = 0_u32;
        let mut sender = usize::MAX;
        for (u, last) in last_arrival.iter().enumerate() {
            if last.is_some_and(|t| slot - t <= k) {
                transmitters += 1;
                sender = u;
            }
        }

        let noise_pass = (transmitters == 1).then(|| noise.random::<f64>() < pass_p);
        let outcome = SlotOutcome::classify(transmitters, noise_pass);
        tally.slots.record(outcome.kind);
        if outcome.kind == SlotKind::Delivered {
            match variant {
                Variant::Preemptive => {
                    // The transmitter's live message is the one from
                    // last_arrival; its window necessarily covers this slot.
                    let msg = current[sender]
                        .as_mut()
                        .expect("transmitting user has a message");
                    tally.mark(msg);
                }
                Variant::History => {
                    // Every open message of the sender is inside its window
                    // here; the state vector delivers all of them at once.
                    for msg in open[sender].iter_mut() {
                        tally.mark(msg);
                    }
                }
            }
        }
    }
    tally
}

fn poisson_replication(model: &PoissonModel, config: &SimConfig, rep: u32) -> RepTally {
    let lam = model.lambda();
    let k = model.k_retx() as u64;
    let pass_p = 1.0 - model.epsilon();
    let exp_neg_lambda = math::exp(-lam);
    let horizon = config.horizon_slots;
    let warmup = config.warmup_slots;

    let mut arrivals_rng = stream_rng(config.seed, rep, 0);
    let mut noise = stream_rng(config.seed, rep, 1);

    // Sliding window of the last K+1 slots: how many messages arrived in
    // each, and the message id when that count is exactly one.
    let ring_len = (k + 1) as usize;
    let mut ring_count = vec![0_u32; ring_len];
    let mut ring_solo = vec![None::<u64>; ring_len];
    let mut window_total = 0_u64;

    let mut open: VecDeque<Msg> = VecDeque::new();
    let mut base_id = 0_u64;
    let mut next_id = 0_u64;

    let mut tally = RepTally::new(0);

    for slot in 0..horizon {
        let idx = (slot % (k + 1)) as usize;
        window_total -= ring_count[idx] as u64;

        let count = poisson_draw(&mut arrivals_rng, exp_neg_lambda);
        let countable = slot >= warmup && slot + k < horizon;
        if countable {
            tally.arrivals += count as u64;
        }
        ring_solo[idx] = (count == 1).then_some(next_id);
        ring_count[idx] = count;
        window_total += count as u64;
        for _ in 0..count {
            open.push_back(Msg {
                arrival: slot,
                countable,
                delivered: false,
            });
            next_id += 1;
        }

        while open.front().is_some_and(|m| m.arrival + k < slot) {
            open.pop_front();
            base_id += 1;
        }

        let transmitters = window_total.min(u32::MAX as u64) as u32;
        let noise_pass = (transmitters == 1).then(|| noise.random::<f64>() < pass_p);
        let outcome = SlotOutcome::classify(transmitters, noise_pass);
        tally.slots.record(outcome.kind);
        if outcome.kind == SlotKind::Delivered {
            let id = ring_solo
                .iter()
                .zip(&ring_count)
                .find_map(|(solo, &c)| (c == 1).then_some(*solo))
                .flatten()
                .expect("single transmitter implies a solo arrival slot");
            tally.mark(&mut open[(id - base_id) as usize]);
        }
    }
    tally
}

fn run_replications(config: &SimConfig, runner: impl Fn(u32) -> RepTally + Sync) -> Vec<RepTally> {
    let reps = config.replications;

    #[cfg(feature = "std")]
    {
        let threads = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(reps as usize);
        if threads > 1 {
            let mut out: Vec<Option<RepTally>> = (0..reps).map(|_| None).collect();
            std::thread::scope(|scope| {
                let mut handles = Vec::with_capacity(threads);
                for t in 0..threads {
                    let runner = &runner;
                    handles.push(scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut r = t as u32;
                        while r < reps {
                            local.push((r, runner(r)));
                            r += threads as u32;
                        }
                        local
                    }));
                }
                for handle in handles {
                    for (r, tally) in handle.join().expect("replication worker panicked") {
                        out[r as usize] = Some(tally);
                    }
                }
            });
            return out
                .into_iter()
                .map(|t| t.expect("all replications filled"))
                .collect();
        }
    }

    (0..reps).map(runner).collect()
}

fn merge(config: &SimConfig, reps: Vec<RepTally>) -> DeliveryStats {
    let r = reps.len();
    let counting_slots = (config.horizon_slots - config.warmup_slots) as f64;

    let mut arrivals = 0_u64;
    let mut delivered = 0_u64;
    let mut slot_tallies = SlotTallies::default();
    let mut preemptions = 0_u64;
    let n_users = reps.first().map_or(0, |t| t.per_user_arrivals.len());
    let mut per_user_arrivals = vec![0_u64; n_users];
    for t in &reps {
        arrivals += t.arrivals;
        delivered += t.delivered;
        slot_tallies.merge(&t.slots);
        preemptions += t.preemptions;
        for (acc, &a) in per_user_arrivals.iter_mut().zip(&t.per_user_arrivals) {
            *acc += a;
        }
    }

    let v_hat = if arrivals > 0 {
        delivered as f64 / arrivals as f64
    } else {
        0.0
    };
    let w_hat = delivered as f64 / (counting_slots * r as f64);

    // Batch means across replications; single-replication runs fall back to
    // the binomial / Poisson approximations.
    let v_batches: Vec<f64> = reps
        .iter()
        .filter(|t| t.arrivals > 0)
        .map(|t| t.delivered as f64 / t.arrivals as f64)
        .collect();
    let v_stderr = if v_batches.len() >= 2 {
        batch_stderr(&v_batches)
    } else if arrivals > 0 {
        sqrt(v_hat * (1.0 - v_hat) / arrivals as f64)
    } else {
        0.0
    };

    let w_batches: Vec<f64> = reps
        .iter()
        .map(|t| t.delivered as f64 / counting_slots)
        .collect();
    let w_stderr = if w_batches.len() >= 2 {
        batch_stderr(&w_batches)
    } else {
        sqrt(delivered as f64) / counting_slots
    };

    let replication_summaries = reps
        .iter()
        .enumerate()
        .map(|(i, t)| ReplicationSummary {
            replication: i as u32,
            arrivals: t.arrivals,
            delivered_messages: t.delivered,
            v_hat: if t.arrivals > 0 {
                t.delivered as f64 / t.arrivals as f64
            } else {
                0.0
            },
            w_hat: t.delivered as f64 / counting_slots,
        })
        .collect();

    DeliveryStats {
        arrivals,
        delivered_messages: delivered,
        total_slots: config.horizon_slots * r as u64,
        warmup_slots: config.warmup_slots * r as u64,
        v_hat,
        w_hat,
        v_stderr,
        w_stderr,
        slot_tallies,
        per_user_arrivals,
        preemptions,
        replication_summaries,
    }
}

/// Standard error of the mean of per-replication estimates.
fn batch_stderr(batches: &[f64]) -> f64 {
    let n = batches.len() as f64;
    let mean = batches.iter().sum::<f64>() / n;
    let var = batches.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (n - 1.0);
    sqrt(var / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::too_many_arguments)]
    fn finite_cfg(
        n: u32,
        q: f64,
        eps: f64,
        k: u32,
        variant: Variant,
        horizon: u64,
        seed: u64,
        reps: u32,
    ) -> SimConfig {
        let model = FiniteModel::new(n, q, eps, k).unwrap();
        SimConfig::new(
            SimModel::Finite(model),
            variant,
            horizon,
            SimConfig::default_warmup(k),
            seed,
            reps,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let model = SimModel::Finite(FiniteModel::new(2, 0.1, 0.2, 1).unwrap());
        assert_eq!(
            SimConfig::new(model, Variant::Preemptive, 10, 0, 1, 1),
            Err(SimError::HorizonTooShort(10))
        );
        assert_eq!(
            SimConfig::new(model, Variant::Preemptive, 1000, 1000, 1, 1),
            Err(SimError::WarmupTooLong(1000, 1000))
        );
        assert_eq!(
            SimConfig::new(model, Variant::Preemptive, 1000, 0, 1, 0),
            Err(SimError::NoReplications)
        );
    }

    #[test]
    fn model_kind_is_checked() {
        let cfg = finite_cfg(2, 0.1, 0.2, 1, Variant::Preemptive, 1000, 7, 1);
        assert_eq!(run_poisson(&cfg), Err(SimError::ExpectedPoisson));
        let pcfg = SimConfig::new(
            SimModel::Poisson(PoissonModel::new(0.1, 0.2, 1).unwrap()),
            Variant::Preemptive,
            1000,
            0,
            7,
            1,
        )
        .unwrap();
        assert_eq!(run_finite(&pcfg), Err(SimError::ExpectedFinite));
    }

    #[test]
    fn classify_is_exclusive() {
        assert_eq!(SlotOutcome::classify(0, None).kind, SlotKind::Idle);
        assert_eq!(
            SlotOutcome::classify(1, Some(false)).kind,
            SlotKind::Success
        );
        assert_eq!(
            SlotOutcome::classify(1, Some(true)).kind,
            SlotKind::Delivered
        );
        assert_eq!(SlotOutcome::classify(2, None).kind, SlotKind::Conflict);
        assert_eq!(SlotOutcome::classify(9, None).kind, SlotKind::Conflict);
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let cfg = finite_cfg(3, 0.05, 0.3, 2, Variant::Preemptive, 20_000, 42, 4);
        let a = run_finite(&cfg).unwrap();
        let b = run_finite(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serial_and_threaded_merges_agree() {
        let cfg = finite_cfg(2, 0.05, 0.2, 1, Variant::History, 10_000, 5, 6);
        let model = match cfg.model {
            SimModel::Finite(m) => m,
            _ => unreachable!(),
        };
        let serial: Vec<RepTally> = (0..cfg.replications)
            .map(|r| finite_replication(&model, &cfg, r))
            .collect();
        let expected = merge(&cfg, serial);
        let threaded = run_finite(&cfg).unwrap();
        assert_eq!(expected, threaded);
    }

    #[test]
    fn k0_variants_coincide_exactly() {
        // Same seed, K = 0: attribution is identical, so the two variants
        // are the same process realization.
        let p = run_finite(&finite_cfg(
            3,
            0.1,
            0.4,
            0,
            Variant::Preemptive,
            50_000,
            9,
            2,
        ))
        .unwrap();
        let h = run_finite(&finite_cfg(3, 0.1, 0.4, 0, Variant::History, 50_000, 9, 2)).unwrap();
        assert_eq!(p, h);
    }

    #[test]
    fn noiseless_single_user_delivers_everything() {
        let cfg = finite_cfg(1, 0.3, 0.0, 0, Variant::Preemptive, 100_000, 1, 1);
        let report = compare_with_analytic(&cfg).unwrap();
        assert_eq!(report.stats.v_hat, 1.0);
        assert_eq!(report.z_v, 0.0);
        assert!(report.pass);
        assert_eq!(report.stats.slot_tallies.conflict, 0);
        assert_eq!(report.stats.preemptions, 0);
    }

    #[test]
    fn slot_tallies_partition_the_horizon() {
        let cfg = finite_cfg(3, 0.2, 0.5, 2, Variant::Preemptive, 30_000, 11, 3);
        let stats = run_finite(&cfg).unwrap();
        let t = stats.slot_tallies;
        assert_eq!(t.idle + t.conflict + t.success, stats.total_slots);
        assert!(t.delivered <= t.success);
        assert_eq!(
            stats.v_hat,
            stats.delivered_messages as f64 / stats.arrivals as f64
        );
        let counting = (stats.total_slots - stats.warmup_slots) as f64;
        assert_eq!(stats.w_hat, stats.delivered_messages as f64 / counting);
    }

    #[test]
    fn preemptions_happen_and_are_counted() {
        // Aggressive arrivals with a long window: preemption is common.
        let cfg = finite_cfg(2, 0.3, 0.0, 3, Variant::Preemptive, 20_000, 3, 2);
        let stats = run_finite(&cfg).unwrap();
        assert!(stats.preemptions > 0);
        let h = run_finite(&finite_cfg(2, 0.3, 0.0, 3, Variant::History, 20_000, 3, 2)).unwrap();
        assert_eq!(h.preemptions, 0);
    }

    #[test]
    fn poisson_quick_agreement() {
        let cfg = SimConfig::new(
            SimModel::Poisson(PoissonModel::new(0.1, 0.3, 2).unwrap()),
            Variant::Preemptive,
            200_000,
            30,
            2024,
            5,
        )
        .unwrap();
        let report = compare_with_analytic(&cfg).unwrap();
        assert!(
            report.pass,
            "z_v = {}, z_w = {} (v_hat {} vs {})",
            report.z_v, report.z_w, report.stats.v_hat, report.analytic_v
        );
    }
}
