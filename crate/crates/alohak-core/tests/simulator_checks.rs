//! Statistical validation of the Monte Carlo engine against the process
//! definition and the closed forms. All bounds are 3σ with seeds fixed, so
//! the suite is deterministic.

use alohak_core::{
    compare_with_analytic, exact_v_enumerate, run_finite, run_poisson, FiniteModel, PoissonModel,
    SimConfig, SimModel, Variant,
};

fn finite_cfg(
    model: FiniteModel,
    variant: Variant,
    horizon: u64,
    seed: u64,
    reps: u32,
) -> SimConfig {
    SimConfig::new(
        SimModel::Finite(model),
        variant,
        horizon,
        SimConfig::default_warmup(model.k_retx()),
        seed,
        reps,
    )
    .unwrap()
}

#[test]
fn delivered_fraction_of_success_tracks_noise() {
    let eps = 0.35;
    let model = FiniteModel::new(2, 0.1, eps, 1).unwrap();
    let stats = run_finite(&finite_cfg(model, Variant::Preemptive, 200_000, 71, 2)).unwrap();
    let t = stats.slot_tallies;
    assert_eq!(t.idle + t.conflict + t.success, stats.total_slots);
    let frac = t.delivered as f64 / t.success as f64;
    let se = (eps * (1.0 - eps) / t.success as f64).sqrt();
    assert!(
        (frac - (1.0 - eps)).abs() <= 3.0 * se,
        "delivered/success = {frac}, expected {} ± {se}",
        1.0 - eps
    );
}

#[test]
fn per_user_activation_frequency_is_stationary() {
    let q = 0.08;
    let model = FiniteModel::new(4, q, 0.2, 2).unwrap();
    let cfg = finite_cfg(model, Variant::Preemptive, 150_000, 5150, 2);
    let stats = run_finite(&cfg).unwrap();
    let slots_per_user = stats.total_slots as f64;
    let pi1 = q / (1.0 + q);
    // The activation indicator is negatively autocorrelated, so the
    // binomial bound is conservative.
    let se = (pi1 * (1.0 - pi1) / slots_per_user).sqrt();
    for (u, &a) in stats.per_user_arrivals.iter().enumerate() {
        let rate = a as f64 / slots_per_user;
        assert!(
            (rate - pi1).abs() <= 3.0 * se,
            "user {u}: activation rate {rate}, expected {pi1} ± {se}"
        );
    }
}

#[test]
fn w_over_v_matches_arrival_rate() {
    let model = FiniteModel::new(3, 0.05, 0.3, 2).unwrap();
    let cfg = finite_cfg(model, Variant::Preemptive, 300_000, 99, 2);
    let stats = run_finite(&cfg).unwrap();
    let ratio = stats.w_hat / stats.v_hat;
    let rate = model.arrival_rate();
    // ratio = countable arrivals / counted slots; Poisson-style bound.
    let counting = (stats.total_slots - stats.warmup_slots) as f64;
    let se = (rate / counting).sqrt();
    assert!(
        (ratio - rate).abs() <= 3.0 * se,
        "w/v = {ratio}, arrival rate {rate} ± {se}"
    );

    let pois = PoissonModel::new(0.1, 0.3, 2).unwrap();
    let cfg = SimConfig::new(
        SimModel::Poisson(pois),
        Variant::Preemptive,
        300_000,
        30,
        99,
        2,
    )
    .unwrap();
    let stats = run_poisson(&cfg).unwrap();
    let ratio = stats.w_hat / stats.v_hat;
    let se = (0.1_f64 / (stats.total_slots - stats.warmup_slots) as f64).sqrt();
    assert!((ratio - 0.1).abs() <= 3.0 * se, "poisson w/v = {ratio}");
}

#[test]
fn history_sim_matches_enumeration() {
    let model = FiniteModel::new(3, 0.1, 0.2, 2).unwrap();
    let exact = exact_v_enumerate(&model, Variant::History).unwrap();
    let cfg = finite_cfg(model, Variant::History, 250_000, 12, 4);
    let stats = run_finite(&cfg).unwrap();
    assert!(
        (stats.v_hat - exact).abs() <= 3.0 * stats.v_stderr,
        "v_hat = {} ± {}, enumeration = {exact}",
        stats.v_hat,
        stats.v_stderr
    );
}

#[test]
fn preemption_heavy_sim_matches_enumeration() {
    // q = 0.5 with a long window: most messages get preempted, so this
    // pins the truncated-window semantics hard.
    let model = FiniteModel::new(3, 0.5, 0.7, 3).unwrap();
    let exact = exact_v_enumerate(&model, Variant::Preemptive).unwrap();
    let cfg = finite_cfg(model, Variant::Preemptive, 400_000, 618, 4);
    let stats = run_finite(&cfg).unwrap();
    assert!(stats.preemptions > stats.arrivals / 10, "expected heavy preemption");
    assert!(
        (stats.v_hat - exact).abs() <= 3.0 * stats.v_stderr,
        "v_hat = {} ± {}, enumeration = {exact}",
        stats.v_hat,
        stats.v_stderr
    );
}

#[test]
fn preemptive_sim_matches_closed_form() {
    let model = FiniteModel::new(2, 0.1, 0.5, 3).unwrap();
    let cfg = finite_cfg(model, Variant::Preemptive, 250_000, 2024, 4);
    let report = compare_with_analytic(&cfg).unwrap();
    assert!(
        report.pass,
        "z_v = {:.2}, z_w = {:.2} (v_hat {} vs {})",
        report.z_v, report.z_w, report.stats.v_hat, report.analytic_v
    );
}

#[test]
fn finite_large_population_approaches_poisson_without_preemption() {
    // N = 1000 with N·q/(1+q) = lambda: the finite run and the Poisson run
    // must agree within pooled error, and preemption must be negligible.
    let lam = 0.02;
    let n = 1000_u32;
    let q = lam / (n as f64 - lam);
    let fin_model = FiniteModel::new(n, q, 0.4, 7).unwrap();
    let fin = run_finite(&finite_cfg(fin_model, Variant::Preemptive, 150_000, 31, 4)).unwrap();

    let pois = PoissonModel::new(lam, 0.4, 7).unwrap();
    let pcfg = SimConfig::new(
        SimModel::Poisson(pois),
        Variant::Preemptive,
        150_000,
        80,
        31,
        4,
    )
    .unwrap();
    let poi = run_poisson(&pcfg).unwrap();

    let pooled = (fin.v_stderr.powi(2) + poi.v_stderr.powi(2)).sqrt();
    assert!(
        (fin.v_hat - poi.v_hat).abs() <= 3.0 * pooled,
        "finite v_hat {} vs poisson v_hat {} (pooled se {pooled})",
        fin.v_hat,
        poi.v_hat
    );

    let preempt_rate = fin.preemptions as f64 / fin.per_user_arrivals.iter().sum::<u64>() as f64;
    assert!(preempt_rate < 1e-3, "preemption rate {preempt_rate}");
    assert_eq!(poi.preemptions, 0);
}
