//! `alohak examples` — regenerate the five bundled reference scenarios:
//! recompute their headline numbers next to the cited reference values and
//! write the figure curves as CSV.
//!
//! The reference tables index non-delivery values by total transmissions
//! rather than by retransmission count: every cited value at index K >= 1
//! matches the closed forms at K-1, while the K = 0 entries match at K = 0,
//! and the cited ratios match the closed forms at the scan optimum. Each
//! scenario prints the computed value at the cited index, the value at the
//! scan optimum, and a note flagging the convention.

use crate::output::{emit, round_sig10};
use crate::CliError;
use alohak_core::{
    optimal_k_finite, optimal_k_infinite, v_finite, v_finite_history, v_infinite, FiniteModel,
    PoissonModel,
};
use clap::Args;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Args)]
pub struct ExamplesArgs {
    /// Run a single scenario (1..=5) instead of all five
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub only: Option<u8>,
    /// Directory for the generated curve CSV files
    #[arg(long, default_value = "examples-out")]
    pub out_dir: PathBuf,
}

pub fn run(args: ExamplesArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out_dir)?;
    let selected = |n: u8| args.only.is_none_or(|only| only == n);
    if selected(1) {
        example1(&args.out_dir)?;
    }
    if selected(2) {
        example2(&args.out_dir)?;
    }
    if selected(3) {
        example3(&args.out_dir)?;
    }
    if selected(4) {
        example4(&args.out_dir)?;
    }
    if selected(5) {
        example5(&args.out_dir)?;
    }
    Ok(())
}

struct Row {
    label: &'static str,
    reference: f64,
    computed: f64,
}

fn print_rows(title: &str, rows: &[Row]) {
    println!("{title}");
    println!(
        "  {:<34} {:>10} {:>14} {:>12}",
        "metric", "reference", "computed", "|diff|"
    );
    for r in rows {
        println!(
            "  {:<34} {:>10} {:>14.8} {:>12.2e}",
            r.label,
            r.reference,
            r.computed,
            (r.reference - r.computed).abs()
        );
    }
}

fn fin(n: u32, q: f64, eps: f64, k: u32) -> FiniteModel {
    FiniteModel::new(n, q, eps, k).expect("scenario parameters are valid")
}

fn poi(lam: f64, eps: f64, k: u32) -> PoissonModel {
    PoissonModel::new(lam, eps, k).expect("scenario parameters are valid")
}

fn non_delivery_curve_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = (u32, Vec<f64>)>,
) -> Result<(), CliError> {
    let mut buf = String::new();
    buf.push_str(header);
    buf.push('\n');
    for (k, values) in rows {
        write!(buf, "{k}").unwrap();
        for v in values {
            write!(buf, ",{}", round_sig10(v)).unwrap();
        }
        buf.push('\n');
    }
    emit(Some(path), buf.as_bytes())
}

fn history_argmax(n: u32, q: f64, eps: f64, cap: u32) -> u32 {
    let probe = fin(n, q, eps, 0);
    let mut best_k = 0;
    let mut best_v = v_finite_history(&probe);
    for k in 1..=cap {
        let v = v_finite_history(&probe.with_k(k));
        if v > best_v + 1e-12 {
            best_k = k;
            best_v = v;
        }
    }
    best_k
}

fn example1(out_dir: &Path) -> Result<(), CliError> {
    let (lam, eps, n) = (0.02, 0.4, 2);
    let q = lam / (n as f64 - lam);

    non_delivery_curve_csv(
        &out_dir.join("example1_curves.csv"),
        "k,non_delivery_infinite,non_delivery_finite",
        (0..=30).map(|k| {
            (
                k,
                vec![
                    1.0 - v_infinite(&poi(lam, eps, k)),
                    1.0 - v_finite(&fin(n, q, eps, k)),
                ],
            )
        }),
    )?;

    let k_inf = optimal_k_infinite(lam, eps).expect("valid domain");
    let k_fin = optimal_k_finite(n, q, eps).expect("valid domain");
    let nd_inf = |k: u32| 1.0 - v_infinite(&poi(lam, eps, k));
    let nd_fin = |k: u32| 1.0 - v_finite(&fin(n, q, eps, k));

    print_rows(
        &format!("scenario 1: lambda={lam}, epsilon={eps}, finite N={n} q={q:.8}"),
        &[
            Row {
                label: "1-V_inf at cited K=0",
                reference: 0.4119,
                computed: nd_inf(0),
            },
            Row {
                label: "1-V_inf at cited K=7",
                reference: 0.0521,
                computed: nd_inf(7),
            },
            Row {
                label: "1-V at cited K=0",
                reference: 0.406,
                computed: nd_fin(0),
            },
            Row {
                label: "1-V at cited K=7",
                reference: 0.0298,
                computed: nd_fin(7),
            },
            Row {
                label: "K* infinite (scan)",
                reference: 7.0,
                computed: k_inf as f64,
            },
            Row {
                label: "K* finite (scan)",
                reference: 7.0,
                computed: k_fin as f64,
            },
            Row {
                label: "ratio (1-V_inf(0))/(1-V_inf(K*))",
                reference: 7.9,
                computed: nd_inf(0) / nd_inf(k_inf),
            },
            Row {
                label: "ratio (1-V(0))/(1-V(K*))",
                reference: 13.6,
                computed: nd_fin(0) / nd_fin(k_fin),
            },
        ],
    );
    println!(
        "  note: the cited K>=1 values sit at the closed forms one index lower \
         (1-V_inf({}) = {:.6}, 1-V({}) = {:.6}); the cited optimum 7 counts total \
         transmissions, scan argmax is K* = {k_inf}.",
        k_inf,
        nd_inf(k_inf),
        k_fin,
        nd_fin(k_fin)
    );
    println!();
    Ok(())
}

fn example2(out_dir: &Path) -> Result<(), CliError> {
    let (lam, eps, n) = (0.02, 0.4, 10);
    let q = lam / (n as f64 - lam);

    non_delivery_curve_csv(
        &out_dir.join("example2_curves.csv"),
        "k,non_delivery_infinite,non_delivery_finite",
        (0..=30).map(|k| {
            (
                k,
                vec![
                    1.0 - v_infinite(&poi(lam, eps, k)),
                    1.0 - v_finite(&fin(n, q, eps, k)),
                ],
            )
        }),
    )?;

    let gap = |k: u32| (v_finite(&fin(n, q, eps, k)) - v_infinite(&poi(lam, eps, k))).abs();
    let max_gap = (0..=30).map(gap).fold(0.0_f64, f64::max);
    let max_gap_near_opt = (0..=10).map(gap).fold(0.0_f64, f64::max);
    let k_fin = optimal_k_finite(n, q, eps).expect("valid domain");

    println!("scenario 2: lambda={lam}, epsilon={eps}, finite N={n} q={q:.8}");
    println!("  max |V - V_inf| over K in 0..=30: {max_gap:.6}");
    println!("  max |V - V_inf| over K in 0..=10: {max_gap_near_opt:.6}");
    println!("  K* finite (scan): {k_fin} (matches the infinite-model optimum)");
    println!();
    Ok(())
}

fn example3(out_dir: &Path) -> Result<(), CliError> {
    let (lam, eps, n) = (0.005, 0.3, 2);
    let q = lam / (n as f64 - lam);

    non_delivery_curve_csv(
        &out_dir.join("example3_curves.csv"),
        "k,non_delivery_infinite,non_delivery_finite",
        (0..=30).map(|k| {
            (
                k,
                vec![
                    1.0 - v_infinite(&poi(lam, eps, k)),
                    1.0 - v_finite(&fin(n, q, eps, k)),
                ],
            )
        }),
    )?;

    let nd_inf = |k: u32| 1.0 - v_infinite(&poi(lam, eps, k));
    let nd_fin = |k: u32| 1.0 - v_finite(&fin(n, q, eps, k));
    let k_inf = optimal_k_infinite(lam, eps).expect("valid domain");
    let k_fin = optimal_k_finite(n, q, eps).expect("valid domain");

    print_rows(
        &format!("scenario 3: lambda={lam}, epsilon={eps}, finite N={n} q={q:.8}"),
        &[
            Row {
                label: "1-V_inf at cited K=0",
                reference: 0.3035,
                computed: nd_inf(0),
            },
            Row {
                label: "1-V_inf at cited K=7",
                reference: 0.0098,
                computed: nd_inf(7),
            },
            Row {
                label: "1-V at cited K=0",
                reference: 0.3017,
                computed: nd_fin(0),
            },
            Row {
                label: "1-V at cited K=7",
                reference: 0.0053,
                computed: nd_fin(7),
            },
            Row {
                label: "ratio (1-V_inf(0))/(1-V_inf(K*))",
                reference: 30.76,
                computed: nd_inf(0) / nd_inf(k_inf),
            },
            Row {
                label: "ratio (1-V(0))/(1-V(K*))",
                reference: 58.0,
                computed: nd_fin(0) / nd_fin(k_fin),
            },
        ],
    );
    println!(
        "  argmax: infinite K* = {k_inf} (1-V_inf = {:.6}), finite K* = {k_fin} (1-V = {:.6})",
        nd_inf(k_inf),
        nd_fin(k_fin)
    );
    println!(
        "  flag: the reference cites its ratios at index 8 while listing values at index 7; \
         the cited 30.76 matches the ratio at the scan argmax K* = {k_inf} ({:.4}), so the \
         index-8 label is inconsistent with the listed values.",
        nd_inf(0) / nd_inf(k_inf)
    );
    println!();
    Ok(())
}

fn example4(out_dir: &Path) -> Result<(), CliError> {
    let (eps, n, q) = (0.4, 2, 0.01);

    non_delivery_curve_csv(
        &out_dir.join("example4_curves.csv"),
        "k,non_delivery_preemptive,non_delivery_history",
        (0..=30).map(|k| {
            let m = fin(n, q, eps, k);
            (k, vec![1.0 - v_finite(&m), 1.0 - v_finite_history(&m)])
        }),
    )?;

    let k_v = optimal_k_finite(n, q, eps).expect("valid domain");
    let k_t = history_argmax(n, q, eps, 200);
    let min_v = 1.0 - v_finite(&fin(n, q, eps, k_v));
    let min_t = 1.0 - v_finite_history(&fin(n, q, eps, k_t));

    println!("scenario 4: epsilon={eps}, N={n}, q={q}");
    println!("  argmax: preemptive K* = {k_v} (min 1-V = {min_v:.6}), history K* = {k_t} (min 1-V~ = {min_t:.6})");
    println!(
        "  note: the history variant never preempts, so 1-V~ <= 1-V at every K; \
         the difference here stays below {:.4}.",
        (0..=30)
            .map(|k| {
                let m = fin(n, q, eps, k);
                v_finite_history(&m) - v_finite(&m)
            })
            .fold(0.0_f64, f64::max)
    );
    println!();
    Ok(())
}

fn example5(out_dir: &Path) -> Result<(), CliError> {
    let (eps, n, q) = (0.99, 2, 0.0526);

    non_delivery_curve_csv(
        &out_dir.join("example5_curves.csv"),
        "k,non_delivery_preemptive,non_delivery_history",
        (0..=200).map(|k| {
            let m = fin(n, q, eps, k);
            (k, vec![1.0 - v_finite(&m), 1.0 - v_finite_history(&m)])
        }),
    )?;

    let k_v = optimal_k_finite(n, q, eps).expect("valid domain");
    let k_t = history_argmax(n, q, eps, 500);
    let min_v = 1.0 - v_finite(&fin(n, q, eps, k_v));
    let min_t = 1.0 - v_finite_history(&fin(n, q, eps, k_t));

    println!("scenario 5: epsilon={eps}, N={n}, q={q}");
    println!("  argmax: preemptive K* = {k_v} (min 1-V = {min_v:.6}), history K* = {k_t} (min 1-V~ = {min_t:.6})");
    println!(
        "  claim check: min(1-V~) < min(1-V): {}; optima differ: {}",
        min_t < min_v,
        k_v != k_t
    );
    println!();
    Ok(())
}
