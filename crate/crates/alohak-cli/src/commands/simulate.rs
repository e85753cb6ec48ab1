//! `alohak simulate` — seeded Monte Carlo next to the matching closed form,
//! with a 3-sigma pass/fail verdict (exit code 4 on failure).

use crate::config::{resolve, ConfigFile};
use crate::output::{
    emit, json_envelope, print_json, round_sig10, write_csv, OutputRecord, Provenance,
};
use crate::params::{
    resolve_epsilon, resolve_family, resolve_format, resolve_variant, Format, ModelFamily,
    VariantArg,
};
use crate::CliError;
use alohak_core::{compare_with_analytic, ComparisonReport, SimConfig, SimModel, Variant};
use clap::Args;
use std::path::PathBuf;

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub finite: bool,
    #[arg(long)]
    pub poisson: bool,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Retransmission count K
    #[arg(long)]
    pub k: Option<u32>,
    /// Retransmission bookkeeping (finite model only; default preemptive)
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Slots per replication
    #[arg(long)]
    pub slots: Option<u64>,
    /// Warmup slots excluded from tallies (default 10*(K+1))
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Independent replications (default 8)
    #[arg(long)]
    pub replications: Option<u32>,
    /// RNG seed; required, there is no ambient-entropy default
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format (default table)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write raw per-replication tallies to this CSV file
    #[arg(long)]
    pub dump_replications: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let family = resolve_family(args.finite, args.poisson, args.n, args.q, args.lambda, &cfg)?;
    let epsilon = resolve_epsilon(args.epsilon, &cfg)?;
    let k = resolve(args.k, &cfg, "k", None)?
        .ok_or_else(|| CliError::usage("simulate requires --k"))?;
    let variant = resolve_variant(args.variant, &cfg)?;
    if matches!(family, ModelFamily::Poisson { .. }) && variant.is_some() {
        return Err(CliError::usage("--variant applies to --finite only"));
    }
    let variant = variant.unwrap_or(Variant::Preemptive);
    let slots = resolve(args.slots, &cfg, "slots", None)?
        .ok_or_else(|| CliError::usage("simulate requires --slots"))?;
    let warmup = resolve(
        args.warmup,
        &cfg,
        "warmup",
        Some(SimConfig::default_warmup(k)),
    )?
    .expect("default present");
    let replications =
        resolve(args.replications, &cfg, "replications", Some(8))?.expect("default present");
    let seed = resolve(args.seed, &cfg, "seed", None)?
        .ok_or_else(|| CliError::usage("simulate requires an explicit --seed"))?;
    let format = resolve_format(args.format, &cfg, Format::Table)?;

    let model = match family {
        ModelFamily::Finite { .. } => SimModel::Finite(family.finite(epsilon, k)?),
        ModelFamily::Poisson { .. } => SimModel::Poisson(family.poisson(epsilon, k)?),
    };
    let sim_cfg = SimConfig::new(model, variant, slots, warmup, seed, replications)?;
    let report = compare_with_analytic(&sim_cfg)?;

    if let Some(path) = &args.dump_replications {
        let mut buf = String::from("replication,arrivals,delivered_messages,v_hat,w_hat\n");
        for r in &report.stats.replication_summaries {
            buf.push_str(&format!(
                "{},{},{},{},{}\n",
                r.replication,
                r.arrivals,
                r.delivered_messages,
                round_sig10(r.v_hat),
                round_sig10(r.w_hat)
            ));
        }
        emit(Some(path), buf.as_bytes())?;
    }

    render(
        &report,
        &family,
        epsilon,
        k,
        variant,
        seed,
        &sim_cfg,
        format,
        args.output.as_deref(),
    )?;

    if report.pass {
        Ok(())
    } else {
        Err(CliError::StatFail)
    }
}

#[allow(clippy::too_many_arguments)]
fn render(
    report: &ComparisonReport,
    family: &ModelFamily,
    epsilon: f64,
    k: u32,
    variant: Variant,
    seed: u64,
    sim_cfg: &SimConfig,
    format: Format,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let stats = &report.stats;
    let (n_users, q, lambda) = match *family {
        ModelFamily::Finite { n_users, q } => (Some(n_users), Some(q), None),
        ModelFamily::Poisson { lambda } => (None, None, Some(lambda)),
    };
    let (v_name, w_name) = match family {
        ModelFamily::Finite { .. } => match variant {
            Variant::Preemptive => ("V", "W"),
            Variant::History => ("V_tilde", "W_tilde"),
        },
        ModelFamily::Poisson { .. } => ("V_inf", "W_inf"),
    };
    let rec = |metric: &str, value: f64, provenance: Provenance| OutputRecord {
        scenario: "simulate".into(),
        model: family.name().into(),
        n_users,
        q,
        lambda,
        epsilon,
        k: Some(k),
        variant: matches!(family, ModelFamily::Finite { .. }).then(|| variant.to_string()),
        metric: metric.into(),
        value: round_sig10(value),
        provenance,
    };
    let records = vec![
        rec("v_hat", stats.v_hat, Provenance::Simulated),
        rec("v_stderr", stats.v_stderr, Provenance::Simulated),
        rec("w_hat", stats.w_hat, Provenance::Simulated),
        rec("w_stderr", stats.w_stderr, Provenance::Simulated),
        rec(v_name, report.analytic_v, Provenance::Analytic),
        rec(w_name, report.analytic_w, Provenance::Analytic),
        rec("z_v", report.z_v, Provenance::Simulated),
        rec("z_w", report.z_w, Provenance::Simulated),
        rec(
            "pass_3sigma",
            report.pass as u8 as f64,
            Provenance::Simulated,
        ),
    ];

    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&records, &mut buf)?;
            emit(output, &buf)
        }
        Format::Json => {
            let params = serde_json::json!({
                "model": family.name(),
                "n": n_users, "q": q, "lambda": lambda,
                "epsilon": epsilon, "k": k,
                "variant": matches!(family, ModelFamily::Finite { .. }).then(|| variant.to_string()),
                "slots": sim_cfg.horizon_slots(),
                "warmup": sim_cfg.warmup_slots(),
                "replications": sim_cfg.replications(),
            });
            let results = serde_json::json!({
                "records": serde_json::to_value(&records).unwrap(),
                "tallies": {
                    "arrivals": stats.arrivals,
                    "delivered_messages": stats.delivered_messages,
                    "total_slots": stats.total_slots,
                    "warmup_slots": stats.warmup_slots,
                    "slots": {
                        "idle": stats.slot_tallies.idle,
                        "conflict": stats.slot_tallies.conflict,
                        "success": stats.slot_tallies.success,
                        "delivered": stats.slot_tallies.delivered,
                    },
                    "preemptions": stats.preemptions,
                    "replications": stats.replication_summaries.iter().map(|r| {
                        serde_json::json!({
                            "replication": r.replication,
                            "arrivals": r.arrivals,
                            "delivered_messages": r.delivered_messages,
                            "v_hat": round_sig10(r.v_hat),
                            "w_hat": round_sig10(r.w_hat),
                        })
                    }).collect::<Vec<_>>(),
                },
                "pass": report.pass,
            });
            let env = json_envelope("simulate", params, results, Some(seed));
            match output {
                Some(p) => emit(Some(p), format!("{env:#}\n").as_bytes()),
                None => print_json(&env),
            }
        }
        Format::Table => {
            let mut buf = String::new();
            buf.push_str(&format!(
                "slots {} x {} replications, warmup {}, seed {}\n",
                sim_cfg.horizon_slots(),
                sim_cfg.replications(),
                sim_cfg.warmup_slots(),
                seed
            ));
            buf.push_str(&format!(
                "arrivals {}   delivered {}   preemptions {}\n",
                stats.arrivals, stats.delivered_messages, stats.preemptions
            ));
            buf.push_str(&format!(
                "v_hat  {:.6} +- {:.6}   {v_name}  {:.6}   z {:+.2}\n",
                stats.v_hat, stats.v_stderr, report.analytic_v, report.z_v
            ));
            buf.push_str(&format!(
                "w_hat  {:.6} +- {:.6}   {w_name}  {:.6}   z {:+.2}\n",
                stats.w_hat, stats.w_stderr, report.analytic_w, report.z_w
            ));
            buf.push_str(&format!(
                "verdict: {} at 3 sigma\n",
                if report.pass { "PASS" } else { "FAIL" }
            ));
            emit(output, buf.as_bytes())
        }
    }
}
