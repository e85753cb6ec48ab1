//! `alohak eval` — closed-form V and W over a retransmission range.

use crate::config::ConfigFile;
use crate::output::{
    emit, json_envelope, print_json, round_sig10, write_csv, OutputRecord, Provenance,
};
use crate::params::{
    resolve_epsilon, resolve_family, resolve_format, resolve_k_range, resolve_variant, Format,
    KRange, ModelFamily, VariantArg,
};
use crate::CliError;
use alohak_core::{
    v_finite, v_finite_history, v_infinite, w_finite, w_finite_history, w_infinite, Variant,
};
use clap::Args;
use std::path::PathBuf;

#[derive(Args)]
pub struct EvalArgs {
    /// Finite-user model (requires --n and --q)
    #[arg(long)]
    pub finite: bool,
    /// Infinite-user Poisson model (requires --lambda)
    #[arg(long)]
    pub poisson: bool,
    /// Number of users N
    #[arg(long)]
    pub n: Option<u32>,
    /// Per-slot arrival probability q
    #[arg(long)]
    pub q: Option<f64>,
    /// Poisson arrival rate lambda
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Noise corruption probability epsilon
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Retransmission count or inclusive range, e.g. `7` or `0..30`
    #[arg(long)]
    pub k: Option<KRange>,
    /// Retransmission bookkeeping (finite model only; default preemptive)
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Output format (default csv)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// key = value file merged under the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let family = resolve_family(args.finite, args.poisson, args.n, args.q, args.lambda, &cfg)?;
    let epsilon = resolve_epsilon(args.epsilon, &cfg)?;
    let range = resolve_k_range(args.k, &cfg)?;
    let variant = resolve_variant(args.variant, &cfg)?;
    if matches!(family, ModelFamily::Poisson { .. }) && variant.is_some() {
        return Err(CliError::usage("--variant applies to --finite only"));
    }
    let variant = variant.unwrap_or(Variant::Preemptive);
    let format = resolve_format(args.format, &cfg, Format::Csv)?;

    // Build every record before writing anything: invalid parameters must
    // never leave partial output behind.
    let mut records = Vec::new();
    for k in range.iter() {
        match family {
            ModelFamily::Finite { .. } => {
                let model = family.finite(epsilon, k)?;
                let (v, w, v_name, w_name) = match variant {
                    Variant::Preemptive => (v_finite(&model), w_finite(&model), "V", "W"),
                    Variant::History => (
                        v_finite_history(&model),
                        w_finite_history(&model),
                        "V_tilde",
                        "W_tilde",
                    ),
                };
                if w.exceeds_one {
                    eprintln!(
                        "alohak: warning: W = {} exceeds 1 at K = {k}; the system is outside \
                         the rare-event regime",
                        w.value
                    );
                }
                records.push(record(&family, epsilon, k, Some(variant), v_name, v));
                records.push(record(&family, epsilon, k, Some(variant), w_name, w.value));
            }
            ModelFamily::Poisson { .. } => {
                let model = family.poisson(epsilon, k)?;
                records.push(record(
                    &family,
                    epsilon,
                    k,
                    None,
                    "V_inf",
                    v_infinite(&model),
                ));
                records.push(record(
                    &family,
                    epsilon,
                    k,
                    None,
                    "W_inf",
                    w_infinite(&model),
                ));
            }
        }
    }

    render(
        &records,
        format,
        args.output.as_deref(),
        &family,
        epsilon,
        range,
        variant,
    )
}

fn record(
    family: &ModelFamily,
    epsilon: f64,
    k: u32,
    variant: Option<Variant>,
    metric: &str,
    value: f64,
) -> OutputRecord {
    let (n_users, q, lambda) = match *family {
        ModelFamily::Finite { n_users, q } => (Some(n_users), Some(q), None),
        ModelFamily::Poisson { lambda } => (None, None, Some(lambda)),
    };
    OutputRecord {
        scenario: "eval".into(),
        model: family.name().into(),
        n_users,
        q,
        lambda,
        epsilon,
        k: Some(k),
        variant: variant.map(|v| v.to_string()),
        metric: metric.into(),
        value: round_sig10(value),
        provenance: Provenance::Analytic,
    }
}

fn render(
    records: &[OutputRecord],
    format: Format,
    output: Option<&std::path::Path>,
    family: &ModelFamily,
    epsilon: f64,
    range: KRange,
    variant: Variant,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(records, &mut buf)?;
            emit(output, &buf)
        }
        Format::Json => {
            let params = match *family {
                ModelFamily::Finite { n_users, q } => serde_json::json!({
                    "model": "finite", "n": n_users, "q": q, "epsilon": epsilon,
                    "k": format!("{}..{}", range.start, range.end),
                    "variant": variant.to_string(),
                }),
                ModelFamily::Poisson { lambda } => serde_json::json!({
                    "model": "poisson", "lambda": lambda, "epsilon": epsilon,
                    "k": format!("{}..{}", range.start, range.end),
                }),
            };
            let env = json_envelope("eval", params, serde_json::to_value(records).unwrap(), None);
            match output {
                Some(p) => emit(Some(p), format!("{env:#}\n").as_bytes()),
                None => print_json(&env),
            }
        }
        Format::Table => {
            let mut buf = String::new();
            buf.push_str(&format!(
                "{:>5}  {:<8}  {:>10}  {:>12}\n",
                "K", "metric", "value", "1-value"
            ));
            for r in records {
                buf.push_str(&format!(
                    "{:>5}  {:<8}  {:>10.4}  {:>12.4}\n",
                    r.k.unwrap(),
                    r.metric,
                    r.value,
                    1.0 - r.value
                ));
            }
            emit(output, buf.as_bytes())
        }
    }
}
