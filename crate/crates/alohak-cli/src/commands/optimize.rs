//! `alohak optimize` — the optimal retransmission count, with the Newton
//! continuous relaxation on request.

use crate::config::{resolve, ConfigFile};
use crate::output::{
    emit, human, json_envelope, print_json, round_sig10, write_csv, OutputRecord, Provenance,
};
use crate::params::{resolve_epsilon, resolve_family, resolve_format, Format, ModelFamily};
use crate::CliError;
use alohak_core::{
    default_k_cap, optimal_k_finite_capped, optimal_k_infinite_capped, solve_xstar_with, v_finite,
    v_infinite, w_finite, w_infinite, RootSolveResult,
};
use clap::Args;
use std::path::PathBuf;

#[derive(Args)]
pub struct OptimizeArgs {
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
    /// Scan cap (default max(64, ceil(4/lambda)))
    #[arg(long)]
    pub k_cap: Option<u32>,
    /// Also solve F(x) = 0 and report x*; exits 3 if the solve fails
    #[arg(long)]
    pub newton: bool,
    /// Residual tolerance for the Newton solve
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
    /// Iteration cap for the Newton solve
    #[arg(long, default_value_t = 100)]
    pub newton_max_iter: u32,
    /// Output format (default table)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: OptimizeArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let family = resolve_family(args.finite, args.poisson, args.n, args.q, args.lambda, &cfg)?;
    let epsilon = resolve_epsilon(args.epsilon, &cfg)?;
    let format = resolve_format(args.format, &cfg, Format::Table)?;
    let k_cap = resolve(args.k_cap, &cfg, "k-cap", None)?;

    // The continuous relaxation lives on the infinite model; for a finite
    // system it is evaluated at the matched rate lambda = N q/(1+q).
    let rate = match family {
        ModelFamily::Finite { n_users, q } => n_users as f64 * q / (1.0 + q),
        ModelFamily::Poisson { lambda } => lambda,
    };
    let cap = k_cap.unwrap_or_else(|| default_k_cap(rate));

    let (k_star, v_at, w_at) = match family {
        ModelFamily::Finite { n_users, q } => {
            let k = optimal_k_finite_capped(n_users, q, epsilon, cap)?;
            let model = family.finite(epsilon, k)?;
            (k, v_finite(&model), w_finite(&model).value)
        }
        ModelFamily::Poisson { .. } => {
            let k = optimal_k_infinite_capped(rate, epsilon, cap)?;
            let model = family.poisson(epsilon, k)?;
            (k, v_infinite(&model), w_infinite(&model))
        }
    };

    let newton = if args.newton {
        let res = solve_xstar_with(
            rate,
            epsilon,
            1.0 / rate,
            args.newton_tol,
            args.newton_max_iter,
        )?;
        let predicted = (res.x_star - 1.0).round();
        if (predicted - k_star as f64).abs() > 1.0 {
            eprintln!(
                "alohak: warning: Newton predicts K ≈ {predicted} but the scan found {k_star}; \
                 the scan is authoritative"
            );
        }
        Some(res)
    } else {
        None
    };

    render(
        &family,
        epsilon,
        k_star,
        v_at,
        w_at,
        newton.as_ref(),
        format,
        args.output.as_deref(),
    )?;

    // The scan result is printed above even when the solve failed.
    if let Some(res) = &newton {
        if !res.converged {
            return Err(CliError::Solver(format!(
                "Newton did not converge after {} iterations (residual {:.3e})",
                res.iterations, res.residual
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn render(
    family: &ModelFamily,
    epsilon: f64,
    k_star: u32,
    v_at: f64,
    w_at: f64,
    newton: Option<&RootSolveResult>,
    format: Format,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let (n_users, q, lambda) = match *family {
        ModelFamily::Finite { n_users, q } => (Some(n_users), Some(q), None),
        ModelFamily::Poisson { lambda } => (None, None, Some(lambda)),
    };
    let rec = |metric: &str, value: f64, provenance: Provenance| OutputRecord {
        scenario: "optimize".into(),
        model: family.name().into(),
        n_users,
        q,
        lambda,
        epsilon,
        k: Some(k_star),
        variant: None,
        metric: metric.into(),
        value: round_sig10(value),
        provenance,
    };
    let (v_name, w_name) = match family {
        ModelFamily::Finite { .. } => ("V", "W"),
        ModelFamily::Poisson { .. } => ("V_inf", "W_inf"),
    };
    let mut records = vec![
        rec("K_star", k_star as f64, Provenance::Optimizer),
        rec(v_name, v_at, Provenance::Analytic),
        rec(w_name, w_at, Provenance::Analytic),
    ];
    if let Some(res) = newton {
        records.push(rec("x_star", res.x_star, Provenance::Optimizer));
        records.push(rec(
            "newton_iterations",
            res.iterations as f64,
            Provenance::Optimizer,
        ));
        records.push(rec("newton_residual", res.residual, Provenance::Optimizer));
        records.push(rec(
            "newton_converged",
            res.converged as u8 as f64,
            Provenance::Optimizer,
        ));
    }

    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&records, &mut buf)?;
            emit(output, &buf)
        }
        Format::Json => {
            let params = match *family {
                ModelFamily::Finite { n_users, q } => serde_json::json!({
                    "model": "finite", "n": n_users, "q": q, "epsilon": epsilon,
                }),
                ModelFamily::Poisson { lambda } => serde_json::json!({
                    "model": "poisson", "lambda": lambda, "epsilon": epsilon,
                }),
            };
            let env = json_envelope(
                "optimize",
                params,
                serde_json::to_value(&records).unwrap(),
                None,
            );
            match output {
                Some(p) => emit(Some(p), format!("{env:#}\n").as_bytes()),
                None => print_json(&env),
            }
        }
        Format::Table => {
            let mut buf = String::new();
            buf.push_str(&format!("K*            {k_star}\n"));
            buf.push_str(&format!("{:<13} {}\n", v_name, human(v_at)));
            buf.push_str(&format!("{:<13} {}\n", w_name, human(w_at)));
            buf.push_str(&format!("1-{:<11} {}\n", v_name, human(1.0 - v_at)));
            if let Some(res) = newton {
                buf.push_str(&format!(
                    "x*            {:.6} (iterations {}, residual {:.2e}, converged {})\n",
                    res.x_star, res.iterations, res.residual, res.converged
                ));
            }
            emit(output, buf.as_bytes())
        }
    }
}
