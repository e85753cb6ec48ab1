//! Shared flag resolution: model family, retransmission ranges, variants.

use crate::config::{resolve, ConfigFile};
use crate::CliError;
use alohak_core::{FiniteModel, PoissonModel, Variant};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Preemptive,
    History,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Preemptive => Variant::Preemptive,
            VariantArg::History => Variant::History,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Parameters of either model family, without the retransmission count.
#[derive(Debug, Clone, Copy)]
pub enum ModelFamily {
    Finite { n_users: u32, q: f64 },
    Poisson { lambda: f64 },
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Finite { .. } => "finite",
            ModelFamily::Poisson { .. } => "poisson",
        }
    }

    pub fn finite(&self, epsilon: f64, k: u32) -> Result<FiniteModel, CliError> {
        match *self {
            ModelFamily::Finite { n_users, q } => Ok(FiniteModel::new(n_users, q, epsilon, k)?),
            ModelFamily::Poisson { .. } => Err(CliError::usage("expected a finite model")),
        }
    }

    pub fn poisson(&self, epsilon: f64, k: u32) -> Result<PoissonModel, CliError> {
        match *self {
            ModelFamily::Poisson { lambda } => Ok(PoissonModel::new(lambda, epsilon, k)?),
            ModelFamily::Finite { .. } => Err(CliError::usage("expected a poisson model")),
        }
    }
}

/// Resolve `--finite`/`--poisson` plus their parameters, with config-file
/// fallback (`model = finite|poisson`, `n`, `q`, `lambda`).
pub fn resolve_family(
    finite: bool,
    poisson: bool,
    n: Option<u32>,
    q: Option<f64>,
    lambda: Option<f64>,
    cfg: &ConfigFile,
) -> Result<ModelFamily, CliError> {
    if finite && poisson {
        return Err(CliError::usage(
            "--finite and --poisson are mutually exclusive",
        ));
    }
    let family = if finite {
        "finite"
    } else if poisson {
        "poisson"
    } else {
        match cfg.get_str("model") {
            Some("finite") => "finite",
            Some("poisson") => "poisson",
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config key `model`: expected finite or poisson, got `{other}`"
                )))
            }
            None => return Err(CliError::usage("select a model with --finite or --poisson")),
        }
    };
    match family {
        "finite" => {
            let n = resolve(n, cfg, "n", None)?
                .ok_or_else(|| CliError::usage("--finite requires --n"))?;
            let q = resolve(q, cfg, "q", None)?
                .ok_or_else(|| CliError::usage("--finite requires --q"))?;
            if lambda.is_some() {
                return Err(CliError::usage("--lambda does not apply to --finite"));
            }
            Ok(ModelFamily::Finite { n_users: n, q })
        }
        _ => {
            let lambda = resolve(lambda, cfg, "lambda", None)?
                .ok_or_else(|| CliError::usage("--poisson requires --lambda"))?;
            if n.is_some() || q.is_some() {
                return Err(CliError::usage("--n/--q do not apply to --poisson"));
            }
            Ok(ModelFamily::Poisson { lambda })
        }
    }
}

pub fn resolve_epsilon(flag: Option<f64>, cfg: &ConfigFile) -> Result<f64, CliError> {
    resolve(flag, cfg, "epsilon", None)?.ok_or_else(|| CliError::usage("--epsilon is required"))
}

/// Inclusive retransmission range: either `K` or `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: u32,
    pub end: u32,
}

impl KRange {
    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }
}

impl std::str::FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_end = |txt: &str| {
            txt.parse::<u32>()
                .map_err(|_| format!("invalid retransmission count `{txt}`"))
        };
        if let Some((lo, hi)) = s.split_once("..") {
            let start = parse_end(lo.trim())?;
            let end = parse_end(hi.trim())?;
            if start > end {
                return Err(format!("empty range `{s}`"));
            }
            Ok(KRange { start, end })
        } else {
            let k = parse_end(s.trim())?;
            Ok(KRange { start: k, end: k })
        }
    }
}

pub fn resolve_k_range(flag: Option<KRange>, cfg: &ConfigFile) -> Result<KRange, CliError> {
    resolve(flag, cfg, "k", None)?.ok_or_else(|| CliError::usage("--k is required"))
}

/// Variant from flag or config (`variant = preemptive|history`), if any.
pub fn resolve_variant(
    flag: Option<VariantArg>,
    cfg: &ConfigFile,
) -> Result<Option<Variant>, CliError> {
    if let Some(v) = flag {
        return Ok(Some(v.into()));
    }
    match cfg.get_str("variant") {
        None => Ok(None),
        Some("preemptive") => Ok(Some(Variant::Preemptive)),
        Some("history") => Ok(Some(Variant::History)),
        Some(other) => Err(CliError::usage(format!(
            "config key `variant`: expected preemptive or history, got `{other}`"
        ))),
    }
}

pub fn resolve_format(
    flag: Option<Format>,
    cfg: &ConfigFile,
    default: Format,
) -> Result<Format, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg.get_str("format") {
        None => Ok(default),
        Some("table") => Ok(Format::Table),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(CliError::usage(format!(
            "config key `format`: expected table, csv, or json, got `{other}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_forms() {
        assert_eq!("7".parse::<KRange>().unwrap(), KRange { start: 7, end: 7 });
        assert_eq!(
            "0..30".parse::<KRange>().unwrap(),
            KRange { start: 0, end: 30 }
        );
        assert_eq!(
            "3 .. 5".parse::<KRange>().unwrap(),
            KRange { start: 3, end: 5 }
        );
        assert!("5..3".parse::<KRange>().is_err());
        assert!("a..b".parse::<KRange>().is_err());
        assert!("-1".parse::<KRange>().is_err());
    }
}
