//! Scalar helpers shared by the analytic formulas.
//!
//! Everything funnels through the shims below so the crate builds without
//! `std` (`libm` supplies the math routines there).

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("alohak-core requires either the `std` or the `libm` feature");

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.exp();
    #[cfg(not(feature = "std"))]
    return libm::exp(x);
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ln();
    #[cfg(not(feature = "std"))]
    return libm::log(x);
}

/// `e^x - 1` without cancellation for small `x`.
#[inline]
pub(crate) fn expm1(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.exp_m1();
    #[cfg(not(feature = "std"))]
    return libm::expm1(x);
}

/// `ln(1 + x)` without cancellation for small `x`.
#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ln_1p();
    #[cfg(not(feature = "std"))]
    return libm::log1p(x);
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.sqrt();
    #[cfg(not(feature = "std"))]
    return libm::sqrt(x);
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ceil();
    #[cfg(not(feature = "std"))]
    return libm::ceil(x);
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.abs();
    #[cfg(not(feature = "std"))]
    return libm::fabs(x);
}

/// Exponent above which [`pow_int`] switches from direct multiplication to
/// `exp(e · ln b)`, keeping tiny powers like `(1-q)^{(N-1)K}` out of the
/// gradual-underflow range.
pub const DEFAULT_LOG_POW_THRESHOLD: u64 = 64;

/// Longest geometric sum evaluated term by term; beyond this the closed
/// ratio `(1 - r^k)/(1 - r)` is used.
pub(crate) const GEOM_SUM_DIRECT_MAX: u64 = 128;

/// Denominator magnitude below which `(1 - r^k)/(1 - r)` degenerates and the
/// sum is replaced by its `r -> 1` limit `k`.
pub(crate) const GEOM_DENOM_FLOOR: f64 = 1e-14;

/// `base^exponent` for non-negative `base`, by squaring for small exponents
/// and in log space above `log_threshold`.
pub(crate) fn pow_int(base: f64, exponent: u64, log_threshold: u64) -> f64 {
    if exponent == 0 {
        return 1.0;
    }
    if base == 0.0 {
        return 0.0;
    }
    if exponent <= log_threshold {
        let mut acc = 1.0;
        let mut b = base;
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                acc *= b;
            }
            b *= b;
            e >>= 1;
        }
        acc
    } else {
        exp(exponent as f64 * ln(base))
    }
}

/// Finite geometric sum `Σ_{s=0}^{terms-1} ratio^s`, empty for `terms == 0`.
///
/// `one_minus_ratio` is the precomputed `1 - ratio`; callers obtain it via
/// `expm1` so the ratio branch stays accurate when `ratio` is close to 1.
pub(crate) fn geom_sum(ratio: f64, terms: u64, one_minus_ratio: f64, log_threshold: u64) -> f64 {
    if terms == 0 {
        return 0.0;
    }
    if terms <= GEOM_SUM_DIRECT_MAX {
        let mut total = 0.0;
        let mut term = 1.0;
        for _ in 0..terms {
            total += term;
            term *= ratio;
        }
        total
    } else if abs(one_minus_ratio) < GEOM_DENOM_FLOOR {
        terms as f64
    } else {
        (1.0 - pow_int(ratio, terms, log_threshold)) / one_minus_ratio
    }
}

/// `1 - scale · e^{ln_pow}` computed through `expm1`; exact `1.0` when
/// `scale == 0` (then `ln(scale) == -inf`).
#[inline]
pub(crate) fn one_minus_scaled_exp(scale: f64, ln_pow: f64) -> f64 {
    -expm1(ln(scale) + ln_pow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_int_matches_powi() {
        for &b in &[0.3_f64, 0.97, 1.5] {
            for e in 0..20_u64 {
                let direct = pow_int(b, e, DEFAULT_LOG_POW_THRESHOLD);
                assert!((direct - b.powi(e as i32)).abs() < 1e-14 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pow_int_log_path_consistent() {
        let b = 0.999;
        let lo = pow_int(b, 200, 64);
        let hi = pow_int(b, 200, 1000);
        assert!((lo - hi).abs() < 1e-12 * hi);
    }

    #[test]
    fn pow_int_zero_base() {
        assert_eq!(pow_int(0.0, 0, 64), 1.0);
        assert_eq!(pow_int(0.0, 5, 64), 0.0);
        assert_eq!(pow_int(0.0, 500, 64), 0.0);
    }

    #[test]
    fn geom_sum_empty_and_small() {
        assert_eq!(geom_sum(0.5, 0, 0.5, 64), 0.0);
        assert_eq!(geom_sum(0.5, 1, 0.5, 64), 1.0);
        assert!((geom_sum(0.5, 3, 0.5, 64) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn geom_sum_ratio_branch() {
        let r: f64 = 0.9;
        let direct: f64 = (0..200).map(|s| r.powi(s)).sum();
        let via = geom_sum(r, 200, 1.0 - r, 64);
        assert!((direct - via).abs() < 1e-10 * direct);
    }

    #[test]
    fn geom_sum_degenerate_ratio() {
        // 1 - r below the floor: the sum collapses to `terms`.
        let s = geom_sum(1.0 - 1e-16, 200, 1e-16, 64);
        assert_eq!(s, 200.0);
    }

    #[test]
    fn one_minus_scaled_exp_edges() {
        assert_eq!(one_minus_scaled_exp(0.0, -0.5), 1.0);
        let v = one_minus_scaled_exp(0.4, -0.02);
        assert!((v - (1.0 - 0.4 * (-0.02_f64).exp())).abs() < 1e-15);
    }
}
