//! Distribution kernels: density, CDF, and quantile functions for the
//! Normal, LogNormal, and generalized Pareto (GPD) families, plus their
//! characteristic points.
//!
//! Conventions:
//! - Normal and LogNormal are parameterized by mean and *variance* of the
//!   (log-)observations, estimated with the 1/n population formulas.
//! - The GPD is the two-parameter family over excesses `y >= 0` with shape
//!   `xi` and scale `beta > 0`:
//!
//!   ```text
//!   G(y) = 1 - (1 + xi*y/beta)^(-1/xi)   xi != 0
//!        = 1 - exp(-y/beta)              xi  = 0
//!   ```
//!
//!   Support is `[0, inf)` for `xi >= 0` and `[0, -beta/xi]` for `xi < 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Shape magnitudes below this use the exponential (`xi = 0`) branch of the
/// GPD formulas; the general branch loses precision as `xi -> 0` and is
/// always evaluated through `expm1`/`ln_1p`.
pub const XI_EPS: f64 = 1e-9;

fn sqrt_2pi() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt()
}

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Normal distribution parameters (mean, variance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalParams {
    mu: f64,
    sigma2: f64,
}

impl NormalParams {
    pub fn new(mu: f64, sigma2: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(
                "normal parameters must be finite".into(),
            ));
        }
        if sigma2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive, got {sigma2}"
            )));
        }
        Ok(Self { mu, sigma2 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// Distribution mean (equals `mu`).
    pub fn mean(&self) -> f64 {
        self.mu
    }

    /// Density maximum `1/(sigma*sqrt(2*pi))`, attained at `x = mu`.
    pub fn peak_height(&self) -> f64 {
        1.0 / (self.sigma() * sqrt_2pi())
    }
}

/// LogNormal distribution parameters: mean and variance of `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNormalParams {
    mu_log: f64,
    sigma2_log: f64,
}

impl LogNormalParams {
    pub fn new(mu_log: f64, sigma2_log: f64) -> Result<Self> {
        if !mu_log.is_finite() || !sigma2_log.is_finite() {
            return Err(Error::InvalidParameter(
                "lognormal parameters must be finite".into(),
            ));
        }
        if sigma2_log <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log-variance must be positive, got {sigma2_log}"
            )));
        }
        Ok(Self { mu_log, sigma2_log })
    }

    pub fn mu_log(&self) -> f64 {
        self.mu_log
    }

    pub fn sigma2_log(&self) -> f64 {
        self.sigma2_log
    }

    pub fn sigma_log(&self) -> f64 {
        self.sigma2_log.sqrt()
    }

    /// Density mode `exp(mu - sigma^2)`.
    pub fn mode(&self) -> f64 {
        (self.mu_log - self.sigma2_log).exp()
    }

    /// Distribution mean `exp(mu + sigma^2/2)`.
    pub fn mean(&self) -> f64 {
        (self.mu_log + 0.5 * self.sigma2_log).exp()
    }
}

/// Generalized Pareto parameters: shape `xi` (dimensionless) and scale
/// `beta` (loss units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GpdParams {
    xi: f64,
    beta: f64,
}

impl GpdParams {
    pub fn new(xi: f64, beta: f64) -> Result<Self> {
        if !xi.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "GPD parameters must be finite".into(),
            ));
        }
        if beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {beta}"
            )));
        }
        Ok(Self { xi, beta })
    }

    /// Internal constructor for optimizer hot loops where both fields are
    /// already known to be finite with `beta > 0`.
    pub(crate) fn raw(xi: f64, beta: f64) -> Self {
        debug_assert!(xi.is_finite() && beta > 0.0 && beta.is_finite());
        Self { xi, beta }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Upper support endpoint `-beta/xi` when `xi < 0`, otherwise none.
    pub fn upper_endpoint(&self) -> Option<f64> {
        if self.xi < -XI_EPS {
            Some(-self.beta / self.xi)
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Normal kernels
// ---------------------------------------------------------------------------

/// Normal density at `x`.
pub fn normal_pdf(x: f64, p: &NormalParams) -> f64 {
    let sigma = p.sigma();
    let z = (x - p.mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * sqrt_2pi())
}

/// Log of the Normal density at `x`, computed analytically so deep-tail
/// points do not underflow to `ln(0)`.
pub fn normal_log_density(x: f64, p: &NormalParams) -> f64 {
    let sigma = p.sigma();
    let z = (x - p.mu) / sigma;
    -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Log of the LogNormal density at `x`; `NEG_INFINITY` for `x <= 0`.
pub fn lognormal_log_density(x: f64, p: &LogNormalParams) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    let sigma = p.sigma_log();
    let z = (x.ln() - p.mu_log) / sigma;
    -0.5 * z * z - sigma.ln() - x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Normal CDF at `x`, via the complementary error function.
pub fn normal_cdf(x: f64, p: &NormalParams) -> f64 {
    let z = (x - p.mu) / p.sigma();
    std_normal_cdf(z)
}

/// Normal quantile: the unique `x` with `normal_cdf(x) = prob`, `prob` in (0,1).
pub fn normal_quantile(prob: f64, p: &NormalParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {prob}"
        )));
    }
    Ok(p.mu + p.sigma() * std_normal_quantile(prob))
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / sqrt_2pi()
}

/// Standard normal quantile: rational initial guess refined with one Halley
/// step against the erfc-based CDF, giving near machine precision away from
/// the extreme tails.
fn std_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement.
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    x - u / (1.0 + 0.5 * x * u)
}

// ---------------------------------------------------------------------------
// LogNormal kernels
// ---------------------------------------------------------------------------

/// LogNormal density at `x > 0`.
pub fn lognormal_pdf(x: f64, p: &LogNormalParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "lognormal density requires x > 0, got {x}"
        )));
    }
    let sigma = p.sigma_log();
    let z = (x.ln() - p.mu_log) / sigma;
    Ok((-0.5 * z * z).exp() / (x * sigma * sqrt_2pi()))
}

/// LogNormal CDF at `x`; 0 for `x <= 0`.
pub fn lognormal_cdf(x: f64, p: &LogNormalParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    std_normal_cdf((x.ln() - p.mu_log) / p.sigma_log())
}

/// LogNormal quantile for `prob` in (0,1).
pub fn lognormal_quantile(prob: f64, p: &LogNormalParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {prob}"
        )));
    }
    Ok((p.mu_log + p.sigma_log() * std_normal_quantile(prob)).exp())
}

// ---------------------------------------------------------------------------
// GPD kernels
// ---------------------------------------------------------------------------

/// GPD CDF at excess `y`. Out-of-support inputs clamp: `y < 0` gives 0 and,
/// for `xi < 0`, `y` past the upper endpoint gives 1.
pub fn gpd_cdf(y: f64, p: &GpdParams) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y <= 0.0 {
        return 0.0;
    }
    if p.xi.abs() < XI_EPS {
        return -f64::exp_m1(-y / p.beta);
    }
    let t = p.xi * y / p.beta;
    if t <= -1.0 {
        // Past the upper endpoint -beta/xi (xi < 0).
        return 1.0;
    }
    -f64::exp_m1((-1.0 / p.xi) * f64::ln_1p(t))
}

/// GPD survival function `1 - G(y)`, computed directly so that deep-tail
/// values keep full relative precision.
pub fn gpd_survival(y: f64, p: &GpdParams) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y <= 0.0 {
        return 1.0;
    }
    if p.xi.abs() < XI_EPS {
        return (-y / p.beta).exp();
    }
    let t = p.xi * y / p.beta;
    if t <= -1.0 {
        return 0.0;
    }
    ((-1.0 / p.xi) * f64::ln_1p(t)).exp()
}

/// GPD quantile: the unique `y >= 0` with `gpd_cdf(y) = prob`, `prob` in [0,1).
pub fn gpd_quantile(prob: f64, p: &GpdParams) -> Result<f64> {
    if !(0.0..1.0).contains(&prob) {
        return Err(Error::Domain(format!(
            "quantile level must lie in [0, 1), got {prob}"
        )));
    }
    let log_survival = f64::ln_1p(-prob);
    if p.xi.abs() < XI_EPS {
        Ok(-p.beta * log_survival)
    } else {
        Ok(p.beta / p.xi * f64::exp_m1(-p.xi * log_survival))
    }
}

/// Log of the GPD density at excess `y`; `NEG_INFINITY` outside the support.
pub fn gpd_log_density(y: f64, p: &GpdParams) -> f64 {
    if !y.is_finite() || y < 0.0 {
        return f64::NEG_INFINITY;
    }
    if p.xi.abs() < XI_EPS {
        return -p.beta.ln() - y / p.beta;
    }
    let t = p.xi * y / p.beta;
    if t <= -1.0 {
        return f64::NEG_INFINITY;
    }
    -p.beta.ln() - (1.0 + 1.0 / p.xi) * f64::ln_1p(t)
}

/// GPD log-likelihood: sum of log densities over the excesses. Returns
/// `NEG_INFINITY` if any excess lies outside the support.
pub fn gpd_loglik(excesses: &[f64], p: &GpdParams) -> Result<f64> {
    if excesses.is_empty() {
        return Err(Error::Domain("log-likelihood of an empty sample".into()));
    }
    Ok(crate::par::sum_map(excesses, |&y| gpd_log_density(y, p)))
}
