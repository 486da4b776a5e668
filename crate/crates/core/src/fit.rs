//! Maximum-likelihood estimation with convergence reporting.
//!
//! GPD fits maximize the log-likelihood over `(xi, ln beta)` with a
//! deterministic Nelder-Mead simplex seeded by method-of-moments estimates,
//! then re-check the optimum against a 5x5 local grid and restart from any
//! improving point. Normal and LogNormal fits are closed-form moment
//! estimates using the 1/n population variance.
//!
//! Inputs are sorted internally before any reduction, so results are
//! invariant under permutation of the input array, bit for bit.

use serde::Serialize;

use crate::dist::{
    gpd_log_density, gpd_loglik, lognormal_log_density, normal_log_density, GpdParams,
    LogNormalParams, NormalParams, XI_EPS,
};
use crate::error::{Error, Result};
use crate::simplex;

/// Minimum number of excesses accepted by the GPD fitters. A two-parameter
/// tail MLE below this is meaningless.
pub const MIN_EXCESSES: usize = 10;

/// Search box for the shape parameter. Below -1 the likelihood is unbounded
/// (mass piles onto the sample maximum), so the search is clipped at -0.99;
/// the upper bound is far beyond any plausible tail index.
pub const XI_SEARCH_MIN: f64 = -0.99;
pub const XI_SEARCH_MAX: f64 = 5.0;

const REL_FUNC_TOL: f64 = 1e-10;
const X_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 10_000;
const MAX_RESTARTS: usize = 3;

/// A fitted model: parameters, the log-likelihood at those parameters, and
/// the optimizer's convergence record.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult<T> {
    pub params: T,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n_points: usize,
}

fn validate_excesses(excesses: &[f64]) -> Result<()> {
    if excesses.len() < MIN_EXCESSES {
        return Err(Error::InsufficientData {
            needed: MIN_EXCESSES,
            have: excesses.len(),
        });
    }
    if excesses.iter().any(|y| !y.is_finite() || *y < 0.0) {
        return Err(Error::Domain(
            "excesses must be finite and non-negative".into(),
        ));
    }
    let first = excesses[0];
    if excesses.iter().all(|y| *y == first) {
        return Err(Error::DegenerateData);
    }
    Ok(())
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    crate::par::sort_floats(&mut sorted);
    sorted
}

fn mean_and_population_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = crate::par::sum_map(values, |&x| x) / n;
    let var = crate::par::sum_map(values, |&x| (x - mean) * (x - mean)) / n;
    (mean, var)
}

fn clamp_xi(xi: f64) -> f64 {
    xi.clamp(XI_SEARCH_MIN, XI_SEARCH_MAX)
}

fn negative_loglik(sorted: &[f64], xi: f64, log_beta: f64) -> f64 {
    let beta = log_beta.clamp(-700.0, 700.0).exp();
    let params = GpdParams::raw(xi, beta);
    -crate::par::sum_map(sorted, |&y| gpd_log_density(y, &params))
}

/// Fit a GPD to threshold excesses by maximum likelihood.
pub fn fit_gpd_mle(excesses: &[f64]) -> Result<FitResult<GpdParams>> {
    validate_excesses(excesses)?;
    let sorted = sorted_copy(excesses);
    let n = sorted.len();

    // Method-of-moments start: matches the GPD mean beta/(1-xi) and variance
    // beta^2/((1-xi)^2 (1-2 xi)) to the sample moments.
    let (mean, var) = mean_and_population_variance(&sorted);
    let ratio = mean * mean / var;
    let xi0 = clamp_xi(0.5 * (1.0 - ratio));
    let mut beta0 = (0.5 * mean * (ratio + 1.0)).max(f64::MIN_POSITIVE);
    if xi0 < 0.0 {
        // Clipping the moment shape can leave the scale too small for a
        // bounded support; the largest excess must stay inside [0, -beta/xi].
        let max_excess = *sorted.last().expect("validated nonempty");
        beta0 = beta0.max(-xi0 * max_excess * (1.0 + 1e-9));
    }

    let objective = |p: &[f64]| negative_loglik(&sorted, clamp_xi(p[0]), p[1]);

    let mut outcome = simplex::minimize(
        objective,
        &[xi0, beta0.ln()],
        &[0.1, 0.1],
        REL_FUNC_TOL,
        X_TOL,
        MAX_ITERATIONS,
    );
    let mut iterations = outcome.iterations;
    let mut converged = outcome.converged;

    // Local 5x5 grid check around the optimum; restart from any improvement.
    for _ in 0..MAX_RESTARTS {
        let xi_hat = clamp_xi(outcome.point[0]);
        let log_beta_hat = outcome.point[1];
        let xi_step = xi_hat.abs().max(0.02);
        let mut best_candidate: Option<(f64, [f64; 2])> = None;
        for dx in [-0.01, -0.005, 0.0, 0.005, 0.01] {
            for db in [-0.01f64, -0.005, 0.0, 0.005, 0.01] {
                let cand = [xi_hat + xi_step * dx, log_beta_hat + db.ln_1p()];
                let value = objective(&cand);
                if value.is_finite() && value < best_candidate.map_or(f64::INFINITY, |(v, _)| v) {
                    best_candidate = Some((value, cand));
                }
            }
        }
        let Some((cand_value, cand)) = best_candidate else {
            break;
        };
        if cand_value >= outcome.value {
            break;
        }
        outcome = simplex::minimize(
            objective,
            &cand,
            &[0.01, 0.01],
            REL_FUNC_TOL,
            X_TOL,
            MAX_ITERATIONS,
        );
        iterations += outcome.iterations;
        converged = outcome.converged;
    }

    let params = GpdParams::new(
        clamp_xi(outcome.point[0]),
        outcome.point[1].clamp(-700.0, 700.0).exp(),
    )?;
    let loglik = gpd_loglik(&sorted, &params)?;
    Ok(FitResult {
        params,
        loglik,
        converged,
        iterations,
        n_points: n,
    })
}

/// Fit the GPD scale with the shape held fixed. For `xi = 0` the maximizer
/// is the sample mean, returned analytically.
pub fn fit_gpd_mle_fixed_shape(excesses: &[f64], xi: f64) -> Result<FitResult<GpdParams>> {
    validate_excesses(excesses)?;
    if !xi.is_finite() {
        return Err(Error::InvalidParameter("shape must be finite".into()));
    }
    let sorted = sorted_copy(excesses);
    let n = sorted.len();

    if xi.abs() < XI_EPS {
        // Plain ascending-order sum: "the sample mean", reproducible term
        // for term by any caller holding the sorted excesses.
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let params = GpdParams::new(xi, mean)?;
        let loglik = gpd_loglik(&sorted, &params)?;
        return Ok(FitResult {
            params,
            loglik,
            converged: true,
            iterations: 0,
            n_points: n,
        });
    }

    let (mean, _) = mean_and_population_variance(&sorted);
    let mut beta0 = mean * (1.0 - xi);
    if beta0 <= 0.0 {
        beta0 = mean;
    }
    if xi < 0.0 {
        // Feasibility: the largest excess must stay inside [0, -beta/xi].
        let max_excess = *sorted.last().expect("validated nonempty");
        beta0 = beta0.max(-xi * max_excess * (1.0 + 1e-9));
    }

    let objective = |p: &[f64]| negative_loglik(&sorted, xi, p[0]);
    let mut outcome = simplex::minimize(
        objective,
        &[beta0.ln()],
        &[0.1],
        REL_FUNC_TOL,
        X_TOL,
        MAX_ITERATIONS,
    );
    let mut iterations = outcome.iterations;
    let mut converged = outcome.converged;

    for _ in 0..MAX_RESTARTS {
        let log_beta_hat = outcome.point[0];
        let mut best_candidate: Option<(f64, [f64; 1])> = None;
        for db in [-0.01f64, -0.005, 0.0, 0.005, 0.01] {
            let cand = [log_beta_hat + db.ln_1p()];
            let value = objective(&cand);
            if value.is_finite() && value < best_candidate.map_or(f64::INFINITY, |(v, _)| v) {
                best_candidate = Some((value, cand));
            }
        }
        let Some((cand_value, cand)) = best_candidate else {
            break;
        };
        if cand_value >= outcome.value {
            break;
        }
        outcome = simplex::minimize(
            objective,
            &cand,
            &[0.01],
            REL_FUNC_TOL,
            X_TOL,
            MAX_ITERATIONS,
        );
        iterations += outcome.iterations;
        converged = outcome.converged;
    }

    let params = GpdParams::new(xi, outcome.point[0].clamp(-700.0, 700.0).exp())?;
    let loglik = gpd_loglik(&sorted, &params)?;
    Ok(FitResult {
        params,
        loglik,
        converged,
        iterations,
        n_points: n,
    })
}

/// Closed-form Normal fit: sample mean and 1/n variance.
pub fn fit_normal(values: &[f64]) -> Result<FitResult<NormalParams>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            have: values.len(),
        });
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("observations must be finite".into()));
    }
    let sorted = sorted_copy(values);
    let (mu, sigma2) = mean_and_population_variance(&sorted);
    if sigma2 <= 0.0 {
        return Err(Error::DegenerateData);
    }
    let params = NormalParams::new(mu, sigma2)?;
    let loglik = crate::par::sum_map(&sorted, |&x| normal_log_density(x, &params));
    Ok(FitResult {
        params,
        loglik,
        converged: true,
        iterations: 0,
        n_points: values.len(),
    })
}

/// Closed-form LogNormal fit: Normal moment formulas applied to `ln x`.
pub fn fit_lognormal(values: &[f64]) -> Result<FitResult<LogNormalParams>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            have: values.len(),
        });
    }
    if values.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain(
            "lognormal fit requires strictly positive observations".into(),
        ));
    }
    let mut logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
    crate::par::sort_floats(&mut logs);
    let (mu_log, sigma2_log) = mean_and_population_variance(&logs);
    if sigma2_log <= 0.0 {
        return Err(Error::DegenerateData);
    }
    let params = LogNormalParams::new(mu_log, sigma2_log)?;
    let sorted = sorted_copy(values);
    let loglik = crate::par::sum_map(&sorted, |&x| lognormal_log_density(x, &params));
    Ok(FitResult {
        params,
        loglik,
        converged: true,
        iterations: 0,
        n_points: values.len(),
    })
}
