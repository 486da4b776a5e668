//! The peaks-over-threshold engine: exceedance extraction, the tail CDF
//! estimator, closed-form and empirical VaR/ES, and the EL/UL/WC region
//! decomposition of a baseline model.
//!
//! With `F(u) = (N - m)/N` estimated from the exceedance count, the tail of
//! the loss distribution above the threshold `u` is modeled as
//!
//! ```text
//! F_hat(x) = 1 - (m/N) * (1 + xi*(x - u)/beta)^(-1/xi)      x >= u
//! ```
//!
//! Inverting at level `alpha` gives the closed-form quantile
//!
//! ```text
//! VaR_alpha = u + (beta/xi) * { [ (N/m)*(1 - alpha) ]^(-xi) - 1 }
//! ```
//!
//! and averaging `VaR_gamma` over `gamma` in `(alpha, 1)` gives the expected
//! shortfall
//!
//! ```text
//! ES_alpha = VaR_alpha/(1 - xi) + (beta - xi*u)/(1 - xi)        xi < 1
//! ```
//!
//! whose second term carries `beta - xi*u`; the tail-average integral above
//! is the defining identity and the cross-check enforced by the test suite.

use serde::Serialize;

use crate::dist::{
    gpd_survival, lognormal_cdf, lognormal_pdf, lognormal_quantile, normal_cdf, normal_pdf,
    normal_quantile, GpdParams, LogNormalParams, NormalParams, XI_EPS,
};
use crate::error::{Error, Result};
use crate::fit::{fit_gpd_mle, MIN_EXCESSES};
use crate::ingest::LossSeries;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A fitted POT model: GPD parameters over excesses of a threshold, with
/// the observation and exceedance counts that anchor the tail estimator.
#[derive(Debug, Clone, Serialize)]
pub struct PotFit {
    params: GpdParams,
    u: f64,
    n_total: usize,
    n_exceed: usize,
    loglik: f64,
    converged: bool,
}

impl PotFit {
    pub fn new(
        params: GpdParams,
        u: f64,
        n_total: usize,
        n_exceed: usize,
        loglik: f64,
        converged: bool,
    ) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::InvalidParameter("threshold must be finite".into()));
        }
        if n_exceed == 0 || n_exceed > n_total {
            return Err(Error::InvalidParameter(format!(
                "exceedance count must satisfy 0 < m <= N, got m={n_exceed}, N={n_total}"
            )));
        }
        Ok(Self {
            params,
            u,
            n_total,
            n_exceed,
            loglik,
            converged,
        })
    }

    pub fn params(&self) -> &GpdParams {
        &self.params
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_exceed(&self) -> usize {
        self.n_exceed
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Estimated CDF value at the threshold: `(N - m)/N`.
    pub fn cdf_at_threshold(&self) -> f64 {
        (self.n_total - self.n_exceed) as f64 / self.n_total as f64
    }

    /// Lowest level the closed-form tail estimators can serve: `1 - m/N`.
    pub fn min_alpha(&self) -> f64 {
        1.0 - self.n_exceed as f64 / self.n_total as f64
    }
}

/// How a risk estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskMethod {
    PotClosedForm,
    Empirical,
}

/// A VaR (and optionally ES) estimate at one confidence level. `es` is
/// `None` when the mean excess is infinite (`xi >= 1`) or when the
/// operation only produces a quantile.
#[derive(Debug, Clone, Serialize)]
pub struct RiskEstimate {
    pub alpha: f64,
    pub var: f64,
    pub es: Option<f64>,
    pub method: RiskMethod,
    /// Empirical ES only: no observation lies strictly above the VaR, so
    /// the tail average degenerates to the VaR itself.
    pub degenerate_tail: bool,
}

/// Probability masses of the expected-loss, unexpected-loss, and worst-case
/// regions: `(lower, mean]`, `(mean, x_alpha]`, and `(x_alpha, inf)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiskDecomposition {
    pub p_el: f64,
    pub p_ul: f64,
    pub p_wc: f64,
}

/// Region decomposition along with the quantile and mean that delimit it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionReport {
    pub regions: RiskDecomposition,
    pub x_alpha: f64,
    pub mean: f64,
}

/// A baseline body model for the full loss distribution.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineModel {
    Normal(NormalParams),
    LogNormal(LogNormalParams),
}

impl BaselineModel {
    pub fn mean(&self) -> f64 {
        match self {
            BaselineModel::Normal(p) => p.mean(),
            BaselineModel::LogNormal(p) => p.mean(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            BaselineModel::Normal(p) => normal_cdf(x, p),
            BaselineModel::LogNormal(p) => lognormal_cdf(x, p),
        }
    }

    pub fn quantile(&self, prob: f64) -> Result<f64> {
        match self {
            BaselineModel::Normal(p) => normal_quantile(prob, p),
            BaselineModel::LogNormal(p) => lognormal_quantile(prob, p),
        }
    }

    /// Density, taking the value 0 outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match self {
            BaselineModel::Normal(p) => normal_pdf(x, p),
            BaselineModel::LogNormal(p) => {
                if x > 0.0 {
                    lognormal_pdf(x, p).expect("positive x")
                } else {
                    0.0
                }
            }
        }
    }

    /// Infimum of the support: 0 for LogNormal, unbounded below for Normal.
    pub fn support_lower_bound(&self) -> f64 {
        match self {
            BaselineModel::Normal(_) => f64::NEG_INFINITY,
            BaselineModel::LogNormal(_) => 0.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Excesses `x - u` of the observations strictly above `u`, in source order.
/// Ties at the threshold are sub-threshold.
pub fn excesses(series: &LossSeries, u: f64) -> Vec<f64> {
    series
        .values()
        .iter()
        .filter(|&&x| x > u)
        .map(|&x| x - u)
        .collect()
}

/// Fit a POT model: extract excesses of `u` and fit the GPD by MLE.
pub fn fit_pot(series: &LossSeries, u: f64) -> Result<PotFit> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("threshold must be finite, got {u}")));
    }
    let exc = excesses(series, u);
    if exc.len() < MIN_EXCESSES {
        return Err(Error::InsufficientData {
            needed: MIN_EXCESSES,
            have: exc.len(),
        });
    }
    let fit = fit_gpd_mle(&exc)?;
    PotFit::new(
        fit.params,
        u,
        series.n(),
        exc.len(),
        fit.loglik,
        fit.converged,
    )
}

/// Tail estimate of the loss CDF at `x >= u`:
/// `F_hat(x) = 1 - (m/N) * (1 - G(x - u))`.
pub fn tail_cdf_estimate(x: f64, fit: &PotFit) -> Result<f64> {
    if !(x >= fit.u) {
        return Err(Error::Domain(format!(
            "tail estimator is defined for x >= threshold ({}), got {x}",
            fit.u
        )));
    }
    let exceed_frac = fit.n_exceed as f64 / fit.n_total as f64;
    Ok(1.0 - exceed_frac * gpd_survival(x - fit.u, &fit.params))
}

/// Closed-form VaR at level `alpha`, valid for `1 - m/N <= alpha < 1`.
pub fn var_pot(alpha: f64, fit: &PotFit) -> Result<RiskEstimate> {
    if !(alpha < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must be below 1, got {alpha}"
        )));
    }
    let min_alpha = fit.min_alpha();
    if alpha < min_alpha {
        return Err(Error::OutOfTail { alpha, min_alpha });
    }

    let var = if alpha == min_alpha {
        // The bracketed term is exactly 1^(-xi) - 1 = 0.
        fit.u
    } else {
        let ratio = fit.n_total as f64 / fit.n_exceed as f64;
        // Mathematically <= 1 here; clamp float noise so var never dips
        // below the threshold.
        let w = (ratio * (1.0 - alpha)).min(1.0);
        let xi = fit.params.xi();
        let beta = fit.params.beta();
        let y = if xi.abs() < XI_EPS {
            -beta * w.ln()
        } else {
            beta / xi * f64::exp_m1(-xi * w.ln())
        };
        fit.u + y
    };

    Ok(RiskEstimate {
        alpha,
        var,
        es: None,
        method: RiskMethod::PotClosedForm,
        degenerate_tail: false,
    })
}

/// Closed-form VaR and ES at level `alpha`. ES is the average of the
/// quantile over levels above `alpha`; it is undefined (`None`) when
/// `xi >= 1`, where the mean excess is infinite.
pub fn es_pot(alpha: f64, fit: &PotFit) -> Result<RiskEstimate> {
    let mut estimate = var_pot(alpha, fit)?;
    let xi = fit.params.xi();
    let beta = fit.params.beta();
    estimate.es = if xi >= 1.0 {
        None
    } else if xi.abs() < XI_EPS {
        // Memoryless excess: the mean excess above any level is beta.
        Some(estimate.var + beta)
    } else {
        Some((estimate.var + beta - xi * fit.u) / (1.0 - xi))
    };
    Ok(estimate)
}

/// Empirical VaR: the smallest observation whose empirical CDF weakly
/// exceeds `alpha`, i.e. the `ceil(n*alpha)`-th order statistic.
pub fn empirical_var(series: &LossSeries, alpha: f64) -> Result<RiskEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {alpha}"
        )));
    }
    let n = series.n();
    // Smallest k >= 1 with k/n >= alpha, robust to rounding in n*alpha.
    let mut k = ((alpha * n as f64).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / n as f64 >= alpha {
        k -= 1;
    }
    while k < n && (k as f64) / (n as f64) < alpha {
        k += 1;
    }

    let mut buf = series.values().to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(RiskEstimate {
        alpha,
        var: *kth,
        es: None,
        method: RiskMethod::Empirical,
        degenerate_tail: false,
    })
}

/// Empirical ES: mean of the observations strictly above the empirical VaR.
/// If nothing lies above it, the estimate degenerates to the VaR and is
/// flagged.
pub fn empirical_es(series: &LossSeries, alpha: f64) -> Result<RiskEstimate> {
    let mut estimate = empirical_var(series, alpha)?;
    let var = estimate.var;
    let count = crate::par::count(series.values(), |&x| x > var);
    if count == 0 {
        estimate.es = Some(var);
        estimate.degenerate_tail = true;
        return Ok(estimate);
    }
    let sum = crate::par::sum_map(series.values(), |&x| if x > var { x } else { 0.0 });
    estimate.es = Some(sum / count as f64);
    Ok(estimate)
}

/// Split a baseline model's mass into expected-loss `(lower, mean]`,
/// unexpected-loss `(mean, x_alpha]`, and worst-case `(x_alpha, inf)`
/// regions, where `x_alpha` is the model's `alpha`-quantile.
pub fn risk_decomposition(model: &BaselineModel, alpha: f64) -> Result<DecompositionReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {alpha}"
        )));
    }
    let x_alpha = model.quantile(alpha)?;
    let mean = model.mean();
    if x_alpha < mean {
        return Err(Error::Decomposition(format!(
            "quantile x_alpha = {x_alpha} lies below the distribution mean {mean}; \
             the unexpected-loss region requires alpha >= CDF(mean)"
        )));
    }
    let p_el = model.cdf(mean);
    let p_ul = (alpha - p_el).max(0.0);
    let p_wc = 1.0 - alpha;
    Ok(DecompositionReport {
        regions: RiskDecomposition { p_el, p_ul, p_wc },
        x_alpha,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> LossSeries {
        LossSeries::new(values.to_vec(), "test").unwrap()
    }

    fn reference_fit() -> PotFit {
        PotFit::new(
            GpdParams::new(0.25, 2.0).unwrap(),
            10.0,
            1000,
            100,
            0.0,
            true,
        )
        .unwrap()
    }

    #[test]
    fn excesses_are_strict_and_ordered() {
        assert_eq!(excesses(&series(&[1.0, 5.0, 12.0]), 10.0), vec![2.0]);
        assert_eq!(
            excesses(&series(&[1.0, 5.0, 12.0]), 12.0),
            Vec::<f64>::new()
        );
        assert_eq!(excesses(&series(&[11.0, 13.0]), 10.0), vec![1.0, 3.0]);
        assert_eq!(excesses(&series(&[13.0, 11.0]), 10.0), vec![3.0, 1.0]);
    }

    #[test]
    fn fit_pot_records_counts() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let fit = fit_pot(&series(&values), 83.0).unwrap();
        assert_eq!(fit.n_total(), 100);
        assert_eq!(fit.n_exceed(), 17);
        assert_eq!(fit.u(), 83.0);
    }

    #[test]
    fn fit_pot_requires_enough_exceedances() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let err = fit_pot(&series(&values), 95.0).unwrap_err();
        match err {
            Error::InsufficientData { needed, have } => {
                assert_eq!(needed, 10);
                assert_eq!(have, 5);
            }
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    #[test]
    fn tail_cdf_at_threshold_is_one_minus_exceedance_rate() {
        let fit = reference_fit();
        assert_eq!(tail_cdf_estimate(10.0, &fit).unwrap(), 0.9);
        assert!(tail_cdf_estimate(9.999, &fit).is_err());
    }

    #[test]
    fn tail_cdf_is_monotone() {
        let fit = reference_fit();
        let mut previous = 0.0;
        for i in 0..1000 {
            let x = 10.0 + i as f64 * 0.05;
            let f = tail_cdf_estimate(x, &fit).unwrap();
            assert!(f >= previous);
            previous = f;
        }
    }

    #[test]
    fn var_pot_reference_value() {
        let fit = reference_fit();
        let est = var_pot(0.99, &fit).unwrap();
        assert!((est.var - 16.22624).abs() < 5e-6, "var = {}", est.var);
        assert_eq!(est.method, RiskMethod::PotClosedForm);
    }

    #[test]
    fn var_pot_boundary_alpha_returns_threshold_exactly() {
        let fit = reference_fit();
        let alpha = 1.0 - fit.n_exceed() as f64 / fit.n_total() as f64;
        assert_eq!(var_pot(alpha, &fit).unwrap().var, 10.0);
    }

    #[test]
    fn var_pot_rejects_out_of_range_levels() {
        let fit = reference_fit();
        assert!(matches!(var_pot(1.0, &fit), Err(Error::Domain(_))));
        assert!(matches!(var_pot(0.5, &fit), Err(Error::OutOfTail { .. })));
    }

    #[test]
    fn var_pot_zero_shape_limit() {
        let tiny = PotFit::new(
            GpdParams::new(1e-12, 2.0).unwrap(),
            10.0,
            1000,
            100,
            0.0,
            true,
        )
        .unwrap();
        let est = var_pot(0.99, &tiny).unwrap();
        let expected = 10.0 + 2.0 * 10.0f64.ln();
        assert!((est.var - expected).abs() < 1e-8);
        assert!((est.var - 14.60517).abs() < 5e-6);
    }

    #[test]
    fn es_pot_reference_value() {
        let fit = reference_fit();
        let est = es_pot(0.99, &fit).unwrap();
        let es = est.es.unwrap();
        assert!((es - 20.96832).abs() < 1e-5, "es = {es}");
        // Exact closed form: (var + beta - xi*u) / (1 - xi).
        let var = var_pot(0.99, &fit).unwrap().var;
        assert_eq!(es, (var + 2.0 - 0.25 * 10.0) / 0.75);
        assert!(es > est.var);
    }

    #[test]
    fn es_pot_zero_shape_adds_scale() {
        let tiny = PotFit::new(
            GpdParams::new(0.0, 2.0).unwrap(),
            10.0,
            1000,
            100,
            0.0,
            true,
        )
        .unwrap();
        let est = es_pot(0.99, &tiny).unwrap();
        assert_eq!(est.es.unwrap(), est.var + 2.0);
        assert!((est.es.unwrap() - 16.60517).abs() < 5e-6);
    }

    #[test]
    fn es_pot_undefined_for_infinite_mean() {
        let heavy = PotFit::new(
            GpdParams::new(1.2, 2.0).unwrap(),
            10.0,
            1000,
            100,
            0.0,
            true,
        )
        .unwrap();
        let est = es_pot(0.99, &heavy).unwrap();
        assert!(est.es.is_none());
        assert!(est.var.is_finite());
    }

    #[test]
    fn empirical_var_order_statistics() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let s = series(&values);
        assert_eq!(empirical_var(&s, 0.95).unwrap().var, 95.0);
        assert_eq!(empirical_var(&s, 0.999).unwrap().var, 100.0);
        assert_eq!(empirical_var(&series(&[7.5]), 0.4).unwrap().var, 7.5);
        assert_eq!(empirical_var(&series(&[7.5]), 0.99).unwrap().var, 7.5);
        assert!(empirical_var(&s, 0.0).is_err());
        assert!(empirical_var(&s, 1.0).is_err());
    }

    #[test]
    fn empirical_es_tail_means() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let est = empirical_es(&series(&values), 0.95).unwrap();
        assert_eq!(est.var, 95.0);
        assert_eq!(est.es.unwrap(), 98.0);
        assert!(!est.degenerate_tail);

        let est = empirical_es(&series(&[1.0, 2.0, 3.0, 10.0]), 0.5).unwrap();
        assert_eq!(est.var, 2.0);
        assert_eq!(est.es.unwrap(), 6.5);
    }

    #[test]
    fn empirical_es_degenerates_when_nothing_exceeds() {
        let est = empirical_es(&series(&[4.0, 4.0, 4.0]), 0.5).unwrap();
        assert_eq!(est.var, 4.0);
        assert_eq!(est.es.unwrap(), 4.0);
        assert!(est.degenerate_tail);
    }

    #[test]
    fn decomposition_partitions_mass() {
        let model = BaselineModel::LogNormal(LogNormalParams::new(0.0, 1.0).unwrap());
        let d = risk_decomposition(&model, 0.995).unwrap();
        assert_eq!(d.regions.p_wc, 1.0 - 0.995);
        let total = d.regions.p_el + d.regions.p_ul + d.regions.p_wc;
        assert!((total - 1.0).abs() < 1e-9);
        assert!(d.x_alpha > d.mean);

        let normal = BaselineModel::Normal(NormalParams::new(3.0, 4.0).unwrap());
        let d = risk_decomposition(&normal, 0.9).unwrap();
        assert!((d.regions.p_el - 0.5).abs() < 1e-12);
        let total = d.regions.p_el + d.regions.p_ul + d.regions.p_wc;
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn decomposition_rejects_quantile_below_mean() {
        let normal = BaselineModel::Normal(NormalParams::new(0.0, 1.0).unwrap());
        assert!(matches!(
            risk_decomposition(&normal, 0.3),
            Err(Error::Decomposition(_))
        ));
        // LogNormal mean exceeds its median, so even alpha slightly above
        // 0.5 can fall below the mean.
        let ln = BaselineModel::LogNormal(LogNormalParams::new(0.0, 1.0).unwrap());
        assert!(matches!(
            risk_decomposition(&ln, 0.55),
            Err(Error::Decomposition(_))
        ));
    }

    #[test]
    fn pot_fit_validates_counts() {
        let p = GpdParams::new(0.1, 1.0).unwrap();
        assert!(PotFit::new(p, 1.0, 100, 0, 0.0, true).is_err());
        assert!(PotFit::new(p, 1.0, 100, 101, 0.0, true).is_err());
        assert!(PotFit::new(p, f64::NAN, 100, 10, 0.0, true).is_err());
    }
}
