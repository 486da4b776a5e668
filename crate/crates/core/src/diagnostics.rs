//! Threshold-selection diagnostics and the borderline-item sensitivity
//! analysis.
//!
//! Under a GPD tail the mean excess function is linear in the threshold and
//! the modified scale `beta(u) - xi(u)*u` is constant, so departures from
//! flat/linear behavior across a threshold grid signal where the tail model
//! stops holding. `borderline_sensitivity` quantifies how much the risk
//! estimates move when the threshold slides across a band of near-threshold
//! observations, and assigns each observation in the band a linear
//! membership weight for how much it behaves like a peak.
//!
//! Grid entries whose exceedance count cannot support a fit are reported as
//! absent, never interpolated. Per-threshold refits run independently (in
//! parallel when enabled) and the output always follows grid order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_gpd_mle, MIN_EXCESSES};
use crate::ingest::LossSeries;
use crate::pot::{es_pot, fit_pot};

/// Which per-threshold statistic a curve carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatKind {
    MeanExcess,
    RefitXi,
    RefitModifiedScale,
    VarAlpha,
    EsAlpha,
}

/// A threshold grid with one statistic per threshold. Absent entries mark
/// thresholds where the statistic could not be computed.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsCurve {
    u_grid: Vec<f64>,
    stat: Vec<Option<f64>>,
    stat_kind: StatKind,
    m_per_u: Vec<usize>,
}

impl DiagnosticsCurve {
    pub fn new(
        u_grid: Vec<f64>,
        stat: Vec<Option<f64>>,
        stat_kind: StatKind,
        m_per_u: Vec<usize>,
    ) -> Result<Self> {
        validate_grid(&u_grid)?;
        if stat.len() != u_grid.len() || m_per_u.len() != u_grid.len() {
            return Err(Error::Domain(
                "curve arrays must share the grid length".into(),
            ));
        }
        Ok(Self {
            u_grid,
            stat,
            stat_kind,
            m_per_u,
        })
    }

    pub fn u_grid(&self) -> &[f64] {
        &self.u_grid
    }

    pub fn stat(&self) -> &[Option<f64>] {
        &self.stat
    }

    pub fn stat_kind(&self) -> StatKind {
        self.stat_kind
    }

    pub fn m_per_u(&self) -> &[usize] {
        &self.m_per_u
    }

    /// (threshold, statistic) pairs where the statistic is present.
    pub fn present(&self) -> Vec<(f64, f64)> {
        self.u_grid
            .iter()
            .zip(&self.stat)
            .filter_map(|(&u, s)| s.map(|v| (u, v)))
            .collect()
    }
}

/// Min/max/spread of one estimate across the sensitivity band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

impl Spread {
    fn over(values: &[f64]) -> Self {
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Spread {
            min,
            max,
            spread: max - min,
        }
    }
}

/// Fit and risk estimates at one band threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEstimate {
    pub u: f64,
    pub m: usize,
    pub xi: f64,
    pub beta: f64,
    pub var: f64,
    pub es: Option<f64>,
}

/// One observation inside the sensitivity band with its peak-membership
/// weight: 0 at the bottom of the band, 1 at the top.
#[derive(Debug, Clone, Serialize)]
pub struct BandMember {
    pub index: usize,
    pub value: f64,
    pub weight: f64,
}

/// Result of the borderline sensitivity analysis over `{u-d, u, u+d}`.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub alpha: f64,
    pub delta: f64,
    /// Estimates at the lower edge, center, and upper edge of the band.
    pub estimates: Vec<ThresholdEstimate>,
    pub var_spread: Spread,
    /// Absent when ES is undefined at any of the three thresholds.
    pub es_spread: Option<Spread>,
    pub band_members: Vec<BandMember>,
}

fn validate_grid(u_grid: &[f64]) -> Result<()> {
    if u_grid.is_empty() {
        return Err(Error::Domain("threshold grid is empty".into()));
    }
    if u_grid.iter().any(|u| !u.is_finite()) {
        return Err(Error::Domain(
            "threshold grid contains non-finite values".into(),
        ));
    }
    if u_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "threshold grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Values sorted descending plus prefix sums of the top-k values. Using a
/// canonical order makes every curve independent of the input permutation.
fn sorted_desc_with_prefix(series: &LossSeries) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = series.values().to_vec();
    crate::par::sort_floats(&mut sorted);
    sorted.reverse();
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &x in &sorted {
        acc += x;
        prefix.push(acc);
    }
    (sorted, prefix)
}

fn count_above(sorted_desc: &[f64], u: f64) -> usize {
    sorted_desc.partition_point(|&x| x > u)
}

/// Mean of `x - u` over observations strictly above each grid threshold.
/// Thresholds with no exceedances are absent.
pub fn mean_excess_curve(series: &LossSeries, u_grid: &[f64]) -> Result<DiagnosticsCurve> {
    validate_grid(u_grid)?;
    let (sorted, prefix) = sorted_desc_with_prefix(series);
    let mut stat = Vec::with_capacity(u_grid.len());
    let mut m_per_u = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let m = count_above(&sorted, u);
        m_per_u.push(m);
        if m == 0 {
            stat.push(None);
        } else {
            stat.push(Some(prefix[m] / m as f64 - u));
        }
    }
    DiagnosticsCurve::new(u_grid.to_vec(), stat, StatKind::MeanExcess, m_per_u)
}

fn refit_at(sorted_desc: &[f64], u: f64) -> (Option<(f64, f64)>, usize) {
    let m = count_above(sorted_desc, u);
    if m < MIN_EXCESSES {
        return (None, m);
    }
    let excess: Vec<f64> = sorted_desc[..m].iter().map(|&x| x - u).collect();
    match fit_gpd_mle(&excess) {
        Ok(fit) => (Some((fit.params.xi(), fit.params.beta())), m),
        Err(_) => (None, m),
    }
}

/// Refit the GPD at every grid threshold. Returns the shape curve and the
/// modified-scale curve `beta(u) - xi(u)*u`, which is constant in `u`
/// wherever the GPD tail model is exact.
pub fn threshold_stability(
    series: &LossSeries,
    u_grid: &[f64],
) -> Result<(DiagnosticsCurve, DiagnosticsCurve)> {
    validate_grid(u_grid)?;
    let (sorted, _) = sorted_desc_with_prefix(series);
    let fits = crate::par::map_slice(u_grid, |&u| refit_at(&sorted, u));

    let mut xi_stat = Vec::with_capacity(u_grid.len());
    let mut scale_stat = Vec::with_capacity(u_grid.len());
    let mut m_per_u = Vec::with_capacity(u_grid.len());
    for (&u, (fit, m)) in u_grid.iter().zip(&fits) {
        m_per_u.push(*m);
        match fit {
            Some((xi, beta)) => {
                xi_stat.push(Some(*xi));
                scale_stat.push(Some(beta - xi * u));
            }
            None => {
                xi_stat.push(None);
                scale_stat.push(None);
            }
        }
    }
    let xi_curve =
        DiagnosticsCurve::new(u_grid.to_vec(), xi_stat, StatKind::RefitXi, m_per_u.clone())?;
    let scale_curve = DiagnosticsCurve::new(
        u_grid.to_vec(),
        scale_stat,
        StatKind::RefitModifiedScale,
        m_per_u,
    )?;
    Ok((xi_curve, scale_curve))
}

/// Refit at every grid threshold and evaluate VaR/ES at `alpha`. Thresholds
/// where the fit or the estimate is unavailable are absent.
pub fn var_es_stability(
    series: &LossSeries,
    u_grid: &[f64],
    alpha: f64,
) -> Result<(DiagnosticsCurve, DiagnosticsCurve)> {
    validate_grid(u_grid)?;
    let estimates = crate::par::map_slice(u_grid, |&u| match fit_pot(series, u) {
        Ok(fit) => {
            let m = fit.n_exceed();
            match es_pot(alpha, &fit) {
                Ok(est) => (Some(est.var), est.es, m),
                Err(_) => (None, None, m),
            }
        }
        Err(_) => (None, None, excess_count(series, u)),
    });

    let m_per_u: Vec<usize> = estimates.iter().map(|e| e.2).collect();
    let var_stat: Vec<Option<f64>> = estimates.iter().map(|e| e.0).collect();
    let es_stat: Vec<Option<f64>> = estimates.iter().map(|e| e.1).collect();
    let var_curve = DiagnosticsCurve::new(
        u_grid.to_vec(),
        var_stat,
        StatKind::VarAlpha,
        m_per_u.clone(),
    )?;
    let es_curve = DiagnosticsCurve::new(u_grid.to_vec(), es_stat, StatKind::EsAlpha, m_per_u)?;
    Ok((var_curve, es_curve))
}

fn excess_count(series: &LossSeries, u: f64) -> usize {
    series.values().iter().filter(|&&x| x > u).count()
}

/// Evaluate VaR/ES at the thresholds `{u-delta, u, u+delta}` and report the
/// spread of each estimate, plus a membership weight for every observation
/// inside the band `(u-delta, u+delta]`. A failure at any of the three
/// thresholds is an error naming that threshold.
pub fn borderline_sensitivity(
    series: &LossSeries,
    u: f64,
    delta: f64,
    alpha: f64,
) -> Result<SensitivityReport> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::Domain(format!(
            "band half-width must be non-negative, got {delta}"
        )));
    }
    if !u.is_finite() {
        return Err(Error::Domain(format!("threshold must be finite, got {u}")));
    }

    let thresholds = [u - delta, u, u + delta];
    let mut estimates = Vec::with_capacity(3);
    for &t in &thresholds {
        let fit = fit_pot(series, t).map_err(|e| Error::FitAtThreshold {
            threshold: t,
            source: Box::new(e),
        })?;
        let est = es_pot(alpha, &fit).map_err(|e| Error::FitAtThreshold {
            threshold: t,
            source: Box::new(e),
        })?;
        estimates.push(ThresholdEstimate {
            u: t,
            m: fit.n_exceed(),
            xi: fit.params().xi(),
            beta: fit.params().beta(),
            var: est.var,
            es: est.es,
        });
    }

    let vars: Vec<f64> = estimates.iter().map(|e| e.var).collect();
    let var_spread = Spread::over(&vars);
    let es_values: Option<Vec<f64>> = estimates.iter().map(|e| e.es).collect();
    let es_spread = es_values.map(|es| Spread::over(&es));

    let lower = u - delta;
    let upper = u + delta;
    let band_members: Vec<BandMember> = if delta == 0.0 {
        Vec::new()
    } else {
        series
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > lower && x <= upper)
            .map(|(index, &x)| BandMember {
                index,
                value: x,
                weight: ((x - lower) / (2.0 * delta)).clamp(0.0, 1.0),
            })
            .collect()
    };

    Ok(SensitivityReport {
        alpha,
        delta,
        estimates,
        var_spread,
        es_spread,
        band_members,
    })
}
