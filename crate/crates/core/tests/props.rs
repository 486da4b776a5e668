//! Property tests for the invariants that hold across the whole
//! input space rather than at hand-picked points.

mod common;

use evt_core::dist::{
    gpd_cdf, gpd_quantile, lognormal_pdf, normal_pdf, GpdParams, LogNormalParams, NormalParams,
};
use evt_core::ingest::{parse_series, Format, LossSeries, SignConvention};
use evt_core::pot::excesses;
use proptest::prelude::*;

fn finite_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            -1e12f64..1e12,
            -1.0f64..1.0,
            Just(0.0),
            Just(-0.0),
            Just(1e-300),
        ],
        1..60,
    )
}

proptest! {
    #[test]
    fn single_column_render_parse_round_trip(values in finite_values()) {
        let series = LossSeries::new(values.clone(), "prop").unwrap();
        let text = series.to_single_column();
        let back = parse_series(&text, Format::SingleColumn, SignConvention::AsIs, "prop").unwrap();
        prop_assert_eq!(back.values().len(), values.len());
        for (a, b) in back.values().iter().zip(&values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn negate_is_an_involution(values in finite_values()) {
        let series = LossSeries::new(values, "prop").unwrap();
        let text = series.to_single_column();
        let as_is = parse_series(&text, Format::SingleColumn, SignConvention::AsIs, "p").unwrap();
        let negated = parse_series(&text, Format::SingleColumn, SignConvention::Negate, "p").unwrap();
        for (a, b) in as_is.values().iter().zip(negated.values()) {
            prop_assert_eq!((-b).to_bits(), a.to_bits());
            prop_assert_eq!((-(-a)).to_bits(), a.to_bits());
        }
    }

    #[test]
    fn gpd_cdf_quantile_round_trip(
        prob in 0.0f64..0.999_999,
        xi in -0.95f64..3.0,
        beta in 1e-3f64..1e3,
    ) {
        let p = GpdParams::new(xi, beta).unwrap();
        let y = gpd_quantile(prob, &p).unwrap();
        prop_assert!(y >= 0.0);
        let back = gpd_cdf(y, &p);
        prop_assert!((back - prob).abs() <= 1e-12, "prob {} -> y {} -> {}", prob, y, back);
    }

    #[test]
    fn lognormal_density_identity(
        x in 1e-6f64..1e6,
        mu in -3.0f64..3.0,
        sigma2 in 0.05f64..4.0,
    ) {
        let ln = LogNormalParams::new(mu, sigma2).unwrap();
        let n = NormalParams::new(mu, sigma2).unwrap();
        let lhs = lognormal_pdf(x, &ln).unwrap();
        let rhs = normal_pdf(x.ln(), &n) / x;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn exceedance_sets_shrink_with_the_threshold(
        values in prop::collection::vec(-50.0f64..50.0, 1..200),
        u1 in -10.0f64..10.0,
        gap in 0.001f64..20.0,
    ) {
        let series = LossSeries::new(values, "prop").unwrap();
        let u2 = u1 + gap;
        let m1 = excesses(&series, u1).len();
        let m2 = excesses(&series, u2).len();
        prop_assert!(m2 <= m1);
    }
}
