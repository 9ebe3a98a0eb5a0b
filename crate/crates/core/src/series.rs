//! Arccosine series specification.
//!
//! `arccos(sqrt(x)) = pi/2 - sum_m a_m x^(m + 1/2)` with the arcsine Taylor
//! coefficients `a_m = C(2m, m) / (4^m (2m + 1))`: 1, 1/6, 3/40, 5/112, ...
//! Truncated after `m = K`, evaluated as a degree `2K+1` polynomial in
//! `y = sqrt(x)`.
//!
//! The alternative coefficient set (1, 3/40, 5/112) drops the second term;
//! it is kept selectable for comparison runs but limited to the three
//! weights it defines.

use num::rational::Ratio;
use num::ToPrimitive;

use crate::fixedpoint::{FixedPointError, FixedPointFormat};
use crate::mulpoly::PolynomialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesVariant {
    /// Arcsine Taylor coefficients 1, 1/6, 3/40, 5/112, ...
    #[default]
    Standard,
    /// The three-weight alternative 1, 3/40, 5/112.
    PaperPrinted,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series order must be at least 1")]
    OrderTooSmall,
    #[error("the printed coefficient set defines orders up to K=2, got K={0}")]
    PrintedVariantTooLong(u32),
    #[error("coefficient encoding failed: {0}")]
    Encode(#[from] FixedPointError),
}

/// Exact rational series weight `a_m` for the chosen variant.
pub fn series_weight(m: u32, variant: SeriesVariant) -> Option<Ratio<i128>> {
    match variant {
        SeriesVariant::Standard => Some(arcsin_weight(m)),
        SeriesVariant::PaperPrinted => match m {
            0 => Some(Ratio::new(1, 1)),
            1 => Some(Ratio::new(3, 40)),
            2 => Some(Ratio::new(5, 112)),
            _ => None,
        },
    }
}

fn arcsin_weight(m: u32) -> Ratio<i128> {
    // C(2m, m) / (4^m (2m + 1))
    let mut binom: i128 = 1;
    for i in 0..m as i128 {
        binom = binom * (2 * (m as i128) - i) / (i + 1);
    }
    Ratio::new(binom, (1i128 << (2 * m)) * (2 * m as i128 + 1))
}

/// Polynomial coefficients over `y = sqrt(x)` for the truncated series,
/// lowest degree first: `c_0 = pi/2`, `c_(2m+1) = -a_m`, even ones zero.
pub fn series_poly_coeffs(k_order: u32, variant: SeriesVariant) -> Result<Vec<f64>, SeriesError> {
    if k_order < 1 {
        return Err(SeriesError::OrderTooSmall);
    }
    if variant == SeriesVariant::PaperPrinted && k_order > 2 {
        return Err(SeriesError::PrintedVariantTooLong(k_order));
    }
    let mut coeffs = vec![0.0; (2 * k_order + 2) as usize];
    coeffs[0] = std::f64::consts::FRAC_PI_2;
    for m in 0..=k_order {
        let a = series_weight(m, variant).expect("order checked");
        coeffs[(2 * m + 1) as usize] = -a.to_f64().unwrap();
    }
    Ok(coeffs)
}

/// Encoded polynomial specification for the angle pipeline.
pub fn arccos_series_spec(
    k_order: u32,
    variant: SeriesVariant,
    fmt: FixedPointFormat,
) -> Result<PolynomialSpec, SeriesError> {
    let coeffs = series_poly_coeffs(k_order, variant)?;
    Ok(PolynomialSpec::from_f64(&coeffs, fmt)?)
}

/// Evaluate the truncated series at `x` in floating point.
pub fn series_eval(k_order: u32, variant: SeriesVariant, x: f64) -> f64 {
    let y = x.sqrt();
    let mut acc = std::f64::consts::FRAC_PI_2;
    for m in 0..=k_order {
        if let Some(a) = series_weight(m, variant) {
            acc -= a.to_f64().unwrap() * y.powi(2 * m as i32 + 1);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_match_known_values() {
        let w: Vec<Ratio<i128>> = (0..4)
            .map(|m| series_weight(m, SeriesVariant::Standard).unwrap())
            .collect();
        assert_eq!(w[0], Ratio::new(1, 1));
        assert_eq!(w[1], Ratio::new(1, 6));
        assert_eq!(w[2], Ratio::new(3, 40));
        assert_eq!(w[3], Ratio::new(5, 112));
    }

    #[test]
    fn value_at_zero_is_half_pi() {
        for k in [1, 2, 3, 5] {
            assert_eq!(
                series_eval(k, SeriesVariant::Standard, 0.0),
                std::f64::consts::FRAC_PI_2
            );
        }
    }

    #[test]
    fn leading_truncation_behaves() {
        // K=1 keeps pi/2 - sqrt(x) - x^1.5/6
        let x = 0.09f64;
        let want = std::f64::consts::FRAC_PI_2 - 0.3 - 0.3f64.powi(3) / 6.0;
        assert!((series_eval(1, SeriesVariant::Standard, x) - want).abs() < 1e-12);
    }

    #[test]
    fn half_input_error_near_quarter_pi() {
        // truncation error of the K=3 series at x = 1/2 is about 2.2e-3
        let got = series_eval(3, SeriesVariant::Standard, 0.5);
        assert!((got - 0.7876).abs() < 5e-4, "got {got}");
        let err = got - std::f64::consts::FRAC_PI_4;
        assert!(err > 0.0 && err < 2.5e-3, "err {err}");
    }

    #[test]
    fn printed_variant_limited_to_its_weights() {
        assert!(series_poly_coeffs(2, SeriesVariant::PaperPrinted).is_ok());
        assert_eq!(
            series_poly_coeffs(3, SeriesVariant::PaperPrinted).unwrap_err(),
            SeriesError::PrintedVariantTooLong(3)
        );
    }

    #[test]
    fn coefficient_layout() {
        let c = series_poly_coeffs(2, SeriesVariant::Standard).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], std::f64::consts::FRAC_PI_2);
        assert_eq!(c[1], -1.0);
        assert_eq!(c[2], 0.0);
        assert!((c[3] + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c[4], 0.0);
        assert!((c[5] + 0.075).abs() < 1e-15);
    }
}
