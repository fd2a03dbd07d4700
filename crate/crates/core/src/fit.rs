//! Relationship between the total-citation ratio T and the top-researcher
//! ratio H of a broad field.
//!
//! The power law `H = T^alpha` passes through `(1, 1)` by construction, so
//! alpha is fitted by least squares through the origin in log-log space:
//! `alpha = sum(ln T * ln H) / sum(ln T ^ 2)`.

use std::collections::BTreeSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorCode, IngestError};
use crate::ingest;
use crate::rational::Rational;

/// One observed `(T, H)` pair with the field it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPair {
    pub field: String,
    pub t: f64,
    pub h: f64,
}

impl FitPair {
    pub fn new(field: impl Into<String>, t: f64, h: f64) -> Self {
        FitPair {
            field: field.into(),
            t,
            h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub pairs_used: Vec<FitPair>,
    /// `H - T^alpha`, one per pair.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    /// Fields the linear two-thirds rule does not cover.
    pub excluded_fields: BTreeSet<String>,
    /// Pairs with `T = 1` but `H != 1`; they carry no weight in the fit.
    pub warnings: Vec<String>,
}

/// Broad fields the two-thirds rule is not meant to describe.
pub const TWO_THIRDS_EXCLUDED: &[&str] = &["clinical medicine", "biomedical"];

fn excluded_from_two_thirds(field: &str) -> bool {
    let lower = field.to_lowercase();
    TWO_THIRDS_EXCLUDED.iter().any(|x| lower.contains(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Power,
    TwoThirds,
}

/// Fits alpha through the origin in log-log space.
pub fn fit_alpha(pairs: &[FitPair]) -> Result<FitResult, Error> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut warnings = Vec::new();
    for p in pairs {
        if !(p.t > 0.0 && p.t.is_finite()) {
            return Err(Error::NonPositive("T", p.t));
        }
        if !(p.h > 0.0 && p.h.is_finite()) {
            return Err(Error::NonPositive("H", p.h));
        }
        if p.t == 1.0 {
            if p.h != 1.0 {
                warnings.push(format!("{}: T = 1 but H = {}", p.field, p.h));
            }
            continue;
        }
        let (lt, lh) = (p.t.ln(), p.h.ln());
        num += lt * lh;
        den += lt * lt;
    }
    if den == 0.0 {
        return Err(Error::NoInformativePairs);
    }
    let alpha = num / den;
    let residuals: Vec<f64> = pairs.iter().map(|p| p.h - p.t.powf(alpha)).collect();
    let max_abs_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let excluded_fields = pairs
        .iter()
        .filter(|p| excluded_from_two_thirds(&p.field))
        .map(|p| p.field.clone())
        .collect();
    Ok(FitResult {
        alpha,
        pairs_used: pairs.to_vec(),
        residuals,
        max_abs_residual,
        excluded_fields,
        warnings,
    })
}

/// Sum of squared log residuals `sum((ln H - alpha ln T)^2)`; the fitted
/// alpha minimizes it.
pub fn log_sse(pairs: &[FitPair], alpha: f64) -> f64 {
    pairs
        .iter()
        .map(|p| {
            let r = p.h.ln() - alpha * p.t.ln();
            r * r
        })
        .sum()
}

/// `T^alpha`.
pub fn predict_power(t: f64, alpha: f64) -> Result<f64, Error> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositive("T", t));
    }
    Ok(t.powf(alpha))
}

/// `2T/3`, exactly.
pub fn predict_two_thirds(t: Rational) -> Rational {
    t.mul(Rational::new(2, 3).expect("nonzero denominator"))
}

/// Best rational for a decimal T when the exact two-thirds value is
/// reported (T is rounded to millionths).
fn t_as_rational(t: f64) -> Rational {
    Rational::approximate(t, 1_000_000).unwrap_or_else(|| Rational::from_integer(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub field: String,
    pub t: f64,
    pub h: f64,
    pub predicted: f64,
    pub residual: f64,
    /// `T != 1`.
    pub informative: bool,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub rule: Rule,
    pub alpha: f64,
    pub rows: Vec<ResidualRow>,
    /// Over rows that are not excluded.
    pub max_abs_residual: f64,
}

impl ResidualReport {
    pub fn informative_rows(&self) -> impl Iterator<Item = &ResidualRow> {
        self.rows.iter().filter(|r| r.informative)
    }
}

/// Predicted, observed and residual values per pair under `rule`. Residuals
/// are `H - predicted`. Under the two-thirds rule the excluded fields are
/// flagged and left out of the maximum.
pub fn residual_report(fit: &FitResult, rule: Rule) -> ResidualReport {
    let rows: Vec<ResidualRow> = fit
        .pairs_used
        .iter()
        .map(|p| {
            let predicted = match rule {
                Rule::Power => p.t.powf(fit.alpha),
                Rule::TwoThirds => predict_two_thirds(t_as_rational(p.t)).to_f64(),
            };
            ResidualRow {
                field: p.field.clone(),
                t: p.t,
                h: p.h,
                predicted,
                residual: p.h - predicted,
                informative: p.t != 1.0,
                excluded: rule == Rule::TwoThirds && fit.excluded_fields.contains(&p.field),
            }
        })
        .collect();
    let max_abs_residual = rows
        .iter()
        .filter(|r| !r.excluded)
        .fold(0.0_f64, |m, r| m.max(r.residual.abs()));
    ResidualReport {
        rule,
        alpha: fit.alpha,
        rows,
        max_abs_residual,
    }
}

pub const PAIRS_HEADER: &[&str] = &["field", "T", "H"];

/// Parses a `field,T,H` pairs file.
pub fn parse_fit_pairs<R: Read>(source: R) -> Result<Vec<FitPair>, IngestError> {
    let rows = ingest::read_rows(source, PAIRS_HEADER)?;
    rows.iter()
        .map(|row| {
            let field = row.get(0).to_string();
            if field.is_empty() {
                return Err(row.err(ErrorCode::BlankName, "field", "field is blank"));
            }
            let num = |idx: usize, col: &str| -> Result<f64, IngestError> {
                let v: f64 = row.get(idx).parse().map_err(|_| {
                    row.err(
                        ErrorCode::MalformedRow,
                        col,
                        format!("expected a number, got `{}`", row.get(idx)),
                    )
                })?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(row.err(
                        ErrorCode::NonPositive,
                        col,
                        format!("{col} must be positive"),
                    ));
                }
                Ok(v)
            };
            let t = num(1, "T")?;
            let h = num(2, "H")?;
            Ok(FitPair { field, t, h })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn published_pairs() -> Vec<FitPair> {
        parse_fit_pairs(data::PUBLISHED_PAIRS_CSV.as_bytes()).unwrap()
    }

    /// Direct evaluation of the closed-form sums over the published pairs.
    fn closed_form_oracle() -> f64 {
        let t = [1.0f64, 5.0, 8.0, 9.0, 13.0, 15.0, 19.0, 78.0];
        let h = [1.0f64, 3.0, 5.0, 6.0, 9.0, 10.0, 12.0, 37.0];
        let num: f64 = t.iter().zip(&h).map(|(t, h)| t.ln() * h.ln()).sum();
        let den: f64 = t.iter().map(|t| t.ln() * t.ln()).sum();
        num / den
    }

    #[test]
    fn published_pairs_alpha() {
        let fit = fit_alpha(&published_pairs()).unwrap();
        let oracle = closed_form_oracle();
        assert_relative_eq!(oracle, 0.824_898_093_408_916, epsilon = 1e-12);
        assert_relative_eq!(fit.alpha, oracle, epsilon = 1e-12);
        assert!((0.81..=0.83).contains(&fit.alpha));
        assert!(fit.warnings.is_empty());
        assert_eq!(fit.residuals.len(), 8);
        assert_eq!(fit.excluded_fields.len(), 1);
    }

    #[test]
    fn single_pair_examples() {
        assert_relative_eq!(
            fit_alpha(&[FitPair::new("x", 7.0, 7.0)]).unwrap().alpha,
            1.0
        );
        let e = std::f64::consts::E;
        assert_relative_eq!(
            fit_alpha(&[FitPair::new("x", e * e, e)]).unwrap().alpha,
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn fit_errors() {
        let e = fit_alpha(&[FitPair::new("m", 1.0, 1.0)]).unwrap_err();
        assert_eq!(e.code(), ErrorCode::NoInformativePairs);
        assert!(fit_alpha(&[]).is_err());
        assert_eq!(
            fit_alpha(&[FitPair::new("x", 0.0, 1.0)])
                .unwrap_err()
                .code(),
            ErrorCode::NonPositive
        );
        assert_eq!(
            fit_alpha(&[FitPair::new("x", 2.0, -1.0)])
                .unwrap_err()
                .code(),
            ErrorCode::NonPositive
        );
    }

    #[test]
    fn unit_t_with_other_h_warns() {
        let fit = fit_alpha(&[FitPair::new("m", 1.0, 2.0), FitPair::new("p", 4.0, 2.0)]).unwrap();
        assert_eq!(fit.warnings.len(), 1);
        assert_relative_eq!(fit.alpha, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn power_predictions() {
        assert_eq!(predict_power(1.0, 0.37).unwrap(), 1.0);
        // Oracle: 9^0.82 = exp(0.82 ln 9) = 6.0601, 78^0.82 = 35.6055.
        let nine = (0.82 * 9f64.ln()).exp();
        let seventy_eight = (0.82 * 78f64.ln()).exp();
        assert_relative_eq!(predict_power(9.0, 0.82).unwrap(), nine, epsilon = 1e-12);
        assert!((nine - 6.0).abs() < 0.1);
        assert_relative_eq!(seventy_eight, 35.6055, epsilon = 1e-4);
        assert_relative_eq!(
            predict_power(78.0, 0.82).unwrap(),
            seventy_eight,
            epsilon = 1e-12
        );
        assert!(predict_power(0.0, 0.82).is_err());
    }

    #[test]
    fn two_thirds_predictions() {
        let r = |n| Rational::from_integer(n);
        assert_eq!(predict_two_thirds(r(15)), r(10));
        assert_eq!(predict_two_thirds(r(3)), r(2));
        assert_eq!(predict_two_thirds(r(78)), r(52));
        assert_eq!(predict_two_thirds(r(19)), Rational::new(38, 3).unwrap());
    }

    #[test]
    fn residual_reports() {
        let pairs = published_pairs();
        let mut fit = fit_alpha(&pairs).unwrap();
        fit.alpha = 0.82;
        let power = residual_report(&fit, Rule::Power);
        // Oracle: recompute |T^0.82 - H| per pair.
        let oracle = pairs
            .iter()
            .map(|p| (p.t.powf(0.82) - p.h).abs())
            .fold(0.0, f64::max);
        assert_relative_eq!(power.max_abs_residual, oracle, epsilon = 1e-12);
        assert!(power.max_abs_residual <= 1.5);

        let tt = residual_report(&fit, Rule::TwoThirds);
        let flagged: Vec<&str> = tt
            .rows
            .iter()
            .filter(|r| r.excluded)
            .map(|r| r.field.as_str())
            .collect();
        assert_eq!(flagged, vec!["Clinical medicine and biomedical research"]);
        assert!(tt.max_abs_residual <= 1.0);
        let excluded = tt.rows.iter().find(|r| r.excluded).unwrap();
        assert_eq!(excluded.residual, 37.0 - 52.0);
    }

    #[test]
    fn unit_only_report_has_no_informative_rows() {
        let fit = FitResult {
            alpha: 0.82,
            pairs_used: vec![FitPair::new("Mathematics", 1.0, 1.0)],
            residuals: vec![0.0],
            max_abs_residual: 0.0,
            excluded_fields: BTreeSet::new(),
            warnings: vec![],
        };
        let report = residual_report(&fit, Rule::Power);
        assert_eq!(report.informative_rows().count(), 0);
        assert_eq!(report.max_abs_residual, 0.0);
    }

    #[test]
    fn pairs_file_errors() {
        assert!(parse_fit_pairs("field,T,H\nx,0,1\n".as_bytes()).is_err());
        assert!(parse_fit_pairs("field,T,H\nx,a,1\n".as_bytes()).is_err());
        assert!(parse_fit_pairs("field,t,h\n".as_bytes()).is_err());
    }

    fn pairs_strategy() -> impl Strategy<Value = Vec<FitPair>> {
        prop::collection::vec((1.5f64..200.0, 0.5f64..100.0), 1..10).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (t, h))| FitPair::new(format!("f{i}"), t, h))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reorder_and_duplicate_invariant(pairs in pairs_strategy()) {
            let a = fit_alpha(&pairs).unwrap().alpha;
            let mut rev = pairs.clone();
            rev.reverse();
            let mut doubled = pairs.clone();
            doubled.extend(pairs.iter().cloned());
            prop_assert!((fit_alpha(&rev).unwrap().alpha - a).abs() < 1e-12);
            prop_assert!((fit_alpha(&doubled).unwrap().alpha - a).abs() < 1e-12);
        }

        #[test]
        fn single_pair_inverts_exactly(t in 1.01f64..500.0, h in 0.1f64..500.0) {
            let fit = fit_alpha(&[FitPair::new("x", t, h)]).unwrap();
            let back = predict_power(t, fit.alpha).unwrap();
            prop_assert!((back - h).abs() <= 1e-9 * h.max(1.0));
        }

        #[test]
        fn alpha_increases_with_h(pairs in pairs_strategy(), idx in 0usize..10, bump in 0.01f64..10.0) {
            let a = fit_alpha(&pairs).unwrap().alpha;
            let mut raised = pairs.clone();
            let i = idx % raised.len();
            raised[i].h += bump;
            prop_assert!(fit_alpha(&raised).unwrap().alpha > a);
        }

        #[test]
        fn closed_form_is_least_squares_minimum(pairs in pairs_strategy()) {
            let a = fit_alpha(&pairs).unwrap().alpha;
            let at = log_sse(&pairs, a);
            prop_assert!(log_sse(&pairs, a + 1e-3) >= at);
            prop_assert!(log_sse(&pairs, a - 1e-3) >= at);
        }
    }
}
