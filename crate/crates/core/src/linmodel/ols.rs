use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::design::{response, scaled_qr, Design};
use super::{test_stat, two_sided_t};
use crate::data::DataTable;
use crate::error::{Error, Result};

/// Ordinary least-squares fit with classical inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub response: String,
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub residual_sd: f64,
    pub rss: f64,
    /// n·ln(RSS/n) + 2k, k counting every coefficient.
    pub aic: f64,
    pub n: usize,
    pub df_resid: usize,
    pub covariance: Vec<Vec<f64>>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl OlsFit {
    pub fn index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn coef(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.coefficients[i])
    }

    pub fn se(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.std_errors[i])
    }

    pub fn p_value(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.p_values[i])
    }

    pub fn cov(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.covariance[self.index(a)?][self.index(b)?])
    }
}

/// Fits `response ~ predictors` (plus an intercept when requested) by a
/// Householder QR of the column-normalized design.
pub fn ols_fit(
    table: &DataTable,
    response_name: &str,
    predictors: &[String],
    intercept: bool,
) -> Result<OlsFit> {
    let design = Design::from_table(table, predictors, intercept)?;
    let y = response(table, response_name)?;
    ols_fit_design(&design, &y, response_name)
}

pub fn ols_fit_design(design: &Design, y: &DVector<f64>, response_name: &str) -> Result<OlsFit> {
    let (n, p) = (design.n(), design.p());
    if n <= p {
        return Err(Error::InsufficientRows { rows: n, terms: p });
    }
    let qr = scaled_qr(design)?;
    let beta = qr.coefficients(y);
    let fitted = &design.x * &beta;
    let residuals = y - &fitted;
    let rss = residuals.norm_squared();
    let tss = if design.intercept {
        let m = y.mean();
        y.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;
    let cov = qr.xtx_inverse() * sigma2;

    let r2 = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };
    let df_model = if design.intercept { p - 1 } else { p };
    let denom = if design.intercept { n - 1 } else { n } as f64;
    let adj_r2 = 1.0 - (1.0 - r2) * denom / df_resid as f64;
    let adj_r2 = if df_model == 0 { r2.min(adj_r2) } else { adj_r2 };

    let std_errors: Vec<f64> = (0..p).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    let t_values: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &s)| test_stat(b, s))
        .collect();
    let p_values = t_values
        .iter()
        .map(|&t| two_sided_t(t, df_resid as f64))
        .collect();

    Ok(OlsFit {
        response: response_name.to_string(),
        terms: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_values,
        p_values,
        r2,
        adj_r2,
        residual_sd: sigma2.sqrt(),
        rss,
        aic: n as f64 * (rss / n as f64).ln() + 2.0 * p as f64,
        n,
        df_resid,
        covariance: (0..p)
            .map(|i| (0..p).map(|j| cov[(i, j)]).collect())
            .collect(),
        residuals: residuals.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
    })
}

/// Coefficients only. Needs full column rank but, unlike [`ols_fit_design`],
/// accepts an exactly determined system.
pub fn least_squares(design: &Design, y: &DVector<f64>) -> Result<Vec<f64>> {
    let qr = scaled_qr(design)?;
    Ok(qr.coefficients(y).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_line() {
        let t = DataTable::from_columns([("x", vec![1., 2., 3., 4.]), ("y", vec![2., 4., 6., 8.])])
            .unwrap();
        let f = ols_fit(&t, "y", &names(&["x"]), true).unwrap();
        assert!((f.coef("x").unwrap() - 2.0).abs() < 1e-12);
        assert!(f.coef("(Intercept)").unwrap().abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_normal_equations() {
        // x̄ = 1.5, ȳ = 2.25, Sxy = 4.5, Sxx = 5 → slope 0.9, intercept 0.9
        let t = DataTable::from_columns([("x", vec![0., 1., 2., 3.]), ("y", vec![1., 2., 2., 4.])])
            .unwrap();
        let f = ols_fit(&t, "y", &names(&["x"]), true).unwrap();
        assert!((f.coef("x").unwrap() - 0.9).abs() < 1e-12);
        assert!((f.coef("(Intercept)").unwrap() - 0.9).abs() < 1e-12);
        // RSS = 0.7, TSS = 4.75
        assert!((f.rss - 0.7).abs() < 1e-12);
        assert!((f.r2 - (1.0 - 0.7 / 4.75)).abs() < 1e-12);
        assert_eq!(f.df_resid, 2);
        // se(slope) = sqrt(σ²/Sxx) with σ² = 0.35
        assert!((f.se("x").unwrap() - (0.35f64 / 5.0).sqrt()).abs() < 1e-12);
        let aic = 4.0 * (0.7f64 / 4.0).ln() + 4.0;
        assert!((f.aic - aic).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_names_the_dependent_column() {
        let t = DataTable::from_columns([
            ("a", vec![1., 2., 3., 4., 5.]),
            ("b", vec![2., 1., 0., 1., 3.]),
            ("c", vec![3., 3., 3., 5., 8.]),
            ("y", vec![1., 0., 1., 2., 2.]),
        ])
        .unwrap();
        match ols_fit(&t, "y", &names(&["a", "b", "c"]), true) {
            Err(Error::RankDeficient(cols)) => assert_eq!(cols, vec!["c".to_string()]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_inputs() {
        let t = DataTable::from_columns([("x", vec![1., 1., 1.]), ("y", vec![1., 2., 3.])]).unwrap();
        assert!(matches!(
            ols_fit(&t, "y", &names(&["x"]), true),
            Err(Error::ZeroVariance(c)) if c == "x"
        ));
        let t = DataTable::from_columns([("x", vec![1., 2.]), ("y", vec![1., 3.])]).unwrap();
        assert!(matches!(
            ols_fit(&t, "y", &names(&["x"]), true),
            Err(Error::InsufficientRows { rows: 2, terms: 2 })
        ));
        assert!(matches!(
            ols_fit(&t, "y", &names(&["nope"]), true),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn intercept_only_model() {
        let t = DataTable::from_columns([("y", vec![1., 2., 3., 6.])]).unwrap();
        let f = ols_fit(&t, "y", &[], true).unwrap();
        assert_eq!(f.terms, vec!["(Intercept)"]);
        assert!((f.coefficients[0] - 3.0).abs() < 1e-12);
        assert_eq!(f.r2, 0.0);
    }
}
