use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::{response, Design};
use super::{test_stat, two_sided_z};
use crate::data::DataTable;
use crate::error::{Error, Result};

pub const LOGIT_MAX_ITER: usize = 50;
const SCORE_TOL: f64 = 1e-8;
const STEP_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;
/// |η| beyond this means fitted probabilities within ~3e-7 of 0 or 1, which
/// only happens when the coefficients are running off to infinity.
const SEPARATION_ETA: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitFit {
    pub response: String,
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub z_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub log_likelihood: f64,
    /// −2ℓ + 2k.
    pub aic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
    /// Log-likelihood after each accepted step, starting from β = 0.
    pub ll_trace: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub linear_predictor: Vec<f64>,
}

impl LogitFit {
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

pub fn logit_fit(table: &DataTable, response_name: &str, predictors: &[String]) -> Result<LogitFit> {
    let design = Design::from_table(table, predictors, true)?;
    let y = response(table, response_name)?;
    logit_fit_design(&design, &y, response_name)
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// Bernoulli log-likelihood, evaluated as y·η − log(1 + e^η) in a form that
/// stays finite for large |η|.
fn log_likelihood(y: &DVector<f64>, eta: &DVector<f64>) -> f64 {
    y.iter()
        .zip(eta.iter())
        .map(|(&yi, &e)| {
            let softplus = if e > 0.0 {
                e + (-e).exp().ln_1p()
            } else {
                e.exp().ln_1p()
            };
            yi * e - softplus
        })
        .sum()
}

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares (Newton–Raphson on the Bernoulli likelihood) with step-halving
/// whenever a full step would lower the likelihood.
pub fn logit_fit_design(design: &Design, y: &DVector<f64>, response_name: &str) -> Result<LogitFit> {
    let (n, p) = (design.n(), design.p());
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::NotBinary(response_name.to_string()));
    }
    let positives = y.iter().filter(|&&v| v == 1.0).count();
    if positives == 0 || positives == n {
        return Err(Error::SingleClass(response_name.to_string()));
    }
    if n <= p {
        return Err(Error::InsufficientRows { rows: n, terms: p });
    }
    // Reuses the QR rank check so dependent columns are reported by name.
    super::design::scaled_qr(design)?;

    let x = &design.x;
    let mut beta = DVector::zeros(p);
    let mut eta = x * &beta;
    let mut ll = log_likelihood(y, &eta);
    let mut ll_trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < LOGIT_MAX_ITER {
        let probs = eta.map(sigmoid);
        let score = x.transpose() * (y - &probs);
        if score.amax() < SCORE_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let info = weighted_gram(x, &probs);
        let Some(chol) = info.cholesky() else {
            return Err(Error::RankDeficient(design.names.clone()));
        };
        let delta = chol.solve(&score);

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let candidate = &beta + &delta * step;
            let cand_eta = x * &candidate;
            let cand_ll = log_likelihood(y, &cand_eta);
            if cand_ll >= ll {
                accepted = Some((candidate, cand_eta, cand_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, cand_eta, cand_ll)) = accepted else {
            // No ascent direction left at floating-point resolution.
            converged = true;
            break;
        };
        let change = (&delta * step).amax();
        beta = candidate;
        eta = cand_eta;
        ll = cand_ll;
        ll_trace.push(ll);
        if change < STEP_TOL {
            converged = true;
            break;
        }
    }

    let max_eta = eta.amax();
    if max_eta > SEPARATION_ETA {
        return Err(Error::Separation {
            iterations,
            max_eta,
        });
    }

    let probs = eta.map(sigmoid);
    let info = weighted_gram(x, &probs);
    let cov = info
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(design.names.clone()))?;
    let std_errors: Vec<f64> = (0..p).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    let z_values: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &s)| test_stat(b, s))
        .collect();
    Ok(LogitFit {
        response: response_name.to_string(),
        terms: design.names.clone(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        p_values: z_values.iter().map(|&z| two_sided_z(z)).collect(),
        z_values,
        log_likelihood: ll,
        aic: -2.0 * ll + 2.0 * p as f64,
        converged,
        iterations,
        n,
        ll_trace,
        covariance: (0..p).map(|i| (0..p).map(|j| cov[(i, j)]).collect()).collect(),
        fitted: probs.iter().copied().collect(),
        linear_predictor: eta.iter().copied().collect(),
    })
}

/// XᵀWX with W = diag(p(1 − p)).
fn weighted_gram(x: &DMatrix<f64>, probs: &DVector<f64>) -> DMatrix<f64> {
    let mut xw = x.clone();
    for (i, mut row) in xw.row_iter_mut().enumerate() {
        row *= probs[i] * (1.0 - probs[i]);
    }
    x.transpose() * xw
}
