//! Estimation engine: OLS with inference, VIF screening, stepwise selection,
//! logistic regression by IRLS, and ROC/AUC.

mod design;
mod logit;
mod ols;
mod roc;
mod stepwise;
mod vif;

pub use design::{Design, INTERCEPT};
pub use logit::{logit_fit, logit_fit_design, LogitFit, LOGIT_MAX_ITER};
pub use ols::{least_squares, ols_fit, ols_fit_design, OlsFit};
pub use roc::{roc_auc, RocCurve, RocPoint};
pub use stepwise::{stepwise, Criterion, Direction, StepAction, StepRecord, StepwiseResult};
pub use vif::{vif, vif_prune, VifRemoval, VifTable, VIF_THRESHOLD};

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Test statistic with the zero-standard-error case pinned: an exactly
/// determined zero coefficient gets 0, a nonzero one gets ±∞.
pub(crate) fn test_stat(coef: f64, se: f64) -> f64 {
    if se > 0.0 {
        coef / se
    } else if coef == 0.0 {
        0.0
    } else {
        coef.signum() * f64::INFINITY
    }
}

pub(crate) fn two_sided_t(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

pub(crate) fn two_sided_z(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let dist = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * dist.sf(z.abs())).clamp(0.0, 1.0)
}
