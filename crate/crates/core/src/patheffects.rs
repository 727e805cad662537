//! Mediation (Baron & Kenny steps with a case-resampling bootstrap of the
//! indirect effect) and moderation (centered interaction term, simple slopes,
//! median-split subgroups).

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataTable;
use crate::error::{Error, Result};
use crate::linmodel::{
    least_squares, logit_fit, logit_fit_design, ols_fit, ols_fit_design, Design, LogitFit, OlsFit,
};
use crate::stats::{self, RngStream};

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    #[default]
    Continuous,
    Binary,
}

/// Either kind of fitted outcome model, addressed by term name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Fitted {
    Ols(OlsFit),
    Logit(LogitFit),
}

impl Fitted {
    pub fn fit(table: &DataTable, y: &str, predictors: &[String], kind: OutcomeKind) -> Result<Self> {
        Ok(match kind {
            OutcomeKind::Continuous => Fitted::Ols(ols_fit(table, y, predictors, true)?),
            OutcomeKind::Binary => Fitted::Logit(logit_fit(table, y, predictors)?),
        })
    }

    pub fn estimate(&self, term: &str) -> Option<PathEstimate> {
        let (c, s, p) = match self {
            Fitted::Ols(f) => (f.coef(term)?, f.se(term)?, f.p_value(term)?),
            Fitted::Logit(f) => (f.coef(term)?, f.se(term)?, f.p_value(term)?),
        };
        Some(PathEstimate {
            coef: c,
            se: s,
            p_value: p,
        })
    }

    pub fn cov(&self, a: &str, b: &str) -> Option<f64> {
        match self {
            Fitted::Ols(f) => f.cov(a, b),
            Fitted::Logit(f) => f.cov(a, b),
        }
    }

    /// Two-sided p value for a linear combination's test statistic: t with
    /// the residual df for OLS, standard normal for logit.
    fn p_for(&self, stat: f64) -> f64 {
        match self {
            Fitted::Ols(f) => crate::linmodel::two_sided_t(stat, f.df_resid as f64),
            Fitted::Logit(_) => crate::linmodel::two_sided_z(stat),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEstimate {
    pub coef: f64,
    pub se: f64,
    pub p_value: f64,
}

impl PathEstimate {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// The variables of one mediation analysis, X → M → Y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationModel {
    pub x: String,
    pub m: String,
    pub y: String,
    #[serde(default)]
    pub controls: Vec<String>,
    #[serde(default)]
    pub outcome_kind: OutcomeKind,
}

impl MediationModel {
    fn a_terms(&self) -> Vec<String> {
        std::iter::once(self.x.clone())
            .chain(self.controls.iter().cloned())
            .collect()
    }

    fn b_terms(&self) -> Vec<String> {
        [self.x.clone(), self.m.clone()]
            .into_iter()
            .chain(self.controls.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediationClass {
    Full,
    Partial,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
    /// Abort when more than this share of resamples fail to fit.
    pub max_failure_rate: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 5000,
            level: 0.95,
            seed: crate::scenario::DEFAULT_SEED,
            max_failure_rate: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub resamples: usize,
    pub failures: usize,
    pub mean: f64,
    pub sd: f64,
    pub seed: Option<u64>,
}

impl BootstrapSummary {
    pub fn excludes_zero(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationReport {
    pub model: MediationModel,
    /// X → M
    pub a: PathEstimate,
    /// M → Y controlling for X
    pub b: PathEstimate,
    /// total X → Y
    pub c: PathEstimate,
    /// direct X → Y controlling for M
    pub c_prime: PathEstimate,
    pub indirect: f64,
    pub alpha: f64,
    pub classification: MediationClass,
    pub bootstrap: Option<BootstrapSummary>,
    pub note: Option<String>,
}

/// Full mediation needs a, b and c significant with c′ not; partial needs a,
/// b and c′ significant. Anything else is no mediation.
pub fn classify(a: &PathEstimate, b: &PathEstimate, c: &PathEstimate, c_prime: &PathEstimate, alpha: f64) -> MediationClass {
    let sig = |e: &PathEstimate| e.significant(alpha);
    if !(sig(a) && sig(b)) {
        MediationClass::None
    } else if sig(c_prime) {
        MediationClass::Partial
    } else if sig(c) {
        MediationClass::Full
    } else {
        MediationClass::None
    }
}

/// The four mediation regressions: total effect c (Y ~ X + controls), path a
/// (M ~ X + controls), and paths b and c′ (Y ~ X + M + controls). Outcome
/// models are OLS for continuous Y and logit for binary Y.
pub fn baron_kenny(table: &DataTable, model: &MediationModel) -> Result<MediationReport> {
    let a_terms = model.a_terms();
    let total = Fitted::fit(table, &model.y, &a_terms, model.outcome_kind)?;
    let a_fit = ols_fit(table, &model.m, &a_terms, true)?;
    let direct = Fitted::fit(table, &model.y, &model.b_terms(), model.outcome_kind)?;

    let a = Fitted::Ols(a_fit).estimate(&model.x).expect("x in a-model");
    let c = total.estimate(&model.x).expect("x in total model");
    let b = direct.estimate(&model.m).expect("m in direct model");
    let c_prime = direct.estimate(&model.x).expect("x in direct model");
    let note = (model.outcome_kind == OutcomeKind::Binary).then(|| {
        "a is an OLS slope and b a log-odds coefficient; a·b mixes the two scales".to_string()
    });
    Ok(MediationReport {
        model: model.clone(),
        a,
        b,
        c,
        c_prime,
        indirect: a.coef * b.coef,
        alpha: ALPHA,
        classification: classify(&a, &b, &c, &c_prime, ALPHA),
        bootstrap: None,
        note,
    })
}

/// [`baron_kenny`] plus the bootstrap interval for a·b.
pub fn mediation(table: &DataTable, model: &MediationModel, boot: &BootstrapConfig) -> Result<MediationReport> {
    let mut report = baron_kenny(table, model)?;
    report.bootstrap = Some(bootstrap_indirect(table, model, boot)?);
    Ok(report)
}

/// a·b on one resample; `None` when either model cannot be fitted.
pub fn indirect_effect(table: &DataTable, model: &MediationModel) -> Option<f64> {
    let a_design = Design::from_table(table, &model.a_terms(), true).ok()?;
    let m = DVector::from_column_slice(table.values(&model.m).ok()?);
    let a = least_squares(&a_design, &m).ok()?[1];
    let b_design = Design::from_table(table, &model.b_terms(), true).ok()?;
    let y = DVector::from_column_slice(table.values(&model.y).ok()?);
    let b = match model.outcome_kind {
        OutcomeKind::Continuous => least_squares(&b_design, &y).ok()?[2],
        OutcomeKind::Binary => logit_fit_design(&b_design, &y, &model.y).ok()?.coefficients[2],
    };
    let ab = a * b;
    ab.is_finite().then_some(ab)
}

/// Percentile bootstrap interval for the indirect effect. Resample `r`
/// draws its n row indices from stream `(seed, r)`, so the result does not
/// depend on how resamples are scheduled across threads.
pub fn bootstrap_indirect(
    table: &DataTable,
    model: &MediationModel,
    cfg: &BootstrapConfig,
) -> Result<BootstrapSummary> {
    if cfg.resamples == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one resample".into()));
    }
    let n = table.n_rows();
    let estimates: Vec<Option<f64>> = (0..cfg.resamples)
        .into_par_iter()
        .map(|r| {
            let rows = resample_rows(cfg.seed, r as u64, n);
            indirect_effect(&table.select_rows(&rows), model)
        })
        .collect();
    let mut summary = summarize(estimates, cfg.level, cfg.max_failure_rate)?;
    summary.seed = Some(cfg.seed);
    Ok(summary)
}

/// Bootstrap over caller-supplied resamples, e.g. an exhaustive enumeration.
pub fn bootstrap_indirect_from_indices(
    table: &DataTable,
    model: &MediationModel,
    resamples: &[Vec<usize>],
    level: f64,
    max_failure_rate: f64,
) -> Result<BootstrapSummary> {
    let estimates = resamples
        .par_iter()
        .map(|rows| indirect_effect(&table.select_rows(rows), model))
        .collect();
    summarize(estimates, level, max_failure_rate)
}

pub fn resample_rows(seed: u64, resample: u64, n: usize) -> Vec<usize> {
    let mut rng = RngStream::new(seed, resample);
    (0..n).map(|_| rng.index(n)).collect()
}

fn summarize(estimates: Vec<Option<f64>>, level: f64, max_failure_rate: f64) -> Result<BootstrapSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let total = estimates.len();
    let mut ok: Vec<f64> = estimates.into_iter().flatten().collect();
    let failures = total - ok.len();
    if ok.is_empty() || failures as f64 > max_failure_rate * total as f64 {
        return Err(Error::BootstrapFailures { failed: failures, total });
    }
    ok.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapSummary {
        lower: stats::quantile_sorted(&ok, tail)?,
        upper: stats::quantile_sorted(&ok, 1.0 - tail)?,
        level,
        resamples: total,
        failures,
        mean: stats::mean(&ok),
        sd: if ok.len() > 1 { stats::sd(&ok) } else { 0.0 },
        seed: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModerationModel {
    pub x: String,
    pub moderator: String,
    pub y: String,
    #[serde(default)]
    pub controls: Vec<String>,
    #[serde(default)]
    pub outcome_kind: OutcomeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleSlope {
    pub label: String,
    /// Moderator value on the centered scale.
    pub moderator_level: f64,
    pub slope: f64,
    pub se: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupSlope {
    pub label: String,
    pub n: usize,
    pub slope: f64,
    pub se: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModerationReport {
    pub model: ModerationModel,
    pub interaction_term: String,
    pub interaction: PathEstimate,
    pub x_main: PathEstimate,
    pub moderator_main: PathEstimate,
    pub moderator_mean: f64,
    pub moderator_sd: f64,
    /// At moderator mean − 1 sd, mean, mean + 1 sd.
    pub simple_slopes: Vec<SimpleSlope>,
    /// Separate fits on the median split: low (≤ median) and high.
    pub subgroups: Vec<SubgroupSlope>,
    pub fit: Fitted,
}

impl ModerationReport {
    pub fn subgroup(&self, label: &str) -> Option<&SubgroupSlope> {
        self.subgroups.iter().find(|s| s.label == label)
    }
}

/// Interaction model on mean-centered x and moderator:
/// y ~ x + mod + x·mod + controls.
pub fn moderation(table: &DataTable, model: &ModerationModel) -> Result<ModerationReport> {
    let x = table.values(&model.x)?;
    let w = table.values(&model.moderator)?;
    let w_sd = stats::sd(w);
    if !(w_sd > 0.0) {
        return Err(Error::ZeroVariance(model.moderator.clone()));
    }
    let (x_mean, w_mean) = (stats::mean(x), stats::mean(w));
    let xc: Vec<f64> = x.iter().map(|v| v - x_mean).collect();
    let wc: Vec<f64> = w.iter().map(|v| v - w_mean).collect();
    let prod: Vec<f64> = xc.iter().zip(&wc).map(|(a, b)| a * b).collect();
    let int_name = format!("{}:{}", model.x, model.moderator);

    let mut names = vec![model.x.clone(), model.moderator.clone(), int_name.clone()];
    let mut cols: Vec<&[f64]> = vec![&xc, &wc, &prod];
    for c in &model.controls {
        names.push(c.clone());
        cols.push(table.values(c)?);
    }
    let design = Design::from_slices(&names, &cols, true)?;
    let y = DVector::from_column_slice(table.values(&model.y)?);
    let fit = match model.outcome_kind {
        OutcomeKind::Continuous => Fitted::Ols(ols_fit_design(&design, &y, &model.y)?),
        OutcomeKind::Binary => Fitted::Logit(logit_fit_design(&design, &y, &model.y)?),
    };

    let est = |t: &str| fit.estimate(t).expect("term in design");
    let (bx, bi) = (est(&model.x), est(&int_name));
    let vxx = bx.se * bx.se;
    let vii = bi.se * bi.se;
    let vxi = fit.cov(&model.x, &int_name).expect("term in design");
    let simple_slopes = [("-1sd", -w_sd), ("mean", 0.0), ("+1sd", w_sd)]
        .into_iter()
        .map(|(label, level)| {
            let slope = bx.coef + bi.coef * level;
            let se = (vxx + level * level * vii + 2.0 * level * vxi).max(0.0).sqrt();
            SimpleSlope {
                label: label.to_string(),
                moderator_level: level,
                slope,
                se,
                p_value: fit.p_for(crate::linmodel::test_stat(slope, se)),
            }
        })
        .collect();

    let median = stats::median(w)?;
    let low: Vec<usize> = (0..w.len()).filter(|&i| w[i] <= median).collect();
    let high: Vec<usize> = (0..w.len()).filter(|&i| w[i] > median).collect();
    let sub_terms: Vec<String> = std::iter::once(model.x.clone())
        .chain(model.controls.iter().cloned())
        .collect();
    let subgroups = [("low", low), ("high", high)]
        .into_iter()
        .map(|(label, rows)| {
            let part = table.select_rows(&rows);
            let f = Fitted::fit(&part, &model.y, &sub_terms, model.outcome_kind)?;
            let e = f.estimate(&model.x).expect("x in subgroup model");
            Ok(SubgroupSlope {
                label: label.to_string(),
                n: rows.len(),
                slope: e.coef,
                se: e.se,
                p_value: e.p_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ModerationReport {
        model: model.clone(),
        interaction_term: int_name.clone(),
        interaction: bi,
        x_main: bx,
        moderator_main: est(&model.moderator),
        moderator_mean: w_mean,
        moderator_sd: w_sd,
        simple_slopes,
        subgroups,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(p: f64) -> PathEstimate {
        PathEstimate {
            coef: 1.0,
            se: 1.0,
            p_value: p,
        }
    }

    #[test]
    fn classification_rules() {
        let (s, ns) = (pe(0.01), pe(0.4));
        assert_eq!(classify(&s, &s, &s, &ns, ALPHA), MediationClass::Full);
        assert_eq!(classify(&s, &s, &s, &s, ALPHA), MediationClass::Partial);
        assert_eq!(classify(&ns, &s, &s, &ns, ALPHA), MediationClass::None);
        assert_eq!(classify(&s, &ns, &s, &s, ALPHA), MediationClass::None);
        assert_eq!(classify(&s, &s, &ns, &ns, ALPHA), MediationClass::None);
    }

    #[test]
    fn failure_budget_enforced() {
        let est = vec![Some(1.0), None, Some(2.0), Some(3.0)];
        assert!(matches!(
            summarize(est.clone(), 0.95, 0.10),
            Err(Error::BootstrapFailures { failed: 1, total: 4 })
        ));
        let s = summarize(est, 0.5, 0.5).unwrap();
        assert_eq!((s.lower, s.upper, s.failures), (1.5, 2.5, 1));
    }

    #[test]
    fn resample_streams_are_stable() {
        assert_eq!(resample_rows(42, 7, 20), resample_rows(42, 7, 20));
        assert_ne!(resample_rows(42, 7, 20), resample_rows(42, 8, 20));
        assert!(resample_rows(1, 0, 5).iter().all(|&i| i < 5));
    }
}
