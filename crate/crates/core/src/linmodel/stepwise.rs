use serde::{Deserialize, Serialize};

use super::design::{response, Design};
use super::ols::{ols_fit_design, OlsFit};
use crate::data::DataTable;
use crate::error::{Error, Result};

/// Entry and removal p-value thresholds for [`Criterion::PValue`].
pub const P_ENTER: f64 = 0.05;
pub const P_REMOVE: f64 = 0.10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Aic,
    PValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Start,
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub action: StepAction,
    pub term: Option<String>,
    pub aic: f64,
    /// p value of the term that entered or left, in p-value mode.
    pub p_value: Option<f64>,
    pub model: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseResult {
    pub direction: Direction,
    pub criterion: Criterion,
    pub selected: Vec<String>,
    pub fit: OlsFit,
    pub trace: Vec<StepRecord>,
}

struct Searcher<'a> {
    table: &'a DataTable,
    response: &'a str,
    candidates: &'a [String],
}

impl Searcher<'_> {
    /// Fits the model holding the flagged candidates, in candidate order.
    fn fit(&self, included: &[bool]) -> Result<OlsFit> {
        let terms: Vec<String> = self
            .candidates
            .iter()
            .zip(included)
            .filter(|(_, &on)| on)
            .map(|(c, _)| c.clone())
            .collect();
        let design = if terms.is_empty() {
            Design::intercept_only(self.table.n_rows())
        } else {
            Design::from_table(self.table, &terms, true)?
        };
        ols_fit_design(&design, &response(self.table, self.response)?, self.response)
    }

    fn toggled(&self, included: &[bool], j: usize) -> Option<(Vec<bool>, OlsFit)> {
        let mut next = included.to_vec();
        next[j] = !next[j];
        // candidates that make the design singular are skipped
        self.fit(&next).ok().map(|f| (next, f))
    }

    fn record(&self, action: StepAction, j: Option<usize>, fit: &OlsFit, p: Option<f64>) -> StepRecord {
        StepRecord {
            action,
            term: j.map(|j| self.candidates[j].clone()),
            aic: fit.aic,
            p_value: p,
            model: fit.terms[1..].to_vec(),
        }
    }
}

/// Greedy stepwise OLS selection. In AIC mode every step takes the single
/// add/remove move with the lowest AIC, provided it improves on the current
/// model. In p-value mode terms enter at p < 0.05 and leave at p > 0.10.
pub fn stepwise(
    table: &DataTable,
    response_name: &str,
    candidates: &[String],
    direction: Direction,
    criterion: Criterion,
) -> Result<StepwiseResult> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let s = Searcher {
        table,
        response: response_name,
        candidates,
    };
    let k = candidates.len();
    let mut included = vec![direction == Direction::Backward; k];
    let mut fit = s.fit(&included)?;
    let mut trace = vec![s.record(StepAction::Start, None, &fit, None)];
    let can_add = direction != Direction::Backward;
    let can_remove = direction != Direction::Forward;
    // AIC strictly decreases so it cannot cycle; the cap guards p-value mode.
    let max_steps = 4 * k + 4;

    for _ in 0..max_steps {
        let moved = match criterion {
            Criterion::Aic => {
                let best = (0..k)
                    .filter(|&j| if included[j] { can_remove } else { can_add })
                    .filter_map(|j| s.toggled(&included, j).map(|(inc, f)| (j, inc, f)))
                    .min_by(|a, b| a.2.aic.total_cmp(&b.2.aic));
                match best {
                    Some((j, inc, f)) if f.aic < fit.aic - 1e-10 => {
                        let action = if inc[j] { StepAction::Add } else { StepAction::Remove };
                        trace.push(s.record(action, Some(j), &f, None));
                        included = inc;
                        fit = f;
                        true
                    }
                    _ => false,
                }
            }
            Criterion::PValue => {
                let mut moved = false;
                if can_add {
                    let best = (0..k)
                        .filter(|&j| !included[j])
                        .filter_map(|j| {
                            let (inc, f) = s.toggled(&included, j)?;
                            let p = f.p_value(&candidates[j])?;
                            Some((j, inc, f, p))
                        })
                        .min_by(|a, b| a.3.total_cmp(&b.3));
                    if let Some((j, inc, f, p)) = best {
                        if p < P_ENTER {
                            trace.push(s.record(StepAction::Add, Some(j), &f, Some(p)));
                            included = inc;
                            fit = f;
                            moved = true;
                        }
                    }
                }
                if can_remove {
                    let worst = (0..k)
                        .filter(|&j| included[j])
                        .filter_map(|j| fit.p_value(&candidates[j]).map(|p| (j, p)))
                        .max_by(|a, b| a.1.total_cmp(&b.1));
                    if let Some((j, p)) = worst {
                        if p > P_REMOVE {
                            if let Some((inc, f)) = s.toggled(&included, j) {
                                trace.push(s.record(StepAction::Remove, Some(j), &f, Some(p)));
                                included = inc;
                                fit = f;
                                moved = true;
                            }
                        }
                    }
                }
                moved
            }
        };
        if !moved {
            break;
        }
    }

    Ok(StepwiseResult {
        direction,
        criterion,
        selected: fit.terms[1..].to_vec(),
        fit,
        trace,
    })
}
