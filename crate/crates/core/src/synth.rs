//! Synthetic data generation from a scenario, and the quality gate that
//! checks a generated (or ingested) table against the scenario it claims to
//! follow.

use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnKind, DataTable};
use crate::error::{Error, Result};
use crate::linmodel::{ols_fit_design, Design};
use crate::scenario::{validate_scenario, Distribution, ScenarioSpec, VariableKind, VariableSpec};
use crate::stats::{self, RngStream};

/// Generates `spec.n` rows.
///
/// Sampled variables draw from their distribution. Derived variables are
/// computed in topological order as
/// `intercept + Σ w·source + Σ w·(a·b) + ε`, ε ~ N(0, noise sd); binary
/// outcomes pass that linear predictor through the logistic function and
/// draw a Bernoulli. Variable `i` uses random stream `(seed, i)`, so adding
/// a variable leaves the others' draws unchanged.
pub fn generate(spec: &ScenarioSpec) -> Result<DataTable> {
    let violations = validate_scenario(spec);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }
    let n = spec.n;
    let order = spec.topological_order()?;
    let mut values: Vec<Option<Vec<f64>>> = vec![None; spec.variables.len()];

    for idx in order {
        let var = &spec.variables[idx];
        let mut rng = RngStream::new(spec.seed, idx as u64);
        let col = if var.role.is_derived() {
            derive(spec, var, &values, &mut rng, n)?
        } else {
            sample(var, &mut rng, n)?
        };
        values[idx] = Some(col);
    }

    let columns = spec
        .variables
        .iter()
        .zip(values)
        .map(|(v, vals)| {
            let values = vals.expect("every variable visited");
            match &v.kind {
                VariableKind::Continuous => Column::continuous(&v.name, values),
                VariableKind::Binary => Column::binary(&v.name, values),
                VariableKind::Categorical { levels } => Column {
                    name: v.name.clone(),
                    kind: ColumnKind::Categorical {
                        levels: levels.clone(),
                    },
                    values,
                },
            }
        })
        .collect();
    DataTable::new(columns)
}

fn sample(var: &VariableSpec, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
    match var.dist.as_ref() {
        Some(Distribution::Normal { mean, sd }) => (0..n).map(|_| rng.normal(*mean, *sd)).collect(),
        Some(Distribution::Bernoulli { p }) => Ok((0..n).map(|_| f64::from(u8::from(rng.bernoulli(*p)))).collect()),
        Some(Distribution::Categorical { probs }) => {
            Ok((0..n).map(|_| rng.categorical(probs) as f64).collect())
        }
        None => Err(Error::InvalidScenario(vec![format!(
            "missing distribution: {}",
            var.name
        )])),
    }
}

fn derive(
    spec: &ScenarioSpec,
    var: &VariableSpec,
    values: &[Option<Vec<f64>>],
    rng: &mut RngStream,
    n: usize,
) -> Result<Vec<f64>> {
    let col = |name: &str| -> &[f64] {
        let i = spec.index_of(name).expect("validated endpoint");
        values[i].as_deref().expect("parents generated first")
    };
    let mut lin = vec![var.intercept; n];
    for p in spec.paths_into(&var.name) {
        for (l, s) in lin.iter_mut().zip(col(&p.source)) {
            *l += p.weight * s;
        }
    }
    for it in spec.interactions_into(&var.name) {
        let (a, b) = (col(&it.factor_a), col(&it.factor_b));
        for i in 0..n {
            lin[i] += it.weight * a[i] * b[i];
        }
    }
    let noise_sd = spec.noise_sd(&var.name);
    let binary = var.kind == VariableKind::Binary;
    let mut out = Vec::with_capacity(n);
    for l in lin {
        let eta = if noise_sd > 0.0 {
            l + rng.normal(0.0, noise_sd)?
        } else {
            l
        };
        out.push(if binary {
            f64::from(u8::from(rng.bernoulli(logistic(eta))))
        } else {
            eta
        });
    }
    Ok(out)
}

pub fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// Replaces a categorical column with reference-coded indicators.
pub fn one_hot(table: &DataTable, column: &str) -> Result<DataTable> {
    table.one_hot(column)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Structure,
    Distribution,
    SignConsistency,
    Regressibility,
    Completeness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityCheck {
    pub gate: Gate,
    pub subject: String,
    pub target: String,
    pub observed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub checks: Vec<QualityCheck>,
    pub passed: bool,
}

impl QualityReport {
    pub fn gate_passed(&self, gate: Gate) -> bool {
        self.checks.iter().filter(|c| c.gate == gate).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &QualityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Minimum R² of a continuous derived variable on its declared parents.
pub const MIN_PARENT_R2: f64 = 0.2;
/// Relative tolerance on sampled standard deviations.
pub const SD_TOLERANCE: f64 = 0.2;
/// |weight| at or above which the sign of the marginal correlation must agree.
pub const SIGN_CHECK_MIN_WEIGHT: f64 = 0.1;

/// Runs the five gates: structure, distribution, sign consistency,
/// regressibility and completeness. The table may hold categorical columns
/// either raw or one-hot coded.
pub fn quality_gate(table: &DataTable, spec: &ScenarioSpec) -> Result<QualityReport> {
    let mut checks = Vec::new();
    let n = table.n_rows();

    // (a) structure
    for v in &spec.variables {
        let ok = match (&v.kind, table.column(&v.name)) {
            (VariableKind::Continuous, Some(c)) => c.kind == ColumnKind::Continuous,
            (VariableKind::Binary, Some(c)) => {
                c.kind == ColumnKind::Binary && c.values.iter().all(|&x| x == 0.0 || x == 1.0)
            }
            (VariableKind::Categorical { levels }, Some(c)) => {
                c.kind == ColumnKind::Categorical { levels: levels.clone() }
            }
            (VariableKind::Categorical { levels }, None) => {
                let present = levels[1..]
                    .iter()
                    .filter(|l| table.column(&format!("{}={l}", v.name)).is_some())
                    .count();
                if present == 0 {
                    return Err(Error::ColumnMismatch(format!("no column for `{}`", v.name)));
                }
                present == levels.len() - 1
            }
            (_, None) => {
                return Err(Error::ColumnMismatch(format!("no column for `{}`", v.name)));
            }
        };
        checks.push(QualityCheck {
            gate: Gate::Structure,
            subject: v.name.clone(),
            target: format!("{:?} column", v.kind),
            observed: f64::from(u8::from(ok)),
            passed: ok,
        });
    }

    // (e) completeness, first so later gates can skip broken columns
    for c in table.columns() {
        let bad = c.values.iter().filter(|v| !v.is_finite()).count();
        checks.push(QualityCheck {
            gate: Gate::Completeness,
            subject: c.name.clone(),
            target: "0 non-finite values".into(),
            observed: bad as f64,
            passed: bad == 0,
        });
    }

    // (b) distribution
    let root_n = (n as f64).sqrt();
    for v in spec.variables.iter().filter(|v| !v.role.is_derived()) {
        match v.dist.as_ref() {
            Some(Distribution::Normal { mean, sd }) => {
                let x = table.values(&v.name)?;
                let m = stats::mean(x);
                let tol = 3.0 * sd / root_n;
                checks.push(QualityCheck {
                    gate: Gate::Distribution,
                    subject: format!("{} mean", v.name),
                    target: format!("{mean} ± {tol:.4}"),
                    observed: m,
                    passed: (m - mean).abs() <= tol,
                });
                let s = stats::sd(x);
                checks.push(QualityCheck {
                    gate: Gate::Distribution,
                    subject: format!("{} sd", v.name),
                    target: format!("{sd} ± {:.0}%", SD_TOLERANCE * 100.0),
                    observed: s,
                    passed: (s / sd - 1.0).abs() <= SD_TOLERANCE,
                });
            }
            Some(Distribution::Bernoulli { p }) => {
                let share = stats::mean(table.values(&v.name)?);
                checks.push(proportion_check(&v.name, *p, share, n));
            }
            Some(Distribution::Categorical { probs }) => {
                let VariableKind::Categorical { levels } = &v.kind else {
                    continue;
                };
                for (k, (level, &p)) in levels.iter().zip(probs).enumerate() {
                    let share = level_share(table, &v.name, levels, k);
                    checks.push(proportion_check(&format!("{}={level}", v.name), p, share, n));
                }
            }
            None => {}
        }
    }

    // (c) sign consistency
    for p in spec.paths.iter().filter(|p| p.weight.abs() >= SIGN_CHECK_MIN_WEIGHT) {
        let r = stats::pearson_corr(table.values(&p.source)?, table.values(&p.target)?)
            .unwrap_or(f64::NAN);
        checks.push(QualityCheck {
            gate: Gate::SignConsistency,
            subject: format!("{} -> {}", p.source, p.target),
            target: format!("sign {}", if p.weight > 0.0 { "+" } else { "-" }),
            observed: r,
            passed: r.signum() == p.weight.signum() && r != 0.0,
        });
    }

    // (d) regressibility
    for v in spec
        .variables
        .iter()
        .filter(|v| v.role.is_derived() && v.kind == VariableKind::Continuous)
    {
        let r2 = parent_r2(table, spec, &v.name)?;
        let Some(r2) = r2 else { continue };
        checks.push(QualityCheck {
            gate: Gate::Regressibility,
            subject: v.name.clone(),
            target: format!("R² >= {MIN_PARENT_R2}"),
            observed: r2,
            passed: r2 >= MIN_PARENT_R2,
        });
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(QualityReport { checks, passed })
}

fn proportion_check(subject: &str, p: f64, share: f64, n: usize) -> QualityCheck {
    let tol = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
    QualityCheck {
        gate: Gate::Distribution,
        subject: format!("{subject} share"),
        target: format!("{p} ± {tol:.4}"),
        observed: share,
        passed: (share - p).abs() <= tol,
    }
}

fn level_share(table: &DataTable, name: &str, levels: &[String], k: usize) -> f64 {
    let n = table.n_rows() as f64;
    if let Some(c) = table.column(name) {
        return c.values.iter().filter(|&&v| v == k as f64).count() as f64 / n;
    }
    let indicator = |l: &String| {
        table
            .column(&format!("{name}={l}"))
            .map(|c| c.values.iter().sum::<f64>() / n)
            .unwrap_or(f64::NAN)
    };
    if k == 0 {
        1.0 - levels[1..].iter().map(indicator).sum::<f64>()
    } else {
        indicator(&levels[k])
    }
}

/// R² of `target` on its path sources and interaction products; `None` when
/// it has no parents.
fn parent_r2(table: &DataTable, spec: &ScenarioSpec, target: &str) -> Result<Option<f64>> {
    let mut names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for p in spec.paths_into(target) {
        names.push(p.source.clone());
        cols.push(table.values(&p.source)?.to_vec());
    }
    for it in spec.interactions_into(target) {
        let (a, b) = (table.values(&it.factor_a)?, table.values(&it.factor_b)?);
        names.push(format!("{}:{}", it.factor_a, it.factor_b));
        cols.push(a.iter().zip(b).map(|(x, y)| x * y).collect());
    }
    if names.is_empty() {
        return Ok(None);
    }
    let y = table.values(target)?;
    if cols.iter().chain(std::iter::once(&y.to_vec())).any(|c| c.iter().any(|v| !v.is_finite())) {
        return Ok(Some(f64::NAN));
    }
    let slices: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let fit = Design::from_slices(&names, &slices, true)
        .and_then(|d| ols_fit_design(&d, &nalgebra::DVector::from_column_slice(y), target));
    Ok(Some(fit.map(|f| f.r2).unwrap_or(f64::NAN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{default_scenario, NoiseSpec, PathSpec, Role};

    fn lone(mean: f64, sd: f64, n: usize) -> ScenarioSpec {
        ScenarioSpec {
            n,
            seed: 42,
            variables: vec![VariableSpec::normal("X", Role::Exogenous, mean, sd)],
            paths: vec![],
            interactions: vec![],
            noise: vec![],
            binary_link: Default::default(),
        }
    }

    #[test]
    fn lone_variable_mean_within_sampling_bound() {
        let t = generate(&lone(10.0, 2.0, 100_000)).unwrap();
        // 3·sd/√n = 0.019
        assert!((stats::mean(t.values("X").unwrap()) - 10.0).abs() < 0.02);
    }

    #[test]
    fn noiseless_single_path() {
        let mut s = lone(0.0, 1.0, 200);
        s.variables[0].name = "X3".into();
        s.variables
            .push(VariableSpec::derived("M1", Role::Mediator, VariableKind::Continuous));
        s.paths.push(PathSpec {
            source: "X3".into(),
            target: "M1".into(),
            weight: 0.5,
        });
        s.noise.push(NoiseSpec {
            target: "M1".into(),
            sd: 0.0,
        });
        let t = generate(&s).unwrap();
        let (x, m) = (t.values("X3").unwrap(), t.values("M1").unwrap());
        assert!(x.iter().zip(m).all(|(x, m)| *m == 0.5 * x));
    }

    #[test]
    fn adding_a_variable_keeps_other_streams() {
        let s = lone(0.0, 1.0, 50);
        let mut s2 = s.clone();
        s2.variables
            .push(VariableSpec::normal("Z", Role::Exogenous, 0.0, 1.0));
        let (a, b) = (generate(&s).unwrap(), generate(&s2).unwrap());
        assert_eq!(a.values("X").unwrap(), b.values("X").unwrap());
    }

    #[test]
    fn default_shape() {
        let t = generate(&default_scenario()).unwrap();
        assert_eq!(t.n_rows(), 150);
        assert_eq!(t.n_cols(), 14);
        assert!(t.columns().iter().all(|c| c.values.iter().all(|v| v.is_finite())));
        assert!(t.values("Y1").unwrap().iter().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(t, generate(&default_scenario()).unwrap());
    }

    #[test]
    fn invalid_spec_rejected() {
        let mut s = lone(0.0, 1.0, 10);
        s.paths.push(PathSpec {
            source: "X".into(),
            target: "Q".into(),
            weight: 1.0,
        });
        assert!(matches!(generate(&s), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn quality_gate_column_mismatch() {
        let t = DataTable::from_columns([("A", vec![1., 2.])]).unwrap();
        assert!(matches!(
            quality_gate(&t, &lone(0.0, 1.0, 2)),
            Err(Error::ColumnMismatch(_))
        ));
    }
}
