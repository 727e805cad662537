//! End-to-end orchestration: scenario → variable system → synthetic data →
//! EDA → VIF screening → multivariate models → mediation and moderation →
//! strategy evaluation (standardized-β heatmap), plus the on-disk outputs.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{Column, ColumnKind, DataTable};
use crate::error::{Error, Result};
use crate::linmodel::{roc_auc, stepwise, vif_prune, Criterion, Direction, RocCurve, StepwiseResult, VifTable, VIF_THRESHOLD};
use crate::patheffects::{
    mediation, moderation, BootstrapConfig, Fitted, MediationModel, MediationReport, ModerationModel,
    ModerationReport, OutcomeKind,
};
use crate::scenario::{validate_scenario, ScenarioSpec};
use crate::stats::{self, SummaryStats};
use crate::synth::{generate, quality_gate, QualityReport};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Scenario,
    VariableSystem,
    SyntheticData,
    Eda,
    VifScreening,
    Modeling,
    PathEffects,
    StrategyEvaluation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Scenario => "scenario",
            Stage::VariableSystem => "variable system",
            Stage::SyntheticData => "synthetic data",
            Stage::Eda => "EDA",
            Stage::VifScreening => "VIF screening",
            Stage::Modeling => "modeling",
            Stage::PathEffects => "mediation/moderation",
            Stage::StrategyEvaluation => "strategy evaluation",
        };
        f.write_str(s)
    }
}

/// A named regression formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub response: String,
    pub predictors: Vec<String>,
    #[serde(default)]
    pub kind: OutcomeKind,
}

impl ModelSpec {
    fn new(name: &str, response: &str, predictors: &[&str], kind: OutcomeKind) -> Self {
        Self {
            name: name.into(),
            response: response.into(),
            predictors: predictors.iter().map(|s| s.to_string()).collect(),
            kind,
        }
    }

    fn check_columns(&self, table: &DataTable) -> Result<()> {
        for c in std::iter::once(&self.response).chain(&self.predictors) {
            if table.column(c).is_none() {
                return Err(Error::MissingModelColumn {
                    model: self.name.clone(),
                    column: c.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Which models the analysis fits. The default reproduces the reference
/// study's three outcome models, its mediation and moderation tests, and
/// the heatmap layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub models: Vec<ModelSpec>,
    /// Stepwise cross-checks over the VIF-retained columns, by response.
    pub stepwise: Vec<String>,
    pub mediation: MediationModel,
    pub moderation: Vec<ModerationModel>,
    pub heatmap: Vec<ModelSpec>,
    /// Columns screened for collinearity; defaults to every numeric column
    /// that is not a model response.
    pub vif_columns: Option<Vec<String>>,
    pub vif_threshold: f64,
    pub bootstrap: BootstrapConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        use OutcomeKind::*;
        Self {
            models: vec![
                ModelSpec::new("Y2 model", "Y2", &["X2", "M2", "X6"], Continuous),
                ModelSpec::new("Y3 model", "Y3", &["M2", "X5"], Continuous),
                ModelSpec::new("Y1 model", "Y1", &["X3", "M1", "X6"], Binary),
            ],
            stepwise: vec!["Y2".into(), "Y3".into()],
            mediation: MediationModel {
                x: "X3".into(),
                m: "M1".into(),
                y: "Y1".into(),
                controls: vec!["X6".into()],
                outcome_kind: Binary,
            },
            moderation: vec![
                ModerationModel {
                    x: "X3".into(),
                    moderator: "MOD1".into(),
                    y: "Y1".into(),
                    controls: vec!["M1".into(), "X6".into()],
                    outcome_kind: Binary,
                },
                ModerationModel {
                    x: "X3".into(),
                    moderator: "MOD1".into(),
                    y: "M1".into(),
                    controls: vec![],
                    outcome_kind: Continuous,
                },
            ],
            heatmap: vec![
                ModelSpec::new("Y1", "Y1", &["X3", "M1", "MOD1", "X6"], Binary),
                ModelSpec::new("Y2", "Y2", &["M2", "X2", "X6"], Continuous),
                ModelSpec::new("Y3", "Y3", &["M2", "X5", "X6"], Continuous),
            ],
            vif_columns: None,
            vif_threshold: VIF_THRESHOLD,
            bootstrap: BootstrapConfig::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn responses(&self) -> Vec<&str> {
        self.models
            .iter()
            .chain(&self.heatmap)
            .map(|m| m.response.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PipelineInput {
    Scenario(ScenarioSpec),
    Table(DataTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub n: usize,
    pub bootstrap_resamples: usize,
    pub source: String,
    pub timestamp: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: String,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eda {
    pub summaries: Vec<ColumnSummary>,
    pub columns: Vec<String>,
    /// Pearson correlations; `null` where a column has zero variance.
    pub correlation: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifSection {
    pub threshold: f64,
    pub screened: Vec<String>,
    pub retained: Vec<String>,
    pub table: VifTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: Fitted,
    pub roc: Option<RocCurve>,
}

impl NamedFit {
    pub fn auc(&self) -> Option<f64> {
        self.roc.as_ref().map(|r| r.auc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelsSection {
    pub fits: Vec<NamedFit>,
    pub stepwise: Vec<StepwiseResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub terms: Vec<String>,
    pub outcomes: Vec<String>,
    /// `cells[term][outcome]`; `None` where the term is not in that model.
    pub cells: Vec<Vec<Option<f64>>>,
    pub fits: Vec<NamedFit>,
    pub note: String,
}

impl Heatmap {
    pub fn cell(&self, term: &str, outcome: &str) -> Option<f64> {
        let i = self.terms.iter().position(|t| t == term)?;
        let j = self.outcomes.iter().position(|o| o == outcome)?;
        self.cells[i][j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: String,
    pub metadata: RunMetadata,
    pub stages_completed: Vec<Stage>,
    pub scenario: Option<ScenarioSpec>,
    pub quality: Option<QualityReport>,
    pub eda: Option<Eda>,
    pub vif: Option<VifSection>,
    pub models: Option<ModelsSection>,
    pub mediation: Option<MediationReport>,
    pub moderation: Option<Vec<ModerationReport>>,
    pub heatmap: Option<Heatmap>,
    pub headline: Option<Headline>,
    pub failure: Option<StageFailure>,
    /// The table as generated or ingested, before one-hot coding.
    #[serde(skip)]
    pub data: Option<DataTable>,
}

impl PipelineReport {
    pub fn fit(&self, name: &str) -> Option<&NamedFit> {
        self.models.as_ref()?.fits.iter().find(|f| f.name == name)
    }

    pub fn quality_passed(&self) -> bool {
        self.quality.as_ref().is_none_or(|q| q.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("pipeline stage `{stage}` failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
    pub partial: Box<PipelineReport>,
}

/// Runs every stage in order. On failure the error carries the stage, the
/// cause and the report filled in up to that stage.
pub fn run_pipeline(
    input: PipelineInput,
    config: &AnalysisConfig,
) -> std::result::Result<PipelineReport, PipelineError> {
    let (seed, n, source) = match &input {
        PipelineInput::Scenario(s) => (s.seed, s.n, "scenario"),
        PipelineInput::Table(t) => (config.bootstrap.seed, t.n_rows(), "csv"),
    };
    let mut report = PipelineReport {
        schema_version: SCHEMA_VERSION.into(),
        metadata: RunMetadata {
            seed,
            n,
            bootstrap_resamples: config.bootstrap.resamples,
            source: source.into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        stages_completed: Vec::new(),
        scenario: None,
        quality: None,
        eda: None,
        vif: None,
        models: None,
        mediation: None,
        moderation: None,
        heatmap: None,
        headline: None,
        failure: None,
        data: None,
    };
    match run_stages(input, config, &mut report) {
        Ok(()) => Ok(report),
        Err((stage, source)) => {
            report.failure = Some(StageFailure {
                stage,
                message: source.to_string(),
            });
            Err(PipelineError {
                stage,
                source,
                partial: Box::new(report),
            })
        }
    }
}

fn run_stages(
    input: PipelineInput,
    config: &AnalysisConfig,
    report: &mut PipelineReport,
) -> std::result::Result<(), (Stage, Error)> {
    let at = |stage: Stage| move |e: Error| (stage, e);

    let (raw, spec) = match input {
        PipelineInput::Scenario(spec) => {
            report.scenario = Some(spec.clone());
            report.stages_completed.push(Stage::Scenario);
            let violations = validate_scenario(&spec);
            if !violations.is_empty() {
                return Err((Stage::VariableSystem, Error::InvalidScenario(violations)));
            }
            report.stages_completed.push(Stage::VariableSystem);
            (generate(&spec).map_err(at(Stage::SyntheticData))?, Some(spec))
        }
        PipelineInput::Table(t) => (t, None),
    };
    report.data = Some(raw.clone());
    let table = raw.one_hot_all().map_err(at(Stage::SyntheticData))?;
    if let Some(spec) = &spec {
        report.quality = Some(quality_gate(&table, spec).map_err(at(Stage::SyntheticData))?);
    }
    report.stages_completed.push(Stage::SyntheticData);

    report.eda = Some(eda(&table).map_err(at(Stage::Eda))?);
    report.stages_completed.push(Stage::Eda);

    let responses = config.responses();
    let screened: Vec<String> = match &config.vif_columns {
        Some(cols) => cols.clone(),
        None => table
            .columns()
            .iter()
            .filter(|c| c.is_numeric() && !responses.contains(&c.name.as_str()))
            .map(|c| c.name.clone())
            .collect(),
    };
    let (retained, vif_table) =
        vif_prune(&table, &screened, config.vif_threshold).map_err(at(Stage::VifScreening))?;
    report.vif = Some(VifSection {
        threshold: config.vif_threshold,
        screened,
        retained: retained.clone(),
        table: vif_table,
    });
    report.stages_completed.push(Stage::VifScreening);

    report.models = Some(fit_models(&table, config, &retained).map_err(at(Stage::Modeling))?);
    report.stages_completed.push(Stage::Modeling);

    let med = &config.mediation;
    for c in [&med.x, &med.m, &med.y].into_iter().chain(&med.controls) {
        if table.column(c).is_none() {
            return Err((
                Stage::PathEffects,
                Error::MissingModelColumn {
                    model: "mediation model".into(),
                    column: c.clone(),
                },
            ));
        }
    }
    report.mediation =
        Some(mediation(&table, med, &config.bootstrap).map_err(at(Stage::PathEffects))?);
    report.moderation = Some(
        config
            .moderation
            .iter()
            .map(|m| moderation(&table, m))
            .collect::<Result<Vec<_>>>()
            .map_err(at(Stage::PathEffects))?,
    );
    report.stages_completed.push(Stage::PathEffects);

    report.heatmap = Some(heatmap(&table, &config.heatmap).map_err(at(Stage::StrategyEvaluation))?);
    report.stages_completed.push(Stage::StrategyEvaluation);
    report.headline = Some(Headline::from_report(report));
    Ok(())
}

fn eda(table: &DataTable) -> Result<Eda> {
    let numeric: Vec<&Column> = table.columns().iter().filter(|c| c.is_numeric()).collect();
    let summaries = numeric
        .iter()
        .map(|c| {
            Ok(ColumnSummary {
                column: c.name.clone(),
                stats: SummaryStats::of(&c.values)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let correlation = numeric
        .iter()
        .map(|a| {
            numeric
                .iter()
                .map(|b| stats::pearson_corr(&a.values, &b.values).ok())
                .collect()
        })
        .collect();
    Ok(Eda {
        summaries,
        columns: numeric.iter().map(|c| c.name.clone()).collect(),
        correlation,
    })
}

fn fit_named(table: &DataTable, spec: &ModelSpec) -> Result<NamedFit> {
    spec.check_columns(table)?;
    let fit = Fitted::fit(table, &spec.response, &spec.predictors, spec.kind)?;
    let roc = match &fit {
        Fitted::Logit(f) => Some(roc_auc(&f.fitted, table.values(&spec.response)?)?),
        Fitted::Ols(_) => None,
    };
    Ok(NamedFit {
        name: spec.name.clone(),
        fit,
        roc,
    })
}

fn fit_models(table: &DataTable, config: &AnalysisConfig, retained: &[String]) -> Result<ModelsSection> {
    for m in &config.models {
        m.check_columns(table)?;
    }
    let fits = config
        .models
        .iter()
        .map(|m| fit_named(table, m))
        .collect::<Result<Vec<_>>>()?;
    let stepwise = config
        .stepwise
        .iter()
        .map(|response| {
            let candidates: Vec<String> = retained.iter().filter(|c| *c != response).cloned().collect();
            stepwise(table, response, &candidates, Direction::Both, Criterion::Aic)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelsSection { fits, stepwise })
}

/// Standardized coefficients: predictors are z-scored, and so is the response
/// of continuous models. Binary responses stay 0/1, so their cells are
/// log-odds per predictor sd.
pub fn heatmap(table: &DataTable, specs: &[ModelSpec]) -> Result<Heatmap> {
    let mut fits = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.check_columns(table)?;
        let mut cols = Vec::new();
        for p in &spec.predictors {
            cols.push(Column::continuous(p.clone(), stats::standardize(table.values(p)?)?));
        }
        let y = table.values(&spec.response)?;
        cols.push(match spec.kind {
            OutcomeKind::Continuous => Column::continuous(spec.response.clone(), stats::standardize(y)?),
            OutcomeKind::Binary => Column::binary(spec.response.clone(), y.to_vec()),
        });
        fits.push(fit_named(&DataTable::new(cols)?, spec)?);
    }
    let mut terms: Vec<String> = table
        .names()
        .filter(|n| specs.iter().any(|s| s.predictors.iter().any(|p| p == n)))
        .map(str::to_string)
        .collect();
    terms.dedup();
    let cells = terms
        .iter()
        .map(|t| {
            fits.iter()
                .map(|f| f.fit.estimate(t).map(|e| e.coef))
                .collect()
        })
        .collect();
    Ok(Heatmap {
        outcomes: specs.iter().map(|s| s.name.clone()).collect(),
        terms,
        cells,
        fits,
        note: "continuous outcomes: fully standardized betas; binary outcomes: logit coefficients on standardized predictors".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

/// Writes `report.json`, `data.csv`, `heatmap.csv` and `trace.txt` into
/// `out_dir` and returns their digests.
pub fn emit_outputs(report: &PipelineReport, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let data = match &report.data {
        Some(t) => t.to_csv_string()?,
        None => String::new(),
    };
    let outputs = [
        ("report.json", report.to_json() + "\n"),
        ("data.csv", data),
        ("heatmap.csv", heatmap_csv(report.heatmap.as_ref())?),
        ("trace.txt", trace_text(report)),
    ];
    let mut files = Vec::with_capacity(outputs.len());
    for (name, content) in outputs {
        let path = out_dir.join(name);
        std::fs::write(&path, &content).map_err(|e| Error::io(&path, e))?;
        files.push(ManifestEntry {
            path,
            bytes: content.len(),
            sha256: hex::encode(Sha256::digest(content.as_bytes())),
        });
    }
    Ok(Manifest { files })
}

/// Rows are predictors, columns outcomes; blank where a term is absent.
pub fn heatmap_csv(heatmap: Option<&Heatmap>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(h) = heatmap {
        w.write_record(std::iter::once("term").chain(h.outcomes.iter().map(String::as_str)))?;
        for (term, row) in h.terms.iter().zip(&h.cells) {
            let mut rec = vec![term.clone()];
            rec.extend(row.iter().map(|c| c.map_or(String::new(), |v| format!("{v}"))));
            w.write_record(&rec)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<heatmap>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

pub fn trace_text(report: &PipelineReport) -> String {
    let mut out = String::new();
    if let Some(v) = &report.vif {
        let _ = writeln!(out, "# VIF screening (threshold {})", v.threshold);
        let _ = writeln!(out, "screened: {}", v.screened.join(", "));
        for r in &v.table.trace {
            let _ = writeln!(out, "remove {} (VIF {:.4})", r.column, r.vif);
        }
        let _ = writeln!(out, "retained: {}", v.retained.join(", "));
        for (c, val) in v.table.columns.iter().zip(&v.table.values) {
            let _ = writeln!(out, "  {c}: {val:.4}");
        }
    }
    if let Some(m) = &report.models {
        for s in &m.stepwise {
            let _ = writeln!(
                out,
                "\n# stepwise {} ({:?}, {:?})",
                s.fit.response, s.direction, s.criterion
            );
            for step in &s.trace {
                let _ = writeln!(
                    out,
                    "{:?} {} -> AIC {:.4} [{}]",
                    step.action,
                    step.term.as_deref().unwrap_or("-"),
                    step.aic,
                    step.model.join(" + ")
                );
            }
            let _ = writeln!(out, "selected: {}", s.selected.join(", "));
        }
    }
    if let Some(f) = &report.failure {
        let _ = writeln!(out, "\n# failed at {}: {}", f.stage, f.message);
    }
    out
}

/// Reads a data CSV. Binary columns named `group=level` are read back as
/// one-hot indicators.
pub fn read_data_csv(path: &Path) -> Result<DataTable> {
    let t = DataTable::read_csv_file(path)?;
    let cols = t
        .columns()
        .iter()
        .map(|c| match (&c.kind, c.name.split_once('=')) {
            (ColumnKind::Binary, Some((g, l))) => Column {
                name: c.name.clone(),
                kind: ColumnKind::Indicator {
                    group: g.into(),
                    level: l.into(),
                },
                values: c.values.clone(),
            },
            _ => c.clone(),
        })
        .collect();
    DataTable::new(cols)
}

/// Signs of the ten reference standardized coefficients, as (term, outcome,
/// sign).
pub const REFERENCE_SIGNS: [(&str, &str, f64); 10] = [
    ("X3", "Y1", 1.0),
    ("M1", "Y1", 1.0),
    ("MOD1", "Y1", 1.0),
    ("X6", "Y1", -1.0),
    ("M2", "Y2", -1.0),
    ("X2", "Y2", -1.0),
    ("X6", "Y2", 1.0),
    ("M2", "Y3", 1.0),
    ("X5", "Y3", 1.0),
    ("X6", "Y3", -1.0),
];

/// The headline statistics of a run of the default analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub y2_r2: Option<f64>,
    pub y3_r2: Option<f64>,
    pub y1_auc: Option<f64>,
    pub y1_p_x3: Option<f64>,
    pub y1_p_m1: Option<f64>,
    pub y1_p_x6: Option<f64>,
    pub mediation: Option<crate::patheffects::MediationClass>,
    pub indirect: Option<f64>,
    pub indirect_ci: Option<(f64, f64)>,
    pub interaction_p: Option<f64>,
    pub slope_low: Option<f64>,
    pub slope_high: Option<f64>,
    pub heatmap_sign_matches: usize,
    pub quality_passed: Option<bool>,
}

impl Headline {
    pub fn from_report(report: &PipelineReport) -> Self {
        let r2 = |name: &str| match report.fit(name).map(|f| &f.fit) {
            Some(Fitted::Ols(f)) => Some(f.r2),
            _ => None,
        };
        let y1 = report.fit("Y1 model");
        let y1_p = |t: &str| y1.and_then(|f| f.fit.estimate(t)).map(|e| e.p_value);
        let m = report.mediation.as_ref();
        let moderation = report.moderation.as_ref().and_then(|v| v.first());
        let heatmap_sign_matches = report.heatmap.as_ref().map_or(0, |h| {
            REFERENCE_SIGNS
                .iter()
                .filter(|(t, o, s)| h.cell(t, o).is_some_and(|v| v.signum() == *s && v != 0.0))
                .count()
        });
        Self {
            y2_r2: r2("Y2 model"),
            y3_r2: r2("Y3 model"),
            y1_auc: y1.and_then(NamedFit::auc),
            y1_p_x3: y1_p("X3"),
            y1_p_m1: y1_p("M1"),
            y1_p_x6: y1_p("X6"),
            mediation: m.map(|m| m.classification),
            indirect: m.map(|m| m.indirect),
            indirect_ci: m.and_then(|m| m.bootstrap.as_ref()).map(|b| (b.lower, b.upper)),
            interaction_p: moderation.map(|m| m.interaction.p_value),
            slope_low: moderation.and_then(|m| m.subgroup("low")).map(|s| s.slope),
            slope_high: moderation.and_then(|m| m.subgroup("high")).map(|s| s.slope),
            heatmap_sign_matches,
            quality_passed: report.quality.as_ref().map(|q| q.passed),
        }
    }

    /// Two-column `statistic,value` CSV.
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
        let rows = [
            ("y2_r2", f(self.y2_r2)),
            ("y3_r2", f(self.y3_r2)),
            ("y1_auc", f(self.y1_auc)),
            ("y1_p_x3", f(self.y1_p_x3)),
            ("y1_p_m1", f(self.y1_p_m1)),
            ("y1_p_x6", f(self.y1_p_x6)),
            (
                "mediation",
                self.mediation.map_or(String::new(), |c| format!("{c:?}").to_lowercase()),
            ),
            ("indirect", f(self.indirect)),
            ("indirect_ci_lower", f(self.indirect_ci.map(|c| c.0))),
            ("indirect_ci_upper", f(self.indirect_ci.map(|c| c.1))),
            ("interaction_p", f(self.interaction_p)),
            ("slope_low", f(self.slope_low)),
            ("slope_high", f(self.slope_high)),
            ("heatmap_sign_matches", self.heatmap_sign_matches.to_string()),
            (
                "quality_passed",
                self.quality_passed.map_or(String::new(), |b| b.to_string()),
            ),
        ];
        let mut out = String::from("statistic,value\n");
        for (k, v) in rows {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}
