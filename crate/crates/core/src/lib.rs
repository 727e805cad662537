//! Structural-path simulation and regression pipeline for firm policy-response
//! scenarios.
//!
//! A [`ScenarioSpec`] declares the variable system and weighted causal paths.
//! [`synth::generate`] turns it into a [`DataTable`], and the estimation modules
//! ([`linmodel`], [`patheffects`]) fit the direct, mediated and moderated paths.
//! [`pipeline::run_pipeline`] chains every stage and produces a
//! [`pipeline::PipelineReport`].

pub mod data;
pub mod error;
pub mod linmodel;
pub mod patheffects;
pub mod pipeline;
pub mod scenario;
pub mod stats;
pub mod synth;

pub use data::{Column, ColumnKind, DataTable};
pub use error::{Error, Result};
pub use linmodel::{
    logit_fit, ols_fit, roc_auc, stepwise, vif, vif_prune, LogitFit, OlsFit, RocCurve, VifTable,
};
pub use patheffects::{baron_kenny, bootstrap_indirect, moderation, MediationReport, ModerationReport};
pub use pipeline::{emit_outputs, run_pipeline, PipelineReport};
pub use scenario::{default_scenario, load_scenario, validate_scenario, ScenarioSpec};
pub use stats::RngStream;
