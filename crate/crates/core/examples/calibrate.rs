//! Grid search used to freeze the default scenario's free constants: the noise
//! standard deviations, the mediator weights, the Y1 direct weights and the
//! X3 × MOD1 interaction weight. Each candidate is scored by how often the headline
//! checks hold over seeds 0..SEEDS, and must hold at seed 42.
//!
//!     cargo run --release --example calibrate

use policysim::patheffects::{
    baron_kenny, moderation, MediationClass, MediationModel, ModerationModel, OutcomeKind,
};
use policysim::pipeline::{heatmap, AnalysisConfig};
use policysim::scenario::{default_scenario, ScenarioSpec};
use policysim::synth::{generate, quality_gate};
use policysim::{logit_fit, ols_fit, roc_auc};
use rayon::prelude::*;

const SEEDS: u64 = 60;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn with(spec: &ScenarioSpec, seed: u64, weights: &[(&str, &str, f64)], noise: &[(&str, f64)], int_w: f64) -> ScenarioSpec {
    let mut s = spec.clone();
    s.seed = seed;
    for &(a, b, w) in weights {
        s.paths.iter_mut().find(|p| p.source == a && p.target == b).unwrap().weight = w;
    }
    for &(t, sd) in noise {
        s.noise.iter_mut().find(|n| n.target == t).unwrap().sd = sd;
    }
    s.interactions[0].weight = int_w;
    s
}

/// Checks that only involve X3, M1, MOD1, X6 and Y1. X3's own significance
/// in the Y1 logit is left out: it is exactly the direct path c′ that full
/// mediation needs to be insignificant, so the two cannot both hold.
fn y1_checks(s: &ScenarioSpec) -> Option<bool> {
    let t = generate(s).ok()?.one_hot_all().ok()?;
    let f = logit_fit(&t, "Y1", &names(&["X3", "M1", "X6"])).ok()?;
    let auc = roc_auc(&f.fitted, t.values("Y1").ok()?).ok()?.auc;
    let sig = ["M1", "X6"].iter().all(|v| f.p_value(v).unwrap() < 0.05);
    let med = baron_kenny(
        &t,
        &MediationModel {
            x: "X3".into(),
            m: "M1".into(),
            y: "Y1".into(),
            controls: names(&["X6"]),
            outcome_kind: OutcomeKind::Binary,
        },
    )
    .ok()?;
    let ind_ok = (0.12..=0.47).contains(&med.indirect) && med.classification == MediationClass::Full;
    let m = moderation(
        &t,
        &ModerationModel {
            x: "X3".into(),
            moderator: "MOD1".into(),
            y: "Y1".into(),
            controls: names(&["M1", "X6"]),
            outcome_kind: OutcomeKind::Binary,
        },
    )
    .ok()?;
    let mod_ok = m.interaction.p_value < 0.05
        && m.subgroup("high")?.slope > m.subgroup("low")?.slope;
    let h = heatmap(&t, &AnalysisConfig::default().heatmap[..1]).ok()?;
    let signs = h.cell("X3", "Y1")? > 0.0
        && h.cell("M1", "Y1")? > 0.0
        && h.cell("MOD1", "Y1")? > 0.0
        && h.cell("X6", "Y1")? < 0.0;
    let q = quality_gate(&t, s).ok()?;
    let q_ok = q
        .checks
        .iter()
        .filter(|c| c.subject.contains("Y1") || c.subject.contains("M1"))
        .all(|c| c.passed);
    Some((0.63..=0.79).contains(&auc) && sig && ind_ok && mod_ok && signs && q_ok)
}

fn y23_checks(s: &ScenarioSpec) -> Option<bool> {
    let t = generate(s).ok()?.one_hot_all().ok()?;
    let y2 = ols_fit(&t, "Y2", &names(&["X2", "M2", "X6"]), true).ok()?.r2;
    let y3 = ols_fit(&t, "Y3", &names(&["M2", "X5"]), true).ok()?.r2;
    let h = heatmap(&t, &AnalysisConfig::default().heatmap[1..]).ok()?;
    let signs = h.cell("M2", "Y2")? < 0.0
        && h.cell("X2", "Y2")? < 0.0
        && h.cell("X6", "Y2")? > 0.0
        && h.cell("M2", "Y3")? > 0.0
        && h.cell("X5", "Y3")? > 0.0
        && h.cell("X6", "Y3")? < 0.0;
    let q = quality_gate(&t, s).ok()?;
    let q_ok = q
        .checks
        .iter()
        .filter(|c| ["M2", "Y2", "Y3"].iter().any(|v| c.subject.contains(v)))
        .all(|c| c.passed);
    Some((0.46..=0.62).contains(&y2) && (0.34..=0.50).contains(&y3) && signs && q_ok)
}

fn score(f: impl Fn(u64) -> Option<bool> + Sync) -> (f64, bool) {
    let hits = (0..SEEDS).into_par_iter().filter(|&s| f(s) == Some(true)).count();
    (hits as f64 / SEEDS as f64, f(42) == Some(true))
}

fn main() {
    let base = default_scenario();
    let grid = |lo: f64, hi: f64, step: f64| {
        let k = ((hi - lo) / step).round() as usize;
        (0..=k).map(move |i| lo + step * i as f64)
    };

    let mut y1 = Vec::new();
    for a in [0.45f64, 0.5, 0.55, 0.6] {
        // M1 keeps unit variance
        let m1 = (1.0 - a * a).sqrt();
        for wm in [0.45, 0.6, 0.75, 0.9] {
            for w6 in [-0.45, -0.6, -0.75] {
                for wmod in [0.21, 0.4] {
                    for iw in [0.5, 0.7] {
                        for e1 in [0.0, 0.3, 0.6, 0.9] {
                            let w = [("X3", "M1", a), ("M1", "Y1", wm), ("X6", "Y1", w6), ("MOD1", "Y1", wmod)];
                            let (rate, at42) =
                                score(|seed| y1_checks(&with(&base, seed, &w, &[("M1", m1), ("Y1", e1)], iw)));
                            y1.push((rate, at42, [a, wm, w6, wmod, iw, e1]));
                        }
                    }
                }
            }
        }
    }
    y1.sort_by(|x, y| y.0.total_cmp(&x.0));
    println!("Y1 group (rate, pass@42, X3->M1, M1->Y1, X6->Y1, MOD1->Y1, X3xMOD1, Y1 sd):");
    for r in y1.iter().filter(|r| r.1).take(15).chain(y1.iter().take(10)) {
        println!("  {:.3} {} {:?}", r.0, r.1, r.2);
    }
    if std::env::args().any(|a| a == "--y1-only") {
        return;
    }

    let mut y23 = Vec::new();
    for a in grid(0.4, 1.2, 0.2) {
        for m2 in grid(0.4, 1.2, 0.2) {
            for e2 in grid(0.3, 1.0, 0.05) {
                for e3 in grid(0.3, 1.0, 0.05) {
                    let (rate, at42) = score(|seed| {
                        y23_checks(&with(
                            &base,
                            seed,
                            &[("X5", "M2", a)],
                            &[("M2", m2), ("Y2", e2), ("Y3", e3)],
                            base.interactions[0].weight,
                        ))
                    });
                    y23.push((rate, at42, a, m2, e2, e3));
                }
            }
        }
    }
    y23.sort_by(|x, y| y.0.total_cmp(&x.0));
    println!("Y2/Y3 group (rate, pass@42, X5->M2, M2 sd, Y2 sd, Y3 sd):");
    for r in y23.iter().take(12) {
        println!("  {:.3} {} {:.2} {:.2} {:.2} {:.2}", r.0, r.1, r.2, r.3, r.4, r.5);
    }
}
