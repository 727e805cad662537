//! Seeded replicate studies. Each uses a fixed seed range, so the outcome is
//! deterministic; the bounds are sized for the nominal error rates.

use policysim::linmodel::{stepwise, Criterion, Direction};
use policysim::patheffects::{
    bootstrap_indirect, moderation, BootstrapConfig, MediationModel, ModerationModel, OutcomeKind,
};
use policysim::{DataTable, RngStream};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn normals(rng: &mut RngStream, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.standard_normal()).collect()
}

/// y = 0.8·x1 + noise, with three unrelated candidates.
fn one_true_predictor(seed: u64, n: usize, noise_sd: f64) -> DataTable {
    let mut rng = RngStream::new(seed, 0);
    let x: Vec<Vec<f64>> = (0..4).map(|_| normals(&mut rng, n)).collect();
    let y: Vec<f64> = (0..n).map(|i| 0.8 * x[0][i] + noise_sd * rng.standard_normal()).collect();
    DataTable::from_columns([
        ("x1", x[0].clone()),
        ("x2", x[1].clone()),
        ("x3", x[2].clone()),
        ("x4", x[3].clone()),
        ("y", y),
    ])
    .unwrap()
}

#[test]
fn stepwise_finds_the_true_predictor() {
    let cands = names(&["x1", "x2", "x3", "x4"]);
    let t = one_true_predictor(2024, 150, 1.0);
    for dir in [Direction::Forward, Direction::Backward, Direction::Both] {
        for crit in [Criterion::Aic, Criterion::PValue] {
            let r = stepwise(&t, "y", &cands, dir, crit).unwrap();
            assert!(r.selected.contains(&"x1".to_string()), "{dir:?} {crit:?}: {:?}", r.selected);
        }
    }
    let hits = (0..100)
        .filter(|&s| {
            let t = one_true_predictor(s, 150, 1.0);
            let r = stepwise(&t, "y", &cands, Direction::Both, Criterion::PValue).unwrap();
            r.selected.contains(&"x1".to_string())
        })
        .count();
    assert_eq!(hits, 100);
}

#[test]
fn stepwise_keeps_all_noiseless_parents() {
    let mut rng = RngStream::new(5, 0);
    let n = 60;
    let (a, b, c) = (normals(&mut rng, n), normals(&mut rng, n), normals(&mut rng, n));
    let y: Vec<f64> = (0..n).map(|i| 0.5 * a[i] - 0.3 * b[i] + 0.2 * c[i]).collect();
    let t = DataTable::from_columns([("a", a), ("b", b), ("c", c), ("y", y)]).unwrap();
    for dir in [Direction::Forward, Direction::Backward, Direction::Both] {
        let r = stepwise(&t, "y", &names(&["a", "b", "c"]), dir, Criterion::Aic).unwrap();
        let mut sel = r.selected.clone();
        sel.sort();
        assert_eq!(sel, names(&["a", "b", "c"]), "{dir:?}");
    }
}

#[test]
fn stepwise_null_response_stays_empty() {
    // With one candidate and entry at p < 0.05, a null response enters in 5%
    // of replicates in expectation; 10 or more entries out of 100 has
    // probability about 0.03.
    let empty = (0..100)
        .filter(|&s| {
            let mut rng = RngStream::new(s, 9);
            let t = DataTable::from_columns([("x", normals(&mut rng, 150)), ("y", normals(&mut rng, 150))]).unwrap();
            stepwise(&t, "y", &names(&["x"]), Direction::Forward, Criterion::PValue)
                .unwrap()
                .selected
                .is_empty()
        })
        .count();
    assert!(empty >= 90, "intercept-only in {empty}/100");
}

#[test]
fn null_interaction_size() {
    let model = ModerationModel {
        x: "x".into(),
        moderator: "w".into(),
        y: "y".into(),
        controls: vec![],
        outcome_kind: OutcomeKind::Continuous,
    };
    let false_pos = (0..100u64)
        .filter(|&s| {
            let mut rng = RngStream::new(s, 1);
            let (x, w) = (normals(&mut rng, 150), normals(&mut rng, 150));
            let y: Vec<f64> = (0..150).map(|i| 0.5 * x[i] + 0.3 * w[i] + rng.standard_normal()).collect();
            let t = DataTable::from_columns([("x", x), ("w", w), ("y", y)]).unwrap();
            moderation(&t, &model).unwrap().interaction.p_value <= 0.05
        })
        .count();
    assert!(false_pos <= 10, "false positives {false_pos}/100");
}

fn mediation_table(seed: u64, n: usize, a: f64, b: f64) -> DataTable {
    let mut rng = RngStream::new(seed, 2);
    let x = normals(&mut rng, n);
    let m: Vec<f64> = x.iter().map(|v| a * v + rng.standard_normal()).collect();
    let y: Vec<f64> = (0..n).map(|i| b * m[i] + 0.2 * x[i] + rng.standard_normal()).collect();
    DataTable::from_columns([("x", x), ("m", m), ("y", y)]).unwrap()
}

fn xmy() -> MediationModel {
    MediationModel {
        x: "x".into(),
        m: "m".into(),
        y: "y".into(),
        controls: vec![],
        outcome_kind: OutcomeKind::Continuous,
    }
}

#[test]
fn bootstrap_ci_coverage() {
    let (a, b) = (0.5, 0.5);
    let cfg = |seed| BootstrapConfig {
        resamples: 1000,
        seed,
        ..BootstrapConfig::default()
    };
    let covered = (0..200u64)
        .filter(|&s| {
            let t = mediation_table(s, 150, a, b);
            let ci = bootstrap_indirect(&t, &xmy(), &cfg(s)).unwrap();
            ci.lower <= a * b && a * b <= ci.upper
        })
        .count();
    assert!(covered >= 170, "coverage {covered}/200");
}

#[test]
fn bootstrap_ci_contains_zero_without_first_path() {
    let t = mediation_table(77, 150, 0.0, 0.5);
    let ci = bootstrap_indirect(&t, &xmy(), &BootstrapConfig::default()).unwrap();
    assert!(ci.lower <= 0.0 && 0.0 <= ci.upper, "{ci:?}");
}

#[test]
fn bootstrap_independent_of_thread_count() {
    let t = mediation_table(3, 150, 0.5, 0.5);
    let cfg = BootstrapConfig {
        resamples: 800,
        ..BootstrapConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_indirect(&t, &xmy(), &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, bootstrap_indirect(&t, &xmy(), &cfg).unwrap());
    let other = bootstrap_indirect(&t, &xmy(), &BootstrapConfig { seed: 43, ..cfg.clone() }).unwrap();
    assert_ne!(one.lower, other.lower);
}
