use policysim::patheffects::{moderation, ModerationModel, OutcomeKind};
use policysim::pipeline::{heatmap, AnalysisConfig};
use policysim::scenario::default_scenario;
use policysim::synth::generate;
use policysim::{logit_fit, ols_fit, vif, vif_prune, DataTable, RngStream};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn default_table() -> DataTable {
    generate(&default_scenario()).unwrap().one_hot_all().unwrap()
}

/// Three centered, mutually orthogonal columns of equal norm, tiled `reps`
/// times.
fn orthogonal_basis(reps: usize) -> [Vec<f64>; 3] {
    let u1 = [1., 1., -1., -1.];
    let u2 = [1., -1., 1., -1.];
    let u3 = [1., -1., -1., 1.];
    let tile = |u: [f64; 4]| u.iter().cycle().take(4 * reps).copied().collect::<Vec<_>>();
    [tile(u1), tile(u2), tile(u3)]
}

#[test]
fn vif_orthogonal_is_one_and_untouched() {
    let [u1, u2, u3] = orthogonal_basis(3);
    let t = DataTable::from_columns([("a", u1), ("b", u2), ("c", u3)]).unwrap();
    let cols = names(&["a", "b", "c"]);
    let v = vif(&t, &cols).unwrap();
    for x in &v.values {
        assert!((x - 1.0).abs() < 1e-12);
    }
    let (kept, table) = vif_prune(&t, &cols, 5.0).unwrap();
    assert_eq!(kept, cols);
    assert!(table.trace.is_empty());
}

#[test]
fn vif_equicorrelated_triple() {
    // Cholesky factor of the 3×3 correlation matrix with off-diagonals ½.
    let [u1, u2, u3] = orthogonal_basis(2);
    let (l21, l22) = (0.5, 0.75f64.sqrt());
    let l32 = 0.25 / l22;
    let l33 = (1.0 - 0.25 - l32 * l32).sqrt();
    let a = u1.clone();
    let b: Vec<f64> = (0..8).map(|i| l21 * u1[i] + l22 * u2[i]).collect();
    let c: Vec<f64> = (0..8).map(|i| 0.5 * u1[i] + l32 * u2[i] + l33 * u3[i]).collect();
    let t = DataTable::from_columns([("a", a), ("b", b), ("c", c)]).unwrap();
    for (x, y) in [("a", "b"), ("a", "c"), ("b", "c")] {
        let r = policysim::stats::pearson_corr(t.values(x).unwrap(), t.values(y).unwrap()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }
    let v = vif(&t, &names(&["a", "b", "c"])).unwrap();
    for x in &v.values {
        assert!((x - 1.5).abs() < 1e-9, "{x}");
    }
}

#[test]
fn vif_exact_sum_is_infinite() {
    let [u1, u2, _] = orthogonal_basis(2);
    let s: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
    let t = DataTable::from_columns([("a", u1), ("b", u2), ("c", s)]).unwrap();
    let v = vif(&t, &names(&["a", "b", "c"])).unwrap();
    assert!(v.values.iter().all(|x| x.is_infinite()));
}

#[test]
fn vif_removes_one_of_near_duplicate_pair() {
    let mut t = default_table();
    let mut rng = RngStream::new(11, 0);
    let dup: Vec<f64> = t.values("X3").unwrap().iter().map(|x| x + 1e-3 * rng.standard_normal()).collect();
    t.push(policysim::Column::continuous("X3b", dup)).unwrap();
    let cols = names(&["X1", "X2", "X3", "X4", "X5", "X6", "MOD1", "X3b"]);
    let (kept, table) = vif_prune(&t, &cols, 5.0).unwrap();
    assert_eq!(table.trace.len(), 1);
    assert!(["X3", "X3b"].contains(&table.trace[0].column.as_str()));
    assert_eq!(kept.len(), cols.len() - 1);
    assert!(table.values.iter().all(|&v| v <= 5.0));
}

#[test]
fn default_design_keeps_at_least_ten_columns() {
    let t = default_table();
    let responses = AnalysisConfig::default();
    let responses: Vec<&str> = responses.models.iter().map(|m| m.response.as_str()).collect();
    let cols: Vec<String> = t
        .columns()
        .iter()
        .filter(|c| c.is_numeric() && !responses.contains(&c.name.as_str()))
        .map(|c| c.name.clone())
        .collect();
    assert_eq!(cols.len(), 12);
    let (kept, _) = vif_prune(&t, &cols, 5.0).unwrap();
    assert!(kept.len() >= 10, "{kept:?}");
}

#[test]
fn residuals_orthogonal_to_design() {
    let t = default_table();
    for (y, xs) in [("Y2", vec!["X2", "M2", "X6"]), ("Y3", vec!["M2", "X5", "X6", "MOD2=machinery"])] {
        let fit = ols_fit(&t, y, &names(&xs), true).unwrap();
        let e = &fit.residuals;
        assert!(e.iter().sum::<f64>().abs() < 1e-10);
        for x in &xs {
            let dot: f64 = t.values(x).unwrap().iter().zip(e).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-10, "{y}: {x} · e = {dot}");
        }
    }
}

#[test]
fn irls_likelihood_never_decreases() {
    let t = default_table();
    let fit = logit_fit(&t, "Y1", &names(&["X3", "M1", "X6", "MOD1"])).unwrap();
    assert!(fit.converged);
    for w in fit.ll_trace.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "{:?}", fit.ll_trace);
    }
}

fn shifted(t: &DataTable, col: &str, scale: f64, shift: f64) -> DataTable {
    let mut t = t.clone();
    let v: Vec<f64> = t.values(col).unwrap().iter().map(|x| scale * x + shift).collect();
    t.set_values(col, v).unwrap();
    t
}

#[test]
fn interaction_coefficient_is_centering_invariant() {
    let t = default_table();
    for kind in [OutcomeKind::Continuous, OutcomeKind::Binary] {
        let model = ModerationModel {
            x: "X3".into(),
            moderator: "MOD1".into(),
            y: if kind == OutcomeKind::Binary { "Y1" } else { "M1" }.into(),
            controls: vec!["X6".into()],
            outcome_kind: kind,
        };
        let base = moderation(&t, &model).unwrap().interaction.coef;
        for (col, shift) in [("X3", 3.5), ("MOD1", -12.0)] {
            let moved = moderation(&shifted(&t, col, 1.0, shift), &model).unwrap().interaction.coef;
            assert!((moved - base).abs() < 1e-8, "{col}: {base} vs {moved}");
        }
    }
}

#[test]
fn standardized_betas_ignore_predictor_units() {
    let t = default_table();
    let specs = AnalysisConfig::default().heatmap;
    let base = heatmap(&t, &specs).unwrap();
    let moved = heatmap(&shifted(&shifted(&t, "X6", 250.0, -40.0), "M2", 0.01, 7.0), &specs).unwrap();
    for (r0, r1) in base.cells.iter().zip(&moved.cells) {
        for (a, b) in r0.iter().zip(r1) {
            match (a, b) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-8, "{a} vs {b}"),
                (None, None) => {}
                _ => panic!("blank pattern changed"),
            }
        }
    }
}

#[test]
fn heatmap_blank_iff_term_absent() {
    let t = default_table();
    let specs = AnalysisConfig::default().heatmap;
    let h = heatmap(&t, &specs).unwrap();
    for spec in &specs {
        for term in &h.terms {
            let in_model = spec.predictors.contains(term);
            assert_eq!(h.cell(term, &spec.response).is_some(), in_model, "{term} / {}", spec.response);
        }
    }
}
