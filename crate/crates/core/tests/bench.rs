use mmc_core::bench::{run_sweep, run_trial, trial_data, ModelStatus, Regime, SweepAxis, TrialSpec};
use mmc_core::family::ModelKind;

fn small(regime: Regime) -> TrialSpec {
    let mut spec = TrialSpec::new(regime, 4, 2, 800, 300);
    spec.seed = 5;
    spec
}

#[test]
fn uniform_data_scores_near_uniform_entropy() {
    let mut spec = TrialSpec::new(Regime::Causal, 5, 2, 5000, 3000);
    spec.causal_strength = 0.0;
    spec.models = ModelKind::ALL.to_vec();
    spec.seed = 3;
    let result = run_trial(&spec).unwrap();
    let want = (1.0f64 / 5.0).ln();
    for m in &result.models {
        let metric = m.metric().unwrap();
        assert!((metric - want).abs() < 0.05, "{}: {metric}", m.kind);
    }
}

#[test]
fn trials_are_reproducible() {
    for regime in [Regime::Mmc, Regime::Hmc, Regime::Causal] {
        let spec = small(regime);
        let a = run_trial(&spec).unwrap();
        let b = run_trial(&spec).unwrap();
        for kind in &spec.models {
            assert_eq!(a.metric(*kind), b.metric(*kind));
        }
        let (_, train, test) = trial_data(&spec).unwrap();
        assert_eq!(train.num_windows(), 800);
        assert_eq!(test.num_windows(), 300);
        assert_ne!(train, test);
    }
}

#[test]
fn intractable_models_are_skipped() {
    let mut spec = TrialSpec::new(Regime::Mmc, 9, 2, 200, 100);
    spec.models = vec![ModelKind::MmcExact, ModelKind::Fmc];
    let result = run_trial(&spec).unwrap();
    assert!(matches!(
        result.get(ModelKind::MmcExact).unwrap().status,
        ModelStatus::Skipped { .. }
    ));
    assert!(result.metric(ModelKind::Fmc).is_some());

    let mut spec = TrialSpec::new(Regime::Mmc, 4, 3, 200, 100);
    spec.models = vec![ModelKind::Hmc];
    spec.fit.hmc_context_cap = 10;
    let rows = run_sweep(&spec, SweepAxis::Data, &[100], 2).unwrap();
    assert_eq!(rows[0].repeats, 0);
    assert!(rows[0].metric_mean.is_nan());
    assert_eq!(rows[0].skipped.len(), 1);
}

#[test]
fn sweep_shape_and_thread_independence() {
    let spec = small(Regime::Mmc);
    let values = [2, 3];
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_sweep(&spec, SweepAxis::Order, &values, 3).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_sweep(&spec, SweepAxis::Order, &values, 3).unwrap());
    assert_eq!(serial.len(), values.len() * spec.models.len());
    for (a, b) in serial.iter().zip(&parallel) {
        assert_eq!((a.axis_value, a.model), (b.axis_value, b.model));
        assert_eq!(a.metric_mean.to_bits(), b.metric_mean.to_bits());
        assert_eq!(a.metric_std.to_bits(), b.metric_std.to_bits());
        assert_eq!(a.repeats, 3);
    }
}

#[test]
fn single_repeat_rows_equal_the_trial() {
    let spec = small(Regime::Hmc);
    let rows = run_sweep(&spec, SweepAxis::Data, &[800], 1).unwrap();
    let mut trial = spec.clone();
    trial.seed = mmc_core::bench::cell_seed(spec.seed, 800, 0);
    let result = run_trial(&trial).unwrap();
    for row in rows {
        assert_eq!(row.metric_std, 0.0);
        assert_eq!(Some(row.metric_mean), result.metric(row.model));
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = small(Regime::Mmc);
    spec.test_windows = 0;
    assert!(run_trial(&spec).is_err());
    assert!(run_sweep(&small(Regime::Mmc), SweepAxis::Data, &[], 1).is_err());
    assert!(run_sweep(&small(Regime::Mmc), SweepAxis::Data, &[10], 0).is_err());
}
