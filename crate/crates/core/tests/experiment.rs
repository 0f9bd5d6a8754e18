use heatback::experiment::{
    run_experiment, sweep, DataSynthesis, Experiment, ProfileKind, TruthProfile,
};
use heatback::grid::{l2_norm, ProblemConfig};

fn standard() -> ProblemConfig {
    ProblemConfig::new(0.5, 1.0, 800, 1.0)
        .unwrap()
        .with_modes(200)
        .unwrap()
}

fn profile(kind: ProfileKind) -> TruthProfile {
    TruthProfile::new(kind, 1.0).unwrap()
}

#[test]
fn single_sweep_entry_equals_single_run() {
    let cfg = ProblemConfig::new(0.5, 1.0, 200, 1.0).unwrap();
    let p = profile(ProfileKind::SineBump);
    let exp = Experiment::prepare(&cfg, &p, DataSynthesis::default()).unwrap();
    let delta = 1e-3 * l2_norm(exp.clean_data());
    let one = run_experiment(&cfg, &p, delta, 17).unwrap();
    let swept = sweep(&cfg, &p, &[delta], &[17]).unwrap();
    assert_eq!(swept.len(), 1);
    let mut a = one.clone();
    let mut b = swept[0].clone();
    a.wall_time = Default::default();
    b.wall_time = Default::default();
    assert_eq!(a, b);
}

#[test]
fn sweep_size_is_product() {
    let cfg = ProblemConfig::new(0.5, 1.0, 60, 1.0).unwrap();
    let p = profile(ProfileKind::DoubleBump);
    let exp = Experiment::prepare(&cfg, &p, DataSynthesis::default()).unwrap();
    let n = l2_norm(exp.clean_data());
    let records = exp.sweep(&[1e-1 * n, 1e-2 * n, 1e-3 * n], &[0, 1]).unwrap();
    assert_eq!(records.len(), 6);
}

#[test]
fn tiny_noise_recovers_truth_closely() {
    let exp = Experiment::prepare(
        &standard(),
        &profile(ProfileKind::PolyBump),
        DataSynthesis::default(),
    )
    .unwrap();
    let delta = 1e-8 * l2_norm(exp.clean_data());
    let r = exp.run(delta, 0).unwrap();
    let rel = r.measured_error / r.truth_norm;
    // measured 2.6e-5 relative
    assert!(rel <= 0.1, "{rel}");
    assert!(r.converged);
}

#[test]
fn error_trend_over_decades_for_every_profile() {
    let cfg = ProblemConfig::new(0.5, 1.0, 400, 1.0)
        .unwrap()
        .with_modes(200)
        .unwrap();
    for kind in ProfileKind::ALL {
        let exp = Experiment::prepare(&cfg, &profile(kind), DataSynthesis::default()).unwrap();
        let n = l2_norm(exp.clean_data());
        let deltas = [1e-1 * n, 1e-2 * n, 1e-3 * n];
        let records = exp.sweep(&deltas, &[0, 1, 2]).unwrap();
        let medians: Vec<f64> = deltas
            .iter()
            .map(|d| {
                let mut e: Vec<f64> = records
                    .iter()
                    .filter(|r| r.delta == *d)
                    .map(|r| r.measured_error)
                    .collect();
                e.sort_by(f64::total_cmp);
                e[1]
            })
            .collect();
        assert!(medians[2] < medians[0], "{kind}: {medians:?}");
        for r in records.iter().filter(|r| r.asymptotic_valid) {
            assert!(r.measured_error <= r.bound2omega);
        }
    }
}

#[test]
fn finite_difference_data_also_inverts() {
    let cfg = ProblemConfig::new(0.5, 1.0, 400, 1.0)
        .unwrap()
        .with_modes(200)
        .unwrap();
    let p = profile(ProfileKind::PolyBump);
    let exp = Experiment::prepare(
        &cfg,
        &p,
        DataSynthesis::FiniteDifference { space_steps: 400 },
    )
    .unwrap();
    let delta = 1e-2 * l2_norm(exp.clean_data());
    let r = exp.run(delta, 1).unwrap();
    assert!(r.converged);
    assert!(r.measured_error < 0.5 * r.truth_norm);
}

#[test]
fn reproducible_apart_from_wall_time() {
    let cfg = ProblemConfig::new(0.3, 2.0, 120, 0.5).unwrap();
    let p = TruthProfile::new(ProfileKind::SineBump, 0.5).unwrap();
    let a = run_experiment(&cfg, &p, 1e-4, 9).unwrap();
    let b = run_experiment(&cfg, &p, 1e-4, 9).unwrap();
    assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
    assert_eq!(a.measured_error.to_bits(), b.measured_error.to_bits());
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    assert!((a.class_radius - 0.25).abs() < 1e-12);
}
