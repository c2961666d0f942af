use magloc_core::*;

fn grid_mae(sigma: f64, seed: u64) -> f64 {
    let rig = RigConfig::default();
    let spec = FilterSpec::for_rig(&rig).unwrap();
    let noise = NoiseModel {
        gaussian_sigma: sigma,
        rng_seed: seed,
        ..NoiseModel::default()
    };
    run_grid_eval(
        &rig,
        &spec,
        &SourceSetup::default(),
        &GridSpec::default_for(&rig),
        &noise,
        &EvalOptions::default(),
        seed,
    )
    .unwrap()
    .mae_mean
}

#[test]
fn mae_non_decreasing_in_sigma() {
    let maes: Vec<f64> = [0.1, 0.5, 2.0].iter().map(|&s| grid_mae(s, 11)).collect();
    assert!(maes.windows(2).all(|w| w[0] <= w[1]), "{maes:?}");
}

#[test]
fn surface_presets_share_physics() {
    let models: Vec<NoiseModel> = Preset::SURFACES.iter().map(|p| p.noise_model(4)).collect();
    assert!(models.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(
        models[0],
        NoiseModel {
            rng_seed: 4,
            ..NoiseModel::default()
        }
    );
}

#[test]
fn report_is_pure_function_of_config_and_seed() {
    assert_eq!(grid_mae(0.1, 3).to_bits(), grid_mae(0.1, 3).to_bits());
    assert_ne!(grid_mae(0.1, 3).to_bits(), grid_mae(0.1, 4).to_bits());
}

#[test]
fn random_orientation_leaves_noiseless_grid_exact() {
    let rig = RigConfig::default();
    let spec = FilterSpec::for_rig(&rig).unwrap();
    let setup = SourceSetup {
        random_orientation: true,
        phase20: 1.1,
        phase30: 4.0,
        ..SourceSetup::default()
    };
    let r = run_grid_eval(
        &rig,
        &spec,
        &setup,
        &GridSpec::default_for(&rig),
        &Preset::Noiseless.noise_model(8),
        &EvalOptions::default(),
        8,
    )
    .unwrap();
    assert!(r.mae_mean < 1e-6, "{}", r.mae_mean);
}
