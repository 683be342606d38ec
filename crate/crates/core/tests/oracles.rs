use std::f64::consts::PI;

use num_complex::Complex64;

use tractlab::acoustics::{neutral_reference, transfer_spectrum};
use tractlab::analysis::dct_of_values;
use tractlab::experiments::{calibrated_threshold, functional_check_records, DEFAULT_BIN_WIDTH};
use tractlab::tube_models::{drm_coordination, drm_profile};
use tractlab::{
    eval_coordination, AcousticConstants, Condition, CyclePoint, DrmConfig, DrmParams, ExperimentConfig,
    FrequencyGrid, ModelKind, ModelSetup, SampledAreaFunction,
};

/// Transfer ratio by input-impedance recursion from the lips, tubelet by
/// tubelet: `U_in/U_out = cos(kd) + i (Z_load/Z_c) sin(kd)` for each tubelet,
/// with `Z_load` the input impedance of everything downstream.
fn recursion_transfer(area: &SampledAreaFunction, f: f64, c: &AcousticConstants) -> Complex64 {
    let i = Complex64::i();
    let k0 = 2.0 * PI * f / c.sound_speed_c;
    let lip = area.lip_area();
    let ka = k0 * (lip / PI).sqrt();
    let mut z_load = c.air_density * c.sound_speed_c / lip * Complex64::new(0.25 * ka * ka, 0.613 * ka);
    let d = area.tubelet_length_cm();
    let mut ratio = Complex64::new(1.0, 0.0);
    for &s in area.areas().iter().rev() {
        let k = k0 * Complex64::new(1.0, -c.loss_coefficient / s.sqrt() * (f / 1000.0).sqrt());
        let zc = c.air_density * c.sound_speed_c / s;
        let (cos, sin) = ((k * d).cos(), (k * d).sin());
        ratio *= cos + i * z_load / zc * sin;
        z_load = zc * (z_load * cos + i * zc * sin) / (zc * cos + i * z_load * sin);
    }
    ratio.inv()
}

#[test]
fn fant_neutral_matches_impedance_recursion() {
    let setup = ModelSetup::default();
    let c = setup.default_constants(ModelKind::Fant);
    let area = setup.neutral_area(ModelKind::Fant).unwrap();
    let grid = FrequencyGrid::default();
    let tf = transfer_spectrum(&area, &grid, &c).unwrap();
    for (f, h) in grid.frequencies().into_iter().zip(tf.values()) {
        let oracle = recursion_transfer(&area, f, &c);
        assert!((h - oracle).norm() <= 1e-9 * oracle.norm(), "{f} Hz: {h} vs {oracle}");
    }
}

#[test]
fn fant_neutral_reference_frozen() {
    let setup = ModelSetup::default();
    let f = neutral_reference(
        ModelKind::Fant,
        &setup,
        &setup.default_constants(ModelKind::Fant),
        &FrequencyGrid::default(),
    )
    .unwrap();
    assert!((f.f1 - 145.41).abs() < 0.05, "{f:?}");
    assert!((f.f2 - 639.10).abs() < 0.05, "{f:?}");
}

#[test]
fn drm_perturbation_dct_negates_under_half_turn() {
    let cfg = DrmConfig::default();
    let coord = drm_coordination();
    for step in 0..24 {
        let theta = PI * step as f64 / 12.0;
        for rho in [0.3, 1.0] {
            let profile = |t: f64| {
                let p = eval_coordination(&coord, CyclePoint::new(rho, t).unwrap());
                let values = drm_profile(DrmParams::from_slice(&p).unwrap(), &cfg).unwrap();
                dct_of_values(&values.iter().map(|v| v - 1.0).collect::<Vec<_>>())
            };
            let (a, b) = (profile(theta), profile(theta + PI));
            assert!((a.a1_tilde + b.a1_tilde).abs() < 1e-9);
            assert!((a.a2_tilde + b.a2_tilde).abs() < 1e-9);
        }
    }
}

#[test]
fn drm_ring_half_turns_average_to_offset() {
    let ds = tractlab::run_condition(&ExperimentConfig::new(ModelKind::Drm, Condition::C2, 0, 3)).unwrap();
    let ring: Vec<_> = ds.records.iter().filter(|r| r.condition == "C2-ring").collect();
    assert_eq!(ring.len(), 96);
    for i in 0..48 {
        for (a, b) in ring[i].params.iter().zip(&ring[i + 48].params) {
            assert!((0.5 * (a + b) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn fant_ring_record_at_u() {
    let ds = tractlab::run_condition(&ExperimentConfig::new(ModelKind::Fant, Condition::C2, 0, 3)).unwrap();
    let r = &ds.records[16];
    assert!((r.point.unwrap().theta() - PI / 3.0).abs() < 1e-12);
    for (got, want) in r.params.iter().zip([72.0, -2.5, -0.5, 19.0]) {
        assert!((got - want).abs() < 1e-9, "{:?}", r.params);
    }
}

#[test]
fn functional_check_separates_conditions() {
    for model in [ModelKind::Drm, ModelKind::Fant] {
        let t = calibrated_threshold(model);
        let c2 = tractlab::run_condition(&ExperimentConfig::new(model, Condition::C2, 2000, 5)).unwrap();
        let c1 = tractlab::run_condition(&ExperimentConfig::new(model, Condition::C1, 2000, 5)).unwrap();
        let r2 = functional_check_records(&c2.records, DEFAULT_BIN_WIDTH, t).unwrap();
        let r1 = functional_check_records(&c1.records, DEFAULT_BIN_WIDTH, t).unwrap();
        assert!(r2.functional, "{model} C2 p95 {}", r2.p95_spread);
        assert!(!r1.functional, "{model} C1 p95 {}", r1.p95_spread);
    }
    let generic = tractlab::run_condition(&ExperimentConfig::new(ModelKind::Generic, Condition::C2, 2000, 5)).unwrap();
    let r = functional_check_records(&generic.records, DEFAULT_BIN_WIDTH, calibrated_threshold(ModelKind::Generic))
        .unwrap();
    assert!(r.functional, "generic C2 p95 {}", r.p95_spread);
}
