//! Properties that span several modules: reductions between attachment
//! models, the work-energy balance, spring-count folding and scale freedom.

use proptest::prelude::*;
use spring_linkage::energetics::{integrate_profile, size_spring, spring_profile, sweep_orientation, DEFAULT_POINTS};
use spring_linkage::oracle::{compare_with_oracle, ORACLE_TOLERANCE};
use spring_linkage::{LinkageGeometry, SpringKind, SpringSpec, StrokeConfig, SweepModel};

fn geom() -> LinkageGeometry {
    LinkageGeometry::new(0.15).unwrap()
}

fn translational_family() -> Vec<SpringKind> {
    let mut kinds = vec![SpringKind::Vertical, SpringKind::Horizontal];
    for gamma in [0.25, 0.5, 0.75] {
        kinds.push(SpringKind::ModelB { gamma });
        kinds.push(SpringKind::ModelC { gamma });
    }
    for gamma in [0.0, 0.25, 0.5, 0.8] {
        kinds.push(SpringKind::ModelA { gamma });
    }
    kinds
}

#[test]
fn model_a_at_zero_is_the_vertical_spring() {
    let s = StrokeConfig::from_degrees(179.9, 0.0).unwrap();
    let a = SpringSpec::model_a(0.0, 7.0).unwrap();
    let v = SpringSpec::vertical(7.0).unwrap();
    for theta in s.knee_angles(1000) {
        let (fa, fv) = (a.charging_force(&geom(), &s, theta).unwrap(), v.charging_force(&geom(), &s, theta).unwrap());
        assert!((fa - fv).abs() <= 1e-9 * fv.abs().max(1e-300), "{theta}: {fa} vs {fv}");
    }
}

#[test]
fn midpoint_models_match_their_parallel_counterparts() {
    // K1 K2 at the midpoints spans half the diagonal: a quarter of the stiffness
    let s = StrokeConfig::from_degrees(170.0, 0.0).unwrap();
    let pairs = [
        (SpringSpec::model_b(0.5, 8.0).unwrap(), SpringSpec::horizontal(2.0).unwrap()),
        (SpringSpec::model_c(0.5, 8.0).unwrap(), SpringSpec::vertical(2.0).unwrap()),
    ];
    for (mid, full) in pairs {
        for theta in s.knee_angles(1000).into_iter().skip(1) {
            let (a, b) = (mid.charging_force(&geom(), &s, theta).unwrap(), full.charging_force(&geom(), &s, theta).unwrap());
            assert!((a - b).abs() <= 1e-9 * b.abs(), "{}: {a} vs {b}", mid.kind.label());
        }
        let sized_mid = size_spring(mid.kind, 1, &geom(), &s, 1.0, DEFAULT_POINTS).unwrap();
        let sized_full = size_spring(full.kind, 1, &geom(), &s, 1.0, DEFAULT_POINTS).unwrap();
        let gap = (sized_mid.profile.normalized_energy() - sized_full.profile.normalized_energy()).abs();
        assert!(gap < 1e-9);
    }
}

#[test]
fn closed_forms_agree_with_the_oracle() {
    for (ini, end) in [(164.0, 44.0), (179.9, 0.0), (120.0, 10.0)] {
        let s = StrokeConfig::from_degrees(ini, end).unwrap();
        let mut specs: Vec<SpringSpec> = translational_family()
            .into_iter()
            .map(|k| SpringSpec::new(k, 200.0).unwrap())
            .collect();
        specs.push(SpringSpec::rotational(0.7).unwrap());
        for spec in specs {
            let cmp = compare_with_oracle(&spec, &geom(), &s, 60).unwrap();
            assert!(cmp.passes(ORACLE_TOLERANCE), "{} on {ini}-{end}: {:e}", cmp.label, cmp.max_relative_error());
        }
    }
}

#[test]
fn work_done_equals_stored_energy() {
    for (ini, end) in [(164.0, 44.0), (179.9, 0.0)] {
        let s = StrokeConfig::from_degrees(ini, end).unwrap();
        for kind in translational_family() {
            let spec = SpringSpec::new(kind, 200.0).unwrap();
            let work = spring_profile(&spec, &geom(), &s, 1.0, DEFAULT_POINTS).unwrap().final_energy();
            let stored = spec.stored_energy(&geom(), &s, s.theta_end()).unwrap();
            if stored == 0.0 {
                assert!(work.abs() < 1e-12);
            } else {
                assert!((work - stored).abs() / stored < 1e-3, "{}: {work} vs {stored}", kind.label());
            }
        }
    }
}

#[test]
fn doubled_springs_at_half_stiffness_change_nothing() {
    let s = StrokeConfig::from_degrees(179.9, 0.0).unwrap();
    for kind in translational_family().into_iter().chain([SpringKind::Rotational]) {
        let one = SpringSpec::new(kind, 6.0).unwrap();
        let two = SpringSpec::new(kind, 3.0).unwrap().with_count(2).unwrap();
        let p1 = integrate_profile(|t| one.charging_force(&geom(), &s, t), &geom(), &s, 1.0, 500).unwrap();
        let p2 = integrate_profile(|t| two.charging_force(&geom(), &s, t), &geom(), &s, 1.0, 500).unwrap();
        assert_eq!(p1, p2, "{}", kind.label());
    }
}

#[test]
fn sweeps_do_not_depend_on_scale() {
    let s = StrokeConfig::from_degrees(179.9, 0.0).unwrap();
    let grid = [0.1, 0.3, 0.8];
    let small = sweep_orientation(SweepModel::A, &geom(), &s, 5.0, &grid, 400).unwrap();
    let large = sweep_orientation(SweepModel::A, &LinkageGeometry::new(1.5).unwrap(), &s, 500.0, &grid, 400).unwrap();
    for (a, b) in small.points.iter().zip(&large.points) {
        let (ea, eb) = (a.normalized_energy.unwrap(), b.normalized_energy.unwrap());
        let (ka, kb) = (a.normalized_stiffness.unwrap(), b.normalized_stiffness.unwrap());
        assert!((ea - eb).abs() < 1e-9 && (ka - kb).abs() < 1e-9 * ka);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn full_stroke_energy_is_mirror_symmetric(gamma in 0.0f64..0.5, k in 0.1f64..100.0) {
        // over the whole stroke, gamma and 1 - gamma see the same length change
        let s = StrokeConfig::from_degrees(180.0, 0.0).unwrap();
        let lo = SpringSpec::model_a(gamma, k).unwrap().stored_energy(&geom(), &s, 0.0).unwrap();
        let hi = SpringSpec::model_a(1.0 - gamma, k).unwrap().stored_energy(&geom(), &s, 0.0).unwrap();
        prop_assert!((lo - hi).abs() <= 1e-12 * lo.max(1e-12));
    }

    #[test]
    fn stored_energy_matches_work_for_any_ratio(gamma in 0.02f64..0.98, model in 0usize..3) {
        let s = StrokeConfig::from_degrees(179.9, 0.0).unwrap();
        let kind = [SweepModel::A, SweepModel::B, SweepModel::C][model].kind(gamma);
        let spec = SpringSpec::new(kind, 10.0).unwrap();
        let work = spring_profile(&spec, &geom(), &s, 1.0, DEFAULT_POINTS).unwrap().final_energy();
        let stored = spec.stored_energy(&geom(), &s, 0.0).unwrap();
        prop_assume!(stored > 1e-9);
        prop_assert!((work - stored).abs() / stored < 1e-3);
    }
}
