use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use timecoord::harness::{run_scenario, scenarios, PlantConfig};
use timecoord::mission::{TrajectorySpec, Vec3};
use timecoord::mpc::correction_term;
use timecoord::plant::{step_ideal, step_pointmass, wind_at, TrackerGains, TrackingTarget, VehicleState, WindProfile};

fn hold(p: Vec3) -> TrackingTarget {
    TrackingTarget {
        position: p,
        velocity: Vec3::zeros(),
        acceleration: Vec3::zeros(),
    }
}

#[test]
fn offsets_decay_without_wind() {
    let gains = TrackerGains::default();
    let h = 0.001;
    let deadline = 5.0 / gains.kp.min(gains.kd).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        // offsets up to 10 cm in every direction
        let offset = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize() * rng.random_range(0.0..0.1);
        let mut s = VehicleState {
            position: offset,
            velocity: Vec3::zeros(),
        };
        let mut t = 0.0;
        while t < deadline {
            s = step_pointmass(&s, &hold(Vec3::zeros()), &Vec3::zeros(), &gains, h);
            t += h;
        }
        assert!(s.position.norm() < 1e-3, "offset {offset:?} left {}", s.position.norm());
    }
}

#[test]
fn steady_offset_under_constant_wind() {
    let gains = TrackerGains::default();
    for speed in [0.5, 2.0, 4.0] {
        let wind = Vec3::new(speed, 0.0, 0.0);
        let mut s = VehicleState {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
        };
        for _ in 0..10_000 {
            s = step_pointmass(&s, &hold(Vec3::zeros()), &wind, &gains, 0.001);
        }
        let expected = speed / gains.kp;
        assert!((s.position.norm() - expected).abs() < 0.05 * expected);
        assert!(s.position.x > 0.0, "pushed downwind");
    }
}

#[test]
fn saturation_caps_the_commanded_acceleration() {
    let gains = TrackerGains::default();
    let s = VehicleState {
        position: Vec3::new(100.0, 0.0, 0.0),
        velocity: Vec3::zeros(),
    };
    let next = step_pointmass(&s, &hold(Vec3::zeros()), &Vec3::zeros(), &gains, 0.01);
    assert!((next.velocity.norm() - gains.a_max * 0.01).abs() < 1e-12);
}

#[test]
fn wind_profile_endpoints_and_midpoint() {
    let w = WindProfile::LinearDecay {
        v0: 7.0,
        t_end: 18.0,
        direction: [0.0, -1.0, 0.0],
    };
    assert_eq!(wind_at(&w, 0.0, 1.0).norm(), 7.0);
    assert_eq!(wind_at(&w, 9.0, 1.0).norm(), 3.5);
    assert_eq!(wind_at(&w, 18.0, 1.0), Vec3::zeros());
    assert_eq!(wind_at(&w, 25.0, 2.0), Vec3::zeros());
    assert_eq!(wind_at(&w, 0.0, 0.5), Vec3::new(0.0, -3.5, 0.0));
    assert_eq!(wind_at(&WindProfile::None, 3.0, 1.0), Vec3::zeros());
}

#[test]
fn ideal_tracking_gives_zero_correction() {
    let spec = TrajectorySpec::circle(3.0, 0.4, 0.2, 2.0, 60.0).unwrap();
    for k in 0..50 {
        let gamma = 0.7 * k as f64;
        let v = step_ideal(&spec, gamma, 1.3);
        let target = spec.eval(gamma);
        assert_eq!(
            correction_term(&v.position, &target.position, &(target.velocity * 1.3), 1.0, 1.0),
            0.0
        );
        assert!((v.velocity.norm() - spec.eval(gamma).velocity.norm() * 1.3).abs() < 1e-9);
    }
}

#[test]
fn correction_is_inert_under_ideal_tracking() {
    let mut on = scenarios::scenario_ideal();
    on.duration = 5.0;
    let mut off = on.clone();
    off.mpc.beta = 0.0;
    let (a, b) = (run_scenario(&on).unwrap(), run_scenario(&off).unwrap());
    for (x, y) in a.steps.iter().zip(&b.steps) {
        assert_eq!(x.gamma, y.gamma);
        assert!(x.correction.iter().all(|c| *c == 0.0));
    }
}

#[test]
fn wind_produces_corrections_with_the_right_sign() {
    let mut cfg = scenarios::scenario_wind();
    cfg.duration = 6.0;
    let log = run_scenario(&cfg).unwrap();
    let spec = &cfg.agents[0].trajectory;
    let mut checked = 0;
    for (k, r) in log.steps.iter().enumerate().skip(1) {
        let prev = &log.steps[k - 1];
        // the correction at step k measures the vehicle after step k - 1
        let target = spec.eval(prev.gamma[0]);
        let tangent = target.velocity * prev.gamma_dot[0];
        if tangent.norm() < 1e-6 {
            continue;
        }
        let along = (prev.position[0] - target.position).dot(&tangent);
        if along.abs() > 1e-6 {
            assert_eq!(r.correction[0] > 0.0, along < 0.0, "step {k}");
            checked += 1;
        }
    }
    assert!(checked > 50);
    assert!(log.steps.iter().any(|r| r.correction.iter().any(|c| c.abs() > 1e-3)));
    assert!(matches!(cfg.plant, PlantConfig::PointMass { .. }));
}
