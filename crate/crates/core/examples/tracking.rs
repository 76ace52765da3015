//! Point-mass tracker following a circle through a decaying gust.

use timecoord::mission::TrajectorySpec;
use timecoord::plant::{step_pointmass, wind_at, TrackerGains, TrackingTarget, VehicleState, WindProfile};

fn main() -> timecoord::Result<()> {
    let spec = TrajectorySpec::circle(3.0, 0.4, 0.0, 2.0, 30.0)?;
    let wind = WindProfile::LinearDecay {
        v0: 5.0,
        t_end: 10.0,
        direction: [0.0, -1.0, 0.0],
    };
    let gains = TrackerGains::default();
    let h = 0.01;
    let start = spec.eval(0.0);
    let mut state = VehicleState {
        position: start.position,
        velocity: start.velocity,
    };
    for k in 0..=1500 {
        let t = k as f64 * h;
        let d = spec.eval(t);
        if k % 150 == 0 {
            println!(
                "t {t:5.1}  wind {:4.2} m/s  error {:.4} m",
                wind_at(&wind, t, 1.0).norm(),
                (state.position - d.position).norm()
            );
        }
        let target = TrackingTarget {
            position: d.position,
            velocity: d.velocity,
            acceleration: d.acceleration,
        };
        state = step_pointmass(&state, &target, &wind_at(&wind, t, 1.0), &gains, h);
    }
    Ok(())
}
