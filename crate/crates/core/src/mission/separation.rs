use super::TrajectorySpec;

pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Sampled planning-time audit of pairwise trajectory separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub min_distance: f64,
    pub at_tau: f64,
    pub pair: (usize, usize),
    pub required: f64,
    pub satisfied: bool,
}

/// Samples all trajectories at a common mission time on `[0, min duration]`
/// and reports the closest approach over every pair.
pub fn check_separation(specs: &[TrajectorySpec], required: f64, grid_step: f64) -> SeparationReport {
    let span = specs.iter().map(|s| s.duration).fold(f64::INFINITY, f64::min);
    let steps = if span.is_finite() {
        (span / grid_step).floor() as usize
    } else {
        0
    };
    let mut best = SeparationReport {
        min_distance: f64::INFINITY,
        at_tau: 0.0,
        pair: (0, 0),
        required,
        satisfied: true,
    };
    let mut positions = Vec::with_capacity(specs.len());
    for k in 0..=steps {
        let tau = (k as f64 * grid_step).min(span);
        positions.clear();
        positions.extend(specs.iter().map(|s| s.position(tau)));
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let d = (positions[i] - positions[j]).norm();
                if d < best.min_distance {
                    best.min_distance = d;
                    best.at_tau = tau;
                    best.pair = (i, j);
                }
            }
        }
    }
    best.satisfied = best.min_distance >= required;
    best
}
