//! Inverse-square separation penalty between one agent's planned virtual
//! times and a neighbor's prediction, with derivatives in the agent's own
//! virtual time for the successive convexification.

use std::sync::Arc;

use super::smooth::phi_with_derivatives;
use crate::mission::TrajectorySpec;

/// Penalty parameters of one agent: weight `C_i` and gate thresholds
/// `a < b` (full strength below `a`, inactive above `b`).
#[derive(Debug, Clone)]
pub struct CollisionTerms {
    pub weight: f64,
    pub near: f64,
    pub far: f64,
    pub own: Arc<TrajectorySpec>,
    /// Desired trajectory of every neighbor, indexed by agent id.
    pub fleet: Vec<Arc<TrajectorySpec>>,
    /// Own `s_1..s_K` the first convexification is taken around; `None`
    /// uses the constant-rate rollout from the initial condition.
    pub nominal: Option<Vec<f64>>,
}

/// `(value, d/ds, d²/ds²)` of `C φ(d, a, b) / d²` with
/// `d = ‖x_i(s) − q‖`.
pub(crate) fn penalty(terms: &CollisionTerms, s: f64, other: &nalgebra::Vector3<f64>) -> (f64, f64, f64) {
    let sample = terms.own.eval(s);
    let diff = sample.position - other;
    let d = diff.norm().max(1e-6);
    if d >= terms.far {
        return (0.0, 0.0, 0.0);
    }
    let dd = diff.dot(&sample.velocity) / d;
    let ddd = (sample.velocity.norm_squared() + diff.dot(&sample.acceleration) - dd * dd) / d;
    let (phi, phi1, phi2) = phi_with_derivatives(d, terms.near, terms.far);
    let c = terms.weight;
    let d2 = d * d;
    let g = c * phi / d2;
    let g_d = c * (phi1 / d2 - 2.0 * phi / (d2 * d));
    let g_dd = c * (phi2 / d2 - 4.0 * phi1 / (d2 * d) + 6.0 * phi / (d2 * d2));
    (g, g_d * dd, g_dd * dd * dd + g_d * ddd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::Vec3;

    #[test]
    fn derivatives_match_finite_differences() {
        let own = Arc::new(TrajectorySpec::circle(2.0, 0.7, 0.0, 1.0, 40.0).unwrap());
        let terms = CollisionTerms {
            weight: 3.0,
            near: 1.0,
            far: 4.0,
            own: own.clone(),
            fleet: vec![],
            nominal: None,
        };
        let other = Vec3::new(0.5, 0.3, 1.2);
        for k in 0..60 {
            let s = 0.1 + 0.13 * k as f64;
            let e = 1e-5;
            let (_, g1, g2) = penalty(&terms, s, &other);
            let (gp, g1p, _) = penalty(&terms, s + e, &other);
            let (gm, g1m, _) = penalty(&terms, s - e, &other);
            assert!(((gp - gm) / (2.0 * e) - g1).abs() < 1e-6 * (1.0 + g1.abs()));
            assert!(((g1p - g1m) / (2.0 * e) - g2).abs() < 1e-5 * (1.0 + g2.abs()));
        }
    }
}
