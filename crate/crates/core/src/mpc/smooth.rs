//! C² quintic gates used for link quality and collision activation.

use crate::error::{Error, Result};

fn check(p1: f64, p2: f64) -> Result<()> {
    if !(p1 < p2) || !p1.is_finite() || !p2.is_finite() {
        return Err(Error::Config(format!(
            "smoothstep thresholds need p1 < p2, got {p1} and {p2}"
        )));
    }
    Ok(())
}

/// `(value, first derivative, second derivative)` of the rising quintic
/// `6σ⁵ − 15σ⁴ + 10σ³` with `σ = (z − p1)/(p2 − p1)`, clamped to 0 / 1.
fn rising(z: f64, p1: f64, p2: f64) -> (f64, f64, f64) {
    if z <= p1 {
        return (0.0, 0.0, 0.0);
    }
    if z >= p2 {
        return (1.0, 0.0, 0.0);
    }
    let w = p2 - p1;
    let s = (z - p1) / w;
    let s2 = s * s;
    let v = s2 * s * (10.0 + s * (-15.0 + 6.0 * s));
    let d1 = 30.0 * s2 * (1.0 - s) * (1.0 - s) / w;
    let d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (w * w);
    (v, d1, d2)
}

/// Link-quality gate: 1 below `p1`, 0 above `p2`.
pub fn smoothstep_phi(z: f64, p1: f64, p2: f64) -> Result<f64> {
    check(p1, p2)?;
    Ok(1.0 - rising(z, p1, p2).0)
}

/// Coordination gate: 0 below `q1`, 1 above `q2`.
pub fn smoothstep_psi(z: f64, q1: f64, q2: f64) -> Result<f64> {
    check(q1, q2)?;
    Ok(rising(z, q1, q2).0)
}

/// `φ` and its first two derivatives in `z`. Thresholds must already be valid.
pub(crate) fn phi_with_derivatives(z: f64, p1: f64, p2: f64) -> (f64, f64, f64) {
    let (v, d1, d2) = rising(z, p1, p2);
    (1.0 - v, -d1, -d2)
}
