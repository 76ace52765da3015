//! Primal active-set method for small dense strictly convex QPs
//!
//! ```text
//! minimise ½ xᵀHx + fᵀx   subject to   A x ≤ b
//! ```
//!
//! started from a feasible point. Each iteration solves the equality-constrained
//! subproblem on the working set exactly (dense LU of the KKT matrix).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DenseQp {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constraints: DMatrix<f64>,
    pub bounds: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// One nonnegative multiplier per constraint row; zero off the working set.
    pub multipliers: DVector<f64>,
    pub iterations: usize,
    /// Max of stationarity, primal infeasibility, dual infeasibility and
    /// complementarity violations.
    pub kkt_residual: f64,
}

impl DenseQp {
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x)
    }

    pub fn kkt_residual(&self, x: &DVector<f64>, multipliers: &DVector<f64>) -> f64 {
        let stationarity = &self.hessian * x + &self.linear + self.constraints.transpose() * multipliers;
        let slack = &self.bounds - &self.constraints * x;
        let mut r = stationarity.amax();
        for i in 0..slack.len() {
            r = r
                .max(-slack[i])
                .max(-multipliers[i])
                .max((multipliers[i] * slack[i]).abs());
        }
        r
    }

    pub fn solve(&self, x0: &DVector<f64>, tol: f64, max_iter: usize) -> Result<QpSolution> {
        let n = self.linear.len();
        let m = self.bounds.len();
        let mut x = x0.clone();
        let start_violation = (&self.constraints * &x - &self.bounds).max();
        if m > 0 && start_violation > tol {
            return Err(Error::Invariant(format!(
                "active-set start point violates a constraint by {start_violation:.3e}"
            )));
        }
        let row_norms: Vec<f64> = (0..m).map(|i| self.constraints.row(i).norm()).collect();
        let mut working: Vec<usize> = Vec::new();
        let mut lambda_w = DVector::zeros(0);

        for iteration in 1..=max_iter {
            let w = working.len();
            let mut kkt = DMatrix::zeros(n + w, n + w);
            kkt.view_mut((0, 0), (n, n)).copy_from(&self.hessian);
            for (k, &row) in working.iter().enumerate() {
                for j in 0..n {
                    let a = self.constraints[(row, j)];
                    kkt[(n + k, j)] = a;
                    kkt[(j, n + k)] = a;
                }
            }
            let mut rhs = DVector::zeros(n + w);
            rhs.rows_mut(0, n).copy_from(&(-(&self.hessian * &x + &self.linear)));
            let sol = kkt.lu().solve(&rhs).ok_or(Error::SolverNonConvergence {
                iterations: iteration,
                residual: f64::NAN,
            })?;
            let p = sol.rows(0, n).into_owned();
            lambda_w = sol.rows(n, w).into_owned();

            if p.amax() <= 1e-12 * (1.0 + x.amax()) {
                let most_negative = (0..w)
                    .filter(|&k| lambda_w[k] < -tol)
                    .min_by(|&a, &b| lambda_w[a].total_cmp(&lambda_w[b]));
                match most_negative {
                    None => {
                        let multipliers = self.scatter(&working, &lambda_w);
                        let kkt_residual = self.kkt_residual(&x, &multipliers);
                        return Ok(QpSolution {
                            x,
                            multipliers,
                            iterations: iteration,
                            kkt_residual,
                        });
                    }
                    Some(k) => {
                        working.remove(k);
                    }
                }
                continue;
            }

            let mut step = 1.0;
            let mut blocking = None;
            let p_norm = p.norm();
            for i in (0..m).filter(|i| !working.contains(i)) {
                let ap = self.constraints.row(i).transpose().dot(&p);
                if ap > 1e-12 * row_norms[i] * p_norm {
                    let slack = self.bounds[i] - self.constraints.row(i).transpose().dot(&x);
                    let ratio = (slack / ap).max(0.0);
                    if ratio < step {
                        step = ratio;
                        blocking = Some(i);
                    }
                }
            }
            x += step * &p;
            if let Some(i) = blocking {
                working.push(i);
            }
        }
        let multipliers = self.scatter(&working, &lambda_w);
        Err(Error::SolverNonConvergence {
            iterations: max_iter,
            residual: self.kkt_residual(&x, &multipliers),
        })
    }

    fn scatter(&self, working: &[usize], lambda_w: &DVector<f64>) -> DVector<f64> {
        let mut full = DVector::zeros(self.bounds.len());
        for (k, &row) in working.iter().enumerate().take(lambda_w.len()) {
            full[row] = lambda_w[k];
        }
        full
    }
}
