//! Self-contained convex QP solver:
//!
//!   minimize ½ xᵀPx + qᵀx   subject to   l ≤ Ax ≤ u
//!
//! Operator-splitting (ADMM) with fixed step parameters, over-relaxation,
//! Ruiz equilibration of the KKT matrix, and a cached dense factorization.
//! The x-update solves the reduced KKT system (P + σI + ρAᵀA)x = rhs, which
//! is symmetric positive definite for any σ > 0, so one LDLᵀ/Cholesky
//! factorization is reused across all iterations.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuadProg {
    pub p: DMatrix<f64>,
    pub q: DVector<f64>,
    pub a: DMatrix<f64>,
    pub l: DVector<f64>,
    pub u: DVector<f64>,
}

impl QuadProg {
    pub fn new(
        p: DMatrix<f64>,
        q: DVector<f64>,
        a: DMatrix<f64>,
        l: DVector<f64>,
        u: DVector<f64>,
    ) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() != n || q.len() != n || a.ncols() != n {
            return Err(Error::BadProgram("P/q/A dimensions disagree".into()));
        }
        let m = a.nrows();
        if l.len() != m || u.len() != m {
            return Err(Error::BadProgram("bound dimensions disagree".into()));
        }
        let scale = p.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                if (p[(i, j)] - p[(j, i)]).abs() > 1e-12 * (1.0 + scale) {
                    return Err(Error::BadProgram("P is not symmetric".into()));
                }
            }
        }
        for i in 0..m {
            // Rejects crossed bounds and NaNs in one test.
            if l[i].partial_cmp(&u[i]) != Some(std::cmp::Ordering::Less)
                && l[i].partial_cmp(&u[i]) != Some(std::cmp::Ordering::Equal)
            {
                return Err(Error::BadProgram(format!(
                    "crossed bounds in row {i}: l = {} > u = {}",
                    l[i], u[i]
                )));
            }
        }
        Ok(QuadProg { p, q, a, l, u })
    }

    pub fn num_vars(&self) -> usize {
        self.p.nrows()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.nrows()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * (x.transpose() * &self.p * x)[(0, 0)] + self.q.dot(x)
    }
}

#[derive(Clone, Debug)]
pub struct QpSettings {
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub ruiz_iters: usize,
    pub check_interval: usize,
}

impl Default for QpSettings {
    fn default() -> Self {
        QpSettings {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            eps_abs: 1e-6,
            eps_rel: 1e-6,
            max_iter: 20_000,
            ruiz_iters: 10,
            check_interval: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QpStatus {
    Solved,
    MaxIter,
    PrimalInfeasibleSuspected,
}

#[derive(Clone, Debug)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub status: QpStatus,
    pub primal_res: f64,
    pub dual_res: f64,
    pub iterations: usize,
    pub objective: f64,
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |s, x| s.max(x.abs()))
}

/// Ruiz equilibration of the KKT block matrix [P Aᵀ; A 0]: returns diagonal
/// scalings (d over variables, e over constraints) after `iters` sweeps.
fn ruiz_scalings(p: &DMatrix<f64>, a: &DMatrix<f64>, iters: usize) -> (DVector<f64>, DVector<f64>) {
    let n = p.nrows();
    let m = a.nrows();
    let mut d = DVector::from_element(n, 1.0);
    let mut e = DVector::from_element(m, 1.0);
    for _ in 0..iters {
        for j in 0..n {
            let mut norm = 0.0f64;
            for i in 0..n {
                norm = norm.max((d[i] * p[(i, j)] * d[j]).abs());
            }
            for i in 0..m {
                norm = norm.max((e[i] * a[(i, j)] * d[j]).abs());
            }
            if norm > 0.0 {
                d[j] *= 1.0 / norm.clamp(1e-8, 1e8).sqrt();
            }
        }
        for i in 0..m {
            let mut norm = 0.0f64;
            for j in 0..n {
                norm = norm.max((e[i] * a[(i, j)] * d[j]).abs());
            }
            if norm > 0.0 {
                e[i] *= 1.0 / norm.clamp(1e-8, 1e8).sqrt();
            }
        }
    }
    (d, e)
}

/// ADMM iteration until the unscaled KKT residuals meet
/// ε_abs + ε_rel·scale, the iteration budget runs out, or a primal
/// infeasibility certificate is detected. Fully deterministic.
pub fn solve(prog: &QuadProg, settings: &QpSettings) -> Result<QpSolution> {
    let n = prog.num_vars();
    let m = prog.num_constraints();
    let (rho, sigma, alpha) = (settings.rho, settings.sigma, settings.alpha);

    let (d, e) = ruiz_scalings(&prog.p, &prog.a, settings.ruiz_iters);
    let dm = DMatrix::from_diagonal(&d);
    let em = DMatrix::from_diagonal(&e);
    let ps = &dm * &prog.p * &dm;
    let qs = dm.clone() * &prog.q;
    let as_ = &em * &prog.a * &dm;
    let ls = DVector::from_fn(m, |i, _| e[i] * prog.l[i]);
    let us = DVector::from_fn(m, |i, _| e[i] * prog.u[i]);

    let mut kkt = ps.clone() + as_.transpose() * &as_ * rho;
    for i in 0..n {
        kkt[(i, i)] += sigma;
    }
    let chol = Cholesky::new(kkt)
        .ok_or_else(|| Error::BadProgram("reduced KKT matrix is not positive definite".into()))?;

    let mut x = DVector::zeros(n);
    let mut z = DVector::zeros(m);
    let mut y = DVector::zeros(m);
    let mut y_prev_check = y.clone();

    let unscale_x = |x: &DVector<f64>| DVector::from_fn(n, |i, _| d[i] * x[i]);
    let unscale_y = |y: &DVector<f64>| DVector::from_fn(m, |i, _| e[i] * y[i]);
    let unscale_z = |z: &DVector<f64>| DVector::from_fn(m, |i, _| z[i] / e[i]);

    let mut iterations = 0;
    let mut status = QpStatus::MaxIter;
    let (mut primal_res, mut dual_res) = (f64::INFINITY, f64::INFINITY);

    while iterations < settings.max_iter {
        iterations += 1;

        let rhs = &x * sigma - &qs + as_.transpose() * (&z * rho - &y);
        let xt = chol.solve(&rhs);
        let zt = &as_ * &xt;
        let x_next = &xt * alpha + &x * (1.0 - alpha);
        let z_hat = &zt * alpha + &z * (1.0 - alpha);
        let mut z_next = &z_hat + &y / rho;
        for i in 0..m {
            z_next[i] = z_next[i].clamp(ls[i], us[i]);
        }
        y += (&z_hat - &z_next) * rho;
        x = x_next;
        z = z_next;

        if !x.iter().all(|v| v.is_finite()) || !y.iter().all(|v| v.is_finite()) {
            status = QpStatus::PrimalInfeasibleSuspected;
            break;
        }

        if iterations % settings.check_interval == 0 || iterations == settings.max_iter {
            let xu = unscale_x(&x);
            let yu = unscale_y(&y);
            let zu = unscale_z(&z);
            let ax = &prog.a * &xu;
            let px = &prog.p * &xu;
            let aty = prog.a.transpose() * &yu;

            primal_res = inf_norm(&(&ax - &zu));
            dual_res = inf_norm(&(&px + &prog.q + &aty));
            let tol_p = settings.eps_abs
                + settings.eps_rel * inf_norm(&ax).max(inf_norm(&zu));
            let tol_d = settings.eps_abs
                + settings.eps_rel * inf_norm(&px).max(inf_norm(&aty)).max(inf_norm(&prog.q));
            if primal_res <= tol_p && dual_res <= tol_d {
                status = QpStatus::Solved;
                break;
            }

            // Primal infeasibility certificate from the dual update
            // direction: Aᵀδy ≈ 0 with a strictly negative support value
            // (1e-4 thresholds on the normalized direction).
            let dy = &y - &y_prev_check;
            let dy_norm = inf_norm(&dy);
            if dy_norm > 1e-12 {
                let dyn_ = &dy / dy_norm;
                let at_dy = as_.transpose() * &dyn_;
                if inf_norm(&at_dy) <= 1e-4 {
                    let mut support = 0.0;
                    let mut unbounded_dir = false;
                    for i in 0..m {
                        let v = dyn_[i];
                        if v > 1e-10 {
                            if us[i].is_infinite() {
                                unbounded_dir = true;
                                break;
                            }
                            support += us[i] * v;
                        } else if v < -1e-10 {
                            if ls[i].is_infinite() {
                                unbounded_dir = true;
                                break;
                            }
                            support += ls[i] * v;
                        }
                    }
                    if !unbounded_dir && support < -1e-4 {
                        status = QpStatus::PrimalInfeasibleSuspected;
                        break;
                    }
                }
            }
            y_prev_check = y.clone();
        }
    }

    let x_out = unscale_x(&x);
    let y_out = unscale_y(&y);
    let objective = prog.objective(&x_out);
    Ok(QpSolution { x: x_out, y: y_out, status, primal_res, dual_res, iterations, objective })
}
