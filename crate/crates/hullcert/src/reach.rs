//! Flow-map evaluation for uncertain ODEs, variational-equation Jacobians,
//! and reachable-hull estimation with second-order certificates.
//!
//! Fixed-step classical RK4 only: the built-in systems carry stepwise
//! controls on unit intervals, so aligning the grid with the control breaks
//! keeps every step smooth and runs reproducible.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bounds::{self, BoundKind, BoundReport, SmoothnessConstants};
use crate::covers::{BoundaryCover, SmoothSetDescriptor};
use crate::error::{Error, Result};
use crate::geometry::{Polytope, VertexCloud};
use crate::maps::{self, SmoothMapDescriptor};
use crate::robust::OcpParams;

/// Piecewise-constant control signal on [0, T].
#[derive(Clone, Debug, Default)]
pub struct ControlSchedule {
    /// Interval starts; value `i` applies on `[breaks[i], breaks[i+1])`.
    pub breaks: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ControlSchedule {
    pub fn constant(value: Vec<f64>) -> Self {
        ControlSchedule { breaks: vec![0.0], values: vec![value] }
    }

    /// Unit-interval schedule from a list of per-second controls.
    pub fn unit_intervals(values: Vec<Vec<f64>>) -> Self {
        let breaks = (0..values.len()).map(|i| i as f64).collect();
        ControlSchedule { breaks, values }
    }

    pub fn value_at(&self, t: f64) -> &[f64] {
        if self.values.is_empty() {
            return &[];
        }
        let mut idx = 0;
        for (i, &b) in self.breaks.iter().enumerate() {
            if t >= b {
                idx = i;
            } else {
                break;
            }
        }
        &self.values[idx]
    }
}

type FieldFn = Arc<dyn Fn(&[f64], &[f64], &[f64], f64) -> Vec<f64> + Send + Sync>;
type FieldJacFn = Arc<dyn Fn(&[f64], &[f64], &[f64], f64) -> DMatrix<f64> + Send + Sync>;

/// An uncertain ODE ẋ = f(x, θ, u(t), t) with a parameter-set descriptor
/// over (x⁰, θ) and an optional affine structure for exact flow constants.
#[derive(Clone)]
pub struct OdeSystem {
    pub name: String,
    pub state_dim: usize,
    pub param_dim: usize,
    pub field: FieldFn,
    /// ∂f/∂x (analytic); finite differences are used when absent.
    pub jac_x: Option<FieldJacFn>,
    /// ∂f/∂θ (analytic); finite differences are used when absent.
    pub jac_theta: Option<FieldJacFn>,
    pub initial_state: Vec<f64>,
    pub control: ControlSchedule,
    /// Descriptor of the uncertain-input set the covers live on.
    pub param_set: SmoothSetDescriptor,
    /// Certified flow-map constants, when known in closed form.
    pub flow_constants: Option<SmoothnessConstants>,
    /// (A, B) for affine systems ẋ = Ax + Bθ + g(u, t): enables exact
    /// constants via the matrix exponential.
    pub linear_part: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub terminal: Vec<f64>,
    pub trajectory: Vec<(f64, Vec<f64>)>,
    /// Sensitivity of the terminal state w.r.t. (x⁰, θ), n × (n + p);
    /// present after variational integration. J(0) = [I | 0].
    pub jacobian: Option<DMatrix<f64>>,
}

fn rk4_drive(
    sys: &OdeSystem,
    mut state: Vec<f64>,
    t_final: f64,
    steps: usize,
    mut derivative: impl FnMut(&OdeSystem, &[f64], &[f64], f64) -> Vec<f64>,
) -> Result<FlowResult> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let h = t_final / steps as f64;
    let dim = state.len();
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push((0.0, state.clone()));
    for k in 0..steps {
        let t = k as f64 * h;
        // Controls are resolved once per step at the midpoint; with breaks
        // aligned to the grid the step interior is a single interval.
        let u = sys.control.value_at(t + 0.5 * h).to_vec();
        let k1 = derivative(sys, &state, &u, t);
        let s2: Vec<f64> = state.iter().zip(&k1).map(|(x, d)| x + 0.5 * h * d).collect();
        let k2 = derivative(sys, &s2, &u, t + 0.5 * h);
        let s3: Vec<f64> = state.iter().zip(&k2).map(|(x, d)| x + 0.5 * h * d).collect();
        let k3 = derivative(sys, &s3, &u, t + 0.5 * h);
        let s4: Vec<f64> = state.iter().zip(&k3).map(|(x, d)| x + h * d).collect();
        let k4 = derivative(sys, &s4, &u, t + h);
        for i in 0..dim {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::OdeBlowUp { time: t + h });
        }
        trajectory.push((t + h, state.clone()));
    }
    Ok(FlowResult { terminal: state, trajectory, jacobian: None })
}

/// Classical fixed-step RK4 for the state only.
pub fn integrate_rk4(
    sys: &OdeSystem,
    x0: &[f64],
    theta: &[f64],
    t_final: f64,
    steps: usize,
) -> Result<FlowResult> {
    let theta = theta.to_vec();
    rk4_drive(sys, x0.to_vec(), t_final, steps, move |sys, x, u, t| {
        (sys.field)(x, &theta, u, t)
    })
}

fn fd_jac_x(sys: &OdeSystem, x: &[f64], theta: &[f64], u: &[f64], t: f64) -> DMatrix<f64> {
    let n = sys.state_dim;
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = 1e-6 * (1.0 + x[j].abs());
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[j] += h;
        lo[j] -= h;
        let f_hi = (sys.field)(&hi, theta, u, t);
        let f_lo = (sys.field)(&lo, theta, u, t);
        for i in 0..n {
            out[(i, j)] = (f_hi[i] - f_lo[i]) / (2.0 * h);
        }
    }
    out
}

fn fd_jac_theta(sys: &OdeSystem, x: &[f64], theta: &[f64], u: &[f64], t: f64) -> DMatrix<f64> {
    let n = sys.state_dim;
    let p = sys.param_dim;
    let mut out = DMatrix::zeros(n, p);
    for j in 0..p {
        let h = 1e-6 * (1.0 + theta[j].abs());
        let mut hi = theta.to_vec();
        let mut lo = theta.to_vec();
        hi[j] += h;
        lo[j] -= h;
        let f_hi = (sys.field)(x, &hi, u, t);
        let f_lo = (sys.field)(x, &lo, u, t);
        for i in 0..n {
            out[(i, j)] = (f_hi[i] - f_lo[i]) / (2.0 * h);
        }
    }
    out
}

/// Co-integrates the variational equation J̇ = (∂f/∂x)J + [0 | ∂f/∂θ] with
/// the state on the same RK4 grid; J(0) = [I | 0].
pub fn integrate_variational(
    sys: &OdeSystem,
    x0: &[f64],
    theta: &[f64],
    t_final: f64,
    steps: usize,
) -> Result<FlowResult> {
    let n = sys.state_dim;
    let p = sys.param_dim;
    let cols = n + p;
    let mut aug = x0.to_vec();
    aug.resize(n + n * cols, 0.0);
    for i in 0..n {
        aug[n + i * cols + i] = 1.0; // J(0) = [I | 0]
    }
    let theta_own = theta.to_vec();
    let jac_x = sys.jac_x.clone();
    let jac_theta = sys.jac_theta.clone();

    let result = rk4_drive(sys, aug, t_final, steps, move |sys, z, u, t| {
        let x = &z[..n];
        let a = match &jac_x {
            Some(j) => j(x, &theta_own, u, t),
            None => fd_jac_x(sys, x, &theta_own, u, t),
        };
        let b = match &jac_theta {
            Some(j) => j(x, &theta_own, u, t),
            None => fd_jac_theta(sys, x, &theta_own, u, t),
        };
        let mut dz = (sys.field)(x, &theta_own, u, t);
        dz.resize(n + n * cols, 0.0);
        // dJ/dt row i, col c: Σ_k A[i,k]·J[k,c], plus B[i, c−n] on the
        // parameter block.
        for i in 0..n {
            for c in 0..cols {
                let mut v = 0.0;
                for k in 0..n {
                    v += a[(i, k)] * z[n + k * cols + c];
                }
                if c >= n {
                    v += b[(i, c - n)];
                }
                dz[n + i * cols + c] = v;
            }
        }
        dz
    })?;

    let terminal = result.terminal[..n].to_vec();
    let jac = DMatrix::from_fn(n, cols, |i, c| result.terminal[n + i * cols + c]);
    let trajectory = result.trajectory.into_iter().map(|(t, z)| (t, z[..n].to_vec())).collect();
    Ok(FlowResult { terminal, trajectory, jacobian: Some(jac) })
}

/// Matrix exponential by scaling-and-squaring with a Taylor core (small
/// dense matrices only).
pub fn matexp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let norm = m.iter().fold(0.0f64, |s, v| s.max(v.abs())) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Exact flow constants for an affine system over a horizon t: the flow
/// Jacobian [e^{At} | ∫e^{A(t−s)}B ds] is constant in (x⁰, θ), so H̄ = 0 and
/// L̄ is its spectral norm. Both blocks come from one augmented exponential.
pub fn linear_flow_constants(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    t: f64,
    r: f64,
    param_only: bool,
) -> SmoothnessConstants {
    let n = a.nrows();
    let p = b.ncols();
    let mut aug = DMatrix::zeros(n + p, n + p);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, p)).copy_from(b);
    let e = matexp(&(aug * t));
    let phi = e.view((0, 0), (n, n)).into_owned();
    let w = e.view((0, n), (n, p)).into_owned();
    let jac = if param_only && p > 0 {
        w
    } else if p > 0 {
        let mut j = DMatrix::zeros(n, n + p);
        j.view_mut((0, 0), (n, n)).copy_from(&phi);
        j.view_mut((0, n), (n, p)).copy_from(&w);
        j
    } else {
        phi
    };
    let l_bar = jac.svd(false, false).singular_values.max();
    SmoothnessConstants::certified(l_bar, 0.0, r)
}

/// Wraps the time-t flow as a smooth-map descriptor over the cover
/// coordinates: either the full (x⁰, θ) block or θ alone with the system's
/// default initial state.
pub fn flow_map(sys: &OdeSystem, t: f64, steps: usize, param_only: bool) -> SmoothMapDescriptor {
    let n = sys.state_dim;
    let p = sys.param_dim;
    let in_dim = if param_only { p } else { n + p };
    let init_eval = sys.initial_state.clone();
    let split_eval = move |inp: &[f64]| -> (Vec<f64>, Vec<f64>) {
        if param_only {
            (init_eval.clone(), inp.to_vec())
        } else {
            (inp[..n].to_vec(), inp[n..].to_vec())
        }
    };
    let split_jac = split_eval.clone();
    let constants = sys.flow_constants.clone().or_else(|| {
        sys.linear_part
            .as_ref()
            .map(|(a, b)| linear_flow_constants(a, b, t, sys.param_set.radius, param_only))
    });
    let certified = constants.as_ref().is_some_and(|c| c.certified);
    let sys2 = sys.clone();
    let sys3 = sys.clone();
    SmoothMapDescriptor::new(
        format!("flow-{}", sys.name),
        in_dim,
        n,
        Arc::new(move |inp| {
            let (x0, theta) = split_eval(inp);
            integrate_rk4(&sys2, &x0, &theta, t, steps)
                .expect("flow evaluation diverged")
                .terminal
        }),
        Arc::new(move |inp| {
            let (x0, theta) = split_jac(inp);
            let full = integrate_variational(&sys3, &x0, &theta, t, steps)
                .expect("variational integration diverged")
                .jacobian
                .expect("variational result carries the jacobian");
            if param_only {
                full.view((0, n), (n, p)).into_owned()
            } else {
                full
            }
        }),
        constants,
        certified,
    )
}

/// Maps every cover point through the flow, hulls the terminal states (or a
/// selected output projection), and attaches the second-order certificate at
/// the cover's δ. Constants come from the system (closed form), from the
/// affine structure (matrix exponentials), or from the sampled estimator
/// (which un-certifies the report).
pub fn reach_hull_estimate(
    sys: &OdeSystem,
    cover: &BoundaryCover,
    t: f64,
    steps: usize,
    output_dims: Option<&[usize]>,
) -> Result<(Polytope, BoundReport)> {
    let n = sys.state_dim;
    let p = sys.param_dim;
    let cdim = cover.points.dim();
    let param_only = if cdim == n + p {
        false
    } else if cdim == p {
        true
    } else {
        return Err(Error::DimensionMismatch { expected: n + p, got: cdim });
    };

    let dims: Vec<usize> = match output_dims {
        Some(d) => d.to_vec(),
        None => (0..n).collect(),
    };
    let mut data = Vec::with_capacity(cover.len() * dims.len());
    for point in cover.points.iter() {
        let (x0, theta) = if param_only {
            (sys.initial_state.clone(), point.to_vec())
        } else {
            (point[..n].to_vec(), point[n..].to_vec())
        };
        let flow = integrate_rk4(sys, &x0, &theta, t, steps)?;
        for &d in &dims {
            data.push(flow.terminal[d]);
        }
    }
    let cloud = VertexCloud::new(dims.len(), data)?;
    let hull = Polytope::from_cloud(&cloud);

    let constants = match (&sys.flow_constants, &sys.linear_part) {
        (Some(c), _) => c.clone(),
        (None, Some((a, b))) => linear_flow_constants(a, b, t, sys.param_set.radius, param_only),
        (None, None) => {
            let descriptor = flow_map(sys, t, steps, param_only);
            maps::estimate_lipschitz(&descriptor, &sys.param_set, 1000, 0)?
        }
    };
    let epsilon = bounds::bound_second_order(&constants, cover.delta);
    let report = BoundReport {
        epsilon,
        kind: BoundKind::SecondOrder,
        delta: cover.delta,
        constants: constants.clone(),
        certified: constants.certified && cover.certified,
    };
    Ok((hull, report))
}

/// The spacecraft double integrator ṗ = v, v̇ = (u + F)/m with uncertainty
/// θ = (γΔM, F); state (p, v) ∈ R⁴ starting at rest at the origin. The flow
/// constants are the closed-form benchmark values (valid for the position
/// output).
pub fn double_integrator(params: &OcpParams, controls: Vec<[f64; 2]>) -> OdeSystem {
    let p_field = params.clone();
    let p_jt = params.clone();
    let gamma = params.gamma;
    OdeSystem {
        name: "double-integrator".into(),
        state_dim: 4,
        param_dim: 3,
        field: Arc::new(move |x, theta, u, _t| {
            let inv_mass = p_field.inv_mass(theta[0]);
            vec![x[2], x[3], inv_mass * (u[0] + theta[1]), inv_mass * (u[1] + theta[2])]
        }),
        jac_x: Some(Arc::new(|_, _, _, _| {
            let mut a = DMatrix::zeros(4, 4);
            a[(0, 2)] = 1.0;
            a[(1, 3)] = 1.0;
            a
        })),
        jac_theta: Some(Arc::new(move |_x, theta, u, _t| {
            let inv_mass = p_jt.inv_mass(theta[0]);
            let mut b = DMatrix::zeros(4, 3);
            b[(2, 0)] = (u[0] + theta[1]) / gamma;
            b[(3, 0)] = (u[1] + theta[2]) / gamma;
            b[(2, 1)] = inv_mass;
            b[(3, 2)] = inv_mass;
            b
        })),
        initial_state: vec![0.0; 4],
        control: ControlSchedule::unit_intervals(
            controls.into_iter().map(|u| u.to_vec()).collect(),
        ),
        param_set: params.uncertainty_set(),
        flow_constants: Some(params.constants()),
        linear_part: None,
    }
}

/// No dynamics: the flow is the identity, so reach hulls reproduce the
/// input cover with the δ²/(2r) certificate.
pub fn zero_system(dim: usize) -> OdeSystem {
    OdeSystem {
        name: "zero".into(),
        state_dim: dim,
        param_dim: 0,
        field: Arc::new(move |_, _, _, _| vec![0.0; dim]),
        jac_x: Some(Arc::new(move |_, _, _, _| DMatrix::zeros(dim, dim))),
        jac_theta: Some(Arc::new(move |_, _, _, _| DMatrix::zeros(dim, 0))),
        initial_state: vec![0.0; dim],
        control: ControlSchedule::default(),
        param_set: SmoothSetDescriptor::unit_circle(),
        flow_constants: None,
        linear_part: Some((DMatrix::zeros(dim, dim), DMatrix::zeros(dim, 0))),
    }
}

/// Damped rotation ẋ = Ax with A = [[0, 1], [−1, −0.3]]: initial states on
/// the unit circle, no parameters, exact constants from the matrix
/// exponential.
pub fn linear2d_system() -> OdeSystem {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -0.3]);
    let a_field = a.clone();
    let a_jac = a.clone();
    OdeSystem {
        name: "linear2d".into(),
        state_dim: 2,
        param_dim: 0,
        field: Arc::new(move |x, _theta, _u, _t| {
            vec![
                a_field[(0, 0)] * x[0] + a_field[(0, 1)] * x[1],
                a_field[(1, 0)] * x[0] + a_field[(1, 1)] * x[1],
            ]
        }),
        jac_x: Some(Arc::new(move |_, _, _, _| a_jac.clone())),
        jac_theta: Some(Arc::new(|_, _, _, _| DMatrix::zeros(2, 0))),
        initial_state: vec![0.0; 2],
        control: ControlSchedule::default(),
        param_set: SmoothSetDescriptor::unit_circle(),
        flow_constants: None,
        linear_part: Some((a, DMatrix::zeros(2, 0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers;
    use crate::geometry;
    use std::f64::consts::PI;

    fn exp_growth() -> OdeSystem {
        OdeSystem {
            name: "exp".into(),
            state_dim: 1,
            param_dim: 0,
            field: Arc::new(|x, _, _, _| vec![x[0]]),
            jac_x: None,
            jac_theta: None,
            initial_state: vec![1.0],
            control: ControlSchedule::default(),
            param_set: SmoothSetDescriptor::unit_circle(),
            flow_constants: None,
            linear_part: None,
        }
    }

    #[test]
    fn rk4_exponential() {
        let sys = exp_growth();
        let r = integrate_rk4(&sys, &[1.0], &[], 1.0, 100).unwrap();
        assert!((r.terminal[0] - 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn rk4_zero_field_is_identity() {
        let sys = OdeSystem {
            field: Arc::new(|_, _, _, _| vec![0.0, 0.0]),
            state_dim: 2,
            ..linear2d_system()
        };
        let r = integrate_rk4(&sys, &[0.3, -0.7], &[], 5.0, 17).unwrap();
        assert_eq!(r.terminal, vec![0.3, -0.7]);
    }

    #[test]
    fn rk4_order_four() {
        let sys = exp_growth();
        let exact = 1f64.exp();
        let errs: Vec<f64> = [10usize, 20, 40, 80]
            .iter()
            .map(|&s| {
                (integrate_rk4(&sys, &[1.0], &[], 1.0, s).unwrap().terminal[0] - exact).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((3.7..=4.3).contains(&slope), "observed order {slope}");
        }
    }

    #[test]
    fn rk4_exact_for_double_integrator() {
        // Quadratic trajectories are integrated exactly by RK4; compare with
        // the closed form at the horizon.
        let params = OcpParams::default();
        let controls: Vec<[f64; 2]> = vec![[0.07, -0.03]; 30];
        let sys = double_integrator(&params, controls.clone());
        let theta = [0.002, -0.0011, 0.0035];
        let flow = integrate_rk4(&sys, &[0.0; 4], &theta, 30.0, 30).unwrap();
        let closed = crate::robust::ocp_position(&params, &controls, &theta, 30.0);
        assert!(
            (flow.terminal[0] - closed[0]).abs() < 1e-12,
            "x: {} vs {}",
            flow.terminal[0],
            closed[0]
        );
        assert!((flow.terminal[1] - closed[1]).abs() < 1e-12);
    }

    #[test]
    fn rk4_blowup_detected() {
        let sys = OdeSystem {
            field: Arc::new(|x: &[f64], _: &[f64], _: &[f64], _| vec![x[0] * x[0]]),
            state_dim: 1,
            ..exp_growth()
        };
        match integrate_rk4(&sys, &[1.0], &[], 5.0, 50) {
            Err(Error::OdeBlowUp { time }) => assert!(time > 0.0 && time <= 5.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    /// Independent scaling-and-squaring exponential for the oracle (kept
    /// deliberately separate from `matexp`).
    fn expm_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let mut scale = 0u32;
        let mut norm = 0.0f64;
        for v in a.iter() {
            norm += v.abs();
        }
        while norm / 2f64.powi(scale as i32) > 0.25 {
            scale += 1;
        }
        let m = a / 2f64.powi(scale as i32);
        let mut acc = DMatrix::identity(n, n);
        let mut pow = DMatrix::identity(n, n);
        let mut fact = 1.0;
        for k in 1..=25 {
            pow = &pow * &m;
            fact *= k as f64;
            acc += &pow / fact;
        }
        for _ in 0..scale {
            acc = &acc * &acc;
        }
        acc
    }

    #[test]
    fn variational_linear_system_matches_matexp() {
        // ẋ = Ax + Bθ: J(T) = [e^{AT} | ∫ e^{A(T−s)} B ds], where the second
        // block is the top-right of exp([[A, B], [0, 0]]·T).
        let a = DMatrix::from_row_slice(2, 2, &[0.1, 1.0, -1.0, -0.2]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 0.8]);
        let af = a.clone();
        let bf = b.clone();
        let aj = a.clone();
        let bj = b.clone();
        let sys = OdeSystem {
            name: "affine".into(),
            state_dim: 2,
            param_dim: 2,
            field: Arc::new(move |x, th, _, _| {
                vec![
                    af[(0, 0)] * x[0] + af[(0, 1)] * x[1] + bf[(0, 0)] * th[0] + bf[(0, 1)] * th[1],
                    af[(1, 0)] * x[0] + af[(1, 1)] * x[1] + bf[(1, 0)] * th[0] + bf[(1, 1)] * th[1],
                ]
            }),
            jac_x: Some(Arc::new(move |_, _, _, _| aj.clone())),
            jac_theta: Some(Arc::new(move |_, _, _, _| bj.clone())),
            initial_state: vec![0.0; 2],
            control: ControlSchedule::default(),
            param_set: SmoothSetDescriptor::unit_circle(),
            flow_constants: None,
            linear_part: Some((a.clone(), b.clone())),
        };
        let t = 1.7;
        let flow = integrate_variational(&sys, &[0.4, -0.2], &[0.1, 0.3], t, 400).unwrap();
        let jac = flow.jacobian.unwrap();

        let mut aug = DMatrix::zeros(4, 4);
        aug.view_mut((0, 0), (2, 2)).copy_from(&(&a * t));
        aug.view_mut((0, 2), (2, 2)).copy_from(&(&b * t));
        let e = expm_oracle(&aug);
        for i in 0..2 {
            for j in 0..2 {
                assert!((jac[(i, j)] - e[(i, j)]).abs() < 1e-9, "phi block ({i},{j})");
                assert!((jac[(i, 2 + j)] - e[(i, 2 + j)]).abs() < 1e-9, "w block ({i},{j})");
            }
        }
    }

    #[test]
    fn variational_zero_field_identity_jacobian() {
        let sys = OdeSystem {
            field: Arc::new(|_, _, _, _| vec![0.0, 0.0]),
            jac_x: None,
            jac_theta: None,
            state_dim: 2,
            ..linear2d_system()
        };
        let flow = integrate_variational(&sys, &[1.0, 2.0], &[], 3.0, 10).unwrap();
        let jac = flow.jacobian.unwrap();
        assert_eq!(jac, DMatrix::identity(2, 2));
    }

    #[test]
    fn variational_matches_finite_differences() {
        let params = OcpParams::default();
        let controls: Vec<[f64; 2]> = (0..30)
            .map(|k| [0.1 * ((k % 5) as f64 - 2.0) / 2.0, -0.05 * ((k % 3) as f64 - 1.0)])
            .collect();
        let systems: Vec<(OdeSystem, Vec<f64>, Vec<f64>)> = vec![
            (double_integrator(&params, controls), vec![0.0; 4], vec![0.001, -0.002, 0.003]),
            (linear2d_system(), vec![0.6, -0.4], vec![]),
        ];
        for (sys, x0, theta) in systems {
            let t = 8.0;
            let steps = 160;
            let jac =
                integrate_variational(&sys, &x0, &theta, t, steps).unwrap().jacobian.unwrap();
            let h = 1e-5;
            let cols = sys.state_dim + sys.param_dim;
            let mut fd = DMatrix::zeros(sys.state_dim, cols);
            for c in 0..cols {
                let mut x_hi = x0.clone();
                let mut x_lo = x0.clone();
                let mut th_hi = theta.clone();
                let mut th_lo = theta.clone();
                if c < sys.state_dim {
                    x_hi[c] += h;
                    x_lo[c] -= h;
                } else {
                    th_hi[c - sys.state_dim] += h;
                    th_lo[c - sys.state_dim] -= h;
                }
                let f_hi = integrate_rk4(&sys, &x_hi, &th_hi, t, steps).unwrap().terminal;
                let f_lo = integrate_rk4(&sys, &x_lo, &th_lo, t, steps).unwrap().terminal;
                for i in 0..sys.state_dim {
                    fd[(i, c)] = (f_hi[i] - f_lo[i]) / (2.0 * h);
                }
            }
            let rel = (&fd - &jac).amax() / (1.0 + jac.amax());
            assert!(rel <= 1e-4, "{}: variational vs FD relative error {rel}", sys.name);
        }
    }

    #[test]
    fn reach_zero_dynamics_returns_cover_hull() {
        let sys = OdeSystem {
            field: Arc::new(|_, _, _, _| vec![0.0, 0.0]),
            jac_x: Some(Arc::new(|_, _, _, _| DMatrix::zeros(2, 2))),
            linear_part: Some((DMatrix::zeros(2, 2), DMatrix::zeros(2, 0))),
            ..linear2d_system()
        };
        let cover = covers::circle_points(1.0, 24);
        let (hull, report) = reach_hull_estimate(&sys, &cover, 5.0, 10, None).unwrap();
        assert_eq!(hull.len(), 24);
        // Identity flow: L = 1, H = 0, so the bound is δ²/(2r).
        assert!((report.epsilon - cover.delta * cover.delta / 2.0).abs() < 1e-15);
        assert!(report.certified);
    }

    #[test]
    fn reach_linear2d_bound_dominates_dense_reference() {
        let sys = linear2d_system();
        let t = 2.0;
        let steps = 200;
        let cover = covers::circle_points(1.0, 100);
        let (hull, report) = reach_hull_estimate(&sys, &cover, t, steps, None).unwrap();

        let dense = covers::circle_points(1.0, 10_000);
        let mut data = Vec::with_capacity(2 * dense.len());
        for p in dense.points.iter() {
            let f = integrate_rk4(&sys, p, &[], t, steps).unwrap();
            data.extend_from_slice(&f.terminal);
        }
        let dense_cloud = VertexCloud::new(2, data).unwrap();
        let d_h = geometry::hausdorff_nested(&dense_cloud, &hull).unwrap();
        assert!(d_h <= report.epsilon, "measured {d_h} exceeds certified {}", report.epsilon);
        assert!(report.certified);
    }

    #[test]
    fn reach_double_integrator_matches_closed_form_pipeline() {
        let params = OcpParams::default();
        let controls: Vec<[f64; 2]> =
            (0..30).map(|k| [0.05, -0.02 + 0.001 * k as f64]).collect();
        let sys = double_integrator(&params, controls.clone());
        let cover = covers::fibonacci_sphere(32, params.r()).unwrap();
        let (hull, report) = reach_hull_estimate(&sys, &cover, 30.0, 30, Some(&[0, 1])).unwrap();
        // The flow evaluated on the cover matches the closed-form position
        // map point by point, hence the same hull.
        let mut data = Vec::with_capacity(2 * cover.len());
        for x in cover.points.iter() {
            data.extend_from_slice(&crate::robust::ocp_position(&params, &controls, x, 30.0));
        }
        let closed_cloud = VertexCloud::new(2, data).unwrap();
        let closed_hull = geometry::convex_hull_2d(&closed_cloud);
        assert_eq!(hull.len(), closed_hull.len());
        let d = geometry::hausdorff_nested_hulls(&closed_hull, &hull).unwrap();
        assert!(d <= 1e-10, "pipelines disagree by {d}");
        assert!((report.constants.h_bar - 200.0).abs() < 1e-12);
    }

    #[test]
    fn reach_certificate_sound_over_rotated_covers() {
        // 100 seeded cover phases; the certified bound must dominate the
        // measured distance to a dense reference in every trial.
        let sys = linear2d_system();
        let t = 2.0;
        let steps = 120;
        let dense = covers::circle_points(1.0, 4000);
        let mut data = Vec::with_capacity(2 * dense.len());
        for p in dense.points.iter() {
            data.extend_from_slice(&integrate_rk4(&sys, p, &[], t, steps).unwrap().terminal);
        }
        let dense_cloud = VertexCloud::new(2, data).unwrap();
        let dense_hull = geometry::convex_hull_2d(&dense_cloud);
        let mut rng = crate::rng::CounterRng::new(2025, 0);
        for trial in 0..100 {
            let phase = rng.uniform(0.0, 2.0 * PI);
            let cover = covers::circle_points_phase(1.0, 64, phase);
            let (hull, report) = reach_hull_estimate(&sys, &cover, t, steps, None).unwrap();
            let d_h = geometry::hausdorff_nested_hulls(&dense_hull, &hull).unwrap();
            assert!(
                d_h <= report.epsilon,
                "trial {trial}: measured {d_h} > bound {}",
                report.epsilon
            );
        }
    }

    #[test]
    fn control_schedule_lookup() {
        let s = ControlSchedule::unit_intervals(vec![vec![1.0], vec![2.0], vec![3.0]]);
        assert_eq!(s.value_at(0.0), &[1.0]);
        assert_eq!(s.value_at(0.99), &[1.0]);
        assert_eq!(s.value_at(1.0), &[2.0]);
        assert_eq!(s.value_at(2.5), &[3.0]);
        assert_eq!(s.value_at(99.0), &[3.0]);
    }
}
