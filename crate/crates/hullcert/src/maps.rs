//! Smooth-map descriptors: evaluator + Jacobian + declared smoothness
//! constants, the built-in demo maps, a sampled Lipschitz estimator, and a
//! finite-difference Jacobian checker.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bounds::SmoothnessConstants;
use crate::covers::{self, SmoothSetDescriptor};
use crate::error::{Error, Result};
use crate::geometry::VertexCloud;
use crate::robust::OcpParams;

type EvalFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A C¹ map R^in → R^out with its Jacobian and (optionally) certified
/// Lipschitz constants of (f, df) over the map's intended domain.
#[derive(Clone)]
pub struct SmoothMapDescriptor {
    pub name: String,
    pub in_dim: usize,
    pub out_dim: usize,
    pub constants: Option<SmoothnessConstants>,
    pub certified: bool,
    eval: EvalFn,
    jac: JacFn,
}

impl SmoothMapDescriptor {
    pub fn new(
        name: impl Into<String>,
        in_dim: usize,
        out_dim: usize,
        eval: EvalFn,
        jac: JacFn,
        constants: Option<SmoothnessConstants>,
        certified: bool,
    ) -> Self {
        SmoothMapDescriptor { name: name.into(), in_dim, out_dim, constants, certified, eval, jac }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        (self.eval)(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        (self.jac)(x)
    }

    /// Maps every point of the cloud, producing the output cloud.
    pub fn apply_cloud(&self, cloud: &VertexCloud) -> Result<VertexCloud> {
        if cloud.dim() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, got: cloud.dim() });
        }
        let mut data = Vec::with_capacity(cloud.len() * self.out_dim);
        for p in cloud.iter() {
            data.extend_from_slice(&self.eval(p));
        }
        VertexCloud::new(self.out_dim, data)
    }
}

/// The axis-scaling map x ↦ (Lx₁, x₂), paired with the unit disk: f and f⁻¹
/// are linear, so L̄ = max(1, L), L̲ = max(1, 1/L), H̄ = 0.
pub fn map_scaling(l: f64) -> SmoothMapDescriptor {
    assert!(l > 0.0, "scaling factor must be positive");
    let constants = SmoothnessConstants {
        l_bar: l.max(1.0),
        h_bar: 0.0,
        l_under: Some((1.0 / l).max(1.0)),
        r: 1.0,
        s: Some(f64::INFINITY),
        certified: true,
    };
    SmoothMapDescriptor::new(
        "scaling",
        2,
        2,
        Arc::new(move |x| vec![l * x[0], x[1]]),
        Arc::new(move |_| DMatrix::from_row_slice(2, 2, &[l, 0.0, 0.0, 1.0])),
        Some(constants),
        true,
    )
}

/// Polar coordinates (r, θ) ↦ (r cos θ, r sin θ). Demo map for image sets
/// whose boundary self-intersects; constants are suprema over the annulus
/// r ∈ [1, 2] (L̄ = 2, H̄ = √5, L̲ = 1) and are demo-grade only.
pub fn map_polar() -> SmoothMapDescriptor {
    let constants = SmoothnessConstants {
        l_bar: 2.0,
        h_bar: 5f64.sqrt(),
        l_under: Some(1.0),
        r: 0.5,
        s: None,
        certified: true,
    };
    SmoothMapDescriptor::new(
        "polar",
        2,
        2,
        Arc::new(|x| vec![x[0] * x[1].cos(), x[0] * x[1].sin()]),
        Arc::new(|x| {
            let (r, th) = (x[0], x[1]);
            DMatrix::from_row_slice(2, 2, &[th.cos(), -r * th.sin(), th.sin(), r * th.cos()])
        }),
        Some(constants),
        true,
    )
}

/// The spacecraft position map x = (γΔM, F) ↦ p_u^x(t) for a fixed control
/// schedule and time. The Jacobian follows the bilinear structure:
/// ∂p/∂(γΔM) = (1/2γ)(F t² + S(t)), ∂p/∂F = ½(M̄ + γΔM/γ) t² I.
pub fn map_ocp_position(
    controls: &[[f64; 2]],
    t: f64,
    params: &OcpParams,
) -> Result<SmoothMapDescriptor> {
    if !(0.0..=params.t_horizon as f64).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} outside the horizon [0, {}]",
            params.t_horizon
        )));
    }
    let constants = params.constants();
    let p_eval = params.clone();
    let controls_eval: Vec<[f64; 2]> = controls.to_vec();
    let p_jac = params.clone();
    let controls_jac: Vec<[f64; 2]> = controls.to_vec();
    Ok(SmoothMapDescriptor::new(
        "ocp-position",
        3,
        2,
        Arc::new(move |x| crate::robust::ocp_position(&p_eval, &controls_eval, x, t).to_vec()),
        Arc::new(move |x| {
            let s = t.floor() as usize;
            let dt = t - s as f64;
            let mut sum = [0.0f64; 2];
            for (k, u) in controls_jac.iter().enumerate().take(s.min(controls_jac.len())) {
                let delta_k = 2.0 * (t - k as f64) - 1.0;
                sum[0] += u[0] * delta_k;
                sum[1] += u[1] * delta_k;
            }
            if dt > 0.0 && s < controls_jac.len() {
                sum[0] += controls_jac[s][0] * dt * dt;
                sum[1] += controls_jac[s][1] * dt * dt;
            }
            let tt = t * t;
            let d_x0 = [
                (x[1] * tt + sum[0]) / (2.0 * p_jac.gamma),
                (x[2] * tt + sum[1]) / (2.0 * p_jac.gamma),
            ];
            let d_f = 0.5 * p_jac.inv_mass(x[0]) * tt;
            DMatrix::from_row_slice(2, 3, &[d_x0[0], d_f, 0.0, d_x0[1], 0.0, d_f])
        }),
        Some(constants),
        true,
    ))
}

/// Sampled lower bounds for the Lipschitz constants of (f, df) over ∂X:
/// max pairwise difference quotients of values and of Jacobians (operator
/// norm). Never certified: the true suprema may be larger.
pub fn estimate_lipschitz(
    map: &SmoothMapDescriptor,
    set: &SmoothSetDescriptor,
    pairs: usize,
    seed: u64,
) -> Result<SmoothnessConstants> {
    if pairs < 1000 {
        return Err(Error::InvalidArgument("need at least 1000 sample pairs".into()));
    }
    let a = covers::sample_boundary_uniform(set, pairs, seed)?;
    let b = covers::sample_boundary_uniform(set, pairs, seed ^ 0x9E37_79B9_7F4A_7C15)?;
    let mut l_est = 0.0f64;
    let mut h_est = 0.0f64;
    for (p, q) in a.iter().zip(b.iter()) {
        let dist_in = crate::geometry::dist(p, q);
        if dist_in < 1e-14 {
            continue;
        }
        let fp = map.eval(p);
        let fq = map.eval(q);
        let dist_out = crate::geometry::dist(&fp, &fq);
        l_est = l_est.max(dist_out / dist_in);
        let dj = map.jacobian(p) - map.jacobian(q);
        let op = dj.svd(false, false).singular_values.max();
        h_est = h_est.max(op / dist_in);
    }
    Ok(SmoothnessConstants {
        l_bar: l_est,
        h_bar: h_est,
        l_under: None,
        r: set.radius,
        s: None,
        certified: false,
    })
}

/// Central finite differences against the declared Jacobian. Returns the
/// worst relative error max|FD − J| / (1 + max|J|) over the points.
pub fn jacobian_check(map: &SmoothMapDescriptor, points: &VertexCloud, h: f64) -> Result<f64> {
    if !(1e-8..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!("h = {h} outside [1e-8, 1e-3]")));
    }
    if points.dim() != map.in_dim {
        return Err(Error::DimensionMismatch { expected: map.in_dim, got: points.dim() });
    }
    let mut worst = 0.0f64;
    for p in points.iter() {
        let jac = map.jacobian(p);
        let mut fd = DMatrix::zeros(map.out_dim, map.in_dim);
        for j in 0..map.in_dim {
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[j] += h;
            lo[j] -= h;
            let f_hi = map.eval(&hi);
            let f_lo = map.eval(&lo);
            for d in 0..map.out_dim {
                fd[(d, j)] = (f_hi[d] - f_lo[d]) / (2.0 * h);
            }
        }
        let scale = 1.0 + jac.amax();
        worst = worst.max((&fd - &jac).amax() / scale);
    }
    Ok(worst)
}
