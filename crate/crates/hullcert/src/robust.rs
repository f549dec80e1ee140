//! Padded sampled relaxations of robust programs, the spacecraft
//! trajectory-planning instance, and a-posteriori feasibility verification.
//!
//! A robust program asks for f(x, u) ∈ C for every x in an uncertainty set
//! X. Sampling x_i on ∂X and tightening every halfspace of C by ε turns it
//! into a finite convex program; when ε dominates the hull-estimation error
//! bound, any solution of the relaxation is feasible for the original
//! program.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundKind, BoundReport, SmoothnessConstants};
use crate::covers::{self, BoundaryCover, SmoothSetDescriptor, SmoothSetKind};
use crate::error::{Error, Result};
use crate::qp::{self, QpSettings, QpSolution, QpStatus, QuadProg};
use crate::rng::CounterRng;

/// Reference padding of the benchmark spacecraft instance.
pub const REFERENCE_EPSILON: f64 = 0.025;

/// A time-windowed obstacle halfspace: the position must satisfy
/// n̂ᵀ(p − c) ≤ 0 for integer times t in [t_start, t_end].
#[derive(Clone, Debug)]
pub struct Obstacle {
    pub normal: [f64; 2],
    pub point: [f64; 2],
    pub t_start: usize,
    pub t_end: usize,
}

impl Obstacle {
    pub fn new(normal: [f64; 2], point: [f64; 2], t_start: usize, t_end: usize) -> Obstacle {
        let n = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
        assert!(n > 0.0, "obstacle normal must be nonzero");
        Obstacle { normal: [normal[0] / n, normal[1] / n], point, t_start, t_end }
    }

    pub fn active_at(&self, t: f64) -> bool {
        t >= self.t_start as f64 && t <= self.t_end as f64
    }

    /// Signed violation at position p: positive means the constraint is
    /// broken by that distance.
    pub fn violation(&self, p: [f64; 2]) -> f64 {
        self.normal[0] * (p[0] - self.point[0]) + self.normal[1] * (p[1] - self.point[1])
    }
}

/// Spacecraft planning instance: a double integrator with uncertain inverse
/// mass and constant disturbance force, stepwise-constant controls on unit
/// intervals, two obstacle halfspaces, and a terminal goal box.
///
/// The uncertainty is rescaled as x = (γ·ΔM, F) with ΔM = 1/m − M̄, which
/// packs the mass range and the disturbance ball into one r-smooth ball of
/// radius r = √2·F_max in R³.
#[derive(Clone, Debug)]
pub struct OcpParams {
    /// Planning horizon in seconds (= number of unit control intervals).
    pub t_horizon: usize,
    /// Per-axis control bound ‖ū_s‖∞ ≤ u_max.
    pub u_max: f64,
    /// Disturbance bound ‖F‖ ≤ f_max.
    pub f_max: f64,
    pub mass_min: f64,
    pub mass_max: f64,
    /// Mass-channel rescaling so that γ·ΔM spans [−f_max, f_max].
    pub gamma: f64,
    /// Nominal inverse mass 1/32.
    pub m_bar: f64,
    pub obstacles: Vec<Obstacle>,
    pub p_goal: [f64; 2],
    pub dp_goal: [f64; 2],
}

impl Default for OcpParams {
    fn default() -> Self {
        OcpParams {
            t_horizon: 30,
            u_max: 0.2,
            f_max: 0.005,
            mass_min: 30.0,
            mass_max: 34.0,
            gamma: 2.25,
            m_bar: 1.0 / 32.0,
            obstacles: vec![
                Obstacle::new([1.0, -5.0], [0.0, -0.1], 1, 19),
                Obstacle::new([-1.0, -5.0], [2.0, -0.1], 20, 30),
            ],
            p_goal: [2.0, 0.05],
            dp_goal: [0.3, 0.14],
        }
    }
}

impl OcpParams {
    /// Smoothness radius of the uncertainty ball: r = √2·F_max.
    pub fn r(&self) -> f64 {
        2f64.sqrt() * self.f_max
    }

    /// Ball descriptor over x = (γΔM, F) ∈ R³.
    pub fn uncertainty_set(&self) -> SmoothSetDescriptor {
        SmoothSetDescriptor { kind: SmoothSetKind::Ball, center: vec![0.0; 3], radius: self.r() }
    }

    /// Certified Lipschitz constants of the map x ↦ p_u^x(t) over all
    /// t ∈ [0, T]:
    ///   L̄ = (T²/(√2 γ)) · max(γ·M_max + F_max, ū_max + F_max),
    ///   H̄ = T²/(2γ),
    /// with M_max = 1/mass_min; the Jacobian is bilinear in (γΔM, F).
    pub fn constants(&self) -> SmoothnessConstants {
        let t2 = (self.t_horizon as f64) * (self.t_horizon as f64);
        let m_max = 1.0 / self.mass_min;
        let l_bar = t2 / (2f64.sqrt() * self.gamma)
            * (self.gamma * m_max + self.f_max).max(self.u_max + self.f_max);
        let h_bar = t2 / (2.0 * self.gamma);
        SmoothnessConstants::certified(l_bar, h_bar, self.r())
    }

    /// Inverse mass encoded by the rescaled uncertainty sample.
    pub fn inv_mass(&self, x0: f64) -> f64 {
        self.m_bar + x0 / self.gamma
    }
}

/// Closed-form position at time t = s + Δt under stepwise controls:
/// p(t) = (1/2m)·(F t² + Σ_{k<s} ū_k(2(t−k)−1) + ū_s Δt²), from zero
/// initial position and velocity.
pub fn ocp_position(params: &OcpParams, controls: &[[f64; 2]], x: &[f64], t: f64) -> [f64; 2] {
    debug_assert!(x.len() == 3);
    let inv_mass = params.inv_mass(x[0]);
    let f = [x[1], x[2]];
    let s = t.floor() as usize;
    let dt = t - s as f64;
    let mut sum = [0.0f64; 2];
    for (k, u) in controls.iter().enumerate().take(s.min(controls.len())) {
        let delta_k = 2.0 * (t - k as f64) - 1.0;
        sum[0] += u[0] * delta_k;
        sum[1] += u[1] * delta_k;
    }
    if dt > 0.0 && s < controls.len() {
        sum[0] += controls[s][0] * dt * dt;
        sum[1] += controls[s][1] * dt * dt;
    }
    let half_m = 0.5 * inv_mass;
    [half_m * (f[0] * t * t + sum[0]), half_m * (f[1] * t * t + sum[1])]
}

/// Affine-in-controls decomposition of the position at integer time t for a
/// fixed sample x: p(t) = base(x, t) + Σ_k coef(x)·Δ_k(t)·ū_k, with
/// coef = ½(M̄ + x₀/γ) and Δ_k = 2(t−k)−1.
pub fn ocp_position_affine(params: &OcpParams, x: &[f64], t: usize) -> (Vec<f64>, DMatrix<f64>) {
    let coef = 0.5 * params.inv_mass(x[0]);
    let tt = (t * t) as f64;
    let base = vec![coef * x[1] * tt, coef * x[2] * tt];
    let p = 2 * params.t_horizon;
    let mut mat = DMatrix::zeros(2, p);
    for k in 0..t.min(params.t_horizon) {
        let delta_k = 2.0 * (t as f64 - k as f64) - 1.0;
        mat[(0, 2 * k)] = coef * delta_k;
        mat[(1, 2 * k + 1)] = coef * delta_k;
    }
    (base, mat)
}

/// A halfspace constraint active on an integer-time window.
#[derive(Clone, Debug)]
pub struct TimedHalfspace {
    pub normal: Vec<f64>,
    pub point: Vec<f64>,
    pub t_start: usize,
    pub t_end: usize,
}

impl TimedHalfspace {
    pub fn new(normal: Vec<f64>, point: Vec<f64>, t_start: usize, t_end: usize) -> Result<Self> {
        let n: f64 = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("halfspace normal not unit: norm = {n}")));
        }
        Ok(TimedHalfspace { normal, point, t_start, t_end })
    }
}

/// Terminal box |f(x, u, T) − target| ≤ half_width componentwise.
#[derive(Clone, Debug)]
pub struct TerminalBox {
    pub target: Vec<f64>,
    pub half_width: Vec<f64>,
    pub time: usize,
}

type AffineMap = Arc<dyn Fn(&[f64], usize) -> (Vec<f64>, DMatrix<f64>) + Send + Sync>;

/// Robust program with a quadratic objective, halfspace constraints over a
/// time grid, an optional padded terminal box, and box bounds on the
/// decision. The constraint map must be affine in the decision for each
/// fixed sample and time: f(x, u, t) = offset(x, t) + matrix(x, t)·u.
#[derive(Clone)]
pub struct RobustProgram {
    pub decision_dim: usize,
    pub output_dim: usize,
    pub objective_p: DMatrix<f64>,
    pub objective_q: DVector<f64>,
    pub halfspaces: Vec<TimedHalfspace>,
    pub times: Vec<usize>,
    pub terminal: Option<TerminalBox>,
    pub decision_bounds: Option<(DVector<f64>, DVector<f64>)>,
    pub uncertainty_set: SmoothSetDescriptor,
    pub constants: Option<SmoothnessConstants>,
    pub constraint_map: AffineMap,
}

/// The spacecraft instance as a [`RobustProgram`]: minimize Σ‖ū_s‖² (unit
/// intervals make the integral a plain sum) under obstacle halfspaces on
/// t = 1..T, the padded goal box at T, and the control box.
pub fn ocp_robust_program(params: &OcpParams) -> RobustProgram {
    let t = params.t_horizon;
    let p_dim = 2 * t;
    let halfspaces = params
        .obstacles
        .iter()
        .map(|o| {
            TimedHalfspace::new(o.normal.to_vec(), o.point.to_vec(), o.t_start, o.t_end)
                .expect("obstacle normals are normalized on construction")
        })
        .collect();
    let p = params.clone();
    RobustProgram {
        decision_dim: p_dim,
        output_dim: 2,
        objective_p: DMatrix::identity(p_dim, p_dim) * 2.0,
        objective_q: DVector::zeros(p_dim),
        halfspaces,
        times: (1..=t).collect(),
        terminal: Some(TerminalBox {
            target: params.p_goal.to_vec(),
            half_width: params.dp_goal.to_vec(),
            time: t,
        }),
        decision_bounds: Some((
            DVector::from_element(p_dim, -params.u_max),
            DVector::from_element(p_dim, params.u_max),
        )),
        uncertainty_set: params.uncertainty_set(),
        constants: Some(params.constants()),
        constraint_map: Arc::new(move |x, t| ocp_position_affine(&p, x, t)),
    }
}

/// Assembled padded relaxation plus the padding certificate check.
#[derive(Clone, Debug)]
pub struct PaddedRelaxation {
    pub qp: QuadProg,
    pub epsilon: f64,
    /// The error bound ½(L̄/r + H̄)δ² evaluated at the cover's δ; the
    /// feasibility guarantee needs ε ≥ this value.
    pub required_epsilon: Option<f64>,
    /// True when ε ≥ required_epsilon (and constants were available).
    pub padding_sufficient: bool,
}

/// One linear row per (sample, active halfspace, grid time):
/// n̂ᵀ(offset + G·u − c) + ε ≤ 0, plus the ε-tightened terminal box per
/// sample and the decision box.
pub fn build_padded_relaxation(
    prog: &RobustProgram,
    cover: &BoundaryCover,
    epsilon: f64,
) -> Result<PaddedRelaxation> {
    if epsilon < 0.0 {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    let n = prog.decision_dim;
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut lo: Vec<f64> = Vec::new();
    let mut hi: Vec<f64> = Vec::new();

    for x in cover.points.iter() {
        for &t in &prog.times {
            let active: Vec<&TimedHalfspace> = prog
                .halfspaces
                .iter()
                .filter(|h| t >= h.t_start && t <= h.t_end)
                .collect();
            if active.is_empty() {
                continue;
            }
            let (offset, mat) = (prog.constraint_map)(x, t);
            if offset.len() != prog.output_dim || mat.nrows() != prog.output_dim || mat.ncols() != n
            {
                return Err(Error::DimensionMismatch {
                    expected: prog.output_dim,
                    got: offset.len(),
                });
            }
            for h in active {
                let mut row = DVector::zeros(n);
                for j in 0..n {
                    let mut v = 0.0;
                    for d in 0..prog.output_dim {
                        v += h.normal[d] * mat[(d, j)];
                    }
                    row[j] = v;
                }
                let n_dot_off: f64 = h.normal.iter().zip(&offset).map(|(a, b)| a * b).sum();
                let n_dot_c: f64 = h.normal.iter().zip(&h.point).map(|(a, b)| a * b).sum();
                rows.push(row);
                lo.push(f64::NEG_INFINITY);
                hi.push(n_dot_c - n_dot_off - epsilon);
            }
        }
        if let Some(term) = &prog.terminal {
            let (offset, mat) = (prog.constraint_map)(x, term.time);
            for d in 0..prog.output_dim {
                let row = DVector::from_fn(n, |j, _| mat[(d, j)]);
                rows.push(row);
                lo.push(term.target[d] - term.half_width[d] + epsilon - offset[d]);
                hi.push(term.target[d] + term.half_width[d] - epsilon - offset[d]);
            }
        }
    }
    if let Some((l, u)) = &prog.decision_bounds {
        for j in 0..n {
            let mut row = DVector::zeros(n);
            row[j] = 1.0;
            rows.push(row);
            lo.push(l[j]);
            hi.push(u[j]);
        }
    }

    let m = rows.len();
    let mut a = DMatrix::zeros(m, n);
    for (i, r) in rows.iter().enumerate() {
        a.set_row(i, &r.transpose());
    }
    let qp = QuadProg::new(
        prog.objective_p.clone(),
        prog.objective_q.clone(),
        a,
        DVector::from_vec(lo),
        DVector::from_vec(hi),
    )?;

    let required = prog.constants.as_ref().map(|c| bounds::bound_second_order(c, cover.delta));
    let sufficient = required.is_some_and(|req| epsilon >= req);
    Ok(PaddedRelaxation { qp, epsilon, required_epsilon: required, padding_sufficient: sufficient })
}

/// Everything the spacecraft pipeline reports: the controls, the raw QP
/// solution, the error certificate, and the ε bookkeeping (measured lattice
/// covering radius → recomputed ε vs. the reference 0.025).
#[derive(Clone, Debug)]
pub struct OcpSolution {
    pub controls: Vec<[f64; 2]>,
    pub qp: QpSolution,
    pub bound: BoundReport,
    pub cover: BoundaryCover,
    pub epsilon_used: f64,
    pub epsilon_recomputed: f64,
    pub epsilon_reference: f64,
    pub epsilon_discrepancy: f64,
    pub delta_measured: f64,
}

/// Solves the spacecraft instance: builds the M-point Fibonacci cover of the
/// uncertainty sphere, recomputes ε from the measured covering radius
/// (unless overridden), assembles the padded QP, and solves it.
///
/// Padding larger than a goal half-width empties the goal box; that is
/// reported as a primal-infeasibility-suspected solution rather than an
/// error.
pub fn solve_ocp(params: &OcpParams, m: usize, epsilon: Option<f64>) -> Result<OcpSolution> {
    if m < 4 {
        return Err(Error::InvalidArgument("need at least 4 cover points".into()));
    }
    let constants = params.constants();
    let cover = covers::fibonacci_sphere(m, params.r())?;
    let epsilon_recomputed = bounds::bound_second_order(&constants, cover.delta);
    let epsilon_used = epsilon.unwrap_or(epsilon_recomputed);
    let bound = BoundReport {
        epsilon: epsilon_used,
        kind: BoundKind::SecondOrder,
        delta: cover.delta,
        constants: constants.clone(),
        certified: constants.certified && cover.certified,
    };
    let cover_delta = cover.delta;

    if epsilon_used >= params.dp_goal[0].min(params.dp_goal[1]) {
        // Goal box crossed by the padding: trivially infeasible.
        let t = params.t_horizon;
        let empty = QpSolution {
            x: DVector::zeros(2 * t),
            y: DVector::zeros(0),
            status: QpStatus::PrimalInfeasibleSuspected,
            primal_res: f64::INFINITY,
            dual_res: f64::INFINITY,
            iterations: 0,
            objective: f64::INFINITY,
        };
        return Ok(OcpSolution {
            controls: vec![[0.0, 0.0]; t],
            qp: empty,
            bound,
            cover,
            epsilon_used,
            epsilon_recomputed,
            epsilon_reference: REFERENCE_EPSILON,
            epsilon_discrepancy: epsilon_recomputed - REFERENCE_EPSILON,
            delta_measured: cover_delta,
        });
    }

    let prog = ocp_robust_program(params);
    let relax = build_padded_relaxation(&prog, &cover, epsilon_used)?;
    let solution = qp::solve(&relax.qp, &QpSettings::default())?;
    let controls: Vec<[f64; 2]> =
        (0..params.t_horizon).map(|k| [solution.x[2 * k], solution.x[2 * k + 1]]).collect();
    Ok(OcpSolution {
        controls,
        qp: solution,
        bound,
        cover,
        epsilon_used,
        epsilon_recomputed,
        epsilon_reference: REFERENCE_EPSILON,
        epsilon_discrepancy: epsilon_recomputed - REFERENCE_EPSILON,
        delta_measured: cover_delta,
    })
}

/// A-posteriori feasibility check of a control sequence against the true
/// (unpadded) constraints, over uniform draws from the full uncertainty
/// ball plus the boundary cover points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationReport {
    pub draws: usize,
    /// Worst obstacle violation on the integer-time certificate grid.
    pub max_obstacle_violation: f64,
    /// Worst componentwise excess outside the goal box at the horizon.
    pub max_goal_excess: f64,
    /// Worst excess of the controls over the control box.
    pub max_control_excess: f64,
    /// Number of draws violating any certified constraint beyond `tolerance`.
    pub violating_draws: usize,
    pub tolerance: f64,
    /// Advisory: worst obstacle violation sampled at 10x finer time
    /// resolution (inter-sample excursions are outside the certificate).
    pub fine_grid_obstacle_violation: f64,
}

pub fn verify_feasibility(
    controls: &[[f64; 2]],
    params: &OcpParams,
    cover: &BoundaryCover,
    dense_m: usize,
    seed: u64,
) -> ViolationReport {
    let tolerance = 1e-9;
    let r = params.r();
    let mut rng = CounterRng::new(seed, 0);
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(dense_m + cover.len());
    for _ in 0..dense_m {
        let b = rng.in_unit_ball(3);
        draws.push(b.into_iter().map(|v| v * r).collect());
    }
    for p in cover.points.iter() {
        draws.push(p.to_vec());
    }

    let mut max_obstacle: f64 = f64::NEG_INFINITY;
    let mut max_goal: f64 = f64::NEG_INFINITY;
    let mut fine_obstacle: f64 = f64::NEG_INFINITY;
    let mut violating = 0usize;
    let t_end = params.t_horizon;

    for x in &draws {
        let mut worst_here: f64 = f64::NEG_INFINITY;
        for t in 1..=t_end {
            let p = ocp_position(params, controls, x, t as f64);
            for o in params.obstacles.iter().filter(|o| t >= o.t_start && t <= o.t_end) {
                worst_here = worst_here.max(o.violation(p));
            }
        }
        let p_final = ocp_position(params, controls, x, t_end as f64);
        let mut goal_excess: f64 = 0.0;
        for ((pf, goal), width) in p_final.iter().zip(&params.p_goal).zip(&params.dp_goal) {
            goal_excess = goal_excess.max((pf - goal).abs() - width);
        }
        max_obstacle = max_obstacle.max(worst_here);
        max_goal = max_goal.max(goal_excess);
        if worst_here > tolerance || goal_excess > tolerance {
            violating += 1;
        }

        // Advisory fine grid: 10 sub-samples per control interval.
        for k in 1..=(10 * t_end) {
            let t = k as f64 / 10.0;
            let p = ocp_position(params, controls, x, t);
            for o in &params.obstacles {
                if o.active_at(t) {
                    fine_obstacle = fine_obstacle.max(o.violation(p));
                }
            }
        }
    }

    let mut max_control: f64 = 0.0;
    for u in controls {
        max_control = max_control.max(u[0].abs().max(u[1].abs()) - params.u_max);
    }

    ViolationReport {
        draws: draws.len(),
        max_obstacle_violation: max_obstacle,
        max_goal_excess: max_goal,
        max_control_excess: max_control.max(0.0),
        violating_draws: violating,
        tolerance,
        fine_grid_obstacle_violation: fine_obstacle,
    }
}

/// How many samples the first-order (Lipschitz-only) bound would need for
/// the same accuracy: sizes a Fibonacci lattice until the covering-radius
/// oracle certifies δ' = ε/L̄, with the certification mesh refined so its
/// inflation stays below δ'/10.
pub fn naive_sample_count(params: &OcpParams, epsilon: f64) -> Result<usize> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let constants = params.constants();
    let delta_prime = epsilon / constants.l_bar;
    let r = params.r();
    let set = params.uncertainty_set();
    // Certification mesh at a quarter of the target radius: the inflated
    // certificate (oracle + spacing) then absorbs the worst-case oracle
    // underestimate with margin, and the inflation scales with δ' so that
    // halving ε near-quadruples the certified count.
    let n_lat = (4.0 * std::f64::consts::PI * r / delta_prime).ceil().max(6.0);
    let dense_m = (2.0 * n_lat * n_lat).min(4e6) as usize;

    let certified = |m: usize| -> bool {
        let pts = covers::fibonacci_points(m, r);
        covers::covering_radius_certified(&pts, &set, dense_m) <= delta_prime
    };

    let mut hi = 4usize;
    while !certified(hi) {
        hi *= 2;
        if hi > 2_000_000 {
            return Err(Error::InvalidArgument(format!(
                "no lattice below 2e6 points certifies delta' = {delta_prime:.3e}"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if certified(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_benchmark_values() {
        let p = OcpParams::default();
        let c = p.constants();
        assert!((c.h_bar - 200.0).abs() < 1e-12, "H = {}", c.h_bar);
        let expected = 900.0 / (2f64.sqrt() * 2.25) * 0.205;
        assert!((c.l_bar - expected).abs() < 1e-12);
        assert!((p.r() - 2f64.sqrt() * 0.005).abs() < 1e-18);
    }

    #[test]
    fn nominal_trajectory_stays_at_origin() {
        let p = OcpParams::default();
        let controls = vec![[0.0, 0.0]; 30];
        for t in 0..=30 {
            let pos = ocp_position(&p, &controls, &[0.0, 0.0, 0.0], t as f64);
            assert_eq!(pos, [0.0, 0.0]);
        }
    }

    #[test]
    fn closed_form_vs_affine_decomposition() {
        let p = OcpParams::default();
        let mut rng = CounterRng::new(3, 0);
        let controls: Vec<[f64; 2]> =
            (0..30).map(|_| [rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)]).collect();
        let u_flat = DVector::from_fn(60, |i, _| controls[i / 2][i % 2]);
        for t in [1usize, 7, 20, 30] {
            let x = [rng.uniform(-0.005, 0.005), rng.uniform(-0.004, 0.004), 0.001];
            let direct = ocp_position(&p, &controls, &x, t as f64);
            let (base, mat) = ocp_position_affine(&p, &x, t);
            let via = &mat * &u_flat;
            assert!((direct[0] - (base[0] + via[0])).abs() < 1e-14);
            assert!((direct[1] - (base[1] + via[1])).abs() < 1e-14);
        }
    }

    #[test]
    fn padding_tightens_rows() {
        let p = OcpParams::default();
        let prog = ocp_robust_program(&p);
        let cover = covers::fibonacci_sphere(16, p.r()).unwrap();
        let loose = build_padded_relaxation(&prog, &cover, 0.025).unwrap();
        let tight = build_padded_relaxation(&prog, &cover, 0.05).unwrap();
        let m = loose.qp.num_constraints();
        assert_eq!(m, tight.qp.num_constraints());
        for i in 0..m {
            assert!(tight.qp.u[i] <= loose.qp.u[i] + 1e-15);
            assert!(tight.qp.l[i] >= loose.qp.l[i] - 1e-15);
        }
    }

    #[test]
    fn zero_padding_single_sample_is_nominal_program() {
        // f independent of x: the relaxation with eps = 0 and one sample is
        // exactly the deterministic program.
        let p = OcpParams::default();
        let prog = ocp_robust_program(&p);
        let nominal_map = prog.constraint_map.clone();
        let fixed: AffineMap = Arc::new(move |_x, t| nominal_map(&[0.0, 0.0, 0.0], t));
        let prog_fixed = RobustProgram { constraint_map: fixed, ..prog.clone() };
        let single = BoundaryCover {
            points: crate::geometry::VertexCloud::new(3, vec![0.1, 0.2, 0.3]).unwrap(),
            delta: 1.0,
            certified: false,
            seed: None,
        };
        let relax = build_padded_relaxation(&prog_fixed, &single, 0.0).unwrap();
        // Rows: 30 obstacle rows + 2 goal rows + 60 control-box rows.
        assert_eq!(relax.qp.num_constraints(), 30 + 2 + 60);
        let (base, mat) = (prog.constraint_map)(&[0.0, 0.0, 0.0], 5);
        let o = &p.obstacles[0];
        let expect_hi =
            o.normal[0] * (o.point[0] - base[0]) + o.normal[1] * (o.point[1] - base[1]);
        assert!((relax.qp.u[4] - expect_hi).abs() < 1e-15);
        let row_coeff: f64 = (0..60)
            .map(|j| o.normal[0] * mat[(0, j)] + o.normal[1] * mat[(1, j)])
            .map(|v| v.abs())
            .sum();
        let assembled: f64 = (0..60).map(|j| relax.qp.a[(4, j)].abs()).sum();
        assert!((row_coeff - assembled).abs() < 1e-14);
    }

    #[test]
    fn ocp_row_count_benchmark_instance() {
        let p = OcpParams::default();
        let prog = ocp_robust_program(&p);
        let cover = covers::fibonacci_sphere(100, p.r()).unwrap();
        let relax = build_padded_relaxation(&prog, &cover, REFERENCE_EPSILON).unwrap();
        assert_eq!(relax.qp.num_vars(), 60);
        // 100 samples x (30 obstacle rows + 2 goal rows) + 60 control rows.
        assert_eq!(relax.qp.num_constraints(), 100 * 32 + 60);
        assert!(relax.required_epsilon.is_some());
    }

    #[test]
    fn oversized_padding_reports_infeasible() {
        let sol = solve_ocp(&OcpParams::default(), 16, Some(10.0)).unwrap();
        assert_eq!(sol.qp.status, QpStatus::PrimalInfeasibleSuspected);
    }

    #[test]
    fn degenerate_uncertainty_collapses_trajectories() {
        // Trajectory spread is at most L·2r ≈ 116·f_max, so this f_max keeps
        // every sample within the 1e-9 coincidence threshold.
        let params = OcpParams { f_max: 1e-12, ..OcpParams::default() };
        let sol = solve_ocp(&params, 8, None).unwrap();
        assert_eq!(sol.qp.status, QpStatus::Solved);
        let nominal = ocp_position(&params, &sol.controls, &[0.0; 3], 30.0);
        for x in sol.cover.points.iter() {
            let p = ocp_position(&params, &sol.controls, x, 30.0);
            let d = ((p[0] - nominal[0]).powi(2) + (p[1] - nominal[1]).powi(2)).sqrt();
            assert!(d < 1e-9, "sample trajectory strayed by {d}");
        }
    }

    #[test]
    fn zero_controls_miss_goal_by_goal_magnitude() {
        let params = OcpParams::default();
        let cover = covers::fibonacci_sphere(16, params.r()).unwrap();
        let controls = vec![[0.0, 0.0]; 30];
        let report = verify_feasibility(&controls, &params, &cover, 200, 7);
        assert!(
            report.max_goal_excess > 1.0 && report.max_goal_excess < 2.5,
            "goal excess {}",
            report.max_goal_excess
        );
        assert!(report.violating_draws > 0);
    }

    #[test]
    fn naive_count_for_coarse_accuracy_is_small() {
        let params = OcpParams::default();
        let c = params.constants();
        let eps = c.l_bar * 2.0 * params.r(); // delta' = diameter
        let n = naive_sample_count(&params, eps).unwrap();
        assert!(n <= 16, "n = {n}");
    }
}
