//! Subcommand implementations: argument structs, file emission, and SVG
//! rendering for the 2D pipelines.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};

use hullcert::bounds::{self, BoundKind, BoundReport, SmoothnessConstants};
use hullcert::covers::{self, BoundaryCover, SmoothSetDescriptor, SmoothSetKind};
use hullcert::experiments::{self, SensitivityConfig};
use hullcert::geometry::{self, Polytope, VertexCloud};
use hullcert::io;
use hullcert::maps;
use hullcert::plot::Plot;
use hullcert::reach;
use hullcert::robust::{self, OcpParams};

use crate::config::Config;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<hullcert::Error> for CliError {
    fn from(e: hullcert::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

type CmdResult = Result<(), CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
pub struct OutputArgs {
    /// Output directory; files are written there and stdout stays silent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Which outputs to emit (default: all).
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
}

impl OutputArgs {
    fn wants(&self, f: Format) -> bool {
        self.format.is_empty() || self.format.contains(&f)
    }

    fn ensure_dir(&self) -> Result<Option<&Path>, CliError> {
        match &self.out {
            None => Ok(None),
            Some(dir) => {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
                Ok(Some(dir.as_path()))
            }
        }
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> CmdResult {
    std::fs::write(dir.join(name), content)
        .map_err(|e| CliError::Numerical(format!("cannot write {name}: {e}")))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MapChoice {
    Identity,
    Scaling,
    Polar,
}

#[derive(Args)]
pub struct EstimateHullArgs {
    /// Built-in map to push the boundary through.
    #[arg(long, value_enum, default_value = "scaling")]
    pub map: MapChoice,
    /// Scaling factor L for the scaling map.
    #[arg(long, default_value_t = 3.0)]
    pub l: f64,
    /// Radius of the circular input set.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Deterministic cover with target covering radius δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Deterministic cover with exactly N equally spaced points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random uniform boundary sample of size M (covering radius estimated).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn pick_map(choice: MapChoice, l: f64) -> Result<maps::SmoothMapDescriptor, CliError> {
    match choice {
        MapChoice::Identity => Ok(maps::map_scaling(1.0)),
        MapChoice::Scaling => {
            if l <= 0.0 {
                return Err(CliError::Config("--l must be positive".into()));
            }
            Ok(maps::map_scaling(l))
        }
        MapChoice::Polar => Ok(maps::map_polar()),
    }
}

/// Builds the cover for a circular input set centered at `center`.
fn circle_cover_from_args(
    center: [f64; 2],
    radius: f64,
    delta: Option<f64>,
    n: Option<usize>,
    m: Option<usize>,
    seed: u64,
) -> Result<BoundaryCover, CliError> {
    let set = SmoothSetDescriptor::ball(center.to_vec(), radius)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut cover = match (delta, n, m) {
        (Some(d), None, None) => covers::circle_cover(radius, d)?,
        (None, Some(n), None) => covers::circle_points(radius, n),
        (None, None, Some(m)) => {
            let points = covers::sample_boundary_uniform(&set, m, seed)?;
            let centered = BoundaryCover { points, delta: 1.0, certified: false, seed: Some(seed) };
            let est = covers::covering_radius(&centered, &set, 200_000);
            return Ok(BoundaryCover { delta: est, ..centered });
        }
        _ => {
            return Err(CliError::Config(
                "specify exactly one of --delta, --n, --m".into(),
            ))
        }
    };
    // Deterministic constructions are centered at the origin; translate.
    if center != [0.0, 0.0] {
        let mut data = Vec::with_capacity(2 * cover.points.len());
        for p in cover.points.iter() {
            data.push(p[0] + center[0]);
            data.push(p[1] + center[1]);
        }
        cover.points = VertexCloud::new(2, data).map_err(|e| CliError::Numerical(e.to_string()))?;
    }
    Ok(cover)
}

pub fn estimate_hull(args: EstimateHullArgs) -> CmdResult {
    let map = pick_map(args.map, args.l)?;
    // The polar demo map lives on the annulus; a small disk inside it keeps
    // the declared constants valid.
    let center = match args.map {
        MapChoice::Polar => [1.5, 0.0],
        _ => [0.0, 0.0],
    };
    let radius = match args.map {
        MapChoice::Polar => args.radius.min(0.4),
        _ => args.radius,
    };
    let cover = circle_cover_from_args(center, radius, args.delta, args.n, args.m, args.seed)?;
    let image = map.apply_cloud(&cover.points)?;
    let hull = geometry::convex_hull_2d(&image);
    let mut constants = map
        .constants
        .clone()
        .ok_or_else(|| CliError::Config("map carries no certified constants".into()))?;
    constants.r = radius;
    let report = BoundReport {
        epsilon: bounds::bound_second_order(&constants, cover.delta),
        kind: BoundKind::SecondOrder,
        delta: cover.delta,
        constants,
        certified: cover.certified,
    };

    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    match args.output.ensure_dir()? {
        None => println!("{report_json}"),
        Some(dir) => {
            if args.output.wants(Format::Csv) {
                write_file(dir, "hull.csv", &io::polytope_to_csv(&hull))?;
                write_file(dir, "cover.csv", &io::cover_to_csv(&cover))?;
            }
            if args.output.wants(Format::Json) {
                write_file(dir, "bound.json", &report_json)?;
                write_file(
                    dir,
                    "hull.json",
                    &serde_json::to_string_pretty(&io::polytope_to_json(&hull)).unwrap(),
                )?;
            }
            if args.output.wants(Format::Svg) {
                write_file(dir, "hull.svg", &hull_svg(&hull, &image, &report))?;
            }
        }
    }
    Ok(())
}

fn hull_svg(hull: &Polytope, image: &VertexCloud, report: &BoundReport) -> String {
    let pts: Vec<(f64, f64)> = image.iter().map(|p| (p[0], p[1])).collect();
    let (xr, yr) = Plot::fit_ranges(&pts);
    let mut plot = Plot::new("estimated hull of the image set", "y1", "y2", xr, yr, false);
    let mut poly: Vec<(f64, f64)> = hull.vertices().iter().map(|p| (p[0], p[1])).collect();
    if let Some(&first) = poly.first() {
        poly.push(first);
    }
    plot.polygon(&poly, "rgba(31,119,180,0.15)", "#1f77b4");
    plot.scatter(&pts, "#d62728", 2.0);
    plot.legend_entry(&format!("hull ({} vertices)", hull.len()), "#1f77b4");
    plot.legend_entry(&format!("images (eps = {:.3e})", report.epsilon), "#d62728");
    plot.render()
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SetChoice {
    Circle,
    Sphere,
}

#[derive(Args)]
pub struct SampleCoverArgs {
    #[arg(long, value_enum, default_value = "circle")]
    pub set: SetChoice,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Target covering radius for a deterministic cover.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Exact point count (equally spaced circle / Fibonacci sphere lattice).
    #[arg(long)]
    pub n: Option<usize>,
    /// Random uniform boundary sample of size M.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn sample_cover(args: SampleCoverArgs) -> CmdResult {
    if args.radius <= 0.0 {
        return Err(CliError::Config("--radius must be positive".into()));
    }
    let cover = match args.set {
        SetChoice::Circle => {
            circle_cover_from_args([0.0, 0.0], args.radius, args.delta, args.n, args.m, args.seed)?
        }
        SetChoice::Sphere => {
            let set = SmoothSetDescriptor {
                kind: SmoothSetKind::SphereBoundaryOnly,
                center: vec![0.0; 3],
                radius: args.radius,
            };
            match (args.delta, args.n, args.m) {
                (None, Some(n), None) => covers::fibonacci_sphere(n, args.radius)?,
                (Some(d), None, None) => {
                    // Smallest power-of-two-stepped lattice certified at δ.
                    let mut m = 4;
                    loop {
                        let c = covers::fibonacci_sphere(m, args.radius)?;
                        if c.delta <= d {
                            break c;
                        }
                        m *= 2;
                        if m > 1_000_000 {
                            return Err(CliError::Numerical(format!(
                                "no lattice below 1e6 points reaches delta = {d}"
                            )));
                        }
                    }
                }
                (None, None, Some(m)) => {
                    let points = covers::sample_boundary_uniform(&set, m, args.seed)?;
                    let c = BoundaryCover {
                        points,
                        delta: 1.0,
                        certified: false,
                        seed: Some(args.seed),
                    };
                    let est = covers::covering_radius(&c, &set, 100_000);
                    BoundaryCover { delta: est, ..c }
                }
                _ => {
                    return Err(CliError::Config(
                        "specify exactly one of --delta, --n, --m".into(),
                    ))
                }
            }
        }
    };
    let csv = io::cover_to_csv(&cover);
    match args.output.ensure_dir()? {
        None => println!("{csv}"),
        Some(dir) => write_file(dir, "cover.csv", &csv)?,
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundChoice {
    First,
    Second,
    Diffeo,
    Dumbgen,
}

#[derive(Args)]
pub struct BoundArgs {
    #[arg(long, value_enum, default_value = "second")]
    pub kind: BoundChoice,
    #[arg(long, default_value_t = 1.0)]
    pub l_bar: f64,
    #[arg(long, default_value_t = 0.0)]
    pub h_bar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub l_under: Option<f64>,
    /// Curvature radius R for the classical convex bound.
    #[arg(long)]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn bound(args: BoundArgs) -> CmdResult {
    if args.delta <= 0.0 {
        return Err(CliError::Config("--delta must be positive".into()));
    }
    let constants = SmoothnessConstants {
        l_bar: args.l_bar,
        h_bar: args.h_bar,
        l_under: args.l_under,
        r: args.r,
        s: None,
        certified: true,
    };
    constants.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let (kind, epsilon) = match args.kind {
        BoundChoice::First => (BoundKind::FirstOrder, bounds::bound_first_order(&constants, args.delta)),
        BoundChoice::Second => {
            (BoundKind::SecondOrder, bounds::bound_second_order(&constants, args.delta))
        }
        BoundChoice::Diffeo => (BoundKind::Diffeo, bounds::bound_diffeo(&constants, args.delta)?),
        BoundChoice::Dumbgen => {
            let big_r = args
                .big_r
                .ok_or_else(|| CliError::Config("--big-r is required for dumbgen".into()))?;
            (BoundKind::Dumbgen, bounds::bound_dumbgen(big_r, args.delta))
        }
    };
    let report =
        BoundReport { epsilon, kind, delta: args.delta, constants, certified: true };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match args.output.ensure_dir()? {
        None => println!("{text}"),
        Some(dir) => write_file(dir, "bound.json", &text)?,
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SystemChoice {
    Zero,
    Linear2d,
    DoubleIntegrator,
}

#[derive(Args)]
pub struct ReachArgs {
    #[arg(long, value_enum, default_value = "linear2d")]
    pub system: SystemChoice,
    /// Horizon time.
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Cover size (equally spaced circle points / Fibonacci lattice).
    #[arg(long, default_value_t = 100)]
    pub n_cover: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn reach(args: ReachArgs) -> CmdResult {
    if args.steps == 0 || args.n_cover < 2 {
        return Err(CliError::Config("--steps and --n-cover must be positive".into()));
    }
    let params = OcpParams::default();
    let (sys, cover, output_dims): (reach::OdeSystem, BoundaryCover, Option<Vec<usize>>) =
        match args.system {
            SystemChoice::Zero => {
                (reach::zero_system(2), covers::circle_points(1.0, args.n_cover), None)
            }
            SystemChoice::Linear2d => {
                (reach::linear2d_system(), covers::circle_points(1.0, args.n_cover), None)
            }
            SystemChoice::DoubleIntegrator => {
                let controls = vec![[0.05, 0.0]; params.t_horizon];
                let sys = reach::double_integrator(&params, controls);
                let cover = covers::fibonacci_sphere(args.n_cover, params.r())?;
                (sys, cover, Some(vec![0, 1]))
            }
        };
    let (hull, report) =
        reach::reach_hull_estimate(&sys, &cover, args.t, args.steps, output_dims.as_deref())?;
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    match args.output.ensure_dir()? {
        None => println!("{report_json}"),
        Some(dir) => {
            if args.output.wants(Format::Csv) {
                write_file(dir, "reach_hull.csv", &io::polytope_to_csv(&hull))?;
            }
            if args.output.wants(Format::Json) {
                write_file(dir, "reach_bound.json", &report_json)?;
            }
            if args.output.wants(Format::Svg) && hull.dim() == 2 {
                let pts: Vec<(f64, f64)> =
                    hull.vertices().iter().map(|p| (p[0], p[1])).collect();
                let (xr, yr) = Plot::fit_ranges(&pts);
                let mut plot =
                    Plot::new("reachable-set hull", "x1", "x2", xr, yr, false);
                let mut ring = pts.clone();
                if let Some(&f) = ring.first() {
                    ring.push(f);
                }
                plot.polygon(&ring, "rgba(44,160,44,0.15)", "#2ca02c");
                plot.scatter(&pts, "#2ca02c", 2.0);
                plot.legend_entry(&format!("eps = {:.3e}", report.epsilon), "#2ca02c");
                write_file(dir, "reach.svg", &plot.render())?;
            }
        }
    }
    Ok(())
}

#[derive(Args)]
pub struct SolveOcpArgs {
    /// Cover size on the uncertainty sphere.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Padding override (default: recomputed from the measured δ).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Force the reference padding 0.025 for comparison runs.
    #[arg(long, default_value_t = false)]
    pub reference_epsilon: bool,
    /// Dense verification draws.
    #[arg(long, default_value_t = 1000)]
    pub dense: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn solve_ocp(args: SolveOcpArgs) -> CmdResult {
    if args.epsilon.is_some() && args.reference_epsilon {
        return Err(CliError::Config(
            "--epsilon and --reference-epsilon are mutually exclusive".into(),
        ));
    }
    let params = OcpParams::default();
    let epsilon = if args.reference_epsilon {
        Some(robust::REFERENCE_EPSILON)
    } else {
        args.epsilon
    };
    let out = experiments::run_ocp_experiment(&params, args.m, epsilon, args.dense, args.seed)?;
    emit_ocp(&params, &out, &args.output)
}

fn emit_ocp(
    params: &OcpParams,
    out: &experiments::OcpExperimentOutput,
    output: &OutputArgs,
) -> CmdResult {
    let report_json = serde_json::to_string_pretty(&out.report).expect("report serializes");
    let dir = match output.ensure_dir()? {
        None => {
            println!("{report_json}");
            return Ok(());
        }
        Some(d) => d,
    };
    if output.wants(Format::Json) {
        write_file(dir, "ocp_report.json", &report_json)?;
        write_file(
            dir,
            "violations.json",
            &serde_json::to_string_pretty(&out.report.verification).unwrap(),
        )?;
    }
    if output.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = out
            .solution
            .controls
            .iter()
            .enumerate()
            .map(|(t, u)| vec![t.to_string(), io::fmt_f64(u[0]), io::fmt_f64(u[1])])
            .collect();
        write_file(dir, "controls.csv", &io::write_csv(&["t", "u1", "u2"], &rows))?;

        let mut traj_rows: Vec<Vec<String>> = Vec::new();
        for (i, x) in out.solution.cover.points.iter().enumerate() {
            for t in 0..=params.t_horizon {
                let p = robust::ocp_position(params, &out.solution.controls, x, t as f64);
                traj_rows.push(vec![
                    i.to_string(),
                    t.to_string(),
                    io::fmt_f64(p[0]),
                    io::fmt_f64(p[1]),
                ]);
            }
        }
        write_file(
            dir,
            "trajectories.csv",
            &io::write_csv(&["sample", "t", "x", "y"], &traj_rows),
        )?;
    }
    if output.wants(Format::Svg) {
        write_file(dir, "ocp.svg", &ocp_svg(params, out))?;
    }
    Ok(())
}

fn ocp_svg(params: &OcpParams, out: &experiments::OcpExperimentOutput) -> String {
    let mut plot = Plot::new(
        "padded trajectory plan under mass and disturbance uncertainty",
        "x",
        "y",
        (-0.3, 2.6),
        (-0.35, 0.75),
        false,
    );
    // Obstacle halfspace boundaries.
    for o in &params.obstacles {
        let d = [-o.normal[1], o.normal[0]];
        let a = (o.point[0] - 4.0 * d[0], o.point[1] - 4.0 * d[1]);
        let b = (o.point[0] + 4.0 * d[0], o.point[1] + 4.0 * d[1]);
        plot.segment(clamp_pt(a), clamp_pt(b), "#d62728", 1.5);
    }
    // Goal box.
    let (gx, gy) = (params.p_goal[0], params.p_goal[1]);
    let (wx, wy) = (params.dp_goal[0], params.dp_goal[1]);
    plot.polygon(
        &[
            (gx - wx, gy - wy),
            (gx + wx, gy - wy),
            (gx + wx, gy + wy),
            (gx - wx, gy + wy),
            (gx - wx, gy - wy),
        ],
        "rgba(148,103,189,0.15)",
        "#9467bd",
    );
    // Sample trajectories (thin) and the nominal one (thick).
    for (i, x) in out.solution.cover.points.iter().enumerate() {
        if i % 5 != 0 {
            continue;
        }
        let pts: Vec<(f64, f64)> = (0..=10 * params.t_horizon)
            .map(|k| {
                let p =
                    robust::ocp_position(params, &out.solution.controls, x, k as f64 / 10.0);
                (p[0], p[1])
            })
            .collect();
        plot.polyline(&pts, "#aec7e8", 0.6);
    }
    let nominal: Vec<(f64, f64)> = (0..=10 * params.t_horizon)
        .map(|k| {
            let p = robust::ocp_position(
                params,
                &out.solution.controls,
                &[0.0, 0.0, 0.0],
                k as f64 / 10.0,
            );
            (p[0], p[1])
        })
        .collect();
    plot.polyline(&nominal, "#1f77b4", 2.0);
    // Terminal hull of the sample ensemble.
    let mut ring: Vec<(f64, f64)> =
        out.terminal_hull.vertices().iter().map(|p| (p[0], p[1])).collect();
    if let Some(&f) = ring.first() {
        ring.push(f);
    }
    plot.polygon(&ring, "rgba(44,160,44,0.3)", "#2ca02c");
    plot.legend_entry("nominal trajectory", "#1f77b4");
    plot.legend_entry("sampled trajectories", "#aec7e8");
    plot.legend_entry("terminal hull", "#2ca02c");
    plot.legend_entry("obstacles", "#d62728");
    plot.legend_entry("goal box", "#9467bd");
    plot.render()
}

fn clamp_pt(p: (f64, f64)) -> (f64, f64) {
    (p.0.clamp(-0.3, 2.6), p.1.clamp(-0.35, 0.75))
}

#[derive(Subcommand)]
pub enum ExperimentCmd {
    /// Success-probability curves vs. empirical rates on the ellipse
    /// benchmark (config keys: l, epsilon, trials, m_list, proxy_points).
    Sensitivity(ExperimentArgs),
    /// The full spacecraft pipeline with verification and the naive count
    /// (config keys: m, epsilon, reference, dense_draws).
    Ocp(ExperimentArgs),
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn experiment(which: ExperimentCmd) -> CmdResult {
    match which {
        ExperimentCmd::Sensitivity(args) => experiment_sensitivity(args),
        ExperimentCmd::Ocp(args) => experiment_ocp(args),
    }
}

fn experiment_sensitivity(args: ExperimentArgs) -> CmdResult {
    let cfg_file = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::empty(),
    };
    let mut cfg = SensitivityConfig { seed: args.seed, ..Default::default() };
    if let Some(l) = cfg_file.get_f64("l")? {
        if l <= 0.0 {
            return Err(CliError::Config("l must be positive".into()));
        }
        cfg.l = l;
    }
    if let Some(e) = cfg_file.get_f64("epsilon")? {
        cfg.epsilon = e;
    }
    if let Some(t) = cfg_file.get_usize("trials")? {
        cfg.trials = t.max(1);
    }
    if let Some(ms) = cfg_file.get_u64_list("m_list")? {
        cfg.m_list = ms;
    }
    if let Some(p) = cfg_file.get_usize("proxy_points")? {
        cfg.proxy_points = p.max(1000);
    }
    if let Some(s) = cfg_file.get_u64("seed")? {
        cfg.seed = s;
    }

    let rows = experiments::run_sensitivity(&cfg)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                io::fmt_f64(r.bound_first),
                io::fmt_f64(r.bound_second),
                io::fmt_f64(r.empirical),
                io::fmt_f64(r.proxy_err),
            ]
        })
        .collect();
    let csv = io::write_csv(&["M", "bound1", "bound2", "empirical", "proxy_err"], &csv_rows);

    match args.output.ensure_dir()? {
        None => println!("{csv}"),
        Some(dir) => {
            let tag = format!("{}", cfg.l).replace('.', "_");
            if args.output.wants(Format::Csv) {
                write_file(dir, &format!("sensitivity_L{tag}.csv"), &csv)?;
            }
            if args.output.wants(Format::Svg) {
                let m_lo = *cfg.m_list.first().unwrap() as f64;
                let m_hi = *cfg.m_list.last().unwrap() as f64;
                let mut plot = Plot::new(
                    &format!("success probability vs sample size (L = {})", cfg.l),
                    "M (log scale)",
                    "P[d_H <= eps]",
                    (m_lo, m_hi),
                    (-0.02, 1.05),
                    true,
                );
                let line = |f: fn(&experiments::SensitivityRow) -> f64| -> Vec<(f64, f64)> {
                    rows.iter().map(|r| (r.m as f64, f(r))).collect()
                };
                plot.polyline(&line(|r| r.bound_first), "#ff7f0e", 1.5);
                plot.polyline(&line(|r| r.bound_second), "#1f77b4", 1.5);
                plot.polyline(&line(|r| r.empirical), "#2ca02c", 1.5);
                plot.scatter(&line(|r| r.empirical), "#2ca02c", 3.0);
                plot.legend_entry("first-order bound", "#ff7f0e");
                plot.legend_entry("second-order bound", "#1f77b4");
                plot.legend_entry("empirical success", "#2ca02c");
                write_file(dir, &format!("sensitivity_L{tag}.svg"), &plot.render())?;
            }
        }
    }
    Ok(())
}

fn experiment_ocp(args: ExperimentArgs) -> CmdResult {
    let cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::empty(),
    };
    let m = cfg.get_usize("m")?.unwrap_or(100);
    let dense = cfg.get_usize("dense_draws")?.unwrap_or(1000);
    let reference = cfg.get_f64("reference")?.map(|v| v != 0.0).unwrap_or(false);
    let epsilon = if reference {
        Some(robust::REFERENCE_EPSILON)
    } else {
        cfg.get_f64("epsilon")?
    };
    let seed = cfg.get_u64("seed")?.unwrap_or(args.seed);
    let params = OcpParams::default();
    let out = experiments::run_ocp_experiment(&params, m, epsilon, dense, seed)?;
    emit_ocp(&params, &out, &args.output)
}
