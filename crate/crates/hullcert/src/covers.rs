//! Boundary covers of smooth input sets: deterministic δ-covers, Fibonacci
//! sphere lattices, covering-radius oracles, covering numbers, and the
//! sampling-density constant Λ for uniform boundary distributions.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::VertexCloud;
use crate::rng::CounterRng;

/// Golden ratio, the Fibonacci-lattice longitude divisor.
pub const PHI_GOLDEN: f64 = 1.618_033_988_749_895;

#[derive(Clone, Debug)]
pub enum SmoothSetKind {
    /// Solid ball; boundary is the sphere.
    Ball,
    /// The sphere itself (boundary-only set).
    SphereBoundaryOnly,
    /// Invertible affine image of a ball: x = A·(r·u) + b + center.
    AffineImageOfBall { matrix: DMatrix<f64>, offset: DVector<f64> },
}

/// An r-smooth input set X: a ball of radius `radius` rolls freely inside and
/// outside, so `radius` doubles as the smoothness constant r of X.
#[derive(Clone, Debug)]
pub struct SmoothSetDescriptor {
    pub kind: SmoothSetKind,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl SmoothSetDescriptor {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidArgument("radius must be positive".into()));
        }
        Ok(SmoothSetDescriptor { kind: SmoothSetKind::Ball, center, radius })
    }

    pub fn unit_circle() -> Self {
        SmoothSetDescriptor { kind: SmoothSetKind::Ball, center: vec![0.0, 0.0], radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Maps a unit direction to the corresponding boundary point.
    pub fn boundary_from_unit(&self, unit: &[f64]) -> Vec<f64> {
        match &self.kind {
            SmoothSetKind::Ball | SmoothSetKind::SphereBoundaryOnly => self
                .center
                .iter()
                .zip(unit)
                .map(|(c, u)| c + self.radius * u)
                .collect(),
            SmoothSetKind::AffineImageOfBall { matrix, offset } => {
                let v = matrix * DVector::from_column_slice(unit) * self.radius;
                self.center
                    .iter()
                    .zip(v.iter().zip(offset.iter()))
                    .map(|(c, (x, o))| c + x + o)
                    .collect()
            }
        }
    }
}

/// A finite sample on ∂X together with a covering radius. `certified = true`
/// means `delta` is a proven upper bound on the covering radius; otherwise it
/// is the dense-mesh estimate inflated by the mesh spacing.
#[derive(Clone, Debug)]
pub struct BoundaryCover {
    pub points: VertexCloud,
    pub delta: f64,
    pub certified: bool,
    pub seed: Option<u64>,
}

impl BoundaryCover {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Deterministic δ-cover of a circle of radius `r`: N = ⌈π / asin(δ/(4r))⌉
/// equally spaced points (asin argument clamped to 1, N ≥ 2). Conservative by
/// construction; the certificate is the full-gap chord 2r·sin(π/N) ≤ δ.
pub fn circle_cover(r: f64, delta: f64) -> Result<BoundaryCover> {
    if r <= 0.0 || delta <= 0.0 {
        return Err(Error::InvalidArgument("circle_cover needs r > 0 and delta > 0".into()));
    }
    let arg = (delta / (4.0 * r)).min(1.0);
    let n = ((PI / arg.asin()).ceil() as usize).max(2);
    let cover = circle_points(r, n);
    Ok(BoundaryCover { delta, ..cover })
}

/// Exactly `n` equally spaced points on the circle of radius `r`, with the
/// certified full-gap-chord covering radius δ = 2r·sin(π/n).
pub fn circle_points(r: f64, n: usize) -> BoundaryCover {
    assert!(n >= 1 && r > 0.0);
    circle_points_phase(r, n, 0.0)
}

/// Equally spaced circle points with a phase offset (same certificate; the
/// covering radius is rotation invariant).
pub fn circle_points_phase(r: f64, n: usize, phase: f64) -> BoundaryCover {
    let mut data = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = phase + 2.0 * PI * i as f64 / n as f64;
        data.push(r * t.cos());
        data.push(r * t.sin());
    }
    BoundaryCover {
        points: VertexCloud::new(2, data).expect("n >= 1"),
        delta: 2.0 * r * (PI / n as f64).sin(),
        certified: true,
        seed: None,
    }
}

/// Raw Fibonacci lattice: latitudes z_i = r(1 − (2i+1)/M), longitudes
/// φ_i = 2πi/φ with φ the golden ratio.
pub fn fibonacci_points(m: usize, r: f64) -> VertexCloud {
    assert!(m >= 2 && r > 0.0);
    let mut data = Vec::with_capacity(3 * m);
    for i in 0..m {
        let z = r * (1.0 - (2.0 * i as f64 + 1.0) / m as f64);
        let rho = (r * r - z * z).max(0.0).sqrt();
        let phi = 2.0 * PI * i as f64 / PHI_GOLDEN;
        data.push(rho * phi.cos());
        data.push(rho * phi.sin());
        data.push(z);
    }
    VertexCloud::new(3, data).expect("m >= 2")
}

/// Fibonacci sphere lattice with its covering radius measured by the dense
/// oracle and inflated by the mesh spacing. There is no closed-form
/// certificate for the lattice, so the cover is flagged `certified = false`;
/// the inflated value is still a conservative input for the error bounds.
pub fn fibonacci_sphere(m: usize, r: f64) -> Result<BoundaryCover> {
    if m < 2 || r <= 0.0 {
        return Err(Error::InvalidArgument("fibonacci_sphere needs M >= 2 and r > 0".into()));
    }
    let points = fibonacci_points(m, r);
    let set = SmoothSetDescriptor {
        kind: SmoothSetKind::SphereBoundaryOnly,
        center: vec![0.0; 3],
        radius: r,
    };
    let dense_m = 200_000;
    let (radius, spacing) = covering_radius_with_spacing(&points, &set, dense_m);
    Ok(BoundaryCover { points, delta: radius + spacing, certified: false, seed: None })
}

struct CellGrid {
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
    h: f64,
    dim: usize,
}

impl CellGrid {
    fn build(points: &VertexCloud, h: f64) -> CellGrid {
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, h)).or_default().push(i as u32);
        }
        CellGrid { cells, h, dim: points.dim() }
    }

    #[inline]
    fn key(p: &[f64], h: f64) -> (i64, i64, i64) {
        (
            (p[0] / h).floor() as i64,
            (p[1] / h).floor() as i64,
            if p.len() > 2 { (p[2] / h).floor() as i64 } else { 0 },
        )
    }

    /// Exact nearest-neighbor distance via expanding Chebyshev rings.
    fn nearest(&self, p: &[f64], points: &VertexCloud) -> f64 {
        let (cx, cy, cz) = Self::key(p, self.h);
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            if best.is_finite() && (ring - 1) as f64 * self.h > best {
                return best;
            }
            let (z_lo, z_hi) = if self.dim > 2 { (cz - ring, cz + ring) } else { (0, 0) };
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for z in z_lo..=z_hi {
                        let on_shell = dx.abs() == ring
                            || dy.abs() == ring
                            || (self.dim > 2 && (z - cz).abs() == ring);
                        if !on_shell {
                            continue;
                        }
                        if let Some(idx) = self.cells.get(&(cx + dx, cy + dy, z)) {
                            for &i in idx {
                                let d = crate::geometry::dist(p, points.point(i as usize));
                                if d < best {
                                    best = d;
                                }
                            }
                        }
                    }
                }
            }
            ring += 1;
            if ring > 1_000_000 {
                return best; // unreachable for non-empty grids
            }
        }
    }
}

fn mesh_points_2d(
    set: &SmoothSetDescriptor,
    dense_m: usize,
) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..dense_m).map(move |k| {
        let t = 2.0 * PI * (k as f64 + 0.5) / dense_m as f64;
        set.boundary_from_unit(&[t.cos(), t.sin()])
    })
}

fn sphere_mesh_dims(dense_m: usize) -> (usize, usize) {
    let n_lat = ((dense_m as f64 / 2.0).sqrt().round() as usize).max(1);
    let n_lon = dense_m.div_ceil(n_lat).max(1);
    (n_lat, n_lon)
}

fn mesh_points_3d(
    set: &SmoothSetDescriptor,
    n_lat: usize,
    n_lon: usize,
) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..n_lat).flat_map(move |i| {
        let theta = PI * (i as f64 + 0.5) / n_lat as f64;
        let (st, ct) = (theta.sin(), theta.cos());
        (0..n_lon).map(move |j| {
            let phi = 2.0 * PI * (j as f64 + 0.5) / n_lon as f64;
            set.boundary_from_unit(&[st * phi.cos(), st * phi.sin(), ct])
        })
    })
}

/// Max over a deterministic `dense_m`-point boundary mesh of the distance to
/// the nearest cover point: a lower bound on the true covering radius,
/// converging as the mesh is refined.
pub fn covering_radius(cover: &BoundaryCover, set: &SmoothSetDescriptor, dense_m: usize) -> f64 {
    covering_radius_with_spacing(&cover.points, set, dense_m).0
}

/// Dense-mesh oracle plus the mesh-spacing inflation that turns the lower
/// bound into a conservative upper bound (oracle + spacing).
pub fn covering_radius_certified(
    points: &VertexCloud,
    set: &SmoothSetDescriptor,
    dense_m: usize,
) -> f64 {
    let (radius, spacing) = covering_radius_with_spacing(points, set, dense_m);
    radius + spacing
}

pub(crate) fn covering_radius_with_spacing(
    points: &VertexCloud,
    set: &SmoothSetDescriptor,
    dense_m: usize,
) -> (f64, f64) {
    let r = set.radius;
    let m = points.len() as f64;
    let h = (4.0 * r / m.sqrt()).max(1e-300);
    let grid = CellGrid::build(points, h);
    let mut worst: f64 = 0.0;
    match set.dim() {
        2 => {
            for q in mesh_points_2d(set, dense_m) {
                worst = worst.max(grid.nearest(&q, points));
            }
            // Adjacent mesh points are 2r·sin(π/M) apart; every boundary
            // point is within the half-gap chord of the mesh.
            let spacing = 2.0 * r * (PI / dense_m as f64).sin();
            (worst, spacing)
        }
        3 => {
            let (n_lat, n_lon) = sphere_mesh_dims(dense_m);
            for q in mesh_points_3d(set, n_lat, n_lon) {
                worst = worst.max(grid.nearest(&q, points));
            }
            // Meridian hop ≤ r·π/(2 n_lat), parallel hop ≤ r·π/n_lon (arcs
            // dominate chords).
            let spacing = r * (PI / n_lat as f64 + 2.0 * PI / n_lon as f64) / 2.0;
            (worst, spacing)
        }
        d => panic!("covering_radius: unsupported dimension {d}"),
    }
}

/// Sampling-density constant for the uniform distribution on ∂X:
/// Λ = inf over x ∈ ∂X of P(B(x, δ/2)). Exact cap measures for circles and
/// spheres; the infimum is attained everywhere by symmetry.
pub fn lambda_uniform(set: &SmoothSetDescriptor, delta: f64) -> Result<f64> {
    match set.kind {
        SmoothSetKind::Ball | SmoothSetKind::SphereBoundaryOnly => {}
        SmoothSetKind::AffineImageOfBall { .. } => {
            return Err(Error::UnsupportedSet("lambda_uniform requires a ball or sphere".into()));
        }
    }
    if delta <= 0.0 {
        return Err(Error::InvalidLambda(format!("delta must be positive, got {delta}")));
    }
    let r = set.radius;
    let arg = (delta / (4.0 * r)).min(1.0);
    match set.dim() {
        2 => Ok(2.0 * arg.asin() / PI),
        3 => Ok((1.0 - (2.0 * arg.asin()).cos()) / 2.0),
        d => Err(Error::UnsupportedSet(format!("lambda_uniform: dimension {d}"))),
    }
}

/// Constructive upper bound on the internal covering number of a circle at
/// radius `delta_half`: equally spaced points with the full-gap-chord
/// certificate, N = ⌈π / asin(δ½/(2r))⌉ (argument clamped; a single point
/// suffices once δ½ reaches the diameter).
pub fn covering_number_circle(r: f64, delta_half: f64) -> u64 {
    assert!(r > 0.0 && delta_half > 0.0);
    if delta_half >= 2.0 * r {
        return 1;
    }
    let arg = (delta_half / (2.0 * r)).min(1.0);
    (PI / arg.asin()).ceil() as u64
}

/// Constructive covering-number upper bound for the boundary of `set`.
/// Spheres use a latitude/longitude grid; each of the two moves (to the
/// nearest row, then along it) contributes at most half the target radius.
pub fn covering_number(set: &SmoothSetDescriptor, delta_half: f64) -> Result<u64> {
    let r = set.radius;
    match set.dim() {
        2 => Ok(covering_number_circle(r, delta_half)),
        3 => {
            if delta_half >= 2.0 * r {
                return Ok(1);
            }
            let n_lat = (PI * r / delta_half).ceil() as u64;
            let mut total = 0u64;
            for i in 0..n_lat {
                let theta = PI * (i as f64 + 0.5) / n_lat as f64;
                let row_len = 2.0 * PI * r * theta.sin();
                total += ((row_len / delta_half).ceil() as u64).max(1);
            }
            Ok(total)
        }
        d => Err(Error::UnsupportedSet(format!("covering_number: dimension {d}"))),
    }
}

/// `m` iid uniform points on ∂X: angle parametrization for circles,
/// normalized Gaussians for spheres of any dimension. Deterministic per seed.
pub fn sample_boundary_uniform(
    set: &SmoothSetDescriptor,
    m: usize,
    seed: u64,
) -> Result<VertexCloud> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    match set.kind {
        SmoothSetKind::Ball | SmoothSetKind::SphereBoundaryOnly => {}
        SmoothSetKind::AffineImageOfBall { .. } => {
            return Err(Error::UnsupportedSet(
                "uniform boundary sampling requires a ball or sphere".into(),
            ));
        }
    }
    let d = set.dim();
    let mut rng = CounterRng::new(seed, 0);
    let mut data = Vec::with_capacity(m * d);
    for _ in 0..m {
        let unit = if d == 2 {
            let t = rng.uniform(0.0, 2.0 * PI);
            vec![t.cos(), t.sin()]
        } else {
            rng.on_unit_sphere(d)
        };
        data.extend_from_slice(&set.boundary_from_unit(&unit));
    }
    let cloud = VertexCloud::new(d, data)?;
    Ok(cloud)
}
