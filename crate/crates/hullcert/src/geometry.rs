//! Convex hulls, min-norm-point projection, support functions, and Hausdorff
//! distances between nested convex hulls, in arbitrary dimension.
//!
//! Hulls are vertex-only: every downstream consumer needs membership,
//! projection, and support queries, none of which require a facet lattice.
//! Exact hull construction is implemented for d = 2 (monotone chain); in
//! d ≥ 3 a [`Polytope`] stores the deduplicated generator cloud and extreme
//! points are identified lazily through min-norm projections.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative optimality tolerance of the Wolfe min-norm-point iteration.
pub const TAU_WOLFE: f64 = 1e-10;

/// A non-empty finite set of points in R^d, stored flat (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCloud {
    dim: usize,
    data: Vec<f64>,
}

impl VertexCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be >= 1".into()));
        }
        if data.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: data.len() % dim });
        }
        Ok(VertexCloud { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).ok_or(Error::EmptyCloud)?;
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        VertexCloud::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.data.extend_from_slice(p);
    }

    /// Corner-to-corner diameter of the axis-aligned bounding box.
    pub fn bbox_diameter(&self) -> f64 {
        let d = self.dim;
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for p in self.iter() {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (0..d).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Scale-aware hull tolerance: 1e-9 · (1 + bounding-box diameter).
    pub fn hull_tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.bbox_diameter())
    }
}

/// A convex polytope in vertex representation. For d = 2 the vertices are
/// the extreme points in counter-clockwise order.
#[derive(Clone, Debug)]
pub struct Polytope {
    vertices: VertexCloud,
}

impl Polytope {
    /// Builds a polytope from a cloud: exact extreme points for d = 2,
    /// deduplicated cloud for d ≥ 3.
    pub fn from_cloud(cloud: &VertexCloud) -> Polytope {
        if cloud.dim() == 2 {
            return convex_hull_2d(cloud);
        }
        let tol = cloud.hull_tolerance();
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for p in cloud.iter() {
            let dup = kept.iter().any(|q| dist(p, q) <= tol);
            if !dup {
                kept.push(p.to_vec());
            }
        }
        Polytope { vertices: VertexCloud::from_rows(&kept).expect("non-empty by construction") }
    }

    pub fn from_vertices(vertices: VertexCloud) -> Polytope {
        Polytope { vertices }
    }

    pub fn vertices(&self) -> &VertexCloud {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Drops every vertex that lies in the hull of the others (d ≥ 3 lazy
    /// reduction; a no-op for hulls built by `convex_hull_2d`).
    pub fn reduce_extremes(&self) -> Result<Polytope> {
        let tol = self.vertices.hull_tolerance();
        let n = self.len();
        if n <= 2 {
            return Ok(self.clone());
        }
        let mut keep = vec![true; n];
        for i in 0..n {
            let rows: Vec<Vec<f64>> = (0..n)
                .filter(|&j| j != i && keep[j])
                .map(|j| self.vertices.point(j).to_vec())
                .collect();
            if rows.is_empty() {
                break;
            }
            let others = Polytope { vertices: VertexCloud::from_rows(&rows)? };
            if dist_point_to_hull(self.vertices.point(i), &others)? <= tol {
                keep[i] = false;
            }
        }
        let rows: Vec<Vec<f64>> =
            (0..n).filter(|&i| keep[i]).map(|i| self.vertices.point(i).to_vec()).collect();
        Ok(Polytope { vertices: VertexCloud::from_rows(&rows)? })
    }
}

/// A unit vector in R^d (‖u‖ = 1 within 1e-12).
#[derive(Clone, Debug)]
pub struct Direction {
    u: Vec<f64>,
}

impl Direction {
    /// Normalizes `v`; errors on (near-)zero input.
    pub fn new(v: &[f64]) -> Result<Direction> {
        let n = norm(v);
        if n < 1e-300 {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        Ok(Direction { u: v.iter().map(|x| x / n).collect() })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two points.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull of a planar cloud by Andrew's monotone chain.
///
/// Points are deduplicated within the scale-aware hull tolerance first;
/// collinear boundary points are dropped. Vertices come back in
/// counter-clockwise order. Degenerate inputs (all identical, all collinear)
/// yield the 1- or 2-point polytope.
pub fn convex_hull_2d(cloud: &VertexCloud) -> Polytope {
    assert_eq!(cloud.dim(), 2, "convex_hull_2d requires dim = 2");
    let tol = cloud.hull_tolerance();
    // Collinearity is judged near machine precision; a coarser threshold
    // would decimate dense boundary meshes and spoil Hausdorff accuracy.
    let diam = cloud.bbox_diameter();
    let area_tol = 1e-16 * (1.0 + diam) * (1.0 + diam);

    let mut pts: Vec<[f64; 2]> = cloud.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).expect("finite coordinates"));
    pts.dedup_by(|a, b| {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        (dx * dx + dy * dy).sqrt() <= tol
    });

    if pts.len() == 1 {
        return Polytope { vertices: VertexCloud::new(2, pts[0].to_vec()).unwrap() };
    }

    let chain = |points: &mut dyn Iterator<Item = &[f64; 2]>| -> Vec<[f64; 2]> {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for p in points {
            while out.len() >= 2
                && cross2(&out[out.len() - 2], &out[out.len() - 1], p) <= area_tol
            {
                out.pop();
            }
            out.push(*p);
        }
        out
    };

    let lower = chain(&mut pts.iter());
    let upper = chain(&mut pts.iter().rev());

    let mut verts: Vec<f64> = Vec::with_capacity(2 * (lower.len() + upper.len()));
    for p in lower.iter().take(lower.len() - 1).chain(upper.iter().take(upper.len() - 1)) {
        verts.extend_from_slice(p);
    }
    if verts.is_empty() {
        // Fully collinear input collapsed by the chains: keep the endpoints.
        verts.extend_from_slice(&pts[0]);
        verts.extend_from_slice(&pts[pts.len() - 1]);
    }
    Polytope { vertices: VertexCloud::new(2, verts).unwrap() }
}

/// Result of a min-norm-point computation.
#[derive(Clone, Debug)]
pub struct MinNormPoint {
    pub point: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
}

/// Minimizer of the affine problem min ‖Σ μ_i s_i‖ s.t. Σ μ_i = 1.
fn affine_minimizer(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = points.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            kkt[(i, j)] = dot(&points[i], &points[j]);
        }
        kkt[(i, k)] = 1.0;
        kkt[(k, i)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let lu = kkt.full_piv_lu();
    let sol = lu.solve(&rhs)?;
    let mu: Vec<f64> = sol.as_slice()[..k].to_vec();
    if mu.iter().any(|m| !m.is_finite()) {
        return None;
    }
    Some(mu)
}

/// Wolfe's minimum-norm-point algorithm: w = argmin { ‖w‖ : w ∈ conv(cloud) }.
///
/// The returned point satisfies the Wolfe certificate
/// ⟨w, q − w⟩ ≥ −τ·(1 + ‖q‖²) for every generator q, with τ = [`TAU_WOLFE`].
/// The linear-minimization step breaks ties by lowest index, so results are
/// deterministic. Iteration budget: 10·(#generators) + 1000.
pub fn min_norm_point(cloud: &VertexCloud) -> Result<MinNormPoint> {
    let n = cloud.len();
    let d = cloud.dim();
    let max_iter = 10 * n + 1000;

    // Start from the generator of smallest norm (lowest index on ties).
    let mut best_idx = 0;
    let mut best_norm = norm(cloud.point(0));
    for i in 1..n {
        let ni = norm(cloud.point(i));
        if ni < best_norm {
            best_norm = ni;
            best_idx = i;
        }
    }

    let mut corral: Vec<usize> = vec![best_idx];
    let mut weights: Vec<f64> = vec![1.0];
    let mut w: Vec<f64> = cloud.point(best_idx).to_vec();
    let mut iterations = 0usize;

    let certificate_residual = |w: &[f64]| -> f64 {
        let w2 = dot(w, w);
        let mut worst = f64::INFINITY;
        for q in cloud.iter() {
            let slack = dot(w, q) - w2 + TAU_WOLFE * (1.0 + dot(q, q));
            if slack < worst {
                worst = slack;
            }
        }
        worst
    };

    while iterations < max_iter {
        iterations += 1;

        // Linear minimization over the generators, lowest index wins ties.
        let mut lin_idx = 0;
        let mut lin_val = dot(&w, cloud.point(0));
        for i in 1..n {
            let v = dot(&w, cloud.point(i));
            if v < lin_val {
                lin_val = v;
                lin_idx = i;
            }
        }

        if certificate_residual(&w) >= 0.0 {
            return Ok(MinNormPoint { norm: norm(&w), point: w, iterations });
        }

        if !corral.contains(&lin_idx) {
            corral.push(lin_idx);
            weights.push(0.0);
        }

        // Minor cycle: project onto the affine hull of the corral, walking
        // back toward the previous convex combination when weights go
        // negative and dropping the vanished generators.
        loop {
            iterations += 1;
            let pts: Vec<Vec<f64>> = corral.iter().map(|&i| cloud.point(i).to_vec()).collect();
            let mu = match affine_minimizer(&pts) {
                Some(mu) => mu,
                None => {
                    // Affinely dependent corral: drop the lightest member.
                    if corral.len() <= 1 {
                        break;
                    }
                    let (drop, _) = weights
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                        .unwrap();
                    corral.remove(drop);
                    weights.remove(drop);
                    continue;
                }
            };
            if mu.iter().all(|&m| m >= -1e-12) {
                weights = mu.iter().map(|&m| m.max(0.0)).collect();
                let total: f64 = weights.iter().sum();
                for m in weights.iter_mut() {
                    *m /= total;
                }
                break;
            }
            // Step from `weights` toward `mu` until the first weight hits 0.
            let mut theta = 1.0f64;
            for (i, (&lam, &m)) in weights.iter().zip(&mu).enumerate() {
                let _ = i;
                if m < 1e-12 && lam > m {
                    theta = theta.min(lam / (lam - m));
                }
            }
            for (lam, &m) in weights.iter_mut().zip(&mu) {
                *lam = (1.0 - theta) * *lam + theta * m;
            }
            let mut i = 0;
            while i < corral.len() {
                if weights[i] <= 1e-12 {
                    corral.remove(i);
                    weights.remove(i);
                } else {
                    i += 1;
                }
            }
            if corral.is_empty() {
                // Cannot happen with θ < 1, but never loop on an empty corral.
                corral.push(lin_idx);
                weights.push(1.0);
                break;
            }
            if iterations >= max_iter {
                break;
            }
        }

        w = vec![0.0; d];
        for (&i, &lam) in corral.iter().zip(&weights) {
            for (wk, pk) in w.iter_mut().zip(cloud.point(i)) {
                *wk += lam * pk;
            }
        }
    }

    let residual = -certificate_residual(&w);
    if residual <= 0.0 {
        return Ok(MinNormPoint { norm: norm(&w), point: w, iterations });
    }
    Err(Error::WolfeNonConvergence {
        iterations,
        residual,
        best_norm: norm(&w),
        best_point: w,
    })
}

/// Euclidean distance from `p` to conv(poly), via the min-norm point of the
/// translated vertex cloud. Returns 0 (within [`TAU_WOLFE`]) iff `p` lies
/// inside the hull.
pub fn dist_point_to_hull(p: &[f64], poly: &Polytope) -> Result<f64> {
    if p.len() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), got: p.len() });
    }
    let translated: Vec<f64> = poly
        .vertices()
        .iter()
        .flat_map(|v| v.iter().zip(p).map(|(vk, pk)| vk - pk))
        .collect();
    let cloud = VertexCloud::new(p.len(), translated)?;
    Ok(min_norm_point(&cloud)?.norm)
}

#[inline]
fn dist_point_segment_2d(p: [f64; 2], a: &[f64], b: &[f64]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 <= 0.0 {
        return (ap[0] * ap[0] + ap[1] * ap[1]).sqrt();
    }
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    let dx = p[0] - (a[0] + t * ab[0]);
    let dy = p[1] - (a[1] + t * ab[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Distance from a planar point to a convex CCW polygon boundary/interior
/// (0 inside). O(V).
pub fn dist_to_convex_polygon_2d(p: [f64; 2], poly: &Polytope) -> f64 {
    let v = poly.vertices();
    let k = v.len();
    if k == 1 {
        return dist(&p, v.point(0));
    }
    if k == 2 {
        return dist_point_segment_2d(p, v.point(0), v.point(1));
    }
    let mut inside = true;
    let mut best = f64::INFINITY;
    for i in 0..k {
        let a = v.point(i);
        let b = v.point((i + 1) % k);
        if cross2(a, b, &p) < 0.0 {
            inside = false;
        }
        best = best.min(dist_point_segment_2d(p, a, b));
    }
    if inside {
        0.0
    } else {
        best
    }
}

/// Point-in-convex-polygon test by fan binary search, O(log V).
/// `poly` must be CCW with ≥ 3 vertices.
fn locate_wedge(p: [f64; 2], poly: &Polytope) -> (usize, usize) {
    let v = poly.vertices();
    let k = v.len();
    let o = v.point(0);
    let (mut lo, mut hi) = (1usize, k - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if cross2(o, v.point(mid), &p) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn signed_outside_2d(p: [f64; 2], poly: &Polytope, tol: f64) -> f64 {
    let v = poly.vertices();
    let k = v.len();
    if k <= 2 {
        let d = if k == 1 {
            dist(&p, v.point(0))
        } else {
            dist_point_segment_2d(p, v.point(0), v.point(1))
        };
        return d;
    }
    let o = v.point(0);
    // Outside the fan entirely?
    if cross2(o, v.point(1), &p) < -tol || cross2(o, v.point(k - 1), &p) > tol {
        return dist_to_convex_polygon_2d(p, poly);
    }
    let (lo, hi) = locate_wedge(p, poly);
    if cross2(v.point(lo), v.point(hi), &p) >= -tol * (1.0 + dist(v.point(lo), v.point(hi))) {
        0.0
    } else {
        dist_to_convex_polygon_2d(p, poly)
    }
}

/// One-sided Hausdorff distance from a nested pair of convex hulls:
/// max over the outer cloud of the distance to the inner hull, which equals
/// d_H(conv(outer), conv(inner)) whenever conv(inner) ⊆ conv(outer).
///
/// Nesting is checked: an inner vertex more than the hull tolerance outside
/// conv(outer) is an error carrying the vertex index and its outward excess.
pub fn hausdorff_nested(outer: &VertexCloud, inner: &Polytope) -> Result<f64> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: inner.dim(), got: outer.dim() });
    }
    if outer.dim() == 2 {
        let outer_hull = convex_hull_2d(outer);
        hausdorff_nested_hulls(&outer_hull, inner)
    } else {
        let outer_poly = Polytope::from_cloud(outer);
        let tol = outer.hull_tolerance().max(inner.vertices().hull_tolerance());
        for (idx, v) in inner.vertices().iter().enumerate() {
            let excess = dist_point_to_hull(v, &outer_poly)?;
            if excess > tol {
                return Err(Error::NestingViolated { vertex: idx, excess });
            }
        }
        let mut worst: f64 = 0.0;
        for p in outer.iter() {
            worst = worst.max(dist_point_to_hull(p, inner)?);
        }
        Ok(worst)
    }
}

/// Same as [`hausdorff_nested`] with the outer hull already built. The outer
/// polytope must hold the extreme points of the reference cloud (in CCW order
/// for d = 2); the distance maximum over a convex hull is attained at an
/// extreme point, so scanning the vertices is exact.
pub fn hausdorff_nested_hulls(outer: &Polytope, inner: &Polytope) -> Result<f64> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: inner.dim(), got: outer.dim() });
    }
    let tol = outer.vertices().hull_tolerance().max(inner.vertices().hull_tolerance());
    if outer.dim() != 2 {
        for (idx, v) in inner.vertices().iter().enumerate() {
            let excess = dist_point_to_hull(v, outer)?;
            if excess > tol {
                return Err(Error::NestingViolated { vertex: idx, excess });
            }
        }
        let mut worst: f64 = 0.0;
        for p in outer.vertices().iter() {
            worst = worst.max(dist_point_to_hull(p, inner)?);
        }
        return Ok(worst);
    }

    for (idx, v) in inner.vertices().iter().enumerate() {
        let excess = signed_outside_2d([v[0], v[1]], outer, tol);
        if excess > tol {
            return Err(Error::NestingViolated { vertex: idx, excess });
        }
    }

    let iv = inner.vertices();
    let k = iv.len();
    let ov = outer.vertices();
    if k <= 2 {
        let mut worst: f64 = 0.0;
        for p in ov.iter() {
            let d = if k == 1 {
                dist(p, iv.point(0))
            } else {
                dist_point_segment_2d([p[0], p[1]], iv.point(0), iv.point(1))
            };
            worst = worst.max(d);
        }
        return Ok(worst);
    }

    // Both hulls are CCW; as the query walks the outer ring the nearest inner
    // edge advances monotonically, so a shared pointer gives O(N + V). A lap
    // counter guards against degenerate stalls by falling back to full scans.
    let seg = |j: usize, p: [f64; 2]| -> f64 {
        dist_point_segment_2d(p, iv.point(j % k), iv.point((j + 1) % k))
    };
    let first = [ov.point(0)[0], ov.point(0)[1]];
    let mut j = (0..k)
        .min_by(|&a, &b| seg(a, first).partial_cmp(&seg(b, first)).unwrap())
        .unwrap();
    let mut worst: f64 = 0.0;
    for p in ov.iter() {
        let q = [p[0], p[1]];
        let mut d = seg(j, q);
        let mut steps = 0;
        while steps < k {
            let dn = seg(j + 1, q);
            if dn < d {
                d = dn;
                j = (j + 1) % k;
                steps += 1;
            } else {
                break;
            }
        }
        if steps >= k {
            d = dist_to_convex_polygon_2d(q, inner);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Support function of the cloud: h(u) = max over points of ⟨point, u⟩.
pub fn support(cloud: &VertexCloud, u: &Direction) -> f64 {
    assert_eq!(cloud.dim(), u.dim(), "support: dimension mismatch");
    cloud
        .iter()
        .map(|p| dot(p, u.as_slice()))
        .fold(f64::NEG_INFINITY, f64::max)
}
