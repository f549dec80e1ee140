//! CSV and JSON serialization of the geometric artifacts, and the
//! sparse-triplet round trip for quadratic programs.
//!
//! Floats are written with the shortest round-trip representation, so
//! repeated runs produce byte-identical files.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde_json::json;

use crate::covers::BoundaryCover;
use crate::error::{Error, Result};
use crate::geometry::{Polytope, VertexCloud};
use crate::qp::QuadProg;

/// Rectangular CSV with a header row.
pub fn write_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len(), "CSV must stay rectangular");
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// One vertex per row, columns x1..xd.
pub fn polytope_to_csv(poly: &Polytope) -> String {
    cloud_to_csv(poly.vertices())
}

pub fn cloud_to_csv(cloud: &VertexCloud) -> String {
    let header: Vec<String> = (1..=cloud.dim()).map(|k| format!("x{k}")).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<String>> =
        cloud.iter().map(|p| p.iter().map(|v| fmt_f64(*v)).collect()).collect();
    write_csv(&header_refs, &rows)
}

/// Minimal JSON form {dim, vertices}.
pub fn polytope_to_json(poly: &Polytope) -> serde_json::Value {
    let vertices: Vec<Vec<f64>> = poly.vertices().iter().map(|p| p.to_vec()).collect();
    json!({ "dim": poly.dim(), "vertices": vertices })
}

pub fn polytope_from_json(v: &serde_json::Value) -> Result<Polytope> {
    let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("missing dim".into()))? as usize;
    let rows: Vec<Vec<f64>> = v["vertices"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing vertices".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("vertex is not an array".into()))
                .map(|vals| vals.iter().filter_map(|x| x.as_f64()).collect())
        })
        .collect::<Result<_>>()?;
    let cloud = VertexCloud::from_rows(&rows)?;
    if cloud.dim() != dim {
        return Err(Error::Parse(format!("dim {} disagrees with vertices", dim)));
    }
    Ok(Polytope::from_vertices(cloud))
}

/// Cover points plus the metadata columns (delta, certified, m, seed)
/// repeated per row, keeping the file rectangular.
pub fn cover_to_csv(cover: &BoundaryCover) -> String {
    let d = cover.points.dim();
    let mut header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    header.extend(["delta", "certified", "m", "seed"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let seed = cover.seed.map_or(String::new(), |s| s.to_string());
    let rows: Vec<Vec<String>> = cover
        .points
        .iter()
        .map(|p| {
            let mut row: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(cover.delta));
            row.push(cover.certified.to_string());
            row.push(cover.points.len().to_string());
            row.push(seed.clone());
            row
        })
        .collect();
    write_csv(&header_refs, &rows)
}

/// Sparse-triplet CSV for a quadratic program: a `dims` row, then one row
/// per nonzero of P and A and per entry of q, l, u.
pub fn quadprog_to_triplets(prog: &QuadProg) -> String {
    let mut out = String::from("matrix,row,col,value\n");
    let n = prog.num_vars();
    let m = prog.num_constraints();
    let _ = writeln!(out, "dims,{m},{n},0");
    let mut emit = |name: &str, i: usize, j: usize, v: f64| {
        if v != 0.0 {
            let _ = writeln!(out, "{name},{i},{j},{}", fmt_f64(v));
        }
    };
    for i in 0..n {
        for j in 0..n {
            emit("p", i, j, prog.p[(i, j)]);
        }
    }
    for i in 0..m {
        for j in 0..n {
            emit("a", i, j, prog.a[(i, j)]);
        }
    }
    for (name, vec) in [("q", &prog.q), ("l", &prog.l), ("u", &prog.u)] {
        for (i, v) in vec.iter().enumerate() {
            // Bounds keep explicit infinities; q keeps zeros implicit.
            if name == "q" && *v == 0.0 {
                continue;
            }
            let _ = writeln!(out, "{name},{i},0,{}", fmt_f64(*v));
        }
    }
    out
}

pub fn quadprog_from_triplets(text: &str) -> Result<QuadProg> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty triplet file".into()))?;
    if header.trim() != "matrix,row,col,value" {
        return Err(Error::Parse(format!("unexpected header: {header}")));
    }
    let mut dims: Option<(usize, usize)> = None;
    let mut entries: Vec<(String, usize, usize, f64)> = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", k + 2)));
        }
        let row: usize =
            parts[1].parse().map_err(|_| Error::Parse(format!("bad row on line {}", k + 2)))?;
        let col: usize =
            parts[2].parse().map_err(|_| Error::Parse(format!("bad col on line {}", k + 2)))?;
        let val: f64 =
            parts[3].parse().map_err(|_| Error::Parse(format!("bad value on line {}", k + 2)))?;
        if parts[0] == "dims" {
            dims = Some((row, col));
        } else {
            entries.push((parts[0].to_string(), row, col, val));
        }
    }
    let (m, n) = dims.ok_or_else(|| Error::Parse("missing dims row".into()))?;
    let mut p = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(m, n);
    let mut q = DVector::zeros(n);
    let mut l = DVector::from_element(m, f64::NEG_INFINITY);
    let mut u = DVector::from_element(m, f64::INFINITY);
    for (name, i, j, v) in entries {
        match name.as_str() {
            "p" => p[(i, j)] = v,
            "a" => a[(i, j)] = v,
            "q" => q[i] = v,
            "l" => l[i] = v,
            "u" => u[i] = v,
            other => return Err(Error::Parse(format!("unknown matrix tag {other}"))),
        }
    }
    QuadProg::new(p, q, a, l, u)
}
