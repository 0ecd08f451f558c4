use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{log_potential, SpectralError, SpectralMeasure};

/// Rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BBox {
    pub fn square(half: f64) -> Self {
        Self { x0: -half, x1: half, y0: -half, y1: half }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Complex64>,
    pub closed: bool,
}

/// Level set `{Φ = level}` as polylines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelCurve {
    pub level: f64,
    pub tol: f64,
    pub polylines: Vec<Polyline>,
}

impl LevelCurve {
    pub fn vertices(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.polylines.iter().flat_map(|p| p.points.iter().copied())
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }

    /// `max |Φ(v) - level|` over vertices.
    pub fn max_deviation(&self, mu: &SpectralMeasure) -> f64 {
        self.vertices().map(|z| (log_potential(mu, z) - self.level).abs()).fold(0.0, f64::max)
    }

    /// Winding number of the polylines (closed ones) around `z`.
    pub fn winding_number(&self, z: Complex64) -> i64 {
        let mut total = 0.0;
        for p in self.polylines.iter().filter(|p| p.closed) {
            let n = p.points.len();
            for k in 0..n {
                let a = p.points[k] - z;
                let b = p.points[(k + 1) % n] - z;
                total += (b / a).arg();
            }
        }
        (total / (2.0 * std::f64::consts::PI)).round() as i64
    }

    pub fn to_json(&self) -> Result<String, SpectralError> {
        Ok(serde_json::to_string(self)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Edge {
    /// From grid point (i, j) to (i+1, j).
    H(usize, usize),
    /// From grid point (i, j) to (i, j+1).
    V(usize, usize),
}

/// Marching squares on `Φ - level` over a `grid × grid` lattice; crossing
/// points are bisected along cell edges until `|Φ - level| < tol`.
pub fn level_curve(mu: &SpectralMeasure, level: f64, bbox: BBox, grid: usize, tol: f64) -> Result<LevelCurve, SpectralError> {
    if grid < 2 {
        return Err(SpectralError::Parameter("grid needs at least 2 points per side".into()));
    }
    let nx = grid;
    let ny = grid;
    let dx = (bbox.x1 - bbox.x0) / (nx - 1) as f64;
    let dy = (bbox.y1 - bbox.y0) / (ny - 1) as f64;
    let point = |i: usize, j: usize| Complex64::new(bbox.x0 + i as f64 * dx, bbox.y0 + j as f64 * dy);
    let f = |z: Complex64| log_potential(mu, z) - level;
    let values: Vec<Vec<f64>> = (0..ny).into_par_iter().map(|j| (0..nx).map(|i| f(point(i, j))).collect()).collect();
    let above = |i: usize, j: usize| values[j][i] >= 0.0;

    let mut crossings: HashMap<Edge, Complex64> = HashMap::new();
    let mut crossing = |e: Edge| -> Complex64 {
        *crossings.entry(e).or_insert_with(|| {
            let (i, j) = match e {
                Edge::H(i, j) | Edge::V(i, j) => (i, j),
            };
            let (a, b) = match e {
                Edge::H(..) => (point(i, j), point(i + 1, j)),
                Edge::V(..) => (point(i, j), point(i, j + 1)),
            };
            bisect(&f, a, b, tol)
        })
    };

    // segments as pairs of edges
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let code = (above(i, j) as u8) | (above(i + 1, j) as u8) << 1 | (above(i + 1, j + 1) as u8) << 2 | (above(i, j + 1) as u8) << 3;
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            match code {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let centre = f(point(i, j) + Complex64::new(0.5 * dx, 0.5 * dy)) >= 0.0;
                    // corners 0 and 2 share a sign; the centre decides whether they connect
                    if (code == 5) == centre {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    if segments.is_empty() {
        return Err(SpectralError::EmptyContour);
    }

    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(k);
        by_edge.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    // open chains first (start at edges with one segment), then loops
    let mut starts: Vec<usize> = Vec::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        if by_edge[&a].len() == 1 || by_edge[&b].len() == 1 {
            starts.push(k);
        }
    }
    starts.extend(0..segments.len());
    for s in starts {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segments[s];
        let (first, mut cur) = if by_edge[&b].len() == 1 { (b, a) } else { (a, b) };
        let mut edges = vec![first, cur];
        loop {
            let next = by_edge[&cur].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (p, q) = segments[k];
            cur = if p == cur { q } else { p };
            edges.push(cur);
        }
        let closed = edges.len() > 2 && edges.first() == edges.last();
        if closed {
            edges.pop();
        }
        polylines.push(Polyline { points: edges.into_iter().map(&mut crossing).collect(), closed });
    }
    Ok(LevelCurve { level, tol, polylines })
}

/// Root of `f` on the segment `[a, b]` where `f` changes sign.
fn bisect(f: &impl Fn(Complex64) -> f64, a: Complex64, b: Complex64, tol: f64) -> Complex64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let flo_pos = f(a) >= 0.0;
    let at = |s: f64| a + (b - a) * s;
    let mut mid = 0.5;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(at(mid));
        if v.abs() < tol {
            break;
        }
        if (v >= 0.0) == flo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    at(mid)
}
