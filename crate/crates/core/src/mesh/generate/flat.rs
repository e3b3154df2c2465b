use std::f64::consts::{LN_2, PI, TAU};

use super::Hole;
use crate::error::Result;
use crate::mesh::rings::{fan, ring_angles, stitch, Ring};
use crate::mesh::{metric, planar, Builder, Chart, ChartKind, GeometryTag, LoopRole, SurfaceMesh};

/// Builder plus the polar position `(r, θ)` of every vertex, for exact chord lengths.
struct PolarBuilder {
    b: Builder,
    polar: Vec<(f64, f64)>,
}

impl PolarBuilder {
    fn new() -> Self {
        PolarBuilder {
            b: Builder::new(),
            polar: Vec::new(),
        }
    }

    fn vertex(&mut self, r: f64, t: f64) -> usize {
        self.polar.push((r, t));
        self.b.vertex(Some([r * t.cos(), r * t.sin()]))
    }

    fn ring(&mut self, r: f64, n: usize, offset: f64) -> Ring {
        let angles = ring_angles(n, offset);
        let ids = angles.iter().map(|&t| self.vertex(r, t)).collect();
        Ring { ids, angles }
    }

    fn add(&mut self, tris: &[[usize; 3]]) {
        let polar = &self.polar;
        self.b.triangles_by_id(tris, |i, j| polar_chord(polar[i], polar[j]));
    }
}

/// Euclidean distance between two points given in polar coordinates.
pub(crate) fn polar_chord(p: (f64, f64), q: (f64, f64)) -> f64 {
    let s = (0.5 * (p.1 - q.1)).sin();
    ((p.0 - q.0).powi(2) + 4.0 * p.0 * q.0 * s * s).sqrt()
}

/// Number of log-radial steps for a self-similar annulus with `n` angular vertices.
/// When the radius ratio is a power of two the grid is nested across ratios.
fn log_steps(ratio: f64, n: usize) -> usize {
    let per_doubling = ((LN_2 * n as f64 / TAU).round() as usize).max(1);
    let k = ratio.log2();
    if (k - k.round()).abs() < 1e-12 && k.round() >= 1.0 {
        k.round() as usize * per_doubling
    } else {
        let m = (ratio.ln() / (TAU / n as f64)).round() as usize;
        (m.max(2) + 1) / 2 * 2
    }
}

/// Log-polar annulus: every ring has `res` vertices, consecutive rings are offset by
/// half a step and radii are in geometric progression, so the mesh is self-similar.
pub(super) fn annulus(r_in: f64, r_out: f64, res: usize) -> Result<SurfaceMesh> {
    let m = log_steps(r_out / r_in, res);
    let l = (r_out / r_in).ln();
    let mut pb = PolarBuilder::new();
    let mut rings = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let r = if i == m {
            r_out
        } else {
            r_in * (l * i as f64 / m as f64).exp()
        };
        let off = if i % 2 == 1 { PI / res as f64 } else { 0.0 };
        rings.push(pb.ring(r, res, off));
    }
    for w in rings.windows(2) {
        let tris = stitch(&w[0], &w[1], false);
        pb.add(&tris);
    }
    pb.b.boundary("L0", rings[0].ids.clone(), LoopRole::TrueBoundary);
    pb.b.boundary("L1", rings[m].ids.clone(), LoopRole::Truncation);
    let chart = Chart::new(ChartKind::Euclidean)
        .with_round("L0", [0.0, 0.0], r_in)
        .with_round("L1", [0.0, 0.0], r_out);
    pb.b.finish(GeometryTag::Flat, chart)
}

/// Hexagonal-ring disk: `res/4` rings, ring `k` carrying `6k` vertices.
pub(super) fn disk(r: f64, res: usize) -> Result<SurfaceMesh> {
    let k_max = res / 4;
    let mut pb = PolarBuilder::new();
    let center = pb.vertex(0.0, 0.0);
    let mut prev = pb.ring(r / k_max as f64, 6, 0.0);
    pb.add(&fan(center, &prev));
    for k in 2..=k_max {
        let rad = if k == k_max { r } else { r * k as f64 / k_max as f64 };
        let ring = pb.ring(rad, 6 * k, 0.0);
        let tris = stitch(&prev, &ring, false);
        pb.add(&tris);
        prev = ring;
    }
    pb.b.boundary("L0", prev.ids.clone(), LoopRole::TrueBoundary);
    let chart = Chart::new(ChartKind::Euclidean).with_round("L0", [0.0, 0.0], r);
    pb.b.finish(GeometryTag::Flat, chart)
}

pub(crate) fn circle(c: [f64; 2], r: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect()
}

pub(super) fn pair_of_pants(radius: f64, holes: &[Hole], res: usize) -> Result<SurfaceMesh> {
    let outer = circle([0.0, 0.0], radius, res);
    let mut h = TAU * radius / res as f64;
    let mut hole_polys = Vec::new();
    for hole in holes {
        let n = ((res as f64 * hole.radius / radius).round() as usize).max(8);
        h = h.min(TAU * hole.radius / n as f64);
        hole_polys.push(circle(hole.center, hole.radius, n));
    }
    let pm = planar::triangulate(&outer, &hole_polys, 0.5 * h * h)?;
    let mut b = Builder::new();
    for p in &pm.points {
        b.vertex(Some(*p));
    }
    b.triangles(&pm.triangles, metric::euclid);
    b.boundary("L0", (0..res).collect(), LoopRole::TrueBoundary);
    let mut start = res;
    let mut chart = Chart::new(ChartKind::Euclidean).with_round("L0", [0.0, 0.0], radius);
    for (i, poly) in hole_polys.iter().enumerate() {
        let label = format!("L{}", i + 1);
        b.boundary(&label, (start..start + poly.len()).collect(), LoopRole::TrueBoundary);
        chart = chart.with_round(&label, holes[i].center, holes[i].radius);
        start += poly.len();
    }
    b.finish(GeometryTag::Flat, chart)
}

/// Structured grid on `[0, w] × [0, h]` split along the rising diagonals.
pub(super) fn rectangle(w: f64, h: f64, res: usize) -> Result<SurfaceMesh> {
    let nx = res;
    let ny = ((res as f64 * h / w).round() as usize).max(1);
    let mut b = Builder::new();
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    for j in 0..=ny {
        for i in 0..=nx {
            b.vertex(Some([w * i as f64 / nx as f64, h * j as f64 / ny as f64]));
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, bb, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, bb, c]);
            tris.push([a, c, d]);
        }
    }
    b.triangles(&tris, metric::euclid);
    let mut cycle = Vec::new();
    cycle.extend((0..nx).map(|i| id(i, 0)));
    cycle.extend((0..ny).map(|j| id(nx, j)));
    cycle.extend((1..=nx).rev().map(|i| id(i, ny)));
    cycle.extend((1..=ny).rev().map(|j| id(0, j)));
    b.boundary("L0", cycle, LoopRole::TrueBoundary);
    b.finish(GeometryTag::Flat, Chart::new(ChartKind::Euclidean))
}

/// Levels of `log r` used by the collar annulus: geometric grading toward the inner
/// circle, hitting every breakpoint exactly.
pub fn collar_levels(r_out: f64) -> Vec<f64> {
    const RATIO: f64 = 1.05;
    let breaks = [1e-5, 1e-4, 1e-2, 0.25, LN_2, r_out.ln()];
    let mut out = vec![0.0, breaks[0]];
    for w in breaks.windows(2) {
        let steps = ((w[1] / w[0]).ln() / RATIO.ln()).ceil().max(1.0) as usize;
        let q = (w[1] / w[0]).powf(1.0 / steps as f64);
        for k in 1..=steps {
            out.push(if k == steps { w[1] } else { w[0] * q.powi(k as i32) });
        }
    }
    out
}

/// Annulus `1 ≤ r ≤ r_out` whose rings sit at `log r` values from [`collar_levels`];
/// all rings share the angles `2πk/res`, so each ray `θ = const` is a vertex path.
pub(super) fn collar_annulus(r_out: f64, res: usize) -> Result<SurfaceMesh> {
    let levels = collar_levels(r_out);
    let mut pb = PolarBuilder::new();
    let rings: Vec<Ring> = levels
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let r = if i + 1 == levels.len() { r_out } else { f.exp() };
            pb.ring(r, res, 0.0)
        })
        .collect();
    for w in rings.windows(2) {
        let tris = stitch(&w[0], &w[1], false);
        pb.add(&tris);
    }
    pb.b.boundary("L0", rings[0].ids.clone(), LoopRole::TrueBoundary);
    pb.b.boundary("L1", rings.last().unwrap().ids.clone(), LoopRole::TrueBoundary);
    let chart = Chart::new(ChartKind::Euclidean)
        .with_round("L0", [0.0, 0.0], 1.0)
        .with_round("L1", [0.0, 0.0], r_out);
    pb.b.finish(GeometryTag::Flat, chart)
}
