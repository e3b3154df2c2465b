use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::mesh::rings::{fan, ring_angles, stitch, Ring};
use crate::mesh::{metric, Builder, Chart, ChartKind, GeometryTag, LoopRole, SurfaceMesh};

/// Target edge length at radial parameter `r`.
pub(crate) fn spacing(res: usize, r: f64) -> f64 {
    6.4 / res as f64 * (1.0 + 0.5 * r.abs())
}

/// Radial levels from `start` to `end`, subdividing each unit interval
/// `[start + j, start + j + 1]` uniformly. Levels depend only on `start` and `res`,
/// so grids for different `end` agree on their common range.
pub(crate) fn radial_levels(start: f64, end: f64, res: usize) -> Vec<f64> {
    let mut out = vec![start];
    let mut a = start;
    while a < end - 1e-12 {
        let b = (a + 1.0).min(end);
        let steps = ((b - a) / spacing(res, 0.5 * (a + b))).ceil().max(1.0) as usize;
        for k in 1..=steps {
            out.push(if k == steps { b } else { a + (b - a) * k as f64 / steps as f64 });
        }
        a = b;
    }
    out
}

/// Angular counts for the given circle circumferences, non-decreasing and at least `min`.
pub(crate) fn counts(levels: &[f64], circumference: impl Fn(f64) -> f64, res: usize, min: usize) -> Vec<usize> {
    let mut prev = min;
    levels
        .iter()
        .map(|&r| {
            let n = ((circumference(r) / spacing(res, r)).round() as usize).max(prev);
            prev = n;
            n
        })
        .collect()
}

fn polar_ring(b: &mut Builder, r: f64, n: usize, offset: f64) -> Ring {
    let angles = ring_angles(n, offset);
    let ids = angles
        .iter()
        .map(|&t| b.vertex(Some([r * t.cos(), r * t.sin()])))
        .collect();
    Ring { ids, angles }
}

fn half_offset(i: usize, n: usize) -> f64 {
    if i % 2 == 1 {
        PI / n as f64
    } else {
        0.0
    }
}

fn polar_bands(b: &mut Builder, levels: &[f64], ns: &[usize], first: Option<usize>) -> Vec<Ring> {
    let mut rings = Vec::new();
    for (i, (&r, &n)) in levels.iter().zip(ns).enumerate() {
        let ring = polar_ring(b, r, n, half_offset(i, n));
        match (rings.last(), first) {
            (Some(prev), _) => {
                let tris = stitch(prev, &ring, false);
                b.triangles(&tris, metric::hyperbolic_polar);
            }
            (None, Some(c)) => {
                let tris = fan(c, &ring);
                b.triangles(&tris, metric::hyperbolic_polar);
            }
            (None, None) => {}
        }
        rings.push(ring);
    }
    rings
}

pub(super) fn disk(r_max: f64, res: usize) -> Result<SurfaceMesh> {
    let levels = radial_levels(0.0, r_max, res);
    let levels = &levels[1..];
    let ns = counts(levels, |r| TAU * r.sinh(), res, 6);
    let mut b = Builder::new();
    let c = b.vertex(Some([0.0, 0.0]));
    let rings = polar_bands(&mut b, levels, &ns, Some(c));
    b.boundary("L0", rings.last().unwrap().ids.clone(), LoopRole::Truncation);
    let chart = Chart::new(ChartKind::HyperbolicPolar).with_round("L0", [0.0, 0.0], r_max);
    b.finish(GeometryTag::Hyperbolic, chart)
}

pub(super) fn annulus(r_in: f64, r_max: f64, res: usize) -> Result<SurfaceMesh> {
    let levels = radial_levels(r_in, r_max, res);
    let ns = counts(&levels, |r| TAU * r.sinh(), res, 8);
    let mut b = Builder::new();
    let rings = polar_bands(&mut b, &levels, &ns, None);
    b.boundary("L0", rings[0].ids.clone(), LoopRole::TrueBoundary);
    b.boundary("L1", rings.last().unwrap().ids.clone(), LoopRole::Truncation);
    let chart = Chart::new(ChartKind::HyperbolicPolar)
        .with_round("L0", [0.0, 0.0], r_in)
        .with_round("L1", [0.0, 0.0], r_max);
    b.finish(GeometryTag::Hyperbolic, chart)
}

/// Hyperbolic cylinder `dt² + (neck/2π)² cosh²t dθ²` on `|t| ≤ half_length`, meshed
/// mirror-symmetrically about the neck `t = 0`.
pub(super) fn cylinder(neck: f64, half_length: f64, res: usize) -> Result<SurfaceMesh> {
    let levels = radial_levels(0.0, half_length, res);
    let ns = counts(&levels, |t| neck * t.cosh(), res, 8);
    let mut b = Builder::new();
    let len = move |p: [f64; 2], q: [f64; 2]| metric::fermi(neck, p, q);
    let mut pos: Vec<Ring> = Vec::new();
    let mut neg: Vec<Ring> = Vec::new();
    for (i, (&t, &n)) in levels.iter().zip(&ns).enumerate() {
        let angles = ring_angles(n, half_offset(i, n));
        let ids: Vec<usize> = angles.iter().map(|&a| b.vertex(Some([t, a]))).collect();
        pos.push(Ring {
            ids,
            angles: angles.clone(),
        });
        if i == 0 {
            neg.push(pos[0].clone());
        } else {
            let ids = angles.iter().map(|&a| b.vertex(Some([-t, a]))).collect();
            neg.push(Ring { ids, angles });
        }
    }
    for i in 0..levels.len() - 1 {
        let tris = stitch(&pos[i], &pos[i + 1], false);
        let mirror = |v: usize| -> usize {
            // ring ids are contiguous ranges
            for (p, q) in [(&pos[i], &neg[i]), (&pos[i + 1], &neg[i + 1])] {
                let k = v.wrapping_sub(p.ids[0]);
                if k < p.ids.len() {
                    return q.ids[k];
                }
            }
            unreachable!("vertex outside the band")
        };
        let mirrored: Vec<[usize; 3]> = tris
            .iter()
            .map(|t| [mirror(t[0]), mirror(t[2]), mirror(t[1])])
            .collect();
        b.triangles(&tris, len);
        b.triangles(&mirrored, len);
    }
    b.boundary("L0", neg.last().unwrap().ids.clone(), LoopRole::Truncation);
    b.boundary("L1", pos.last().unwrap().ids.clone(), LoopRole::Truncation);
    let chart = Chart::new(ChartKind::Fermi { neck })
        .with_round("L0", [0.0, 0.0], -half_length)
        .with_round("L1", [0.0, 0.0], half_length);
    b.finish(GeometryTag::Hyperbolic, chart)
}
