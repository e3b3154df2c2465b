//! Quadrisection refinement with lengths recomputed from the chart metric.

use std::collections::HashMap;

use super::metric::{chart_distance, chart_midpoint};
use super::{key, BoundaryLoop, ChartKind, SurfaceMesh};
use crate::error::{Error, Result};

/// Meshes of one scenario at increasing resolution; index 0 is the coarsest.
#[derive(Clone, Debug)]
pub struct MeshFamily {
    pub meshes: Vec<SurfaceMesh>,
}

impl MeshFamily {
    /// Edge counts per level.
    pub fn resolutions(&self) -> Vec<usize> {
        self.meshes.iter().map(|m| m.num_edges()).collect()
    }

    pub fn finest(&self) -> &SurfaceMesh {
        self.meshes.last().expect("family is never empty")
    }
}

const MAX_TRIANGLES: usize = 20_000_000;

/// Returns the mesh followed by `levels` successive quadrisections.
pub fn refine(mesh: &SurfaceMesh, levels: usize) -> Result<MeshFamily> {
    if levels < 1 {
        return Err(Error::param("levels", "must be at least 1"));
    }
    let mut meshes = vec![mesh.clone()];
    for _ in 0..levels {
        let next = quadrisect(meshes.last().unwrap())?;
        meshes.push(next);
    }
    Ok(MeshFamily { meshes })
}

/// Position of the midpoint of edge `[i, j]`, projected back onto its round loop when the
/// edge is a boundary edge of one.
fn midpoint(mesh: &SurfaceMesh, e: usize, loop_of: &HashMap<usize, usize>) -> Option<[f64; 2]> {
    let [i, j] = mesh.edges()[e];
    let (p, q) = (mesh.xy(i)?, mesh.xy(j)?);
    let kind = mesh.chart().kind;
    let mut m = chart_midpoint(kind, p, q);
    if mesh.is_boundary_edge(e) {
        let (Some(li), Some(lj)) = (loop_of.get(&i), loop_of.get(&j)) else {
            return Some(m);
        };
        if li != lj {
            return Some(m);
        }
        let label = &mesh.loops()[*li].label;
        if let Some(round) = mesh.chart().round_loops.iter().find(|r| &r.label == label) {
            match kind {
                ChartKind::Euclidean | ChartKind::HyperbolicPolar => {
                    let c = round.center;
                    let (dx, dy) = (m[0] - c[0], m[1] - c[1]);
                    let d = dx.hypot(dy);
                    if d > 0.0 {
                        m = [c[0] + round.radius * dx / d, c[1] + round.radius * dy / d];
                    }
                }
                ChartKind::Fermi { .. } => m[0] = round.radius,
                ChartKind::PiecewiseFlat => {}
            }
        }
    }
    Some(m)
}

fn quadrisect(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    let nt = mesh.num_triangles();
    if nt.saturating_mul(4) > MAX_TRIANGLES {
        return Err(Error::Resource(format!(
            "refinement to {} triangles exceeds the limit of {MAX_TRIANGLES}",
            4 * nt
        )));
    }
    let nv = mesh.num_vertices();
    let kind = mesh.chart().kind;
    let mut loop_of = HashMap::new();
    for (li, l) in mesh.loops().iter().enumerate() {
        for &v in &l.vertex_cycle {
            loop_of.insert(v, li);
        }
    }
    let mut verts: Vec<Option<[f64; 2]>> = mesh.vertices().to_vec();
    for e in 0..mesh.num_edges() {
        verts.push(midpoint(mesh, e, &loop_of));
    }
    let mid = |i: usize, j: usize| nv + mesh.edge(i, j).expect("edge of a triangle");
    let mut tris = Vec::with_capacity(4 * nt);
    let mut table: HashMap<(usize, usize), f64> = HashMap::with_capacity(3 * 4 * nt / 2 + 8);
    let intrinsic = chart_distance(kind, [0.0, 0.0], [0.0, 0.0]).is_some();
    let dist = |a: usize, b: usize| -> Option<f64> {
        if !intrinsic {
            return None;
        }
        Some(chart_distance(kind, verts[a]?, verts[b]?)?)
    };
    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let (mab, mbc, mca) = (mid(a, b), mid(b, c), mid(c, a));
        tris.push([a, mab, mca]);
        tris.push([mab, b, mbc]);
        tris.push([mca, mbc, c]);
        tris.push([mab, mbc, mca]);
        // side k is opposite corner k
        let [la, lb, lc] = mesh.side_lengths(t);
        let pieces = [
            (a, mab, 0.5 * lc),
            (mab, b, 0.5 * lc),
            (b, mbc, 0.5 * la),
            (mbc, c, 0.5 * la),
            (c, mca, 0.5 * lb),
            (mca, a, 0.5 * lb),
            (mab, mbc, 0.5 * lb),
            (mbc, mca, 0.5 * lc),
            (mca, mab, 0.5 * la),
        ];
        for (u, v, flat) in pieces {
            table
                .entry(key(u, v))
                .or_insert_with(|| dist(u, v).unwrap_or(flat));
        }
    }
    let loops = mesh
        .loops()
        .iter()
        .map(|l| {
            let n = l.vertex_cycle.len();
            let mut cyc = Vec::with_capacity(2 * n);
            for k in 0..n {
                let (u, v) = (l.vertex_cycle[k], l.vertex_cycle[(k + 1) % n]);
                cyc.push(u);
                cyc.push(mid(u, v));
            }
            BoundaryLoop {
                label: l.label.clone(),
                vertex_cycle: cyc,
                role: l.role,
            }
        })
        .collect();
    SurfaceMesh::from_lengths(verts, tris, loops, mesh.geometry_tag(), mesh.chart().clone(), &table)
}
