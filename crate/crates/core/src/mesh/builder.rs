use std::collections::HashMap;

use super::{key, BoundaryLoop, Chart, GeometryTag, LoopRole, SurfaceMesh};
use crate::error::Result;

/// Incremental mesh assembly. Edge lengths are recorded the first time an
/// edge appears, so patches sharing an interface agree on it.
#[derive(Default)]
pub(crate) struct Builder {
    verts: Vec<Option<[f64; 2]>>,
    tris: Vec<[usize; 3]>,
    table: HashMap<(usize, usize), f64>,
    loops: Vec<BoundaryLoop>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, xy: Option<[f64; 2]>) -> usize {
        self.verts.push(xy);
        self.verts.len() - 1
    }

    pub fn xy(&self, v: usize) -> [f64; 2] {
        self.verts[v].expect("vertex without chart coordinates")
    }

    /// Adds triangles; new edges get `len(xy_i, xy_j)`.
    pub fn triangles(&mut self, tris: &[[usize; 3]], len: impl Fn([f64; 2], [f64; 2]) -> f64) {
        for t in tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let kk = key(a, b);
                if !self.table.contains_key(&kk) {
                    let l = len(self.xy(a), self.xy(b));
                    self.table.insert(kk, l);
                }
            }
            self.tris.push(*t);
        }
    }

    /// Adds triangles whose new edges get lengths from vertex ids.
    pub fn triangles_by_id(&mut self, tris: &[[usize; 3]], len: impl Fn(usize, usize) -> f64) {
        for t in tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                self.table.entry(key(a, b)).or_insert_with(|| len(a, b));
            }
            self.tris.push(*t);
        }
    }

    pub fn boundary(&mut self, label: &str, cycle: Vec<usize>, role: LoopRole) {
        self.loops.push(BoundaryLoop {
            label: label.to_string(),
            vertex_cycle: cycle,
            role,
        });
    }

    pub fn finish(self, tag: GeometryTag, chart: Chart) -> Result<SurfaceMesh> {
        SurfaceMesh::from_lengths(self.verts, self.tris, self.loops, tag, chart, &self.table)
    }
}
