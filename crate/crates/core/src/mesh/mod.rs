//! Triangulated surfaces with intrinsic edge lengths and labeled boundary loops.
//!
//! A [`SurfaceMesh`] is immutable once built. Connectivity (edges, edge-face
//! incidence) is derived at construction; the metric lives entirely in the
//! edge lengths, so charts are only used by generators and refinement.

mod builder;
pub mod generate;
pub mod io;
pub mod metric;
mod planar;
pub mod refine;
mod rings;
pub mod validate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate, generate_with_layout, GluedParams, Hole, Layout, ScenarioSpec, Sheet};
pub use refine::{refine, MeshFamily};
pub use validate::{validate, Invariant, ValidationReport, Violation};

pub(crate) use builder::Builder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryTag {
    Flat,
    Hyperbolic,
    Glued,
    Conformal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopRole {
    TrueBoundary,
    Truncation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    pub label: String,
    pub vertex_cycle: Vec<usize>,
    pub role: LoopRole,
}

/// Coordinate chart the `xy` values of a mesh refer to.
///
/// * `Euclidean`: flat plane coordinates.
/// * `HyperbolicPolar`: `xy = r (cos θ, sin θ)` with `r` the geodesic distance to the origin of H².
/// * `Fermi`: `xy = (t, θ)` on the hyperbolic cylinder `dt² + (neck/2π)² cosh²t dθ²`.
/// * `PiecewiseFlat`: no chart; the metric is the flat metric of each triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChartKind {
    Euclidean,
    HyperbolicPolar,
    Fermi { neck: f64 },
    PiecewiseFlat,
}

/// A boundary loop that lies on a coordinate circle of the chart.
///
/// Refinement projects new boundary vertices of such loops back onto the circle.
/// For `Fermi` charts `radius` is the `t` level and `center` is unused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLoop {
    pub label: String,
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    #[serde(default)]
    pub round_loops: Vec<RoundLoop>,
}

impl Chart {
    pub fn new(kind: ChartKind) -> Self {
        Chart {
            kind,
            round_loops: Vec::new(),
        }
    }

    pub fn with_round(mut self, label: &str, center: [f64; 2], radius: f64) -> Self {
        self.round_loops.push(RoundLoop {
            label: label.to_string(),
            center,
            radius,
        });
        self
    }
}

/// Oriented triangulated surface.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    vertices: Vec<Option<[f64; 2]>>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    /// `tri_edges[t][k]` is the edge opposite corner `k` of triangle `t`.
    tri_edges: Vec<[usize; 3]>,
    /// Incident triangles per edge, with `true` when the triangle runs along the
    /// edge in its canonical direction (low id to high id).
    edge_faces: Vec<Vec<(usize, bool)>>,
    edge_index: HashMap<(usize, usize), usize>,
    loops: Vec<BoundaryLoop>,
    tag: GeometryTag,
    chart: Chart,
}

#[inline]
pub(crate) fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl SurfaceMesh {
    /// Builds a mesh, taking edge lengths from `length(i, j)`.
    pub fn from_fn(
        vertices: Vec<Option<[f64; 2]>>,
        triangles: Vec<[usize; 3]>,
        loops: Vec<BoundaryLoop>,
        tag: GeometryTag,
        chart: Chart,
        length: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut mesh = Self::topology(vertices, triangles, loops, tag, chart)?;
        mesh.lengths = mesh.edges.iter().map(|&[i, j]| length(i, j)).collect();
        mesh.orient_loops();
        Ok(mesh)
    }

    /// Builds a mesh from an explicit length table keyed by unordered edge.
    pub fn from_lengths(
        vertices: Vec<Option<[f64; 2]>>,
        triangles: Vec<[usize; 3]>,
        loops: Vec<BoundaryLoop>,
        tag: GeometryTag,
        chart: Chart,
        table: &HashMap<(usize, usize), f64>,
    ) -> Result<Self> {
        let mut mesh = Self::topology(vertices, triangles, loops, tag, chart)?;
        let mut lengths = Vec::with_capacity(mesh.edges.len());
        for &[i, j] in &mesh.edges {
            match table.get(&(i, j)) {
                Some(&l) => lengths.push(l),
                None => return Err(Error::Format(format!("missing length for edge [{i}, {j}]"))),
            }
        }
        mesh.lengths = lengths;
        mesh.orient_loops();
        Ok(mesh)
    }

    fn topology(
        vertices: Vec<Option<[f64; 2]>>,
        triangles: Vec<[usize; 3]>,
        loops: Vec<BoundaryLoop>,
        tag: GeometryTag,
        chart: Chart,
    ) -> Result<Self> {
        let nv = vertices.len();
        let mut edges = Vec::new();
        let mut edge_index = HashMap::with_capacity(triangles.len() * 2);
        let mut edge_faces: Vec<Vec<(usize, bool)>> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for k in 0..3 {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                if a >= nv || b >= nv || a == b {
                    return Err(Error::Format(format!("triangle {t} has invalid vertices {tri:?}")));
                }
                let kk = key(a, b);
                let e = *edge_index.entry(kk).or_insert_with(|| {
                    edges.push([kk.0, kk.1]);
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                edge_faces[e].push((t, a < b));
                te[k] = e;
            }
            tri_edges.push(te);
        }
        for lp in &loops {
            if let Some(&v) = lp.vertex_cycle.iter().find(|&&v| v >= nv) {
                return Err(Error::Format(format!("loop {} references vertex {v}", lp.label)));
            }
        }
        Ok(SurfaceMesh {
            vertices,
            triangles,
            edges,
            lengths: Vec::new(),
            tri_edges,
            edge_faces,
            edge_index,
            loops,
            tag,
            chart,
        })
    }

    /// Orients each loop so that the surface lies on its left (the loop runs
    /// along its boundary edges in the direction of the adjacent triangle).
    fn orient_loops(&mut self) {
        for li in 0..self.loops.len() {
            let cyc = &self.loops[li].vertex_cycle;
            if cyc.len() < 2 {
                continue;
            }
            let (a, b) = (cyc[0], cyc[1]);
            let Some(e) = self.edge(a, b) else { continue };
            let faces = &self.edge_faces[e];
            if faces.len() != 1 {
                continue;
            }
            let (_, forward_canonical) = faces[0];
            // The face traverses a->b iff forward_canonical == (a < b).
            if forward_canonical != (a < b) {
                let cyc = &mut self.loops[li].vertex_cycle;
                cyc[1..].reverse();
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Option<[f64; 2]>] {
        &self.vertices
    }

    pub fn xy(&self, v: usize) -> Option<[f64; 2]> {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn tri_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&key(i, j)).copied()
    }

    pub fn edge_faces(&self, e: usize) -> &[(usize, bool)] {
        &self.edge_faces[e]
    }

    /// Triangle that traverses edge `e` from its low to its high vertex (on the left of that direction).
    pub fn left_face(&self, e: usize) -> Option<usize> {
        self.edge_faces[e].iter().find(|f| f.1).map(|f| f.0)
    }

    /// Triangle on the right of the canonical direction of `e`.
    pub fn right_face(&self, e: usize) -> Option<usize> {
        self.edge_faces[e].iter().find(|f| !f.1).map(|f| f.0)
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn is_interior_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 2
    }

    pub fn loops(&self) -> &[BoundaryLoop] {
        &self.loops
    }

    pub fn loop_by_label(&self, label: &str) -> Option<&BoundaryLoop> {
        self.loops.iter().find(|l| l.label == label)
    }

    pub fn geometry_tag(&self) -> GeometryTag {
        self.tag
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Marks vertices lying on any boundary loop.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut b = vec![false; self.vertices.len()];
        for lp in &self.loops {
            for &v in &lp.vertex_cycle {
                b[v] = true;
            }
        }
        for (e, f) in self.edge_faces.iter().enumerate() {
            if f.len() == 1 {
                b[self.edges[e][0]] = true;
                b[self.edges[e][1]] = true;
            }
        }
        b
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// First Betti number `2g + l - 1` of a connected surface with `l ≥ 1` boundary loops,
    /// which equals `1 - χ`.
    pub fn first_betti(&self) -> i64 {
        1 - self.euler_characteristic()
    }

    /// Side lengths `[a, b, c]` of triangle `t`, `a` opposite corner 0.
    pub fn side_lengths(&self, t: usize) -> [f64; 3] {
        let te = self.tri_edges[t];
        [self.lengths[te[0]], self.lengths[te[1]], self.lengths[te[2]]]
    }

    /// Area of triangle `t` by the stable form of Heron's formula.
    pub fn triangle_area(&self, t: usize) -> f64 {
        metric::heron(self.side_lengths(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Largest edge length.
    pub fn max_edge(&self) -> f64 {
        self.lengths.iter().cloned().fold(0.0, f64::max)
    }

    /// Diameter proxy: graph distance bound given by summing lengths along a
    /// breadth-first tree, taken as twice the largest root-to-vertex distance.
    pub fn diameter_estimate(&self) -> f64 {
        let n = self.vertices.len();
        if n == 0 {
            return 0.0;
        }
        let adj = self.vertex_adjacency();
        let mut dist = vec![f64::INFINITY; n];
        dist[0] = 0.0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(u, e) in &adj[v] {
                if dist[u].is_infinite() {
                    dist[u] = dist[v] + self.lengths[e];
                    queue.push_back(u);
                }
            }
        }
        2.0 * dist.iter().cloned().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    /// Neighbour lists `(vertex, edge)` sorted by neighbour id.
    pub fn vertex_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            adj[i].push((j, e));
            adj[j].push((i, e));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Returns a copy with vertices renumbered by `perm[old] = new`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<SurfaceMesh> {
        let n = self.vertices.len();
        if perm.len() != n {
            return Err(Error::param("perm", "length must equal vertex count"));
        }
        let mut verts = vec![None; n];
        for (old, &new) in perm.iter().enumerate() {
            verts[new] = self.vertices[old];
        }
        let tris = self
            .triangles
            .iter()
            .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
            .collect();
        let loops = self
            .loops
            .iter()
            .map(|l| BoundaryLoop {
                label: l.label.clone(),
                role: l.role,
                vertex_cycle: l.vertex_cycle.iter().map(|&v| perm[v]).collect(),
            })
            .collect();
        let mut table = HashMap::new();
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            table.insert(key(perm[i], perm[j]), self.lengths[e]);
        }
        SurfaceMesh::from_lengths(verts, tris, loops, self.tag, self.chart.clone(), &table)
    }

    /// Returns a copy with the given edge length replaced (used to build invalid meshes in tests).
    pub fn with_edge_length(&self, e: usize, len: f64) -> SurfaceMesh {
        let mut m = self.clone();
        m.lengths[e] = len;
        m
    }

    /// Returns a copy with triangle `t` reversed.
    pub fn with_flipped_triangle(&self, t: usize) -> Result<SurfaceMesh> {
        let mut tris = self.triangles.clone();
        tris[t].swap(1, 2);
        let mut table = HashMap::new();
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            table.insert((i, j), self.lengths[e]);
        }
        SurfaceMesh::from_lengths(
            self.vertices.clone(),
            tris,
            self.loops.clone(),
            self.tag,
            self.chart.clone(),
            &table,
        )
    }

    /// Sub-mesh on the triangles for which `keep` is true. Vertices are renumbered in
    /// increasing old-id order; boundary loops are rediscovered and labeled
    /// `old label` when a loop is unchanged, otherwise `B0, B1, …` in order of smallest vertex id.
    pub fn submesh(&self, keep: &[bool], tag: GeometryTag) -> Result<SurfaceMesh> {
        let mut used = vec![false; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            if keep[t] {
                for &v in tri {
                    used[v] = true;
                }
            }
        }
        let mut new_id = vec![usize::MAX; self.vertices.len()];
        let mut verts = Vec::new();
        for v in 0..self.vertices.len() {
            if used[v] {
                new_id[v] = verts.len();
                verts.push(self.vertices[v]);
            }
        }
        let tris: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .enumerate()
            .filter(|(t, _)| keep[*t])
            .map(|(_, t)| [new_id[t[0]], new_id[t[1]], new_id[t[2]]])
            .collect();
        let mut table = HashMap::new();
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            if used[i] && used[j] {
                table.insert(key(new_id[i], new_id[j]), self.lengths[e]);
            }
        }
        let provisional = SurfaceMesh::from_lengths(
            verts.clone(),
            tris.clone(),
            Vec::new(),
            tag,
            Chart::new(ChartKind::PiecewiseFlat),
            &table,
        )?;
        let cycles = provisional.discover_boundary_cycles();
        let mut loops = Vec::new();
        let mut fresh = 0;
        for cyc in cycles {
            let mut set: Vec<usize> = cyc.clone();
            set.sort_unstable();
            let matched = self.loops.iter().find(|l| {
                let mut s: Vec<usize> = l
                    .vertex_cycle
                    .iter()
                    .map(|&v| new_id[v])
                    .collect();
                s.sort_unstable();
                s == set
            });
            let (label, role) = match matched {
                Some(l) => (l.label.clone(), l.role),
                None => {
                    fresh += 1;
                    (format!("B{}", fresh - 1), LoopRole::Truncation)
                }
            };
            loops.push(BoundaryLoop {
                label,
                vertex_cycle: cyc,
                role,
            });
        }
        SurfaceMesh::from_lengths(verts, tris, loops, tag, Chart::new(ChartKind::PiecewiseFlat), &table)
    }

    /// Closed cycles of boundary edges, each starting at its smallest vertex, sorted by that vertex.
    pub fn discover_boundary_cycles(&self) -> Vec<Vec<usize>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (e, faces) in self.edge_faces.iter().enumerate() {
            if faces.len() == 1 {
                let [i, j] = self.edges[e];
                let (a, b) = if faces[0].1 { (i, j) } else { (j, i) };
                next.insert(a, b);
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        let mut cycles = Vec::new();
        for s in starts {
            if seen.contains(&s) {
                continue;
            }
            let mut cyc = vec![s];
            seen.insert(s);
            let mut v = s;
            while let Some(&w) = next.get(&v) {
                if w == s || seen.contains(&w) {
                    break;
                }
                cyc.push(w);
                seen.insert(w);
                v = w;
            }
            cycles.push(cyc);
        }
        cycles
    }

    /// Connected components of the vertex graph, as a component id per vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.vertices.len();
        let adj = self.vertex_adjacency();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(v) = stack.pop() {
                for &(u, _) in &adj[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }
}
