//! JSON mesh documents.
//!
//! Floats are written in shortest round-trip form and parsed with full
//! precision, so `read(write(m))` reproduces every length bit for bit.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{key, BoundaryLoop, Chart, ChartKind, GeometryTag, LoopRole, SurfaceMesh};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xy: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    edge: [usize; 2],
    len: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopRecord {
    label: String,
    role: LoopRole,
    cycle: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDocument {
    version: u32,
    geometry_tag: GeometryTag,
    #[serde(default = "flat_chart")]
    chart: Chart,
    vertices: Vec<VertexRecord>,
    triangles: Vec<[usize; 3]>,
    edge_lengths: Vec<EdgeRecord>,
    boundary_loops: Vec<LoopRecord>,
}

fn flat_chart() -> Chart {
    Chart::new(ChartKind::PiecewiseFlat)
}

fn document(mesh: &SurfaceMesh) -> MeshDocument {
    MeshDocument {
        version: FORMAT_VERSION,
        geometry_tag: mesh.geometry_tag(),
        chart: mesh.chart().clone(),
        vertices: mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, xy)| VertexRecord { id, xy: *xy })
            .collect(),
        triangles: mesh.triangles().to_vec(),
        edge_lengths: mesh
            .edges()
            .iter()
            .zip(mesh.lengths())
            .map(|(&edge, &len)| EdgeRecord { edge, len })
            .collect(),
        boundary_loops: mesh
            .loops()
            .iter()
            .map(|l| LoopRecord {
                label: l.label.clone(),
                role: l.role,
                cycle: l.vertex_cycle.clone(),
            })
            .collect(),
    }
}

pub fn to_json(mesh: &SurfaceMesh) -> String {
    serde_json::to_string(&document(mesh)).expect("mesh documents always serialize")
}

pub fn from_json(text: &str) -> Result<SurfaceMesh> {
    let doc: MeshDocument = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported mesh format version {} (expected {FORMAT_VERSION})",
            doc.version
        )));
    }
    let n = doc.vertices.len();
    let mut verts = vec![None; n];
    let mut seen = vec![false; n];
    for v in &doc.vertices {
        if v.id >= n || seen[v.id] {
            return Err(Error::Format(format!("vertex ids must be 0..{n} without repeats")));
        }
        seen[v.id] = true;
        verts[v.id] = v.xy;
    }
    let table: HashMap<(usize, usize), f64> = doc
        .edge_lengths
        .iter()
        .map(|e| (key(e.edge[0], e.edge[1]), e.len))
        .collect();
    let loops = doc
        .boundary_loops
        .into_iter()
        .map(|l| BoundaryLoop {
            label: l.label,
            vertex_cycle: l.cycle,
            role: l.role,
        })
        .collect();
    SurfaceMesh::from_lengths(verts, doc.triangles, loops, doc.geometry_tag, doc.chart, &table)
}

pub fn write(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(mesh))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<SurfaceMesh> {
    from_json(&std::fs::read_to_string(path)?)
}

/// SHA-256 of the canonical JSON document, hex encoded.
pub fn mesh_hash(mesh: &SurfaceMesh) -> String {
    let digest = Sha256::digest(to_json(mesh).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
