//! Invariant checks for [`SurfaceMesh`].

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{key, SurfaceMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    PositiveLength,
    TriangleInequality,
    EdgeManifold,
    Orientation,
    LoopClosed,
    LoopSimple,
    LoopsDisjoint,
    LoopsCoverBoundary,
    LabelsUnique,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub invariant: Invariant,
    /// Offending triangles, edges or vertices, depending on the invariant.
    pub simplices: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, inv: Invariant) -> bool {
        self.violations.iter().any(|v| v.invariant == inv)
    }

    fn push(&mut self, invariant: Invariant, simplices: Vec<usize>, detail: impl Into<String>) {
        self.violations.push(Violation {
            invariant,
            simplices,
            detail: detail.into(),
        });
    }
}

pub fn validate(mesh: &SurfaceMesh) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for (e, &l) in mesh.lengths().iter().enumerate() {
        if !(l > 0.0 && l.is_finite()) {
            rep.push(Invariant::PositiveLength, vec![e], format!("edge {e} has length {l}"));
        }
    }
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.side_lengths(t);
        if !(a < b + c && b < c + a && c < a + b) {
            rep.push(
                Invariant::TriangleInequality,
                vec![t],
                format!("triangle {t} has sides {a}, {b}, {c}"),
            );
        }
    }
    for e in 0..mesh.num_edges() {
        let faces = mesh.edge_faces(e);
        if faces.len() > 2 {
            rep.push(
                Invariant::EdgeManifold,
                faces.iter().map(|f| f.0).collect(),
                format!("edge {e} is shared by {} triangles", faces.len()),
            );
        } else if faces.len() == 2 && faces[0].1 == faces[1].1 {
            rep.push(
                Invariant::Orientation,
                vec![faces[0].0, faces[1].0],
                format!("triangles {} and {} traverse edge {e} in the same direction", faces[0].0, faces[1].0),
            );
        }
    }

    let mut labels = HashSet::new();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut loop_edges = HashSet::new();
    for (li, lp) in mesh.loops().iter().enumerate() {
        if !labels.insert(lp.label.clone()) {
            rep.push(Invariant::LabelsUnique, vec![li], format!("label {} repeated", lp.label));
        }
        let cyc = &lp.vertex_cycle;
        let mut seen = HashSet::new();
        for &v in cyc {
            if !seen.insert(v) {
                rep.push(Invariant::LoopSimple, vec![v], format!("loop {} repeats vertex {v}", lp.label));
            }
            if let Some(&other) = owner.get(&v) {
                if other != li {
                    rep.push(
                        Invariant::LoopsDisjoint,
                        vec![v],
                        format!("vertex {v} lies on loops {} and {}", mesh.loops()[other].label, lp.label),
                    );
                }
            }
            owner.insert(v, li);
        }
        let n = cyc.len();
        if n < 3 {
            rep.push(Invariant::LoopClosed, cyc.clone(), format!("loop {} has {n} vertices", lp.label));
            continue;
        }
        for k in 0..n {
            let (u, v) = (cyc[k], cyc[(k + 1) % n]);
            match mesh.edge(u, v) {
                Some(e) if mesh.is_boundary_edge(e) => {
                    loop_edges.insert(key(u, v));
                }
                _ => rep.push(
                    Invariant::LoopClosed,
                    vec![u, v],
                    format!("loop {} step {u}->{v} is not a boundary edge", lp.label),
                ),
            }
        }
    }
    for (e, &[i, j]) in mesh.edges().iter().enumerate() {
        if mesh.is_boundary_edge(e) && !loop_edges.contains(&(i, j)) {
            rep.push(
                Invariant::LoopsCoverBoundary,
                vec![e],
                format!("boundary edge {e} = [{i}, {j}] is on no loop"),
            );
        }
    }
    rep
}
