//! Quality triangulation of planar polygonal domains with holes.

use std::collections::HashSet;

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use crate::error::{Error, Result};

pub(crate) struct PlanarMesh {
    /// Boundary points first, in input order, then interior Steiner points.
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

/// Triangulates the region inside `outer` and outside every polygon of `holes`.
/// Polygon vertices are never moved and boundary edges are never split, so the
/// caller's boundary cycles stay valid. Triangles are counterclockwise.
pub(crate) fn triangulate(
    outer: &[[f64; 2]],
    holes: &[Vec<[f64; 2]>],
    max_area: f64,
) -> Result<PlanarMesh> {
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut handles = Vec::new();
    let mut count = 0;
    for poly in std::iter::once(outer).chain(holes.iter().map(|h| h.as_slice())) {
        let start = handles.len();
        for p in poly {
            let h = cdt
                .insert(Point2::new(p[0], p[1]))
                .map_err(|e| Error::Domain(format!("planar insertion failed: {e:?}")))?;
            handles.push(h);
            count += 1;
        }
        for i in 0..poly.len() {
            let a = handles[start + i];
            let b = handles[start + (i + 1) % poly.len()];
            cdt.add_constraint(a, b);
        }
    }
    if cdt.num_vertices() != count {
        return Err(Error::Domain("duplicate polygon vertices".into()));
    }
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(28.0))
        .with_max_allowed_area(max_area)
        .keep_constraint_edges()
        .exclude_outer_faces(true)
        .with_max_additional_vertices(2_000_000);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Resource("planar refinement exceeded its vertex budget".into()));
    }
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();

    let mut index = vec![usize::MAX; cdt.num_vertices()];
    let mut points = Vec::new();
    for (k, h) in handles.iter().enumerate() {
        index[h.index()] = k;
        let p = cdt.vertex(*h).position();
        points.push([p.x, p.y]);
    }
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let mut tri = [0usize; 3];
        for (slot, v) in tri.iter_mut().zip(vs.iter()) {
            let i = v.fix().index();
            if index[i] == usize::MAX {
                index[i] = points.len();
                let p = v.position();
                points.push([p.x, p.y]);
            }
            *slot = index[i];
        }
        triangles.push(tri);
    }
    Ok(PlanarMesh { points, triangles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle(c: [f64; 2], r: f64, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [c[0] + r * t.cos(), c[1] + r * t.sin()]
            })
            .collect()
    }

    #[test]
    fn disk_with_hole_has_annulus_topology() {
        let outer = circle([0.0, 0.0], 2.0, 40);
        let hole = circle([0.0, 0.0], 0.5, 16);
        let m = triangulate(&outer, &[hole], 0.05).unwrap();
        let mut edges = HashSet::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
            let [p, q, r] = [m.points[t[0]], m.points[t[1]], m.points[t[2]]];
            let s = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
            assert!(s > 0.0);
        }
        let chi = m.points.len() as i64 - edges.len() as i64 + m.triangles.len() as i64;
        assert_eq!(chi, 0);
    }
}
