//! Defining functions, the completion potential `ω = ω₀ + dJdφ(f)` as a conformal
//! rescaling, completeness lengths and pluriharmonicity residuals.
//!
//! Everything here is complex dimension one, where `2i∂∂̄u = (Δu)ω₀`, so the
//! completed metric is `λω₀` with `λ = 1 - Δφ(f) = 1 + (Lφ(f))/A`.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::dec::{circulation, differential, dual_divergence_at, conjugate_differential, vertex_areas, LaplaceOperator, VertexFunction};
use crate::error::{Error, Result};
use crate::mesh::{metric, Chart, ChartKind, GeometryTag, SurfaceMesh};

/// Defining function of one boundary loop, defined on the collar `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefiningFunction {
    pub label: String,
    pub values: VertexFunction,
    pub domain: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefiningFunctionSet {
    pub functions: Vec<DefiningFunction>,
    /// Collar depth.
    pub delta: f64,
}

impl DefiningFunctionSet {
    /// Checks the loop labels, zero values on each loop, positivity off it and
    /// disjointness of the collars.
    pub fn new(mesh: &SurfaceMesh, functions: Vec<DefiningFunction>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::param("delta", "must be positive"));
        }
        let n = mesh.num_vertices();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (i, f) in functions.iter().enumerate() {
            let lp = mesh
                .loop_by_label(&f.label)
                .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {}", f.label)))?;
            if f.values.len() != n || f.domain.len() != n {
                return Err(Error::Domain(format!("defining function of {} does not match the mesh", f.label)));
            }
            let mut on_loop = vec![false; n];
            for &v in &lp.vertex_cycle {
                on_loop[v] = true;
                if !f.domain[v] || f.values[v] != 0.0 {
                    return Err(Error::Domain(format!("defining function of {} is not zero on its loop", f.label)));
                }
            }
            for v in 0..n {
                if !f.domain[v] {
                    continue;
                }
                if !on_loop[v] && !(f.values[v] > 0.0) {
                    return Err(Error::Domain(format!(
                        "defining function of {} is not positive at vertex {v}",
                        f.label
                    )));
                }
                if let Some(j) = owner[v] {
                    return Err(Error::Domain(format!(
                        "collars of {} and {} overlap at vertex {v}",
                        functions[j].label, f.label
                    )));
                }
                owner[v] = Some(i);
            }
        }
        Ok(DefiningFunctionSet { functions, delta })
    }

    /// Graph distance along edges from each named loop, restricted to vertices
    /// closer than `depth`.
    pub fn from_loop_distance(mesh: &SurfaceMesh, labels: &[&str], depth: f64, delta: f64) -> Result<Self> {
        let adj = mesh.vertex_adjacency();
        let mut functions = Vec::with_capacity(labels.len());
        for &label in labels {
            let lp = mesh
                .loop_by_label(label)
                .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {label}")))?;
            let dist = edge_distance(mesh, &adj, &lp.vertex_cycle);
            let domain: Vec<bool> = dist.iter().map(|&d| d < depth).collect();
            let values = dist.iter().zip(&domain).map(|(&d, &inside)| if inside { d } else { 0.0 }).collect();
            functions.push(DefiningFunction {
                label: label.to_string(),
                values,
                domain,
            });
        }
        Self::new(mesh, functions, delta)
    }

    /// Pointwise `inf{δ, f_i}` over the collars containing each vertex.
    pub fn infimum(&self) -> VertexFunction {
        let n = self.functions.first().map_or(0, |f| f.values.len());
        let mut out = vec![self.delta; n];
        for f in &self.functions {
            for v in 0..n {
                if f.domain[v] {
                    out[v] = out[v].min(f.values[v]);
                }
            }
        }
        out
    }
}

fn edge_distance(mesh: &SurfaceMesh, adj: &[Vec<(usize, usize)>], sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; mesh.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse((0u64, s)));
    }
    while let Some(Reverse((bits, v))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[v] {
            continue;
        }
        for &(u, e) in &adj[v] {
            let nd = d + mesh.length(e);
            if nd < dist[u] {
                dist[u] = nd;
                // non-negative floats order like their bit patterns
                heap.push(Reverse((nd.to_bits(), u)));
            }
        }
    }
    dist
}

/// The blend `ψ`: identity below `δ/4`, `3δ/8` above `δ/2`, and on `[δ/4, δ/2]`
/// the cubic Hermite interpolant of value `δ/4`, slope 1 and value `3δ/8`, slope 0.
/// With `h = δ/4` and `s = (t - δ/4)/h` its cubic coefficient vanishes, leaving
/// `ψ = δ/4 + h(s - s²/2)`.
pub fn psi(t: f64, delta: f64) -> f64 {
    let h = 0.25 * delta;
    if t < h {
        t
    } else if t > 2.0 * h {
        1.5 * h
    } else {
        let s = (t - h) / h;
        h + h * (s - 0.5 * s * s)
    }
}

/// `ψ(inf{δ, f_1, …, f_l})`.
pub fn smooth_defining_function(set: &DefiningFunctionSet) -> VertexFunction {
    set.infimum().into_iter().map(|t| psi(t, set.delta)).collect()
}

/// Smallest piecewise-linear gradient `|∇f_i|` over triangles touching each loop.
/// This is the `ε` of the nondegeneracy hypothesis; it is reported, not enforced.
pub fn boundary_gradient_floor(mesh: &SurfaceMesh, set: &DefiningFunctionSet) -> f64 {
    let mut floor = f64::INFINITY;
    for f in &set.functions {
        let Some(lp) = mesh.loop_by_label(&f.label) else { continue };
        let mut on_loop = vec![false; mesh.num_vertices()];
        for &v in &lp.vertex_cycle {
            on_loop[v] = true;
        }
        for (t, tri) in mesh.triangles().iter().enumerate() {
            if tri.iter().any(|&v| on_loop[v]) && tri.iter().all(|&v| f.domain[v]) {
                floor = floor.min(gradient_norm(mesh, t, &f.values));
            }
        }
    }
    floor
}

/// `|∇f|` of the linear interpolant on triangle `t`, from its cotangent energy.
fn gradient_norm(mesh: &SurfaceMesh, t: usize, f: &[f64]) -> f64 {
    let s = mesh.side_lengths(t);
    let area = metric::heron(s);
    let tri = mesh.triangles()[t];
    let mut energy = 0.0;
    for k in 0..3 {
        let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let (l0, l1, l2) = (s[k], s[(k + 1) % 3], s[(k + 2) % 3]);
        let cot = (l1 * l1 + l2 * l2 - l0 * l0) / (4.0 * area);
        energy += 0.5 * cot * (f[a] - f[b]).powi(2);
    }
    (energy.max(0.0) / area).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialChoice {
    /// `φ(t) = -t^(-α)/α`
    Power { alpha: f64 },
    /// `φ(t) = log t`
    Log,
    /// `φ ≡ 0`, leaving the metric unchanged.
    Constant,
}

impl PotentialChoice {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialChoice::Power { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::param("alpha", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            PotentialChoice::Power { alpha } => -t.powf(-alpha) / alpha,
            PotentialChoice::Log => t.ln(),
            PotentialChoice::Constant => 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConformalMetric {
    /// `1 + (Lφ(f))(v)/A_v` at interior vertices with `f > 0`.
    pub vertex_factor: Vec<Option<f64>>,
    /// Mean of the defined corner factors; 1 where no corner is defined.
    pub triangle_factor: Vec<f64>,
    /// Triangles with at least one undefined corner.
    pub partial: Vec<usize>,
    pub min_factor: f64,
    /// Triangles whose rescaled sides fail the strict triangle inequality.
    pub degenerate: Vec<usize>,
    /// The rescaled surface, tagged conformal.
    pub mesh: SurfaceMesh,
}

pub fn potential_metric(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    f: &[f64],
    choice: PotentialChoice,
) -> Result<ConformalMetric> {
    choice.validate()?;
    let n = mesh.num_vertices();
    if f.len() != n {
        return Err(Error::Domain("function does not match the mesh".into()));
    }
    let boundary = mesh.boundary_vertices();
    let area = vertex_areas(mesh);
    let defined: Vec<bool> = (0..n).map(|v| !boundary[v] && f[v] > 0.0 && f[v].is_finite()).collect();
    // φ(f) is only needed on defined vertices and their neighbours
    let u: Vec<f64> = f.iter().map(|&t| if t > 0.0 { choice.phi(t) } else { 0.0 }).collect();
    let mut vertex_factor = vec![None; n];
    for v in 0..n {
        if !defined[v] {
            continue;
        }
        let mut ok = true;
        for k in lap.row_ptr[v]..lap.row_ptr[v + 1] {
            let w = lap.col[k];
            if !(f[w] > 0.0) {
                ok = false;
            }
        }
        if ok {
            vertex_factor[v] = Some(1.0 + lap.apply_at(&u, v) / area[v]);
        }
    }
    let mut triangle_factor = Vec::with_capacity(mesh.num_triangles());
    let mut partial = Vec::new();
    let mut min_factor = f64::INFINITY;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let vals: Vec<f64> = tri.iter().filter_map(|&v| vertex_factor[v]).collect();
        if vals.len() < 3 {
            partial.push(t);
        }
        let lam = if vals.is_empty() {
            1.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        if !(lam > 0.0) {
            return Err(Error::Positivity { triangle: t, factor: lam });
        }
        min_factor = min_factor.min(lam);
        triangle_factor.push(lam);
    }
    let scaled: Vec<f64> = (0..mesh.num_edges())
        .map(|e| {
            let faces = mesh.edge_faces(e);
            let mean = faces.iter().map(|&(t, _)| triangle_factor[t]).sum::<f64>() / faces.len() as f64;
            mesh.length(e) * mean.sqrt()
        })
        .collect();
    let table: HashMap<(usize, usize), f64> = mesh
        .edges()
        .iter()
        .zip(&scaled)
        .map(|(&[i, j], &l)| ((i, j), l))
        .collect();
    let out = SurfaceMesh::from_lengths(
        mesh.vertices().to_vec(),
        mesh.triangles().to_vec(),
        mesh.loops().to_vec(),
        GeometryTag::Conformal,
        Chart::new(ChartKind::PiecewiseFlat),
        &table,
    )?;
    let degenerate = (0..out.num_triangles())
        .filter(|&t| !(metric::heron(out.side_lengths(t)) > 0.0))
        .collect();
    Ok(ConformalMetric {
        vertex_factor,
        triangle_factor,
        partial,
        min_factor,
        degenerate,
        mesh: out,
    })
}

/// `(2√(1+α)/α)(s^(-α/2) - S^(-α/2))`.
pub fn completeness_bound(s: f64, big_s: f64, alpha: f64) -> f64 {
    2.0 * (1.0 + alpha).sqrt() / alpha * (s.powf(-0.5 * alpha) - big_s.powf(-0.5 * alpha))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub s: f64,
    pub big_s: f64,
    pub alpha: f64,
    pub length: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Length in the rescaled metric of the vertex chain `path`, which must run from
/// `{f = S}` down to `{f = s}` with `f` decreasing.
pub fn completeness_check(
    metric: &ConformalMetric,
    f: &[f64],
    path: &[usize],
    s: f64,
    big_s: f64,
    alpha: f64,
) -> Result<CompletenessReport> {
    if !(0.0 < s && s < big_s) {
        return Err(Error::Precondition(format!("need 0 < s < S, got s = {s}, S = {big_s}")));
    }
    if path.len() < 2 {
        return Err(Error::Precondition("path needs at least two vertices".into()));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    if !close(f[path[0]], big_s) || !close(f[*path.last().unwrap()], s) {
        return Err(Error::Precondition(format!(
            "path runs from f = {} to f = {}, expected {big_s} to {s}",
            f[path[0]],
            f[*path.last().unwrap()]
        )));
    }
    let m = &metric.mesh;
    let mut length = 0.0;
    for w in path.windows(2) {
        if !(f[w[1]] < f[w[0]]) {
            return Err(Error::Precondition(format!("f does not decrease from vertex {} to {}", w[0], w[1])));
        }
        let e = m
            .edge(w[0], w[1])
            .ok_or_else(|| Error::Precondition(format!("vertices {} and {} are not adjacent", w[0], w[1])))?;
        length += m.length(e);
    }
    let bound = completeness_bound(s, big_s, alpha);
    Ok(CompletenessReport {
        s,
        big_s,
        alpha,
        length,
        bound,
        passed: length >= 0.95 * bound,
    })
}

/// Vertices on the ray `θ = 0` with `s ≤ f ≤ S`, ordered by decreasing `f`.
pub fn radial_path(mesh: &SurfaceMesh, f: &[f64], s: f64, big_s: f64) -> Vec<usize> {
    let tol = 1e-9;
    let mut v: Vec<usize> = (0..mesh.num_vertices())
        .filter(|&v| {
            mesh.xy(v)
                .is_some_and(|p| p[1].abs() <= 1e-12 * p[0].abs().max(1.0) && p[0] > 0.0)
                && f[v] >= s * (1.0 - tol)
                && f[v] <= big_s * (1.0 + tol)
        })
        .collect();
    v.sort_by(|&a, &b| f[b].total_cmp(&f[a]));
    v
}

/// `(max |Σ Jdh| around interior vertices, max |Σ dh| around triangles)`.
pub fn pluriharmonic_residual(mesh: &SurfaceMesh, lap: &LaplaceOperator, h: &[f64]) -> (f64, f64) {
    let boundary = mesh.boundary_vertices();
    let jdh = conjugate_differential(mesh, lap, h);
    let div = (0..mesh.num_vertices())
        .filter(|&v| !boundary[v])
        .map(|v| dual_divergence_at(lap, &jdh, v).abs())
        .fold(0.0, f64::max);
    let dh = differential(mesh, h);
    let circ = (0..mesh.num_triangles())
        .map(|t| circulation(mesh, &dh, t).abs())
        .fold(0.0, f64::max);
    (div, circ)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicityReport {
    pub convention: String,
    /// Smallest `(Lf)(v)/A_v = -Δf(v)` over the collar.
    pub min_value: f64,
    pub vertex: Option<usize>,
    pub sampled: usize,
    pub tol: f64,
    pub passed: bool,
}

pub const SUPERHARMONIC_TOL: f64 = 1e-6;

/// Checks `Δf ≤ 0` at the interior vertices of `collar`.
pub fn superharmonicity_check(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    f: &[f64],
    collar: &[bool],
) -> SuperharmonicityReport {
    let boundary = mesh.boundary_vertices();
    let area = vertex_areas(mesh);
    let mut min_value = f64::INFINITY;
    let mut vertex = None;
    let mut sampled = 0;
    for v in 0..mesh.num_vertices() {
        if boundary[v] || !collar[v] {
            continue;
        }
        sampled += 1;
        let x = lap.apply_at(f, v) / area[v];
        if x < min_value {
            min_value = x;
            vertex = Some(v);
        }
    }
    SuperharmonicityReport {
        convention: "L = -Δ is positive semidefinite; f is superharmonic where (Lf)/A = -Δf ≥ 0".into(),
        min_value,
        vertex,
        sampled,
        tol: SUPERHARMONIC_TOL,
        passed: sampled > 0 && min_value >= -SUPERHARMONIC_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::laplace_operator;
    use crate::mesh::{generate, ScenarioSpec};

    fn collar(res: usize) -> SurfaceMesh {
        generate(&ScenarioSpec::CollarAnnulus { r_out: 4.0, res }).unwrap()
    }

    fn log_r(m: &SurfaceMesh) -> Vec<f64> {
        (0..m.num_vertices())
            .map(|v| {
                let p = m.xy(v).unwrap();
                p[0].hypot(p[1]).ln().max(0.0)
            })
            .collect()
    }

    #[test]
    fn psi_matches_its_pieces() {
        assert_eq!(psi(0.1, 1.0), 0.1);
        assert_eq!(psi(0.9, 1.0), 0.375);
        assert!((psi(0.5, 1.0) - 0.375).abs() < 1e-15);
        assert!((psi(0.25, 1.0) - 0.25).abs() < 1e-15);
        let eps = 1e-7;
        let slope = (psi(0.25 + eps, 1.0) - psi(0.25, 1.0)) / eps;
        assert!((slope - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_potential_leaves_metric_unchanged() {
        let m = collar(16);
        let lap = laplace_operator(&m).unwrap();
        let f = log_r(&m);
        let g = potential_metric(&m, &lap, &f, PotentialChoice::Constant).unwrap();
        assert!(g.triangle_factor.iter().all(|&x| x == 1.0));
        assert_eq!(g.mesh.lengths(), m.lengths());
        assert_eq!(g.mesh.geometry_tag(), GeometryTag::Conformal);
    }

    #[test]
    fn overlapping_collars_are_rejected() {
        let m = generate(&ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 2.0,
            res: 16,
        })
        .unwrap();
        let r = DefiningFunctionSet::from_loop_distance(&m, &["L0", "L1"], 0.8, 1.0);
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(DefiningFunctionSet::from_loop_distance(&m, &["L0", "L1"], 0.4, 1.0).is_ok());
    }

    #[test]
    fn squared_radius_is_not_superharmonic() {
        let m = collar(16);
        let lap = laplace_operator(&m).unwrap();
        let f: Vec<f64> = (0..m.num_vertices())
            .map(|v| {
                let p = m.xy(v).unwrap();
                p[0] * p[0] + p[1] * p[1]
            })
            .collect();
        let rep = superharmonicity_check(&m, &lap, &f, &vec![true; m.num_vertices()]);
        assert!(!rep.passed);
        assert!(rep.min_value < -3.0);
    }

    #[test]
    fn non_monotone_path_is_refused() {
        let m = collar(16);
        let lap = laplace_operator(&m).unwrap();
        let f = log_r(&m);
        let g = potential_metric(&m, &lap, &f, PotentialChoice::Power { alpha: 1.0 }).unwrap();
        let mut path = radial_path(&m, &f, 0.01, 0.25);
        path.swap(1, 2);
        assert!(matches!(
            completeness_check(&g, &f, &path, 0.01, 0.25, 1.0),
            Err(Error::Precondition(_))
        ));
    }
}
