//! Tree–cotree homology bases, periods of dual forms, Betti lower bounds and
//! integration of conjugate differentials.
//!
//! A dual cycle is a closed chain of triangles, consecutive ones sharing an
//! interior edge. Crossing edge `e` from its right face into its left face picks
//! up `+ω[e]`, the other direction `-ω[e]`.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dec::{conjugate_differential, laplace_operator, DualOneForm, LaplaceOperator, VertexFunction};
use crate::error::{Error, Result};
use crate::mesh::{LoopRole, SurfaceMesh};
use crate::solver::{loop_flux, solve_laplace_with, BoundaryCondition, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCycle {
    /// Triangles in order; the chain closes from the last back to the first.
    pub triangles: Vec<usize>,
    /// `(edge, sign)` for every step, sign `+1` when entering the left face.
    pub crossings: Vec<(usize, f64)>,
}

impl DualCycle {
    /// Closed chain through `triangles`; consecutive entries (cyclically) must share
    /// an interior edge.
    pub fn from_triangles(mesh: &SurfaceMesh, triangles: Vec<usize>) -> Result<Self> {
        if triangles.len() < 2 {
            return Err(Error::Domain("a dual cycle needs at least two triangles".into()));
        }
        let mut crossings = Vec::with_capacity(triangles.len());
        for k in 0..triangles.len() {
            let (a, b) = (triangles[k], triangles[(k + 1) % triangles.len()]);
            let e = shared_edge(mesh, a, b)
                .ok_or_else(|| Error::Domain(format!("triangles {a} and {b} share no interior edge")))?;
            crossings.push((e, crossing_sign(mesh, e, b)));
        }
        Ok(DualCycle { triangles, crossings })
    }

    /// Sum of `form` along the cycle.
    pub fn integrate(&self, form: &DualOneForm) -> f64 {
        self.crossings.iter().map(|&(e, s)| s * form.values[e]).sum()
    }
}

fn shared_edge(mesh: &SurfaceMesh, a: usize, b: usize) -> Option<usize> {
    mesh.tri_edges(a)
        .into_iter()
        .find(|&e| mesh.is_interior_edge(e) && mesh.edge_faces(e).iter().any(|&(t, _)| t == b))
}

fn crossing_sign(mesh: &SurfaceMesh, e: usize, into: usize) -> f64 {
    if mesh.left_face(e) == Some(into) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub cycles: Vec<DualCycle>,
    pub num_edges: usize,
    pub num_triangles: usize,
    /// Connected components of the mesh; bases of several components are concatenated.
    pub components: usize,
}

impl HomologyBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

pub fn homology_basis(mesh: &SurfaceMesh) -> Result<HomologyBasis> {
    homology_basis_with_root(mesh, 0)
}

/// Tree–cotree basis with the dual spanning tree grown from `root`.
pub fn homology_basis_with_root(mesh: &SurfaceMesh, root: usize) -> Result<HomologyBasis> {
    let nt = mesh.num_triangles();
    if root >= nt {
        return Err(Error::Domain(format!("root triangle {root} does not exist")));
    }
    let nv = mesh.num_vertices();
    let adj = mesh.vertex_adjacency();
    let (components, comp) = mesh.components();

    // primal tree: every boundary vertex is a root, plus one vertex per closed component
    let mut in_tree = vec![false; mesh.num_edges()];
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::new();
    for (v, &b) in mesh.boundary_vertices().iter().enumerate() {
        if b {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let mut rooted = vec![false; components];
    for &v in &queue {
        rooted[comp[v]] = true;
    }
    for v in 0..nv {
        if !rooted[comp[v]] {
            rooted[comp[v]] = true;
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(u, e) in &adj[v] {
            if !seen[u] && mesh.is_interior_edge(e) {
                seen[u] = true;
                in_tree[e] = true;
                queue.push_back(u);
            }
        }
    }

    // dual tree over the remaining interior edges
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nt];
    let mut depth = vec![usize::MAX; nt];
    let mut in_cotree = vec![false; mesh.num_edges()];
    let mut order: Vec<usize> = vec![root];
    order.extend((0..nt).filter(|&t| t != root));
    for start in order {
        if depth[start] != usize::MAX {
            continue;
        }
        depth[start] = 0;
        let mut q = VecDeque::from([start]);
        while let Some(t) = q.pop_front() {
            for e in mesh.tri_edges(t) {
                if !mesh.is_interior_edge(e) || in_tree[e] {
                    continue;
                }
                for &(u, _) in mesh.edge_faces(e) {
                    if depth[u] == usize::MAX {
                        depth[u] = depth[t] + 1;
                        parent[u] = Some((t, e));
                        in_cotree[e] = true;
                        q.push_back(u);
                    }
                }
            }
        }
    }

    let mut cycles = Vec::new();
    for e in 0..mesh.num_edges() {
        if !mesh.is_interior_edge(e) || in_tree[e] || in_cotree[e] {
            continue;
        }
        let faces = mesh.edge_faces(e);
        let right = mesh.right_face(e).unwrap_or(faces[0].0);
        let left = mesh.left_face(e).unwrap_or(faces[1].0);
        // path left -> ... -> right through the dual tree, then back across e
        let (mut a, mut b) = (left, right);
        let mut up = vec![a];
        let mut down = vec![b];
        while a != b {
            if depth[a] >= depth[b] {
                a = parent[a].expect("non-root has a parent").0;
                up.push(a);
            } else {
                b = parent[b].expect("non-root has a parent").0;
                down.push(b);
            }
        }
        down.pop();
        up.extend(down.into_iter().rev());
        let tris = up;
        let mut crossings = Vec::with_capacity(tris.len());
        for k in 0..tris.len() - 1 {
            let (x, y) = (tris[k], tris[k + 1]);
            let pe = match (parent[x], parent[y]) {
                (Some((p, pe)), _) if p == y => pe,
                (_, Some((p, pe))) if p == x => pe,
                _ => unreachable!("consecutive path triangles are tree neighbours"),
            };
            crossings.push((pe, crossing_sign(mesh, pe, y)));
        }
        crossings.push((e, crossing_sign(mesh, e, left)));
        cycles.push(DualCycle {
            triangles: tris,
            crossings,
        });
    }
    Ok(HomologyBasis {
        cycles,
        num_edges: mesh.num_edges(),
        num_triangles: nt,
        components,
    })
}

fn check_form(form: &DualOneForm, basis: &HomologyBasis) -> Result<()> {
    if form.values.len() != basis.num_edges {
        return Err(Error::Domain(format!(
            "form has {} edge values, basis mesh has {} edges",
            form.values.len(),
            basis.num_edges
        )));
    }
    Ok(())
}

pub fn periods(form: &DualOneForm, basis: &HomologyBasis) -> Result<Vec<f64>> {
    check_form(form, basis)?;
    Ok(basis.cycles.iter().map(|c| c.integrate(form)).collect())
}

/// `10³ × solver residual × mesh diameter`.
pub fn default_tolerance(residual: f64, diameter: f64) -> f64 {
    1e3 * residual * diameter
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub nontrivial: bool,
    /// Cycle with the largest period when the class is non-trivial.
    pub witness: Option<usize>,
    pub periods: Vec<f64>,
    pub max_period: f64,
    pub tol: f64,
    /// The verdict is trivial only because `tol` exceeds periods that are not
    /// negligible next to the form itself.
    pub tolerance_dominated: bool,
}

pub fn class_nontrivial(form: &DualOneForm, basis: &HomologyBasis, tol: f64) -> Result<ClassVerdict> {
    let p = periods(form, basis)?;
    let (mut arg, mut max) = (None, 0.0f64);
    for (i, &x) in p.iter().enumerate() {
        if x.abs() > max {
            max = x.abs();
            arg = Some(i);
        }
    }
    let scale = form.values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let nontrivial = max > tol;
    Ok(ClassVerdict {
        nontrivial,
        witness: if nontrivial { arg } else { None },
        periods: p,
        max_period: max,
        tol,
        tolerance_dominated: !nontrivial && max > 1e-9 * scale.max(f64::MIN_POSITIVE),
    })
}

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-6;

/// Numerical rank and singular values of a dense matrix given by rows.
pub fn numerical_rank(rows: &[Vec<f64>], cols: usize) -> (usize, Vec<f64>) {
    if rows.is_empty() || cols == 0 {
        return (0, Vec::new());
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let sv: Vec<f64> = m.singular_values().iter().copied().collect();
    let top = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let rank = if top > 0.0 {
        sv.iter().filter(|&&x| x > RANK_TOL * top).count()
    } else {
        0
    };
    (rank, sv)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiReport {
    pub labels: Vec<String>,
    /// No truncation loops.
    pub compact: bool,
    pub basis_size: usize,
    /// `matrix[c][i]` is the period of `Jdh_i` over cycle `c`.
    pub period_matrix: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub rank_tol: f64,
    pub rank: usize,
    /// Largest entry of `Σ_i` (period vector of `Jdh_i`), when every loop is listed.
    pub relation_residual: Option<f64>,
    /// `max |Σ_i h_i - 1|`, when every loop is listed.
    pub sum_deviation: Option<f64>,
    /// Flux of `Jdh_i` through `L_i`, the period over a cycle parallel to the loop.
    pub collar_periods: Vec<f64>,
    pub solver_residuals: Vec<f64>,
}

impl BettiReport {
    /// `rank ≥ l - 1`, and `rank ≤ l - 1` as well when the surface is compact.
    pub fn consistent(&self) -> bool {
        let l = self.labels.len();
        let lower = self.rank + 1 >= l;
        lower && (!self.compact || self.rank < l.max(1))
    }
}

/// Solves `h_i = 1` on `L_i`, `0` on every other loop, for each listed loop, and
/// bounds `b¹` by the rank of the period matrix of `{Jdh_i}`.
pub fn betti_lower_bound(mesh: &SurfaceMesh, labels: &[&str], opts: &SolverOptions) -> Result<BettiReport> {
    if labels.is_empty() {
        return Err(Error::Domain("need at least one boundary loop".into()));
    }
    for l in labels {
        if mesh.loop_by_label(l).is_none() {
            return Err(Error::Domain(format!("no boundary loop labelled {l}")));
        }
    }
    let lap = laplace_operator(mesh)?;
    let basis = homology_basis(mesh)?;
    let mut columns = Vec::with_capacity(labels.len());
    let mut collar_periods = Vec::with_capacity(labels.len());
    let mut residuals = Vec::with_capacity(labels.len());
    let mut total = vec![0.0; mesh.num_vertices()];
    for &label in labels {
        let (h, rep) = boundary_harmonic(mesh, &lap, label, opts)?;
        for (t, x) in total.iter_mut().zip(&h) {
            *t += x;
        }
        let form = conjugate_differential(mesh, &lap, &h);
        columns.push(periods(&form, &basis)?);
        collar_periods.push(loop_flux(mesh, &lap, &h, label)?);
        residuals.push(rep);
    }
    let rows: Vec<Vec<f64>> = (0..basis.len())
        .map(|c| columns.iter().map(|col| col[c]).collect())
        .collect();
    let (rank, singular_values) = numerical_rank(&rows, labels.len());
    let all = labels.len() == mesh.loops().len();
    let relation_residual = all.then(|| rows.iter().map(|r| r.iter().sum::<f64>().abs()).fold(0.0, f64::max));
    let sum_deviation = all.then(|| total.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max));
    Ok(BettiReport {
        labels: labels.iter().map(|s| s.to_string()).collect(),
        compact: mesh.loops().iter().all(|l| l.role == LoopRole::TrueBoundary),
        basis_size: basis.len(),
        period_matrix: rows,
        singular_values,
        rank_tol: RANK_TOL,
        rank,
        relation_residual,
        sum_deviation,
        collar_periods,
        solver_residuals: residuals,
    })
}

/// `h = 1` on `label`, `0` on the other loops.
pub fn boundary_harmonic(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    label: &str,
    opts: &SolverOptions,
) -> Result<(VertexFunction, f64)> {
    let mut bc = BoundaryCondition::new();
    for lp in mesh.loops() {
        bc = bc.dirichlet(&lp.label, if lp.label == label { 1.0 } else { 0.0 });
    }
    let (h, rep) = solve_laplace_with(mesh, lap, &bc, opts)?;
    Ok((h, rep.residual))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripMap {
    /// Conjugate function on triangles, zero on the root triangle.
    pub conjugate: Vec<f64>,
    /// Largest `|y(left) - y(right) - Jdh(e)|` over the interior edges of each triangle.
    pub cr_residual: Vec<f64>,
    pub max_cr_residual: f64,
    pub boundary_range: (f64, f64),
    pub value_range: (f64, f64),
    /// Every value lies in the boundary range.
    pub contained: bool,
    /// Every interior value lies strictly inside the boundary range.
    pub strictly_inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjugate {
    Function(StripMap),
    /// Periods of `Jdh`; some exceed the tolerance, so no global conjugate exists.
    Obstruction(Vec<f64>),
}

/// Integrates `Jdh` over a dual spanning tree into `y`, or returns the periods
/// that obstruct it.
pub fn integrate_conjugate(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    h: &[f64],
    basis: &HomologyBasis,
    tol: f64,
) -> Result<Conjugate> {
    let boundary = mesh.boundary_vertices();
    let scale = lap
        .row_ptr
        .windows(2)
        .enumerate()
        .map(|(v, w)| (w[0]..w[1]).find(|&k| lap.col[k] == v).map_or(0.0, |k| lap.val[k]))
        .fold(0.0f64, f64::max);
    let spread = h.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x)) - h.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    let allowed = 1e-6 * (scale * spread).max(1.0);
    for v in 0..mesh.num_vertices() {
        if !boundary[v] && lap.apply_at(h, v).abs() > allowed {
            return Err(Error::Precondition(format!(
                "h is not harmonic at vertex {v} (residual {:.3e})",
                lap.apply_at(h, v)
            )));
        }
    }
    let form = conjugate_differential(mesh, lap, h);
    let p = periods(&form, basis)?;
    if p.iter().any(|x| x.abs() > tol) {
        return Ok(Conjugate::Obstruction(p));
    }
    let nt = mesh.num_triangles();
    let mut y = vec![f64::NAN; nt];
    for start in 0..nt {
        if !y[start].is_nan() {
            continue;
        }
        y[start] = 0.0;
        let mut q = VecDeque::from([start]);
        while let Some(t) = q.pop_front() {
            for e in mesh.tri_edges(t) {
                if !mesh.is_interior_edge(e) {
                    continue;
                }
                for &(u, _) in mesh.edge_faces(e) {
                    if y[u].is_nan() {
                        y[u] = y[t] + crossing_sign(mesh, e, u) * form.values[e];
                        q.push_back(u);
                    }
                }
            }
        }
    }
    let mut cr = vec![0.0f64; nt];
    for e in 0..mesh.num_edges() {
        if !mesh.is_interior_edge(e) {
            continue;
        }
        let (Some(l), Some(r)) = (mesh.left_face(e), mesh.right_face(e)) else { continue };
        let d = (y[l] - y[r] - form.values[e]).abs();
        cr[l] = cr[l].max(d);
        cr[r] = cr[r].max(d);
    }
    let (mut blo, mut bhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in (0..h.len()).filter(|&v| boundary[v]) {
        blo = blo.min(h[v]);
        bhi = bhi.max(h[v]);
    }
    let lo = h.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    let hi = h.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x));
    let slack = allowed;
    let contained = lo >= blo - slack && hi <= bhi + slack;
    let strictly_inside = (0..h.len()).filter(|&v| !boundary[v]).all(|v| h[v] > blo && h[v] < bhi)
        || blo == bhi;
    Ok(Conjugate::Function(StripMap {
        max_cr_residual: cr.iter().fold(0.0, |a: f64, &x| a.max(x)),
        conjugate: y,
        cr_residual: cr,
        boundary_range: (blo, bhi),
        value_range: (lo, hi),
        contained,
        strictly_inside,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, Hole, ScenarioSpec};

    fn annulus() -> SurfaceMesh {
        generate(&ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 4.0,
            res: 32,
        })
        .unwrap()
    }

    #[test]
    fn basis_sizes_match_first_betti_number() {
        let disk = generate(&ScenarioSpec::Disk { r: 1.0, res: 16 }).unwrap();
        assert!(homology_basis(&disk).unwrap().is_empty());
        assert_eq!(homology_basis(&annulus()).unwrap().len(), 1);
        let pants = generate(&ScenarioSpec::PairOfPants {
            radius: 3.0,
            holes: vec![
                Hole {
                    center: [-1.2, 0.0],
                    radius: 0.5,
                },
                Hole {
                    center: [1.2, 0.0],
                    radius: 0.5,
                },
            ],
            res: 48,
        })
        .unwrap();
        assert_eq!(homology_basis(&pants).unwrap().len(), 2);
    }

    #[test]
    fn cycles_are_closed_chains() {
        let m = annulus();
        let b = homology_basis(&m).unwrap();
        for c in &b.cycles {
            let rebuilt = DualCycle::from_triangles(&m, c.triangles.clone()).unwrap();
            assert_eq!(rebuilt.crossings, c.crossings);
        }
    }

    #[test]
    fn mismatched_form_is_a_domain_error() {
        let b = homology_basis(&annulus()).unwrap();
        let form = DualOneForm { values: vec![0.0; 3] };
        assert!(matches!(periods(&form, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn huge_tolerance_is_flagged() {
        let m = annulus();
        let lap = laplace_operator(&m).unwrap();
        let (h, _) = boundary_harmonic(&m, &lap, "L0", &SolverOptions::default()).unwrap();
        let form = conjugate_differential(&m, &lap, &h);
        let b = homology_basis(&m).unwrap();
        let v = class_nontrivial(&form, &b, 1e6).unwrap();
        assert!(!v.nontrivial && v.tolerance_dominated);
        let v = class_nontrivial(&form, &b, 1e-6).unwrap();
        assert!(v.nontrivial && v.witness == Some(0));
    }
}
