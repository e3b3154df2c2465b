//! Differentials, conjugate differentials, the cotangent Laplacian and Dirichlet energy.

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::mesh::{metric, SurfaceMesh};

/// Scalar field on vertices, indexed by vertex id.
pub type VertexFunction = Vec<f64>;

/// Primal 1-form: value on every edge in its canonical direction (low id to high id).
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalOneForm {
    pub values: Vec<f64>,
}

impl PrimalOneForm {
    /// Value on the oriented edge `from -> to`.
    pub fn oriented(&self, mesh: &SurfaceMesh, from: usize, to: usize) -> Option<f64> {
        let e = mesh.edge(from, to)?;
        Some(if from < to { self.values[e] } else { -self.values[e] })
    }
}

/// Dual 1-form: flux across each interior edge, indexed by edge. For the canonical
/// edge `[i, j]` the value is the flux into the triangle on the left of `i -> j`.
/// Entries on boundary edges are zero and never read.
#[derive(Clone, Debug, PartialEq)]
pub struct DualOneForm {
    pub values: Vec<f64>,
}

impl DualOneForm {
    pub fn zeros(mesh: &SurfaceMesh) -> Self {
        DualOneForm {
            values: vec![0.0; mesh.num_edges()],
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &DualOneForm, b: f64) -> DualOneForm {
        DualOneForm {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }
}

/// Cotangent Laplacian `L = -Δ` in CSR form (diagonal included), with the edge
/// weights `w_e = (cot α + cot β) / 2` kept alongside.
#[derive(Clone, Debug)]
pub struct LaplaceOperator {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    /// Off-diagonal entries are `-w_ij`; the diagonal is `Σ_j w_ij`.
    pub val: Vec<f64>,
    /// Edge index of each off-diagonal entry (`usize::MAX` on the diagonal).
    pub edge_of: Vec<usize>,
    pub weights: Vec<f64>,
}

const DEGENERATE_ANGLE: f64 = std::f64::consts::PI - 1e-9;

/// Cotangent weight per edge.
pub fn cotan_weights(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    let mut w = vec![0.0; mesh.num_edges()];
    for t in 0..mesh.num_triangles() {
        let s = mesh.side_lengths(t);
        let area = metric::heron(s);
        if area <= 0.0 {
            return Err(Error::Geometry {
                triangle: t,
                reason: "zero area or triangle inequality violated".into(),
            });
        }
        let te = mesh.tri_edges(t);
        for k in 0..3 {
            let (a, b, c) = (s[k], s[(k + 1) % 3], s[(k + 2) % 3]);
            if metric::angle_opposite(a, b, c) >= DEGENERATE_ANGLE {
                return Err(Error::Geometry {
                    triangle: t,
                    reason: "angle within 1e-9 of π".into(),
                });
            }
            w[te[k]] += 0.5 * metric::cot_opposite(a, b, c, area);
        }
    }
    Ok(w)
}

pub fn laplace_operator(mesh: &SurfaceMesh) -> Result<LaplaceOperator> {
    let weights = cotan_weights(mesh)?;
    let adj = mesh.vertex_adjacency();
    let n = mesh.num_vertices();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col = Vec::new();
    let mut val = Vec::new();
    let mut edge_of = Vec::new();
    row_ptr.push(0);
    for (v, nbrs) in adj.iter().enumerate() {
        let mut diag = 0.0;
        for &(_, e) in nbrs {
            diag += weights[e];
        }
        let mut placed = false;
        for &(u, e) in nbrs {
            if !placed && u > v {
                col.push(v);
                val.push(diag);
                edge_of.push(usize::MAX);
                placed = true;
            }
            col.push(u);
            val.push(-weights[e]);
            edge_of.push(e);
        }
        if !placed {
            col.push(v);
            val.push(diag);
            edge_of.push(usize::MAX);
        }
        row_ptr.push(col.len());
    }
    Ok(LaplaceOperator {
        n,
        row_ptr,
        col,
        val,
        edge_of,
        weights,
    })
}

impl LaplaceOperator {
    /// `(Lf)_v = Σ_j w_vj (f_v - f_j)`, summed over neighbours in increasing id order.
    pub fn apply_at(&self, f: &[f64], v: usize) -> f64 {
        let mut acc = 0.0;
        for k in self.row_ptr[v]..self.row_ptr[v + 1] {
            let e = self.edge_of[k];
            if e != usize::MAX {
                acc += self.weights[e] * (f[v] - f[self.col[k]]);
            }
        }
        acc
    }

    pub fn apply(&self, policy: ExecPolicy, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        exec::fill(policy, &mut out, |v| self.apply_at(f, v));
        out
    }

    /// Entry `L[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let row = &self.col[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.val[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Maximum of `|L_ij - L_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col[k];
                worst = worst.max((self.val[k] - self.entry(j, i)).abs());
            }
        }
        worst
    }

    /// Dense copy (small meshes only).
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col[k])] = self.val[k];
            }
        }
        m
    }
}

/// `df` on canonical edges: `f(j) - f(i)` for `[i, j]`.
pub fn differential(mesh: &SurfaceMesh, f: &[f64]) -> PrimalOneForm {
    PrimalOneForm {
        values: mesh.edges().iter().map(|&[i, j]| f[j] - f[i]).collect(),
    }
}

/// Discrete Hodge star of `df`: `w_ij (f(j) - f(i))` on every interior edge.
pub fn conjugate_differential(mesh: &SurfaceMesh, lap: &LaplaceOperator, f: &[f64]) -> DualOneForm {
    DualOneForm {
        values: mesh
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &[i, j])| {
                if mesh.is_interior_edge(e) {
                    lap.weights[e] * (f[j] - f[i])
                } else {
                    0.0
                }
            })
            .collect(),
    }
}

/// Net flux of a dual form out of the dual cell of `v`, accumulated in the same
/// order and with the same products as [`LaplaceOperator::apply_at`].
pub fn dual_divergence_at(lap: &LaplaceOperator, form: &DualOneForm, v: usize) -> f64 {
    let mut acc = 0.0;
    for k in lap.row_ptr[v]..lap.row_ptr[v + 1] {
        let e = lap.edge_of[k];
        if e != usize::MAX {
            let u = lap.col[k];
            // form value is w (f_hi - f_lo); the term needed is w (f_v - f_u)
            acc += if v < u { -form.values[e] } else { form.values[e] };
        }
    }
    acc
}

/// Sum of a primal form around triangle `t` (`a -> b -> c -> a`).
pub fn circulation(mesh: &SurfaceMesh, form: &PrimalOneForm, t: usize) -> f64 {
    let [a, b, c] = mesh.triangles()[t];
    form.oriented(mesh, a, b).unwrap() + form.oriented(mesh, b, c).unwrap() + form.oriented(mesh, c, a).unwrap()
}

/// `fᵀ L f = Σ_edges w_ij (f(i) - f(j))²`.
pub fn dirichlet_energy(policy: ExecPolicy, mesh: &SurfaceMesh, lap: &LaplaceOperator, f: &[f64]) -> f64 {
    let edges = mesh.edges();
    exec::sum(policy, edges.len(), |e| {
        let [i, j] = edges[e];
        let d = f[i] - f[j];
        lap.weights[e] * d * d
    })
}

/// Barycentric dual area of every vertex.
pub fn vertex_areas(mesh: &SurfaceMesh) -> Vec<f64> {
    let mut a = vec![0.0; mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let third = mesh.triangle_area(t) / 3.0;
        for &v in tri {
            a[v] += third;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, ScenarioSpec};

    fn square(res: usize) -> SurfaceMesh {
        generate(&ScenarioSpec::Rectangle { w: 1.0, h: 1.0, res }).unwrap()
    }

    #[test]
    fn constant_has_zero_laplacian_and_energy() {
        let m = square(8);
        let lap = laplace_operator(&m).unwrap();
        let f = vec![3.5; m.num_vertices()];
        assert!(lap.apply(ExecPolicy::Sequential, &f).iter().all(|&x| x == 0.0));
        assert_eq!(dirichlet_energy(ExecPolicy::Sequential, &m, &lap, &f), 0.0);
        assert!(conjugate_differential(&m, &lap, &f).values.iter().all(|&x| x == 0.0));
        assert!(differential(&m, &f).values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn linear_function_energy_on_unit_square() {
        let m = square(10);
        let lap = laplace_operator(&m).unwrap();
        let f: Vec<f64> = m.vertices().iter().map(|p| p.unwrap()[0]).collect();
        let e = dirichlet_energy(ExecPolicy::Sequential, &m, &lap, &f);
        assert!((e - 1.0).abs() < 1e-12, "{e}");
        let df = differential(&m, &f);
        for (k, &[i, j]) in m.edges().iter().enumerate() {
            let dx = m.xy(j).unwrap()[0] - m.xy(i).unwrap()[0];
            assert!((df.values[k] - dx).abs() < 1e-15);
        }
    }

    #[test]
    fn row_sums_vanish_and_matrix_is_symmetric() {
        let m = generate(&ScenarioSpec::Disk { r: 1.0, res: 16 }).unwrap();
        let lap = laplace_operator(&m).unwrap();
        for i in 0..lap.n {
            let s: f64 = (lap.row_ptr[i]..lap.row_ptr[i + 1]).map(|k| lap.val[k]).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(lap.asymmetry() < 1e-14);
    }

    #[test]
    fn divergence_of_conjugate_equals_laplacian_bitwise() {
        let m = generate(&ScenarioSpec::Disk { r: 2.0, res: 16 }).unwrap();
        let lap = laplace_operator(&m).unwrap();
        let f: Vec<f64> = (0..m.num_vertices()).map(|v| ((v as f64) * 0.7).sin()).collect();
        let jdf = conjugate_differential(&m, &lap, &f);
        let bd = m.boundary_vertices();
        for v in 0..m.num_vertices() {
            if !bd[v] {
                assert_eq!(dual_divergence_at(&lap, &jdf, v).to_bits(), lap.apply_at(&f, v).to_bits());
            }
        }
    }

    #[test]
    fn degenerate_triangle_is_named() {
        let m = square(8);
        let bad = m.with_edge_length(0, 2.0 * m.max_edge());
        match laplace_operator(&bad) {
            Err(Error::Geometry { .. }) => {}
            other => panic!("expected geometry error, got {other:?}"),
        }
    }
}
