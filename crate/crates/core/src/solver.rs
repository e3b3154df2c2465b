//! Laplace solves with per-loop Dirichlet/Neumann data, and Green's functions.
//!
//! Dirichlet vertices are eliminated from the system, which keeps it symmetric
//! positive definite; the reduced system is solved with IC(0)-preconditioned CG.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dec::{laplace_operator, LaplaceOperator, VertexFunction};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::mesh::SurfaceMesh;
use crate::sparse::{cg, CgOptions, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Dirichlet(f64),
    /// Natural condition: zero normal flux.
    Neumann,
}

/// One condition per boundary loop, keyed by loop label.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub loops: Vec<(String, Condition)>,
}

impl BoundaryCondition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dirichlet(mut self, label: &str, value: f64) -> Self {
        self.loops.push((label.to_string(), Condition::Dirichlet(value)));
        self
    }

    pub fn neumann(mut self, label: &str) -> Self {
        self.loops.push((label.to_string(), Condition::Neumann));
        self
    }

    pub fn get(&self, label: &str) -> Option<Condition> {
        self.loops.iter().find(|(l, _)| l == label).map(|&(_, c)| c)
    }

    /// Smallest and largest Dirichlet value.
    pub fn dirichlet_range(&self) -> Option<(f64, f64)> {
        let vals = self.loops.iter().filter_map(|(_, c)| match c {
            Condition::Dirichlet(v) => Some(*v),
            Condition::Neumann => None,
        });
        vals.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolverOptions {
    pub cg: CgOptions,
    pub policy: ExecPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub wall_time: Duration,
}

/// Dirichlet vertex values implied by `bc`, checked against the mesh's loops.
pub fn dirichlet_values(mesh: &SurfaceMesh, bc: &BoundaryCondition) -> Result<Vec<Option<f64>>> {
    for (label, _) in &bc.loops {
        if mesh.loop_by_label(label).is_none() {
            return Err(Error::Constraint(format!("no boundary loop labelled {label}")));
        }
        if bc.loops.iter().filter(|(l, _)| l == label).count() > 1 {
            return Err(Error::Constraint(format!("loop {label} has more than one condition")));
        }
    }
    let mut fixed = vec![None; mesh.num_vertices()];
    let mut any = false;
    for lp in mesh.loops() {
        match bc.get(&lp.label) {
            None => {
                return Err(Error::Constraint(format!("loop {} has no boundary condition", lp.label)));
            }
            Some(Condition::Dirichlet(v)) => {
                any = true;
                for &x in &lp.vertex_cycle {
                    if let Some(old) = fixed[x] {
                        if old != v {
                            return Err(Error::Constraint(format!(
                                "vertex {x} receives conflicting Dirichlet values"
                            )));
                        }
                    }
                    fixed[x] = Some(v);
                }
            }
            Some(Condition::Neumann) => {}
        }
    }
    if !any {
        return Err(Error::Constraint(
            "no Dirichlet loop: pure Neumann problems are singular".into(),
        ));
    }
    Ok(fixed)
}

/// Solves `(Lf)(v) = rhs(v)` at free vertices with `f = fixed` elsewhere.
pub fn solve_reduced(
    lap: &LaplaceOperator,
    fixed: &[Option<f64>],
    rhs: &[f64],
    opts: &SolverOptions,
) -> Result<(VertexFunction, SolveReport)> {
    let start = Instant::now();
    let n = lap.n;
    // solve for f - c; L annihilates constants
    let c = fixed.iter().flatten().copied().next().unwrap_or(0.0);
    let mut index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if fixed[v].is_none() {
            index[v] = free.len();
            free.push(v);
        }
    }
    let mut row_ptr = Vec::with_capacity(free.len() + 1);
    let mut col = Vec::new();
    let mut val = Vec::new();
    let mut b = Vec::with_capacity(free.len());
    row_ptr.push(0);
    for &v in &free {
        let mut bv = rhs[v];
        for k in lap.row_ptr[v]..lap.row_ptr[v + 1] {
            let u = lap.col[k];
            match fixed[u] {
                Some(g) => bv -= lap.val[k] * (g - c),
                None => {
                    col.push(index[u]);
                    val.push(lap.val[k]);
                }
            }
        }
        b.push(bv);
        row_ptr.push(col.len());
    }
    let a = CsrMatrix {
        n: free.len(),
        row_ptr,
        col,
        val,
    };
    let out = cg(opts.policy, &a, &b, &opts.cg)?;
    let mut f: Vec<f64> = fixed.iter().map(|x| x.unwrap_or(0.0)).collect();
    for (k, &v) in free.iter().enumerate() {
        f[v] = out.x[k] + c;
    }
    Ok((
        f,
        SolveReport {
            iterations: out.iterations,
            residual: out.residual,
            wall_time: start.elapsed(),
        },
    ))
}

/// Harmonic function with the boundary data `bc`.
pub fn solve_laplace(
    mesh: &SurfaceMesh,
    bc: &BoundaryCondition,
    opts: &SolverOptions,
) -> Result<(VertexFunction, SolveReport)> {
    let lap = laplace_operator(mesh)?;
    solve_laplace_with(mesh, &lap, bc, opts)
}

/// [`solve_laplace`] reusing an assembled operator.
pub fn solve_laplace_with(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    bc: &BoundaryCondition,
    opts: &SolverOptions,
) -> Result<(VertexFunction, SolveReport)> {
    let fixed = dirichlet_values(mesh, bc)?;
    solve_reduced(lap, &fixed, &vec![0.0; mesh.num_vertices()], opts)
}

/// Green's function with pole at `source`: `LG = e_source`, `G = 0` on the
/// `truncation` loop, natural conditions on every other loop.
pub fn green_function(
    mesh: &SurfaceMesh,
    source: usize,
    truncation: &str,
    opts: &SolverOptions,
) -> Result<(VertexFunction, SolveReport)> {
    let lap = laplace_operator(mesh)?;
    green_function_with(mesh, &lap, source, truncation, opts)
}

pub fn green_function_with(
    mesh: &SurfaceMesh,
    lap: &LaplaceOperator,
    source: usize,
    truncation: &str,
    opts: &SolverOptions,
) -> Result<(VertexFunction, SolveReport)> {
    if source >= mesh.num_vertices() {
        return Err(Error::Domain(format!("source vertex {source} does not exist")));
    }
    if mesh.boundary_vertices()[source] {
        return Err(Error::Domain(format!("source vertex {source} lies on the boundary")));
    }
    let mut bc = BoundaryCondition::new();
    for lp in mesh.loops() {
        bc = if lp.label == truncation {
            bc.dirichlet(&lp.label, 0.0)
        } else {
            bc.neumann(&lp.label)
        };
    }
    if mesh.loop_by_label(truncation).is_none() {
        return Err(Error::Constraint(format!("no truncation loop labelled {truncation}")));
    }
    let fixed = dirichlet_values(mesh, &bc)?;
    let mut rhs = vec![0.0; mesh.num_vertices()];
    rhs[source] = 1.0;
    solve_reduced(lap, &fixed, &rhs, opts)
}

/// Largest amount by which `f` leaves `[lo, hi]`.
pub fn maximum_principle_excess(f: &[f64], lo: f64, hi: f64) -> f64 {
    f.iter().fold(0.0f64, |acc, &x| acc.max(lo - x).max(x - hi))
}

/// Net flux `Σ_v (Lf)(v)` over the vertices of a boundary loop.
pub fn loop_flux(mesh: &SurfaceMesh, lap: &LaplaceOperator, f: &[f64], label: &str) -> Result<f64> {
    let lp = mesh
        .loop_by_label(label)
        .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {label}")))?;
    Ok(lp.vertex_cycle.iter().map(|&v| lap.apply_at(f, v)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, ScenarioSpec};

    fn annulus(res: usize) -> SurfaceMesh {
        generate(&ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 4.0,
            res,
        })
        .unwrap()
    }

    #[test]
    fn constant_data_gives_constant_solution() {
        let m = annulus(32);
        let bc = BoundaryCondition::new().dirichlet("L0", 1.0).dirichlet("L1", 1.0);
        let (f, _) = solve_laplace(&m, &bc, &SolverOptions::default()).unwrap();
        assert!(f.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn pure_neumann_is_refused() {
        let m = annulus(16);
        let bc = BoundaryCondition::new().neumann("L0").neumann("L1");
        assert!(matches!(
            solve_laplace(&m, &bc, &SolverOptions::default()),
            Err(Error::Constraint(_))
        ));
        let partial = BoundaryCondition::new().dirichlet("L0", 1.0);
        assert!(matches!(
            solve_laplace(&m, &partial, &SolverOptions::default()),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn neumann_loop_carries_no_flux() {
        let m = annulus(32);
        let lap = laplace_operator(&m).unwrap();
        let bc = BoundaryCondition::new().dirichlet("L0", 1.0).neumann("L1");
        let (f, rep) = solve_laplace_with(&m, &lap, &bc, &SolverOptions::default()).unwrap();
        assert!(rep.residual <= 1e-10);
        assert!(loop_flux(&m, &lap, &f, "L1").unwrap().abs() < 1e-8);
        assert!(f.iter().all(|&x| (x - 1.0).abs() < 1e-8));
    }

    #[test]
    fn boundary_source_is_rejected() {
        let m = generate(&ScenarioSpec::Disk { r: 1.0, res: 16 }).unwrap();
        let v = m.loops()[0].vertex_cycle[0];
        assert!(matches!(
            green_function(&m, v, "L0", &SolverOptions::default()),
            Err(Error::Domain(_))
        ));
    }
}
