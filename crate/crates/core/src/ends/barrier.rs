//! Lower barriers `F_η(x) = 1 - η log|x| + Σ c_a log|x - x_a|` on the Euclidean sheet.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{GluedParams, Layout, Sheet, SurfaceMesh};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierFamily {
    pub eta: f64,
    pub centers: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl BarrierFamily {
    pub fn new(eta: f64, centers: Vec<[f64; 2]>, weights: Vec<f64>) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::param("eta", "must be positive"));
        }
        if centers.len() != weights.len() {
            return Err(Error::param("weights", "need one weight per center"));
        }
        if let Some(i) = weights.iter().position(|&c| !(c > 0.0)) {
            return Err(Error::param(format!("weights[{i}]"), "must be positive"));
        }
        Ok(BarrierFamily { eta, centers, weights })
    }

    /// Family with the centers and weights of a glued plane.
    pub fn for_glued(p: &GluedParams, eta: f64) -> Result<Self> {
        Self::new(eta, p.centers(), p.resolved_weights())
    }

    /// `η₀ = Σ c_a` over the handles present.
    pub fn eta0(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Bound on the omitted tail `Σ_{a>A} a⁻² ≤ 1/A` for the default weights.
    pub fn eta0_tail_bound(&self) -> f64 {
        1.0 / self.weights.len().max(1) as f64
    }

    /// `C = 1 + Σ c_a log(1 + |x_a|)`.
    pub fn constant(&self) -> f64 {
        1.0 + self
            .centers
            .iter()
            .zip(&self.weights)
            .map(|(x, c)| c * (1.0 + x[0].hypot(x[1])).ln())
            .sum::<f64>()
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let mut f = 1.0 - self.eta * x[0].hypot(x[1]).ln();
        for (xa, c) in self.centers.iter().zip(&self.weights) {
            f += c * (x[0] - xa[0]).hypot(x[1] - xa[1]).ln();
        }
        f
    }
}

pub fn barrier_evaluate(family: &BarrierFamily, points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if !(family.eta > 0.0) {
        return Err(Error::param("eta", "must be positive"));
    }
    Ok(points.iter().map(|&p| family.eval(p)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub eta: f64,
    pub constant: f64,
    /// Vertices of `D_η` that were checked.
    pub sampled: usize,
    /// `(vertex, F_η - C·φ)` wherever the excess is above `tol`.
    pub violations: Vec<(usize, f64)>,
    /// Smallest `C·φ - F_η` over `D_η`.
    pub min_margin: f64,
    /// Largest `|x|` in `D_η`.
    pub extent: f64,
    /// True if `D_η` stays away from the Euclidean truncation loop.
    pub inside_mesh: bool,
    pub tol: f64,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.inside_mesh && self.sampled > 0
    }
}

/// Checks `C·φ ≥ F_η` on `D_η = {F_η > 0} ∖ B_E`, sampled at the Euclidean-sheet
/// vertices of a glued plane. `euclid_truncation` names the loop bounding the sheet.
pub fn barrier_domination_check(
    mesh: &SurfaceMesh,
    layout: &Layout,
    phi: &[f64],
    family: &BarrierFamily,
    euclid_truncation: &str,
    tol: f64,
) -> Result<DominationReport> {
    if !(family.eta > 0.0) {
        return Err(Error::param("eta", "must be positive"));
    }
    if phi.len() != mesh.num_vertices() || layout.sheet.len() != mesh.num_vertices() {
        return Err(Error::Domain("function and layout must match the mesh".into()));
    }
    let trunc = mesh
        .loop_by_label(euclid_truncation)
        .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {euclid_truncation}")))?;
    let c = family.constant();
    let mut on_trunc = vec![false; mesh.num_vertices()];
    for &v in &trunc.vertex_cycle {
        on_trunc[v] = true;
    }
    let mut rep = DominationReport {
        eta: family.eta,
        constant: c,
        sampled: 0,
        violations: Vec::new(),
        min_margin: f64::INFINITY,
        extent: 0.0,
        inside_mesh: true,
        tol,
    };
    for v in 0..mesh.num_vertices() {
        if layout.sheet[v] != Sheet::Plane {
            continue;
        }
        let Some(x) = mesh.xy(v) else { continue };
        let r = x[0].hypot(x[1]);
        if r <= 1.0 {
            continue;
        }
        let f = family.eval(x);
        if !(f > 0.0) {
            continue;
        }
        rep.sampled += 1;
        rep.extent = rep.extent.max(r);
        if on_trunc[v] {
            rep.inside_mesh = false;
        }
        let margin = c * phi[v] - f;
        rep.min_margin = rep.min_margin.min(margin);
        if -margin > tol {
            rep.violations.push((v, -margin));
        }
    }
    Ok(rep)
}
