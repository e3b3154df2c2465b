//! Exhaustions of ends, capacity estimates, end classification and separation.

mod barrier;
mod fit;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use barrier::{barrier_domination_check, barrier_evaluate, BarrierFamily, DominationReport};
pub use fit::{fit_models, Fit, Model, ModelFits, PARSIMONY};

use crate::dec::{dirichlet_energy, laplace_operator, VertexFunction};
use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::mesh::{generate_with_layout, Layout, LoopRole, ScenarioSpec, SurfaceMesh};
use crate::solver::{solve_laplace_with, BoundaryCondition, SolverOptions};

/// One truncation of an end.
#[derive(Clone, Debug)]
pub struct Level {
    /// Truncation parameter: Euclidean radius, geodesic radius or cylinder half length.
    pub radius: f64,
    pub spec: ScenarioSpec,
    pub mesh: SurfaceMesh,
    pub layout: Layout,
}

#[derive(Clone, Debug)]
pub struct Exhaustion {
    pub scenario: String,
    /// Loop kept fixed at every level (the compact core), if the scenario has one.
    pub core: Option<String>,
    pub levels: Vec<Level>,
}

/// Default truncation parameters for `levels` levels.
///
/// Flat ends use radii `4·2^k`, hyperbolic ends `2 + 2k`, the hyperbolic
/// cylinder half lengths `2 + k`, and the glued plane `log R_E = 3·3^k` with
/// `R_H = 3 + k`.
pub fn default_schedule(spec: &ScenarioSpec, levels: usize) -> Result<Vec<f64>> {
    let k = 0..levels;
    Ok(match spec {
        ScenarioSpec::Annulus { .. } => k.map(|i| 4.0 * 2f64.powi(i as i32)).collect(),
        ScenarioSpec::HyperbolicAnnulus { .. } => k.map(|i| 2.0 + 2.0 * i as f64).collect(),
        ScenarioSpec::HyperbolicCylinder { .. } => k.map(|i| 2.0 + i as f64).collect(),
        ScenarioSpec::GluedPlane(_) => k.map(|i| (3.0 * 3f64.powi(i as i32)).exp()).collect(),
        other => {
            return Err(Error::Domain(format!(
                "scenario {} has no unbounded end to exhaust",
                other.name()
            )))
        }
    })
}

fn truncated(spec: &ScenarioSpec, index: usize, radius: f64) -> Result<ScenarioSpec> {
    Ok(match spec {
        ScenarioSpec::Annulus { r_in, res, .. } => ScenarioSpec::Annulus {
            r_in: *r_in,
            r_out: radius,
            res: *res,
        },
        ScenarioSpec::HyperbolicAnnulus { r_in, res, .. } => ScenarioSpec::HyperbolicAnnulus {
            r_in: *r_in,
            r_max: radius,
            res: *res,
        },
        ScenarioSpec::HyperbolicCylinder { neck, res, .. } => ScenarioSpec::HyperbolicCylinder {
            neck: *neck,
            half_length: radius,
            res: *res,
        },
        ScenarioSpec::GluedPlane(p) => {
            let mut q = p.clone();
            q.log_radius_plane = radius.ln();
            q.radius_hyperbolic = p.radius_hyperbolic + index as f64;
            ScenarioSpec::GluedPlane(q)
        }
        other => {
            return Err(Error::Domain(format!(
                "scenario {} has no unbounded end to exhaust",
                other.name()
            )))
        }
    })
}

/// Exhaustion with the default schedule; at least four levels.
pub fn build_exhaustion(spec: &ScenarioSpec, levels: usize) -> Result<Exhaustion> {
    if levels < 4 {
        return Err(Error::param("levels", format!("need at least 4, got {levels}")));
    }
    let radii = default_schedule(spec, levels)?;
    build_exhaustion_with(spec, &radii)
}

/// Exhaustion with explicit truncation parameters.
pub fn build_exhaustion_with(spec: &ScenarioSpec, radii: &[f64]) -> Result<Exhaustion> {
    default_schedule(spec, 0)?;
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("radii", "must be strictly increasing"));
    }
    let mut levels = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let s = truncated(spec, i, r)?;
        let (mesh, layout) = generate_with_layout(&s).map_err(|e| e.at_level(i))?;
        levels.push(Level {
            radius: r,
            spec: s,
            mesh,
            layout,
        });
    }
    let core = match spec {
        ScenarioSpec::HyperbolicCylinder { .. } => None,
        _ => Some("L0".to_string()),
    };
    Ok(Exhaustion {
        scenario: spec.name().to_string(),
        core,
        levels,
    })
}

impl Exhaustion {
    pub fn radii(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.radius).collect()
    }

    pub fn finest(&self) -> &Level {
        self.levels.last().expect("exhaustions are never empty")
    }

    /// Labels of the truncation loops (identical at every level).
    pub fn truncations(&self) -> Vec<String> {
        self.levels[0]
            .mesh
            .loops()
            .iter()
            .filter(|l| l.role == LoopRole::Truncation)
            .map(|l| l.label.clone())
            .collect()
    }

    /// Levels `k` whose truncation loops do not lie strictly beyond those of level `k-1`,
    /// or whose core loop moved.
    pub fn nesting_violations(&self) -> Vec<usize> {
        let extent = |lvl: &Level, label: &str| -> (f64, f64) {
            let lp = lvl.mesh.loop_by_label(label).expect("labels are stable across levels");
            lp.vertex_cycle.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
                let r = lvl.layout.radial[v].abs();
                (lo.min(r), hi.max(r))
            })
        };
        let mut bad = Vec::new();
        for k in 1..self.levels.len() {
            let (prev, cur) = (&self.levels[k - 1], &self.levels[k]);
            let grows = self
                .truncations()
                .iter()
                .all(|l| extent(cur, l).0 > extent(prev, l).1);
            let core_fixed = match &self.core {
                Some(c) => extent(cur, c) == extent(prev, c),
                None => true,
            };
            if !(grows && core_fixed) {
                bad.push(k);
            }
        }
        bad
    }

    /// Per-vertex coordinate along the end bounded by `label` at level `k`: the
    /// (signed) radial coordinate on the loop's sheet, `None` elsewhere.
    pub fn end_coordinate(&self, k: usize, label: &str) -> Result<Vec<Option<f64>>> {
        let lvl = &self.levels[k];
        let lp = lvl
            .mesh
            .loop_by_label(label)
            .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {label}")))?;
        let v0 = lp.vertex_cycle[0];
        let sheet = lvl.layout.sheet[v0];
        let sign = if lvl.layout.radial[v0] < 0.0 { -1.0 } else { 1.0 };
        Ok((0..lvl.mesh.num_vertices())
            .map(|v| {
                (lvl.layout.sheet[v] == sheet && lvl.layout.handle[v].is_none())
                    .then(|| sign * lvl.layout.radial[v])
            })
            .collect())
    }

    /// Truncation parameter of `label` at each level, measured on the loop itself.
    pub fn loop_radii(&self, label: &str) -> Result<Vec<f64>> {
        (0..self.levels.len())
            .map(|k| {
                let coord = self.end_coordinate(k, label)?;
                let lp = self.levels[k].mesh.loop_by_label(label).unwrap();
                Ok(lp
                    .vertex_cycle
                    .iter()
                    .map(|&v| coord[v].unwrap_or(f64::NAN))
                    .fold(f64::INFINITY, f64::min))
            })
            .collect()
    }
}

/// Capacitor boundary data: 1 on `core`, 0 on every truncation loop, natural elsewhere.
pub fn capacitor_condition(mesh: &SurfaceMesh, core: &str) -> Result<BoundaryCondition> {
    if mesh.loop_by_label(core).is_none() {
        return Err(Error::Domain(format!("no boundary loop labelled {core}")));
    }
    if !mesh.loops().iter().any(|l| l.role == LoopRole::Truncation && l.label != core) {
        return Err(Error::Precondition(
            "capacity needs an end: the mesh has no truncation loop".into(),
        ));
    }
    let mut bc = BoundaryCondition::new();
    for l in mesh.loops() {
        bc = if l.label == core {
            bc.dirichlet(&l.label, 1.0)
        } else if l.role == LoopRole::Truncation {
            bc.dirichlet(&l.label, 0.0)
        } else {
            bc.neumann(&l.label)
        };
    }
    Ok(bc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacitorSolution {
    pub potential: VertexFunction,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Capacitor potential of `core` on one truncated mesh and its Dirichlet energy.
pub fn capacitor(mesh: &SurfaceMesh, core: &str, opts: &SolverOptions) -> Result<CapacitorSolution> {
    let bc = capacitor_condition(mesh, core)?;
    let lap = laplace_operator(mesh)?;
    let (f, rep) = solve_laplace_with(mesh, &lap, &bc, opts)?;
    let energy = dirichlet_energy(opts.policy, mesh, &lap, &f);
    Ok(CapacitorSolution {
        potential: f,
        energy,
        residual: rep.residual,
        iterations: rep.iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Parabolic requires `limit < parabolic · E₁`.
    #[serde(default = "default_parabolic")]
    pub parabolic: f64,
    /// Non-parabolic requires `limit ≥ non_parabolic · E₁`.
    #[serde(default = "default_non_parabolic")]
    pub non_parabolic: f64,
    /// Largest relative RMS accepted for the decreasing model.
    #[serde(default = "default_fit_rms")]
    pub fit_rms: f64,
}

fn default_parabolic() -> f64 {
    0.05
}
fn default_non_parabolic() -> f64 {
    0.20
}
fn default_fit_rms() -> f64 {
    0.10
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            parabolic: default_parabolic(),
            non_parabolic: default_non_parabolic(),
            fit_rms: default_fit_rms(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
    /// True if the energies never increase by more than `1e-8` relative.
    pub monotone: bool,
    pub fits: ModelFits,
    pub limit: f64,
}

/// Capacity of `core` along an exhaustion.
pub fn capacity(ex: &Exhaustion, core: &str, opts: &SolverOptions) -> Result<CapacityEstimate> {
    capacity_with_potentials(ex, core, opts).map(|(est, _)| est)
}

/// [`capacity`] also returning the per-level potentials.
pub fn capacity_with_potentials(
    ex: &Exhaustion,
    core: &str,
    opts: &SolverOptions,
) -> Result<(CapacityEstimate, Vec<VertexFunction>)> {
    let idx: Vec<usize> = (0..ex.levels.len()).collect();
    let inner = SolverOptions {
        policy: ExecPolicy::Sequential,
        ..*opts
    };
    let sols = exec::map(opts.policy, &idx, |&k| {
        capacitor(&ex.levels[k].mesh, core, &inner).map_err(|e| e.at_level(k))
    });
    let sols: Vec<CapacitorSolution> = sols.into_iter().collect::<Result<_>>()?;
    let radii = ex.radii();
    let energies: Vec<f64> = sols.iter().map(|s| s.energy).collect();
    let monotone = energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8));
    let fits = fit_models(&radii, &energies);
    let limit = fits.best().limit.max(0.0);
    let est = CapacityEstimate {
        radii,
        residuals: sols.iter().map(|s| s.residual).collect(),
        iterations: sols.iter().map(|s| s.iterations).collect(),
        energies,
        monotone,
        fits,
        limit,
    };
    Ok((est, sols.into_iter().map(|s| s.potential).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Parabolic,
    NonParabolic,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub limit: f64,
    pub first_energy: f64,
    pub model: Model,
    pub rel_rms: f64,
    pub thresholds: Thresholds,
    /// Always true: finite truncations cannot prove a capacity is zero.
    pub heuristic: bool,
}

pub fn classify_end(est: &CapacityEstimate, th: &Thresholds) -> Result<Classification> {
    if est.energies.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "classification needs at least 4 levels, got {}",
            est.energies.len()
        )));
    }
    let e1 = est.energies[0];
    let best = est.fits.best();
    let decreasing = matches!(best.model, Model::InverseLog | Model::Power) && best.coeff > 0.0;
    let verdict = if est.limit < th.parabolic * e1 && decreasing && best.rel_rms < th.fit_rms {
        Verdict::Parabolic
    } else if est.limit >= th.non_parabolic * e1 {
        Verdict::NonParabolic
    } else {
        Verdict::Inconclusive
    };
    Ok(Classification {
        verdict,
        limit: est.limit,
        first_energy: e1,
        model: best.model,
        rel_rms: best.rel_rms,
        thresholds: *th,
        heuristic: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustionHarmonic {
    #[serde(skip)]
    pub iterates: Vec<VertexFunction>,
    /// Finest-level solution.
    #[serde(skip)]
    pub limit: VertexFunction,
    pub residuals: Vec<f64>,
    /// `max (φ_{k+1} - φ_k)` over vertices shared by levels `k` and `k+1`.
    pub sup_increase: Vec<f64>,
    /// `max |φ_{k+1} - φ_k|` over shared vertices.
    pub sup_change: Vec<f64>,
    pub shared: Vec<usize>,
    pub min_value: f64,
    pub max_value: f64,
}

impl ExhaustionHarmonic {
    /// The iterates never drop everywhere: each step increases somewhere by at least `-tol`.
    pub fn monotone(&self, tol: f64) -> bool {
        self.sup_increase.iter().all(|&d| d >= -tol)
    }

    pub fn in_unit_range(&self, tol: f64) -> bool {
        self.min_value >= -tol && self.max_value <= 1.0 + tol
    }
}

/// Vertex pairs `(a, b)` with identical chart coordinates.
pub fn shared_vertices(a: &SurfaceMesh, b: &SurfaceMesh) -> Vec<(usize, usize)> {
    let key = |p: [f64; 2]| (p[0].to_bits(), p[1].to_bits());
    let index: HashMap<_, usize> = (0..b.num_vertices())
        .filter_map(|v| b.xy(v).map(|p| (key(p), v)))
        .collect();
    (0..a.num_vertices())
        .filter_map(|v| a.xy(v).and_then(|p| index.get(&key(p)).map(|&w| (v, w))))
        .collect()
}

/// Boundary data of the separation construction: 1 on the truncation of the
/// distinguished end, 0 on the other truncations, natural on true boundaries.
pub fn separation_condition(mesh: &SurfaceMesh, distinguished: &str) -> Result<BoundaryCondition> {
    let lp = mesh
        .loop_by_label(distinguished)
        .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {distinguished}")))?;
    if lp.role != LoopRole::Truncation {
        return Err(Error::Domain(format!("{distinguished} does not bound an end")));
    }
    let ends = mesh.loops().iter().filter(|l| l.role == LoopRole::Truncation).count();
    let true_bd = mesh.loops().len() - ends;
    if ends < 2 && true_bd == 0 {
        return Err(Error::Domain(
            "need a second end or a true boundary to separate from".into(),
        ));
    }
    let mut bc = BoundaryCondition::new();
    for l in mesh.loops() {
        bc = if l.label == distinguished {
            bc.dirichlet(&l.label, 1.0)
        } else if l.role == LoopRole::Truncation {
            bc.dirichlet(&l.label, 0.0)
        } else {
            bc.neumann(&l.label)
        };
    }
    Ok(bc)
}

pub fn exhaustion_harmonic(ex: &Exhaustion, distinguished: &str, opts: &SolverOptions) -> Result<ExhaustionHarmonic> {
    if ex.levels.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 levels, got {}",
            ex.levels.len()
        )));
    }
    let idx: Vec<usize> = (0..ex.levels.len()).collect();
    let inner = SolverOptions {
        policy: ExecPolicy::Sequential,
        ..*opts
    };
    let sols = exec::map(opts.policy, &idx, |&k| {
        let m = &ex.levels[k].mesh;
        let bc = separation_condition(m, distinguished).map_err(|e| e.at_level(k))?;
        let lap = laplace_operator(m).map_err(|e| e.at_level(k))?;
        solve_laplace_with(m, &lap, &bc, &inner).map_err(|e| e.at_level(k))
    });
    let sols: Vec<_> = sols.into_iter().collect::<Result<_>>()?;
    let mut sup_increase = Vec::new();
    let mut sup_change = Vec::new();
    let mut shared = Vec::new();
    for k in 0..sols.len() - 1 {
        let pairs = shared_vertices(&ex.levels[k].mesh, &ex.levels[k + 1].mesh);
        let (a, b) = (&sols[k].0, &sols[k + 1].0);
        sup_increase.push(pairs.iter().map(|&(v, w)| b[w] - a[v]).fold(f64::NEG_INFINITY, f64::max));
        sup_change.push(pairs.iter().map(|&(v, w)| (b[w] - a[v]).abs()).fold(0.0, f64::max));
        shared.push(pairs.len());
    }
    let limit = sols.last().unwrap().0.clone();
    Ok(ExhaustionHarmonic {
        residuals: sols.iter().map(|s| s.1.residual).collect(),
        iterates: sols.into_iter().map(|s| s.0).collect(),
        min_value: limit.iter().copied().fold(f64::INFINITY, f64::min),
        max_value: limit.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        limit,
        sup_increase,
        sup_change,
        shared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaReport {
    pub delta: f64,
    /// `sup φ` off the end.
    pub sup_outside: f64,
    pub omega_vertices: usize,
    /// `Ω_δ` lies inside the end.
    pub contained: bool,
    /// Deepest end vertex outside `Ω_δ`; the rest of the end beyond it lies in `Ω_δ`.
    pub depth_star: f64,
    /// Depth of the truncation loop.
    pub loop_depth: f64,
    pub passed: bool,
}

/// Checks that `Ω_δ = {φ > 1 - δ}` sits inside the end and that the part of the
/// end outside it is bounded, with `δ` half of `1 - sup φ` off the end.
/// `depth[v]` is the end coordinate, `None` off the end.
pub fn omega_delta_check(mesh: &SurfaceMesh, phi: &[f64], depth: &[Option<f64>], label: &str) -> Result<OmegaReport> {
    let lp = mesh
        .loop_by_label(label)
        .ok_or_else(|| Error::Domain(format!("no boundary loop labelled {label}")))?;
    let in_end = |v: usize| depth[v].is_some_and(|d| d > 0.0);
    let sup_outside = (0..mesh.num_vertices())
        .filter(|&v| !in_end(v))
        .map(|v| phi[v])
        .fold(f64::NEG_INFINITY, f64::max);
    let delta = 0.5 * (1.0 - sup_outside);
    if !(delta > 0.0) {
        return Err(Error::Domain("φ reaches 1 off the end; no admissible δ".into()));
    }
    let omega: Vec<bool> = phi.iter().map(|&x| x > 1.0 - delta).collect();
    let contained = (0..mesh.num_vertices()).all(|v| !omega[v] || in_end(v));
    let depth_star = (0..mesh.num_vertices())
        .filter(|&v| in_end(v) && !omega[v])
        .map(|v| depth[v].unwrap())
        .fold(0.0, f64::max);
    let loop_depth = lp
        .vertex_cycle
        .iter()
        .filter_map(|&v| depth[v])
        .fold(f64::INFINITY, f64::min);
    Ok(OmegaReport {
        delta,
        sup_outside,
        omega_vertices: omega.iter().filter(|&&b| b).count(),
        contained,
        depth_star,
        loop_depth,
        passed: contained && depth_star < loop_depth,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileVerdict {
    DistinguishableConsistent,
    NotDistinguishableConsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    /// `(inner, outer]` radii of each annulus.
    pub annuli: Vec<(f64, f64)>,
    pub maxima: Vec<f64>,
    pub verdict: ProfileVerdict,
}

/// Maxima of `φ` (given on the finest level) over the annuli between successive
/// truncations of the end bounded by `label`.
pub fn distinguishability_profile(phi: &[f64], ex: &Exhaustion, label: &str) -> Result<Profile> {
    let k = ex.levels.len() - 1;
    if phi.len() != ex.levels[k].mesh.num_vertices() {
        return Err(Error::Domain("φ must live on the finest level".into()));
    }
    let coord = ex.end_coordinate(k, label)?;
    let radii = ex.loop_radii(label)?;
    let mut annuli = Vec::new();
    let mut maxima = Vec::new();
    for w in radii.windows(2) {
        let m = (0..phi.len())
            .filter(|&v| coord[v].is_some_and(|c| c > w[0] && c <= w[1]))
            .map(|v| phi[v])
            .fold(f64::NEG_INFINITY, f64::max);
        annuli.push((w[0], w[1]));
        maxima.push(m);
    }
    let m1 = maxima[0];
    let verdict = if maxima.iter().all(|&m| m >= 0.5 * m1) {
        ProfileVerdict::NotDistinguishableConsistent
    } else if *maxima.last().unwrap() < 0.1 * m1 && maxima.windows(2).all(|w| w[1] <= w[0]) {
        ProfileVerdict::DistinguishableConsistent
    } else {
        ProfileVerdict::Inconclusive
    };
    Ok(Profile {
        annuli,
        maxima,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(res: usize) -> ScenarioSpec {
        ScenarioSpec::Annulus {
            r_in: 1.0,
            r_out: 4.0,
            res,
        }
    }

    #[test]
    fn flat_schedule_doubles() {
        assert_eq!(default_schedule(&annulus(16), 4).unwrap(), vec![4.0, 8.0, 16.0, 32.0]);
        let ex = build_exhaustion(&annulus(16), 4).unwrap();
        assert!(ex.nesting_violations().is_empty());
    }

    #[test]
    fn compact_scenarios_have_no_exhaustion() {
        let disk = ScenarioSpec::Disk { r: 1.0, res: 16 };
        assert!(matches!(build_exhaustion(&disk, 4), Err(Error::Domain(_))));
        assert!(matches!(build_exhaustion(&annulus(16), 3), Err(Error::Parameter { .. })));
    }

    #[test]
    fn capacity_without_end_is_refused() {
        let m = crate::mesh::generate(&ScenarioSpec::Disk { r: 1.0, res: 16 }).unwrap();
        assert!(matches!(
            capacitor(&m, "L0", &SolverOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn two_levels_are_insufficient() {
        let est = CapacityEstimate {
            radii: vec![4.0, 8.0],
            energies: vec![4.5, 3.0],
            residuals: vec![0.0; 2],
            iterations: vec![0; 2],
            monotone: true,
            fits: fit_models(&[4.0, 8.0], &[4.5, 3.0]),
            limit: 0.0,
        };
        assert!(matches!(
            classify_end(&est, &Thresholds::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn constant_function_has_flat_profile() {
        let ex = build_exhaustion(&annulus(16), 4).unwrap();
        let phi = vec![1.0; ex.finest().mesh.num_vertices()];
        let p = distinguishability_profile(&phi, &ex, "L1").unwrap();
        assert!(p.maxima.iter().all(|&m| m == 1.0));
        assert_eq!(p.verdict, ProfileVerdict::NotDistinguishableConsistent);
    }
}
