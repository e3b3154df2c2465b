//! Convergence studies against analytic values.

use serde::Serialize;

use super::config::{Config, Family, Quantity};
use super::oracle;
use super::pipeline::truncated_capacity;
use super::report::{Check, MeshInfo, Oracle, Report, Table};
use crate::cohomology::{boundary_harmonic, homology_basis, periods};
use crate::dec::{conjugate_differential, laplace_operator};
use crate::ends::capacitor;
use crate::error::{Error, Result};
use crate::kahler::{completeness_check, potential_metric, radial_path, PotentialChoice};
use crate::mesh::{generate, refine, Layout, ScenarioSpec, SurfaceMesh};
use crate::solver::{green_function, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub triangles: usize,
    pub value: f64,
    pub oracle: f64,
    pub rel_error: f64,
    /// `log2(e_{k-1}/e_k)`; absent on the first level.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub quantity: Quantity,
    pub family: Family,
    pub rows: Vec<ConvergenceRow>,
    /// Order between the two finest levels.
    pub observed_order: f64,
}

fn family(cfg: &Config) -> Result<Vec<SurfaceMesh>> {
    let n = cfg.converge.refinements;
    match cfg.converge.family() {
        Family::Refine => Ok(refine(&generate(&cfg.scenario)?, n)?.meshes),
        Family::Resolution => {
            let base = cfg.scenario.res();
            (0..=n).map(|k| generate(&cfg.scenario.with_res(base << k))).collect()
        }
    }
}

fn ring(mesh: &SurfaceMesh, radius: f64) -> Vec<usize> {
    let layout = Layout::from_chart(mesh);
    (0..mesh.num_vertices())
        .filter(|&v| (layout.radial[v] - radius).abs() <= 1e-9 * radius.max(1.0))
        .collect()
}

fn unsupported(q: Quantity, spec: &ScenarioSpec) -> Error {
    Error::param(
        "converge.quantity",
        format!("{q:?} has no analytic value on {}", spec.name()),
    )
}

fn oracle_value(cfg: &Config) -> Result<f64> {
    let q = cfg.converge.quantity;
    let k = &cfg.kahler;
    match (q, &cfg.scenario) {
        (Quantity::Capacity, ScenarioSpec::Annulus { r_out, .. }) => Ok(truncated_capacity(&cfg.scenario, *r_out).unwrap()),
        (Quantity::Capacity, ScenarioSpec::HyperbolicAnnulus { r_max, .. }) => {
            Ok(truncated_capacity(&cfg.scenario, *r_max).unwrap())
        }
        (Quantity::Green, ScenarioSpec::Disk { r, .. }) => Ok(oracle::flat_green(1.0, *r)),
        (Quantity::Green, ScenarioSpec::HyperbolicDisk { r_max, .. }) => Ok(oracle::hyperbolic_green(1.0, *r_max)),
        (Quantity::Period, ScenarioSpec::Annulus { r_in, r_out, .. }) => Ok(oracle::flat_capacity(*r_in, *r_out)),
        (Quantity::Lambda, ScenarioSpec::Annulus { r_in, .. }) if *r_in == 1.0 => {
            Ok(oracle::power_factor(k.lambda_radius, k.alpha))
        }
        (Quantity::PathLength, ScenarioSpec::CollarAnnulus { .. }) => Ok(oracle::radial_length(k.s, k.big_s, k.alpha)),
        (q, spec) => Err(unsupported(q, spec)),
    }
}

fn measure(cfg: &Config, mesh: &SurfaceMesh, opts: &SolverOptions) -> Result<f64> {
    let k = &cfg.kahler;
    match cfg.converge.quantity {
        Quantity::Capacity => Ok(capacitor(mesh, &cfg.core, opts)?.energy),
        Quantity::Green => {
            let center = ring(mesh, 0.0);
            let &source = center
                .first()
                .ok_or_else(|| Error::Domain("no vertex at the center".into()))?;
            let (g, _) = green_function(mesh, source, "L0", opts)?;
            let at_one = ring(mesh, 1.0);
            if at_one.is_empty() {
                return Err(Error::Domain("no vertices at radius 1".into()));
            }
            Ok(at_one.iter().map(|&v| g[v]).sum::<f64>() / at_one.len() as f64)
        }
        Quantity::Period => {
            let lap = laplace_operator(mesh)?;
            let (h, _) = boundary_harmonic(mesh, &lap, &cfg.core, opts)?;
            let p = periods(&conjugate_differential(mesh, &lap, &h), &homology_basis(mesh)?)?;
            p.first()
                .map(|x| x.abs())
                .ok_or_else(|| Error::Domain("the mesh has no non-contractible cycle".into()))
        }
        Quantity::Lambda | Quantity::PathLength => {
            let lap = laplace_operator(mesh)?;
            let f: Vec<f64> = Layout::from_chart(mesh).radial.iter().map(|r| r.ln().max(0.0)).collect();
            let metric = potential_metric(mesh, &lap, &f, PotentialChoice::Power { alpha: k.alpha })?;
            if cfg.converge.quantity == Quantity::Lambda {
                let v = *ring(mesh, k.lambda_radius)
                    .first()
                    .ok_or_else(|| Error::Domain(format!("no vertices at radius {}", k.lambda_radius)))?;
                metric.vertex_factor[v].ok_or_else(|| Error::Domain("factor undefined at the sample vertex".into()))
            } else {
                let path = radial_path(mesh, &f, k.s, k.big_s);
                Ok(completeness_check(&metric, &f, &path, k.s, k.big_s, k.alpha)?.length)
            }
        }
    }
}

pub fn convergence_study(cfg: &Config, report: &mut Report) -> Result<()> {
    let opts = cfg.solver.options();
    let exact = oracle_value(cfg)?;
    let meshes = report.time("meshes", || family(cfg))?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(meshes.len());
    for (level, m) in meshes.iter().enumerate() {
        report.meshes.push(MeshInfo::of(format!("level {level}"), m));
        let value = report.time(&format!("level {level}"), || measure(cfg, m, &opts))?;
        let rel_error = ((value - exact) / exact).abs();
        let order = rows.last().map(|p| (p.rel_error / rel_error).log2());
        rows.push(ConvergenceRow {
            level,
            triangles: m.num_triangles(),
            value,
            oracle: exact,
            rel_error,
            order,
        });
    }
    let last = rows.last().expect("at least two levels");
    let observed = last.order.unwrap_or(f64::NAN);
    report.check(Check::relative(
        "value on the finest level",
        last.value,
        exact,
        cfg.converge.tolerance,
        Oracle::Analytic,
    ));
    report.check(Check::at_least("observed order", observed, cfg.converge.min_order, Oracle::StatedBound));
    let mut t = Table::new(&["level", "triangles", "value", "oracle", "rel_error", "order"]);
    for r in &rows {
        t.push(vec![
            r.level as f64,
            r.triangles as f64,
            r.value,
            r.oracle,
            r.rel_error,
            r.order.unwrap_or(f64::NAN),
        ]);
    }
    report.table = Some(t);
    report.results(&ConvergenceStudy {
        quantity: cfg.converge.quantity,
        family: cfg.converge.family(),
        rows,
        observed_order: observed,
    });
    Ok(())
}
