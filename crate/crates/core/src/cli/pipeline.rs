//! Scenario pipelines. Each builds a [`Report`] with its results, a table where one
//! makes sense, and pass/fail checks.

use serde::Serialize;
use serde_json::json;

use super::config::{Config, Pipeline};
use super::oracle;
use super::report::{Check, MeshInfo, Oracle, Report, Table};
use crate::cohomology::{
    betti_lower_bound, boundary_harmonic, class_nontrivial, default_tolerance, homology_basis, integrate_conjugate,
    periods, Conjugate,
};
use crate::dec::{conjugate_differential, laplace_operator, DualOneForm};
use crate::ends::{
    barrier_domination_check, build_exhaustion, build_exhaustion_with, capacity_with_potentials, classify_end, distinguishability_profile,
    exhaustion_harmonic, omega_delta_check, BarrierFamily, CapacityEstimate, Exhaustion, ProfileVerdict, Verdict,
};
use crate::error::{Error, Result};
use crate::kahler::{
    boundary_gradient_floor, completeness_check, pluriharmonic_residual, potential_metric, psi, radial_path,
    smooth_defining_function, superharmonicity_check, DefiningFunction, DefiningFunctionSet,
};
use crate::mesh::generate::tube_radius_bound;
use crate::mesh::{generate, ChartKind, ScenarioSpec, SurfaceMesh};
use crate::solver::maximum_principle_excess;

const DEFAULT_LEVELS: usize = 4;

/// Runs `pipeline`. `mesh` replaces the generated scenario mesh for the
/// single-mesh pipelines (periods, betti).
pub fn run_scenario(cfg: &Config, pipeline: Pipeline, mesh: Option<SurfaceMesh>) -> Result<Report> {
    let mut report = Report::new(pipeline.name(), cfg);
    match pipeline {
        Pipeline::Capacity => capacity_pipeline(cfg, &mut report, false)?,
        Pipeline::Classify => capacity_pipeline(cfg, &mut report, true)?,
        Pipeline::Separate => separate_pipeline(cfg, &mut report)?,
        Pipeline::Periods => periods_pipeline(cfg, &mut report, mesh)?,
        Pipeline::Betti => betti_pipeline(cfg, &mut report, mesh)?,
        Pipeline::Kahler => kahler_pipeline(cfg, &mut report)?,
        Pipeline::Counterexample => counterexample_pipeline(cfg, &mut report)?,
        Pipeline::Converge => super::converge::convergence_study(cfg, &mut report)?,
    }
    Ok(report)
}

fn exhaustion(cfg: &Config) -> Result<Exhaustion> {
    match &cfg.schedule {
        Some(radii) => build_exhaustion_with(&cfg.scenario, radii),
        None => build_exhaustion(&cfg.scenario, cfg.levels.unwrap_or(DEFAULT_LEVELS)),
    }
}

fn record_levels(report: &mut Report, ex: &Exhaustion) {
    for (k, l) in ex.levels.iter().enumerate() {
        report.meshes.push(MeshInfo::of(format!("level {k}"), &l.mesh));
    }
}

/// Capacity of the truncated end of radius `r`, when a closed form exists.
pub(super) fn truncated_capacity(spec: &ScenarioSpec, r: f64) -> Option<f64> {
    match *spec {
        ScenarioSpec::Annulus { r_in, .. } => Some(oracle::flat_capacity(r_in, r)),
        ScenarioSpec::HyperbolicAnnulus { r_in, .. } => Some(oracle::hyperbolic_capacity(r_in, r)),
        _ => None,
    }
}

fn capacity_checks(cfg: &Config, report: &mut Report, est: &CapacityEstimate) {
    let tol = cfg.solver.tol;
    report.check(Check::holds("energies non-increasing", est.monotone, Oracle::Identity));
    let worst = est.residuals.iter().copied().fold(0.0, f64::max);
    report.check(Check::at_most("largest solver residual", worst, tol, Oracle::Identity));
    for (k, (&r, &e)) in est.radii.iter().zip(&est.energies).enumerate() {
        if let Some(exact) = truncated_capacity(&cfg.scenario, r) {
            report.check(Check::relative(&format!("energy at level {k}"), e, exact, 0.05, Oracle::Analytic));
        }
    }
    if let ScenarioSpec::HyperbolicAnnulus { r_in, .. } = cfg.scenario {
        let limit = oracle::hyperbolic_capacity(r_in, f64::INFINITY);
        report.check(Check::relative("extrapolated capacity", est.limit, limit, 0.03, Oracle::Analytic));
    }
}

fn capacity_table(cfg: &Config, est: &CapacityEstimate) -> Table {
    let mut t = Table::new(&["level", "radius", "energy", "residual", "iterations", "oracle", "fit"]);
    let fit = est.fits.best();
    for k in 0..est.radii.len() {
        let r = est.radii[k];
        t.push(vec![
            k as f64,
            r,
            est.energies[k],
            est.residuals[k],
            est.iterations[k] as f64,
            truncated_capacity(&cfg.scenario, r).unwrap_or(f64::NAN),
            fit.eval(r),
        ]);
    }
    t
}

fn capacity_pipeline(cfg: &Config, report: &mut Report, classify: bool) -> Result<()> {
    let opts = cfg.solver.options();
    let ex = report.time("exhaustion", || exhaustion(cfg))?;
    record_levels(report, &ex);
    let (est, _) = report.time("capacity", || capacity_with_potentials(&ex, &cfg.core, &opts))?;
    capacity_checks(cfg, report, &est);
    report.table = Some(capacity_table(cfg, &est));
    if classify {
        let class = classify_end(&est, &cfg.thresholds)?;
        report.check(Check::holds(
            "verdict is conclusive",
            class.verdict != Verdict::Inconclusive,
            Oracle::StatedBound,
        ));
        if let Some(want) = cfg.expect {
            report.check(Check::holds("verdict matches expectation", class.verdict == want, Oracle::StatedBound));
        }
        report.results(&json!({ "capacity": est, "classification": class }));
    } else {
        report.results(&est);
    }
    Ok(())
}

fn separate_pipeline(cfg: &Config, report: &mut Report) -> Result<()> {
    let opts = cfg.solver.options();
    let label = cfg.end.clone().unwrap_or_else(|| "L1".into());
    let ex = report.time("exhaustion", || exhaustion(cfg))?;
    record_levels(report, &ex);
    let sep = report.time("solve", || exhaustion_harmonic(&ex, &label, &opts))?;
    let k = ex.levels.len() - 1;
    let depth = ex.end_coordinate(k, &label)?;
    let omega = omega_delta_check(&ex.levels[k].mesh, &sep.limit, &depth, &label)?;
    report.check(Check::holds("iterates monotone", sep.monotone(1e-8), Oracle::StatedBound));
    report.check(Check::holds("0 <= phi <= 1", sep.in_unit_range(1e-8), Oracle::Identity));
    report.check(Check::holds("Omega_delta containment", omega.passed, Oracle::StatedBound));
    let mut neck = None;
    if let ScenarioSpec::HyperbolicCylinder { .. } = cfg.scenario {
        let lvl = &ex.levels[k];
        let vals: Vec<f64> = (0..lvl.mesh.num_vertices())
            .filter(|&v| lvl.layout.radial[v].abs() < 1e-12)
            .map(|v| sep.limit[v])
            .collect();
        if vals.is_empty() {
            return Err(Error::Domain("the finest cylinder has no vertices on the neck".into()));
        }
        let worst = vals.iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        report.check(Check::absolute("neck value", 0.5 + worst, 0.5, 0.01, Oracle::Analytic));
        neck = Some(mean);
    }
    let mut t = Table::new(&["level", "radius", "residual", "sup_increase", "sup_change"]);
    for (j, l) in ex.levels.iter().enumerate() {
        let inc = if j == 0 { f64::NAN } else { sep.sup_increase[j - 1] };
        let ch = if j == 0 { f64::NAN } else { sep.sup_change[j - 1] };
        t.push(vec![j as f64, l.radius, sep.residuals[j], inc, ch]);
    }
    report.table = Some(t);
    report.results(&json!({ "end": label, "exhaustion": sep, "omega": omega, "neck_mean": neck }));
    Ok(())
}

fn single_mesh(cfg: &Config, report: &mut Report, mesh: Option<SurfaceMesh>) -> Result<SurfaceMesh> {
    let m = match mesh {
        Some(m) => m,
        None => report.time("generate", || generate(&cfg.scenario))?,
    };
    report.meshes.push(MeshInfo::of("mesh", &m));
    Ok(m)
}

/// Dual form `g(left) - g(right)` of a function on triangles: exact on the dual complex.
fn exact_dual_form(mesh: &SurfaceMesh) -> DualOneForm {
    let g = |t: usize| (t as f64 * 0.618_033_988_749_895).fract();
    DualOneForm {
        values: (0..mesh.num_edges())
            .map(|e| match (mesh.left_face(e), mesh.right_face(e)) {
                (Some(l), Some(r)) if mesh.is_interior_edge(e) => g(l) - g(r),
                _ => 0.0,
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct PeriodResults {
    core: String,
    basis_size: usize,
    periods: Vec<f64>,
    verdict: crate::cohomology::ClassVerdict,
    exact_form_periods: Vec<f64>,
    conjugate: ConjugateSummary,
    solver_residual: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum ConjugateSummary {
    Obstruction(Vec<f64>),
    StripMap {
        max_cr_residual: f64,
        boundary_range: (f64, f64),
        value_range: (f64, f64),
        contained: bool,
        strictly_inside: bool,
    },
}

fn periods_pipeline(cfg: &Config, report: &mut Report, mesh: Option<SurfaceMesh>) -> Result<()> {
    let opts = cfg.solver.options();
    let m = single_mesh(cfg, report, mesh)?;
    let lap = laplace_operator(&m)?;
    let (h, residual) = report.time("solve", || boundary_harmonic(&m, &lap, &cfg.core, &opts))?;
    let basis = homology_basis(&m)?;
    let form = conjugate_differential(&m, &lap, &h);
    let p = periods(&form, &basis)?;
    let tol = default_tolerance(residual.max(f64::EPSILON), m.diameter_estimate());
    let verdict = class_nontrivial(&form, &basis, tol)?;
    let exact = periods(&exact_dual_form(&m), &basis)?;
    let boundary = m.boundary_vertices();
    let bmax = (0..h.len()).filter(|&v| boundary[v]).map(|v| h[v]).fold(f64::NEG_INFINITY, f64::max);
    let hmax = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let nonconstant = maximum_principle_excess(&h, h[0], h[0]) > 0.0;
    report.check(Check::holds("maximum attained on the boundary", hmax <= bmax, Oracle::Identity));
    if !basis.is_empty() && nonconstant {
        report.check(Check::holds("class of Jdh is non-trivial", verdict.nontrivial, Oracle::StatedBound));
    }
    let worst_exact = exact.iter().map(|x| x.abs()).fold(0.0, f64::max);
    report.check(Check::at_most("largest period of an exact form", worst_exact, 1e-8, Oracle::Identity));
    if let ScenarioSpec::Annulus { r_in, r_out, .. } = cfg.scenario {
        if p.len() == 1 {
            let exact = oracle::flat_capacity(r_in, r_out);
            report.check(Check::relative("core period", p[0].abs(), exact, 0.02, Oracle::Analytic));
        }
    }
    let conj = match integrate_conjugate(&m, &lap, &h, &basis, tol)? {
        Conjugate::Obstruction(v) => ConjugateSummary::Obstruction(v),
        Conjugate::Function(s) => {
            report.check(Check::at_most("Cauchy-Riemann residual", s.max_cr_residual, 1e-8, Oracle::Identity));
            report.check(Check::holds("image lies in the strip", s.contained, Oracle::Identity));
            ConjugateSummary::StripMap {
                max_cr_residual: s.max_cr_residual,
                boundary_range: s.boundary_range,
                value_range: s.value_range,
                contained: s.contained,
                strictly_inside: s.strictly_inside,
            }
        }
    };
    let mut t = Table::new(&["cycle", "period", "exact_form_period"]);
    for (i, (&a, &b)) in p.iter().zip(&exact).enumerate() {
        t.push(vec![i as f64, a, b]);
    }
    report.table = Some(t);
    report.results(&PeriodResults {
        core: cfg.core.clone(),
        basis_size: basis.len(),
        periods: p,
        verdict,
        exact_form_periods: exact,
        conjugate: conj,
        solver_residual: residual,
    });
    Ok(())
}

fn betti_pipeline(cfg: &Config, report: &mut Report, mesh: Option<SurfaceMesh>) -> Result<()> {
    let opts = cfg.solver.options();
    let m = single_mesh(cfg, report, mesh)?;
    let labels: Vec<String> = m.loops().iter().map(|l| l.label.clone()).collect();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let b = report.time("betti", || betti_lower_bound(&m, &refs, &opts))?;
    let l = labels.len() as f64;
    report.check(Check::at_least("period-matrix rank", b.rank as f64, l - 1.0, Oracle::StatedBound));
    if b.compact {
        report.check(Check::at_most("period-matrix rank (compact)", b.rank as f64, l - 1.0, Oracle::StatedBound));
    }
    if let Some(d) = b.sum_deviation {
        report.check(Check::at_most("max |sum h_i - 1|", d, 1e-8, Oracle::Identity));
    }
    if let Some(r) = b.relation_residual {
        report.check(Check::at_most("max |sum of period vectors|", r, 1e-6, Oracle::Identity));
    }
    let worst = b.solver_residuals.iter().copied().fold(0.0, f64::max);
    let tol = default_tolerance(worst.max(f64::EPSILON), m.diameter_estimate());
    if labels.len() > 1 {
        for (label, &p) in labels.iter().zip(&b.collar_periods) {
            report.check(Check::at_least(&format!("|collar period| of {label}"), p.abs(), tol, Oracle::StatedBound));
        }
    }
    let mut t = Table::new(&["loop", "collar_period", "singular_value"]);
    for i in 0..labels.len() {
        t.push(vec![
            i as f64,
            b.collar_periods[i],
            b.singular_values.get(i).copied().unwrap_or(f64::NAN),
        ]);
    }
    report.table = Some(t);
    report.results(&b);
    Ok(())
}

fn log_radius(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    if mesh.chart().kind != ChartKind::Euclidean {
        return Err(Error::Domain("the kahler pipeline needs a Euclidean chart".into()));
    }
    Ok((0..mesh.num_vertices())
        .map(|v| {
            let p = mesh.xy(v).expect("Euclidean charts place every vertex");
            p[0].hypot(p[1]).ln().max(0.0)
        })
        .collect())
}

fn kahler_pipeline(cfg: &Config, report: &mut Report) -> Result<()> {
    let ScenarioSpec::CollarAnnulus { r_out, res } = cfg.scenario else {
        return Err(Error::param("scenario", "the kahler pipeline runs on collar_annulus"));
    };
    let k = &cfg.kahler;
    let opts = cfg.solver.options();
    let m = report.time("generate", || generate(&cfg.scenario))?;
    report.meshes.push(MeshInfo::of("collar", &m));
    let lap = laplace_operator(&m)?;
    let f = log_radius(&m)?;
    let choice = k.choice();
    let metric = report.time("metric", || potential_metric(&m, &lap, &f, choice))?;
    report.check(Check::at_least("min conformal factor", metric.min_factor, f64::MIN_POSITIVE, Oracle::StatedBound));

    let target = k.lambda_radius.ln();
    let ring = radial_path(&m, &f, target, target);
    let lam = ring.first().and_then(|&v| metric.vertex_factor[v]);
    let alpha = k.alpha;
    let power = matches!(choice, crate::kahler::PotentialChoice::Power { .. });
    if power {
        let lam = lam.ok_or_else(|| {
            Error::Domain(format!("no vertex on the ray at r = {} with a defined factor", k.lambda_radius))
        })?;
        let exact = oracle::power_factor(k.lambda_radius, alpha);
        report.check(Check::relative("lambda at lambda_radius", lam, exact, 0.03, Oracle::Analytic));
    }

    let path = radial_path(&m, &f, k.s, k.big_s);
    let near = completeness_check(&metric, &f, &path, k.s, k.big_s, alpha)?;
    let far_path = radial_path(&m, &f, k.s_far, k.big_s);
    let far = completeness_check(&metric, &f, &far_path, k.s_far, k.big_s, alpha)?;
    if power {
        let quad = oracle::radial_length(k.s, k.big_s, alpha);
        report.check(Check::relative("radial length", near.length, quad, 0.05, Oracle::Analytic));
        report.check(Check::at_least("radial length", near.length, 0.95 * near.bound, Oracle::StatedBound));
        report.check(Check::at_least("length growth toward the boundary", far.length, 3.0 * near.length, Oracle::Analytic));
    }

    // smoothed defining function of the inner loop
    let domain: Vec<bool> = f.iter().map(|&t| t < k.delta).collect();
    let values = f.iter().zip(&domain).map(|(&t, &d)| if d { t } else { 0.0 }).collect();
    let set = DefiningFunctionSet::new(
        &m,
        vec![DefiningFunction {
            label: "L0".into(),
            values,
            domain,
        }],
        k.delta,
    )?;
    let smooth = smooth_defining_function(&set);
    let eps = boundary_gradient_floor(&m, &set);

    // superharmonicity on the self-similar annulus, where log r is discrete-harmonic
    let ann = generate(&ScenarioSpec::Annulus { r_in: 1.0, r_out, res })?;
    report.meshes.push(MeshInfo::of("self-similar annulus", &ann));
    let ann_lap = laplace_operator(&ann)?;
    let g: Vec<f64> = log_radius(&ann)?.into_iter().map(|t| psi(t, k.delta)).collect();
    let sup = superharmonicity_check(&ann, &ann_lap, &g, &vec![true; ann.num_vertices()]);
    report.check(Check::at_least("min of -Laplacian of psi(log r)", sup.min_value, -sup.tol, Oracle::StatedBound));

    // pluriharmonicity of a solver-produced harmonic function
    let (h, residual) = boundary_harmonic(&m, &lap, "L0", &opts)?;
    let (div, circ) = pluriharmonic_residual(&m, &lap, &h);
    report.check(Check::at_most("dJdh residual", div, 1e-8, Oracle::Identity));
    report.check(Check::at_most("ddh residual", circ, 1e-8, Oracle::Identity));

    let mut t = Table::new(&["s", "big_s", "length", "bound"]);
    t.push(vec![near.s, near.big_s, near.length, near.bound]);
    t.push(vec![far.s, far.big_s, far.length, far.bound]);
    report.table = Some(t);
    report.results(&json!({
        "potential": choice,
        "lambda": lam,
        "min_factor": metric.min_factor,
        "partial_triangles": metric.partial.len(),
        "degenerate_triangles": metric.degenerate.len(),
        "completeness": [near, far],
        "defining_function": {
            "delta": k.delta,
            "psi": "t below delta/4; delta/4 + h(s - s^2/2) with h = delta/4, s = (t - delta/4)/h on [delta/4, delta/2]; 3 delta/8 above",
            "gradient_floor": eps,
            "max_value": smooth.iter().copied().fold(0.0, f64::max),
        },
        "superharmonicity": sup,
        "pluriharmonic": { "divergence": div, "circulation": circ, "solver_residual": residual },
    }));
    Ok(())
}

fn counterexample_pipeline(cfg: &Config, report: &mut Report) -> Result<()> {
    let ScenarioSpec::GluedPlane(p) = &cfg.scenario else {
        return Err(Error::param("scenario", "the counterexample pipeline runs on glued_plane"));
    };
    let opts = cfg.solver.options();
    let c = p.constant();
    for (a, (&d, &w)) in p.resolved_tube_radii().iter().zip(&p.resolved_weights()).enumerate() {
        let bound = tube_radius_bound(c, w);
        report.check(Check::at_most(&format!("tube radius {}", a + 1), d, bound, Oracle::StatedBound));
    }
    let ex = report.time("exhaustion", || exhaustion(cfg))?;
    record_levels(report, &ex);
    let (est, pots) = report.time("capacity", || capacity_with_potentials(&ex, &cfg.core, &opts))?;
    let class = classify_end(&est, &cfg.thresholds)?;
    report.check(Check::holds(
        "whole surface is non-parabolic",
        class.verdict == Verdict::NonParabolic,
        Oracle::StatedBound,
    ));
    let phi = pots.last().expect("exhaustions are never empty");
    let plane = cfg.end.clone().unwrap_or_else(|| "L1".into());
    let profile = distinguishability_profile(phi, &ex, &plane)?;
    let ratio = profile.maxima.iter().copied().fold(f64::INFINITY, f64::min) / profile.maxima[0];
    report.check(Check::at_least("plane-end profile ratio", ratio, 0.5, Oracle::StatedBound));
    report.check(Check::holds(
        "plane end not distinguishable",
        profile.verdict == ProfileVerdict::NotDistinguishableConsistent,
        Oracle::StatedBound,
    ));
    let hyper = distinguishability_profile(phi, &ex, "L2").ok();

    let finest = ex.finest();
    let mut dom = Vec::new();
    let eta0 = BarrierFamily::for_glued(p, 1.0)?.eta0();
    for &off in &cfg.barrier.eta_offsets {
        let fam = BarrierFamily::for_glued(p, eta0 + off)?;
        let rep = barrier_domination_check(&finest.mesh, &finest.layout, phi, &fam, &plane, cfg.barrier.tol)?;
        report.check(Check::at_most(
            &format!("domination violations at eta0 + {off}"),
            rep.violations.len() as f64,
            0.0,
            Oracle::StatedBound,
        ));
        report.check(Check::holds(&format!("D_eta inside the mesh at eta0 + {off}"), rep.inside_mesh, Oracle::StatedBound));
        dom.push(rep);
    }
    report.table = Some(capacity_table(cfg, &est));
    report.results(&json!({
        "constant": c,
        "eta0": eta0,
        "capacity": est,
        "classification": class,
        "plane_profile": profile,
        "hyperbolic_profile": hyper,
        "domination": dom,
    }));
    Ok(())
}
